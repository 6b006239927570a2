#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "onsetbench/io.hpp"

namespace onsetbench {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd edges_from(const json& j, const char* key) {
  const auto& arr = j.at(key);
  if (!arr.is_array()) throw Error(ErrorKind::MalformedFile, std::string(key) + " is not an array");
  Eigen::VectorXd e(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) e[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return e;
}

void put_u32le(std::uint32_t v, char* out) {
  out[0] = static_cast<char>(v & 0xFFu);
  out[1] = static_cast<char>((v >> 8) & 0xFFu);
  out[2] = static_cast<char>((v >> 16) & 0xFFu);
  out[3] = static_cast<char>((v >> 24) & 0xFFu);
}

std::uint32_t get_u32le(const unsigned char* in) {
  return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
         (static_cast<std::uint32_t>(in[2]) << 16) | (static_cast<std::uint32_t>(in[3]) << 24);
}

}  // namespace

void write_grid_series(const FieldSeries<float>& series, const std::filesystem::path& path,
                       const std::string& variable, float missing_value) {
  const RegularGrid& g = series.grid();
  json h;
  h["schema_version"] = kGridSeriesVersion;
  h["variable"] = variable;
  h["units"] = std::string(to_string(series.units()));
  h["lat_edges"] = to_vector(g.lat_edges());
  h["lon_edges"] = to_vector(g.lon_edges());
  h["start_date"] = series.start_date().iso();
  h["calendar"] = "gregorian";
  h["n_days"] = series.n_days();
  h["n_lat"] = g.n_lat();
  h["n_lon"] = g.n_lon();
  h["missing_value"] = missing_value;
  h["byte_order"] = "little";
  h["element_type"] = "float32";

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << kGridSeriesMagic << '\n' << h.dump() << '\n';

  const auto& v = series.values();
  std::vector<char> buf(static_cast<std::size_t>(v.size()) * 4);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const float x = std::isnan(v.data()[i]) ? missing_value : v.data()[i];
    put_u32le(std::bit_cast<std::uint32_t>(x), buf.data() + 4 * i);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

GridSeriesFile read_grid_series(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string magic, header_line;
  if (!std::getline(in, magic) || magic != kGridSeriesMagic) {
    throw Error(ErrorKind::MalformedFile, path.string() + ": not a grid series file");
  }
  if (!std::getline(in, header_line)) {
    throw Error(ErrorKind::MalformedFile, path.string() + ": missing header");
  }
  json h;
  try {
    h = json::parse(header_line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedFile, path.string() + ": bad header: " + e.what());
  }
  if (!h.is_object() || !h.contains("schema_version")) {
    throw Error(ErrorKind::MalformedFile, path.string() + ": header lacks schema_version");
  }
  if (!h["schema_version"].is_number_integer() || h["schema_version"].get<int>() != kGridSeriesVersion) {
    throw Error(ErrorKind::UnsupportedVersion,
                path.string() + ": unsupported schema version " + h["schema_version"].dump());
  }

  GridSeriesFile f;
  Eigen::Index n_days = 0;
  RegularGrid grid;
  CalendarDate start;
  Units units{};
  try {
    if (h.at("byte_order") != "little" || h.at("element_type") != "float32" ||
        h.at("calendar") != "gregorian") {
      throw Error(ErrorKind::MalformedFile,
                  path.string() + ": unsupported byte order, element type or calendar");
    }
    f.variable = h.at("variable").get<std::string>();
    f.missing_value = h.at("missing_value").get<float>();
    units = parse_units(h.at("units").get<std::string>());
    grid = RegularGrid(edges_from(h, "lat_edges"), edges_from(h, "lon_edges"));
    start = CalendarDate::parse(h.at("start_date").get<std::string>());
    n_days = h.at("n_days").get<Eigen::Index>();
    if (h.at("n_lat").get<Eigen::Index>() != grid.n_lat() ||
        h.at("n_lon").get<Eigen::Index>() != grid.n_lon() || n_days < 0) {
      throw Error(ErrorKind::MalformedFile, path.string() + ": header dimensions disagree");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedFile, path.string() + ": bad header: " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::MalformedFile || e.kind() == ErrorKind::UnitMismatch) throw;
    throw Error(ErrorKind::MalformedFile, path.string() + ": " + e.what());
  }

  const std::size_t n_values = static_cast<std::size_t>(n_days * grid.n_cells());
  const std::streampos payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::size_t>(in.tellg() - payload_start);
  if (payload_bytes != 4 * n_values) {
    throw Error(ErrorKind::LengthMismatch,
                path.string() + ": payload has " + std::to_string(payload_bytes) +
                    " bytes, header implies " + std::to_string(4 * n_values));
  }
  in.seekg(payload_start);
  std::vector<unsigned char> buf(payload_bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw Error(ErrorKind::Io, path.string() + ": short read");

  FieldSeries<float>::Matrix values(n_days, grid.n_cells());
  for (std::size_t i = 0; i < n_values; ++i) {
    const float x = std::bit_cast<float>(get_u32le(buf.data() + 4 * i));
    values.data()[i] =
        (std::isnan(x) || x == f.missing_value) ? std::numeric_limits<float>::quiet_NaN() : x;
  }
  f.series = FieldSeries<float>(std::move(grid), start, units, std::move(values));
  return f;
}

}  // namespace onsetbench
