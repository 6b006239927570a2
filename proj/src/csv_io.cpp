#include <charconv>
#include <map>
#include <sstream>

#include "onsetbench/io.hpp"

namespace onsetbench {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& s, long row, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::ParseError,
                "row " + std::to_string(row) + ": unparseable " + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

FieldSeries<double> read_csv_series(const std::filesystem::path& path, const RegularGrid& grid,
                                    Units units) {
  std::istringstream in(read_text_file(path));
  std::string line;
  long row = 0;
  std::map<std::pair<CalendarDate, Eigen::Index>, double> entries;
  std::map<std::pair<CalendarDate, Eigen::Index>, long> first_row;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    line = trim(line);
    if (line.empty()) continue;
    auto cols = split(line, ',');
    for (auto& c : cols) c = trim(c);
    if (!header_seen) {
      header_seen = true;
      if (cols.size() == 4 && cols[0] == "date") {
        if (cols[1] != "lat_index" || cols[2] != "lon_index" || cols[3] != "value") {
          throw Error(ErrorKind::ParseError, "expected columns date,lat_index,lon_index,value");
        }
        continue;
      }
    }
    if (cols.size() != 4) {
      throw Error(ErrorKind::ParseError, "row " + std::to_string(row) + ": expected 4 columns");
    }
    CalendarDate d;
    try {
      d = CalendarDate::parse(cols[0]);
    } catch (const Error&) {
      throw Error(ErrorKind::ParseError,
                  "row " + std::to_string(row) + ": unparseable date '" + cols[0] + "'");
    }
    const auto ilat = parse_number<long>(cols[1], row, "lat_index");
    const auto ilon = parse_number<long>(cols[2], row, "lon_index");
    const auto v = parse_number<double>(cols[3], row, "value");
    if (ilat < 0 || ilat >= grid.n_lat() || ilon < 0 || ilon >= grid.n_lon()) {
      throw Error(ErrorKind::OutOfRange, "row " + std::to_string(row) + ": cell index outside grid");
    }
    const std::pair key{d, grid.cell(ilat, ilon)};
    if (auto it = first_row.find(key); it != first_row.end()) {
      throw Error(ErrorKind::DuplicateKey, "row " + std::to_string(row) + ": duplicate of row " +
                                               std::to_string(it->second) + " (" + d.iso() +
                                               ", " + cols[1] + ", " + cols[2] + ")");
    }
    first_row[key] = row;
    entries[key] = v;
  }
  if (entries.empty()) throw Error(ErrorKind::MissingData, path.string() + ": empty series");

  const CalendarDate first = entries.begin()->first.first;
  const CalendarDate last = entries.rbegin()->first.first;
  auto out = FieldSeries<double>::Matrix::Constant(date_diff(last, first) + 1, grid.n_cells(),
                                                   std::numeric_limits<double>::quiet_NaN())
                 .eval();
  for (const auto& [key, v] : entries) out(date_diff(key.first, first), key.second) = v;
  return FieldSeries<double>(grid, first, units, std::move(out));
}

}  // namespace onsetbench
