#include "onsetbench/config.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "onsetbench/io.hpp"

namespace onsetbench {

using nlohmann::json;

std::vector<PeriodSpec> standard_periods() {
  auto span = [](int a, int b) { return YearRange{a, b}.years(); };
  std::vector<int> extended = span(1965, 1978);
  for (int y : span(2019, 2024)) extended.push_back(y);
  return {
      {"recent", span(2019, 2024)},
      {"extended", extended},
      {"all", span(1965, 2024)},
      {"common", span(2004, 2021)},
  };
}

const ModelEntry& DatasetRegistry::model(const std::string& name) const {
  for (const auto& m : models)
    if (m.name == name) return m;
  throw Error(ErrorKind::ConfigError, "unknown model '" + name + "'");
}

const PeriodSpec& EvaluationConfig::period(const std::string& name) const {
  for (const auto& p : periods)
    if (p.name == name) return p;
  throw Error(ErrorKind::ConfigError, "unknown period '" + name + "'");
}

const RegionDefinition& EvaluationConfig::region(const std::string& name) const {
  for (const auto& r : regions)
    if (r.name == name) return r;
  throw Error(ErrorKind::ConfigError, "unknown region '" + name + "'");
}

const ForecastWindow& EvaluationConfig::window(const std::string& name) const {
  for (const auto& w : windows)
    if (w.name == name) return w;
  throw Error(ErrorKind::ConfigError, "unknown window '" + name + "'");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string expand_forecast_path(const std::string& pattern, const std::string& model,
                                 const CalendarDate& init, int member) {
  std::string out = pattern;
  auto replace_all = [&out](const std::string& key, const std::string& value) {
    for (std::size_t pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
    }
  };
  replace_all("{model}", model);
  replace_all("{init}", init.iso());
  replace_all("{member}", std::to_string(member));
  return out;
}

namespace {

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw Error(ErrorKind::ConfigError, "unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<int> parse_years(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorKind::ConfigError, where + " must be a non-empty list of years or [first, last] pairs");
  }
  std::set<int> out;
  for (const auto& item : j) {
    if (item.is_number_integer()) {
      out.insert(item.get<int>());
    } else if (item.is_array() && item.size() == 2) {
      const YearRange r{item[0].get<int>(), item[1].get<int>()};
      if (r.empty()) throw Error(ErrorKind::ConfigError, where + " has an inverted year range");
      for (int y : r.years()) out.insert(y);
    } else {
      throw Error(ErrorKind::ConfigError, where + " entries must be years or [first, last] pairs");
    }
  }
  for (int y : out) {
    if (y < kMinYear || y > kMaxYear) {
      throw Error(ErrorKind::ConfigError, where + " year " + std::to_string(y) + " out of range");
    }
  }
  return {out.begin(), out.end()};
}

YearRange contiguous(const std::vector<int>& years, const std::string& where) {
  const YearRange r{years.front(), years.back()};
  if (static_cast<int>(years.size()) != r.size()) {
    throw Error(ErrorKind::ConfigError, where + " must be a contiguous year range");
  }
  return r;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

RegularGrid parse_grid(const json& j) {
  check_keys(j, "grid", {"lat", "lon", "lat_edges", "lon_edges"});
  auto axis = [&](const char* step_key, const char* edge_key) -> Eigen::VectorXd {
    if (j.contains(edge_key)) {
      const auto v = j.at(edge_key).get<std::vector<double>>();
      return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    const auto v = j.at(step_key).get<std::vector<double>>();
    if (v.size() != 3) {
      throw Error(ErrorKind::ConfigError, std::string("grid.") + step_key + " must be [start, end, step]");
    }
    const auto n = static_cast<Eigen::Index>(std::llround((v[1] - v[0]) / v[2]));
    if (n < 1) throw Error(ErrorKind::ConfigError, "grid axis has no cells");
    Eigen::VectorXd e(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) e[i] = v[0] + v[2] * static_cast<double>(i);
    return e;
  };
  return RegularGrid(axis("lat", "lat_edges"), axis("lon", "lon_edges"));
}

unsigned parse_weekday(const std::string& s) {
  static const char* names[] = {"sun", "mon", "tue", "wed", "thu", "fri", "sat"};
  for (unsigned i = 0; i < 7; ++i)
    if (s == names[i]) return i;
  throw Error(ErrorKind::ConfigError, "unknown weekday '" + s + "'");
}

ForecastWindow parse_window(const json& j) {
  if (j.is_string()) return ForecastWindow::by_name(j.get<std::string>());
  check_keys(j, "window", {"name", "first_lead", "last_lead", "tolerance"});
  ForecastWindow w{j.at("name").get<std::string>(), j.at("first_lead").get<int>(),
                   j.at("last_lead").get<int>(), j.at("tolerance").get<int>()};
  if (w.first_lead < 1 || w.last_lead < w.first_lead || w.tolerance < 0) {
    throw Error(ErrorKind::ConfigError, "window '" + w.name + "' is malformed");
  }
  return w;
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  LoadedConfig cfg;
  cfg.base_dir = base_dir;
  cfg.hash = fnv1a_hex(text);
  EvaluationConfig& ev = cfg.evaluation;
  DatasetRegistry& reg = cfg.registry;

  try {
    check_keys(j, "config",
               {"schema_version", "grid", "observations", "models", "periods", "regions",
                "windows", "climatology_years", "thresholds", "schedule", "mok_median",
                "bin_width", "reliability_bins", "auc_ties", "count_post_onset_inits",
                "climatology_leave_one_out", "wind"});
    if (get_or<int>(j, "schema_version", 1) != 1) {
      throw Error(ErrorKind::UnsupportedVersion, "unsupported config schema_version");
    }

    ev.grid = j.contains("grid") ? parse_grid(j.at("grid"))
                                 : RegularGrid::uniform(6.0, 38.0, 4.0, 66.0, 98.0, 4.0);

    const json& o = j.at("observations");
    check_keys(o, "observations",
               {"path", "variable", "units", "years", "resolution_deg", "mask_required", "land_mask"});
    reg.observations.path = resolve(base_dir, o.at("path").get<std::string>());
    reg.observations.variable = get_or<std::string>(o, "variable", "rain");
    reg.observations.units = parse_units(get_or<std::string>(o, "units", "mm/day"));
    reg.observations.years = contiguous(parse_years(o.at("years"), "observations.years"),
                                        "observations.years");
    reg.observations.resolution_deg = get_or<double>(o, "resolution_deg", 1.0);
    reg.observations.mask_required = get_or<bool>(o, "mask_required", false);
    if (o.contains("land_mask"))
      reg.observations.land_mask = resolve(base_dir, o.at("land_mask").get<std::string>());
    const YearRange obs_years = reg.observations.years;

    if (j.contains("models")) {
      for (const auto& m : j.at("models")) {
        check_keys(m, "models[]",
                   {"name", "ensemble_size", "years", "training_years", "resolution_deg",
                    "mask_required", "land_mask", "forecast_path", "init_dates"});
        ModelEntry e;
        e.name = m.at("name").get<std::string>();
        if (e.name == "climatology") {
          throw Error(ErrorKind::ConfigError, "model name 'climatology' is reserved");
        }
        e.ensemble_size = m.at("ensemble_size").get<int>();
        if (e.ensemble_size < 1) {
          throw Error(ErrorKind::ConfigError, "model '" + e.name + "' ensemble_size must be >= 1");
        }
        e.years = parse_years(m.at("years"), "models." + e.name + ".years");
        if (m.contains("training_years"))
          e.training_years = parse_years(m.at("training_years"), "models." + e.name + ".training_years");
        e.resolution_deg = get_or<double>(m, "resolution_deg", 1.0);
        e.mask_required = get_or<bool>(m, "mask_required", e.resolution_deg <= 0.5);
        if (m.contains("land_mask")) e.land_mask = resolve(base_dir, m.at("land_mask").get<std::string>());
        e.forecast_path = resolve(base_dir, m.at("forecast_path").get<std::string>()).string();
        if (m.contains("init_dates")) {
          for (const auto& d : m.at("init_dates"))
            e.init_dates.push_back(CalendarDate::parse(d.get<std::string>()));
          std::sort(e.init_dates.begin(), e.init_dates.end());
        }
        for (const auto& other : reg.models)
          if (other.name == e.name)
            throw Error(ErrorKind::ConfigError, "duplicate model '" + e.name + "'");
        reg.models.push_back(std::move(e));
      }
    }

    if (j.contains("periods")) {
      const auto standard = standard_periods();
      for (const auto& p : j.at("periods")) {
        if (p.is_string()) {
          const auto name = p.get<std::string>();
          const auto it = std::find_if(standard.begin(), standard.end(),
                                       [&](const PeriodSpec& s) { return s.name == name; });
          if (it == standard.end()) throw Error(ErrorKind::ConfigError, "unknown standard period '" + name + "'");
          ev.periods.push_back(*it);
        } else {
          check_keys(p, "periods[]", {"name", "years"});
          const auto name = p.at("name").get<std::string>();
          ev.periods.push_back({name, parse_years(p.at("years"), "periods." + name + ".years")});
        }
      }
      for (const auto& p : ev.periods) {
        std::vector<int> outside;
        for (int y : p.years)
          if (!obs_years.contains(y)) outside.push_back(y);
        if (!outside.empty()) {
          std::string list;
          for (int y : outside) list += (list.empty() ? "" : ", ") + std::to_string(y);
          throw Error(ErrorKind::ConfigError, "period '" + p.name +
                                                  "' has years outside observation availability: " + list);
        }
      }
    } else {
      for (auto& p : standard_periods()) {
        if (std::all_of(p.years.begin(), p.years.end(), [&](int y) { return obs_years.contains(y); }))
          ev.periods.push_back(std::move(p));
      }
    }

    if (j.contains("regions")) {
      for (const auto& [name, r] : j.at("regions").items()) {
        check_keys(r, "regions." + name, {"box", "min_land", "cells"});
        RegionDefinition def;
        def.name = name;
        def.min_land = get_or<double>(r, "min_land", 0.5);
        if (r.contains("box")) {
          const auto b = r.at("box").get<std::vector<double>>();
          if (b.size() != 4) throw Error(ErrorKind::ConfigError, "regions." + name + ".box needs 4 numbers");
          def.box = LatLonBox{b[0], b[1], normalize_longitude(b[2]), normalize_longitude(b[3])};
        }
        if (r.contains("cells")) def.cells = r.at("cells").get<std::vector<Eigen::Index>>();
        if (!def.box && def.cells.empty()) {
          throw Error(ErrorKind::ConfigError, "region '" + name + "' needs a box or cells");
        }
        ev.regions.push_back(std::move(def));
      }
    }
    if (std::none_of(ev.regions.begin(), ev.regions.end(),
                     [](const RegionDefinition& r) { return r.name == "cmz"; })) {
      ev.regions.push_back({"cmz", kCoreMonsoonBox, 0.5, {}});
    }

    if (j.contains("windows")) {
      for (const auto& w : j.at("windows")) ev.windows.push_back(parse_window(w));
    } else {
      ev.windows = {ForecastWindow::medium(), ForecastWindow::subseasonal()};
    }

    ev.climatology_years = j.contains("climatology_years")
                               ? contiguous(parse_years(j.at("climatology_years"), "climatology_years"),
                                            "climatology_years")
                               : obs_years;
    ev.threshold_years = ev.climatology_years;
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      check_keys(t, "thresholds", {"years", "file"});
      if (t.contains("years"))
        ev.threshold_years = contiguous(parse_years(t.at("years"), "thresholds.years"), "thresholds.years");
      if (t.contains("file")) ev.threshold_file = resolve(base_dir, t.at("file").get<std::string>());
    }
    for (const YearRange* r : {&ev.climatology_years, &ev.threshold_years}) {
      if (!obs_years.contains(r->first) || !obs_years.contains(r->last)) {
        throw Error(ErrorKind::ConfigError,
                    "climatology/threshold years " + std::to_string(r->first) + "-" +
                        std::to_string(r->last) + " outside observation availability");
      }
    }

    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      check_keys(s, "schedule", {"start", "end", "weekdays"});
      if (s.contains("start")) ev.schedule.start = MonthDay::parse(s.at("start").get<std::string>());
      if (s.contains("end")) ev.schedule.end = MonthDay::parse(s.at("end").get<std::string>());
      if (s.contains("weekdays")) {
        ev.schedule.weekdays.clear();
        for (const auto& d : s.at("weekdays")) ev.schedule.weekdays.push_back(parse_weekday(d.get<std::string>()));
      }
    }
    if (j.contains("mok_median")) ev.mok_median = MonthDay::parse(j.at("mok_median").get<std::string>());
    ev.bin_width = get_or<int>(j, "bin_width", 5);
    ev.reliability_bins = get_or<int>(j, "reliability_bins", 10);
    if (ev.reliability_bins < 1) throw Error(ErrorKind::ConfigError, "reliability_bins must be >= 1");
    const auto ties = get_or<std::string>(j, "auc_ties", "half");
    if (ties == "half") ev.auc_ties = TieRule::Half;
    else if (ties == "strict") ev.auc_ties = TieRule::Strict;
    else throw Error(ErrorKind::ConfigError, "auc_ties must be 'half' or 'strict'");
    ev.count_post_onset_inits = get_or<bool>(j, "count_post_onset_inits", false);
    ev.climatology_leave_one_out = get_or<bool>(j, "climatology_leave_one_out", false);
    for (const auto& w : ev.windows) (void)BinScheme(w.last_lead, ev.bin_width);

    if (j.contains("wind")) {
      const json& w = j.at("wind");
      check_keys(w, "wind", {"u200", "u850", "reference_years"});
      WindFields wf{resolve(base_dir, w.at("u200").get<std::string>()),
                    resolve(base_dir, w.at("u850").get<std::string>()),
                    w.contains("reference_years") ? parse_years(w.at("reference_years"), "wind.reference_years")
                                                  : ev.climatology_years.years()};
      ev.wind = std::move(wf);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError || e.kind() == ErrorKind::UnsupportedVersion) throw;
    throw Error(ErrorKind::ConfigError, std::string("config: ") + e.what());
  }
  return cfg;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path), path.parent_path());
}

}  // namespace onsetbench
