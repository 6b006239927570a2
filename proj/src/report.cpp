#include "onsetbench/report.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "json.hpp"
#include "onsetbench/io.hpp"

#ifndef ONSETBENCH_VERSION
#define ONSETBENCH_VERSION "0.0.0"
#endif

namespace onsetbench {

using json = nlohmann::json;

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

// Rows of a CSV file keyed by header name.
class CsvTable {
 public:
  CsvTable(const std::filesystem::path& path, std::vector<std::string> required) : path_(path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::MalformedFile, path.string() + " is empty");
    const auto header = split_csv(line);
    for (std::size_t i = 0; i < header.size(); ++i) index_[header[i]] = i;
    for (const auto& r : required) {
      if (!index_.count(r)) throw Error(ErrorKind::MalformedFile, path.string() + " lacks column '" + r + "'");
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      rows_.push_back(split_csv(line));
      if (rows_.back().size() != header.size()) {
        throw Error(ErrorKind::MalformedFile,
                    path.string() + " row " + std::to_string(rows_.size() + 1) + " has the wrong column count");
      }
    }
  }
  std::size_t size() const { return rows_.size(); }
  const std::string& get(std::size_t row, const std::string& col) const { return rows_[row][index_.at(col)]; }
  long integer(std::size_t row, const std::string& col) const {
    try {
      return std::stol(get(row, col));
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, path_.string() + " row " + std::to_string(row + 2) + ": bad " + col);
    }
  }
  std::optional<CalendarDate> date(std::size_t row, const std::string& col) const {
    const auto& s = get(row, col);
    if (s.empty()) return std::nullopt;
    return CalendarDate::parse(s);
  }

 private:
  std::filesystem::path path_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<std::string>> rows_;
};

std::string opt_date(const std::optional<CalendarDate>& d) { return d ? d->iso() : ""; }

json number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return std::stod(format_number(*v));
}

std::string csv_number(const std::optional<double>& v) {
  return v && std::isfinite(*v) ? format_number(*v) : "";
}

std::string eval_key(const std::string& model, const std::string& period, const std::string& window) {
  return model + '\x1f' + period + '\x1f' + window;
}

std::string years_string(const std::vector<int>& years) {
  std::string s;
  for (int y : years) s += (s.empty() ? "" : " ") + std::to_string(y);
  return s;
}

}  // namespace

std::vector<FixedClimError> fixed_climatology_errors(const ObservationBundle& obs, const PeriodSpec& period) {
  std::vector<FixedClimError> out;
  for (Eigen::Index c : evaluable_cells(obs)) {
    for (int y : period.years) {
      if (!obs.observed.has_year(y)) continue;
      const auto& o = obs.observed.at(c, y);
      const auto d = obs.climatology.mean_date(c, y);
      if (!o || !d) continue;
      out.push_back({period.name, c, y, std::labs(date_diff(*d, *o))});
    }
  }
  return out;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string ledger_csv(const std::vector<ModelEvaluation>& evals) {
  std::ostringstream os;
  os << "model,period,window,cell,year,init,outcome,abs_error,predicted,observed,onset_in_window,after_onset\n";
  for (const auto& e : evals) {
    for (const auto& r : e.ledger) {
      os << quote(e.model) << ',' << quote(e.period) << ',' << quote(r.window) << ',' << r.cell << ','
         << r.year << ',' << r.init.iso() << ',' << to_string(r.outcome) << ','
         << (r.abs_error ? std::to_string(*r.abs_error) : "") << ',' << opt_date(r.predicted) << ','
         << opt_date(r.observed) << ',' << (r.onset_in_window ? 1 : 0) << ',' << (r.after_onset ? 1 : 0)
         << '\n';
    }
  }
  return os.str();
}

void write_artifacts(const EvaluationArtifacts& a, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["config_hash"] = a.config_hash;
  meta["version"] = ONSETBENCH_VERSION;
  meta["grid"] = {{"lat_edges", std::vector<double>(a.grid.lat_edges().begin(), a.grid.lat_edges().end())},
                  {"lon_edges", std::vector<double>(a.grid.lon_edges().begin(), a.grid.lon_edges().end())}};
  json regions = json::object();
  for (const auto& [name, cells] : a.regions) regions[name] = cells;
  meta["regions"] = regions;
  meta["auc_ties"] = a.auc_ties == TieRule::Half ? "half" : "strict";
  meta["reliability_bins"] = a.reliability_bins;
  json evals = json::array();
  for (const auto& e : a.evaluations) {
    json avail = json::array();
    for (const auto& n : e.availability) {
      avail.push_back({{"year", n.year}, {"missing", n.missing}, {"training", n.training}});
    }
    evals.push_back({{"model", e.model},
                     {"period", e.period},
                     {"window",
                      {{"name", e.window.name},
                       {"first_lead", e.window.first_lead},
                       {"last_lead", e.window.last_lead},
                       {"tolerance", e.window.tolerance}}},
                     {"ensemble_size", e.ensemble_size},
                     {"availability", avail}});
  }
  meta["evaluations"] = evals;
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");

  write_text_file(dir / "ledger.csv", ledger_csv(a.evaluations));

  std::ostringstream pp;
  pp << "model,period,window,source,cell,year,init,members,truth_bin,counts\n";
  for (const auto& e : a.evaluations) {
    for (const auto& r : e.prob) {
      std::string counts;
      for (Eigen::Index k = 0; k < r.forecast.counts.size(); ++k) {
        counts += (k ? " " : "") + std::to_string(r.forecast.counts[k]);
      }
      pp << quote(e.model) << ',' << quote(e.period) << ',' << quote(e.window.name) << ',' << r.source << ','
         << r.cell << ',' << r.year << ',' << r.init.iso() << ',' << r.forecast.members << ','
         << r.forecast.truth_bin << ',' << counts << '\n';
    }
  }
  write_text_file(dir / "probpool.csv", pp.str());

  std::ostringstream sk;
  sk << "model,period,window,cell,init,reason\n";
  for (const auto& e : a.evaluations) {
    for (const auto& s : e.skipped) {
      sk << quote(e.model) << ',' << quote(e.period) << ',' << quote(e.window.name) << ','
         << (s.cell < 0 ? std::string("all") : std::to_string(s.cell)) << ',' << s.init.iso() << ','
         << quote(s.reason) << '\n';
    }
  }
  write_text_file(dir / "skipped.csv", sk.str());

  std::ostringstream fc;
  fc << "period,cell,year,abs_error\n";
  for (const auto& f : a.fixed_climatology) {
    fc << quote(f.period) << ',' << f.cell << ',' << f.year << ',' << f.abs_error << '\n';
  }
  write_text_file(dir / "fixed_clim.csv", fc.str());
}

EvaluationArtifacts read_artifacts(const std::filesystem::path& dir) {
  EvaluationArtifacts a;
  json meta;
  try {
    meta = json::parse(read_text_file(dir / "meta.json"));
    a.config_hash = meta.at("config_hash").get<std::string>();
    auto lat = meta.at("grid").at("lat_edges").get<std::vector<double>>();
    auto lon = meta.at("grid").at("lon_edges").get<std::vector<double>>();
    a.grid = RegularGrid(Eigen::Map<Eigen::VectorXd>(lat.data(), static_cast<Eigen::Index>(lat.size())),
                         Eigen::Map<Eigen::VectorXd>(lon.data(), static_cast<Eigen::Index>(lon.size())));
    for (const auto& [name, cells] : meta.at("regions").items()) {
      a.regions[name] = cells.get<std::vector<Eigen::Index>>();
    }
    a.auc_ties = meta.at("auc_ties").get<std::string>() == "strict" ? TieRule::Strict : TieRule::Half;
    a.reliability_bins = meta.at("reliability_bins").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::MalformedFile, (dir / "meta.json").string() + ": " + e.what());
  }

  std::map<std::string, std::size_t> slot;
  for (const auto& e : meta.at("evaluations")) {
    ModelEvaluation ev;
    ev.model = e.at("model").get<std::string>();
    ev.period = e.at("period").get<std::string>();
    const auto& w = e.at("window");
    ev.window = {w.at("name").get<std::string>(), w.at("first_lead").get<int>(), w.at("last_lead").get<int>(),
                 w.at("tolerance").get<int>()};
    ev.ensemble_size = e.at("ensemble_size").get<int>();
    for (const auto& n : e.at("availability")) {
      ev.availability.push_back({n.at("year").get<int>(), n.at("missing").get<bool>(), n.at("training").get<bool>()});
    }
    slot[eval_key(ev.model, ev.period, ev.window.name)] = a.evaluations.size();
    a.evaluations.push_back(std::move(ev));
  }
  auto find_eval = [&](const CsvTable& t, std::size_t i) -> ModelEvaluation& {
    const auto it = slot.find(eval_key(t.get(i, "model"), t.get(i, "period"), t.get(i, "window")));
    if (it == slot.end()) {
      throw Error(ErrorKind::MalformedFile, "row for " + t.get(i, "model") + "/" + t.get(i, "period") + "/" +
                                                t.get(i, "window") + " has no entry in meta.json");
    }
    return a.evaluations[it->second];
  };

  const CsvTable ledger(dir / "ledger.csv", {"model", "period", "window", "cell", "year", "init", "outcome",
                                             "abs_error", "predicted", "observed", "onset_in_window",
                                             "after_onset"});
  for (std::size_t i = 0; i < ledger.size(); ++i) {
    LedgerRow r;
    r.cell = ledger.integer(i, "cell");
    r.year = static_cast<int>(ledger.integer(i, "year"));
    r.init = *ledger.date(i, "init");
    r.window = ledger.get(i, "window");
    r.outcome = parse_outcome(ledger.get(i, "outcome"));
    if (!ledger.get(i, "abs_error").empty()) r.abs_error = ledger.integer(i, "abs_error");
    r.predicted = ledger.date(i, "predicted");
    r.observed = ledger.date(i, "observed");
    r.onset_in_window = ledger.get(i, "onset_in_window") == "1";
    r.after_onset = ledger.get(i, "after_onset") == "1";
    find_eval(ledger, i).ledger.push_back(std::move(r));
  }

  const CsvTable pool(dir / "probpool.csv", {"model", "period", "window", "source", "cell", "year", "init",
                                             "members", "truth_bin", "counts"});
  for (std::size_t i = 0; i < pool.size(); ++i) {
    ProbRecord r;
    r.source = pool.get(i, "source");
    r.cell = pool.integer(i, "cell");
    r.year = static_cast<int>(pool.integer(i, "year"));
    r.init = *pool.date(i, "init");
    r.forecast.members = static_cast<int>(pool.integer(i, "members"));
    r.forecast.truth_bin = static_cast<int>(pool.integer(i, "truth_bin"));
    std::istringstream cs(pool.get(i, "counts"));
    std::vector<int> counts;
    for (int v; cs >> v;) counts.push_back(v);
    r.forecast.counts = Eigen::Map<Eigen::ArrayXi>(counts.data(), static_cast<Eigen::Index>(counts.size()));
    if (r.forecast.truth_bin < 0 || r.forecast.truth_bin >= r.forecast.counts.size() ||
        r.forecast.counts.sum() != r.forecast.members) {
      throw Error(ErrorKind::MalformedFile, "probpool.csv row " + std::to_string(i + 2) + " is inconsistent");
    }
    find_eval(pool, i).prob.push_back(std::move(r));
  }

  const CsvTable fixed(dir / "fixed_clim.csv", {"period", "cell", "year", "abs_error"});
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    a.fixed_climatology.push_back({fixed.get(i, "period"), fixed.integer(i, "cell"),
                                   static_cast<int>(fixed.integer(i, "year")), fixed.integer(i, "abs_error")});
  }
  return a;
}

std::vector<ScoreRow> compute_scores(const EvaluationArtifacts& a, const std::optional<std::string>& region) {
  if (region && !a.regions.count(*region)) throw Error(ErrorKind::ConfigError, "unknown region '" + *region + "'");
  std::vector<ScoreRow> out;
  for (const auto& e : a.evaluations) {
    for (const auto& [name, cells] : a.regions) {
      if (region && name != *region) continue;
      const RegionSpec spec(name, cells, a.grid);
      const std::set<Eigen::Index> in(cells.begin(), cells.end());
      ScoreRow row;
      row.model = e.model;
      row.period = e.period;
      row.window = e.window.name;
      row.region = name;
      row.ensemble_size = e.ensemble_size;
      for (const auto& n : e.availability) {
        if (n.missing) row.missing_years.push_back(n.year);
        if (n.training) row.training_years.push_back(n.year);
      }
      try {
        row.deterministic = aggregate_scores(e.ledger, &spec);
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::MissingData) throw;
      }
      std::vector<ProbForecast> model, clim;
      for (const auto& r : e.prob) {
        if (!in.count(r.cell)) continue;
        (r.source == "model" ? model : clim).push_back(r.forecast);
      }
      if (!model.empty()) row.probabilistic = score_forecasts(model, clim, a.auc_ties, a.reliability_bins);

      std::vector<double> errs;
      for (const auto& f : a.fixed_climatology) {
        if (f.period == e.period && in.count(f.cell)) errs.push_back(static_cast<double>(f.abs_error));
      }
      if (!errs.empty()) {
        const double n = static_cast<double>(errs.size());
        double mean = 0.0;
        for (double v : errs) mean += v;
        mean /= n;
        row.fixed_clim_mae = mean;
        if (errs.size() >= 2) {
          double ss = 0.0;
          for (double v : errs) ss += (v - mean) * (v - mean);
          row.fixed_clim_mae_se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        }
      }
      out.push_back(std::move(row));
    }
  }
  return out;
}

std::string scores_json(const EvaluationArtifacts& a, const std::vector<ScoreRow>& rows) {
  json doc;
  doc["config_hash"] = a.config_hash;
  doc["version"] = ONSETBENCH_VERSION;
  json arr = json::array();
  for (const auto& r : rows) {
    const auto& d = r.deterministic;
    json j = {{"model", r.model},
              {"period", r.period},
              {"window", r.window},
              {"region", r.region},
              {"ensemble_size", r.ensemble_size},
              {"missing_years", r.missing_years},
              {"training_years", r.training_years},
              {"mae", number(d.mae)},
              {"mae_se", number(d.mae_se)},
              {"far", number(d.far)},
              {"mr", number(d.mr)},
              {"total_miss", number(d.total_miss)},
              {"tp", d.tp},
              {"fp", d.fp},
              {"tn", d.tn},
              {"fn", d.fn},
              {"cell_years", d.cell_years},
              {"fixed_clim_mae", number(r.fixed_clim_mae)},
              {"fixed_clim_mae_se", number(r.fixed_clim_mae_se)}};
    const auto& p = r.probabilistic;
    j["n_prob_forecasts"] = p ? p->n_forecasts : 0;
    j["bs"] = p ? number(p->brier) : json(nullptr);
    j["rps"] = p ? number(p->rps) : json(nullptr);
    j["auc"] = p ? number(p->auc) : json(nullptr);
    j["bss"] = p ? number(p->bss) : json(nullptr);
    j["rpss"] = p ? number(p->rpss) : json(nullptr);
    arr.push_back(std::move(j));
  }
  doc["rows"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string scores_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream os;
  os << "model,period,window,region,ensemble_size,missing_years,training_years,mae,mae_se,far,mr,total_miss,"
        "tp,fp,tn,fn,cell_years,fixed_clim_mae,fixed_clim_mae_se,n_prob_forecasts,bs,rps,auc,bss,rpss\n";
  for (const auto& r : rows) {
    const auto& d = r.deterministic;
    const auto& p = r.probabilistic;
    os << quote(r.model) << ',' << quote(r.period) << ',' << quote(r.window) << ',' << quote(r.region) << ','
       << r.ensemble_size << ',' << years_string(r.missing_years) << ',' << years_string(r.training_years) << ','
       << csv_number(d.mae) << ',' << csv_number(d.mae_se) << ',' << csv_number(d.far) << ','
       << csv_number(d.mr) << ',' << csv_number(d.total_miss) << ',' << d.tp << ',' << d.fp << ',' << d.tn
       << ',' << d.fn << ',' << d.cell_years << ',' << csv_number(r.fixed_clim_mae) << ','
       << csv_number(r.fixed_clim_mae_se) << ',' << (p ? p->n_forecasts : 0) << ','
       << (p ? csv_number(p->brier) : "") << ',' << (p ? csv_number(p->rps) : "") << ','
       << (p ? csv_number(p->auc) : "") << ',' << (p ? csv_number(p->bss) : "") << ','
       << (p ? csv_number(p->rpss) : "") << '\n';
  }
  return os.str();
}

std::string score_table(const std::vector<ScoreRow>& rows) {
  auto fixed = [](const std::optional<double>& v, int digits, double scale = 1.0) -> std::string {
    if (!v || !std::isfinite(*v)) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, *v * scale);
    return buf;
  };
  std::ostringstream os;
  std::string group;
  for (const auto& r : rows) {
    const std::string g = r.period + " / " + r.window + " / " + r.region;
    if (g != group) {
      if (!group.empty()) os << '\n';
      group = g;
      os << "### " << g << "\n\n"
         << "| Model | MAE (days) | FAR (%) | MR (%) | Total miss (%) | BS | RPS | AUC | BSS | RPSS |\n"
         << "|---|---|---|---|---|---|---|---|---|---|\n";
    }
    std::string name = r.model;
    if (!r.missing_years.empty()) name += "*";
    if (!r.training_years.empty()) name += "†";
    const auto& d = r.deterministic;
    std::string mae = fixed(d.mae, 1);
    if (d.mae_se) mae += "±" + fixed(d.mae_se, 1);
    if (r.model == "climatology" && r.fixed_clim_mae) {
      mae += " (" + fixed(r.fixed_clim_mae, 1);
      if (r.fixed_clim_mae_se) mae += "±" + fixed(r.fixed_clim_mae_se, 1);
      mae += ")";
    }
    const auto& p = r.probabilistic;
    os << "| " << name << " | " << mae << " | " << fixed(d.far, 1, 100.0) << " | " << fixed(d.mr, 1, 100.0)
       << " | " << fixed(d.total_miss, 1, 100.0) << " | " << (p ? fixed(p->brier, 3) : "-") << " | "
       << (p ? fixed(p->rps, 3) : "-") << " | " << (p ? fixed(p->auc, 2) : "-") << " | "
       << (p ? fixed(p->bss, 2) : "-") << " | " << (p ? fixed(p->rpss, 2) : "-") << " |\n";
  }
  bool any_missing = false, any_training = false;
  for (const auto& r : rows) {
    any_missing |= !r.missing_years.empty();
    any_training |= !r.training_years.empty();
  }
  if (any_missing || any_training) os << '\n';
  if (any_missing) os << "\\* forecasts missing for some years of the period.\n";
  if (any_training) os << "† some years of the period were seen in training.\n";
  return os.str();
}

std::string score_map_csv(const EvaluationArtifacts& a, const ScoreRow& row) {
  const ModelEvaluation* ev = nullptr;
  for (const auto& e : a.evaluations)
    if (e.model == row.model && e.period == row.period && e.window.name == row.window) ev = &e;
  if (!ev) throw Error(ErrorKind::InvalidArgument, "no evaluation for " + row.model);
  std::map<Eigen::Index, CellScores> cells;
  if (!ev->ledger.empty()) {
    for (const auto& c : aggregate_scores(ev->ledger).cells) cells[c.cell] = c;
  }
  const auto& region = a.regions.at(row.region);
  const std::set<Eigen::Index> in(region.begin(), region.end());
  std::ostringstream os;
  os << "cell,lat_index,lon_index,lat,lon,in_region,mae,far,mr,total_miss\n";
  for (Eigen::Index c = 0; c < a.grid.n_cells(); ++c) {
    os << c << ',' << a.grid.lat_index(c) << ',' << a.grid.lon_index(c) << ','
       << format_number(a.grid.lat_center(a.grid.lat_index(c))) << ','
       << format_number(a.grid.lon_center(a.grid.lon_index(c))) << ',' << (in.count(c) ? 1 : 0);
    if (const auto it = cells.find(c); it != cells.end()) {
      os << ',' << csv_number(it->second.mae) << ',' << csv_number(it->second.far) << ','
         << csv_number(it->second.mr) << ',' << csv_number(it->second.total_miss);
    } else {
      os << ",,,,";
    }
    os << '\n';
  }
  const auto& d = row.deterministic;
  os << "region_mean,,,,," << region.size() << ',' << csv_number(d.mae) << ',' << csv_number(d.far) << ','
     << csv_number(d.mr) << ',' << csv_number(d.total_miss) << '\n';
  return os.str();
}

std::string reliability_csv(const std::vector<ScoreRow>& rows) {
  std::ostringstream os;
  os << "model,period,window,region,bin_lower,bin_upper,mean_probability,observed_frequency,count,standard_error\n";
  for (const auto& r : rows) {
    if (!r.probabilistic) continue;
    for (const auto& pt : r.probabilistic->reliability) {
      os << quote(r.model) << ',' << quote(r.period) << ',' << quote(r.window) << ',' << quote(r.region) << ','
         << format_number(pt.lower) << ',' << format_number(pt.upper) << ',';
      if (pt.count > 0) {
        os << format_number(pt.mean_probability) << ',' << format_number(pt.observed_frequency);
      } else {
        os << ',';
      }
      os << ',' << pt.count << ',' << (pt.count > 0 ? format_number(pt.standard_error) : "") << '\n';
    }
  }
  return os.str();
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw Error(ErrorKind::InvalidArgument, "format must be csv or json, got '" + std::string(s) + "'");
}

std::vector<std::filesystem::path> write_report(const EvaluationArtifacts& a, const std::filesystem::path& dir,
                                                ReportFormat format, const std::optional<std::string>& region) {
  std::filesystem::create_directories(dir);
  const auto rows = compute_scores(a, region);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& p, const std::string& text) {
    write_text_file(p, text);
    written.push_back(p);
  };
  if (format == ReportFormat::Json) {
    put(dir / "scores.json", scores_json(a, rows));
  } else {
    put(dir / "scores.csv", scores_csv(rows));
  }
  put(dir / "table.md", score_table(rows));
  put(dir / "reliability.csv", reliability_csv(rows));
  for (const auto& r : rows) {
    put(dir / ("map_" + r.model + "_" + r.period + "_" + r.window + "_" + r.region + ".csv"), score_map_csv(a, r));
  }
  return written;
}

}  // namespace onsetbench
