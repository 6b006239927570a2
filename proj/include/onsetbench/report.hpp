#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "onsetbench/pipeline.hpp"

namespace onsetbench {

/// |rounded climatological date - observed onset| for one cell-year.
struct FixedClimError {
  std::string period;
  Eigen::Index cell = 0;
  int year = 0;
  long abs_error = 0;
};

/// Cell-years of `period` with an observed onset and a defined climatology.
std::vector<FixedClimError> fixed_climatology_errors(const ObservationBundle& obs,
                                                     const PeriodSpec& period);

/// Everything an evaluation persists. Scores are recomputed from this alone.
struct EvaluationArtifacts {
  std::string config_hash;
  RegularGrid grid;
  std::map<std::string, std::vector<Eigen::Index>> regions;
  TieRule auc_ties = TieRule::Half;
  int reliability_bins = 10;
  std::vector<ModelEvaluation> evaluations;
  std::vector<FixedClimError> fixed_climatology;
};

/// Writes meta.json, ledger.csv, probpool.csv, skipped.csv and fixed_clim.csv.
void write_artifacts(const EvaluationArtifacts& a, const std::filesystem::path& dir);
EvaluationArtifacts read_artifacts(const std::filesystem::path& dir);

std::string ledger_csv(const std::vector<ModelEvaluation>& evals);

struct ScoreRow {
  std::string model;
  std::string period;
  std::string window;
  std::string region;
  int ensemble_size = 1;
  std::vector<int> missing_years;
  std::vector<int> training_years;
  DeterministicScores deterministic;
  std::optional<ProbScores> probabilistic;
  /// Fixed-date climatology MAE over the region's cell-years, with its SE.
  std::optional<double> fixed_clim_mae;
  std::optional<double> fixed_clim_mae_se;
};

/// One row per (evaluation, region); `region` restricts to a single region.
std::vector<ScoreRow> compute_scores(const EvaluationArtifacts& a,
                                     const std::optional<std::string>& region = std::nullopt);

/// Value rounded to 6 significant digits (the precision of every report).
std::string format_number(double v);

std::string scores_json(const EvaluationArtifacts& a, const std::vector<ScoreRow>& rows);
std::string scores_csv(const std::vector<ScoreRow>& rows);
/// Markdown table, one row per model: MAE +- SE, FAR, MR and total miss in
/// percent, then BS, RPS, AUC, BSS, RPSS. `*` marks missing years and `†`
/// years seen in training.
std::string score_table(const std::vector<ScoreRow>& rows);
/// Per-cell values and a closing region-mean row.
std::string score_map_csv(const EvaluationArtifacts& a, const ScoreRow& row);
std::string reliability_csv(const std::vector<ScoreRow>& rows);

enum class ReportFormat { Csv, Json };
ReportFormat parse_report_format(std::string_view s);

/// Scores, table, maps and reliability curves into `dir`; returns the paths written.
std::vector<std::filesystem::path> write_report(const EvaluationArtifacts& a, const std::filesystem::path& dir,
                                                ReportFormat format,
                                                const std::optional<std::string>& region = std::nullopt);

}  // namespace onsetbench
