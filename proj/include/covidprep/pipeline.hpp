#pragma once

#include <map>
#include <string>
#include <vector>

#include "covidprep/derive.hpp"
#include "covidprep/eval.hpp"
#include "covidprep/frame.hpp"
#include "covidprep/outlier.hpp"
#include "covidprep/select.hpp"

namespace covidprep::pipeline {

struct PipelineConfig {
  std::string input;
  std::string location = "IND";
  Date start_date = parse_date("2020-01-05");
  Date end_date = parse_date("2024-08-11");
  /// standard, custom or both.
  std::string pipeline = "both";
  std::string target = "new_deaths";
  double corr_th = 0.8;
  double vif_th = 10.0;
  double z_th = 2.0;
  std::size_t window = 30;
  eval::SplitSpec split;
  std::uint64_t seed = 42;
  std::string out = "out";
  std::vector<model::ModelKind> models{std::begin(model::kAllKinds), std::end(model::kAllKinds)};
  std::map<model::ModelKind, std::vector<model::ModelSpec>> grids;
  outlier::Replacement standard_replacement = outlier::Replacement::Interpolation;
  outlier::Replacement custom_replacement = outlier::Replacement::Winsorize;
  /// Keeps per-capita copies of the target (e.g. new_deaths_per_million)
  /// out of the candidate features.
  bool drop_target_rescalings = true;
  /// Dependency graph JSON for the custom pipeline; empty = built-in table.
  std::string graph;
  std::vector<std::string> series_columns{"new_deaths", "new_vaccinations", "positive_rate"};
  std::size_t pfi_repeats = 10;
  std::size_t cv_folds = 5;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Flat JSON object with the PipelineConfig field names; dates as
/// "start_date"/"end_date", split as [train, validation, test], models as
/// kind names and grids as {kind: [{param: value, ..., "hidden": [..]}]}.
/// Fields absent from the document keep their values from `base`.
PipelineConfig config_from_json(std::string_view text, PipelineConfig base = {});

/// An error tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& message)
      : std::runtime_error("stage " + stage + ": " + message), stage_(std::move(stage)), code_(code) {}
  const std::string& stage() const noexcept { return stage_; }
  ErrorCode code() const noexcept { return code_; }

 private:
  std::string stage_;
  ErrorCode code_;
};

SeriesFrame load_frame(const PipelineConfig& config);
derive::DependencyGraph load_graph(const PipelineConfig& config);

/// Interpolate + linear extrapolate + zero fill on every column, then the
/// global z-score detector with the configured replacement.
SeriesFrame preprocess_standard(const SeriesFrame& raw, const PipelineConfig& config,
                                std::vector<outlier::OutlierReport>* reports = nullptr);
/// Group columns; NewColumns: weekly impute, interpolate, zero fill, local
/// outliers; Independent: interpolate, zero fill, local outliers;
/// Remaining: recomputed from the dependency graph. Gaps left after
/// derivation are interpolated and zero-filled.
SeriesFrame preprocess_custom(const SeriesFrame& raw, const PipelineConfig& config,
                              const derive::DependencyGraph& graph,
                              std::vector<outlier::OutlierReport>* reports = nullptr);

/// Every column of the frame except the target and, when configured, its
/// per-capita rescalings.
std::vector<std::string> candidate_features(const SeriesFrame& frame, const PipelineConfig& config,
                                            const derive::DependencyGraph& graph);

struct Evaluated {
  select::SelectionResult selection;
  eval::EvalReport report;
};

/// Selection on all rows, then split and evaluate.
Evaluated select_then_split(const SeriesFrame& processed, const std::vector<std::string>& candidates,
                            const PipelineConfig& config);
/// Split, selection on the training rows only, then evaluate.
Evaluated split_then_select(const SeriesFrame& processed, const std::vector<std::string>& candidates,
                            const PipelineConfig& config);

struct PipelineRun {
  std::string pipeline;
  std::string directory;
  SeriesFrame raw;
  SeriesFrame processed;
  std::vector<outlier::OutlierReport> outliers;
  Evaluated result;
};

/// Runs one pipeline end to end and writes its artifacts under
/// <out>/<pipeline>/. Failures are rethrown as StageError.
PipelineRun run_standard(const PipelineConfig& config);
PipelineRun run_custom(const PipelineConfig& config);

struct Comparison {
  std::string csv;
  std::string markdown;
};

/// Merges two pipelines' report.json and selection_trace.json documents.
/// Ratios are right / left.
Comparison compare_documents(const std::string& left_report, const std::string& left_trace,
                             const std::string& right_report, const std::string& right_trace);
/// Reads <out>/standard and <out>/custom, writes <out>/compare.csv and
/// <out>/compare.md. Throws MissingRun when either run is absent.
Comparison compare(const PipelineConfig& config);

}  // namespace covidprep::pipeline
