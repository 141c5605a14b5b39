#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covidprep/frame.hpp"
#include "covidprep/model.hpp"
#include "covidprep/select.hpp"

namespace covidprep::eval {

/// Throws LengthMismatch, Empty.
double rmse(std::span<const double> y, std::span<const double> y_hat);
/// 1 - SSE/SST about mean(y). Throws LengthMismatch, ZeroVariance (which
/// includes fewer than two values).
double r2(std::span<const double> y, std::span<const double> y_hat);
/// Population variance of the three values.
double rmse_variance(double rmse_train, double rmse_val, double rmse_test);

struct SplitSpec {
  double train = 0.7;
  double validation = 0.15;
  double test = 0.15;

  /// Throws InvalidConfig unless all fractions are positive and sum to 1.
  void validate() const;
};

struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Range&, const Range&) = default;
};

struct SplitRanges {
  Range train;
  Range validation;
  Range test;
};

/// Boundaries at floor(n * train) and floor(n * (train + validation)).
/// Throws TooFewRows when any split would be empty.
SplitRanges split_chronological(std::size_t n, const SplitSpec& spec);

struct EvalConfig {
  SplitSpec split;
  std::uint64_t seed = 0;
  std::size_t cv_folds = 5;
  std::vector<model::ModelKind> kinds{std::begin(model::kAllKinds), std::end(model::kAllKinds)};
  /// Replaces the default grid for a kind.
  std::map<model::ModelKind, std::vector<model::ModelSpec>> grids;
};

struct SplitScores {
  double rmse = 0.0;
  /// Absent when the split's target has zero variance.
  std::optional<double> r2;
};

struct ModelResult {
  model::ModelKind kind = model::ModelKind::OLS;
  model::ModelSpec best;
  std::vector<model::CvRow> cv;
  SplitScores train;
  SplitScores validation;
  SplitScores test;
  double rmse_variance = 0.0;
  bool converged = true;
  std::shared_ptr<const model::TrainedModel> model;
};

struct EvalReport {
  std::string pipeline;
  std::string target;
  std::vector<std::string> features;
  SplitRanges split;
  model::ScalerParams scaler;
  std::string input_digest;
  /// Ascending test RMSE.
  std::vector<ModelResult> results;
};

/// The train-only part of evaluation: standardizes with training
/// statistics, tunes each kind by chronological k-fold search on the
/// training rows, refits the winner on all training rows and scores every
/// split.
EvalReport evaluate_splits(const select::FeatureMatrix& train, const select::FeatureMatrix& validation,
                           const select::FeatureMatrix& test, const EvalConfig& config);

/// Splits `frame` chronologically and runs evaluate_splits on `features`.
/// The frame must be missing-free over those columns.
EvalReport evaluate_pipeline(const SeriesFrame& frame, const std::vector<std::string>& features,
                             const std::string& target, const EvalConfig& config, const std::string& pipeline);

/// Header "Pipeline,Model,Test RMSE,Test R²,RMSE Variance", values to three
/// decimals, and a trailing SVR row marked "not implemented".
std::string report_csv(const EvalReport& report, bool header = true);
std::string report_json(const EvalReport& report);

/// date,original,processed with empty cells for missing values.
std::string series_csv(const std::vector<Date>& dates, const Series& original, const Series& processed);

}  // namespace covidprep::eval
