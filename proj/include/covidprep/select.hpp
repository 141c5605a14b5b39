#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "covidprep/frame.hpp"
#include "covidprep/matrix.hpp"
#include "covidprep/model.hpp"

namespace covidprep::select {

/// Named feature columns plus the target, all finite.
struct FeatureMatrix {
  std::vector<std::string> names;
  Matrix X;
  std::vector<double> y;

  /// Throws LengthMismatch when the shapes disagree.
  void validate() const;
  FeatureMatrix subset(std::span<const std::size_t> cols) const;
  FeatureMatrix subset(const std::vector<std::string>& keep) const;
  std::size_t index_of(std::string_view name) const;
};

/// Rows [begin, end) of the named frame columns. Throws MissingInput for an
/// absent column or a missing cell.
FeatureMatrix make_feature_matrix(const SeriesFrame& frame, const std::vector<std::string>& features,
                                  const std::string& target, std::size_t begin, std::size_t end);

enum class RemovalReason { ConstantOrEmpty, Correlated, HighVIF, ZeroCoefficient };
std::string_view to_string(RemovalReason r) noexcept;

struct Removal {
  std::string feature;
  RemovalReason reason;

  friend bool operator==(const Removal&, const Removal&) = default;
};

/// Pearson correlation; NaN when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

struct FilterResult {
  FeatureMatrix kept;
  std::vector<Removal> removed;
};

/// Drops constant columns, then resolves every pair with |corr| > corr_th in
/// descending |corr| order by dropping the member less correlated with the
/// target (the later column on a tie). Pairs with a dropped member are
/// skipped.
FilterResult correlation_filter_detailed(const FeatureMatrix& fm, double corr_th = 0.8);
FeatureMatrix correlation_filter(const FeatureMatrix& fm, double corr_th = 0.8);

/// Mean increase in RMSE over `repeats` shuffles of each column. Column j
/// draws its permutations from Rng(seed).fork("pfi:" + name).
std::vector<double> permutation_importance(const model::TrainedModel& model, const FeatureMatrix& fm,
                                           std::size_t repeats, std::uint64_t seed);

/// Kraskov-Stoegbauer-Grassberger estimator 1 in nats, clamped at 0. Both
/// variables are standardized and jittered by 1e-10 * N(0,1) drawn from
/// Rng(seed). Throws LengthMismatch, TooFewSamples (n < k + 2).
double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t k = 3,
                          std::uint64_t seed = 0);

/// Mean out-of-fold R^2 of y ~ a + b x over 5 contiguous folds (each fold
/// scored against its own mean), floored at 0. Throws TooFewSamples (n < 10).
double single_feature_impact(std::span<const double> x, std::span<const double> y);

/// 1 / (1 - R_j^2) from regressing column j on the others with an
/// intercept. R_j^2 >= 1 - 1e-12, a constant column, or rows <= cols give
/// +inf.
std::vector<double> vif(const Matrix& X);

/// Sum of the three metrics after min-max normalization across features; a
/// metric that is constant across features contributes 0.5 to each.
std::vector<double> combined_importance(std::span<const double> pfi, std::span<const double> mi,
                                        std::span<const double> sfi);

struct LassoRefinement {
  FeatureMatrix kept;
  std::vector<std::string> dropped;
  double lambda = 0.0;
  std::vector<double> coef;  // standardized scale, one per input feature
};

/// Lasso on standardized features with lambda picked by 5-fold contiguous
/// CV over 20 log-spaced values in [1e-4, 10] * lambda_max (ties go to the
/// larger lambda); drops |coef| < 1e-10.
LassoRefinement lasso_refine(const FeatureMatrix& fm);

struct ImportanceRecord {
  std::string feature;
  double pfi = 0.0;
  double mi = 0.0;
  double sfi = 0.0;
  double vif = 0.0;
  double combined = 0.0;

  friend bool operator==(const ImportanceRecord&, const ImportanceRecord&) = default;
};

struct TraceIteration {
  std::vector<ImportanceRecord> records;
  double max_vif = 0.0;
  /// The high-VIF removal followed by any zero-coefficient drops.
  std::vector<Removal> removals;
  std::optional<double> lasso_lambda;
};

struct SelectionOptions {
  double vif_th = 10.0;
  double corr_th = 0.8;
  std::uint64_t seed = 0;
  std::size_t pfi_repeats = 10;
  std::size_t mi_k = 3;
  /// Which rows the selection saw, recorded in the trace ("full-data",
  /// "train-only").
  std::string scope = "full-data";
};

struct SelectionTrace {
  std::string target;
  std::string scope;
  std::size_t rows = 0;
  double vif_th = 0.0;
  double corr_th = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::string> initial_features;
  std::vector<Removal> filter_removals;
  std::vector<TraceIteration> iterations;
  std::vector<std::string> final_features;

  std::size_t removal_count() const;
};

struct SelectionResult {
  std::vector<std::string> features;
  SelectionTrace trace;
};

/// Correlation filter, then repeat: importances (PFI on an OLS refit), VIF,
/// combined score; stop when max VIF <= vif_th, otherwise drop the
/// least-important high-VIF feature (first in column order on a tie) and
/// run lasso_refine. Throws Degenerate when no feature survives.
SelectionResult iterative_feature_selection(const FeatureMatrix& fm, const std::string& target,
                                            const SelectionOptions& options);

/// Infinite VIF values are written as the string "inf".
std::string to_json(const SelectionTrace& trace);

}  // namespace covidprep::select
