#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "covidprep/common.hpp"
#include "covidprep/matrix.hpp"

namespace covidprep::model {

// ---------------------------------------------------------------------------
// Standardization

struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> std;  // 1 substituted where the raw std < 1e-12

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

inline constexpr double kMinScale = 1e-12;

/// Per-column mean and population std. Throws EmptyMatrix.
ScalerParams standardize_fit(const Matrix& X);
Matrix standardize_apply(const Matrix& X, const ScalerParams& params);

// ---------------------------------------------------------------------------
// Specs

enum class ModelKind { OLS, Ridge, Lasso, ElasticNet, KNN, DecisionTree, RandomForest, GradientBoosting, MLP };

inline constexpr ModelKind kAllKinds[] = {ModelKind::OLS,          ModelKind::Ridge,        ModelKind::Lasso,
                                          ModelKind::ElasticNet,   ModelKind::KNN,          ModelKind::DecisionTree,
                                          ModelKind::RandomForest, ModelKind::GradientBoosting, ModelKind::MLP};

/// Short identifier used in specs and JSON ("OLS", "Ridge", ...).
std::string_view to_string(ModelKind k) noexcept;
ModelKind model_kind_from_string(std::string_view s);
/// Report name ("LinearRegression", "DecisionTreeRegressor", ...).
std::string_view display_name(ModelKind k) noexcept;
bool is_nonlinear(ModelKind k) noexcept;

/// Hyperparameters by kind (0 means "unlimited" for depths):
///   Ridge, Lasso: lambda
///   ElasticNet: lambda, mix (1 = lasso, 0 = ridge)
///   KNN: k
///   DecisionTree: max_depth, min_samples_leaf
///   RandomForest: n_trees, max_depth, min_samples_leaf
///   GradientBoosting: n_stages, learning_rate, max_depth, subsample
///   MLP: learning_rate, batch_size, max_epochs, momentum, patience, tol,
///        validation_fraction; layer widths in `hidden`
/// Penalized linear objectives are (1/2n)|y - Xb|^2 + lambda*mix*|b|_1 +
/// lambda*(1-mix)/2*|b|^2 with an unpenalized intercept; Ridge is mix = 0.
struct ModelSpec {
  ModelKind kind = ModelKind::OLS;
  std::map<std::string, double> params;
  std::vector<int> hidden;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Fills defaults and rejects unknown names or out-of-range values
/// (InvalidConfig).
ModelSpec normalized(ModelSpec spec);
std::string describe(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Learned parameters

struct LinearParams {
  std::vector<double> coef;
  double intercept = 0.0;
  bool converged = true;
  std::size_t sweeps = 0;

  friend bool operator==(const LinearParams&, const LinearParams&) = default;
};

struct KnnParams {
  std::size_t k = 1;
  Matrix X;
  std::vector<double> y;

  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;  // x <= threshold goes left
  int left = -1;
  int right = -1;
  double value = 0.0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const;
  friend bool operator==(const Tree&, const Tree&) = default;
};

struct ForestParams {
  std::vector<Tree> trees;
  friend bool operator==(const ForestParams&, const ForestParams&) = default;
};

struct BoostParams {
  double init = 0.0;
  double learning_rate = 0.1;
  std::vector<Tree> trees;
  friend bool operator==(const BoostParams&, const BoostParams&) = default;
};

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// ReLU on every layer but the last, which is linear with one output.
struct MlpNetwork {
  std::vector<DenseLayer> layers;
  friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;
};

struct MlpParams {
  MlpNetwork net;
  double y_mean = 0.0;
  double y_scale = 1.0;
  std::size_t epochs = 0;
  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

using LearnedParams = std::variant<LinearParams, KnnParams, Tree, ForestParams, BoostParams, MlpParams>;

struct TrainedModel {
  ModelSpec spec;
  LearnedParams params;
  std::size_t n_rows = 0;
  std::size_t n_features = 0;
  std::vector<std::string> feature_names;
  /// False when coordinate descent hit its sweep cap.
  bool converged = true;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

// ---------------------------------------------------------------------------
// Training and prediction

/// Fits `spec` on (X, y). `feature_names` may be empty; otherwise it must
/// match X's column count.
TrainedModel fit(const ModelSpec& spec, const Matrix& X, std::span<const double> y,
                 std::vector<std::string> feature_names = {});
/// Throws LengthMismatch when X's width differs from the training width.
std::vector<double> predict(const TrainedModel& model, const Matrix& X);
/// Additionally requires `feature_names` to equal the training names.
std::vector<double> predict(const TrainedModel& model, const Matrix& X, const std::vector<std::string>& feature_names);

/// Versioned JSON document; round trip reproduces identical predictions.
std::string to_json(const TrainedModel& model);
TrainedModel model_from_json(std::string_view text);

// Solvers exposed for selection and for oracle tests.

/// Least squares with intercept via the normal equations on internally
/// rescaled columns; retries with a 1e-10 diagonal jitter when singular.
LinearParams fit_ols(const Matrix& X, std::span<const double> y);
/// (X'X/n + lambda I) b = X'y/n on centered data.
LinearParams fit_ridge(const Matrix& X, std::span<const double> y, double lambda);
/// Cyclic coordinate descent on the Gram matrix. Stops when the largest
/// coefficient change in a sweep is below `tol` or after `max_sweeps`.
LinearParams fit_elastic_net(const Matrix& X, std::span<const double> y, double lambda, double mix, double tol = 1e-6,
                             std::size_t max_sweeps = 10000, const std::vector<double>* warm_start = nullptr);
/// One solution per lambda, each warm-started from the previous one; the
/// Gram matrix is formed once.
std::vector<LinearParams> elastic_net_path(const Matrix& X, std::span<const double> y,
                                           std::span<const double> lambdas, double mix, double tol = 1e-6,
                                           std::size_t max_sweeps = 10000);
/// Smallest lambda (for mix = 1) at which every coefficient is zero.
double lasso_lambda_max(const Matrix& X, std::span<const double> y);
double elastic_net_objective(const Matrix& X, std::span<const double> y, const LinearParams& p, double lambda,
                             double mix);

struct TreeOptions {
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // per-split feature subsample, 0 = all
};

/// CART regression tree on the (multi)set of rows `sample`. Splits maximize
/// the reduction in squared error over midpoints between sorted distinct
/// values; ties keep the first feature, then the lowest threshold.
Tree build_tree(const Matrix& X, std::span<const double> y, std::span<const std::size_t> sample,
                const TreeOptions& options, Rng* rng = nullptr);

/// 0.5 * mean squared error of the network on (X, y) and, when `grad` is
/// given, its gradient with the same layout as `net`.
double mlp_loss_and_gradient(const MlpNetwork& net, const Matrix& X, std::span<const double> y, MlpNetwork* grad);
MlpNetwork mlp_init(std::size_t inputs, const std::vector<int>& hidden, Rng& rng);
double mlp_forward(const MlpNetwork& net, std::span<const double> x);

// ---------------------------------------------------------------------------
// Cross-validation

/// Contiguous chronological folds: fold f is [floor(f*n/k), floor((f+1)*n/k)).
std::vector<std::pair<std::size_t, std::size_t>> chronological_folds(std::size_t n, std::size_t k);

struct CvRow {
  ModelSpec spec;
  std::vector<double> fold_rmse;
  double mean_rmse = 0.0;
};

struct GridResult {
  ModelSpec best;
  std::vector<CvRow> table;
};

/// Mean out-of-fold RMSE per grid point; argmin wins, ties to the earlier
/// point. Every grid point is fitted with `seed`. Throws TooFewRows.
GridResult kfold_grid_search(const std::vector<ModelSpec>& grid, const Matrix& X, std::span<const double> y,
                             std::size_t k, std::uint64_t seed);

/// The default tuning grid for a kind.
std::vector<ModelSpec> default_grid(ModelKind kind);

}  // namespace covidprep::model
