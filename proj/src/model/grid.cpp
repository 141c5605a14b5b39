#include <cmath>

#include "covidprep/model.hpp"

namespace covidprep::model {

std::vector<std::pair<std::size_t, std::size_t>> chronological_folds(std::size_t n, std::size_t k) {
  if (k < 2) throw Error(ErrorCode::InvalidConfig, "cross-validation needs at least 2 folds");
  if (n < k) throw Error(ErrorCode::TooFewRows, std::to_string(n) + " rows for " + std::to_string(k) + " folds");
  std::vector<std::pair<std::size_t, std::size_t>> folds(k);
  for (std::size_t f = 0; f < k; ++f) folds[f] = {f * n / k, (f + 1) * n / k};
  return folds;
}

GridResult kfold_grid_search(const std::vector<ModelSpec>& grid, const Matrix& X, std::span<const double> y,
                             std::size_t k, std::uint64_t seed) {
  if (grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty hyperparameter grid");
  if (X.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  const auto folds = chronological_folds(X.rows(), k);

  GridResult result;
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ModelSpec spec = normalized(grid[g]);
    spec.seed = seed;
    CvRow row{spec, {}, 0.0};
    for (const auto& [lo, hi] : folds) {
      std::vector<std::size_t> train_idx;
      train_idx.reserve(X.rows() - (hi - lo));
      for (std::size_t i = 0; i < X.rows(); ++i)
        if (i < lo || i >= hi) train_idx.push_back(i);
      std::vector<double> y_train(train_idx.size());
      for (std::size_t i = 0; i < train_idx.size(); ++i) y_train[i] = y[train_idx[i]];

      // A grid point that cannot be fitted on a fold scores +inf there
      // instead of aborting the search.
      double score = kInf;
      try {
        const TrainedModel m = fit(spec, X.select_rows(train_idx), y_train);
        const auto pred = predict(m, X.slice_rows(lo, hi));
        double sse = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sse += (y[i] - pred[i - lo]) * (y[i] - pred[i - lo]);
        score = std::sqrt(sse / static_cast<double>(hi - lo));
        if (!std::isfinite(score)) score = kInf;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularSystem && e.code() != ErrorCode::TooFewRows) throw;
      }
      row.fold_rmse.push_back(score);
      row.mean_rmse += score / static_cast<double>(folds.size());
    }
    result.table.push_back(std::move(row));
    if (result.table[g].mean_rmse < result.table[best].mean_rmse) best = g;
  }
  if (!std::isfinite(result.table[best].mean_rmse)) {
    throw Error(ErrorCode::Degenerate, "no grid point could be fitted on every fold");
  }
  result.best = result.table[best].spec;
  return result;
}

}  // namespace covidprep::model
