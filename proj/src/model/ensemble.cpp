#include <algorithm>
#include <cmath>
#include <numeric>

#include "internal.hpp"

namespace covidprep::model::detail {

ForestParams train_forest(const ModelSpec& spec, const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  TreeOptions options;
  options.max_depth = param_size(spec, "max_depth");
  options.min_samples_leaf = param_size(spec, "min_samples_leaf");
  options.max_features = (X.cols() + 2) / 3;
  Rng rng = Rng(spec.seed).fork("forest");
  ForestParams out;
  const std::size_t n_trees = param_size(spec, "n_trees");
  out.trees.reserve(n_trees);
  std::vector<std::size_t> sample(n);
  for (std::size_t b = 0; b < n_trees; ++b) {
    for (auto& s : sample) s = rng.below(n);
    std::sort(sample.begin(), sample.end());
    out.trees.push_back(build_tree(X, y, sample, options, &rng));
  }
  return out;
}

BoostParams train_boosting(const ModelSpec& spec, const Matrix& X, std::span<const double> y) {
  const std::size_t n = X.rows();
  TreeOptions options;
  options.max_depth = param_size(spec, "max_depth");
  BoostParams out;
  out.learning_rate = spec.params.at("learning_rate");
  out.init = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  const double subsample = spec.params.at("subsample");
  const std::size_t n_sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(subsample * static_cast<double>(n))));
  Rng rng = Rng(spec.seed).fork("boosting");

  std::vector<double> fitted(n, out.init);
  std::vector<double> residual(n);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<std::size_t> sample;
  const std::size_t stages = param_size(spec, "n_stages");
  out.trees.reserve(stages);
  for (std::size_t m = 0; m < stages; ++m) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - fitted[i];
    if (n_sub < n) {
      std::vector<std::size_t> perm = all;
      rng.shuffle(std::span<std::size_t>(perm));
      sample.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_sub));
      std::sort(sample.begin(), sample.end());
    } else {
      sample = all;
    }
    Tree tree = build_tree(X, residual, sample, options);
    for (std::size_t i = 0; i < n; ++i) fitted[i] += out.learning_rate * tree.predict(X.row(i));
    out.trees.push_back(std::move(tree));
  }
  return out;
}

}  // namespace covidprep::model::detail
