#include <algorithm>
#include <numeric>

#include "covidprep/model.hpp"

namespace covidprep::model {

double Tree::predict(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes[i].feature >= 0) {
    const TreeNode& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

namespace {

// Every node owns the segment [lo, hi) of each per-feature order array;
// the segments hold the same sample positions, sorted by that feature.
class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const double> y, std::span<const std::size_t> sample,
              const TreeOptions& options, Rng* rng)
      : X_(X), options_(options), rng_(rng), rows_(sample.begin(), sample.end()) {
    const std::size_t n = rows_.size();
    const std::size_t p = X.cols();
    yv_.resize(n);
    for (std::size_t i = 0; i < n; ++i) yv_[i] = y[rows_[i]];
    order_.assign(p, std::vector<std::size_t>(n));
    for (std::size_t f = 0; f < p; ++f) {
      auto& ord = order_[f];
      std::iota(ord.begin(), ord.end(), std::size_t{0});
      std::stable_sort(ord.begin(), ord.end(),
                       [&](std::size_t a, std::size_t b) { return X(rows_[a], f) < X(rows_[b], f); });
    }
    goes_left_.assign(n, 0);
    scratch_.resize(n);
    features_.resize(p);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }

  Tree build() {
    Tree t;
    if (!rows_.empty()) grow(t, 0, rows_.size(), 0);
    return t;
  }

 private:
  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
  };

  double x_at(std::size_t f, std::size_t pos) const { return X_(rows_[pos], f); }

  int grow(Tree& t, std::size_t lo, std::size_t hi, std::size_t depth) {
    const std::size_t n = hi - lo;
    const auto& any = order_.empty() ? scratch_ : order_[0];
    double sum = 0.0;
    double sumsq = 0.0;
    double ymin = 0.0;
    double ymax = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double v = order_.empty() ? yv_[k] : yv_[any[k]];
      sum += v;
      sumsq += v * v;
      if (k == lo || v < ymin) ymin = v;
      if (k == lo || v > ymax) ymax = v;
    }
    const int index = static_cast<int>(t.nodes.size());
    t.nodes.push_back(TreeNode{-1, 0.0, -1, -1, sum / static_cast<double>(n)});

    const bool depth_done = options_.max_depth > 0 && depth >= options_.max_depth;
    if (order_.empty() || depth_done || n < 2 * options_.min_samples_leaf || ymin == ymax) return index;

    // Gains closer than this are ties; they come from different summation
    // orders over the same partition.
    const double tie = 1e-12 * sumsq;
    const Split split = best_split(lo, hi, sum, tie);
    if (!split.found) return index;

    const auto& ord = order_[split.feature];
    std::size_t n_left = 0;
    for (std::size_t k = lo; k < hi; ++k) {
      const bool left = x_at(split.feature, ord[k]) <= split.threshold;
      goes_left_[ord[k]] = left ? 1 : 0;
      n_left += left ? 1 : 0;
    }
    for (auto& o : order_) {
      std::size_t l = lo;
      std::size_t r = 0;
      for (std::size_t k = lo; k < hi; ++k) {
        if (goes_left_[o[k]]) o[l++] = o[k];
        else scratch_[r++] = o[k];
      }
      std::copy_n(scratch_.begin(), r, o.begin() + static_cast<std::ptrdiff_t>(l));
    }

    t.nodes[static_cast<std::size_t>(index)].feature = static_cast<int>(split.feature);
    t.nodes[static_cast<std::size_t>(index)].threshold = split.threshold;
    const int left = grow(t, lo, lo + n_left, depth + 1);
    const int right = grow(t, lo + n_left, hi, depth + 1);
    t.nodes[static_cast<std::size_t>(index)].left = left;
    t.nodes[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  Split best_split(std::size_t lo, std::size_t hi, double total, double tie) {
    const std::size_t p = X_.cols();
    std::size_t m = p;
    if (options_.max_features > 0 && options_.max_features < p && rng_) {
      m = options_.max_features;
      std::iota(features_.begin(), features_.end(), std::size_t{0});
      for (std::size_t i = 0; i < m; ++i) std::swap(features_[i], features_[i + rng_->below(p - i)]);
      std::sort(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(m));
    } else {
      std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    const std::size_t n = hi - lo;
    const double parent = total * total / static_cast<double>(n);
    const std::size_t min_leaf = options_.min_samples_leaf;
    Split best;
    for (std::size_t fi = 0; fi < m; ++fi) {
      const std::size_t f = features_[fi];
      const auto& ord = order_[f];
      double left_sum = 0.0;
      for (std::size_t k = lo; k + 1 < hi; ++k) {
        left_sum += yv_[ord[k]];
        const std::size_t nl = k + 1 - lo;
        const std::size_t nr = n - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        const double xa = x_at(f, ord[k]);
        const double xb = x_at(f, ord[k + 1]);
        if (!(xa < xb)) continue;
        const double right_sum = total - left_sum;
        const double gain = left_sum * left_sum / static_cast<double>(nl) +
                            right_sum * right_sum / static_cast<double>(nr) - parent;
        if (gain > best.gain + tie) {
          double mid = (xa + xb) / 2.0;
          if (!(mid < xb)) mid = xa;
          best = Split{true, f, mid, gain};
        }
      }
    }
    return best;
  }

  const Matrix& X_;
  TreeOptions options_;
  Rng* rng_;
  std::vector<std::size_t> rows_;
  std::vector<double> yv_;
  std::vector<std::vector<std::size_t>> order_;
  std::vector<char> goes_left_;
  std::vector<std::size_t> scratch_;
  std::vector<std::size_t> features_;
};

}  // namespace

Tree build_tree(const Matrix& X, std::span<const double> y, std::span<const std::size_t> sample,
                const TreeOptions& options, Rng* rng) {
  TreeBuilder builder(X, y, sample, options, rng);
  return builder.build();
}

}  // namespace covidprep::model
