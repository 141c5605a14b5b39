#include <algorithm>

#include "covidprep/kernels.hpp"
#include "internal.hpp"

namespace covidprep::model::detail {

double knn_predict_one(const KnnParams& p, std::span<const double> x) {
  const std::size_t n = p.X.rows();
  const std::size_t k = std::min(p.k, n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = {kernels::squared_distance(p.X.row(i), x), i};
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += p.y[dist[i].second];
  return s / static_cast<double>(k);
}

}  // namespace covidprep::model::detail
