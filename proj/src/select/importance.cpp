#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

#include "covidprep/kernels.hpp"
#include "covidprep/select.hpp"

namespace covidprep::select {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
  const std::size_t n = a.size();
  if (n == 0) return kMissing;
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0;
  double sbb = 0.0;
  double sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) return kMissing;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

namespace {

double rmse_of(std::span<const double> y, const std::vector<double>& pred) {
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sse += (y[i] - pred[i]) * (y[i] - pred[i]);
  return std::sqrt(sse / static_cast<double>(y.size()));
}

std::vector<double> standardized(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  double m = 0.0;
  for (double x : v) m += x;
  m /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / n);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sd > 0.0 ? (v[i] - m) / sd : 0.0;
  return out;
}

}  // namespace

std::vector<double> permutation_importance(const model::TrainedModel& model, const FeatureMatrix& fm,
                                           std::size_t repeats, std::uint64_t seed) {
  fm.validate();
  const double baseline = rmse_of(fm.y, model::predict(model, fm.X));
  std::vector<double> scores(fm.names.size(), 0.0);
  if (repeats == 0) return scores;
  const Rng root(seed);
  Matrix work = fm.X;
  for (std::size_t j = 0; j < fm.names.size(); ++j) {
    Rng rng = root.fork("pfi:" + fm.names[j]);
    const std::vector<double> original = fm.X.column(j);
    double total = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<double> shuffled = original;
      rng.shuffle(std::span<double>(shuffled));
      work.set_column(j, shuffled);
      total += rmse_of(fm.y, model::predict(model, work)) - baseline;
    }
    work.set_column(j, original);
    scores[j] = total / static_cast<double>(repeats);
  }
  return scores;
}

double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t k, std::uint64_t seed) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "mutual information inputs differ in length");
  const std::size_t n = x.size();
  if (k == 0 || n < k + 2) throw Error(ErrorCode::TooFewSamples, "mutual information needs at least k + 2 samples");

  std::vector<double> xs = standardized(x);
  std::vector<double> ys = standardized(y);
  Rng rng(seed);
  for (double& v : xs) v += 1e-10 * rng.normal();
  for (double& v : ys) v += 1e-10 * rng.normal();

  std::vector<double> psi(n + 1);
  for (std::size_t i = 1; i <= n; ++i) psi[i] = boost::math::digamma(static_cast<double>(i));

  std::vector<double> dist(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    kernels::max_norm_distances(xs, ys, xs[i], ys[i], dist);
    dist[i] = kInf;
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    const double eps = dist[k - 1];
    // count_within includes the point itself whenever eps > 0.
    const std::size_t cx = kernels::count_within(xs, xs[i], eps);
    const std::size_t cy = kernels::count_within(ys, ys[i], eps);
    const std::size_t nx = cx > 0 ? cx - 1 : 0;
    const std::size_t ny = cy > 0 ? cy - 1 : 0;
    acc += psi[nx + 1] + psi[ny + 1];
  }
  const double mi = psi[k] + psi[n] - acc / static_cast<double>(n);
  return std::max(0.0, mi);
}

double single_feature_impact(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "single feature impact inputs differ in length");
  const std::size_t n = x.size();
  if (n < 10) throw Error(ErrorCode::TooFewSamples, "single feature impact needs at least 10 samples");
  const auto folds = model::chronological_folds(n, 5);
  double total = 0.0;
  for (const auto& [lo, hi] : folds) {
    double mx = 0.0;
    double my = 0.0;
    const double n_train = static_cast<double>(n - (hi - lo));
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      mx += x[i];
      my += y[i];
    }
    mx /= n_train;
    my /= n_train;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i >= lo && i < hi) continue;
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    const double intercept = my - slope * mx;

    double fold_mean = 0.0;
    for (std::size_t i = lo; i < hi; ++i) fold_mean += y[i];
    fold_mean /= static_cast<double>(hi - lo);
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double r = y[i] - (intercept + slope * x[i]);
      sse += r * r;
      sst += (y[i] - fold_mean) * (y[i] - fold_mean);
    }
    total += sst > 0.0 ? 1.0 - sse / sst : 0.0;
  }
  return std::max(0.0, total / static_cast<double>(folds.size()));
}

std::vector<double> combined_importance(std::span<const double> pfi, std::span<const double> mi,
                                        std::span<const double> sfi) {
  if (pfi.size() != mi.size() || pfi.size() != sfi.size()) {
    throw Error(ErrorCode::LengthMismatch, "importance metrics differ in length");
  }
  std::vector<double> out(pfi.size(), 0.0);
  if (pfi.empty()) return out;
  for (const auto metric : {pfi, mi, sfi}) {
    const auto [lo, hi] = std::minmax_element(metric.begin(), metric.end());
    const double range = *hi - *lo;
    for (std::size_t i = 0; i < metric.size(); ++i) out[i] += range > 0.0 ? (metric[i] - *lo) / range : 0.5;
  }
  return out;
}

}  // namespace covidprep::select
