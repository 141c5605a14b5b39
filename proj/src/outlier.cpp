#include "covidprep/outlier.hpp"

#include <algorithm>
#include <json.hpp>

#include "covidprep/impute.hpp"

namespace covidprep::outlier {

std::string_view to_string(Method m) noexcept { return m == Method::Global ? "Global" : "Local"; }

std::string_view to_string(Replacement r) noexcept {
  return r == Replacement::Interpolation ? "Interpolation" : "Winsorize";
}

std::string to_json(const OutlierReport& report) {
  nlohmann::ordered_json j;
  j["column"] = report.column;
  j["method"] = to_string(report.method);
  j["window"] = report.window;
  j["threshold"] = report.threshold;
  j["indices"] = report.indices;
  j["replaced_with"] = to_string(report.replaced_with);
  return j.dump(2) + "\n";
}

namespace {

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;
};

// Two-pass mean and population std over the valid entries of [lo, hi],
// skipping indices marked in `skip` when given.
Moments window_moments(const Series& s, std::size_t lo, std::size_t hi, const std::vector<char>* skip) {
  Moments m;
  double total = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (is_missing(s[k]) || (skip && (*skip)[k])) continue;
    total += s[k];
    ++m.n;
  }
  if (m.n == 0) return m;
  m.mean = total / static_cast<double>(m.n);
  double ss = 0.0;
  for (std::size_t k = lo; k <= hi; ++k) {
    if (is_missing(s[k]) || (skip && (*skip)[k])) continue;
    const double d = s[k] - m.mean;
    ss += d * d;
  }
  m.std = std::sqrt(ss / static_cast<double>(m.n));
  return m;
}

}  // namespace

std::vector<std::size_t> global_zscore_outliers(const Series& series, double z_th) {
  std::vector<std::size_t> out;
  if (series.empty()) return out;
  const Moments m = window_moments(series, 0, series.size() - 1, nullptr);
  if (m.n < 2 || !(m.std > 0.0)) return out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (is_missing(series[i])) continue;
    if (std::fabs(series[i] - m.mean) / m.std > z_th) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> rolling_zscore_outliers(const Series& series, std::size_t window, double z_th) {
  if (window < 3) throw Error(ErrorCode::WindowTooSmall, "window must be at least 3");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (is_missing(series[i])) continue;
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    const Moments m = window_moments(series, lo, i, nullptr);
    if (m.n < kMinWindowPoints || !(m.std > 0.0)) continue;
    if (std::fabs(series[i] - m.mean) / m.std > z_th) out.push_back(i);
  }
  return out;
}

Series replace_by_interpolation(Series series, const std::vector<std::size_t>& indices) {
  if (indices.empty()) return series;
  for (std::size_t i : indices) series.at(i) = kMissing;
  return impute::linear_extrapolate(impute::linear_interpolate(std::move(series)));
}

Series winsorize_local(Series series, const std::vector<std::size_t>& indices, std::size_t window, double z_th) {
  if (indices.empty()) return series;
  if (window < 3) throw Error(ErrorCode::WindowTooSmall, "window must be at least 3");
  std::vector<char> flagged(series.size(), 0);
  for (std::size_t i : indices) flagged.at(i) = 1;
  const Series original = series;
  for (std::size_t i : indices) {
    if (is_missing(original[i])) continue;
    const std::size_t lo = i + 1 >= window ? i + 1 - window : 0;
    const Moments m = window_moments(original, lo, i, &flagged);
    if (m.n == 0) continue;
    const double upper = m.mean + z_th * m.std;
    const double lower = m.mean - z_th * m.std;
    series[i] = std::clamp(original[i], lower, upper);
  }
  return series;
}

}  // namespace covidprep::outlier
