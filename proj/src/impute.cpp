#include "covidprep/impute.hpp"

#include <algorithm>

namespace covidprep::impute {

namespace {

std::vector<std::size_t> known_indices(const Series& s) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!is_missing(s[i])) idx.push_back(i);
  return idx;
}

}  // namespace

Series linear_interpolate(Series series) {
  std::size_t prev = series.size();  // last known index, none yet
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (is_missing(series[i])) continue;
    if (prev != series.size() && i > prev + 1) {
      const double x0 = series[prev];
      const double slope = (series[i] - x0) / static_cast<double>(i - prev);
      for (std::size_t k = prev + 1; k < i; ++k) series[k] = x0 + slope * static_cast<double>(k - prev);
    }
    prev = i;
  }
  return series;
}

Series linear_extrapolate(Series series) {
  const auto known = known_indices(series);
  if (known.size() < 2) return series;
  {
    const std::size_t a = known[0];
    const std::size_t b = known[1];
    const double slope = (series[b] - series[a]) / static_cast<double>(b - a);
    for (std::size_t k = 0; k < a; ++k) series[k] = series[a] - slope * static_cast<double>(a - k);
  }
  {
    const std::size_t a = known[known.size() - 2];
    const std::size_t b = known[known.size() - 1];
    const double slope = (series[b] - series[a]) / static_cast<double>(b - a);
    for (std::size_t k = b + 1; k < series.size(); ++k) series[k] = series[b] + slope * static_cast<double>(k - b);
  }
  return series;
}

Series constant_extrapolate(Series series) {
  const auto known = known_indices(series);
  if (known.empty()) return series;
  std::fill(series.begin(), series.begin() + static_cast<std::ptrdiff_t>(known.front()), series[known.front()]);
  std::fill(series.begin() + static_cast<std::ptrdiff_t>(known.back()) + 1, series.end(), series[known.back()]);
  return series;
}

Series zero_fill(Series series) {
  for (double& v : series)
    if (is_missing(v)) v = 0.0;
  return series;
}

Series fill_missing(Series series, TailFill tails, bool constant_fallback) {
  series = linear_interpolate(std::move(series));
  switch (tails) {
    case TailFill::Linear: {
      const auto known = std::count_if(series.begin(), series.end(), [](double v) { return !is_missing(v); });
      series = (known == 1 && constant_fallback) ? constant_extrapolate(std::move(series))
                                                 : linear_extrapolate(std::move(series));
      break;
    }
    case TailFill::Constant:
      series = constant_extrapolate(std::move(series));
      break;
    case TailFill::None:
      break;
  }
  return zero_fill(std::move(series));
}

std::vector<WeeklyBlock> detect_weekly_blocks(const Series& series) {
  std::vector<WeeklyBlock> blocks;
  const std::size_t n = series.size();
  std::size_t i = 0;
  while (i < n) {
    if (is_missing(series[i]) || series[i] != 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && !is_missing(series[j]) && series[j] == 0.0) ++j;
    if (j - i <= 6 && j < n && !is_missing(series[j]) && series[j] > 0.0) {
      blocks.push_back(WeeklyBlock{i, j - i + 1, series[j]});
      i = j + 1;
    } else {
      i = j;
    }
  }
  return blocks;
}

Series weekly_pattern_impute(Series series) {
  for (const auto& b : detect_weekly_blocks(series)) {
    const double share = b.total / static_cast<double>(b.length);
    std::fill_n(series.begin() + static_cast<std::ptrdiff_t>(b.start_index), b.length, share);
  }
  return series;
}

}  // namespace covidprep::impute
