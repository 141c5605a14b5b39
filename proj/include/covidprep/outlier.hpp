#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "covidprep/common.hpp"

namespace covidprep::outlier {

enum class Method { Global, Local };
enum class Replacement { Interpolation, Winsorize };

std::string_view to_string(Method m) noexcept;
std::string_view to_string(Replacement r) noexcept;

struct OutlierReport {
  std::string column;
  std::vector<std::size_t> indices;  // strictly increasing
  Method method = Method::Global;
  Replacement replaced_with = Replacement::Interpolation;
  std::size_t window = 0;  // 0 for the global detector
  double threshold = 2.0;
};

/// JSON document {column, method, window, threshold, indices, replaced_with}.
std::string to_json(const OutlierReport& report);

/// Points whose |z| against whole-series mean and population std exceeds
/// `z_th`. Empty with fewer than two known values or zero spread.
std::vector<std::size_t> global_zscore_outliers(const Series& series, double z_th = 2.0);

/// Minimum number of valid points in a trailing window before a z-score is
/// computed.
inline constexpr std::size_t kMinWindowPoints = 5;

/// Trailing-window z-scores: window [i-window+1, i] including x_i, population
/// std, at least kMinWindowPoints valid points, nonzero spread.
std::vector<std::size_t> rolling_zscore_outliers(const Series& series, std::size_t window = 30, double z_th = 2.0);

/// Flagged entries set missing, then interpolated and linearly extrapolated.
Series replace_by_interpolation(Series series, const std::vector<std::size_t>& indices);

/// Clamps each flagged x_i to mean_i +/- z_th*std_i, with the trailing
/// window statistics computed without any flagged point.
Series winsorize_local(Series series, const std::vector<std::size_t>& indices, std::size_t window, double z_th);

}  // namespace covidprep::outlier
