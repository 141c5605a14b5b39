#pragma once

#include <cstddef>
#include <vector>

#include "covidprep/common.hpp"

namespace covidprep::impute {

/// A run of (length - 1) zero days closed by one lump-sum report.
struct WeeklyBlock {
  std::size_t start_index = 0;
  std::size_t length = 0;
  double total = 0.0;

  friend bool operator==(const WeeklyBlock&, const WeeklyBlock&) = default;
};

/// Straight-line fill of every interior missing run bounded on both sides.
Series linear_interpolate(Series series);

/// Extends the line through the first (last) two known points over the
/// leading (trailing) missing run. No-op with fewer than two known points.
Series linear_extrapolate(Series series);

/// Repeats the first (last) known value over the leading (trailing) run.
Series constant_extrapolate(Series series);

Series zero_fill(Series series);

enum class TailFill { Linear, Constant, None };

/// interpolate, fill tails, zero-fill. With TailFill::Linear and
/// `constant_fallback`, a series with exactly one known point gets constant
/// tails instead of being left to zero_fill.
Series fill_missing(Series series, TailFill tails, bool constant_fallback = true);

/// Left-to-right scan for maximal runs of k-1 zeros closed by one positive
/// value, 2 <= k <= 7. A zero run longer than six days is a quiet period,
/// not a reporting gap. Missing values break runs.
std::vector<WeeklyBlock> detect_weekly_blocks(const Series& series);

/// Spreads each detected block's total evenly over its days. Preserves the
/// series sum.
Series weekly_pattern_impute(Series series);

}  // namespace covidprep::impute
