#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace covidprep {

/// Missing cells are stored as quiet NaN. Parsing never produces NaN for a
/// present value, so NaN is an unambiguous missing marker throughout.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

using Series = std::vector<double>;
using Date = std::chrono::sys_days;

enum class ErrorCode {
  MissingHeader,
  MalformedDate,
  EmptyFile,
  DuplicateDate,
  UnknownLocation,
  EmptyRange,
  WindowTooSmall,
  NonpositivePopulation,
  CyclicGraph,
  InvalidGraph,
  MissingInput,
  LengthMismatch,
  TooFewSamples,
  Degenerate,
  EmptyMatrix,
  SingularSystem,
  TooFewRows,
  ZeroVariance,
  Empty,
  MissingRun,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parses a strict YYYY-MM-DD date. Throws MalformedDate.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Deterministic random source. The engine is std::mt19937_64; the
/// distribution mappings are written out here because the standard library
/// distributions are implementation-defined and would break cross-platform
/// reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// A child generator keyed by a stage label.
  Rng fork(std::string_view label) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound).
  std::size_t below(std::size_t bound);
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Writes `contents` to `path` through a temporary file and a rename so a
/// crash never leaves a half-written artifact.
void write_file_atomic(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace covidprep
