#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covidprep/common.hpp"

namespace covidprep {

struct FrameMeta {
  std::string iso_code;
  std::string location;
  std::string continent;
  std::string tests_units;
  /// First non-missing value of the population column. Absent when the
  /// source carries no population at all; per-capita formulas then fail
  /// with NonpositivePopulation.
  std::optional<double> population;
  std::string source_digest;

  /// Digest is provenance, not content, and is excluded from equality.
  friend bool operator==(const FrameMeta& a, const FrameMeta& b) {
    return a.iso_code == b.iso_code && a.location == b.location && a.continent == b.continent &&
           a.tests_units == b.tests_units && a.population == b.population;
  }
};

struct Column {
  std::string name;
  Series values;
};

/// Date-indexed numeric table. Dates are contiguous daily and every column
/// has one value per date; missing cells hold kMissing.
class SeriesFrame {
 public:
  SeriesFrame() = default;
  SeriesFrame(std::vector<Date> dates, std::vector<Column> columns, FrameMeta meta);

  std::size_t rows() const noexcept { return dates_.size(); }
  const std::vector<Date>& dates() const noexcept { return dates_; }
  const std::vector<Column>& columns() const noexcept { return columns_; }
  const FrameMeta& meta() const noexcept { return meta_; }
  FrameMeta& meta() noexcept { return meta_; }

  std::vector<std::string> column_names() const;
  bool has(std::string_view name) const noexcept;
  /// Throws MissingInput when absent.
  const Series& at(std::string_view name) const;
  Series& at(std::string_view name);
  /// Replaces an existing column or appends a new one.
  void set(std::string_view name, Series values);

  /// Checks the contiguity and length invariants; throws std::logic_error.
  void validate() const;

  /// Bitwise value comparison; NaN cells compare equal to NaN cells.
  friend bool operator==(const SeriesFrame& a, const SeriesFrame& b);

 private:
  std::vector<Date> dates_;
  std::vector<Column> columns_;
  FrameMeta meta_;
};

}  // namespace covidprep
