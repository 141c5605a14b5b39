#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "covidprep/frame.hpp"

namespace covidprep::ingest {

enum class ColumnClass { Empty, Constant, Variable };
enum class ColumnGroup { NewColumns, Independent, Remaining };

std::string_view to_string(ColumnClass c) noexcept;
std::string_view to_string(ColumnGroup g) noexcept;

/// Columns kept only in frame metadata.
inline constexpr std::string_view kCategoricalColumns[] = {"iso_code", "location", "continent", "tests_units"};

/// Columns with weekly reporting patterns.
inline constexpr std::string_view kNewColumns[] = {"new_cases", "new_deaths"};
/// Columns without weekly patterns or computational dependencies.
inline constexpr std::string_view kIndependentColumns[] = {
    "new_tests",       "new_vaccinations", "reproduction_rate", "people_vaccinated", "people_fully_vaccinated",
    "total_boosters", "stringency_index"};

/// One raw frame per location, keyed by iso_code. Rows are sorted by date
/// and interior calendar gaps are filled with all-missing rows.
struct ParsedFile {
  std::map<std::string, SeriesFrame> frames;
  /// Source records per iso_code, before gap filling.
  std::map<std::string, std::vector<Date>> record_dates;
};

/// Parses numeric text: integers, decimals, scientific notation. Anything
/// else, including the empty string, is missing.
double parse_number(std::string_view cell) noexcept;

ParsedFile parse_owid_csv_text(std::string_view text, std::string_view digest = {});
ParsedFile parse_owid_csv(const std::string& path);

/// Restricts to the records inside [start, end]. Every calendar day between
/// the first and last such record is present; absent days are all-missing
/// rows.
SeriesFrame filter_location(const ParsedFile& parsed, std::string_view iso_code, Date start, Date end);

std::map<std::string, ColumnClass> classify_columns(const SeriesFrame& frame);
std::map<std::string, ColumnGroup> group_columns(const SeriesFrame& frame);

/// Serializes in the input dialect: categorical columns, date, then the
/// numeric columns in frame order; missing cells are empty fields.
std::string write_csv(const SeriesFrame& frame);

}  // namespace covidprep::ingest
