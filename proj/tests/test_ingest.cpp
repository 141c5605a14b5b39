#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "covidprep/ingest.hpp"

using namespace covidprep;
using namespace covidprep::ingest;

namespace {

const std::string kFixture = std::string(COVIDPREP_TEST_DATA) + "/owid_india_fixture.csv";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

const char* kSmall =
    "iso_code,continent,location,date,new_cases,total_cases,population,tests_units\n"
    "IND,Asia,India,2020-01-03,1,1,100,samples\n"
    "IND,Asia,India,2020-01-05,,3,100,samples\n"
    "IND,Asia,India,2020-01-04,2,3e0,100,samples\n"
    "LKA,Asia,Sri Lanka,2020-01-04,5,5,,\n";

}  // namespace

TEST_CASE("numeric cells") {
  CHECK(parse_number("12") == 12.0);
  CHECK(parse_number("-1.5") == -1.5);
  CHECK(parse_number("1.2e3") == 1200.0);
  CHECK(parse_number("1E-2") == 0.01);
  for (const char* cell : {"", "abc", "1.2.3", "12x", " ", "nan"}) CHECK(is_missing(parse_number(cell)));
}

TEST_CASE("parses per location, sorts dates and keeps categoricals in meta") {
  const ParsedFile p = parse_owid_csv_text(kSmall);
  REQUIRE(p.frames.size() == 2);
  const SeriesFrame& in = p.frames.at("IND");
  REQUIRE(in.rows() == 3);
  CHECK(format_date(in.dates()[0]) == "2020-01-03");
  CHECK(format_date(in.dates()[2]) == "2020-01-05");
  CHECK(in.at("new_cases")[1] == 2.0);
  CHECK(is_missing(in.at("new_cases")[2]));
  CHECK(in.at("total_cases")[1] == 3.0);
  CHECK(!in.has("iso_code"));
  CHECK(!in.has("tests_units"));
  CHECK(in.meta().location == "India");
  CHECK(in.meta().tests_units == "samples");
  CHECK(in.meta().population == 100.0);
  CHECK(!p.frames.at("LKA").meta().population.has_value());
}

TEST_CASE("out-of-order input equals sorted input") {
  const char* sorted =
      "iso_code,continent,location,date,new_cases,total_cases,population,tests_units\n"
      "IND,Asia,India,2020-01-03,1,1,100,samples\n"
      "IND,Asia,India,2020-01-04,2,3e0,100,samples\n"
      "IND,Asia,India,2020-01-05,,3,100,samples\n";
  CHECK(parse_owid_csv_text(kSmall).frames.at("IND") == parse_owid_csv_text(sorted).frames.at("IND"));
}

TEST_CASE("parse errors") {
  CHECK(code_of([] { parse_owid_csv_text(""); }) == ErrorCode::EmptyFile);
  CHECK(code_of([] { parse_owid_csv_text("iso_code,location,date\nIND,India,2020-01-01\n"); }) ==
        ErrorCode::MissingHeader);
  CHECK(code_of([] { parse_owid_csv_text("iso_code,location,date,population\nIND,India,01/02/2020,1\n"); }) ==
        ErrorCode::MalformedDate);
  CHECK(code_of([] {
          parse_owid_csv_text("iso_code,location,date,population\nIND,India,2020-01-02,1\nIND,India,2020-01-02,1\n");
        }) == ErrorCode::DuplicateDate);
}

TEST_CASE("single all-blank row") {
  const ParsedFile p = parse_owid_csv_text("iso_code,location,date,population,new_cases\nIND,India,2020-01-02,,\n");
  const SeriesFrame& f = p.frames.at("IND");
  CHECK(f.rows() == 1);
  for (const auto& c : f.columns()) CHECK(is_missing(c.values[0]));
}

TEST_CASE("filter_location inserts absent days") {
  const char* gappy =
      "iso_code,location,date,population,x\n"
      "IND,India,2020-01-01,10,1\n"
      "IND,India,2020-01-05,10,5\n"
      "IND,India,2020-01-06,10,6\n";
  const ParsedFile p = parse_owid_csv_text(gappy);
  const SeriesFrame f = filter_location(p, "IND", parse_date("2019-12-01"), parse_date("2020-12-31"));
  CHECK(f.rows() == 6);
  f.validate();
  CHECK(is_missing(f.at("x")[1]));
  CHECK(is_missing(f.at("x")[3]));
  CHECK(f.at("x")[4] == 5.0);
  const SeriesFrame one = filter_location(p, "IND", parse_date("2020-01-05"), parse_date("2020-01-05"));
  CHECK(one.rows() == 1);
  CHECK(code_of([&] { filter_location(p, "USA", parse_date("2020-01-01"), parse_date("2020-01-02")); }) ==
        ErrorCode::UnknownLocation);
  CHECK(code_of([&] { filter_location(p, "IND", parse_date("2021-01-01"), parse_date("2021-02-01")); }) ==
        ErrorCode::EmptyRange);
}

TEST_CASE("classification and grouping") {
  std::vector<Date> dates;
  for (int i = 0; i < 3; ++i) dates.push_back(parse_date("2020-01-01") + std::chrono::days(i));
  SeriesFrame f(dates,
                {{"empty", {kMissing, kMissing, kMissing}},
                 {"population", {kMissing, 1.38e9, 1.38e9}},
                 {"new_deaths", {1, 2, 3}},
                 {"stringency_index", {1, 1, 2}},
                 {"total_deaths_per_million", {0, 0, 1}}},
                {});
  const auto cls = classify_columns(f);
  CHECK(cls.at("empty") == ColumnClass::Empty);
  CHECK(cls.at("population") == ColumnClass::Constant);
  CHECK(cls.at("new_deaths") == ColumnClass::Variable);
  const auto groups = group_columns(f);
  CHECK(groups.size() == f.columns().size());
  CHECK(groups.at("new_deaths") == ColumnGroup::NewColumns);
  CHECK(groups.at("stringency_index") == ColumnGroup::Independent);
  CHECK(groups.at("total_deaths_per_million") == ColumnGroup::Remaining);
}

TEST_CASE("csv round trip is bitwise") {
  const ParsedFile p = parse_owid_csv(kFixture);
  const SeriesFrame f = filter_location(p, "IND", parse_date("2020-01-05"), parse_date("2024-08-11"));
  const ParsedFile again = parse_owid_csv_text(write_csv(f));
  CHECK(again.frames.at("IND") == f);
  CHECK(again.frames.at("IND").meta() == f.meta());
}

TEST_CASE("fixture shape") {
  const ParsedFile p = parse_owid_csv(kFixture);
  const Date start = parse_date("2020-01-05"), end = parse_date("2024-08-11");
  const SeriesFrame f = filter_location(p, "IND", start, end);
  f.validate();
  const auto& rec = p.record_dates.at("IND");
  CHECK(std::count_if(rec.begin(), rec.end(), [&](Date d) { return d >= start && d <= end; }) == 1680);
  CHECK(f.rows() == 1681);
  CHECK(f.meta().population == 1417173120.0);

  int counts[3] = {0, 0, 0};
  for (const auto& [name, c] : classify_columns(f)) ++counts[static_cast<int>(c)];
  CHECK(counts[static_cast<int>(ColumnClass::Empty)] == 12);
  CHECK(counts[static_cast<int>(ColumnClass::Constant)] == 15);
  CHECK(counts[static_cast<int>(ColumnClass::Variable)] == 35);

  std::set<std::string> names;
  for (const auto& [name, g] : group_columns(f)) names.insert(name);
  CHECK(names.size() == f.columns().size());
}
