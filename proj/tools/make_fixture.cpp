// Writes the synthetic OWID-schema fixture used by the tests and the
// acceptance run. The India series follow the published epidemic shape
// (three waves, weekly reporting periods, a death-count revision, testing
// and vaccination campaigns); the values themselves are generated.
//
//   make_fixture [output.csv]

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "covidprep/common.hpp"

using namespace covidprep;

namespace {

const char* const kHeader[] = {
    "iso_code", "continent", "location", "date", "total_cases", "new_cases", "new_cases_smoothed", "total_deaths",
    "new_deaths", "new_deaths_smoothed", "total_cases_per_million", "new_cases_per_million",
    "new_cases_smoothed_per_million", "total_deaths_per_million", "new_deaths_per_million",
    "new_deaths_smoothed_per_million", "reproduction_rate", "icu_patients", "icu_patients_per_million",
    "hosp_patients", "hosp_patients_per_million", "weekly_icu_admissions", "weekly_icu_admissions_per_million",
    "weekly_hosp_admissions", "weekly_hosp_admissions_per_million", "total_tests", "new_tests",
    "total_tests_per_thousand", "new_tests_per_thousand", "new_tests_smoothed", "new_tests_smoothed_per_thousand",
    "positive_rate", "tests_per_case", "tests_units", "total_vaccinations", "people_vaccinated",
    "people_fully_vaccinated", "total_boosters", "new_vaccinations", "new_vaccinations_smoothed",
    "total_vaccinations_per_hundred", "people_vaccinated_per_hundred", "people_fully_vaccinated_per_hundred",
    "total_boosters_per_hundred", "new_vaccinations_smoothed_per_million", "new_people_vaccinated_smoothed",
    "new_people_vaccinated_smoothed_per_hundred", "stringency_index", "population_density", "median_age",
    "aged_65_older", "aged_70_older", "gdp_per_capita", "extreme_poverty", "cardiovasc_death_rate",
    "diabetes_prevalence", "female_smokers", "male_smokers", "handwashing_facilities", "hospital_beds_per_thousand",
    "life_expectancy", "human_development_index", "population", "excess_mortality_cumulative_absolute",
    "excess_mortality_cumulative", "excess_mortality", "excess_mortality_cumulative_per_million"};

struct Constant {
  const char* name;
  double value;
};

const Constant kIndiaConstants[] = {
    {"population_density", 450.419}, {"median_age", 28.2},         {"aged_65_older", 5.989},
    {"aged_70_older", 3.414},        {"gdp_per_capita", 6426.674}, {"extreme_poverty", 21.2},
    {"cardiovasc_death_rate", 282.28}, {"diabetes_prevalence", 10.39}, {"female_smokers", 1.9},
    {"male_smokers", 20.6},          {"handwashing_facilities", 59.55}, {"hospital_beds_per_thousand", 0.53},
    {"life_expectancy", 69.66},      {"human_development_index", 0.645}, {"population", 1417173120.0}};

// Column name -> (values, decimals). Missing cells are kMissing.
struct Table {
  std::size_t rows = 0;
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, int> decimals;

  std::vector<double>& col(const std::string& name, int places) {
    decimals[name] = places;
    auto [it, inserted] = values.try_emplace(name, rows, kMissing);
    return it->second;
  }
};

double round_to(double v, int places) {
  const double f = std::pow(10.0, places);
  return std::round(v * f) / f;
}

std::string format_cell(double v, int places) {
  if (is_missing(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, round_to(v, places));
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s += '0';
  } else {
    s += ".0";
  }
  return s;
}

double bump(double d, double peak, double center, double width_up, double width_down) {
  const double w = d < center ? width_up : width_down;
  const double z = (d - center) / w;
  return peak * std::exp(-0.5 * z * z);
}

// Piecewise-linear interpolation through (x, y) anchors, flat outside.
double anchors(double x, const std::vector<std::pair<double, double>>& pts) {
  if (x <= pts.front().first) return pts.front().second;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (x <= pts[i].first) {
      const auto [x0, y0] = pts[i - 1];
      const auto [x1, y1] = pts[i];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return pts.back().second;
}

double expected_cases(double d) {
  if (d < 25) return 0.0;
  return bump(d, 97000, 255, 55, 70) + bump(d, 400000, 485, 22, 28) + bump(d, 340000, 752, 12, 20) +
         bump(d, 20000, 925, 20, 30) + bump(d, 10500, 1190, 15, 20) + bump(d, 650, 1450, 15, 20) + 150.0;
}

// Weekly lump-sum reporting inside [lo, hi): the week's rounded total lands
// on its last day, the other days show 0.
void weekly_report(std::vector<double>& reported, const std::vector<double>& truth, std::size_t lo, std::size_t hi) {
  double pending = 0.0;
  for (std::size_t i = lo; i < hi && i < truth.size(); ++i) {
    pending += truth[i];
    const bool closes = (i - lo) % 7 == 6 || i + 1 == hi;
    reported[i] = closes ? std::round(pending) : 0.0;
    if (closes) pending = 0.0;
  }
}

std::vector<double> rolling7(const std::vector<double>& v, std::size_t from) {
  std::vector<double> out(v.size(), kMissing);
  for (std::size_t i = from + 6; i < v.size(); ++i) {
    double s = 0.0;
    bool ok = true;
    for (std::size_t k = i - 6; k <= i; ++k) {
      if (is_missing(v[k])) ok = false;
      s += v[k];
    }
    if (ok) out[i] = s / 7.0;
  }
  return out;
}

Table india(Rng& rng) {
  // Row r is 2020-01-03 + r; d = r - 2 counts from 2020-01-05.
  Table t;
  t.rows = 1686;
  const std::size_t n = t.rows;
  const double pop = 1417173120.0;
  auto D = [](std::size_t r) { return static_cast<double>(r) - 2.0; };
  auto lognoise = [&](double sigma) { return std::exp(sigma * rng.normal()); };
  auto weekday_factor = [](std::size_t r, double sunday) { return r % 7 == 2 ? sunday : 1.0; };

  // Cases and deaths.
  std::vector<double> cases(n), deaths(n);
  const std::vector<std::pair<double, double>> cfr = {{0, 0.02},     {300, 0.012},  {450, 0.0105}, {600, 0.0105},
                                                      {700, 0.0021}, {900, 0.002}, {1200, 0.004}, {1700, 0.008}};
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    cases[r] = std::round(expected_cases(d) * lognoise(0.08) * weekday_factor(r, 0.85));
    const double lagged = d >= 12 ? expected_cases(d - 12) : 0.0;
    deaths[r] = d < 67 ? 0.0 : anchors(d, cfr) * lagged * lognoise(0.12);
  }
  auto& new_cases = t.col("new_cases", 0);
  auto& new_deaths = t.col("new_deaths", 0);
  new_cases = cases;
  for (std::size_t r = 0; r < n; ++r) new_deaths[r] = std::round(deaths[r]);
  const std::size_t weekly_from = 1262;  // d = 1260
  weekly_report(new_deaths, deaths, 402, 602);
  weekly_report(new_cases, cases, weekly_from, n);
  weekly_report(new_deaths, deaths, weekly_from, n);
  new_deaths[642] += 2500;  // one-off revision of past deaths
  new_deaths[832] = -7;     // downward correction
  new_cases[702] = -150;

  auto& total_cases = t.col("total_cases", 0);
  auto& total_deaths = t.col("total_deaths", 0);
  double tc = 0.0, td = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    tc += new_cases[r];
    td += new_deaths[r];
    total_cases[r] = tc;
    total_deaths[r] = td;
  }
  t.col("new_cases_smoothed", 3) = rolling7(new_cases, 0);
  t.col("new_deaths_smoothed", 3) = rolling7(new_deaths, 0);
  auto per = [&](const std::string& out, const std::string& in, double scale, int places) {
    const auto src = t.values.at(in);
    auto& dst = t.col(out, places);
    for (std::size_t r = 0; r < n; ++r)
      if (!is_missing(src[r])) dst[r] = round_to(src[r] * scale / pop, places);
  };
  per("total_cases_per_million", "total_cases", 1e6, 3);
  per("new_cases_per_million", "new_cases", 1e6, 3);
  per("new_cases_smoothed_per_million", "new_cases_smoothed", 1e6, 3);
  per("total_deaths_per_million", "total_deaths", 1e6, 3);
  per("new_deaths_per_million", "new_deaths", 1e6, 3);
  per("new_deaths_smoothed_per_million", "new_deaths_smoothed", 1e6, 3);

  auto& rr = t.col("reproduction_rate", 2);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 60 || d > 1250) continue;
    const double growth = (std::log(expected_cases(d) + 1.0) - std::log(expected_cases(d - 7) + 1.0)) / 7.0;
    rr[r] = round_to(std::clamp(std::exp(5.0 * growth), 0.5, 3.0) + 0.02 * rng.normal(), 2);
  }

  // Testing: daily from d = 60 to d = 900 with ~3% unreported days.
  std::vector<double> tests(n, kMissing);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 60 || d > 900) continue;
    const double ramp = 1.0 / (1.0 + std::exp(-(d - 150.0) / 30.0));
    tests[r] = std::round(1.2e6 * ramp * (1.0 + 0.4 * expected_cases(d) / 400000.0) * lognoise(0.06) *
                          weekday_factor(r, 0.85) + 800.0);
  }
  auto& new_tests = t.col("new_tests", 0);
  auto& total_tests = t.col("total_tests", 0);
  double tt = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (is_missing(tests[r])) continue;
    tt += tests[r];
    if (rng.uniform() < 0.03) continue;
    new_tests[r] = tests[r];
    total_tests[r] = tt;
  }
  per("total_tests_per_thousand", "total_tests", 1e3, 3);
  per("new_tests_per_thousand", "new_tests", 1e3, 3);
  const auto tests_smoothed = rolling7(tests, 0);
  t.col("new_tests_smoothed", 0) = tests_smoothed;
  per("new_tests_smoothed_per_thousand", "new_tests_smoothed", 1e3, 3);
  const auto cases_smoothed = rolling7(cases, 0);
  auto& positive_rate = t.col("positive_rate", 4);
  auto& tests_per_case = t.col("tests_per_case", 1);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 66 || d > 850 || (d >= 600 && d < 660)) continue;
    if (is_missing(tests_smoothed[r]) || !(tests_smoothed[r] > 0.0)) continue;
    const double rate = round_to(cases_smoothed[r] / tests_smoothed[r], 4);
    if (!(rate > 0.0)) continue;
    positive_rate[r] = rate;
    tests_per_case[r] = round_to(1.0 / rate, 1);
  }

  // Vaccination from 2021-01-16 (d = 377); boosters from 2022-01-10 (d = 736).
  std::vector<double> vacc(n, 0.0), first(n, 0.0), second(n, 0.0), booster(n, 0.0);
  const std::vector<std::pair<double, double>> level = {{377, 2e5},   {420, 1.5e6}, {470, 3.5e6}, {490, 2.0e6},
                                                        {520, 4.5e6}, {600, 6.5e6}, {650, 5.5e6}, {720, 1.2e6},
                                                        {760, 2.2e6}, {820, 9e5},   {950, 2e5},   {1100, 1.5e4},
                                                        {1300, 2e3},  {1700, 300}};
  const std::vector<std::pair<double, double>> first_share = {{377, 1.0}, {420, 1.0}, {650, 0.35}, {800, 0.1}, {900, 0.02}};
  const std::vector<std::pair<double, double>> booster_share = {{735, 0.0}, {736, 0.2}, {760, 0.3}, {900, 0.8}};
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 377) continue;
    double v = anchors(d, level) * lognoise(0.1) * weekday_factor(r, 0.5);
    if (d == 533) v = 9.2e6;
    if (d == 621) v = 2.5e7;
    vacc[r] = std::round(v);
    const double f1 = anchors(d, first_share);
    const double fb = anchors(d, booster_share);
    first[r] = std::round(vacc[r] * f1);
    booster[r] = std::round(vacc[r] * fb * (1.0 - f1));
    second[r] = vacc[r] - first[r] - booster[r];
  }
  auto& new_vacc = t.col("new_vaccinations", 0);
  auto& total_vacc = t.col("total_vaccinations", 0);
  auto& people_vacc = t.col("people_vaccinated", 0);
  auto& people_full = t.col("people_fully_vaccinated", 0);
  auto& total_boost = t.col("total_boosters", 0);
  double cv = 0.0, c1 = 0.0, c2 = 0.0, cb = 0.0, since_report = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 377) continue;
    cv += vacc[r];
    c1 += first[r];
    c2 += second[r];
    cb += booster[r];
    since_report += vacc[r];
    const bool reported = d <= 1300 ? rng.uniform() >= 0.05 : static_cast<long>(d) % 14 == 0;
    if (!reported) continue;
    new_vacc[r] = since_report;
    since_report = 0.0;
    total_vacc[r] = cv;
    people_vacc[r] = c1;
    people_full[r] = c2;
    if (d >= 736) total_boost[r] = cb;
  }
  // The first reported day counts the whole campaign so far.
  auto& vacc_smoothed = t.col("new_vaccinations_smoothed", 0);
  auto& first_smoothed = t.col("new_people_vaccinated_smoothed", 0);
  const auto vs = rolling7(vacc, 0);
  const auto fs = rolling7(first, 0);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 377 || d > 1300) continue;
    vacc_smoothed[r] = std::round(vs[r]);
    first_smoothed[r] = std::round(fs[r]);
  }
  per("total_vaccinations_per_hundred", "total_vaccinations", 1e2, 2);
  per("people_vaccinated_per_hundred", "people_vaccinated", 1e2, 2);
  per("people_fully_vaccinated_per_hundred", "people_fully_vaccinated", 1e2, 2);
  per("total_boosters_per_hundred", "total_boosters", 1e2, 2);
  per("new_vaccinations_smoothed_per_million", "new_vaccinations_smoothed", 1e6, 0);
  per("new_people_vaccinated_smoothed_per_hundred", "new_people_vaccinated_smoothed", 1e2, 3);

  // Government response index: piecewise constant fortnights until 2022-12-31.
  const std::vector<std::pair<double, double>> stringency = {
      {17, 10.19}, {70, 38.0},  {80, 100.0}, {150, 96.3}, {250, 81.9}, {400, 68.5}, {485, 84.3},
      {600, 72.7}, {750, 64.4}, {900, 49.1}, {1000, 37.0}, {1091, 29.6}};
  auto& si = t.col("stringency_index", 2);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = D(r);
    if (d < 17 || d > 1091) continue;
    const double step = std::floor((d - 17.0) / 14.0) * 14.0 + 17.0;
    si[r] = round_to(anchors(step, stringency), 2);
  }

  for (const auto& c : kIndiaConstants) {
    auto& v = t.col(c.name, 3);
    std::fill(v.begin(), v.end(), c.value);
  }
  return t;
}

Table sri_lanka(Rng& rng) {
  Table t;
  t.rows = 40;
  auto& nc = t.col("new_cases", 0);
  auto& nd = t.col("new_deaths", 0);
  auto& tc = t.col("total_cases", 0);
  auto& td = t.col("total_deaths", 0);
  double c = 86000.0, dd = 500.0;
  for (std::size_t r = 0; r < t.rows; ++r) {
    nc[r] = std::round(450.0 * std::exp(0.1 * rng.normal()));
    nd[r] = std::round(4.0 * std::exp(0.3 * rng.normal()));
    c += nc[r];
    dd += nd[r];
    tc[r] = c;
    td[r] = dd;
  }
  auto& p = t.col("population", 0);
  std::fill(p.begin(), p.end(), 21832143.0);
  return t;
}

void emit(std::string& out, const Table& t, const char* iso, const char* continent, const char* location, Date first,
          std::size_t skip_row) {
  for (std::size_t r = 0; r < t.rows; ++r) {
    if (r == skip_row) continue;
    std::string line;
    for (std::size_t c = 0; c < std::size(kHeader); ++c) {
      const std::string name = kHeader[c];
      if (c) line += ',';
      if (name == "iso_code") line += iso;
      else if (name == "continent") line += continent;
      else if (name == "location") line += location;
      else if (name == "date") line += format_date(first + std::chrono::days(static_cast<int>(r)));
      else if (name == "tests_units") line += "samples tested";
      else if (auto it = t.values.find(name); it != t.values.end()) line += format_cell(it->second[r], t.decimals.at(name));
    }
    out += line;
    out += '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "owid_india_fixture.csv";
  Rng root(20240811);
  Rng rng_in = root.fork("india");
  Rng rng_lk = root.fork("sri-lanka");
  const Table in = india(rng_in);
  const Table lk = sri_lanka(rng_lk);

  std::string out;
  for (std::size_t c = 0; c < std::size(kHeader); ++c) {
    if (c) out += ',';
    out += kHeader[c];
  }
  out += '\n';
  // Row 1002 (2022-10-01) is absent from the source, as reporting gaps are.
  emit(out, in, "IND", "Asia", "India", parse_date("2020-01-03"), 1002);
  emit(out, lk, "LKA", "Asia", "Sri Lanka", parse_date("2021-03-01"), static_cast<std::size_t>(-1));
  write_file_atomic(path, out);
  std::cout << "wrote " << path << "\n";
  return 0;
}
