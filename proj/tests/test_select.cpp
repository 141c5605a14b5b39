#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>

#include "covidprep/select.hpp"

using namespace covidprep;
using namespace covidprep::select;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

FeatureMatrix from_columns(const std::vector<std::vector<double>>& cols, std::vector<double> y) {
  FeatureMatrix fm;
  fm.X = Matrix(y.size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    fm.names.push_back("x" + std::to_string(j));
    fm.X.set_column(j, cols[j]);
  }
  fm.y = std::move(y);
  return fm;
}

std::vector<double> normals(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal() * scale;
  return v;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b, double w = 1.0) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + w * b[i];
  return out;
}

// R^2 of column j on the rest plus an intercept, by Gauss-Jordan on the
// normal equations.
double brute_vif(const Matrix& X, std::size_t j) {
  const std::size_t n = X.rows(), p = X.cols();
  std::vector<std::size_t> others;
  for (std::size_t k = 0; k < p; ++k)
    if (k != j) others.push_back(k);
  const std::size_t q = others.size() + 1;
  std::vector<std::vector<double>> A(q, std::vector<double>(q + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row{1.0};
    for (std::size_t k : others) row.push_back(X(i, k));
    for (std::size_t a = 0; a < q; ++a) {
      for (std::size_t b = 0; b < q; ++b) A[a][b] += row[a] * row[b];
      A[a][q] += row[a] * X(i, j);
    }
  }
  for (std::size_t c = 0; c < q; ++c) {
    for (std::size_t r = 0; r < q; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= q; ++k) A[r][k] -= f * A[c][k];
    }
  }
  double mean = 0;
  for (std::size_t i = 0; i < n; ++i) mean += X(i, j);
  mean /= n;
  double sse = 0, sst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = A[0][q] / A[0][0];
    for (std::size_t k = 0; k < others.size(); ++k) pred += A[k + 1][q] / A[k + 1][k + 1] * X(i, others[k]);
    sse += (X(i, j) - pred) * (X(i, j) - pred);
    sst += (X(i, j) - mean) * (X(i, j) - mean);
  }
  return 1.0 / (sse / sst);
}

}  // namespace

TEST_CASE("pearson") {
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(std::isnan(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3})));
}

TEST_CASE("feature matrix from a frame") {
  std::vector<Date> dates;
  for (int i = 0; i < 4; ++i) dates.push_back(parse_date("2020-01-01") + std::chrono::days(i));
  const SeriesFrame f(dates, {{"a", {1, 2, 3, 4}}, {"b", {5, 6, kMissing, 8}}, {"y", {0, 1, 0, 1}}}, {});
  const FeatureMatrix fm = make_feature_matrix(f, {"a"}, "y", 1, 3);
  CHECK(fm.X.rows() == 2);
  CHECK(fm.X(0, 0) == 2.0);
  CHECK(fm.y == std::vector<double>{1, 0});
  CHECK(code_of([&] { make_feature_matrix(f, {"b"}, "y", 0, 4); }) == ErrorCode::MissingInput);
  CHECK(code_of([&] { make_feature_matrix(f, {"c"}, "y", 0, 4); }) == ErrorCode::MissingInput);
  CHECK(fm.subset(std::vector<std::string>{"a"}).names == std::vector<std::string>{"a"});
}

TEST_CASE("correlation filter") {
  Rng rng(1);
  const std::size_t n = 500;
  const auto z = normals(rng, n);
  const auto y = add(z, normals(rng, n));

  const auto dup = from_columns({z, z}, y);
  const FilterResult d = correlation_filter_detailed(dup, 0.8);
  CHECK(d.kept.names == std::vector<std::string>{"x0"});
  REQUIRE(d.removed.size() == 1);
  CHECK(d.removed[0] == Removal{"x1", RemovalReason::Correlated});

  const auto indep = from_columns({normals(rng, n), normals(rng, n)}, y);
  CHECK(correlation_filter(indep, 0.8).names.size() == 2);

  // three columns sharing a factor; x1 tracks the target most closely
  const auto base = normals(rng, n);
  const auto x0 = add(base, normals(rng, n), 0.2);
  const auto x1 = add(base, normals(rng, n), 0.2);
  const auto x2 = add(base, normals(rng, n), 0.2);
  const auto target = add(x1, normals(rng, n), 0.3);
  const auto trio = from_columns({x0, x1, x2}, target);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) CHECK(std::fabs(pearson(trio.X.column(a), trio.X.column(b))) > 0.9);
  CHECK(correlation_filter(trio, 0.8).names == std::vector<std::string>{"x1"});

  const auto with_const = from_columns({std::vector<double>(n, 2.0), z}, y);
  const FilterResult c = correlation_filter_detailed(with_const, 0.8);
  CHECK(c.kept.names == std::vector<std::string>{"x1"});
  CHECK(c.removed[0] == Removal{"x0", RemovalReason::ConstantOrEmpty});
}

TEST_CASE("permutation importance") {
  Rng rng(2);
  const std::size_t n = 400;
  const auto x0 = normals(rng, n), x1 = normals(rng, n);
  const auto fm = from_columns({x0, x1}, x0);
  const auto m = model::fit(model::ModelSpec{model::ModelKind::OLS}, fm.X, fm.y);
  const auto a = permutation_importance(m, fm, 10, 7);
  CHECK(a[0] > 1.0);
  CHECK(a[0] > a[1]);
  CHECK(std::fabs(a[1]) < 1e-6);
  CHECK(permutation_importance(m, fm, 10, 7) == a);

  // noise feature score sits inside the spread of single-repeat scores
  const auto noisy = from_columns({x0, x1}, add(x0, normals(rng, n)));
  const auto mn = model::fit(model::ModelSpec{model::ModelKind::OLS}, noisy.X, noisy.y);
  std::vector<double> single;
  for (std::uint64_t s = 0; s < 30; ++s) single.push_back(permutation_importance(mn, noisy, 1, s)[1]);
  const double mean = std::accumulate(single.begin(), single.end(), 0.0) / single.size();
  double var = 0;
  for (double v : single) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / single.size());
  CHECK(std::fabs(permutation_importance(mn, noisy, 10, 99)[1]) < 3 * sd + 1e-12);
}

TEST_CASE("mutual information") {
  Rng rng(3);
  {
    const auto x = normals(rng, 2000), y = normals(rng, 2000);
    CHECK(mutual_information(x, y, 3, 1) < 0.05);
    CHECK(mutual_information(x, x, 3, 1) > 2.0);
  }
  {
    const double rho = 0.9;
    const auto a = normals(rng, 5000), b = normals(rng, 5000);
    std::vector<double> y(5000);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = rho * a[i] + std::sqrt(1 - rho * rho) * b[i];
    const double analytic = -0.5 * std::log(1 - rho * rho);
    CHECK(std::fabs(mutual_information(a, y, 3, 1) - analytic) < 0.1);
  }
  const std::vector<double> tiny{1, 2, 3, 4};
  CHECK(code_of([&] { mutual_information(tiny, tiny, 3); }) == ErrorCode::TooFewSamples);
  CHECK(code_of([&] { mutual_information(tiny, std::vector<double>{1, 2}, 3); }) == ErrorCode::LengthMismatch);
  // invariant to monotone rescaling of either variable, up to the jitter
  const auto x = normals(rng, 500);
  auto y = add(x, normals(rng, 500));
  std::vector<double> scaled(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) scaled[i] = 1000 * y[i] + 5;
  CHECK(mutual_information(x, y, 3, 4) == doctest::Approx(mutual_information(x, scaled, 3, 4)).epsilon(1e-6));
}

TEST_CASE("single feature impact") {
  Rng rng(4);
  std::vector<double> x(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = rng.normal();
    y[i] = 2 * x[i] + 1;
  }
  CHECK(std::fabs(single_feature_impact(x, y) - 1.0) < 1e-9);
  CHECK(single_feature_impact(normals(rng, 200), y) == 0.0);
  const auto u = normals(rng, 1000);
  CHECK(std::fabs(single_feature_impact(u, add(u, normals(rng, 1000))) - 0.5) < 0.1);
  CHECK(code_of([] { single_feature_impact(std::vector<double>(9, 1.0), std::vector<double>(9, 1.0)); }) ==
        ErrorCode::TooFewSamples);
}

TEST_CASE("vif") {
  // exactly orthogonal, centred columns
  Matrix O(8, 3);
  for (std::size_t i = 0; i < 8; ++i) {
    O(i, 0) = (i & 1) ? 1 : -1;
    O(i, 1) = (i & 2) ? 1 : -1;
    O(i, 2) = (i & 4) ? 1 : -1;
  }
  for (double v : vif(O)) CHECK(std::fabs(v - 1.0) < 1e-6);

  Rng rng(5);
  const auto a = normals(rng, 100);
  const auto dup = from_columns({a, a, normals(rng, 100)}, a);
  const auto v = vif(dup.X);
  CHECK(std::isinf(v[0]));
  CHECK(std::isinf(v[1]));
  CHECK(std::isfinite(v[2]));

  // x1 = x0 + e with var(e) = var(x0)/9, so R^2 = 0.9
  const auto x0 = normals(rng, 20000);
  const auto x1 = add(x0, normals(rng, 20000), 1.0 / 3.0);
  const auto pair = from_columns({x0, x1}, x0);
  CHECK(std::fabs(vif(pair.X)[1] - 10.0) < 0.5);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t p = 2 + rng.below(3);
    std::vector<std::vector<double>> cols;
    const auto common = normals(rng, 60);
    for (std::size_t j = 0; j < p; ++j) cols.push_back(add(normals(rng, 60), common, rng.uniform(0, 2)));
    const auto fm = from_columns(cols, common);
    const auto got = vif(fm.X);
    for (std::size_t j = 0; j < p; ++j) CHECK(std::fabs(got[j] - brute_vif(fm.X, j)) <= 1e-8 * brute_vif(fm.X, j));
  }

  Matrix single(10, 1);
  single.set_column(0, normals(rng, 10));
  CHECK(vif(single).at(0) == doctest::Approx(1.0));
  CHECK(std::isinf(vif(Matrix(10, 1, 3.0)).at(0)));
  const auto wide = vif(Matrix(3, 3, 1.0));
  for (double w : wide) CHECK(std::isinf(w));
}

TEST_CASE("combined importance") {
  const std::vector<double> pfi{3, 1, 2}, mi{0.5, 0.1, 0.2}, sfi{0.9, 0.0, 0.4};
  const auto c = combined_importance(pfi, mi, sfi);
  CHECK(c[0] == doctest::Approx(3.0));
  CHECK(c[1] == doctest::Approx(0.0));
  CHECK(c[2] == doctest::Approx(0.5 + 0.25 + 4.0 / 9.0));
  const auto flat = combined_importance(std::vector<double>{1, 1}, std::vector<double>{2, 2}, std::vector<double>{0, 1});
  CHECK(flat[0] == doctest::Approx(1.0));
  CHECK(flat[1] == doctest::Approx(2.0));
}

TEST_CASE("lasso refinement") {
  Rng rng(6);
  const std::size_t n = 300;
  const auto x0 = normals(rng, n), x1 = normals(rng, n), x2 = normals(rng, n);
  const LassoRefinement r = lasso_refine(from_columns({x0, x1}, x0));
  CHECK(r.kept.names == std::vector<std::string>{"x0"});
  CHECK(r.dropped == std::vector<std::string>{"x1"});

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] + 2 * x1[i] - x2[i] + 0.1 * rng.normal();
  const LassoRefinement all = lasso_refine(from_columns({x0, x1, x2}, y));
  CHECK(all.dropped.empty());
  CHECK(all.kept.names.size() == 3);

  const LassoRefinement flat = lasso_refine(from_columns({x0, std::vector<double>(n, 4.0)}, x0));
  CHECK(flat.dropped == std::vector<std::string>{"x1"});
  CHECK(flat.coef[1] == 0.0);
}

TEST_CASE("iterative selection") {
  Rng rng(7);
  const std::size_t n = 300;
  const auto x0 = normals(rng, n), x1 = normals(rng, n), x2 = normals(rng, n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x0[i] - x1[i] + 0.5 * x2[i] + 0.2 * rng.normal();

  SelectionOptions opt;
  opt.seed = 3;
  const SelectionResult plain = iterative_feature_selection(from_columns({x0, x1, x2}, y), "y", opt);
  CHECK(plain.features.size() == 3);
  CHECK(plain.trace.iterations.size() == 1);
  CHECK(plain.trace.removal_count() == 0);
  CHECK(plain.trace.iterations[0].max_vif < 1.1);

  // an exact duplicate survives corr_th = 1 and must leave through VIF
  opt.corr_th = 1.0;
  const auto fm = from_columns({x0, x1, x2, x1}, y);
  const SelectionResult dup = iterative_feature_selection(fm, "y", opt);
  CHECK(dup.features.size() == 3);
  CHECK(dup.trace.iterations[0].removals.at(0).reason == RemovalReason::HighVIF);
  CHECK(std::isinf(dup.trace.iterations[0].max_vif));
  CHECK(dup.trace.removal_count() == dup.trace.initial_features.size() - dup.trace.final_features.size());
  for (const auto& rec : dup.trace.iterations.back().records) CHECK(rec.vif <= opt.vif_th);

  const auto j = nlohmann::json::parse(to_json(dup.trace));
  CHECK(j["iterations"][0]["records"][1]["vif"] == "inf");
  CHECK(to_json(iterative_feature_selection(fm, "y", opt).trace) == to_json(dup.trace));

  const auto dead = from_columns({std::vector<double>(n, 1.0), std::vector<double>(n, 2.0)}, y);
  CHECK(code_of([&] { iterative_feature_selection(dead, "y", opt); }) == ErrorCode::Degenerate);
}

TEST_CASE("selection trace invariants on random collinear designs") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 200, p = 6;
    const auto f1 = normals(rng, n), f2 = normals(rng, n);
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < p; ++j)
      cols.push_back(add(add(normals(rng, n), f1, rng.uniform(0, 3)), f2, rng.uniform(0, 3)));
    const auto y = add(f1, normals(rng, n));
    SelectionOptions opt;
    opt.seed = static_cast<std::uint64_t>(trial);
    opt.corr_th = 0.99;
    const SelectionResult r = iterative_feature_selection(from_columns(cols, y), "y", opt);
    const auto& t = r.trace;
    CHECK(t.removal_count() == t.initial_features.size() - t.final_features.size());
    CHECK(t.iterations.size() <= p);
    CHECK(t.iterations.back().max_vif <= opt.vif_th);
    for (const auto& it : t.iterations) {
      for (const auto& rem : it.removals) {
        const bool present = std::any_of(it.records.begin(), it.records.end(),
                                         [&](const ImportanceRecord& rec) { return rec.feature == rem.feature; });
        CHECK(present);
      }
      for (const auto& rec : it.records) {
        CHECK(std::isfinite(rec.combined));
        CHECK(rec.mi >= 0.0);
        CHECK(rec.vif >= 1.0 - 1e-9);
      }
    }
  }
}
