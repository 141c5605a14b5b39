#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "covidprep/model.hpp"

using namespace covidprep;
using namespace covidprep::model;

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

struct Data {
  Matrix X;
  std::vector<double> y;
};

// y = X * beta + 0.5 + noise on standard-normal features.
Data linear_data(std::size_t n, const std::vector<double>& beta, double noise, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Matrix(n, beta.size()), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.5;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      d.X(i, j) = rng.normal();
      v += beta[j] * d.X(i, j);
    }
    d.y[i] = v + noise * rng.normal();
  }
  return d;
}

Data nonlinear_data(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  Data d{Matrix(n, p), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) d.X(i, j) = rng.uniform(-2, 2);
    d.y[i] = std::sin(d.X(i, 0)) * 3 + (p > 1 ? d.X(i, 1) * d.X(i, 1) : 0.0) + 0.1 * rng.normal();
  }
  return d;
}

double train_rmse(const TrainedModel& m, const Data& d) {
  const auto p = predict(m, d.X);
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - d.y[i]) * (p[i] - d.y[i]);
  return std::sqrt(s / p.size());
}

ModelSpec spec(ModelKind kind, std::map<std::string, double> params = {}, std::vector<int> hidden = {},
               std::uint64_t seed = 1) {
  return ModelSpec{kind, std::move(params), std::move(hidden), seed};
}

// Independent least squares: Gauss-Jordan on the augmented normal equations.
std::vector<double> normal_equations(const Matrix& X, std::span<const double> y) {
  const std::size_t p = X.cols() + 1;
  std::vector<std::vector<double>> A(p, std::vector<double>(p + 1, 0.0));
  for (std::size_t i = 0; i < X.rows(); ++i) {
    std::vector<double> row{1.0};
    for (std::size_t j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) A[a][b] += row[a] * row[b];
      A[a][p] += row[a] * y[i];
    }
  }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= p; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> out(p);
  for (std::size_t c = 0; c < p; ++c) out[c] = A[c][p] / A[c][c];
  return out;  // intercept first
}

double lasso_objective(const Matrix& X, std::span<const double> y, double b0, double b1, double b2, double lambda) {
  double sse = 0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const double r = y[i] - b0 - b1 * X(i, 0) - b2 * X(i, 1);
    sse += r * r;
  }
  return sse / (2.0 * X.rows()) + lambda * (std::fabs(b1) + std::fabs(b2));
}

}  // namespace

TEST_CASE("standardization") {
  Matrix X(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    X(i, 0) = i + 1.0;
    X(i, 1) = 4.0;
  }
  const ScalerParams p = standardize_fit(X);
  CHECK(p.mean[0] == doctest::Approx(2.0));
  CHECK(p.std[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(p.std[1] == 1.0);
  const Matrix Z = standardize_apply(X, p);
  CHECK(Z(0, 0) == doctest::Approx(-1.224744871391589));
  CHECK(Z(1, 0) == doctest::Approx(0.0));
  CHECK(Z(2, 0) == doctest::Approx(1.224744871391589));
  for (std::size_t i = 0; i < 3; ++i) CHECK(Z(i, 1) == 0.0);

  Matrix other(1, 2);
  other(0, 0) = 10;
  other(0, 1) = 4;
  CHECK(standardize_apply(other, p)(0, 0) == doctest::Approx((10 - 2.0) / std::sqrt(2.0 / 3.0)));
  CHECK(code_of([] { standardize_fit(Matrix()); }) == ErrorCode::EmptyMatrix);

  const Data d = linear_data(500, {1, 2, 3}, 1, 4);
  const Matrix S = standardize_apply(d.X, standardize_fit(d.X));
  for (std::size_t j = 0; j < 3; ++j) {
    const auto c = S.column(j);
    double m = std::accumulate(c.begin(), c.end(), 0.0) / c.size(), v = 0;
    for (double x : c) v += (x - m) * (x - m);
    CHECK(std::fabs(m) < 1e-9);
    CHECK(std::fabs(std::sqrt(v / c.size()) - 1.0) < 1e-9);
  }
}

TEST_CASE("spec validation") {
  CHECK(normalized(spec(ModelKind::Ridge)).params.at("lambda") == 1.0);
  CHECK(code_of([] { normalized(spec(ModelKind::Ridge, {{"k", 3}})); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { normalized(spec(ModelKind::KNN, {{"k", 0}})); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { normalized(spec(ModelKind::KNN, {{"k", 2.5}})); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { normalized(spec(ModelKind::OLS, {}, {4})); }) == ErrorCode::InvalidConfig);
  CHECK(model_kind_from_string("GradientBoosting") == ModelKind::GradientBoosting);
  CHECK(display_name(ModelKind::OLS) == "LinearRegression");
  CHECK(is_nonlinear(ModelKind::KNN));
  CHECK(!is_nonlinear(ModelKind::ElasticNet));
}

TEST_CASE("ols recovers an exact line and agrees with the normal equations") {
  Matrix X(20, 1);
  std::vector<double> y(20);
  for (std::size_t i = 0; i < 20; ++i) {
    X(i, 0) = static_cast<double>(i) * 0.5 - 3.0;
    y[i] = 3.0 * X(i, 0) + 2.0;
  }
  const LinearParams p = fit_ols(X, y);
  CHECK(std::fabs(p.coef[0] - 3.0) < 1e-8);
  CHECK(std::fabs(p.intercept - 2.0) < 1e-8);

  const Data d = linear_data(200, {1.5, -2.0, 0.3, 0.0}, 0.7, 9);
  const LinearParams q = fit_ols(d.X, d.y);
  const auto oracle = normal_equations(d.X, d.y);
  CHECK(std::fabs(q.intercept - oracle[0]) < 1e-9);
  for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(q.coef[j] - oracle[j + 1]) < 1e-9);

  CHECK(code_of([] { fit(spec(ModelKind::OLS), Matrix(3, 3, 1.0), std::vector<double>(3, 1.0)); }) ==
        ErrorCode::TooFewRows);
}

TEST_CASE("ridge tends to ols as lambda vanishes") {
  const Data d = linear_data(300, {2, -1, 0.5}, 0.3, 5);
  const LinearParams ols = fit_ols(d.X, d.y);
  const LinearParams ridge = fit_ridge(d.X, d.y, 1e-12);
  double delta = std::pow(ridge.intercept - ols.intercept, 2);
  for (std::size_t j = 0; j < 3; ++j) delta += std::pow(ridge.coef[j] - ols.coef[j], 2);
  CHECK(std::sqrt(delta) < 1e-6);
  // shrinkage is monotone in lambda
  double prev = 1e300;
  for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
    const LinearParams r = fit_ridge(d.X, d.y, lambda);
    double norm = 0;
    for (double c : r.coef) norm += c * c;
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("lasso matches a brute-force objective search") {
  Rng rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const Data d = linear_data(60, {rng.uniform(-2, 2), rng.uniform(-2, 2)}, 0.5, 100 + trial);
    const double lambda = rng.uniform(0.01, 0.8);
    const LinearParams cd = fit_elastic_net(d.X, d.y, lambda, 1.0, 1e-10, 100000);
    const double cd_obj = lasso_objective(d.X, d.y, cd.intercept, cd.coef[0], cd.coef[1], lambda);

    // Coarse-to-fine grid over (b1, b2); the intercept is profiled out.
    const double ybar = std::accumulate(d.y.begin(), d.y.end(), 0.0) / d.y.size();
    auto objective = [&](double b1, double b2) {
      double m0 = 0, m1 = 0;
      for (std::size_t i = 0; i < d.X.rows(); ++i) {
        m0 += d.X(i, 0);
        m1 += d.X(i, 1);
      }
      const double b0 = ybar - b1 * m0 / d.X.rows() - b2 * m1 / d.X.rows();
      return lasso_objective(d.X, d.y, b0, b1, b2, lambda);
    };
    double c1 = 0, c2 = 0, step = 0.5, best = objective(0, 0);
    for (int level = 0; level < 14; ++level) {
      double n1 = c1, n2 = c2;
      for (int a = -20; a <= 20; ++a)
        for (int b = -20; b <= 20; ++b) {
          const double v = objective(c1 + a * step, c2 + b * step);
          if (v < best) {
            best = v;
            n1 = c1 + a * step;
            n2 = c2 + b * step;
          }
        }
      c1 = n1;
      c2 = n2;
      step /= 4;
    }
    CHECK(std::fabs(cd_obj - best) < 1e-4);
    CHECK(cd_obj <= best + 1e-9);
    CHECK(std::fabs(elastic_net_objective(d.X, d.y, cd, lambda, 1.0) - cd_obj) < 1e-12);
  }
}

TEST_CASE("lasso above lambda_max predicts the mean") {
  const Data d = linear_data(100, {1, -1, 2}, 0.5, 6);
  const double lmax = lasso_lambda_max(d.X, d.y);
  const TrainedModel m = fit(spec(ModelKind::Lasso, {{"lambda", lmax * 1.0001}}), d.X, d.y);
  const auto& p = std::get<LinearParams>(m.params);
  for (double c : p.coef) CHECK(c == 0.0);
  const double ybar = std::accumulate(d.y.begin(), d.y.end(), 0.0) / d.y.size();
  for (double v : predict(m, d.X)) CHECK(v == doctest::Approx(ybar).epsilon(1e-12));
  const auto below = std::get<LinearParams>(fit(spec(ModelKind::Lasso, {{"lambda", lmax * 0.9}}), d.X, d.y).params);
  CHECK(std::any_of(below.coef.begin(), below.coef.end(), [](double c) { return c != 0.0; }));
}

TEST_CASE("elastic net endpoints") {
  const Data d = linear_data(150, {1, 0.2, -0.7, 0.0}, 0.4, 8);
  for (double lambda : {0.001, 0.05, 0.3}) {
    const LinearParams en1 = fit_elastic_net(d.X, d.y, lambda, 1.0, 1e-12, 100000);
    const auto lasso = std::get<LinearParams>(fit(spec(ModelKind::Lasso, {{"lambda", lambda}}), d.X, d.y).params);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(en1.coef[j] - lasso.coef[j]) < 1e-6);
    const LinearParams en0 = fit_elastic_net(d.X, d.y, lambda, 0.0, 1e-12, 100000);
    const LinearParams ridge = fit_ridge(d.X, d.y, lambda);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::fabs(en0.coef[j] - ridge.coef[j]) < 1e-6);
    CHECK(std::fabs(en0.intercept - ridge.intercept) < 1e-6);
  }
}

TEST_CASE("warm-started path equals independent fits") {
  const Data d = linear_data(120, {1, 0.5, -0.25}, 0.5, 10);
  const double lmax = lasso_lambda_max(d.X, d.y);
  const std::vector<double> lambdas{lmax, lmax * 0.3, lmax * 0.1, lmax * 0.01};
  const auto path = elastic_net_path(d.X, d.y, lambdas, 1.0, 1e-10, 100000);
  REQUIRE(path.size() == lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const LinearParams cold = fit_elastic_net(d.X, d.y, lambdas[i], 1.0, 1e-10, 100000);
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::fabs(path[i].coef[j] - cold.coef[j]) < 1e-7);
  }
}

TEST_CASE("knn") {
  const Data d = nonlinear_data(80, 3, 11);
  const TrainedModel m = fit(spec(ModelKind::KNN, {{"k", 1}}), d.X, d.y);
  CHECK(predict(m, d.X) == d.y);

  // equidistant neighbours resolve to the lower row index
  Matrix X(3, 1);
  X(0, 0) = -1;
  X(1, 0) = 1;
  X(2, 0) = 5;
  const TrainedModel tie = fit(spec(ModelKind::KNN, {{"k", 1}}), X, std::vector<double>{10, 20, 30});
  Matrix q(1, 1, 0.0);
  CHECK(predict(tie, q)[0] == 10.0);
  const TrainedModel two = fit(spec(ModelKind::KNN, {{"k", 2}}), X, std::vector<double>{10, 20, 30});
  CHECK(predict(two, q)[0] == 15.0);
}

TEST_CASE("tree root split equals exhaustive enumeration") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.below(16), p = 1 + rng.below(4);
    Matrix X(n, p);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < p; ++j) X(i, j) = std::round(rng.uniform(0, 10) * 100) / 100;
      y[i] = rng.normal() + (X(i, 0) > 5 ? 2 : 0);
    }
    double best = -1, best_thr = 0;
    int best_f = -1;
    auto sse = [](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      double s = 0;
      for (double x : v) s += (x - m) * (x - m);
      return s;
    };
    const double parent = sse(y);
    for (std::size_t f = 0; f < p; ++f) {
      std::vector<double> vals = X.column(f);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (std::size_t k = 0; k + 1 < vals.size(); ++k) {
        const double thr = (vals[k] + vals[k + 1]) / 2;
        std::vector<double> l, r;
        for (std::size_t i = 0; i < n; ++i) (X(i, f) <= thr ? l : r).push_back(y[i]);
        const double gain = parent - sse(l) - sse(r);
        if (gain > best + 1e-9 * (1.0 + std::fabs(best))) {
          best = gain;
          best_f = static_cast<int>(f);
          best_thr = thr;
        }
      }
    }
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Tree t = build_tree(X, y, all, TreeOptions{1, 1, 0});
    if (best_f < 0) {
      CHECK(t.nodes.size() == 1);
      continue;
    }
    REQUIRE(t.nodes.size() == 3);
    CHECK(t.nodes[0].feature == best_f);
    CHECK(t.nodes[0].threshold == best_thr);
  }
}

TEST_CASE("unlimited tree interpolates distinct training points") {
  const Data d = nonlinear_data(200, 2, 14);
  const TrainedModel m = fit(spec(ModelKind::DecisionTree), d.X, d.y);
  CHECK(train_rmse(m, d) == 0.0);
  const TrainedModel shallow = fit(spec(ModelKind::DecisionTree, {{"max_depth", 2}}), d.X, d.y);
  CHECK(std::get<Tree>(shallow.params).nodes.size() <= 7);
  const TrainedModel leafy = fit(spec(ModelKind::DecisionTree, {{"min_samples_leaf", 20}}), d.X, d.y);
  CHECK(train_rmse(leafy, d) > 0.0);
}

TEST_CASE("boosting training error does not increase with stages") {
  const Data d = nonlinear_data(150, 2, 15);
  double prev = 1e300;
  for (double m : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
    const TrainedModel g =
        fit(spec(ModelKind::GradientBoosting, {{"n_stages", m}, {"learning_rate", 0.1}, {"max_depth", 2}}), d.X, d.y);
    const double e = train_rmse(g, d);
    CHECK(e <= prev + 1e-12);
    prev = e;
  }
}

TEST_CASE("mlp backprop matches central finite differences") {
  Rng rng(16);
  Matrix X(5, 3);
  std::vector<double> y(5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y[i] = rng.normal();
  }
  MlpNetwork net = mlp_init(3, {6, 4}, rng);
  for (auto& layer : net.layers)
    for (double& b : layer.bias) b = rng.uniform(-0.3, 0.3);
  MlpNetwork grad;
  mlp_loss_and_gradient(net, X, y, &grad);
  const double h = 1e-6;
  double worst = 0;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto probe = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = mlp_loss_and_gradient(net, X, y, nullptr);
      param = keep - h;
      const double down = mlp_loss_and_gradient(net, X, y, nullptr);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      const double rel = std::fabs(numeric - analytic) / std::max(1e-6, std::fabs(numeric) + std::fabs(analytic));
      worst = std::max(worst, rel);
    };
    for (std::size_t k = 0; k < net.layers[l].weights.size(); ++k) probe(net.layers[l].weights[k], grad.layers[l].weights[k]);
    for (std::size_t k = 0; k < net.layers[l].bias.size(); ++k) probe(net.layers[l].bias[k], grad.layers[l].bias[k]);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("mlp init bounds and training") {
  Rng rng(1);
  const MlpNetwork net = mlp_init(10, {30}, rng);
  const double bound = std::sqrt(6.0 / 40.0);
  for (double w : net.layers[0].weights) CHECK(std::fabs(w) <= bound);
  const Data d = nonlinear_data(300, 2, 17);
  const TrainedModel m =
      fit(spec(ModelKind::MLP, {{"learning_rate", 0.01}, {"max_epochs", 200}}, {32}, 3), d.X, d.y);
  double var = 0, mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / d.y.size();
  for (double v : d.y) var += (v - mean) * (v - mean);
  CHECK(train_rmse(m, d) < 0.5 * std::sqrt(var / d.y.size()));
}

TEST_CASE("stochastic models are reproducible from spec and seed") {
  const Data d = nonlinear_data(120, 3, 18);
  for (const ModelSpec& s : {spec(ModelKind::RandomForest, {{"n_trees", 20}}, {}, 5),
                             spec(ModelKind::GradientBoosting, {{"subsample", 0.7}}, {}, 5),
                             spec(ModelKind::MLP, {{"max_epochs", 30}}, {8}, 5)}) {
    CAPTURE(to_string(s.kind));
    CHECK(to_json(fit(s, d.X, d.y)) == to_json(fit(s, d.X, d.y)));
    ModelSpec other = s;
    other.seed = 6;
    CHECK(to_json(fit(other, d.X, d.y)) != to_json(fit(s, d.X, d.y)));
  }
}

TEST_CASE("forest beats a single tree out of sample") {
  auto additive = [](std::uint64_t seed) {
    Rng rng(seed);
    Data d{Matrix(300, 3), std::vector<double>(300)};
    for (std::size_t i = 0; i < 300; ++i) {
      for (std::size_t j = 0; j < 3; ++j) {
        d.X(i, j) = rng.uniform(-2, 2);
        d.y[i] += std::sin(d.X(i, j) * 1.5);
      }
      d.y[i] += 0.2 * rng.normal();
    }
    return d;
  };
  const Data train = additive(19), test = additive(20);
  const TrainedModel tree = fit(spec(ModelKind::DecisionTree), train.X, train.y);
  const TrainedModel forest = fit(spec(ModelKind::RandomForest, {{"n_trees", 50}}), train.X, train.y);
  CHECK(train_rmse(forest, test) < train_rmse(tree, test));
}

TEST_CASE("json round trip preserves predictions for every kind") {
  const Data d = nonlinear_data(90, 3, 21);
  const std::vector<std::string> names{"a", "b", "c"};
  for (ModelKind kind : kAllKinds) {
    CAPTURE(to_string(kind));
    ModelSpec s = spec(kind);
    if (kind == ModelKind::RandomForest) s.params["n_trees"] = 10;
    if (kind == ModelKind::MLP) {
      s.params["max_epochs"] = 20;
      s.hidden = {8, 4};
    }
    const TrainedModel m = fit(s, d.X, d.y, names);
    const std::string text = to_json(m);
    const TrainedModel back = model_from_json(text);
    CHECK(back == m);
    CHECK(to_json(back) == text);
    CHECK(predict(back, d.X) == predict(m, d.X));
  }
  CHECK(code_of([] { model_from_json("{\"format\":\"other\"}"); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("predict checks the feature layout") {
  const Data d = linear_data(30, {1, 2}, 0.1, 22);
  const TrainedModel m = fit(spec(ModelKind::OLS), d.X, d.y, {"a", "b"});
  CHECK(code_of([&] { predict(m, Matrix(2, 3)); }) == ErrorCode::LengthMismatch);
  CHECK(code_of([&] { predict(m, d.X, {"b", "a"}); }) == ErrorCode::LengthMismatch);
  CHECK(predict(m, d.X, {"a", "b"}) == predict(m, d.X));
}

TEST_CASE("grid search") {
  const Data d = linear_data(100, {3, -2}, 0.1, 23);
  CHECK(chronological_folds(10, 3) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 3}, {3, 6}, {6, 10}});
  CHECK(code_of([] { chronological_folds(3, 5); }) == ErrorCode::TooFewRows);
  CHECK(code_of([] { chronological_folds(10, 1); }) == ErrorCode::InvalidConfig);

  const std::vector<ModelSpec> one{spec(ModelKind::Ridge, {{"lambda", 0.5}})};
  CHECK(kfold_grid_search(one, d.X, d.y, 5, 1).best.params.at("lambda") == 0.5);

  const std::vector<ModelSpec> grid{spec(ModelKind::Ridge, {{"lambda", 1e6}}), spec(ModelKind::Ridge, {{"lambda", 0}})};
  const GridResult r = kfold_grid_search(grid, d.X, d.y, 5, 1);
  CHECK(r.best.params.at("lambda") == 0.0);
  REQUIRE(r.table.size() == 2);
  CHECK(r.table[0].fold_rmse.size() == 5);
  CHECK(r.table[1].mean_rmse < r.table[0].mean_rmse);

  const std::vector<ModelSpec> same{spec(ModelKind::Ridge, {{"lambda", 1}}), spec(ModelKind::Ridge, {{"lambda", 1}})};
  const GridResult tie = kfold_grid_search(same, d.X, d.y, 5, 1);
  CHECK(tie.table[0].mean_rmse == tie.table[1].mean_rmse);

  const auto forest_grid = default_grid(ModelKind::RandomForest);
  const GridResult a = kfold_grid_search({forest_grid[0]}, d.X, d.y, 3, 9);
  const GridResult b = kfold_grid_search({forest_grid[0]}, d.X, d.y, 3, 9);
  CHECK(a.table[0].fold_rmse == b.table[0].fold_rmse);
  CHECK(code_of([&] { kfold_grid_search(one, Matrix(3, 2), std::vector<double>(3), 5, 1); }) == ErrorCode::TooFewRows);
}

TEST_CASE("default grids") {
  CHECK(default_grid(ModelKind::OLS).size() == 1);
  CHECK(default_grid(ModelKind::Ridge).size() == 5);
  CHECK(default_grid(ModelKind::ElasticNet).size() == 15);
  CHECK(default_grid(ModelKind::KNN).size() == 4);
  CHECK(default_grid(ModelKind::DecisionTree).size() == 8);
  CHECK(default_grid(ModelKind::RandomForest).size() == 2);
  CHECK(default_grid(ModelKind::GradientBoosting).size() == 8);
  CHECK(default_grid(ModelKind::MLP).size() == 4);
}
