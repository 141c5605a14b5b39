#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "covidprep/kernels.hpp"
#include "covidprep/model.hpp"

namespace covidprep::model {

namespace {

// Centered columns stored contiguously, plus the statistics needed to
// recover an intercept.
struct Centered {
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::vector<double>> cols;
  std::vector<double> x_mean;
  std::vector<double> y;
  double y_mean = 0.0;
};

Centered center(const Matrix& X, std::span<const double> y) {
  if (X.rows() != y.size()) throw Error(ErrorCode::LengthMismatch, "X and y row counts differ");
  if (X.rows() == 0) throw Error(ErrorCode::EmptyMatrix, "no rows");
  Centered c;
  c.n = X.rows();
  c.p = X.cols();
  c.cols.resize(c.p);
  c.x_mean.resize(c.p);
  const double inv_n = 1.0 / static_cast<double>(c.n);
  for (std::size_t j = 0; j < c.p; ++j) {
    c.cols[j] = X.column(j);
    const double m = kernels::sum(c.cols[j]) * inv_n;
    c.x_mean[j] = m;
    for (double& v : c.cols[j]) v -= m;
  }
  c.y.assign(y.begin(), y.end());
  c.y_mean = kernels::sum(c.y) * inv_n;
  for (double& v : c.y) v -= c.y_mean;
  return c;
}

// G = X'X/n, r = X'y/n on centered data.
void gram(const Centered& c, Eigen::MatrixXd& G, Eigen::VectorXd& r) {
  const double inv_n = 1.0 / static_cast<double>(c.n);
  G.resize(static_cast<Eigen::Index>(c.p), static_cast<Eigen::Index>(c.p));
  r.resize(static_cast<Eigen::Index>(c.p));
  for (std::size_t j = 0; j < c.p; ++j) {
    r(static_cast<Eigen::Index>(j)) = kernels::dot(c.cols[j], c.y) * inv_n;
    for (std::size_t k = 0; k <= j; ++k) {
      const double v = kernels::dot(c.cols[j], c.cols[k]) * inv_n;
      G(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
      G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v;
    }
  }
}

double intercept_for(const Centered& c, const std::vector<double>& coef) {
  double b0 = c.y_mean;
  for (std::size_t j = 0; j < c.p; ++j) b0 -= c.x_mean[j] * coef[j];
  return b0;
}

bool solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) return false;
  x = llt.solve(b);
  return x.allFinite();
}

}  // namespace

LinearParams fit_ols(const Matrix& X, std::span<const double> y) {
  Centered c = center(X, y);
  // Rescale columns to unit norm so the jitter is meaningful whatever the
  // units; zero columns get coefficient 0.
  std::vector<double> scale(c.p, 0.0);
  for (std::size_t j = 0; j < c.p; ++j) {
    const double norm = std::sqrt(kernels::dot(c.cols[j], c.cols[j]) / static_cast<double>(c.n));
    scale[j] = norm;
    if (norm > 0.0)
      for (double& v : c.cols[j]) v /= norm;
  }
  Eigen::MatrixXd G;
  Eigen::VectorXd r;
  gram(c, G, r);
  Eigen::VectorXd beta;
  if (!solve_spd(G, r, beta)) {
    G.diagonal().array() += 1e-10;
    if (!solve_spd(G, r, beta)) throw Error(ErrorCode::SingularSystem, "normal equations are singular");
  }
  LinearParams p;
  p.coef.resize(c.p);
  for (std::size_t j = 0; j < c.p; ++j)
    p.coef[j] = scale[j] > 0.0 ? beta(static_cast<Eigen::Index>(j)) / scale[j] : 0.0;
  p.intercept = intercept_for(c, p.coef);
  return p;
}

LinearParams fit_ridge(const Matrix& X, std::span<const double> y, double lambda) {
  const Centered c = center(X, y);
  Eigen::MatrixXd G;
  Eigen::VectorXd r;
  gram(c, G, r);
  G.diagonal().array() += lambda;
  Eigen::VectorXd beta;
  if (!solve_spd(G, r, beta)) {
    G.diagonal().array() += 1e-10;
    if (!solve_spd(G, r, beta)) throw Error(ErrorCode::SingularSystem, "ridge system is singular");
  }
  LinearParams p;
  p.coef.assign(beta.data(), beta.data() + beta.size());
  p.intercept = intercept_for(c, p.coef);
  return p;
}

namespace {

// Gram columns and X'y/n for coordinate descent.
struct CdProblem {
  Centered c;
  std::vector<std::vector<double>> gcol;
  Eigen::VectorXd r;
};

CdProblem cd_problem(const Matrix& X, std::span<const double> y) {
  CdProblem prob{center(X, y), {}, {}};
  Eigen::MatrixXd G;
  gram(prob.c, G, prob.r);
  const std::size_t p = prob.c.p;
  prob.gcol.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = G.col(static_cast<Eigen::Index>(j));
    prob.gcol[j].assign(col.data(), col.data() + p);
  }
  return prob;
}

LinearParams cd_solve(const CdProblem& prob, double lambda, double mix, double tol, std::size_t max_sweeps,
                      std::vector<double> b) {
  const std::size_t p = prob.c.p;
  const double l1 = lambda * mix;
  const double l2 = lambda * (1.0 - mix);
  if (b.size() != p) b.assign(p, 0.0);
  // gb = G b, kept current as coefficients move.
  std::vector<double> gb(p, 0.0);
  for (std::size_t j = 0; j < p; ++j)
    if (b[j] != 0.0) kernels::axpy(b[j], prob.gcol[j], gb);

  LinearParams out;
  out.converged = false;
  std::size_t sweep = 0;
  while (sweep < max_sweeps) {
    ++sweep;
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double gjj = prob.gcol[j][j];
      const double denom = gjj + l2;
      double updated = 0.0;
      if (denom > 0.0) {
        const double rho = prob.r(static_cast<Eigen::Index>(j)) - gb[j] + gjj * b[j];
        const double shrunk = std::fabs(rho) - l1;
        updated = shrunk > 0.0 ? std::copysign(shrunk, rho) / denom : 0.0;
      }
      const double delta = updated - b[j];
      if (delta != 0.0) {
        kernels::axpy(delta, prob.gcol[j], gb);
        b[j] = updated;
        max_change = std::max(max_change, std::fabs(delta));
      }
    }
    if (max_change < tol) {
      out.converged = true;
      break;
    }
  }
  out.sweeps = sweep;
  out.coef = std::move(b);
  out.intercept = intercept_for(prob.c, out.coef);
  return out;
}

}  // namespace

LinearParams fit_elastic_net(const Matrix& X, std::span<const double> y, double lambda, double mix, double tol,
                             std::size_t max_sweeps, const std::vector<double>* warm_start) {
  const CdProblem prob = cd_problem(X, y);
  return cd_solve(prob, lambda, mix, tol, max_sweeps, warm_start ? *warm_start : std::vector<double>{});
}

std::vector<LinearParams> elastic_net_path(const Matrix& X, std::span<const double> y,
                                           std::span<const double> lambdas, double mix, double tol,
                                           std::size_t max_sweeps) {
  const CdProblem prob = cd_problem(X, y);
  std::vector<LinearParams> out;
  out.reserve(lambdas.size());
  std::vector<double> b;
  for (double lambda : lambdas) {
    out.push_back(cd_solve(prob, lambda, mix, tol, max_sweeps, b));
    b = out.back().coef;
  }
  return out;
}

double lasso_lambda_max(const Matrix& X, std::span<const double> y) {
  const Centered c = center(X, y);
  double best = 0.0;
  for (std::size_t j = 0; j < c.p; ++j)
    best = std::max(best, std::fabs(kernels::dot(c.cols[j], c.y)) / static_cast<double>(c.n));
  return best;
}

double elastic_net_objective(const Matrix& X, std::span<const double> y, const LinearParams& p, double lambda,
                             double mix) {
  double sse = 0.0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double pred = p.intercept;
    for (std::size_t j = 0; j < X.cols(); ++j) pred += X(i, j) * p.coef[j];
    sse += (y[i] - pred) * (y[i] - pred);
  }
  double l1 = 0.0;
  double l2 = 0.0;
  for (double b : p.coef) {
    l1 += std::fabs(b);
    l2 += b * b;
  }
  return sse / (2.0 * static_cast<double>(X.rows())) + lambda * mix * l1 + 0.5 * lambda * (1.0 - mix) * l2;
}

}  // namespace covidprep::model
