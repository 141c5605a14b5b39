#include <Eigen/Dense>
#include <cmath>

#include "covidprep/select.hpp"

namespace covidprep::select {

std::vector<double> vif(const Matrix& X) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  std::vector<double> out(p, kInf);
  if (p == 0 || n <= p) return out;

  Eigen::MatrixXd all(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) all(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = X(i, j);

  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t j = 0; j < p; ++j) {
    const Eigen::VectorXd target = all.col(static_cast<Eigen::Index>(j));
    const double mean = target.mean();
    const double sst = (target.array() - mean).square().sum();
    if (!(sst > 0.0)) continue;

    design.col(0).setOnes();
    Eigen::Index c = 1;
    for (std::size_t k = 0; k < p; ++k)
      if (k != j) design.col(c++) = all.col(static_cast<Eigen::Index>(k));
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    const Eigen::VectorXd coef = qr.solve(target);
    const double sse = (target - design * coef).squaredNorm();
    const double r2 = std::max(0.0, 1.0 - sse / sst);
    if (r2 >= 1.0 - 1e-12) continue;
    out[j] = 1.0 / (1.0 - r2);
  }
  return out;
}

}  // namespace covidprep::select
