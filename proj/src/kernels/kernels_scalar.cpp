#include <cmath>

#include "covidprep/kernels.hpp"

namespace covidprep::kernels::scalar {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void max_norm_distances(const double* xs, const double* ys, double x0, double y0, double* out,
                        std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double dx = std::fabs(xs[j] - x0);
    double dy = std::fabs(ys[j] - y0);
    out[j] = dx > dy ? dx : dy;
  }
}

std::size_t count_within(const double* xs, double center, double radius, std::size_t n) {
  std::size_t c = 0;
  for (std::size_t j = 0; j < n; ++j) c += std::fabs(xs[j] - center) < radius ? 1 : 0;
  return c;
}

double sum(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

}  // namespace

const KernelTable kTable{dot, axpy, squared_distance, max_norm_distances, count_within, sum};

}  // namespace covidprep::kernels::scalar
