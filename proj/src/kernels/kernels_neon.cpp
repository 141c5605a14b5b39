#include <arm_neon.h>

#include <cmath>

#include "covidprep/kernels.hpp"

namespace covidprep::kernels::neon {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void max_norm_distances(const double* xs, const double* ys, double x0, double y0, double* out,
                        std::size_t n) {
  const float64x2_t vx0 = vdupq_n_f64(x0);
  const float64x2_t vy0 = vdupq_n_f64(y0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    float64x2_t dx = vabdq_f64(vld1q_f64(xs + j), vx0);
    float64x2_t dy = vabdq_f64(vld1q_f64(ys + j), vy0);
    vst1q_f64(out + j, vmaxq_f64(dx, dy));
  }
  for (; j < n; ++j) {
    double dx = std::fabs(xs[j] - x0);
    double dy = std::fabs(ys[j] - y0);
    out[j] = dx > dy ? dx : dy;
  }
}

std::size_t count_within(const double* xs, double center, double radius, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(center);
  const float64x2_t vr = vdupq_n_f64(radius);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    uint64x2_t lt = vcltq_f64(vabdq_f64(vld1q_f64(xs + j), vc), vr);
    acc = vsubq_u64(acc, vreinterpretq_u64_s64(vreinterpretq_s64_u64(lt)));  // all-ones == -1
  }
  std::size_t c = static_cast<std::size_t>(vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1));
  for (; j < n; ++j) c += std::fabs(xs[j] - center) < radius ? 1 : 0;
  return c;
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

}  // namespace

const KernelTable kTable{dot, axpy, squared_distance, max_norm_distances, count_within, sum};

}  // namespace covidprep::kernels::neon
