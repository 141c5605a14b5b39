// Compiled with -mavx2 -mfma; only reached when the CPU reports both.
#include <immintrin.h>

#include <cmath>

#include "covidprep/kernels.hpp"

namespace covidprep::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void max_norm_distances(const double* xs, const double* ys, double x0, double y0, double* out,
                        std::size_t n) {
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vy0 = _mm256_set1_pd(y0);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d dx = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + j), vx0));
    __m256d dy = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(ys + j), vy0));
    _mm256_storeu_pd(out + j, _mm256_max_pd(dx, dy));
  }
  for (; j < n; ++j) {
    double dx = std::fabs(xs[j] - x0);
    double dy = std::fabs(ys[j] - y0);
    out[j] = dx > dy ? dx : dy;
  }
}

std::size_t count_within(const double* xs, double center, double radius, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d vr = _mm256_set1_pd(radius);
  std::size_t c = 0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d d = abs_pd(_mm256_sub_pd(_mm256_loadu_pd(xs + j), vc));
    int mask = _mm256_movemask_pd(_mm256_cmp_pd(d, vr, _CMP_LT_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  for (; j < n; ++j) c += std::fabs(xs[j] - center) < radius ? 1 : 0;
  return c;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

}  // namespace

const KernelTable kTable{dot, axpy, squared_distance, max_norm_distances, count_within, sum};

}  // namespace covidprep::kernels::avx2
