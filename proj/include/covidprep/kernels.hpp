#pragma once

// Data-parallel inner loops shared by the numeric modules.
//
// Every kernel has a scalar reference implementation plus SIMD variants
// (AVX2+FMA on x86-64, NEON on AArch64). The variant is chosen once at
// startup from the running CPU; COVIDPREP_ISA=scalar in the environment
// forces the reference path. Reductions in the SIMD variants use a
// different summation order than the scalar loop, so they agree to
// rounding, not bit-for-bit. Comparison/count kernels agree exactly.

#include <cstddef>
#include <span>
#include <string_view>

namespace covidprep::kernels {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // out[j] = max(|xs[j] - x0|, |ys[j] - y0|)
  void (*max_norm_distances)(const double* xs, const double* ys, double x0, double y0, double* out,
                             std::size_t n);
  // number of j with |xs[j] - center| < radius
  std::size_t (*count_within)(const double* xs, double center, double radius, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
};

bool isa_available(Isa isa) noexcept;
std::string_view isa_name(Isa isa) noexcept;
Isa active_isa() noexcept;
const KernelTable& table(Isa isa);
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}
inline void max_norm_distances(std::span<const double> xs, std::span<const double> ys, double x0, double y0,
                               std::span<double> out) {
  active().max_norm_distances(xs.data(), ys.data(), x0, y0, out.data(), xs.size());
}
inline std::size_t count_within(std::span<const double> xs, double center, double radius) {
  return active().count_within(xs.data(), center, radius, xs.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

namespace scalar {
extern const KernelTable kTable;
}
namespace avx2 {
extern const KernelTable kTable;
}
namespace neon {
extern const KernelTable kTable;
}

}  // namespace covidprep::kernels
