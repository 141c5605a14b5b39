#include "covidprep/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace covidprep::kernels {

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(COVIDPREP_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(COVIDPREP_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

namespace {

Isa detect() noexcept {
  if (const char* forced = std::getenv("COVIDPREP_ISA"); forced && std::strcmp(forced, "scalar") == 0) {
    return Isa::Scalar;
  }
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() noexcept {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& table(Isa isa) {
  if (!isa_available(isa)) return scalar::kTable;
  switch (isa) {
#if defined(COVIDPREP_HAVE_AVX2)
    case Isa::Avx2: return avx2::kTable;
#endif
#if defined(COVIDPREP_HAVE_NEON)
    case Isa::Neon: return neon::kTable;
#endif
    default: return scalar::kTable;
  }
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace covidprep::kernels
