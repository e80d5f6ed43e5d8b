#pragma once

// Dense real kernels behind the Lindblad right-hand side.
//
// Every kernel has a portable scalar reference and, where the build target
// allows it, a vectorized variant (AVX2+FMA on x86-64, NEON on AArch64). The
// variant is picked once at first use from CPU feature detection; the
// QDGATE_SIMD environment variable ("scalar", "avx2", "neon") or
// force_variant() overrides the choice.

#include <cstddef>
#include <string_view>

namespace qdgate::simd {

enum class Variant { Scalar, Avx2, Neon };

std::string_view to_string(Variant v);

/// y = A x with A row-major n x n.
using MatVecFn = void (*)(const double* a, const double* x, double* y, std::size_t n);
/// y += alpha x
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);

struct KernelTable {
  Variant variant;
  MatVecFn matvec;
  AxpyFn axpy;
};

namespace scalar {
void matvec(const double* a, const double* x, double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(QDGATE_HAVE_AVX2_TU)
namespace avx2 {
void matvec(const double* a, const double* x, double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

#if defined(QDGATE_HAVE_NEON_TU)
namespace neon {
void matvec(const double* a, const double* x, double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon
#endif

/// True when the variant was compiled in and the CPU supports it.
bool available(Variant v);
/// Kernel table for a specific variant; throws if unavailable.
KernelTable table(Variant v);
/// The table currently used by the library.
const KernelTable& active();
/// Override the runtime selection (tests, benchmarking).
void force_variant(Variant v);

inline void matvec(const double* a, const double* x, double* y, std::size_t n) {
  active().matvec(a, x, y, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}

}  // namespace qdgate::simd
