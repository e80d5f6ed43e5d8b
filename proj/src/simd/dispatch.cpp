#include <atomic>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <string>

#include "qdgate/simd/kernels.hpp"

namespace qdgate::simd {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Scalar: return "scalar";
    case Variant::Avx2: return "avx2";
    case Variant::Neon: return "neon";
  }
  return "?";
}

bool available(Variant v) {
  switch (v) {
    case Variant::Scalar: return true;
    case Variant::Avx2:
#if defined(QDGATE_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Variant::Neon:
#if defined(QDGATE_HAVE_NEON_TU)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

KernelTable table(Variant v) {
  if (!available(v)) {
    throw std::runtime_error("SIMD variant '" + std::string(to_string(v)) +
                             "' is not available on this build/CPU");
  }
  switch (v) {
#if defined(QDGATE_HAVE_AVX2_TU)
    case Variant::Avx2: return {Variant::Avx2, &avx2::matvec, &avx2::axpy};
#endif
#if defined(QDGATE_HAVE_NEON_TU)
    case Variant::Neon: return {Variant::Neon, &neon::matvec, &neon::axpy};
#endif
    default: return {Variant::Scalar, &scalar::matvec, &scalar::axpy};
  }
}

namespace {

Variant detect() {
  if (const char* env = std::getenv("QDGATE_SIMD")) {
    const std::string_view want(env);
    for (Variant v : {Variant::Scalar, Variant::Avx2, Variant::Neon}) {
      if (want == to_string(v) && available(v)) return v;
    }
  }
  if (available(Variant::Avx2)) return Variant::Avx2;
  if (available(Variant::Neon)) return Variant::Neon;
  return Variant::Scalar;
}

std::once_flag g_once;
KernelTable g_table{Variant::Scalar, &scalar::matvec, &scalar::axpy};
std::atomic<bool> g_forced{false};

}  // namespace

const KernelTable& active() {
  std::call_once(g_once, [] {
    if (!g_forced.load()) g_table = table(detect());
  });
  return g_table;
}

void force_variant(Variant v) {
  std::call_once(g_once, [] {});
  g_forced.store(true);
  g_table = table(v);
}

}  // namespace qdgate::simd
