#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "sopeval/error.hpp"
#include "sopeval/simd/kernels.hpp"

namespace sopeval::simd {
namespace {

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error("simd", "length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

const KernelTable& choose() {
  const char* env = std::getenv("SOPEVAL_SIMD");
  const std::string wanted = env ? env : "auto";
  if (wanted == "scalar") return scalar_kernels();
  if (wanted == "avx2" || wanted == "auto") {
    if (const auto* t = avx2_kernels()) return *t;
  }
  if (wanted == "neon" || wanted == "auto") {
    if (const auto* t = neon_kernels()) return *t;
  }
  return scalar_kernels();
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",
                                 detail::dot_scalar,
                                 detail::squared_distance_scalar,
                                 detail::axpy_scalar,
                                 detail::dot_f32_scalar,
                                 detail::accumulate_f32_scalar};
  return table;
}

const KernelTable* avx2_kernels() {
#if defined(SOPEVAL_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  static const KernelTable table{"avx2",
                                 detail::dot_avx2,
                                 detail::squared_distance_avx2,
                                 detail::axpy_avx2,
                                 detail::dot_f32_avx2,
                                 detail::accumulate_f32_avx2};
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(__aarch64__)
  // Advanced SIMD is mandatory on aarch64.
  static const KernelTable table{"neon",
                                 detail::dot_neon,
                                 detail::squared_distance_neon,
                                 detail::axpy_neon,
                                 detail::dot_f32_neon,
                                 detail::accumulate_f32_neon};
  return &table;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = choose();
  return table;
}

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active_kernels().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size());
  return active_kernels().squared_distance(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size());
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

double dot(std::span<const float> a, std::span<const float> b) {
  check_sizes(a.size(), b.size());
  return active_kernels().dot_f32(a.data(), b.data(), a.size());
}

void accumulate(std::span<const float> x, std::span<double> acc) {
  check_sizes(x.size(), acc.size());
  active_kernels().accumulate_f32(x.data(), acc.data(), x.size());
}

}  // namespace sopeval::simd
