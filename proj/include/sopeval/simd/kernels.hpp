#pragma once

// Dense arithmetic kernels used by the classifiers and embedding features.
//
// Every kernel has a scalar reference implementation; AVX2+FMA (x86-64) and
// NEON (aarch64) variants are selected once at runtime. The free functions
// below dispatch to the active table. Set SOPEVAL_SIMD=scalar|avx2|neon to
// override the choice (unknown or unsupported values fall back to scalar).

#include <cstddef>
#include <span>
#include <string_view>

namespace sopeval::simd {

struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // float inputs, double accumulation
  double (*dot_f32)(const float* a, const float* b, std::size_t n);
  void (*accumulate_f32)(const float* x, double* acc, std::size_t n);
};

const KernelTable& scalar_kernels();
/// nullptr when the binary or the CPU lacks the instruction set.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// The table chosen for this process.
const KernelTable& active_kernels();

double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double dot(std::span<const float> a, std::span<const float> b);
/// acc += x
void accumulate(std::span<const float> x, std::span<double> acc);

}  // namespace sopeval::simd
