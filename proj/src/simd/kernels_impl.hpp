#pragma once

#include <cstddef>

namespace sopeval::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double dot_f32_scalar(const float* a, const float* b, std::size_t n);
void accumulate_f32_scalar(const float* x, double* acc, std::size_t n);

#if defined(SOPEVAL_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double dot_f32_avx2(const float* a, const float* b, std::size_t n);
void accumulate_f32_avx2(const float* x, double* acc, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* a, const double* b, std::size_t n);
double squared_distance_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double dot_f32_neon(const float* a, const float* b, std::size_t n);
void accumulate_f32_neon(const float* x, double* acc, std::size_t n);
#endif

}  // namespace sopeval::simd::detail
