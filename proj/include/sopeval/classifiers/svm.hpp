#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <optional>
#include <vector>

#include "sopeval/classifiers/labeled.hpp"
#include "sopeval/matrix.hpp"

namespace sopeval::classifiers {

enum class KernelKind { rbf, linear };

std::string_view to_string(KernelKind kind);
std::optional<KernelKind> parse_kernel_kind(std::string_view s);

/// exp(-gamma * ||x - z||^2). Throws on a length mismatch or gamma <= 0.
double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma);
double linear_kernel(std::span<const double> x, std::span<const double> z);

struct Kernel {
  KernelKind kind = KernelKind::rbf;
  /// Non-positive means 1/d, resolved at training time.
  double gamma = 0.0;

  double operator()(std::span<const double> x, std::span<const double> z) const;
};

struct SvmParams {
  double c = 1.0;
  Kernel kernel;
  double tol = 1e-3;
  /// Iteration budget is max_passes * rows.
  int max_passes = 1000;
  std::uint64_t seed = 0;
};

struct SvmModel {
  Kernel kernel;  // gamma resolved
  double c = 1.0;
  double bias = 0.0;
  Matrix support_vectors;
  /// alpha_i * y_i per support vector.
  std::vector<double> coefficients;
  /// Training-row index of each support vector and its alpha.
  std::vector<std::size_t> support_indices;
  std::vector<double> alphas;
  bool converged = false;
  std::size_t iterations = 0;

  std::size_t input_dimension() const noexcept { return support_vectors.cols(); }
  double decision_value(std::span<const double> x) const;
};

/// Dual SVM trained by SMO with second-order working-set selection. On
/// convergence every row satisfies the KKT conditions within params.tol.
SvmModel train_svm(const LabeledMatrix& data, const SvmParams& params);

}  // namespace sopeval::classifiers
