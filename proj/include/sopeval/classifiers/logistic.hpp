#pragma once

#include <span>
#include <vector>

#include "sopeval/classifiers/labeled.hpp"

namespace sopeval::classifiers {

struct LrParams {
  double l2 = 1e-4;
  /// Step size; the starting step of the backtracking search when enabled.
  double learning_rate = 1.0;
  int max_iters = 5000;
  double tol = 1e-6;
  bool line_search = true;
  /// Starting point; zeros when empty.
  std::vector<double> initial_weights;
  double initial_bias = 0.0;
};

struct LrModel {
  std::vector<double> weights;
  double bias = 0.0;
  double l2 = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Objective before each update, then the final objective.
  std::vector<double> loss_history;

  std::size_t input_dimension() const noexcept { return weights.size(); }
  double decision_value(std::span<const double> x) const;
  /// P(accepted | x).
  double probability(std::span<const double> x) const;
};

struct LrObjective {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

/// Mean logistic loss over rows plus (l2 / 2) * ||w||^2 (bias unregularized).
LrObjective lr_objective(const LabeledMatrix& data, std::span<const double> weights, double bias, double l2);

/// ln(1 + e^-m), stable for large |m|.
double logistic_loss(double margin);
double sigmoid(double z);

/// Gradient descent on lr_objective until the gradient norm drops to tol.
LrModel train_lr(const LabeledMatrix& data, const LrParams& params);

}  // namespace sopeval::classifiers
