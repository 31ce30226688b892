#include "sopeval/classifiers/logistic.hpp"

#include <cmath>

#include "sopeval/error.hpp"
#include "sopeval/simd/kernels.hpp"

namespace sopeval::classifiers {

double logistic_loss(double margin) {
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LrModel::decision_value(std::span<const double> x) const {
  check_dimension(weights.size(), x.size());
  return simd::dot(weights, x) + bias;
}

double LrModel::probability(std::span<const double> x) const { return sigmoid(decision_value(x)); }

LrObjective lr_objective(const LabeledMatrix& data, std::span<const double> weights, double bias, double l2) {
  check_dimension(data.cols(), weights.size());
  LrObjective obj;
  obj.grad_weights.assign(weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    const auto x = data.x.row(r);
    const double y = data.y[r];
    const double m = y * (simd::dot(weights, x) + bias);
    obj.loss += logistic_loss(m) * inv_n;
    // d/dz ln(1 + e^{-yz}) = -y * sigmoid(-yz)
    const double g = -y * sigmoid(-m) * inv_n;
    simd::axpy(g, x, obj.grad_weights);
    obj.grad_bias += g;
  }
  obj.loss += 0.5 * l2 * simd::dot(weights, weights);
  simd::axpy(l2, weights, obj.grad_weights);
  return obj;
}

LrModel train_lr(const LabeledMatrix& data, const LrParams& params) {
  validate_training_data(data, "lr");
  if (params.l2 < 0) throw Error("classifiers", "lr: l2 must be non-negative");
  if (!(params.learning_rate > 0)) throw Error("classifiers", "lr: learning rate must be positive");
  if (params.max_iters < 0) throw Error("classifiers", "lr: max_iters must be non-negative");

  LrModel model;
  model.l2 = params.l2;
  model.weights = params.initial_weights;
  if (model.weights.empty()) model.weights.assign(data.cols(), 0.0);
  check_dimension(data.cols(), model.weights.size());
  model.bias = params.initial_bias;

  auto obj = lr_objective(data, model.weights, model.bias, params.l2);
  std::vector<double> trial(model.weights.size());
  for (; model.iterations < params.max_iters; ++model.iterations) {
    const double gnorm2 = simd::dot(obj.grad_weights, obj.grad_weights) + obj.grad_bias * obj.grad_bias;
    if (std::sqrt(gnorm2) <= params.tol) {
      model.converged = true;
      break;
    }
    model.loss_history.push_back(obj.loss);
    double step = params.learning_rate;
    for (;;) {
      trial = model.weights;
      simd::axpy(-step, obj.grad_weights, trial);
      const double trial_bias = model.bias - step * obj.grad_bias;
      auto next = lr_objective(data, trial, trial_bias, params.l2);
      // Armijo condition; without line search the first step is taken.
      if (!params.line_search || next.loss <= obj.loss - 0.5 * step * gnorm2 || step < 1e-12) {
        model.weights.swap(trial);
        model.bias = trial_bias;
        obj = std::move(next);
        break;
      }
      step *= 0.5;
    }
  }
  if (!model.converged) {
    const double gnorm2 = simd::dot(obj.grad_weights, obj.grad_weights) + obj.grad_bias * obj.grad_bias;
    model.converged = std::sqrt(gnorm2) <= params.tol;
  }
  model.loss_history.push_back(obj.loss);
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw Error("classifiers", "lr: training diverged (non-finite weight)");
  }
  return model;
}

}  // namespace sopeval::classifiers
