#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sopeval/classifiers/labeled.hpp"
#include "sopeval/matrix.hpp"

namespace sopeval::classifiers {

enum class NetVariant { mlp_split, ffnn_tuned };
enum class Activation { tanh, sigmoid };
enum class Optimizer { gd, adam };

std::string_view to_string(NetVariant v);
std::optional<NetVariant> parse_net_variant(std::string_view s);
std::string_view to_string(Activation a);
std::optional<Activation> parse_activation(std::string_view s);
std::string_view to_string(Optimizer o);
std::optional<Optimizer> parse_optimizer(std::string_view s);

struct NetParams {
  std::vector<int> hidden_sizes{32};
  Activation activation = Activation::tanh;
  double learning_rate = 0.01;
  int epochs = 500;
  /// Epochs without tune-loss improvement before ffnn_tuned stops.
  int patience = 25;
  double l2 = 0.0;
  Optimizer optimizer = Optimizer::adam;
  std::uint64_t seed = 0;
  NetVariant variant = NetVariant::mlp_split;
};

struct Layer {
  Matrix weights;  // out x in
  std::vector<double> bias;
};

struct NetModel {
  std::vector<Layer> layers;  // hidden layers, then the single-unit output layer
  Activation activation = Activation::tanh;
  NetVariant variant = NetVariant::mlp_split;
  NetParams params;
  std::vector<double> train_loss;  // per epoch, before the update
  std::vector<double> tune_loss;   // ffnn_tuned only
  int best_epoch = -1;             // ffnn_tuned only

  std::size_t input_dimension() const noexcept { return layers.front().weights.cols(); }
  /// Output logit; sigmoid of it is P(accepted).
  double decision_value(std::span<const double> x) const;

  std::size_t parameter_count() const;
  /// Layer by layer: weights row-major, then bias.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> values);
};

struct NetGradient {
  double loss = 0.0;
  std::vector<double> flat;  // same layout as NetModel::flatten
};

/// Xavier-uniform weights, zero biases.
NetModel init_net(std::size_t input_dimension, const NetParams& params);

/// Mean logistic loss of the output logit plus (l2 / 2) * sum of squared weights.
double net_loss(const NetModel& model, const LabeledMatrix& data, double l2);
NetGradient net_gradient(const NetModel& model, const LabeledMatrix& data, double l2);

/// Full-batch training. mlp_split returns the final-epoch parameters;
/// ffnn_tuned requires a non-empty tune set and returns the parameters with
/// the lowest tune loss, stopping after `patience` epochs without improvement.
NetModel train_net(const LabeledMatrix& train, const LabeledMatrix* tune, const NetParams& params);

}  // namespace sopeval::classifiers
