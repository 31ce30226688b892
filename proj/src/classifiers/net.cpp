#include "sopeval/classifiers/net.hpp"

#include <cmath>
#include <limits>

#include "sopeval/classifiers/logistic.hpp"
#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"
#include "sopeval/simd/kernels.hpp"

namespace sopeval::classifiers {
namespace {

double activate(Activation a, double z) { return a == Activation::tanh ? std::tanh(z) : sigmoid(z); }

// Derivative expressed through the activation's output.
double activate_grad(Activation a, double out) {
  return a == Activation::tanh ? 1.0 - out * out : out * (1.0 - out);
}

// Activations of every layer for one input; acts[0] is the input itself.
void forward(const NetModel& m, std::span<const double> x, std::vector<std::vector<double>>& acts) {
  acts.resize(m.layers.size() + 1);
  acts[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& layer = m.layers[l];
    auto& out = acts[l + 1];
    out.resize(layer.weights.rows());
    const bool last = l + 1 == m.layers.size();
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double z = simd::dot(layer.weights.row(o), acts[l]) + layer.bias[o];
      out[o] = last ? z : activate(m.activation, z);
    }
  }
}

double weight_penalty(const NetModel& m) {
  double s = 0.0;
  for (const auto& l : m.layers) s += simd::dot(l.weights.data(), l.weights.data());
  return s;
}

class Adam {
 public:
  explicit Adam(std::size_t n) : m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m_, v_;
  int t_ = 0;
};

}  // namespace

std::string_view to_string(NetVariant v) { return v == NetVariant::mlp_split ? "mlp_split" : "ffnn_tuned"; }

std::optional<NetVariant> parse_net_variant(std::string_view s) {
  if (s == "mlp_split") return NetVariant::mlp_split;
  if (s == "ffnn_tuned") return NetVariant::ffnn_tuned;
  return std::nullopt;
}

std::string_view to_string(Activation a) { return a == Activation::tanh ? "tanh" : "sigmoid"; }

std::optional<Activation> parse_activation(std::string_view s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "sigmoid") return Activation::sigmoid;
  return std::nullopt;
}

std::string_view to_string(Optimizer o) { return o == Optimizer::gd ? "gd" : "adam"; }

std::optional<Optimizer> parse_optimizer(std::string_view s) {
  if (s == "gd") return Optimizer::gd;
  if (s == "adam") return Optimizer::adam;
  return std::nullopt;
}

double NetModel::decision_value(std::span<const double> x) const {
  check_dimension(input_dimension(), x.size());
  std::vector<std::vector<double>> acts;
  forward(*this, x, acts);
  return acts.back()[0];
}

std::size_t NetModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.data().size() + l.bias.size();
  return n;
}

std::vector<double> NetModel::flatten() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers) {
    out.insert(out.end(), l.weights.data().begin(), l.weights.data().end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void NetModel::unflatten(std::span<const double> values) {
  if (values.size() != parameter_count()) throw Error("classifiers", "net: parameter vector has wrong length");
  std::size_t k = 0;
  for (auto& l : layers) {
    for (std::size_t r = 0; r < l.weights.rows(); ++r) {
      for (auto& w : l.weights.row(r)) w = values[k++];
    }
    for (auto& b : l.bias) b = values[k++];
  }
}

NetModel init_net(std::size_t input_dimension, const NetParams& params) {
  if (input_dimension == 0) throw Error("classifiers", "net: input dimension must be positive");
  NetModel m;
  m.activation = params.activation;
  m.variant = params.variant;
  m.params = params;
  Rng rng(params.seed);
  std::size_t in = input_dimension;
  std::vector<std::size_t> sizes;
  for (int h : params.hidden_sizes) {
    if (h < 1) throw Error("classifiers", "net: hidden layer sizes must be positive");
    sizes.push_back(static_cast<std::size_t>(h));
  }
  sizes.push_back(1);
  for (auto out : sizes) {
    Layer layer{Matrix(out, in), std::vector<double>(out, 0.0)};
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    for (std::size_t r = 0; r < out; ++r) {
      for (auto& w : layer.weights.row(r)) w = rng.uniform(-a, a);
    }
    m.layers.push_back(std::move(layer));
    in = out;
  }
  return m;
}

double net_loss(const NetModel& model, const LabeledMatrix& data, double l2) {
  std::vector<std::vector<double>> acts;
  double loss = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    forward(model, data.x.row(r), acts);
    loss += logistic_loss(data.y[r] * acts.back()[0]);
  }
  return loss / static_cast<double>(data.rows()) + 0.5 * l2 * weight_penalty(model);
}

NetGradient net_gradient(const NetModel& model, const LabeledMatrix& data, double l2) {
  check_dimension(model.input_dimension(), data.cols());
  const auto n_layers = model.layers.size();
  std::vector<Layer> grads;
  for (const auto& l : model.layers) {
    grads.push_back({Matrix(l.weights.rows(), l.weights.cols()), std::vector<double>(l.bias.size(), 0.0)});
  }
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev_delta;
  const double inv_n = 1.0 / static_cast<double>(data.rows());
  NetGradient out;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    forward(model, data.x.row(r), acts);
    const double y = data.y[r];
    const double m = y * acts.back()[0];
    out.loss += logistic_loss(m) * inv_n;
    delta.assign(1, -y * sigmoid(-m) * inv_n);
    for (std::size_t l = n_layers; l-- > 0;) {
      auto& g = grads[l];
      const auto& input = acts[l];
      for (std::size_t o = 0; o < delta.size(); ++o) {
        simd::axpy(delta[o], input, g.weights.row(o));
        g.bias[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(input.size(), 0.0);
      const auto& w = model.layers[l].weights;
      for (std::size_t o = 0; o < delta.size(); ++o) simd::axpy(delta[o], w.row(o), prev_delta);
      for (std::size_t i = 0; i < prev_delta.size(); ++i) {
        prev_delta[i] *= activate_grad(model.activation, input[i]);
      }
      delta.swap(prev_delta);
    }
  }
  out.loss += 0.5 * l2 * weight_penalty(model);
  out.flat.reserve(model.parameter_count());
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& w = model.layers[l].weights.data();
    const auto& gw = grads[l].weights.data();
    for (std::size_t i = 0; i < gw.size(); ++i) out.flat.push_back(gw[i] + l2 * w[i]);
    out.flat.insert(out.flat.end(), grads[l].bias.begin(), grads[l].bias.end());
  }
  return out;
}

NetModel train_net(const LabeledMatrix& train, const LabeledMatrix* tune, const NetParams& params) {
  validate_training_data(train, "net");
  if (params.epochs < 0) throw Error("classifiers", "net: epochs must be non-negative");
  if (!(params.learning_rate > 0)) throw Error("classifiers", "net: learning rate must be positive");
  const bool tuned = params.variant == NetVariant::ffnn_tuned;
  if (tuned) {
    if (!tune || tune->rows() == 0) throw Error("classifiers", "net: ffnn_tuned needs a non-empty tune set");
    if (tune->cols() != train.cols()) throw Error("classifiers", "net: tune set has a different feature count");
    if (params.patience < 1) throw Error("classifiers", "net: patience must be at least 1");
  }

  auto model = init_net(train.cols(), params);
  auto theta = model.flatten();
  Adam adam(theta.size());
  std::vector<double> best = theta;
  double best_tune = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    if (tuned) {
      const double tl = net_loss(model, *tune, params.l2);
      model.tune_loss.push_back(tl);
      if (tl < best_tune) {
        best_tune = tl;
        best = theta;
        model.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= params.patience) {
        break;
      }
    }
    const auto g = net_gradient(model, train, params.l2);
    model.train_loss.push_back(g.loss);
    if (params.optimizer == Optimizer::adam) {
      adam.step(theta, g.flat, params.learning_rate);
    } else {
      simd::axpy(-params.learning_rate, g.flat, theta);
    }
    model.unflatten(theta);
  }
  if (tuned) {
    const double tl = net_loss(model, *tune, params.l2);
    if (tl < best_tune) {
      best = theta;
      model.best_epoch = static_cast<int>(model.tune_loss.size());
    }
    model.tune_loss.push_back(tl);
    model.unflatten(best);
  }
  for (double v : model.flatten()) {
    if (!std::isfinite(v)) throw Error("classifiers", "net: training diverged (non-finite parameter)");
  }
  return model;
}

}  // namespace sopeval::classifiers
