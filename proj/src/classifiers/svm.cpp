#include "sopeval/classifiers/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"
#include "sopeval/simd/kernels.hpp"

namespace sopeval::classifiers {
namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kMaxCachedRows = 4000;

// Kernel rows, cached in full for corpus-sized problems.
class KernelMatrix {
 public:
  KernelMatrix(const Matrix& x, const Kernel& kernel) : x_(x), kernel_(kernel), n_(x.rows()) {
    diag_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) diag_[i] = kernel_(x_.row(i), x_.row(i));
    if (n_ <= kMaxCachedRows) {
      full_.resize(n_ * n_);
      for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          full_[i * n_ + j] = full_[j * n_ + i] = i == j ? diag_[i] : kernel_(x_.row(i), x_.row(j));
        }
      }
    }
  }

  double diag(std::size_t i) const { return diag_[i]; }

  /// Row i, from the cache or computed into buf.
  std::span<const double> row(std::size_t i, std::vector<double>& buf) const {
    if (!full_.empty()) return {full_.data() + i * n_, n_};
    buf.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) buf[j] = kernel_(x_.row(i), x_.row(j));
    return buf;
  }

 private:
  const Matrix& x_;
  Kernel kernel_;
  std::size_t n_;
  std::vector<double> diag_;
  std::vector<double> full_;
};

}  // namespace

std::string_view to_string(KernelKind kind) { return kind == KernelKind::rbf ? "rbf" : "linear"; }

std::optional<KernelKind> parse_kernel_kind(std::string_view s) {
  if (s == "rbf") return KernelKind::rbf;
  if (s == "linear") return KernelKind::linear;
  return std::nullopt;
}

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (!(gamma > 0.0)) throw Error("classifiers", "rbf gamma must be positive");
  if (x.size() != z.size()) {
    throw Error("classifiers", "rbf kernel on vectors of length " + std::to_string(x.size()) + " and " +
                                   std::to_string(z.size()));
  }
  return std::exp(-gamma * simd::squared_distance(x, z));
}

double linear_kernel(std::span<const double> x, std::span<const double> z) {
  if (x.size() != z.size()) {
    throw Error("classifiers", "linear kernel on vectors of length " + std::to_string(x.size()) + " and " +
                                   std::to_string(z.size()));
  }
  return simd::dot(x, z);
}

double Kernel::operator()(std::span<const double> x, std::span<const double> z) const {
  return kind == KernelKind::rbf ? rbf_kernel(x, z, gamma) : linear_kernel(x, z);
}

double SvmModel::decision_value(std::span<const double> x) const {
  check_dimension(input_dimension(), x.size());
  double f = bias;
  for (std::size_t i = 0; i < coefficients.size(); ++i) f += coefficients[i] * kernel(support_vectors.row(i), x);
  return f;
}

SvmModel train_svm(const LabeledMatrix& data, const SvmParams& params) {
  validate_training_data(data, "svm");
  if (!(params.c > 0.0)) throw Error("classifiers", "svm: C must be positive");
  if (!(params.tol > 0.0)) throw Error("classifiers", "svm: tol must be positive");
  if (params.max_passes < 1) throw Error("classifiers", "svm: max_passes must be at least 1");

  const std::size_t n = data.rows();
  SvmModel model;
  model.c = params.c;
  model.kernel = params.kernel;
  if (model.kernel.kind == KernelKind::rbf && !(model.kernel.gamma > 0.0)) {
    model.kernel.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(1, data.cols()));
  }

  // Seeded row order; ties in working-set selection go to the earliest row.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(params.seed);
  rng.shuffle(std::span(order));
  const Matrix x = data.x.select_rows(order);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.y[order[i]];

  KernelMatrix k(x, model.kernel);
  const double c = params.c;
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of 0.5 a'Qa - e'a

  auto in_up = [&](std::size_t t) { return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0); };
  auto in_low = [&](std::size_t t) { return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c); };

  std::vector<double> buf_i, buf_j;
  const std::size_t max_iter = static_cast<std::size_t>(params.max_passes) * n;
  std::size_t iter = 0;
  for (; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * grad[t] > gmax) {
        gmax = -y[t] * grad[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t j = n;
    double best_obj = std::numeric_limits<double>::infinity();
    if (i < n) {
      const auto ki = k.row(i, buf_i);
      for (std::size_t t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        gmax2 = std::max(gmax2, y[t] * grad[t]);
        const double diff = gmax + y[t] * grad[t];
        if (diff <= 0) continue;
        double quad = k.diag(i) + k.diag(t) - 2.0 * ki[t];
        if (quad <= 0) quad = kTau;
        const double obj = -diff * diff / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (i == n || j == n || gmax + gmax2 < params.tol) break;

    const auto ki = k.row(i, buf_i);
    const auto kj = k.row(j, buf_j);
    const double kij = ki[j];
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double quad = k.diag(i) + k.diag(j) - 2.0 * kij;
    if (quad <= 0) quad = kTau;
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    // Q_ti = y_t y_i K_ti
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
  }
  model.iterations = iter;
  model.converged = iter < max_iter;

  // Bias from the free vectors, or the middle of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      free_sum += yg;
    }
  }
  const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.bias = -rho;

  std::vector<std::size_t> sv;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) sv.push_back(t);
  }
  // Report support vectors in original row order.
  std::sort(sv.begin(), sv.end(), [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
  model.support_vectors = x.select_rows(sv);
  for (auto t : sv) {
    model.coefficients.push_back(alpha[t] * y[t]);
    model.alphas.push_back(alpha[t]);
    model.support_indices.push_back(order[t]);
  }
  return model;
}

}  // namespace sopeval::classifiers
