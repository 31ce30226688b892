#include <cmath>
#include <thread>
#include <vector>

#include "doctest.h"
#include "sopeval/classifiers.hpp"
#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"
#include "support.hpp"

using namespace sopeval;
using namespace sopeval::classifiers;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

LabeledMatrix one_d_symmetric() {
  LabeledMatrix d;
  d.x = Matrix::from_rows({{-1}, {1}});
  d.y = {-1, 1};
  return d;
}

}  // namespace

// ---------------------------------------------------------------- kernels

TEST_CASE("rbf kernel values") {
  const std::vector<double> x{0.3, -1.2, 4.0};
  CHECK(rbf_kernel(x, x, 0.7) == 1.0);
  const std::vector<double> a{0, 0}, b{1, 0};
  CHECK(rbf_kernel(a, b, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  const std::vector<double> short_vec{1};
  CHECK_THROWS_AS(rbf_kernel(a, short_vec, 1.0), Error);
  CHECK_THROWS_AS(rbf_kernel(a, b, 0.0), Error);
  CHECK(linear_kernel(x, x) == doctest::Approx(0.09 + 1.44 + 16.0));
}

TEST_CASE("rbf kernel symmetry on random pairs") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto x = random_vector(rng, 5), z = random_vector(rng, 5);
    const double g = rng.uniform(0.01, 2.0);
    CHECK(rbf_kernel(x, z, g) == rbf_kernel(z, x, g));
  }
}

// ---------------------------------------------------------------- SVM

TEST_CASE("svm: XOR with RBF gamma 1, C 10") {
  const auto data = testing::xor_data();
  SvmParams p;
  p.c = 10;
  p.kernel = {KernelKind::rbf, 1.0};
  const auto m = train_svm(data, p);
  CHECK(testing::training_accuracy(m, data) == 1.0);
  CHECK(m.converged);
}

TEST_CASE("svm: linear kernel on 20 separable points") {
  // blobs at +-3 with spread 0.3 are separated by a margin well above 1
  const auto data = testing::blobs(20, 2, 6.0, 4, 0.3);
  SvmParams p;
  p.kernel = {KernelKind::linear, 0.0};
  const auto m = train_svm(data, p);
  CHECK(testing::training_accuracy(m, data) == 1.0);
  CHECK(std::abs(testing::sum_alpha_y(m, data)) <= 1e-6);
  CHECK(testing::kkt_violation(m, data) <= p.tol);
}

TEST_CASE("svm: invariants on overlapping blobs") {
  const auto data = testing::blobs(80, 3, 1.5, 8);
  SvmParams p;
  p.c = 2.0;
  p.seed = 5;
  const auto m = train_svm(data, p);
  CHECK(m.converged);
  CHECK(testing::kkt_violation(m, data) <= p.tol);
  CHECK(std::abs(testing::sum_alpha_y(m, data)) <= 1e-6);
  CHECK(m.kernel.gamma == doctest::Approx(1.0 / 3.0));
  for (std::size_t k = 0; k < m.alphas.size(); ++k) {
    CHECK(m.alphas[k] > 0.0);
    CHECK(m.alphas[k] <= p.c);
    CHECK(m.coefficients[k] == m.alphas[k] * data.y[m.support_indices[k]]);
    // free support vectors sit on the margin
    if (m.alphas[k] < p.c) {
      const auto i = m.support_indices[k];
      CHECK(std::abs(m.decision_value(data.x.row(i)) - data.y[i]) <= p.tol);
    }
  }
}

TEST_CASE("svm: deterministic for a fixed seed") {
  const auto data = testing::blobs(60, 4, 1.0, 2);
  SvmParams p;
  p.seed = 9;
  const auto a = train_svm(data, p);
  const auto b = train_svm(data, p);
  CHECK(a.alphas == b.alphas);
  CHECK(a.bias == b.bias);
}

TEST_CASE("svm: training errors") {
  auto single = testing::blobs(10, 2, 2.0, 1);
  for (int& y : single.y) y = 1;
  CHECK_THROWS_WITH_AS(train_svm(single, {}), doctest::Contains("both classes"), Error);
  auto bad = testing::blobs(10, 2, 2.0, 1);
  bad.x(3, 1) = std::nan("");
  CHECK_THROWS_AS(train_svm(bad, {}), Error);
  SvmParams zero_c;
  zero_c.c = 0;
  CHECK_THROWS_AS(train_svm(testing::blobs(10, 2, 2.0, 1), zero_c), Error);
  const auto m = train_svm(testing::blobs(10, 2, 2.0, 1), {});
  const std::vector<double> wrong{1, 2, 3};
  CHECK_THROWS_AS(m.decision_value(wrong), Error);
}

// ---------------------------------------------------------------- LR

TEST_CASE("lr: symmetric 1D data") {
  LrParams p;
  p.l2 = 1.0;
  const auto m = train_lr(one_d_symmetric(), p);
  CHECK(m.weights[0] > 0);
  CHECK(std::abs(m.bias) < 1e-9);
  const std::vector<double> mid{0.0};
  CHECK(m.probability(mid) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.converged);
}

TEST_CASE("lr: probability at decision value 0 is one half") {
  LrModel m;
  m.weights = {2.0, -1.0};
  m.bias = 0.0;
  const std::vector<double> x{1.0, 2.0};
  CHECK(m.decision_value(x) == 0.0);
  CHECK(m.probability(x) == 0.5);
  CHECK(sigmoid(0) == 0.5);
  CHECK(logistic_loss(0) == doctest::Approx(std::log(2.0)));
  CHECK(logistic_loss(-800) == doctest::Approx(800.0));
  CHECK(std::isfinite(logistic_loss(800)));
}

TEST_CASE("lr: analytic gradient matches central differences at 10 points") {
  const auto data = testing::blobs(30, 4, 1.0, 12);
  Rng rng(21);
  for (int point = 0; point < 10; ++point) {
    auto theta = random_vector(rng, 5);
    const double l2 = 0.1;
    auto loss = [&](const std::vector<double>& t) {
      return lr_objective(data, std::span(t).first(4), t[4], l2).loss;
    };
    const auto obj = lr_objective(data, std::span(theta).first(4), theta[4], l2);
    auto analytic = obj.grad_weights;
    analytic.push_back(obj.grad_bias);
    CHECK(testing::gradient_check(loss, theta, analytic) < 1e-4);
  }
}

TEST_CASE("lr: stops on the gradient norm and records the loss") {
  const auto data = testing::blobs(40, 3, 1.0, 3);
  LrParams p;
  p.tol = 1e-6;
  const auto m = train_lr(data, p);
  CHECK(m.converged);
  const auto obj = lr_objective(data, m.weights, m.bias, p.l2);
  double g2 = obj.grad_bias * obj.grad_bias;
  for (double g : obj.grad_weights) g2 += g * g;
  CHECK(std::sqrt(g2) <= p.tol);
  CHECK(m.loss_history.size() == std::size_t(m.iterations) + 1);
  for (std::size_t i = 1; i < m.loss_history.size(); ++i) CHECK(m.loss_history[i] <= m.loss_history[i - 1]);

  LrParams capped;
  capped.max_iters = 2;
  capped.tol = 0;
  const auto c = train_lr(data, capped);
  CHECK_FALSE(c.converged);
  CHECK(c.iterations == 2);
}

// ---------------------------------------------------------------- forest

TEST_CASE("forest: gini impurity") {
  CHECK(gini(5, 0) == 0.0);
  CHECK(gini(0, 3) == 0.0);
  CHECK(gini(2, 2) == 0.5);
  CHECK(gini(1, 3) == doctest::Approx(0.375));
}

TEST_CASE("forest: a single unpruned tree memorizes distinct points") {
  const auto data = testing::blobs(10, 3, 0.5, 6);
  ForestParams p;
  p.n_trees = 1;
  p.bootstrap = false;
  const auto m = train_rfdt(data, p);
  CHECK(testing::training_accuracy(m, data) == 1.0);
  for (const auto& node : m.trees[0].nodes)
    if (node.is_leaf()) CHECK(node.n_accepted + node.n_rejected >= 1);
}

TEST_CASE("forest: a pure node stays a leaf") {
  LabeledMatrix data;
  data.x = Matrix::from_rows({{1, 2}, {3, 4}, {5, 6}, {7, 8}});
  data.y = {1, 1, 1, 1};
  const std::vector<std::size_t> rows{0, 1, 2, 3};
  const auto tree = grow_tree(data, rows, 2, 0, 1);
  CHECK(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].is_leaf());
  CHECK(tree.nodes[0].label == 1);
}

TEST_CASE("forest: 50 trees on two blobs generalize") {
  const auto all = testing::blobs(200, 4, 3.0, 13);
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < all.rows(); ++i) (i % 4 == 0 ? test_idx : train_idx).push_back(i);
  ForestParams p;
  p.n_trees = 50;
  p.seed = 4;
  const auto m = train_rfdt(all.select(train_idx), p);
  CHECK(testing::training_accuracy(m, all.select(test_idx)) >= 0.95);
}

TEST_CASE("forest: an even split vote is rejected") {
  DecisionTree yes, no;
  yes.nodes = {TreeNode{.label = 1, .n_accepted = 1}};
  no.nodes = {TreeNode{.label = -1, .n_rejected = 1}};
  ForestModel m;
  m.trees = {yes, no};
  m.dimension = 1;
  const std::vector<double> x{0.0};
  CHECK(m.decision_value(x) == 0.0);
  CHECK(predict(Classifier(m), x) == Label::rejected);
  CHECK(label_for(0.0) == Label::rejected);
  CHECK(label_for(1e-300) == Label::accepted);
}

TEST_CASE("forest: max_depth is honoured and training is deterministic") {
  const auto data = testing::blobs(60, 3, 1.0, 5);
  ForestParams p;
  p.n_trees = 5;
  p.max_depth = 2;
  p.seed = 8;
  const auto a = train_rfdt(data, p);
  for (const auto& t : a.trees) CHECK(t.depth() <= 2);
  const auto b = train_rfdt(data, p);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto x = random_vector(rng, 3);
    CHECK(a.decision_value(x) == b.decision_value(x));
  }
}

// ---------------------------------------------------------------- nets

TEST_CASE("net: backprop matches central differences on a 2-4-1 net") {
  LabeledMatrix data = testing::blobs(12, 2, 1.0, 14);
  for (auto activation : {Activation::tanh, Activation::sigmoid}) {
    NetParams p;
    p.hidden_sizes = {4};
    p.activation = activation;
    Rng rng(33);
    for (int point = 0; point < 10; ++point) {
      auto model = init_net(2, p);
      auto theta = random_vector(rng, model.parameter_count());
      model.unflatten(theta);
      const double l2 = 0.05;
      auto loss = [&](const std::vector<double>& t) {
        auto m = model;
        m.unflatten(t);
        return net_loss(m, data, l2);
      };
      const auto g = net_gradient(model, data, l2);
      CHECK(g.loss == doctest::Approx(net_loss(model, data, l2)).epsilon(1e-12));
      CHECK(testing::gradient_check(loss, theta, g.flat) < 1e-4);
    }
  }
}

TEST_CASE("net: zero hidden layers track logistic regression") {
  const auto data = testing::blobs(30, 3, 1.0, 15);
  NetParams np;
  np.hidden_sizes = {};
  np.optimizer = Optimizer::gd;
  np.learning_rate = 0.2;
  np.epochs = 200;
  np.l2 = 0.01;
  np.seed = 3;
  const auto init = init_net(3, np);
  const auto net = train_net(data, nullptr, np);

  LrParams lp;
  lp.l2 = np.l2;
  lp.learning_rate = np.learning_rate;
  lp.line_search = false;
  lp.max_iters = np.epochs;
  lp.tol = 0.0;
  const auto& w = init.layers[0].weights;
  lp.initial_weights.assign(w.row(0).begin(), w.row(0).end());
  lp.initial_bias = init.layers[0].bias[0];
  const auto lr = train_lr(data, lp);

  REQUIRE(net.train_loss.size() == std::size_t(np.epochs));
  REQUIRE(lr.loss_history.size() >= std::size_t(np.epochs));
  for (int e = 0; e < np.epochs; ++e) CHECK(std::abs(net.train_loss[e] - lr.loss_history[e]) <= 1e-6);
  const std::vector<double> x{0.2, -0.4, 1.0};
  CHECK(std::abs(net.decision_value(x) - lr.decision_value(x)) <= 1e-6);
}

TEST_CASE("net: XOR with 4 hidden units for at least one of 5 seeds") {
  const auto data = testing::xor_data();
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    NetParams p;
    p.hidden_sizes = {4};
    p.epochs = 5000;
    p.learning_rate = 0.05;
    p.seed = seed;
    const auto m = train_net(data, nullptr, p);
    solved += testing::training_accuracy(m, data) == 1.0;
  }
  CHECK(solved >= 1);
}

TEST_CASE("net: ffnn variant needs a tune set and keeps its best epoch") {
  const auto train = testing::blobs(40, 3, 1.0, 16);
  const auto tune = testing::blobs(20, 3, 1.0, 17);
  NetParams p;
  p.variant = NetVariant::ffnn_tuned;
  p.epochs = 300;
  p.patience = 10;
  CHECK_THROWS_AS(train_net(train, nullptr, p), Error);
  LabeledMatrix empty;
  empty.x = Matrix(0, 3);
  CHECK_THROWS_AS(train_net(train, &empty, p), Error);

  const auto m = train_net(train, &tune, p);
  REQUIRE(m.best_epoch >= 0);
  const double best = *std::min_element(m.tune_loss.begin(), m.tune_loss.end());
  CHECK(net_loss(m, tune, p.l2) == doctest::Approx(best).epsilon(1e-12));
  CHECK(m.tune_loss[m.best_epoch] == best);
}

TEST_CASE("net: mlp keeps the final epoch and is deterministic") {
  const auto train = testing::blobs(40, 3, 1.0, 18);
  NetParams p;
  p.epochs = 50;
  p.seed = 2;
  const auto a = train_net(train, nullptr, p);
  const auto b = train_net(train, nullptr, p);
  CHECK(a.flatten() == b.flatten());
  CHECK(a.train_loss.size() == 50);
  CHECK(a.train_loss.back() < a.train_loss.front());
}

// ---------------------------------------------------------------- shared contract

TEST_CASE("label symmetry: flipping training labels flips every prediction") {
  const auto data = testing::blobs(60, 3, 1.5, 19);
  const auto flipped = testing::flip_labels(data);
  std::vector<ClassifierSpec> specs(3);
  specs[0].kind = ModelKind::svm;
  specs[1].kind = ModelKind::lr;
  specs[2].kind = ModelKind::rfdt;
  specs[2].forest.n_trees = 31;  // odd, so no vote ties
  for (auto& spec : specs) {
    spec.set_seed(6);
    CAPTURE(to_string(spec.kind));
    const auto a = fit_classifier(spec, data, nullptr);
    const auto b = fit_classifier(spec, flipped, nullptr);
    Rng rng(40);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_vector(rng, 3, 1.5);
      if (decision_value(a, x) == 0.0) continue;
      CHECK(predict(a, x) != predict(b, x));
    }
  }
}

TEST_CASE("concurrent predictions equal sequential ones") {
  const auto data = testing::blobs(60, 4, 1.0, 20);
  ClassifierSpec spec;
  spec.kind = ModelKind::rfdt;
  spec.forest.n_trees = 25;
  const auto model = fit_classifier(spec, data, nullptr);
  Rng rng(41);
  std::vector<std::vector<double>> inputs;
  for (int i = 0; i < 400; ++i) inputs.push_back(random_vector(rng, 4));
  std::vector<double> sequential;
  for (const auto& x : inputs) sequential.push_back(decision_value(model, x));
  std::vector<double> concurrent(inputs.size());
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < 8; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < inputs.size(); i += 8) concurrent[i] = decision_value(model, inputs[i]);
      });
  }
  CHECK(concurrent == sequential);
}

TEST_CASE("classifier json round trip is bit-exact for all five kinds") {
  const auto train = testing::blobs(50, 4, 1.0, 22);
  const auto tune = testing::blobs(15, 4, 1.0, 23);
  for (auto kind : {ModelKind::svm, ModelKind::lr, ModelKind::rfdt, ModelKind::mlp, ModelKind::ffnn}) {
    CAPTURE(to_string(kind));
    ClassifierSpec spec;
    spec.kind = kind;
    spec.forest.n_trees = 15;
    spec.net.epochs = 40;
    spec.set_seed(3);
    const auto model = fit_classifier(spec, train, &tune);
    const auto back = classifier_from_json(nlohmann::json::parse(to_json(model).dump()));
    CHECK(input_dimension(back) == 4);
    Rng rng(50);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_vector(rng, 4, 2.0);
      CHECK(decision_value(back, x) == decision_value(model, x));
    }
    const auto spec_back = ClassifierSpec::from_json(spec.to_json());
    CHECK(spec_back.to_json() == spec.to_json());
  }
}

TEST_CASE("classifier json rejects malformed payloads") {
  CHECK_THROWS_AS(classifier_from_json(nlohmann::json{{"kind", "svm"}}), Error);
  CHECK_THROWS_AS(classifier_from_json(nlohmann::json{{"kind", "quantum"}}), Error);
}
