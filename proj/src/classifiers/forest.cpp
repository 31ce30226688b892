#include "sopeval/classifiers/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"

namespace sopeval::classifiers {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;  // weighted child impurity
};

class TreeBuilder {
 public:
  TreeBuilder(const LabeledMatrix& data, int mtry, int max_depth, std::uint64_t seed)
      : data_(data), mtry_(static_cast<std::size_t>(mtry)), max_depth_(max_depth), rng_(seed) {}

  int build(std::vector<std::size_t> rows, int depth) {
    const int node_index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    int acc = 0;
    for (auto r : rows) acc += data_.y[r] > 0;
    const int rej = static_cast<int>(rows.size()) - acc;
    {
      auto& node = tree_.nodes[node_index];
      node.n_accepted = acc;
      node.n_rejected = rej;
      node.label = acc > rej ? 1 : -1;
    }
    if (acc == 0 || rej == 0 || (max_depth_ > 0 && depth >= max_depth_)) return node_index;

    const auto split = best_split(rows);
    if (split.feature < 0) return node_index;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (data_.x(r, split.feature) <= split.threshold ? left : right).push_back(r);
    rows = {};
    const int l = build(std::move(left), depth + 1);
    const int rr = build(std::move(right), depth + 1);
    auto& node = tree_.nodes[node_index];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = rr;
    return node_index;
  }

  DecisionTree take() { return std::move(tree_); }

 private:
  // Tries mtry random features; keeps drawing past mtry until some feature
  // admits a split, so a node is only a leaf when no feature varies.
  Split best_split(const std::vector<std::size_t>& rows) {
    std::vector<std::size_t> features(data_.cols());
    std::iota(features.begin(), features.end(), 0);
    rng_.shuffle(std::span(features));
    Split best;
    best.impurity = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> sorted(rows);
    for (std::size_t k = 0; k < features.size(); ++k) {
      if (k >= mtry_ && best.feature >= 0) break;
      const auto f = features[k];
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        return data_.x(a, f) < data_.x(b, f);
      });
      const int n = static_cast<int>(sorted.size());
      int total_acc = 0;
      for (auto r : sorted) total_acc += data_.y[r] > 0;
      int left_acc = 0;
      for (int i = 0; i + 1 < n; ++i) {
        left_acc += data_.y[sorted[i]] > 0;
        const double v = data_.x(sorted[i], f);
        const double next = data_.x(sorted[i + 1], f);
        if (!(v < next)) continue;
        const int nl = i + 1;
        const int nr = n - nl;
        const double imp = (nl * gini(left_acc, nl - left_acc) +
                            nr * gini(total_acc - left_acc, nr - (total_acc - left_acc))) /
                           n;
        if (imp < best.impurity) {
          double t = v + (next - v) / 2.0;
          if (!(t < next)) t = v;
          best = {static_cast<int>(f), t, imp};
        }
      }
    }
    return best;
  }

  const LabeledMatrix& data_;
  std::size_t mtry_;
  int max_depth_;
  Rng rng_;
  DecisionTree tree_;
};

}  // namespace

double gini(int n_accepted, int n_rejected) {
  const int n = n_accepted + n_rejected;
  if (n == 0) return 0.0;
  const double pa = static_cast<double>(n_accepted) / n;
  const double pr = static_cast<double>(n_rejected) / n;
  return 1.0 - pa * pa - pr * pr;
}

int DecisionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[i].label;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
  }
  return best;
}

double ForestModel::decision_value(std::span<const double> x) const {
  check_dimension(dimension, x.size());
  int votes = 0;
  for (const auto& t : trees) votes += t.predict(x);
  return static_cast<double>(votes) / static_cast<double>(trees.size());
}

DecisionTree grow_tree(const LabeledMatrix& data, std::span<const std::size_t> rows, int features_per_split,
                       int max_depth, std::uint64_t seed) {
  if (rows.empty()) throw Error("classifiers", "rfdt: cannot grow a tree on zero rows");
  TreeBuilder builder(data, features_per_split, max_depth, seed);
  builder.build(std::vector<std::size_t>(rows.begin(), rows.end()), 0);
  auto tree = builder.take();
  tree.seed = seed;
  return tree;
}

ForestModel train_rfdt(const LabeledMatrix& data, const ForestParams& params) {
  validate_training_data(data, "rfdt");
  if (params.n_trees < 1) throw Error("classifiers", "rfdt: need at least one tree");
  if (params.max_depth < 0) throw Error("classifiers", "rfdt: max_depth must be non-negative");
  const int d = static_cast<int>(data.cols());
  if (d == 0) throw Error("classifiers", "rfdt: no features");
  int mtry = params.features_per_split;
  if (mtry <= 0) mtry = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  mtry = std::min(mtry, d);

  ForestModel model;
  model.features_per_split = mtry;
  model.max_depth = params.max_depth;
  model.bootstrap = params.bootstrap;
  model.dimension = data.cols();
  const auto n = data.rows();
  for (int t = 0; t < params.n_trees; ++t) {
    const auto seed = derive_seed(params.seed, static_cast<std::uint64_t>(t));
    std::vector<std::size_t> rows(n);
    if (params.bootstrap) {
      Rng rng(derive_seed(seed, 0));
      for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    model.trees.push_back(grow_tree(data, rows, mtry, params.max_depth, seed));
  }
  return model;
}

}  // namespace sopeval::classifiers
