#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sopeval/classifiers/labeled.hpp"

namespace sopeval::classifiers {

struct ForestParams {
  int n_trees = 100;
  /// 0 means unlimited.
  int max_depth = 0;
  /// 0 means ceil(sqrt(d)).
  int features_per_split = 0;
  /// Fit each tree on a bootstrap sample. Off fits every tree on all rows.
  bool bootstrap = true;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   // x[feature] <= threshold
  int right = -1;
  int label = -1;  // leaf vote, +1 or -1
  int n_accepted = 0;
  int n_rejected = 0;

  bool is_leaf() const noexcept { return feature < 0; }
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::uint64_t seed = 0;

  int predict(std::span<const double> x) const;
  int depth() const;
};

struct ForestModel {
  std::vector<DecisionTree> trees;
  int features_per_split = 0;
  int max_depth = 0;
  bool bootstrap = true;
  std::size_t dimension = 0;

  std::size_t input_dimension() const noexcept { return dimension; }
  /// (accepted votes - rejected votes) / trees; a tie is 0.
  double decision_value(std::span<const double> x) const;
};

/// 1 - p_acc^2 - p_rej^2
double gini(int n_accepted, int n_rejected);

/// Grows one unpruned CART tree on the given row indices (duplicates allowed).
DecisionTree grow_tree(const LabeledMatrix& data, std::span<const std::size_t> rows, int features_per_split,
                       int max_depth, std::uint64_t seed);

ForestModel train_rfdt(const LabeledMatrix& data, const ForestParams& params);

}  // namespace sopeval::classifiers
