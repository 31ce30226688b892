#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sopeval/classifiers/model.hpp"
#include "sopeval/corpus.hpp"
#include "sopeval/features.hpp"
#include "sopeval/pipeline.hpp"

namespace sopeval::evaluation {

/// Accepted is the positive class.
struct ConfusionMatrix {
  std::size_t tp_acc = 0;  // accepted predicted accepted
  std::size_t fn_acc = 0;  // accepted predicted rejected
  std::size_t fp_acc = 0;  // rejected predicted accepted
  std::size_t tn_acc = 0;  // rejected predicted rejected

  std::size_t total() const noexcept { return tp_acc + fn_acc + fp_acc + tn_acc; }
  void add(Label gold, Label predicted);
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct Prediction {
  std::string id;
  int fold = 0;
  Label gold = Label::rejected;
  Label predicted = Label::rejected;
  double decision_value = 0.0;
};

struct MetricsReport {
  ConfusionMatrix confusion;
  ClassMetrics accepted;
  ClassMetrics rejected;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::vector<std::string> warnings;

  std::vector<MetricsReport> folds;
  std::vector<Prediction> predictions;
  std::string protocol;  // "10-fold", "50% split", ...
  std::string classifier;
  std::string feature_sets;
  std::string config_hash;
  std::uint64_t seed = 0;
  /// Top-level metrics are means of the fold metrics instead of pooled counts.
  bool per_fold_average = false;
};

/// Per-class precision, recall, F1, their unweighted means and accuracy.
/// Undefined ratios (zero denominators) are 0 and add a warning. Throws on an
/// empty matrix.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Trains on `train` and returns decision values for `test` (corpus indices).
using FoldPredictor =
    std::function<std::vector<double>(int fold, std::span<const std::size_t> train, std::span<const std::size_t> test)>;

/// Runs `predict` on every fold and pools the confusion counts. Errors are
/// rethrown prefixed with the fold index.
MetricsReport evaluate_folds(const Corpus& corpus, const FoldAssignment& folds, const FoldPredictor& predict,
                             bool per_fold_average = false, unsigned threads = 1);

struct CvOptions {
  bool per_fold_average = false;
  /// Recompute each fold's reference corpus and standardizer from its
  /// training documents alone (independently re-tokenized) and require
  /// bit-identical values.
  bool audit = true;
  unsigned threads = 1;
};

/// Outcome of the leakage audit for one fold.
struct AuditRecord {
  int fold = 0;
  bool reference_checked = false;
  std::size_t references_compared = 0;
  bool standardizer_checked = false;
};

/// Throws Error("evaluation", ...) when the fitted pipeline differs from a
/// recomputation over its training partition.
AuditRecord audit_fold(const CorpusFeatures& cf, const FittedPipeline& fitted, int fold,
                       std::span<const std::size_t> training);

MetricsReport cross_validate(const CorpusFeatures& cf, const features::FeatureConfig& config,
                             const classifiers::ClassifierSpec& spec, int k, std::uint64_t seed,
                             const CvOptions& options = {}, std::vector<AuditRecord>* audit_log = nullptr);

/// Stratified holdout; ffnn splits the non-training half again into tune and test.
MetricsReport holdout_evaluate(const CorpusFeatures& cf, const features::FeatureConfig& config,
                               const classifiers::ClassifierSpec& spec, double train_fraction, std::uint64_t seed,
                               const CvOptions& options = {}, std::vector<AuditRecord>* audit_log = nullptr);

struct AblationCell {
  double accuracy = 0.0;         // mean over repeats
  double accuracy_stddev = 0.0;  // population std over repeats
  std::vector<double> runs;      // accuracy of each repeat
  MetricsReport report;          // first repeat
};

struct AblationGrid {
  std::vector<std::set<features::FeatureSet>> rows;
  std::vector<std::string> row_labels;  // e.g. "SE + WE [303]"
  std::vector<std::string> columns;     // 2-F, 5-F, 10-F, 50% Split
  std::vector<std::vector<AblationCell>> cells;
  std::size_t winner = 0;  // row with the highest mean accuracy
  std::uint64_t seed = 0;
  std::string classifier;
  std::string base_config_hash;
};

/// T, WE, SE, T+WE, T+SE, SE+WE, T+WE+SE.
std::vector<std::set<features::FeatureSet>> ablation_rows();
std::vector<std::string> ablation_columns();

struct AblationOptions {
  int repeats = 1;  // extra repeats use derived seeds
  unsigned threads = 0;
  CvOptions cv;
};

AblationGrid ablate(const CorpusFeatures& cf, const features::FeatureConfig& base,
                    const classifiers::ClassifierSpec& spec, std::uint64_t seed, const AblationOptions& options = {});

enum class Format { text, delimited };

/// Half-up rounding for display.
double round_half_up(double v, int decimals);

std::string render_report(const MetricsReport& report, Format format);
std::string render_grid(const AblationGrid& grid, Format format);

/// Inverse of the delimited renderings (numeric content only).
MetricsReport parse_report(std::string_view delimited);
AblationGrid parse_grid(std::string_view delimited);

}  // namespace sopeval::evaluation
