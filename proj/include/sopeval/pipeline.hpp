#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sopeval/classifiers/model.hpp"
#include "sopeval/corpus.hpp"
#include "sopeval/features.hpp"

namespace sopeval {

/// Per-document analyses of a corpus, computed once (in parallel) and shared
/// by every fold, feature-set combination and classifier run on it.
class CorpusFeatures {
 public:
  /// `config` should enable every set the runs will use.
  CorpusFeatures(Corpus corpus, features::FeatureConfig config, features::Resources resources,
                 unsigned threads = 0);

  const Corpus& corpus() const noexcept { return corpus_; }
  const features::FeatureConfig& config() const noexcept { return config_; }
  const features::Resources& resources() const noexcept { return resources_; }
  const features::DocumentAnalysis& analysis(std::size_t i) const { return analyses_.at(i); }
  std::size_t size() const noexcept { return corpus_.size(); }

  std::vector<BagEntry> bag_entries(std::span<const std::size_t> indices) const;
  std::vector<int> labels(std::span<const std::size_t> indices) const;

 private:
  Corpus corpus_;
  features::FeatureConfig config_;
  features::Resources resources_;
  std::vector<features::DocumentAnalysis> analyses_;
};

/// The reference corpus each document is scored against.
struct ReferenceSet {
  /// For documents with no leave-one-out entry.
  ReferenceCorpus shared;
  /// Keyed by corpus index.
  std::map<std::size_t, ReferenceCorpus> leave_one_out;

  const ReferenceCorpus& for_document(std::size_t index) const;
};

/// fold_train: pooled from the training partition, with a leave-one-out
/// variant for each training document. paper_compat: pooled from the whole
/// corpus, with a leave-one-out variant for every document.
ReferenceSet build_references(const CorpusFeatures& cf, features::ReferenceMode mode, TermWeighting weighting,
                              std::span<const std::size_t> training);

/// Raw feature rows for the given documents. `references` may be null when
/// SE is disabled. Warnings are appended per row when `warnings` is given.
Matrix feature_rows(const CorpusFeatures& cf, const features::FeatureConfig& config,
                    std::span<const std::size_t> indices, const ReferenceSet* references,
                    std::vector<std::vector<std::string>>* warnings = nullptr);

/// Everything fitted on one training partition.
struct FittedPipeline {
  features::FeatureConfig config;
  classifiers::ClassifierSpec spec;
  std::vector<std::size_t> fit_rows;   // rows the classifier and standardizer saw
  std::vector<std::size_t> tune_rows;  // ffnn only
  std::optional<ReferenceSet> references;
  Matrix fit_raw;
  std::optional<features::Standardizer> standardizer;
  classifiers::Classifier model;

  /// Decision values for corpus documents.
  std::vector<double> decision_values(const CorpusFeatures& cf, std::span<const std::size_t> indices) const;
};

/// Fits references, standardizer and classifier on corpus rows `training`.
/// For ffnn the tune rows are carved from `training` with spec.tune_fraction
/// unless `tune` is given, in which case `training` is used as is.
FittedPipeline fit_pipeline(const CorpusFeatures& cf, const features::FeatureConfig& config,
                            const classifiers::ClassifierSpec& spec, std::span<const std::size_t> training,
                            std::uint64_t seed, std::span<const std::size_t> tune = {});

/// A training document kept by paper_compat models so that scoring the same
/// text again reproduces its leave-one-out training features.
struct ReferenceMember {
  std::string id;
  Label label = Label::rejected;
  std::string fingerprint;
  text::TermBag bag;
};

struct TrainedModel {
  static constexpr int kFormatVersion = 1;

  std::string model_id;
  features::FeatureConfig config;
  classifiers::ClassifierSpec spec;
  std::vector<features::FeatureName> feature_names;
  std::size_t embedding_dimension = 0;
  std::optional<features::Standardizer> standardizer;
  classifiers::Classifier classifier;
  std::optional<ReferenceCorpus> reference;
  std::vector<ReferenceMember> members;
  std::uint64_t seed = 0;
  std::size_t training_size = 0;

  std::string config_hash() const { return config.hash(); }
};

TrainedModel train_model(const CorpusFeatures& cf, const features::FeatureConfig& config,
                         const classifiers::ClassifierSpec& spec, std::uint64_t seed);

nlohmann::json to_json(const TrainedModel& model);
/// Throws on an unknown format version, a hash mismatch or a malformed payload.
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

struct FeatureBreakdown {
  std::string name;
  features::FeatureSet set;
  double raw = 0.0;
  double standardized = 0.0;
};

struct Evaluation {
  Label label = Label::rejected;
  double decision_value = 0.0;
  std::vector<FeatureBreakdown> breakdown;
  std::vector<std::string> warnings;
  std::string model_id;
};

/// Scores one essay. Throws when the resources do not match the model.
Evaluation evaluate_text(const TrainedModel& model, const features::Resources& resources, std::string_view text);

nlohmann::json to_json(const Evaluation& e);

/// Hex fingerprint of a document text.
std::string text_fingerprint(std::string_view text);

}  // namespace sopeval
