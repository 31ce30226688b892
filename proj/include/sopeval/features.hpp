#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sopeval/corpus.hpp"
#include "sopeval/embedding.hpp"
#include "sopeval/matrix.hpp"
#include "sopeval/resources.hpp"
#include "sopeval/text.hpp"

namespace sopeval::features {

/// T: textual, WE: averaged word embedding, SE: similarity and error based.
enum class FeatureSet { T, WE, SE };

std::string_view to_string(FeatureSet set);
std::optional<FeatureSet> parse_feature_set(std::string_view s);

/// Which reference corpus the cosine feature is measured against.
///  fold_train:   accepted essays of the training partition only, leaving the
///                scored document out when it is itself a training essay.
///  paper_compat: every accepted essay of the corpus except the scored one,
///                test essays included.
enum class ReferenceMode { fold_train, paper_compat };

std::string_view to_string(ReferenceMode mode);
std::optional<ReferenceMode> parse_reference_mode(std::string_view s);

struct FeatureConfig {
  std::set<FeatureSet> sets{FeatureSet::T, FeatureSet::WE, FeatureSet::SE};
  bool ne_count = false;
  /// Adds the adjacent-sentence similarity mean and max to SE.
  bool adjacent_similarity = false;
  bool normalize_counts = false;
  TermWeighting term_weighting = TermWeighting::tfidf;
  ReferenceMode reference_mode = ReferenceMode::fold_train;

  // Resource locations. Recorded for reports, not part of the hash.
  std::string resource_dir;
  std::string embeddings_path;
  std::string glove_path;

  bool uses(FeatureSet s) const { return sets.contains(s); }

  /// Parses "T", "SE+WE", "T+WE+SE", ... (order-insensitive).
  static std::set<FeatureSet> parse_sets(std::string_view spec);
  /// Canonical label in T, WE, SE order joined by " + ".
  std::string sets_label() const;

  nlohmann::json to_json() const;
  static FeatureConfig from_json(const nlohmann::json& j);
  /// Stable identity of everything that changes feature values.
  std::string hash() const;
};

struct FeatureName {
  FeatureSet set;
  std::string name;
  friend bool operator==(const FeatureName&, const FeatureName&) = default;
};

/// Canonical order: T scalars, then WE components, then SE scalars.
std::vector<FeatureName> feature_names(const FeatureConfig& config, std::size_t embedding_dimension);

struct Resources {
  std::shared_ptr<const LexicalResources> lexical;
  /// Serves the averaged vector and the OOV count.
  std::shared_ptr<const embedding::EmbeddingTable> embeddings;
  /// Serves the adjacent-sentence similarity.
  std::shared_ptr<const embedding::EmbeddingTable> glove;
};

struct FeatureVector {
  std::vector<FeatureName> names;
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Everything about a document that does not depend on the reference corpus.
struct DocumentAnalysis {
  text::TokenizedDoc tokens;
  text::TermBag bag;
  std::optional<text::TextualFeatures> textual;
  std::optional<embedding::AverageVector> average;
  std::optional<std::size_t> oov_count;
  std::optional<embedding::SimilarityStats> adjacent;
};

/// Throws ResourceError naming the first resource an enabled set lacks.
void check_resources(const FeatureConfig& config, const Resources& resources);

/// Computes whatever the available resources allow, restricted to what the
/// config can ever need. Analyses from a config with more sets can be
/// assembled for any subset of them.
DocumentAnalysis analyze(std::string_view text, const FeatureConfig& config, const Resources& resources);

/// TF-IDF (or TF) cosine between a document's bag and the pooled reference.
double cosine_to_reference(const text::TermBag& bag, const ReferenceCorpus& reference);
double cosine_to_reference(const text::TokenizedDoc& doc, const ReferenceCorpus& reference);

/// Builds the feature vector. `reference` is required when SE is enabled.
FeatureVector assemble(const DocumentAnalysis& analysis, const FeatureConfig& config,
                       const Resources& resources, const ReferenceCorpus* reference);

FeatureVector extract(std::string_view text, const FeatureConfig& config, const Resources& resources,
                      const ReferenceCorpus* reference);

/// Per-column z-scoring with population standard deviation. Columns whose
/// deviation is numerically zero map to 0.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(std::vector<double> means, std::vector<double> stddevs);

  static Standardizer fit(const Matrix& train);

  Matrix apply(const Matrix& m) const;
  std::vector<double> apply(std::span<const double> row) const;

  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& stddevs() const noexcept { return stddevs_; }
  bool is_constant(std::size_t column) const;

  friend bool operator==(const Standardizer&, const Standardizer&) = default;

 private:
  std::vector<double> means_;
  std::vector<double> stddevs_;
};

/// Delimited feature-matrix export: header "id,<names...>", one row per document.
std::string render_feature_matrix(std::span<const std::string> ids, std::span<const FeatureName> names,
                                  const Matrix& values);

}  // namespace sopeval::features
