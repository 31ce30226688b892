#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sopeval/text.hpp"

namespace sopeval {

enum class Label { accepted, rejected };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view s);
/// +1 for accepted, -1 for rejected.
inline int to_sign(Label label) { return label == Label::accepted ? 1 : -1; }

struct Document {
  std::string id;
  std::string text;
  std::optional<Label> label;
};

enum class LabelRequirement { required, optional };

/// Ordered, validated collection of essays. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;
  /// Throws on empty or duplicate ids and on blank texts.
  explicit Corpus(std::vector<Document> documents, std::string provenance = {});

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  const std::string& provenance() const noexcept { return provenance_; }

  bool fully_labeled() const;
  std::size_t count(Label label) const;
  std::optional<std::size_t> index_of(std::string_view id) const;
  Corpus subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<Document> documents_;
  std::string provenance_;
};

/// JSON Lines, one object per line: {"id": ..., "text": ..., "label": "accepted"|"rejected"}.
/// Blank lines are skipped. The label may be omitted only with LabelRequirement::optional.
Corpus parse_corpus(std::istream& in, LabelRequirement labels = LabelRequirement::required,
                    std::string provenance = {});
Corpus load_corpus(const std::filesystem::path& path,
                   LabelRequirement labels = LabelRequirement::required);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

struct FoldAssignment {
  int k = 0;
  std::vector<std::string> ids;  // parallel to the corpus
  std::vector<int> fold_of;      // parallel to the corpus, values in [0, k)

  int fold_for(std::string_view id) const;
  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

/// Sorts by class, shuffles within each class with the seed, then deals
/// round-robin into k folds, continuing the deal across classes so fold sizes
/// stay within one of each other.
FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed);

struct HoldoutPartition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> tune;  // empty unless a tune fraction was given
  std::vector<std::size_t> test;
};

/// Stratified split. train gets round(n * train_fraction) documents; with a
/// tune fraction the remainder is split again into tune (rounded half-up) and test.
HoldoutPartition holdout_split(const Corpus& corpus, double train_fraction, std::uint64_t seed,
                               std::optional<double> tune_fraction = std::nullopt);

enum class TermWeighting { tfidf, tf };

std::string_view to_string(TermWeighting w);
std::optional<TermWeighting> parse_term_weighting(std::string_view s);

/// One document's contribution to a reference corpus.
struct BagEntry {
  std::string id;
  Label label = Label::rejected;
  const text::TermBag* bag = nullptr;
};

/// Term statistics of the concatenated accepted essays, plus the document
/// frequencies (over every non-excluded document) used for smoothed IDF.
class ReferenceCorpus {
 public:
  ReferenceCorpus() = default;
  ReferenceCorpus(text::TermBag term_counts, std::map<std::string, double> document_frequency,
                  std::size_t document_count, std::set<std::string> excluded_ids,
                  std::vector<std::string> member_ids, TermWeighting weighting);

  const text::TermBag& term_counts() const noexcept { return term_counts_; }
  const std::map<std::string, double>& document_frequency() const noexcept { return df_; }
  std::size_t document_count() const noexcept { return document_count_; }
  const std::set<std::string>& excluded_ids() const noexcept { return excluded_ids_; }
  /// Accepted documents whose terms were pooled.
  const std::vector<std::string>& member_ids() const noexcept { return member_ids_; }
  TermWeighting weighting() const noexcept { return weighting_; }

  /// ln((1 + N) / (1 + df)) + 1, or 1 for plain term frequency.
  double idf(const std::string& term) const;
  /// Euclidean norm of the weighted reference vector.
  double norm() const noexcept { return norm_; }

  /// The reference build_reference would return with entry.id also excluded.
  /// entry must be one of the documents this reference was built from.
  ReferenceCorpus without(const BagEntry& entry) const;

  friend bool operator==(const ReferenceCorpus& a, const ReferenceCorpus& b) {
    return a.term_counts_ == b.term_counts_ && a.df_ == b.df_ &&
           a.document_count_ == b.document_count_ && a.excluded_ids_ == b.excluded_ids_ &&
           a.member_ids_ == b.member_ids_ && a.weighting_ == b.weighting_;
  }

 private:
  text::TermBag term_counts_;
  std::map<std::string, double> df_;
  std::size_t document_count_ = 0;
  std::set<std::string> excluded_ids_;
  std::vector<std::string> member_ids_;
  TermWeighting weighting_ = TermWeighting::tfidf;
  double norm_ = 0.0;
};

/// Tokenizes every labeled document of the corpus and pools the accepted ones
/// not listed in exclude_ids. Throws when no accepted document remains.
ReferenceCorpus build_reference(const Corpus& corpus, const std::set<std::string>& exclude_ids,
                                TermWeighting weighting = TermWeighting::tfidf);
/// Same, from pre-computed bags.
ReferenceCorpus build_reference(std::span<const BagEntry> entries,
                                const std::set<std::string>& exclude_ids,
                                TermWeighting weighting = TermWeighting::tfidf);

}  // namespace sopeval
