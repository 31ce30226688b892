#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sopeval/resources.hpp"
#include "sopeval/text.hpp"

namespace sopeval::embedding {

/// Read-only word -> vector table. Vectors are stored as floats in one
/// contiguous block; lookups try the exact form, then the lowercase form.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  /// Adds a word; the first occurrence wins. Throws on wrong length or
  /// non-finite entries.
  void add(std::string word, std::span<const float> vector);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t vocab_size() const noexcept { return index_.size(); }
  std::optional<std::span<const float>> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<float> values_;
};

/// Whitespace-separated text format: "word v1 ... vD" per line with an
/// optional "count dim" header line.
EmbeddingTable parse_embeddings(std::istream& in, std::optional<std::size_t> expected_dimension = std::nullopt);
std::shared_ptr<const EmbeddingTable> load_embeddings(const std::filesystem::path& path,
                                                      std::optional<std::size_t> expected_dimension = std::nullopt);
void save_embeddings(const EmbeddingTable& table, std::span<const std::string> words,
                     const std::filesystem::path& path);

struct AverageVector {
  std::vector<double> values;
  bool degenerate = false;  // no word token had a vector
};

/// Componentwise mean over word tokens present in the table.
AverageVector avg_word_vector(const text::TokenizedDoc& doc, const EmbeddingTable& table);

std::size_t oov_count(const text::TokenizedDoc& doc, const EmbeddingTable& table);

/// Cosine of two vectors; 0 when either has zero norm.
double cosine(std::span<const float> a, std::span<const float> b);

struct SimilarityStats {
  double mean = 0.0;
  double max = 0.0;
  std::size_t pairs = 0;
  bool degenerate = false;       // no pair of content words in adjacent sentences
  bool zero_vector_seen = false;
};

/// Cosine over every cross pair of content words (alphabetic, non-stopword,
/// in vocabulary) in each pair of adjacent sentences; mean and max are taken
/// over all pairs of the document.
SimilarityStats adjacent_sentence_similarity(const text::TokenizedDoc& doc, const EmbeddingTable& table,
                                             const LexicalResources& stopwords);

struct EmbeddingFeatures {
  AverageVector average;
  std::size_t oov_count = 0;
  SimilarityStats adjacent;
};

}  // namespace sopeval::embedding
