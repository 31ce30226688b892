#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sopeval/corpus.hpp"
#include "sopeval/embedding.hpp"
#include "sopeval/resources.hpp"

namespace sopeval::synthetic {

// Stand-in for the unreleased essay collection. Accepted essays are fluent
// essays assembled from a fixed pool of statement-of-purpose sentences, one
// paragraph per section in order. Rejected essays draw from the same pool,
// then get their sentences scrambled, a share of content words misspelled and
// another share replaced by dictionary words that have no word vector.

struct Options {
  std::size_t accepted = 25;
  std::size_t rejected = 25;
  /// Share of word tokens misspelled in rejected essays.
  double misspelling_rate = 0.03;
  /// Share of word tokens replaced by out-of-vocabulary words in rejected essays.
  double oov_rate = 0.10;
  std::size_t embedding_dimension = 300;
  /// Spread of word vectors around their class centroid.
  double embedding_noise = 0.5;
  std::uint64_t seed = 0;
};

struct Dataset {
  Corpus corpus;
  std::shared_ptr<const embedding::EmbeddingTable> embeddings;
  /// Lowercase words of the sentence pool; exactly the embedding vocabulary.
  std::vector<std::string> vocabulary;
};

/// Sentences of the pool in section order.
const std::vector<std::string>& sentence_pool();

/// Deterministic for fixed options and resources.
Dataset generate(const LexicalResources& lexicon, const Options& options);

}  // namespace sopeval::synthetic
