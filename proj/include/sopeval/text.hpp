#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sopeval/resources.hpp"

namespace sopeval::text {

struct Token {
  std::string text;
  std::size_t offset = 0;  // byte offset into the source text
  bool is_word = false;    // alphanumeric run; otherwise a single punctuation mark
};

/// Token stream grouped into sentences and paragraphs. Sentences and
/// paragraphs are half-open ranges over the flat token (resp. sentence) list,
/// so a token's index is its position in document order.
class TokenizedDoc {
 public:
  struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
  };

  std::span<const Token> tokens() const noexcept { return tokens_; }
  std::size_t sentence_count() const noexcept { return sentences_.size(); }
  std::size_t paragraph_count() const noexcept { return paragraphs_.size(); }
  std::size_t word_count() const noexcept { return word_count_; }

  std::span<const Token> sentence(std::size_t i) const {
    return std::span<const Token>(tokens_).subspan(sentences_[i].begin,
                                                   sentences_[i].end - sentences_[i].begin);
  }
  Range sentence_range(std::size_t i) const { return sentences_[i]; }
  /// Sentence index range of paragraph i.
  Range paragraph_range(std::size_t i) const { return paragraphs_[i]; }
  /// True when token i opens its sentence's first word.
  bool is_sentence_initial_word(std::size_t token_index) const;

 private:
  friend TokenizedDoc tokenize(std::string_view text);

  std::vector<Token> tokens_;
  std::vector<Range> sentences_;
  std::vector<Range> paragraphs_;
  std::size_t word_count_ = 0;
};

/// Paragraphs break on blank lines, sentences after terminal punctuation
/// (. ! ?, optionally followed by closing quotes or brackets) that is followed
/// by whitespace, words on non-alphanumeric boundaries. Bytes >= 0x80 count
/// as word characters so UTF-8 words stay whole. Throws "empty document" when
/// the text has no word token.
TokenizedDoc tokenize(std::string_view text);

std::string to_lower(std::string_view s);
bool is_alphabetic(std::string_view word);
bool has_digit(std::string_view word);
/// Number of UTF-8 code points.
std::size_t char_count(std::string_view word);

/// Case-folded word-token counts, the bag used for reference-corpus cosine.
using TermBag = std::map<std::string, double>;
TermBag term_bag(const TokenizedDoc& doc);

struct PosRatios {
  double noun = 0.0;
  double adjective = 0.0;
  double adverb = 0.0;
  double verb = 0.0;
};

struct LengthFeatures {
  double words_per_sentence = 0.0;
  double words_per_paragraph = 0.0;
  double word_length = 0.0;
};

PosRatios pos_ratios(const TokenizedDoc& doc, const LexicalResources& res);
std::size_t discourse_count(const TokenizedDoc& doc, const LexicalResources& res);

/// Vowel groups (a e i o u y), minus a silent trailing "e", at least 1.
int syllable_count(std::string_view word);

struct ReadabilityCounts {
  std::size_t words = 0;
  std::size_t sentences = 0;
  std::size_t syllables = 0;
};
ReadabilityCounts readability_counts(const TokenizedDoc& doc);
double fres(const ReadabilityCounts& counts);
/// Flesch Reading Ease: 206.835 - 1.015 words/sentences - 84.6 syllables/words.
double fres(const TokenizedDoc& doc);

LengthFeatures length_features(const TokenizedDoc& doc);

/// Sum of token-index distances over heuristic coreference links: every noun
/// links to the previous occurrence of the same noun, and every third-person
/// pronoun to the nearest preceding noun. Indices count word and punctuation
/// tokens alike.
std::size_t coref_distance(const TokenizedDoc& doc, const LexicalResources& res);

/// Mean sense count over word tokens found in the sense table; 0 if none are.
double polysemy_degree(const TokenizedDoc& doc, const LexicalResources& res);

/// Word tokens without digits whose case-folded form is not in the dictionary.
std::size_t spell_errors(const TokenizedDoc& doc, const LexicalResources& res);

/// Capitalised word tokens that do not open a sentence. The pronoun "I" is
/// not counted.
std::size_t ne_count(const TokenizedDoc& doc);

struct TextualFeatures {
  PosRatios pos;
  double discourse_count = 0.0;
  double fres = 0.0;
  LengthFeatures lengths;
  double coref_distance = 0.0;
  double polysemy_degree = 0.0;
  double spell_errors = 0.0;
  std::optional<double> ne_count;
};

struct TextualOptions {
  bool ne_count = false;
  /// Report discourse connectors, spelling errors and named entities per
  /// 1000 word tokens instead of raw counts.
  bool normalize_counts = false;
};

TextualFeatures textual_features(const TokenizedDoc& doc, const LexicalResources& res,
                                 const TextualOptions& options = {});

}  // namespace sopeval::text
