#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sopeval {

enum class PosTag { noun, verb, adjective, adverb, other };

std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view s);

/// Word lists and lexicons behind the textual features. All lookups are
/// case-folded; the object is immutable once built and safe to share.
class LexicalResources {
 public:
  struct Data {
    std::unordered_map<std::string, PosTag> tags;
    std::vector<std::string> connectors;
    std::unordered_map<std::string, int> sense_counts;
    std::unordered_set<std::string> dictionary;
    std::unordered_set<std::string> stopwords;
  };

  /// Normalises (case-folds) and validates the data. Sense counts must be >= 1.
  explicit LexicalResources(Data data);

  /// Reads connectors.txt, senses.tsv, dictionary.txt, stopwords.txt and
  /// tags.tsv from a directory.
  static std::shared_ptr<const LexicalResources> load(const std::filesystem::path& dir);

  /// Lexicon tag, else the suffix rules, else noun. Tokens with digits are "other".
  PosTag tag(std::string_view word) const;
  std::optional<PosTag> lexicon_tag(std::string_view word) const;
  std::optional<int> sense_count(std::string_view word) const;
  bool in_dictionary(std::string_view word) const;
  bool is_stopword(std::string_view word) const;

  /// Connector phrases split into lowercase words, longest first.
  const std::vector<std::vector<std::string>>& connector_phrases() const noexcept {
    return connector_phrases_;
  }

  std::size_t dictionary_size() const noexcept { return data_.dictionary.size(); }
  /// Sorted lexicon entries carrying the given tag.
  std::vector<std::string> lexicon_words(PosTag tag) const;

 private:
  Data data_;
  std::vector<std::vector<std::string>> connector_phrases_;
};

/// Tag assigned from word shape alone ("-ly" adverb, "-tion" noun, ...).
std::optional<PosTag> suffix_tag(std::string_view lower_word);

}  // namespace sopeval
