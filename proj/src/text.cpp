#include "sopeval/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "sopeval/error.hpp"

namespace sopeval::text {
namespace {

enum class CharClass { space, newline, word, terminal, closer, punct };

struct Scanned {
  CharClass cls;
  std::size_t length;  // bytes
};

std::uint32_t decode(std::string_view s, std::size_t i, std::size_t& len) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    len = 1;
    return c;
  }
  len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (i + len > s.size()) {
    len = 1;
    return c;
  }
  std::uint32_t cp = c & (0x3F >> (len - 1));
  for (std::size_t k = 1; k < len; ++k) cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  return cp;
}

Scanned scan(std::string_view s, std::size_t i) {
  std::size_t len = 1;
  const auto cp = decode(s, i, len);
  if (cp == '\n') return {CharClass::newline, 1};
  if (cp < 0x80) {
    const auto c = static_cast<unsigned char>(cp);
    if (std::isspace(c)) return {CharClass::space, 1};
    if (std::isalnum(c)) return {CharClass::word, 1};
    if (c == '.' || c == '!' || c == '?') return {CharClass::terminal, 1};
    if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '}') return {CharClass::closer, 1};
    return {CharClass::punct, 1};
  }
  // Non-breaking and typographic spaces.
  if (cp == 0xA0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x3000) return {CharClass::space, len};
  if (cp == 0x2026) return {CharClass::terminal, len};
  if (cp == 0x2019 || cp == 0x201D) return {CharClass::closer, len};
  if ((cp >= 0x2010 && cp <= 0x206F) || (cp >= 0x3001 && cp <= 0x303F)) return {CharClass::punct, len};
  return {CharClass::word, len};
}

constexpr std::array<std::string_view, 16> kThirdPersonPronouns{
    "he",  "him",   "his",     "himself", "she",  "her",    "hers",   "herself",
    "it",  "its",   "itself",  "they",    "them", "their",  "theirs", "themselves"};

bool is_third_person_pronoun(std::string_view lower) {
  return std::find(kThirdPersonPronouns.begin(), kThirdPersonPronouns.end(), lower) !=
         kThirdPersonPronouns.end();
}

double per_thousand(double count, std::size_t words) {
  return words == 0 ? 0.0 : 1000.0 * count / static_cast<double>(words);
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool is_alphabetic(std::string_view word) {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalpha(u);
  });
}

bool has_digit(std::string_view word) {
  return std::any_of(word.begin(), word.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

std::size_t char_count(std::string_view word) {
  return static_cast<std::size_t>(std::count_if(word.begin(), word.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool TokenizedDoc::is_sentence_initial_word(std::size_t token_index) const {
  const auto it = std::upper_bound(sentences_.begin(), sentences_.end(), token_index,
                                   [](std::size_t i, const Range& r) { return i < r.begin; });
  if (it == sentences_.begin()) return false;
  const Range& r = *std::prev(it);
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (tokens_[i].is_word) return i == token_index;
  }
  return false;
}

TokenizedDoc tokenize(std::string_view text) {
  TokenizedDoc doc;
  std::size_t sentence_begin = 0;
  std::size_t sentence_words = 0;
  std::size_t paragraph_begin = 0;  // sentence index
  bool pending_end = false;

  auto close_sentence = [&] {
    pending_end = false;
    if (sentence_words == 0) return;  // wordless tokens roll into the next sentence
    doc.sentences_.push_back({sentence_begin, doc.tokens_.size()});
    sentence_begin = doc.tokens_.size();
    sentence_words = 0;
  };
  auto close_paragraph = [&] {
    close_sentence();
    if (sentence_begin < doc.tokens_.size()) {
      // Trailing punctuation without words: attach to this paragraph's last
      // sentence, or drop it if the paragraph has none.
      if (doc.sentences_.size() > paragraph_begin) {
        doc.sentences_.back().end = doc.tokens_.size();
      } else {
        doc.tokens_.resize(sentence_begin);
      }
      sentence_begin = doc.tokens_.size();
    }
    if (doc.sentences_.size() > paragraph_begin) {
      doc.paragraphs_.push_back({paragraph_begin, doc.sentences_.size()});
      paragraph_begin = doc.sentences_.size();
    }
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const auto sc = scan(text, i);
    switch (sc.cls) {
      case CharClass::space:
      case CharClass::newline: {
        int newlines = 0;
        while (i < text.size()) {
          const auto ws = scan(text, i);
          if (ws.cls == CharClass::newline) {
            ++newlines;
          } else if (ws.cls != CharClass::space) {
            break;
          }
          i += ws.length;
        }
        if (newlines >= 2) {
          close_paragraph();
        } else if (pending_end) {
          close_sentence();
        }
        break;
      }
      case CharClass::word: {
        const std::size_t start = i;
        while (i < text.size()) {
          const auto ws = scan(text, i);
          if (ws.cls != CharClass::word) break;
          i += ws.length;
        }
        doc.tokens_.push_back({std::string(text.substr(start, i - start)), start, true});
        ++sentence_words;
        ++doc.word_count_;
        pending_end = false;
        break;
      }
      case CharClass::terminal:
      case CharClass::closer:
      case CharClass::punct:
        doc.tokens_.push_back({std::string(text.substr(i, sc.length)), i, false});
        i += sc.length;
        if (sc.cls == CharClass::terminal) {
          pending_end = true;
        } else if (sc.cls != CharClass::closer) {
          pending_end = false;
        }
        break;
    }
  }
  close_paragraph();

  if (doc.word_count_ == 0) throw Error("text", "empty document");
  return doc;
}

TermBag term_bag(const TokenizedDoc& doc) {
  TermBag bag;
  for (const auto& t : doc.tokens()) {
    if (t.is_word) bag[to_lower(t.text)] += 1.0;
  }
  return bag;
}

PosRatios pos_ratios(const TokenizedDoc& doc, const LexicalResources& res) {
  std::size_t noun = 0, adj = 0, adv = 0, verb = 0;
  for (const auto& t : doc.tokens()) {
    if (!t.is_word) continue;
    switch (res.tag(t.text)) {
      case PosTag::noun: ++noun; break;
      case PosTag::adjective: ++adj; break;
      case PosTag::adverb: ++adv; break;
      case PosTag::verb: ++verb; break;
      case PosTag::other: break;
    }
  }
  const auto n = static_cast<double>(doc.word_count());
  return {noun / n, adj / n, adv / n, verb / n};
}

std::size_t discourse_count(const TokenizedDoc& doc, const LexicalResources& res) {
  const auto& phrases = res.connector_phrases();
  std::size_t count = 0;
  std::vector<std::string> words;
  for (std::size_t s = 0; s < doc.sentence_count(); ++s) {
    words.clear();
    for (const auto& t : doc.sentence(s)) {
      if (t.is_word) words.push_back(to_lower(t.text));
    }
    std::size_t pos = 0;
    while (pos < words.size()) {
      std::size_t matched = 0;
      for (const auto& phrase : phrases) {  // longest first
        if (phrase.size() > words.size() - pos) continue;
        if (std::equal(phrase.begin(), phrase.end(), words.begin() + static_cast<std::ptrdiff_t>(pos))) {
          matched = phrase.size();
          break;
        }
      }
      if (matched > 0) {
        ++count;
        pos += matched;
      } else {
        ++pos;
      }
    }
  }
  return count;
}

int syllable_count(std::string_view word) {
  const auto lower = to_lower(word);
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  int groups = 0;
  bool in_group = false;
  for (char c : lower) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = lower.size();
  if (groups > 1 && n >= 2 && lower[n - 1] == 'e' && lower[n - 2] != 'e') {
    const bool consonant_le = n >= 3 && lower[n - 2] == 'l' && !is_vowel(lower[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

ReadabilityCounts readability_counts(const TokenizedDoc& doc) {
  ReadabilityCounts c;
  c.words = doc.word_count();
  c.sentences = doc.sentence_count();
  for (const auto& t : doc.tokens()) {
    if (t.is_word) c.syllables += static_cast<std::size_t>(syllable_count(t.text));
  }
  return c;
}

double fres(const ReadabilityCounts& c) {
  const auto words = static_cast<double>(c.words);
  return 206.835 - 1.015 * (words / static_cast<double>(c.sentences)) -
         84.6 * (static_cast<double>(c.syllables) / words);
}

double fres(const TokenizedDoc& doc) { return fres(readability_counts(doc)); }

LengthFeatures length_features(const TokenizedDoc& doc) {
  std::size_t chars = 0;
  for (const auto& t : doc.tokens()) {
    if (t.is_word) chars += char_count(t.text);
  }
  const auto words = static_cast<double>(doc.word_count());
  return {words / static_cast<double>(doc.sentence_count()),
          words / static_cast<double>(doc.paragraph_count()), static_cast<double>(chars) / words};
}

std::size_t coref_distance(const TokenizedDoc& doc, const LexicalResources& res) {
  std::unordered_map<std::string, std::size_t> last_mention;
  std::optional<std::size_t> last_noun;
  std::size_t total = 0;
  const auto tokens = doc.tokens();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_word) continue;
    const auto lower = to_lower(tokens[i].text);
    if (is_third_person_pronoun(lower)) {
      if (last_noun) total += i - *last_noun;
      continue;
    }
    if (res.tag(tokens[i].text) != PosTag::noun) continue;
    if (const auto it = last_mention.find(lower); it != last_mention.end()) {
      total += i - it->second;
      it->second = i;
    } else {
      last_mention.emplace(lower, i);
    }
    last_noun = i;
  }
  return total;
}

double polysemy_degree(const TokenizedDoc& doc, const LexicalResources& res) {
  double sum = 0.0;
  std::size_t found = 0;
  for (const auto& t : doc.tokens()) {
    if (!t.is_word) continue;
    if (const auto senses = res.sense_count(t.text)) {
      sum += *senses;
      ++found;
    }
  }
  return found == 0 ? 0.0 : sum / static_cast<double>(found);
}

std::size_t spell_errors(const TokenizedDoc& doc, const LexicalResources& res) {
  std::size_t errors = 0;
  for (const auto& t : doc.tokens()) {
    if (t.is_word && !has_digit(t.text) && !res.in_dictionary(t.text)) ++errors;
  }
  return errors;
}

std::size_t ne_count(const TokenizedDoc& doc) {
  std::size_t count = 0;
  const auto tokens = doc.tokens();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    if (!t.is_word || t.text == "I") continue;
    if (t.text.front() < 'A' || t.text.front() > 'Z') continue;
    if (!doc.is_sentence_initial_word(i)) ++count;
  }
  return count;
}

TextualFeatures textual_features(const TokenizedDoc& doc, const LexicalResources& res,
                                 const TextualOptions& options) {
  TextualFeatures f;
  f.pos = pos_ratios(doc, res);
  f.fres = fres(doc);
  f.lengths = length_features(doc);
  f.coref_distance = static_cast<double>(coref_distance(doc, res));
  f.polysemy_degree = polysemy_degree(doc, res);

  const auto words = doc.word_count();
  auto count = [&](std::size_t raw) {
    return options.normalize_counts ? per_thousand(static_cast<double>(raw), words)
                                    : static_cast<double>(raw);
  };
  f.discourse_count = count(discourse_count(doc, res));
  f.spell_errors = count(spell_errors(doc, res));
  if (options.ne_count) f.ne_count = count(ne_count(doc));
  return f;
}

}  // namespace sopeval::text
