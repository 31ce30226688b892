#include "sopeval/resources.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "sopeval/error.hpp"
#include "sopeval/text.hpp"

namespace sopeval {
namespace {

struct SuffixRule {
  std::string_view suffix;
  PosTag tag;
};

// Checked in order; the first matching suffix wins.
constexpr std::array kSuffixRules{
    SuffixRule{"ly", PosTag::adverb},      SuffixRule{"ward", PosTag::adverb},
    SuffixRule{"wise", PosTag::adverb},    SuffixRule{"ness", PosTag::noun},
    SuffixRule{"tion", PosTag::noun},      SuffixRule{"sion", PosTag::noun},
    SuffixRule{"ment", PosTag::noun},      SuffixRule{"ity", PosTag::noun},
    SuffixRule{"ship", PosTag::noun},      SuffixRule{"ism", PosTag::noun},
    SuffixRule{"ist", PosTag::noun},       SuffixRule{"ance", PosTag::noun},
    SuffixRule{"ence", PosTag::noun},      SuffixRule{"hood", PosTag::noun},
    SuffixRule{"ous", PosTag::adjective},  SuffixRule{"ful", PosTag::adjective},
    SuffixRule{"ive", PosTag::adjective},  SuffixRule{"able", PosTag::adjective},
    SuffixRule{"ible", PosTag::adjective}, SuffixRule{"ical", PosTag::adjective},
    SuffixRule{"less", PosTag::adjective}, SuffixRule{"ish", PosTag::adjective},
    SuffixRule{"ic", PosTag::adjective},   SuffixRule{"al", PosTag::adjective},
    SuffixRule{"ize", PosTag::verb},       SuffixRule{"ise", PosTag::verb},
    SuffixRule{"ify", PosTag::verb},       SuffixRule{"ate", PosTag::verb},
    SuffixRule{"ed", PosTag::verb},        SuffixRule{"ing", PosTag::verb},
};

std::ifstream open_resource(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("resources", "cannot open " + path.string());
  return in;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Non-empty, non-comment lines.
std::vector<std::string> read_lines(const std::filesystem::path& path) {
  auto in = open_resource(path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_tsv(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t line_no = 0;
  auto in = open_resource(path);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw Error("resources", path.filename().string() + " line " + std::to_string(line_no) +
                                   ": expected word<TAB>value");
    }
    rows.emplace_back(t.substr(0, tab), trim(std::string_view(t).substr(tab + 1)));
  }
  return rows;
}

}  // namespace

std::string_view to_string(PosTag tag) {
  switch (tag) {
    case PosTag::noun: return "N";
    case PosTag::verb: return "V";
    case PosTag::adjective: return "ADJ";
    case PosTag::adverb: return "ADV";
    case PosTag::other: return "O";
  }
  return "O";
}

std::optional<PosTag> parse_pos_tag(std::string_view s) {
  if (s == "N") return PosTag::noun;
  if (s == "V") return PosTag::verb;
  if (s == "ADJ") return PosTag::adjective;
  if (s == "ADV") return PosTag::adverb;
  if (s == "O") return PosTag::other;
  return std::nullopt;
}

std::optional<PosTag> suffix_tag(std::string_view lower_word) {
  for (const auto& rule : kSuffixRules) {
    if (lower_word.size() > rule.suffix.size() + 1 && lower_word.ends_with(rule.suffix)) {
      return rule.tag;
    }
  }
  return std::nullopt;
}

LexicalResources::LexicalResources(Data data) {
  for (auto& [word, tag] : data.tags) data_.tags.emplace(text::to_lower(word), tag);
  for (auto& [word, count] : data.sense_counts) {
    if (count < 1) throw Error("resources", "sense count for '" + word + "' must be >= 1");
    data_.sense_counts.emplace(text::to_lower(word), count);
  }
  for (const auto& w : data.dictionary) data_.dictionary.insert(text::to_lower(w));
  for (const auto& w : data.stopwords) data_.stopwords.insert(text::to_lower(w));
  for (const auto& phrase : data.connectors) {
    std::vector<std::string> words;
    std::istringstream ss(text::to_lower(phrase));
    for (std::string w; ss >> w;) words.push_back(std::move(w));
    if (words.empty()) continue;
    data_.connectors.push_back(phrase);
    connector_phrases_.push_back(std::move(words));
  }
  std::stable_sort(connector_phrases_.begin(), connector_phrases_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::shared_ptr<const LexicalResources> LexicalResources::load(const std::filesystem::path& dir) {
  Data data;
  data.connectors = read_lines(dir / "connectors.txt");
  for (auto& w : read_lines(dir / "dictionary.txt")) data.dictionary.insert(std::move(w));
  for (auto& w : read_lines(dir / "stopwords.txt")) data.stopwords.insert(std::move(w));
  for (auto& [word, value] : read_tsv(dir / "senses.tsv")) {
    int count = 0;
    try {
      count = std::stoi(value);
    } catch (const std::exception&) {
      throw Error("resources", "senses.tsv: bad sense count for '" + word + "'");
    }
    data.sense_counts.emplace(std::move(word), count);
  }
  for (auto& [word, value] : read_tsv(dir / "tags.tsv")) {
    const auto tag = parse_pos_tag(value);
    if (!tag) throw Error("resources", "tags.tsv: unknown tag '" + value + "' for '" + word + "'");
    data.tags.emplace(std::move(word), *tag);
  }
  return std::make_shared<const LexicalResources>(std::move(data));
}

std::optional<PosTag> LexicalResources::lexicon_tag(std::string_view word) const {
  const auto it = data_.tags.find(text::to_lower(word));
  if (it == data_.tags.end()) return std::nullopt;
  return it->second;
}

PosTag LexicalResources::tag(std::string_view word) const {
  if (text::has_digit(word)) return PosTag::other;
  const auto lower = text::to_lower(word);
  if (const auto it = data_.tags.find(lower); it != data_.tags.end()) return it->second;
  return suffix_tag(lower).value_or(PosTag::noun);
}

std::optional<int> LexicalResources::sense_count(std::string_view word) const {
  const auto it = data_.sense_counts.find(text::to_lower(word));
  if (it == data_.sense_counts.end()) return std::nullopt;
  return it->second;
}

bool LexicalResources::in_dictionary(std::string_view word) const {
  return data_.dictionary.contains(text::to_lower(word));
}

bool LexicalResources::is_stopword(std::string_view word) const {
  return data_.stopwords.contains(text::to_lower(word));
}

std::vector<std::string> LexicalResources::lexicon_words(PosTag tag) const {
  std::vector<std::string> out;
  for (const auto& [word, t] : data_.tags) {
    if (t == tag) out.push_back(word);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sopeval
