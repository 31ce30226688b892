#include "sopeval/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "sopeval/error.hpp"
#include "sopeval/simd/kernels.hpp"

namespace sopeval::embedding {
namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const auto start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw Error("embedding", "dimension must be positive");
}

void EmbeddingTable::add(std::string word, std::span<const float> vector) {
  if (vector.size() != dimension_) {
    throw Error("embedding", "vector for '" + word + "' has " + std::to_string(vector.size()) +
                                 " components, expected " + std::to_string(dimension_));
  }
  if (!std::all_of(vector.begin(), vector.end(), [](float v) { return std::isfinite(v); })) {
    throw Error("embedding", "vector for '" + word + "' has non-finite entries");
  }
  if (index_.contains(word)) return;
  index_.emplace(std::move(word), values_.size() / dimension_);
  values_.insert(values_.end(), vector.begin(), vector.end());
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) it = index_.find(text::to_lower(word));
  if (it == index_.end()) return std::nullopt;
  return std::span<const float>(values_.data() + it->second * dimension_, dimension_);
}

EmbeddingTable parse_embeddings(std::istream& in, std::optional<std::size_t> expected_dimension) {
  std::optional<EmbeddingTable> table;
  std::vector<float> row;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    const auto where = "line " + std::to_string(line_no);
    if (!table && fields.size() == 2) {
      std::size_t count = 0, dim = 0;
      if (parse_number(fields[0], count) && parse_number(fields[1], dim)) {
        if (expected_dimension && dim != *expected_dimension) {
          throw Error("embedding", where + ": header dimension " + std::to_string(dim) + " != expected " +
                                       std::to_string(*expected_dimension));
        }
        table.emplace(dim);
        continue;
      }
    }
    const auto dim = fields.size() - 1;
    if (dim == 0) throw Error("embedding", where + ": row has no vector components");
    if (!table) {
      if (expected_dimension && dim != *expected_dimension) {
        throw Error("embedding", where + ": dimension " + std::to_string(dim) + " != expected " +
                                     std::to_string(*expected_dimension));
      }
      table.emplace(dim);
    }
    if (dim != table->dimension()) {
      throw Error("embedding", where + ": row has " + std::to_string(dim) + " components, expected " +
                                   std::to_string(table->dimension()));
    }
    row.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!parse_number(fields[i + 1], row[i]) || !std::isfinite(row[i])) {
        throw Error("embedding", where + ": bad number '" + std::string(fields[i + 1]) + "'");
      }
    }
    table->add(std::string(fields[0]), row);
  }
  if (!table) throw Error("embedding", "no vectors found");
  return std::move(*table);
}

std::shared_ptr<const EmbeddingTable> load_embeddings(const std::filesystem::path& path,
                                                      std::optional<std::size_t> expected_dimension) {
  std::ifstream in(path);
  if (!in) throw ResourceError("embedding", "cannot open " + path.string());
  try {
    return std::make_shared<const EmbeddingTable>(parse_embeddings(in, expected_dimension));
  } catch (const Error& e) {
    throw Error("embedding", path.filename().string() + ": " + std::string(e.what()).substr(e.module().size() + 2));
  }
}

void save_embeddings(const EmbeddingTable& table, std::span<const std::string> words,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("embedding", "cannot write " + path.string());
  out << words.size() << ' ' << table.dimension() << '\n';
  char buf[64];
  for (const auto& w : words) {
    const auto v = table.find(w);
    if (!v) throw Error("embedding", "word '" + w + "' not in table");
    out << w;
    for (float x : *v) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
}

AverageVector avg_word_vector(const text::TokenizedDoc& doc, const EmbeddingTable& table) {
  AverageVector avg;
  avg.values.assign(table.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& t : doc.tokens()) {
    if (!t.is_word) continue;
    if (const auto v = table.find(t.text)) {
      simd::accumulate(*v, avg.values);
      ++found;
    }
  }
  if (found == 0) {
    avg.degenerate = true;
    return avg;
  }
  const double inv = 1.0 / static_cast<double>(found);
  for (auto& x : avg.values) x *= inv;
  return avg;
}

std::size_t oov_count(const text::TokenizedDoc& doc, const EmbeddingTable& table) {
  std::size_t count = 0;
  for (const auto& t : doc.tokens()) {
    if (t.is_word && !table.contains(t.text)) ++count;
  }
  return count;
}

double cosine(std::span<const float> a, std::span<const float> b) {
  const double na = simd::dot(a, a);
  const double nb = simd::dot(b, b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = simd::dot(a, b) / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

SimilarityStats adjacent_sentence_similarity(const text::TokenizedDoc& doc, const EmbeddingTable& table,
                                             const LexicalResources& stopwords) {
  struct ContentWord {
    std::span<const float> vec;
    double norm;
  };
  std::vector<std::vector<ContentWord>> sentences(doc.sentence_count());
  for (std::size_t s = 0; s < doc.sentence_count(); ++s) {
    for (const auto& t : doc.sentence(s)) {
      if (!t.is_word || !text::is_alphabetic(t.text) || stopwords.is_stopword(t.text)) continue;
      if (const auto v = table.find(t.text)) sentences[s].push_back({*v, std::sqrt(simd::dot(*v, *v))});
    }
  }
  SimilarityStats stats;
  double sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < sentences.size(); ++s) {
    for (const auto& u : sentences[s]) {
      for (const auto& v : sentences[s + 1]) {
        double c = 0.0;
        if (u.norm == 0.0 || v.norm == 0.0) {
          stats.zero_vector_seen = true;
        } else {
          c = std::clamp(simd::dot(u.vec, v.vec) / (u.norm * v.norm), -1.0, 1.0);
        }
        sum += c;
        best = std::max(best, c);
        ++stats.pairs;
      }
    }
  }
  if (stats.pairs == 0) {
    stats.degenerate = true;
    return stats;
  }
  stats.mean = sum / static_cast<double>(stats.pairs);
  stats.max = best;
  return stats;
}

}  // namespace sopeval::embedding
