#include "sopeval/features.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sopeval/error.hpp"
#include "sopeval/hash.hpp"

namespace sopeval::features {
namespace {

using nlohmann::json;

constexpr const char* kTextualNames[] = {
    "noun_ratio", "adj_ratio",          "adv_ratio",           "verb_ratio",
    "discourse_count", "fres",          "words_per_sentence",  "words_per_paragraph",
    "avg_word_length", "coref_distance", "polysemy_degree"};

std::string we_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "we_%03zu", i);
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(FeatureSet set) {
  switch (set) {
    case FeatureSet::T: return "T";
    case FeatureSet::WE: return "WE";
    case FeatureSet::SE: return "SE";
  }
  return "T";
}

std::optional<FeatureSet> parse_feature_set(std::string_view s) {
  std::string upper(s);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "T") return FeatureSet::T;
  if (upper == "WE") return FeatureSet::WE;
  if (upper == "SE") return FeatureSet::SE;
  return std::nullopt;
}

std::string_view to_string(ReferenceMode mode) {
  return mode == ReferenceMode::fold_train ? "fold_train" : "paper_compat";
}

std::optional<ReferenceMode> parse_reference_mode(std::string_view s) {
  if (s == "fold_train") return ReferenceMode::fold_train;
  if (s == "paper_compat") return ReferenceMode::paper_compat;
  return std::nullopt;
}

std::set<FeatureSet> FeatureConfig::parse_sets(std::string_view spec) {
  std::set<FeatureSet> sets;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto end = spec.find('+', start);
    if (end == std::string_view::npos) end = spec.size();
    auto part = spec.substr(start, end - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    const auto set = parse_feature_set(part);
    if (!set) throw Error("features", "unknown feature set '" + std::string(part) + "' (use T, WE, SE)");
    sets.insert(*set);
    start = end + 1;
  }
  if (sets.empty()) throw Error("features", "at least one feature set must be enabled");
  return sets;
}

std::string FeatureConfig::sets_label() const {
  std::string out;
  for (auto s : sets) {
    if (!out.empty()) out += " + ";
    out += to_string(s);
  }
  return out;
}

json FeatureConfig::to_json() const {
  json j;
  j["sets"] = json::array();
  for (auto s : sets) j["sets"].push_back(std::string(to_string(s)));
  j["ne_count"] = ne_count;
  j["adjacent_similarity"] = adjacent_similarity;
  j["normalize_counts"] = normalize_counts;
  j["term_weighting"] = std::string(to_string(term_weighting));
  j["reference_mode"] = std::string(to_string(reference_mode));
  j["resources"] = {{"resource_dir", resource_dir}, {"embeddings", embeddings_path}, {"glove", glove_path}};
  return j;
}

FeatureConfig FeatureConfig::from_json(const json& j) {
  FeatureConfig c;
  try {
    c.sets.clear();
    for (const auto& s : j.at("sets")) {
      const auto set = parse_feature_set(s.get<std::string>());
      if (!set) throw Error("features", "unknown feature set '" + s.get<std::string>() + "'");
      c.sets.insert(*set);
    }
    c.ne_count = j.value("ne_count", false);
    c.adjacent_similarity = j.value("adjacent_similarity", false);
    c.normalize_counts = j.value("normalize_counts", false);
    const auto tw = parse_term_weighting(j.value("term_weighting", std::string("tfidf")));
    const auto rm = parse_reference_mode(j.value("reference_mode", std::string("fold_train")));
    if (!tw || !rm) throw Error("features", "bad term_weighting or reference_mode");
    c.term_weighting = *tw;
    c.reference_mode = *rm;
    if (const auto it = j.find("resources"); it != j.end()) {
      c.resource_dir = it->value("resource_dir", std::string());
      c.embeddings_path = it->value("embeddings", std::string());
      c.glove_path = it->value("glove", std::string());
    }
  } catch (const json::exception& e) {
    throw Error("features", std::string("malformed feature config: ") + e.what());
  }
  if (c.sets.empty()) throw Error("features", "at least one feature set must be enabled");
  return c;
}

std::string FeatureConfig::hash() const {
  auto j = to_json();
  j.erase("resources");
  return fnv1a_hex(j.dump());
}

std::vector<FeatureName> feature_names(const FeatureConfig& config, std::size_t embedding_dimension) {
  std::vector<FeatureName> names;
  if (config.uses(FeatureSet::T)) {
    for (const char* n : kTextualNames) names.push_back({FeatureSet::T, n});
    if (config.ne_count) names.push_back({FeatureSet::T, "ne_count"});
  }
  if (config.uses(FeatureSet::WE)) {
    for (std::size_t i = 0; i < embedding_dimension; ++i) names.push_back({FeatureSet::WE, we_name(i)});
  }
  if (config.uses(FeatureSet::SE)) {
    names.push_back({FeatureSet::SE, "cosine_reference"});
    names.push_back({FeatureSet::SE, "spell_errors"});
    names.push_back({FeatureSet::SE, "oov_count"});
    if (config.adjacent_similarity) {
      names.push_back({FeatureSet::SE, "adj_sim_mean"});
      names.push_back({FeatureSet::SE, "adj_sim_max"});
    }
  }
  return names;
}

void check_resources(const FeatureConfig& config, const Resources& resources) {
  if (config.sets.empty()) throw Error("features", "at least one feature set must be enabled");
  const bool t = config.uses(FeatureSet::T);
  const bool we = config.uses(FeatureSet::WE);
  const bool se = config.uses(FeatureSet::SE);
  if ((t || se) && !resources.lexical) {
    throw ResourceError("features", "lexical resources (--resources) are required for the T and SE sets");
  }
  if ((we || se) && !resources.embeddings) {
    throw ResourceError("features", "word embeddings (--embeddings) are required for the WE and SE sets");
  }
  if (se && config.adjacent_similarity && !resources.glove) {
    throw ResourceError("features", "GloVe embeddings (--glove) are required for adjacent-sentence similarity");
  }
}

DocumentAnalysis analyze(std::string_view text, const FeatureConfig& config, const Resources& resources) {
  DocumentAnalysis a{text::tokenize(text), {}, {}, {}, {}, {}};
  a.bag = text::term_bag(a.tokens);
  const bool t = config.uses(FeatureSet::T);
  const bool we = config.uses(FeatureSet::WE);
  const bool se = config.uses(FeatureSet::SE);
  if ((t || se) && resources.lexical) {
    a.textual = text::textual_features(a.tokens, *resources.lexical,
                                       {.ne_count = config.ne_count, .normalize_counts = config.normalize_counts});
  }
  if ((we || se) && resources.embeddings) {
    a.average = embedding::avg_word_vector(a.tokens, *resources.embeddings);
    a.oov_count = embedding::oov_count(a.tokens, *resources.embeddings);
  }
  if (se && config.adjacent_similarity && resources.glove && resources.lexical) {
    a.adjacent = embedding::adjacent_sentence_similarity(a.tokens, *resources.glove, *resources.lexical);
  }
  return a;
}

double cosine_to_reference(const text::TermBag& bag, const ReferenceCorpus& reference) {
  if (reference.norm() == 0.0) return 0.0;
  const auto& ref = reference.term_counts();
  double dot = 0.0;
  double sq = 0.0;
  for (const auto& [term, count] : bag) {
    const double idf = reference.idf(term);
    const double w = count * idf;
    sq += w * w;
    if (const auto it = ref.find(term); it != ref.end()) dot += w * it->second * idf;
  }
  if (sq == 0.0 || dot == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(sq) * reference.norm()), 0.0, 1.0);
}

double cosine_to_reference(const text::TokenizedDoc& doc, const ReferenceCorpus& reference) {
  return cosine_to_reference(text::term_bag(doc), reference);
}

FeatureVector assemble(const DocumentAnalysis& a, const FeatureConfig& config, const Resources& resources,
                       const ReferenceCorpus* reference) {
  check_resources(config, resources);
  const bool se = config.uses(FeatureSet::SE);
  if (se && !reference) throw ResourceError("features", "reference corpus is required for the SE set");

  FeatureVector fv;
  const std::size_t dim = resources.embeddings ? resources.embeddings->dimension() : 0;
  fv.names = feature_names(config, dim);
  fv.values.reserve(fv.names.size());

  if (config.uses(FeatureSet::T)) {
    const auto& t = a.textual.value();
    fv.values.insert(fv.values.end(),
                     {t.pos.noun, t.pos.adjective, t.pos.adverb, t.pos.verb, t.discourse_count, t.fres,
                      t.lengths.words_per_sentence, t.lengths.words_per_paragraph, t.lengths.word_length,
                      t.coref_distance, t.polysemy_degree});
    if (config.ne_count) fv.values.push_back(t.ne_count.value());
  }
  if (config.uses(FeatureSet::WE)) {
    const auto& avg = a.average.value();
    fv.values.insert(fv.values.end(), avg.values.begin(), avg.values.end());
  }
  if (se) {
    fv.values.push_back(cosine_to_reference(a.bag, *reference));
    fv.values.push_back(a.textual.value().spell_errors);
    fv.values.push_back(static_cast<double>(a.oov_count.value()));
    if (config.adjacent_similarity) {
      const auto& adj = a.adjacent.value();
      fv.values.push_back(adj.mean);
      fv.values.push_back(adj.max);
      if (adj.degenerate) fv.warnings.emplace_back("no adjacent-sentence content-word pairs; similarity set to 0");
      if (adj.zero_vector_seen) fv.warnings.emplace_back("zero-norm word vector in adjacent-sentence similarity");
    }
  }
  if ((config.uses(FeatureSet::WE) || se) && a.average && a.average->degenerate) {
    fv.warnings.emplace_back("no token has a word vector; averaged vector is zero");
  }
  if (a.oov_count && a.tokens.word_count() > 0 &&
      static_cast<double>(*a.oov_count) > 0.2 * static_cast<double>(a.tokens.word_count())) {
    fv.warnings.emplace_back("high out-of-vocabulary rate: " + std::to_string(*a.oov_count) + " of " +
                             std::to_string(a.tokens.word_count()) + " words");
  }
  return fv;
}

FeatureVector extract(std::string_view text, const FeatureConfig& config, const Resources& resources,
                      const ReferenceCorpus* reference) {
  check_resources(config, resources);
  return assemble(analyze(text, config, resources), config, resources, reference);
}

Standardizer::Standardizer(std::vector<double> means, std::vector<double> stddevs)
    : means_(std::move(means)), stddevs_(std::move(stddevs)) {
  if (means_.size() != stddevs_.size()) throw Error("features", "standardizer means/stddevs length mismatch");
}

Standardizer Standardizer::fit(const Matrix& train) {
  if (train.empty()) throw Error("features", "cannot fit a standardizer on an empty matrix");
  const auto n = static_cast<double>(train.rows());
  std::vector<double> means(train.cols(), 0.0), stddevs(train.cols(), 0.0);
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < train.cols(); ++c) means[c] += train(r, c);
  }
  for (auto& m : means) m /= n;
  for (std::size_t r = 0; r < train.rows(); ++r) {
    for (std::size_t c = 0; c < train.cols(); ++c) {
      const double d = train(r, c) - means[c];
      stddevs[c] += d * d;
    }
  }
  for (auto& s : stddevs) s = std::sqrt(s / n);
  return Standardizer(std::move(means), std::move(stddevs));
}

bool Standardizer::is_constant(std::size_t c) const {
  return stddevs_[c] <= 1e-12 * std::max(1.0, std::abs(means_[c]));
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != means_.size()) {
    throw Error("features", "standardizer expects " + std::to_string(means_.size()) + " columns, got " +
                                std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    out[c] = is_constant(c) ? 0.0 : (row[c] - means_[c]) / stddevs_[c];
  }
  return out;
}

Matrix Standardizer::apply(const Matrix& m) const {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = apply(m.row(r));
    std::copy(row.begin(), row.end(), out.row(r).begin());
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string render_feature_matrix(std::span<const std::string> ids, std::span<const FeatureName> names,
                                  const Matrix& values) {
  std::ostringstream out;
  out << "id";
  for (const auto& n : names) out << ',' << n.name;
  out << '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    out << csv_field(ids[r]);
    for (double v : values.row(r)) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace sopeval::features
