#include "json.hpp"
#include "sopeval/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"

namespace sopeval {
namespace {

using nlohmann::json;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

std::vector<std::size_t> indices_of(const Corpus& corpus, Label label) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label == label) out.push_back(i);
  }
  return out;
}

void require_labeled(const Corpus& corpus) {
  for (const auto& d : corpus.documents()) {
    if (!d.label) throw Error("corpus", "document '" + d.id + "' is unlabeled");
  }
}

// Interleaves shuffled class lists so that every prefix is stratified: item i
// of a class with n items sorts at (i + 0.5) / n.
std::vector<std::size_t> stratified_order(const Corpus& corpus, std::uint64_t seed) {
  Rng rng(seed);
  struct Keyed {
    double key;
    int cls;
    std::size_t index;
  };
  std::vector<Keyed> keyed;
  int cls = 0;
  for (Label label : {Label::accepted, Label::rejected}) {
    auto members = indices_of(corpus, label);
    rng.shuffle(std::span(members));
    for (std::size_t i = 0; i < members.size(); ++i) {
      keyed.push_back({(static_cast<double>(i) + 0.5) / static_cast<double>(members.size()), cls,
                       members[i]});
    }
    ++cls;
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key < b.key : a.cls < b.cls;
  });
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& k : keyed) order.push_back(k.index);
  return order;
}

}  // namespace

std::string_view to_string(Label label) {
  return label == Label::accepted ? "accepted" : "rejected";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "accepted") return Label::accepted;
  if (s == "rejected") return Label::rejected;
  return std::nullopt;
}

std::string_view to_string(TermWeighting w) { return w == TermWeighting::tfidf ? "tfidf" : "tf"; }

std::optional<TermWeighting> parse_term_weighting(std::string_view s) {
  if (s == "tfidf") return TermWeighting::tfidf;
  if (s == "tf") return TermWeighting::tf;
  return std::nullopt;
}

Corpus::Corpus(std::vector<Document> documents, std::string provenance)
    : documents_(std::move(documents)), provenance_(std::move(provenance)) {
  std::unordered_set<std::string> seen;
  for (const auto& d : documents_) {
    if (d.id.empty()) throw Error("corpus", "document with empty id");
    if (!seen.insert(d.id).second) throw Error("corpus", "duplicate id '" + d.id + "'");
    if (blank(d.text)) throw Error("corpus", "document '" + d.id + "' has empty text");
  }
}

bool Corpus::fully_labeled() const {
  return std::all_of(documents_.begin(), documents_.end(), [](const Document& d) { return d.label.has_value(); });
}

std::size_t Corpus::count(Label label) const {
  return static_cast<std::size_t>(std::count_if(documents_.begin(), documents_.end(),
                                                [&](const Document& d) { return d.label == label; }));
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].id == id) return i;
  }
  return std::nullopt;
}

Corpus Corpus::subset(std::span<const std::size_t> indices) const {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (auto i : indices) docs.push_back(documents_.at(i));
  return Corpus(std::move(docs), provenance_);
}

Corpus parse_corpus(std::istream& in, LabelRequirement labels, std::string provenance) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto where = "line " + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error("corpus", where + ": malformed record (" + e.what() + ")");
    }
    if (!record.is_object()) throw Error("corpus", where + ": malformed record (not an object)");
    Document doc;
    try {
      doc.id = record.at("id").get<std::string>();
      doc.text = record.at("text").get<std::string>();
    } catch (const json::exception&) {
      throw Error("corpus", where + ": malformed record (needs string fields id and text)");
    }
    if (const auto it = record.find("label"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw Error("corpus", where + ": label must be a string");
      doc.label = parse_label(it->get<std::string>());
      if (!doc.label) {
        throw Error("corpus", where + ": unknown label '" + it->get<std::string>() + "'");
      }
    } else if (labels == LabelRequirement::required) {
      throw Error("corpus", where + ": missing label for '" + doc.id + "'");
    }
    if (blank(doc.text)) throw Error("corpus", where + ": document '" + doc.id + "' has empty text");
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs), std::move(provenance));
}

Corpus load_corpus(const std::filesystem::path& path, LabelRequirement labels) {
  std::ifstream in(path);
  if (!in) throw ResourceError("corpus", "cannot open " + path.string());
  return parse_corpus(in, labels, path.string());
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("corpus", "cannot write " + path.string());
  for (const auto& d : corpus.documents()) {
    json record{{"id", d.id}, {"text", d.text}};
    if (d.label) record["label"] = std::string(to_string(*d.label));
    out << record.dump() << '\n';
  }
}

int FoldAssignment::fold_for(std::string_view id) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == id) return fold_of[i];
  }
  throw Error("corpus", "no fold for id '" + std::string(id) + "'");
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

FoldAssignment stratified_kfold(const Corpus& corpus, int k, std::uint64_t seed) {
  require_labeled(corpus);
  if (k < 2) throw Error("corpus", "k must be at least 2");
  const auto smallest = std::min(corpus.count(Label::accepted), corpus.count(Label::rejected));
  if (static_cast<std::size_t>(k) > smallest) {
    throw Error("corpus", "k=" + std::to_string(k) + " exceeds the smallest class size " +
                              std::to_string(smallest));
  }
  FoldAssignment folds;
  folds.k = k;
  folds.fold_of.assign(corpus.size(), -1);
  for (const auto& d : corpus.documents()) folds.ids.push_back(d.id);

  Rng rng(seed);
  std::size_t dealt = 0;
  for (Label label : {Label::accepted, Label::rejected}) {
    auto members = indices_of(corpus, label);
    rng.shuffle(std::span(members));
    for (auto idx : members) folds.fold_of[idx] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
  }
  return folds;
}

HoldoutPartition holdout_split(const Corpus& corpus, double train_fraction, std::uint64_t seed,
                               std::optional<double> tune_fraction) {
  require_labeled(corpus);
  auto valid = [](double f) { return f > 0.0 && f < 1.0; };
  if (!valid(train_fraction)) throw Error("corpus", "train fraction must lie in (0, 1)");
  if (tune_fraction && !valid(*tune_fraction)) throw Error("corpus", "tune fraction must lie in (0, 1)");

  const auto order = stratified_order(corpus, seed);
  const auto n = order.size();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 0.5));
  if (n_train == 0 || n_train >= n) {
    throw Error("corpus", "train fraction " + std::to_string(train_fraction) + " leaves an empty part");
  }
  HoldoutPartition p;
  p.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  if (!tune_fraction) {
    p.test = std::move(rest);
  } else {
    // The remainder is re-interleaved so the tune/test cut is stratified too.
    const auto sub = corpus.subset(rest);
    const auto sub_order = stratified_order(sub, derive_seed(seed, 1));
    const auto n_tune = static_cast<std::size_t>(
        std::floor(static_cast<double>(rest.size()) * *tune_fraction + 0.5));
    if (n_tune == 0 || n_tune >= rest.size()) {
      throw Error("corpus", "tune fraction " + std::to_string(*tune_fraction) + " leaves an empty part");
    }
    for (std::size_t i = 0; i < sub_order.size(); ++i) {
      (i < n_tune ? p.tune : p.test).push_back(rest[sub_order[i]]);
    }
  }
  return p;
}

ReferenceCorpus::ReferenceCorpus(text::TermBag term_counts, std::map<std::string, double> document_frequency,
                                 std::size_t document_count, std::set<std::string> excluded_ids,
                                 std::vector<std::string> member_ids, TermWeighting weighting)
    : term_counts_(std::move(term_counts)),
      df_(std::move(document_frequency)),
      document_count_(document_count),
      excluded_ids_(std::move(excluded_ids)),
      member_ids_(std::move(member_ids)),
      weighting_(weighting) {
  double sq = 0.0;
  for (const auto& [term, count] : term_counts_) {
    const double w = count * idf(term);
    sq += w * w;
  }
  norm_ = std::sqrt(sq);
}

double ReferenceCorpus::idf(const std::string& term) const {
  if (weighting_ == TermWeighting::tf) return 1.0;
  const auto it = df_.find(term);
  const double df = it == df_.end() ? 0.0 : it->second;
  return std::log((1.0 + static_cast<double>(document_count_)) / (1.0 + df)) + 1.0;
}

ReferenceCorpus ReferenceCorpus::without(const BagEntry& entry) const {
  if (excluded_ids_.contains(entry.id)) throw Error("corpus", "document '" + entry.id + "' is already excluded");
  // Counts are sums of integers, so subtracting them restores the exact values
  // a fresh build would produce.
  auto drop = [](auto& map, const std::string& term, double amount) {
    const auto it = map.find(term);
    if (it == map.end()) throw Error("corpus", "reference does not contain term '" + term + "'");
    it->second -= amount;
    if (it->second == 0.0) map.erase(it);
  };
  auto df = df_;
  for (const auto& [term, c] : *entry.bag) drop(df, term, 1.0);
  auto counts = term_counts_;
  auto members = member_ids_;
  if (entry.label == Label::accepted) {
    const auto it = std::find(members.begin(), members.end(), entry.id);
    if (it == members.end()) throw Error("corpus", "document '" + entry.id + "' is not a reference member");
    members.erase(it);
    if (members.empty()) throw Error("corpus", "no accepted documents left for the reference corpus");
    for (const auto& [term, c] : *entry.bag) drop(counts, term, c);
  }
  auto excluded = excluded_ids_;
  excluded.insert(entry.id);
  return ReferenceCorpus(std::move(counts), std::move(df), document_count_ - 1, std::move(excluded),
                         std::move(members), weighting_);
}

ReferenceCorpus build_reference(std::span<const BagEntry> entries, const std::set<std::string>& exclude_ids,
                                TermWeighting weighting) {
  text::TermBag counts;
  std::map<std::string, double> df;
  std::size_t n_docs = 0;
  std::vector<std::string> members;
  for (const auto& e : entries) {
    if (exclude_ids.contains(e.id)) continue;
    ++n_docs;
    for (const auto& [term, c] : *e.bag) df[term] += 1.0;
    if (e.label != Label::accepted) continue;
    members.push_back(e.id);
    for (const auto& [term, c] : *e.bag) counts[term] += c;
  }
  if (members.empty()) throw Error("corpus", "no accepted documents left for the reference corpus");
  return ReferenceCorpus(std::move(counts), std::move(df), n_docs, exclude_ids, std::move(members), weighting);
}

ReferenceCorpus build_reference(const Corpus& corpus, const std::set<std::string>& exclude_ids,
                                TermWeighting weighting) {
  require_labeled(corpus);
  std::vector<text::TermBag> bags;
  bags.reserve(corpus.size());
  for (const auto& d : corpus.documents()) bags.push_back(text::term_bag(text::tokenize(d.text)));
  std::vector<BagEntry> entries;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    entries.push_back({corpus[i].id, *corpus[i].label, &bags[i]});
  }
  return build_reference(entries, exclude_ids, weighting);
}

}  // namespace sopeval
