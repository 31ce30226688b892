#include "sopeval/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sopeval/error.hpp"
#include "sopeval/hash.hpp"
#include "sopeval/parallel.hpp"
#include "sopeval/rng.hpp"

namespace sopeval {
namespace {

using nlohmann::json;
using features::FeatureSet;

classifiers::LabeledMatrix labeled(const CorpusFeatures& cf, const features::FeatureConfig& config,
                                   std::span<const std::size_t> rows, const ReferenceSet* refs,
                                   const std::optional<features::Standardizer>& standardizer, Matrix* raw_out) {
  auto raw = feature_rows(cf, config, rows, refs);
  classifiers::LabeledMatrix out{standardizer ? standardizer->apply(raw) : raw, cf.labels(rows)};
  if (raw_out) *raw_out = std::move(raw);
  return out;
}

json reference_json(const ReferenceCorpus& r) {
  return {{"term_counts", r.term_counts()},
          {"document_frequency", r.document_frequency()},
          {"document_count", r.document_count()},
          {"excluded_ids", r.excluded_ids()},
          {"member_ids", r.member_ids()},
          {"weighting", to_string(r.weighting())}};
}

ReferenceCorpus reference_from(const json& j) {
  const auto w = parse_term_weighting(j.at("weighting").get<std::string>());
  if (!w) throw Error("pipeline", "unknown term weighting in model file");
  return ReferenceCorpus(j.at("term_counts").get<text::TermBag>(),
                         j.at("document_frequency").get<std::map<std::string, double>>(),
                         j.at("document_count").get<std::size_t>(),
                         j.at("excluded_ids").get<std::set<std::string>>(),
                         j.at("member_ids").get<std::vector<std::string>>(), *w);
}

}  // namespace

CorpusFeatures::CorpusFeatures(Corpus corpus, features::FeatureConfig config, features::Resources resources,
                               unsigned threads)
    : corpus_(std::move(corpus)), config_(std::move(config)), resources_(std::move(resources)) {
  features::check_resources(config_, resources_);
  analyses_.resize(corpus_.size());
  parallel_for(corpus_.size(), threads, [&](std::size_t i) {
    try {
      analyses_[i] = features::analyze(corpus_[i].text, config_, resources_);
    } catch (const Error& e) {
      throw Error(e.module(), "document '" + corpus_[i].id + "': " +
                                  std::string(e.what()).substr(e.module().size() + 2));
    }
  });
}

std::vector<BagEntry> CorpusFeatures::bag_entries(std::span<const std::size_t> indices) const {
  std::vector<BagEntry> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    const auto& d = corpus_[i];
    if (!d.label) throw Error("pipeline", "document '" + d.id + "' is unlabeled");
    out.push_back({d.id, *d.label, &analyses_[i].bag});
  }
  return out;
}

std::vector<int> CorpusFeatures::labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    const auto& d = corpus_[i];
    if (!d.label) throw Error("pipeline", "document '" + d.id + "' is unlabeled");
    out.push_back(to_sign(*d.label));
  }
  return out;
}

const ReferenceCorpus& ReferenceSet::for_document(std::size_t index) const {
  const auto it = leave_one_out.find(index);
  return it == leave_one_out.end() ? shared : it->second;
}

ReferenceSet build_references(const CorpusFeatures& cf, features::ReferenceMode mode, TermWeighting weighting,
                              std::span<const std::size_t> training) {
  std::vector<std::size_t> pool(training.begin(), training.end());
  if (mode == features::ReferenceMode::paper_compat) {
    pool.resize(cf.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  }
  const auto entries = cf.bag_entries(pool);
  ReferenceSet refs{build_reference(entries, {}, weighting), {}};
  for (std::size_t k = 0; k < pool.size(); ++k) refs.leave_one_out.emplace(pool[k], refs.shared.without(entries[k]));
  return refs;
}

Matrix feature_rows(const CorpusFeatures& cf, const features::FeatureConfig& config,
                    std::span<const std::size_t> indices, const ReferenceSet* references,
                    std::vector<std::vector<std::string>>* warnings) {
  Matrix out;
  for (auto i : indices) {
    const ReferenceCorpus* ref = references ? &references->for_document(i) : nullptr;
    auto fv = features::assemble(cf.analysis(i), config, cf.resources(), ref);
    if (out.empty()) out = Matrix(0, fv.values.size());
    out.append_row(fv.values);
    if (warnings) warnings->push_back(std::move(fv.warnings));
  }
  if (out.cols() == 0 && !indices.empty()) throw Error("pipeline", "feature configuration yields no features");
  return out;
}

std::vector<double> FittedPipeline::decision_values(const CorpusFeatures& cf,
                                                    std::span<const std::size_t> indices) const {
  const auto raw = feature_rows(cf, config, indices, references ? &*references : nullptr);
  const auto x = standardizer ? standardizer->apply(raw) : raw;
  std::vector<double> out;
  out.reserve(indices.size());
  for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(classifiers::decision_value(model, x.row(r)));
  return out;
}

FittedPipeline fit_pipeline(const CorpusFeatures& cf, const features::FeatureConfig& config,
                            const classifiers::ClassifierSpec& spec, std::span<const std::size_t> training,
                            std::uint64_t seed, std::span<const std::size_t> tune) {
  for (auto s : config.sets) {
    if (!cf.config().uses(s)) {
      throw Error("pipeline", "feature set " + std::string(features::to_string(s)) + " was not analyzed");
    }
  }
  FittedPipeline p{config, spec, {}, {}, std::nullopt, {}, std::nullopt, {}};
  std::vector<std::size_t> partition(training.begin(), training.end());
  if (spec.needs_tune_set() && tune.empty()) {
    const auto sub = cf.corpus().subset(training);
    const auto split = holdout_split(sub, 1.0 - spec.tune_fraction, derive_seed(seed, 7));
    for (auto i : split.train) p.fit_rows.push_back(training[i]);
    for (auto i : split.test) p.tune_rows.push_back(training[i]);
  } else {
    p.fit_rows = partition;
    if (spec.needs_tune_set()) {
      p.tune_rows.assign(tune.begin(), tune.end());
      partition.insert(partition.end(), tune.begin(), tune.end());
    }
  }
  if (config.uses(FeatureSet::SE)) {
    p.references = build_references(cf, config.reference_mode, config.term_weighting, partition);
  }
  const ReferenceSet* refs = p.references ? &*p.references : nullptr;
  p.fit_raw = feature_rows(cf, config, p.fit_rows, refs);
  if (spec.standardizes()) p.standardizer = features::Standardizer::fit(p.fit_raw);
  classifiers::LabeledMatrix fit{p.standardizer ? p.standardizer->apply(p.fit_raw) : p.fit_raw,
                                 cf.labels(p.fit_rows)};
  std::optional<classifiers::LabeledMatrix> tune_data;
  if (spec.needs_tune_set()) tune_data = labeled(cf, config, p.tune_rows, refs, p.standardizer, nullptr);
  p.model = classifiers::fit_classifier(spec, fit, tune_data ? &*tune_data : nullptr);
  return p;
}

std::string text_fingerprint(std::string_view text) { return fnv1a_hex(text); }

TrainedModel train_model(const CorpusFeatures& cf, const features::FeatureConfig& config,
                         const classifiers::ClassifierSpec& spec, std::uint64_t seed) {
  std::vector<std::size_t> all(cf.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto fitted = fit_pipeline(cf, config, spec, all, seed);

  TrainedModel m;
  m.config = config;
  m.spec = spec;
  m.embedding_dimension = cf.resources().embeddings ? cf.resources().embeddings->dimension() : 0;
  m.feature_names = features::feature_names(config, m.embedding_dimension);
  m.standardizer = std::move(fitted.standardizer);
  m.classifier = std::move(fitted.model);
  if (fitted.references) m.reference = std::move(fitted.references->shared);
  if (config.uses(FeatureSet::SE) && config.reference_mode == features::ReferenceMode::paper_compat) {
    for (std::size_t i = 0; i < cf.size(); ++i) {
      const auto& d = cf.corpus()[i];
      m.members.push_back({d.id, *d.label, text_fingerprint(d.text), cf.analysis(i).bag});
    }
  }
  m.seed = seed;
  m.training_size = cf.size();
  auto j = to_json(m);
  j.erase("model_id");
  m.model_id = std::string(classifiers::to_string(spec.kind)) + "-" + fnv1a_hex(j.dump()).substr(0, 12);
  return m;
}

json to_json(const TrainedModel& m) {
  json names = json::array();
  for (const auto& n : m.feature_names) names.push_back({{"set", features::to_string(n.set)}, {"name", n.name}});
  json members = json::array();
  for (const auto& r : m.members) {
    members.push_back(
        {{"id", r.id}, {"label", to_string(r.label)}, {"fingerprint", r.fingerprint}, {"bag", r.bag}});
  }
  json j{{"format", "sopeval-model"},
         {"format_version", TrainedModel::kFormatVersion},
         {"model_id", m.model_id},
         {"feature_config", m.config.to_json()},
         {"feature_config_hash", m.config.hash()},
         {"classifier_spec", m.spec.to_json()},
         {"feature_names", std::move(names)},
         {"embedding_dimension", m.embedding_dimension},
         {"seed", m.seed},
         {"training_size", m.training_size},
         {"classifier", classifiers::to_json(m.classifier)},
         {"members", std::move(members)}};
  j["standardizer"] = m.standardizer ? json{{"means", m.standardizer->means()}, {"stddevs", m.standardizer->stddevs()}}
                                     : json(nullptr);
  j["reference"] = m.reference ? reference_json(*m.reference) : json(nullptr);
  return j;
}

TrainedModel model_from_json(const json& j) {
  TrainedModel m;
  try {
    if (j.at("format").get<std::string>() != "sopeval-model") throw Error("pipeline", "not a model file");
    const auto version = j.at("format_version").get<int>();
    if (version != TrainedModel::kFormatVersion) {
      throw Error("pipeline", "unsupported model format version " + std::to_string(version) + " (expected " +
                                  std::to_string(TrainedModel::kFormatVersion) + ")");
    }
    m.model_id = j.at("model_id").get<std::string>();
    m.config = features::FeatureConfig::from_json(j.at("feature_config"));
    if (m.config.hash() != j.at("feature_config_hash").get<std::string>()) {
      throw Error("pipeline", "feature config hash does not match the stored config");
    }
    m.spec = classifiers::ClassifierSpec::from_json(j.at("classifier_spec"));
    for (const auto& n : j.at("feature_names")) {
      const auto set = features::parse_feature_set(n.at("set").get<std::string>());
      if (!set) throw Error("pipeline", "unknown feature set in model file");
      m.feature_names.push_back({*set, n.at("name").get<std::string>()});
    }
    m.embedding_dimension = j.at("embedding_dimension").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.training_size = j.at("training_size").get<std::size_t>();
    m.classifier = classifiers::classifier_from_json(j.at("classifier"));
    if (const auto& s = j.at("standardizer"); !s.is_null()) {
      m.standardizer.emplace(s.at("means").get<std::vector<double>>(), s.at("stddevs").get<std::vector<double>>());
    }
    if (const auto& r = j.at("reference"); !r.is_null()) m.reference = reference_from(r);
    for (const auto& r : j.at("members")) {
      const auto label = parse_label(r.at("label").get<std::string>());
      if (!label) throw Error("pipeline", "bad member label in model file");
      m.members.push_back({r.at("id").get<std::string>(), *label, r.at("fingerprint").get<std::string>(),
                           r.at("bag").get<text::TermBag>()});
    }
  } catch (const json::exception& e) {
    throw Error("pipeline", std::string("malformed model file: ") + e.what());
  }
  if (m.feature_names != features::feature_names(m.config, m.embedding_dimension)) {
    throw Error("pipeline", "model feature names do not match its feature config");
  }
  if (classifiers::input_dimension(m.classifier) != m.feature_names.size() ||
      (m.standardizer && m.standardizer->means().size() != m.feature_names.size())) {
    throw Error("pipeline", "model payload dimension does not match its feature names");
  }
  if (m.config.uses(FeatureSet::SE) && !m.reference) throw Error("pipeline", "model lacks its reference corpus");
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("pipeline", "cannot write " + path.string());
  out << to_json(model).dump(1) << '\n';
  if (!out) throw Error("pipeline", "failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("pipeline", "cannot open model " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("pipeline", path.string() + ": truncated or malformed model file (" + e.what() + ")");
  }
  return model_from_json(j);
}

Evaluation evaluate_text(const TrainedModel& model, const features::Resources& resources, std::string_view text) {
  features::check_resources(model.config, resources);
  const bool needs_embeddings = model.config.uses(FeatureSet::WE) || model.config.uses(FeatureSet::SE);
  if (needs_embeddings && resources.embeddings->dimension() != model.embedding_dimension) {
    throw ResourceError("pipeline", "embedding dimension " + std::to_string(resources.embeddings->dimension()) +
                                        " does not match the model's " + std::to_string(model.embedding_dimension));
  }
  const auto analysis = features::analyze(text, model.config, resources);

  std::optional<ReferenceCorpus> own;
  const ReferenceCorpus* ref = model.reference ? &*model.reference : nullptr;
  if (ref && !model.members.empty()) {
    const auto fp = text_fingerprint(text);
    for (const auto& member : model.members) {
      if (member.fingerprint == fp && member.bag == analysis.bag) {
        own = ref->without({member.id, member.label, &member.bag});
        ref = &*own;
        break;
      }
    }
  }
  auto fv = features::assemble(analysis, model.config, resources, ref);
  if (fv.names != model.feature_names) throw Error("pipeline", "extracted feature names differ from the model's");
  const auto x = model.standardizer ? model.standardizer->apply(fv.values) : fv.values;

  Evaluation e;
  e.decision_value = classifiers::decision_value(model.classifier, x);
  e.label = classifiers::label_for(e.decision_value);
  for (std::size_t i = 0; i < fv.names.size(); ++i) {
    e.breakdown.push_back({fv.names[i].name, fv.names[i].set, fv.values[i], x[i]});
  }
  e.warnings = std::move(fv.warnings);
  e.model_id = model.model_id;
  return e;
}

json to_json(const Evaluation& e) {
  json breakdown = json::array();
  for (const auto& b : e.breakdown) {
    breakdown.push_back(
        {{"name", b.name}, {"set", features::to_string(b.set)}, {"raw", b.raw}, {"standardized", b.standardized}});
  }
  return {{"label", to_string(e.label)},
          {"decision_value", e.decision_value},
          {"feature_breakdown", std::move(breakdown)},
          {"warnings", e.warnings},
          {"model_id", e.model_id}};
}

}  // namespace sopeval
