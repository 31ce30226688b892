#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sopeval/error.hpp"
#include "sopeval/evaluation.hpp"
#include "sopeval/pipeline.hpp"
#include "support.hpp"

using namespace sopeval;

namespace {

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

classifiers::ClassifierSpec spec_for(classifiers::ModelKind kind) {
  classifiers::ClassifierSpec s;
  s.kind = kind;
  s.forest.n_trees = 21;
  s.net.epochs = 80;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("build_references: fold_train pools the training partition only") {
  const auto& cf = testing::synthetic_features();
  const auto folds = stratified_kfold(cf.corpus(), 5, 1);
  const auto train = folds.train_indices(0);
  const auto refs = build_references(cf, features::ReferenceMode::fold_train, TermWeighting::tfidf, train);
  CHECK(refs.shared.document_count() == train.size());
  CHECK(refs.leave_one_out.size() == train.size());
  for (auto i : folds.test_indices(0)) {
    CHECK(&refs.for_document(i) == &refs.shared);
    const auto& members = refs.shared.member_ids();
    CHECK(std::find(members.begin(), members.end(), cf.corpus()[i].id) == members.end());
  }
  const auto& loo = refs.for_document(train[0]);
  CHECK(loo.excluded_ids().contains(cf.corpus()[train[0]].id));
}

TEST_CASE("build_references: compatibility mode pools the whole corpus") {
  const auto& cf = testing::synthetic_features();
  const std::vector<std::size_t> train{0, 1, 2, 30, 31};
  const auto refs = build_references(cf, features::ReferenceMode::paper_compat, TermWeighting::tfidf, train);
  CHECK(refs.shared.document_count() == cf.size());
  CHECK(refs.leave_one_out.size() == cf.size());
}

TEST_CASE("fit_pipeline: standardizer and rows") {
  const auto& cf = testing::synthetic_features();
  const auto config = testing::config_with("SE+WE");
  const auto train = iota_indices(40);
  const auto svm = fit_pipeline(cf, config, spec_for(classifiers::ModelKind::svm), train, 3);
  CHECK(svm.fit_rows == train);
  CHECK(svm.tune_rows.empty());
  REQUIRE(svm.standardizer);
  CHECK(*svm.standardizer == features::Standardizer::fit(svm.fit_raw));
  CHECK(svm.fit_raw.cols() == 303);

  const auto forest = fit_pipeline(cf, config, spec_for(classifiers::ModelKind::rfdt), train, 3);
  CHECK_FALSE(forest.standardizer);

  const auto ffnn = fit_pipeline(cf, config, spec_for(classifiers::ModelKind::ffnn), train, 3);
  CHECK(ffnn.tune_rows.size() == 8);
  CHECK(ffnn.fit_rows.size() == 32);
  CHECK(ffnn.standardizer->means().size() == 303);
}

TEST_CASE("leakage audit accepts honest pipelines and catches tampering") {
  const auto& cf = testing::synthetic_features();
  const auto config = testing::config_with("T+SE");
  const auto folds = stratified_kfold(cf.corpus(), 5, 4);
  const auto train = folds.train_indices(1);
  const auto fitted = fit_pipeline(cf, config, spec_for(classifiers::ModelKind::lr), train, 9);
  const auto record = evaluation::audit_fold(cf, fitted, 1, train);
  CHECK(record.reference_checked);
  CHECK(record.standardizer_checked);
  CHECK(record.references_compared == train.size() + 1);

  // a reference that also saw a test essay
  auto leaky = fitted;
  auto with_test = train;
  with_test.push_back(folds.test_indices(1).front());
  leaky.references = build_references(cf, features::ReferenceMode::fold_train, TermWeighting::tfidf, with_test);
  CHECK_THROWS_WITH_AS(evaluation::audit_fold(cf, leaky, 1, train), doctest::Contains("leakage audit"), Error);

  // a standardizer fitted on more rows than the training partition
  auto skewed = fitted;
  auto raw = fitted.fit_raw;
  raw(0, 0) += 1.0;
  skewed.standardizer = features::Standardizer::fit(raw);
  CHECK_THROWS_WITH_AS(evaluation::audit_fold(cf, skewed, 1, train), doctest::Contains("standardizer"), Error);
}

TEST_CASE("trained model round trip for all five kinds") {
  const auto& cf = testing::synthetic_features();
  const auto res = testing::synthetic_resources();
  const auto config = testing::config_with("SE+WE");
  const auto dir = testing::scratch_dir("model-roundtrip");
  for (auto kind : {classifiers::ModelKind::svm, classifiers::ModelKind::lr, classifiers::ModelKind::rfdt,
                    classifiers::ModelKind::mlp, classifiers::ModelKind::ffnn}) {
    CAPTURE(classifiers::to_string(kind));
    const auto model = train_model(cf, config, spec_for(kind), 5);
    CHECK(model.model_id.rfind(std::string(classifiers::to_string(kind)) + "-", 0) == 0);
    const auto path = dir / (std::string(classifiers::to_string(kind)) + ".json");
    save_model(model, path);
    const auto back = load_model(path);
    CHECK(back.model_id == model.model_id);
    CHECK(back.feature_names == model.feature_names);
    CHECK(back.config_hash() == model.config_hash());
    for (std::size_t i = 0; i < cf.size(); i += 7) {
      const auto a = evaluate_text(model, res, cf.corpus()[i].text);
      const auto b = evaluate_text(back, res, cf.corpus()[i].text);
      CHECK(a.decision_value == b.decision_value);
      CHECK(a.label == b.label);
    }
  }
}

TEST_CASE("model files: version, truncation and feature-name order") {
  const auto& cf = testing::synthetic_features();
  const auto model = train_model(cf, testing::config_with("SE"), spec_for(classifiers::ModelKind::lr), 1);
  const auto dir = testing::scratch_dir("model-errors");
  save_model(model, dir / "m.json");
  const auto text = slurp(dir / "m.json");

  auto j = nlohmann::json::parse(text);
  j["format_version"] = 99;
  CHECK_THROWS_WITH_AS(model_from_json(j), doctest::Contains("version 99"), Error);

  std::ofstream(dir / "cut.json") << text.substr(0, text.size() / 2);
  CHECK_THROWS_WITH_AS(load_model(dir / "cut.json"), doctest::Contains("truncated or malformed"), Error);

  auto swapped = nlohmann::json::parse(text);
  std::swap(swapped["feature_names"][0], swapped["feature_names"][1]);
  CHECK_THROWS_AS(model_from_json(swapped), Error);

  auto tampered = nlohmann::json::parse(text);
  tampered["feature_config"]["adjacent_similarity"] = true;
  CHECK_THROWS_AS(model_from_json(tampered), Error);

  CHECK_THROWS_AS(load_model(dir / "absent.json"), ResourceError);
}

TEST_CASE("evaluate_text: breakdown, labels and resource checks") {
  const auto& cf = testing::synthetic_features();
  const auto res = testing::synthetic_resources();
  const auto model = train_model(cf, testing::config_with("SE+WE"), spec_for(classifiers::ModelKind::svm), 7);
  const auto e = evaluate_text(model, res, cf.corpus()[0].text);
  CHECK(e.breakdown.size() == model.feature_names.size());
  CHECK(e.label == classifiers::label_for(e.decision_value));
  CHECK(e.model_id == model.model_id);
  for (std::size_t i = 0; i < e.breakdown.size(); ++i) CHECK(e.breakdown[i].name == model.feature_names[i].name);

  const auto j = to_json(e);
  for (const char* key : {"label", "decision_value", "feature_breakdown", "warnings", "model_id"})
    CHECK(j.contains(key));

  CHECK_THROWS_AS(evaluate_text(model, res, "???"), Error);
  auto small = std::make_shared<embedding::EmbeddingTable>(2);
  const std::vector<float> v{1, 0};
  small->add("word", v);
  features::Resources wrong{res.lexical, small, small};
  CHECK_THROWS_AS(evaluate_text(model, wrong, cf.corpus()[0].text), ResourceError);
}

TEST_CASE("compatibility-mode model scores a memorized accepted essay as accepted") {
  const auto& cf = testing::synthetic_features();
  const auto res = testing::synthetic_resources();
  auto config = testing::config_with("SE+WE");
  config.reference_mode = features::ReferenceMode::paper_compat;
  const auto model = train_model(cf, config, spec_for(classifiers::ModelKind::svm), 7);
  CHECK(model.members.size() == cf.size());
  for (std::size_t i = 0; i < cf.size(); ++i) {
    if (cf.corpus()[i].label != Label::accepted) continue;
    const auto e = evaluate_text(model, res, cf.corpus()[i].text);
    CHECK(e.decision_value > 0.0);
    CHECK(e.label == Label::accepted);
  }
}

TEST_CASE("extracted feature rows are identical for any thread count") {
  const auto& data = testing::synthetic_dataset();
  const CorpusFeatures one(data.corpus, features::FeatureConfig{}, testing::synthetic_resources(), 1);
  const CorpusFeatures many(data.corpus, features::FeatureConfig{}, testing::synthetic_resources(), 8);
  const auto idx = iota_indices(data.corpus.size());
  const auto refs = build_references(one, features::ReferenceMode::fold_train, TermWeighting::tfidf, idx);
  const auto refs_many = build_references(many, features::ReferenceMode::fold_train, TermWeighting::tfidf, idx);
  CHECK(feature_rows(one, features::FeatureConfig{}, idx, &refs) ==
        feature_rows(many, features::FeatureConfig{}, idx, &refs_many));
}
