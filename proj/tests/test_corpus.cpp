#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sopeval/corpus.hpp"
#include "sopeval/error.hpp"
#include "support.hpp"

using namespace sopeval;

namespace {

std::size_t class_count(const Corpus& c, std::span<const std::size_t> idx, Label label) {
  return std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return c[i].label == label; });
}

}  // namespace

TEST_CASE("parse_corpus reads well-formed records") {
  std::istringstream in(R"({"id":"s1","text":"First essay.","label":"accepted"}

{"id":"s2","text":"Second essay.","label":"rejected"}
)");
  const auto c = parse_corpus(in);
  CHECK(c.size() == 2);
  CHECK(c[0].id == "s1");
  CHECK(c[1].label == Label::rejected);
  CHECK(c.fully_labeled());
}

TEST_CASE("parse_corpus rejects duplicate ids, blank text and malformed lines") {
  {
    std::istringstream in(R"({"id":"s1","text":"a.","label":"accepted"}
{"id":"s1","text":"b.","label":"rejected"})");
    CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("s1"), Error);
  }
  {
    std::istringstream in(R"({"id":"s1","text":"   ","label":"accepted"})");
    CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("empty text"), Error);
  }
  {
    std::istringstream in("{\"id\":\"s1\",\"text\":\"a.\",\"label\":\"accepted\"}\n{not json\n");
    CHECK_THROWS_WITH_AS(parse_corpus(in), doctest::Contains("line 2"), Error);
  }
  {
    std::istringstream in(R"({"id":"s1","text":"a."})");
    CHECK_THROWS_AS(parse_corpus(in), Error);
    std::istringstream again(R"({"id":"s1","text":"a."})");
    CHECK_FALSE(parse_corpus(again, LabelRequirement::optional)[0].label.has_value());
  }
}

TEST_CASE("load_corpus round-trips a 25/25 file") {
  const auto dir = testing::scratch_dir("corpus-io");
  const auto c = testing::toy_corpus(25, 25);
  save_corpus(c, dir / "c.jsonl");
  const auto back = load_corpus(dir / "c.jsonl");
  CHECK(back.size() == 50);
  CHECK(back.count(Label::accepted) == 25);
  CHECK(back.count(Label::rejected) == 25);
  CHECK(back[17].text == c[17].text);
  CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl"), ResourceError);
}

TEST_CASE("stratified_kfold: 50 documents, k=10 gives folds of 5 with 2 or 3 per class") {
  const auto c = testing::toy_corpus(25, 25);
  const auto folds = stratified_kfold(c, 10, 3);
  for (int f = 0; f < 10; ++f) {
    const auto test = folds.test_indices(f);
    CHECK(test.size() == 5);
    const auto acc = class_count(c, test, Label::accepted);
    CHECK(acc >= 2);
    CHECK(acc <= 3);
  }
}

TEST_CASE("stratified_kfold: k=2 gives 25/25 with 12/13 class splits") {
  const auto c = testing::toy_corpus(25, 25);
  const auto folds = stratified_kfold(c, 2, 11);
  std::multiset<std::size_t> acc_counts;
  for (int f = 0; f < 2; ++f) {
    const auto test = folds.test_indices(f);
    CHECK(test.size() == 25);
    acc_counts.insert(class_count(c, test, Label::accepted));
  }
  CHECK(acc_counts == std::multiset<std::size_t>{12, 13});
}

TEST_CASE("stratified_kfold is deterministic and seed-sensitive") {
  const auto c = testing::toy_corpus(25, 25);
  const auto a = stratified_kfold(c, 5, 42);
  const auto b = stratified_kfold(c, 5, 42);
  CHECK(a.fold_of == b.fold_of);
  CHECK(stratified_kfold(c, 5, 43).fold_of != a.fold_of);
}

TEST_CASE("stratified_kfold rejects k beyond the smallest class and unlabeled documents") {
  CHECK_THROWS_AS(stratified_kfold(testing::toy_corpus(3, 10), 4, 0), Error);
  CHECK_THROWS_AS(stratified_kfold(testing::toy_corpus(5, 5), 1, 0), Error);
  Corpus unlabeled({{"x", "a b.", std::nullopt}, {"y", "c d.", Label::accepted}});
  CHECK_THROWS_WITH_AS(stratified_kfold(unlabeled, 2, 0), doctest::Contains("unlabeled"), Error);
}

TEST_CASE("train and test indices partition the corpus") {
  const auto c = testing::toy_corpus(13, 9);
  const auto folds = stratified_kfold(c, 3, 5);
  for (int f = 0; f < 3; ++f) {
    auto train = folds.train_indices(f);
    const auto test = folds.test_indices(f);
    train.insert(train.end(), test.begin(), test.end());
    std::sort(train.begin(), train.end());
    CHECK(train.size() == c.size());
    CHECK(std::adjacent_find(train.begin(), train.end()) == train.end());
  }
  CHECK(folds.fold_for("a0") == folds.fold_of[0]);
  CHECK_THROWS_AS(folds.fold_for("nope"), Error);
}

TEST_CASE("holdout_split sizes") {
  const auto c = testing::toy_corpus(25, 25);
  const auto two = holdout_split(c, 0.5, 9);
  CHECK(two.train.size() == 25);
  CHECK(two.test.size() == 25);
  CHECK(two.tune.empty());

  const auto three = holdout_split(c, 0.5, 9, 0.5);
  CHECK(three.train.size() == 25);
  CHECK(three.tune.size() >= 12);
  CHECK(three.tune.size() <= 13);
  CHECK(three.tune.size() + three.test.size() == 25);
  std::set<std::size_t> all(three.train.begin(), three.train.end());
  all.insert(three.tune.begin(), three.tune.end());
  all.insert(three.test.begin(), three.test.end());
  CHECK(all.size() == 50);

  // stratified: the training half holds 12 or 13 of each class
  const auto acc = class_count(c, three.train, Label::accepted);
  CHECK(acc >= 12);
  CHECK(acc <= 13);

  CHECK_THROWS_AS(holdout_split(testing::toy_corpus(2, 2), 0.99, 1), Error);
  CHECK_THROWS_AS(holdout_split(c, 0.0, 1), Error);
  CHECK_THROWS_AS(holdout_split(c, 1.0, 1), Error);
}

TEST_CASE("build_reference pools accepted documents only") {
  Corpus c({{"A1", "alpha beta beta.", Label::accepted}, {"R1", "gamma delta.", Label::rejected}});
  const auto ref = build_reference(c, {});
  CHECK(ref.member_ids() == std::vector<std::string>{"A1"});
  CHECK(ref.term_counts() == text::TermBag{{"alpha", 1}, {"beta", 2}});
  CHECK(ref.document_count() == 2);
}

TEST_CASE("build_reference exclusion leaves only the other document's mass") {
  Corpus c({{"A1", "unique words here.", Label::accepted}, {"A2", "other words.", Label::accepted}});
  const auto ref = build_reference(c, {"A1"});
  CHECK(ref.term_counts() == text::TermBag{{"other", 1}, {"words", 1}});
  CHECK(ref.term_counts().count("unique") == 0);
  CHECK_THROWS_WITH_AS(build_reference(c, {"A1", "A2"}), doctest::Contains("no accepted documents"), Error);
}

TEST_CASE("ReferenceCorpus::without equals a rebuild with the document excluded") {
  const auto c = testing::toy_corpus(4, 3);
  std::vector<text::TokenizedDoc> docs;
  std::vector<text::TermBag> bags;
  for (const auto& d : c.documents()) bags.push_back(text::term_bag(text::tokenize(d.text)));
  std::vector<BagEntry> entries;
  for (std::size_t i = 0; i < c.size(); ++i) entries.push_back({c[i].id, *c[i].label, &bags[i]});

  const auto full = build_reference(entries, {});
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto loo = full.without(entries[i]);
    CHECK(loo == build_reference(entries, {c[i].id}));
  }
  const auto once = full.without(entries[0]);
  CHECK_THROWS_AS(once.without(entries[0]), Error);
}

TEST_CASE("leave-one-out drops every term unique to the excluded essay") {
  Corpus c({{"A1", "shared zebra.", Label::accepted},
            {"A2", "shared words.", Label::accepted},
            {"R1", "zebra again.", Label::rejected}});
  const auto ref = build_reference(c, {"A1"});
  CHECK(ref.term_counts().count("zebra") == 0);
  // document frequency still counts the rejected essay
  CHECK(ref.document_frequency().at("zebra") == 1.0);
}

TEST_CASE("smoothed idf") {
  Corpus c({{"A1", "x y.", Label::accepted}, {"A2", "x z.", Label::accepted}, {"R1", "w.", Label::rejected}});
  const auto ref = build_reference(c, {});
  CHECK(ref.idf("x") == doctest::Approx(std::log(4.0 / 3.0) + 1.0).epsilon(1e-15));
  CHECK(ref.idf("y") == doctest::Approx(std::log(4.0 / 2.0) + 1.0).epsilon(1e-15));
  CHECK(ref.idf("unseen") == doctest::Approx(std::log(4.0) + 1.0).epsilon(1e-15));
  const auto tf = build_reference(c, {}, TermWeighting::tf);
  CHECK(tf.idf("x") == 1.0);
}
