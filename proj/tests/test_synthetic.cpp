#include <algorithm>
#include <set>

#include "doctest.h"
#include "sopeval/synthetic.hpp"
#include "sopeval/text.hpp"
#include "support.hpp"

using namespace sopeval;

TEST_CASE("synthetic corpus shape and determinism") {
  const auto& lex = *testing::bundled_lexicon();
  synthetic::Options options;
  options.seed = 1;
  const auto a = synthetic::generate(lex, options);
  CHECK(a.corpus.size() == 50);
  CHECK(a.corpus.count(Label::accepted) == 25);
  CHECK(a.corpus.count(Label::rejected) == 25);
  CHECK(a.corpus[0].id == "acc-001");
  CHECK(a.corpus[49].id == "rej-025");
  CHECK(a.embeddings->dimension() == 300);
  CHECK(a.embeddings->vocab_size() == a.vocabulary.size());

  const auto b = synthetic::generate(lex, options);
  for (std::size_t i = 0; i < a.corpus.size(); ++i) CHECK(a.corpus[i].text == b.corpus[i].text);
  for (const auto& w : {a.vocabulary.front(), a.vocabulary.back()}) {
    const auto x = *a.embeddings->find(w);
    const auto y = *b.embeddings->find(w);
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
  }

  options.seed = 2;
  CHECK(synthetic::generate(lex, options).corpus[0].text != a.corpus[0].text);
}

TEST_CASE("accepted essays are clean, rejected essays carry noise") {
  const auto& lex = *testing::bundled_lexicon();
  const auto& data = testing::synthetic_dataset();
  for (const auto& d : data.corpus.documents()) {
    const auto doc = text::tokenize(d.text);
    const auto errors = text::spell_errors(doc, lex);
    const auto oov = embedding::oov_count(doc, *data.embeddings);
    if (d.label == Label::accepted) {
      CHECK(errors == 0);
      CHECK(oov == 0);
    } else {
      const double words = double(doc.word_count());
      CHECK(errors >= 1);
      // misspellings and replacements are both out of vocabulary
      CHECK(double(oov) >= 0.5 * (0.03 + 0.10) * words);
    }
  }
}

TEST_CASE("sentence pool words are all in the dictionary") {
  const auto& lex = *testing::bundled_lexicon();
  for (const auto& s : synthetic::sentence_pool()) {
    const auto doc = text::tokenize(s);
    CHECK(text::spell_errors(doc, lex) == 0);
  }
}
