#include <string>

#include "doctest.h"
#include "sopeval/error.hpp"
#include "sopeval/rng.hpp"
#include "sopeval/text.hpp"
#include "support.hpp"

using namespace sopeval;
using namespace sopeval::text;

namespace {

LexicalResources custom_lexicon() {
  LexicalResources::Data d;
  d.tags = {{"dogs", PosTag::noun}, {"bark", PosTag::verb}, {"the", PosTag::other}};
  d.connectors = {"however", "moreover", "on the other hand"};
  d.sense_counts = {{"bank", 10}, {"run", 30}, {"a", 1}};
  d.dictionary = {"the", "cat", "sat", "on", "mat"};
  d.stopwords = {"the", "on"};
  return LexicalResources(std::move(d));
}

std::vector<std::string> words(const TokenizedDoc& doc) {
  std::vector<std::string> out;
  for (const auto& t : doc.tokens())
    if (t.is_word) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("tokenize: sentences, paragraphs and words") {
  const auto doc = tokenize("Hi there. Go now.");
  CHECK(doc.paragraph_count() == 1);
  CHECK(doc.sentence_count() == 2);
  CHECK(words(doc) == std::vector<std::string>{"Hi", "there", "Go", "now"});

  const auto two = tokenize("A.\n\nB.");
  CHECK(two.paragraph_count() == 2);
  CHECK(two.paragraph_range(0).end - two.paragraph_range(0).begin == 1);
  CHECK(two.paragraph_range(1).end - two.paragraph_range(1).begin == 1);

  CHECK_THROWS_WITH_AS(tokenize("???"), "text: empty document", Error);
  CHECK_THROWS_AS(tokenize(""), Error);
}

TEST_CASE("tokenize: offsets point back into the source and increase") {
  const std::string text = "First line, with commas!\n\nSecond \"quoted\" paragraph. Done?  Yes.";
  const auto doc = tokenize(text);
  std::size_t last = 0;
  bool first = true;
  for (const auto& t : doc.tokens()) {
    CHECK(t.offset + t.text.size() <= text.size());
    CHECK(text.compare(t.offset, t.text.size(), t.text) == 0);
    if (!first) CHECK(t.offset > last);
    last = t.offset;
    first = false;
  }
  for (std::size_t s = 0; s < doc.sentence_count(); ++s) CHECK_FALSE(doc.sentence(s).empty());
}

TEST_CASE("pos_ratios") {
  const auto lex = custom_lexicon();
  const auto r = pos_ratios(tokenize("Dogs bark loudly."), lex);
  CHECK(r.noun == doctest::Approx(1.0 / 3.0));
  CHECK(r.adjective == 0.0);
  CHECK(r.adverb == doctest::Approx(1.0 / 3.0));  // "-ly" suffix rule
  CHECK(r.verb == doctest::Approx(1.0 / 3.0));

  const auto none = pos_ratios(tokenize("the the the"), lex);
  CHECK(none.noun + none.adjective + none.adverb + none.verb == 0.0);

  // bundled lexicon tags "bark" as its most frequent noun reading
  const auto bundled = pos_ratios(tokenize("Dogs bark loudly."), *testing::bundled_lexicon());
  CHECK(bundled.noun == doctest::Approx(2.0 / 3.0));
  CHECK(bundled.adverb == doctest::Approx(1.0 / 3.0));
  CHECK(bundled.verb == 0.0);
  CHECK(pos_ratios(tokenize("the the the"), *testing::bundled_lexicon()).noun == 0.0);
}

TEST_CASE("pos ratios never sum above one") {
  const auto& lex = *testing::bundled_lexicon();
  const auto pool = testing::synthetic_dataset().vocabulary;
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    const auto n = 1 + rng.uniform_index(40);
    for (std::uint64_t i = 0; i < n; ++i) text += pool[rng.uniform_index(pool.size())] + (i % 7 == 6 ? ". " : " ");
    const auto r = pos_ratios(tokenize(text), lex);
    for (double v : {r.noun, r.adjective, r.adverb, r.verb}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(r.noun + r.adjective + r.adverb + r.verb <= 1.0 + 1e-12);
  }
}

TEST_CASE("discourse_count") {
  const auto lex = custom_lexicon();
  CHECK(discourse_count(tokenize("However, I tried. Moreover, I won."), lex) == 2);
  CHECK(discourse_count(tokenize("Nothing to see."), lex) == 0);
  CHECK(discourse_count(tokenize("On the other hand, it rained."), lex) == 1);
  CHECK(discourse_count(tokenize("However, I tried. Moreover, I won."), *testing::bundled_lexicon()) == 2);
}

TEST_CASE("syllable heuristic") {
  CHECK(syllable_count("cat") == 1);
  CHECK(syllable_count("the") == 1);
  CHECK(syllable_count("make") == 1);
  CHECK(syllable_count("table") == 2);
  CHECK(syllable_count("university") == 5);
  CHECK(syllable_count("rhythm") == 1);
  CHECK(syllable_count("hmm") == 1);
}

TEST_CASE("fres") {
  CHECK(fres(tokenize("cat")) == doctest::Approx(121.22).epsilon(1e-12));
  // 6 words, 1 sentence, 6 one-syllable words: 206.835 - 6.09 - 84.6
  CHECK(fres(tokenize("The cat sat on the mat.")) == doctest::Approx(116.145).epsilon(1e-12));
  const double longer = fres(tokenize("The cat sat on the university."));
  CHECK(longer < fres(tokenize("The cat sat on the mat.")));

  const auto doc = tokenize("Readability depends on sentences. Short ones help! Do they?");
  const auto c = readability_counts(doc);
  const double expected = 206.835 - 1.015 * double(c.words) / double(c.sentences) -
                          84.6 * double(c.syllables) / double(c.words);
  CHECK(fres(doc) == expected);
}

TEST_CASE("length_features") {
  const auto a = length_features(tokenize("Hi there. Go now."));
  CHECK(a.words_per_sentence == 2.0);
  CHECK(a.words_per_paragraph == 4.0);
  CHECK(a.word_length == 3.0);

  const auto b = length_features(tokenize("Hello"));
  CHECK(b.words_per_sentence == 1.0);
  CHECK(b.words_per_paragraph == 1.0);
  CHECK(b.word_length == 5.0);

  const auto c = length_features(tokenize("One two three.\n\nFour five six."));
  CHECK(c.words_per_paragraph == 3.0);
}

TEST_CASE("coref_distance") {
  const auto& lex = *testing::bundled_lexicon();
  CHECK(coref_distance(tokenize("John arrived. He sat."), lex) == 3);
  CHECK(coref_distance(tokenize("Quick brown foxes jump."), custom_lexicon()) == 0);
  const std::string text = "The student wrote. The student read.";
  CHECK(coref_distance(tokenize(text + " " + text), lex) > coref_distance(tokenize(text), lex));
}

TEST_CASE("polysemy_degree") {
  const auto lex = custom_lexicon();
  CHECK(polysemy_degree(tokenize("bank run"), lex) == 20.0);
  CHECK(polysemy_degree(tokenize("zzz qqq"), lex) == 0.0);
  CHECK(polysemy_degree(tokenize("a a a"), lex) == 1.0);
}

TEST_CASE("spell_errors") {
  const auto& lex = *testing::bundled_lexicon();
  CHECK(spell_errors(tokenize("Ths is a tst"), lex) == 2);
  CHECK(spell_errors(tokenize("this is a test"), lex) == 0);
  CHECK(spell_errors(tokenize("tst a is Ths"), lex) == 2);
  CHECK(spell_errors(tokenize("route 66 in 2019"), lex) == 0);
}

TEST_CASE("ne_count") {
  CHECK(ne_count(tokenize("I met Mary in Paris.")) == 2);
  CHECK(ne_count(tokenize("all lower case here.")) == 0);
  CHECK(ne_count(tokenize("Start here. Then there.")) == 0);
}

TEST_CASE("self-concatenation keeps means and doubles counts") {
  const auto& lex = *testing::bundled_lexicon();
  const std::string text =
      "However, my research in science grew. Moreover, the bank approved it.\n\nThs tst failed.";
  const auto once = textual_features(tokenize(text), lex);
  const auto twice = textual_features(tokenize(text + "\n\n" + text), lex);
  CHECK(twice.pos.noun == doctest::Approx(once.pos.noun).epsilon(1e-12));
  CHECK(twice.pos.verb == doctest::Approx(once.pos.verb).epsilon(1e-12));
  CHECK(twice.lengths.word_length == doctest::Approx(once.lengths.word_length).epsilon(1e-12));
  CHECK(twice.polysemy_degree == doctest::Approx(once.polysemy_degree).epsilon(1e-12));
  CHECK(twice.discourse_count == 2 * once.discourse_count);
  CHECK(twice.spell_errors == 2 * once.spell_errors);
}

TEST_CASE("textual_features: determinism, ranges and normalization") {
  const auto& lex = *testing::bundled_lexicon();
  const auto& essay = testing::synthetic_dataset().corpus[0].text;
  const auto doc = tokenize(essay);
  const auto a = textual_features(doc, lex, {.ne_count = true});
  const auto b = textual_features(tokenize(essay), lex, {.ne_count = true});
  CHECK(a.fres == b.fres);
  CHECK(a.coref_distance == b.coref_distance);
  CHECK(a.ne_count.has_value());
  CHECK(a.lengths.words_per_sentence > 0);
  CHECK(a.discourse_count >= 0);
  CHECK_FALSE(textual_features(doc, lex).ne_count.has_value());

  const auto norm = textual_features(doc, lex, {.normalize_counts = true});
  CHECK(norm.discourse_count == doctest::Approx(a.discourse_count * 1000.0 / double(doc.word_count())));
  CHECK(norm.coref_distance == a.coref_distance);
}
