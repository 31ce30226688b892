#include "sopeval/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>

#include "sopeval/error.hpp"
#include "sopeval/hash.hpp"
#include "sopeval/rng.hpp"
#include "sopeval/text.hpp"

namespace sopeval::synthetic {
namespace {

struct PoolEntry {
  const char* section;
  const char* sentence;
};

constexpr PoolEntry kPool[] = {
    {"opening", "I am applying to the graduate program in computer science because I want to build a career in research."},
    {"opening", "My interest in computing began when I wrote my first program to solve a simple puzzle."},
    {"opening", "Since then I have been fascinated by the way careful reasoning can turn an idea into a working system."},
    {"opening", "I believe that a doctoral degree is the natural next step in my academic development."},
    {"opening", "The strong research culture of your department is the main reason I am applying."},
    {"opening", "Over the past four years I have discovered that I enjoy open problems more than routine tasks."},
    {"opening", "I hope to contribute original work while learning from experienced faculty members."},
    {"opening", "This statement describes my preparation, my research experience, and my goals for the future."},
    {"opening", "My long term goal is to become a professor who leads a productive research group."},
    {"opening", "I am drawn to problems where theory and practice meet in a meaningful way."},
    {"opening", "Graduate study will give me the depth and independence that I still lack."},
    {"opening", "I want to spend the next several years working on questions that matter to society."},
    {"background", "During my undergraduate studies I completed courses in algorithms, operating systems, and machine learning."},
    {"background", "My grades in mathematics were consistently strong, especially in linear algebra and probability."},
    {"background", "I finished my degree near the top of my class while working part time as a teaching assistant."},
    {"background", "As a teaching assistant I learned to explain difficult concepts clearly to other students."},
    {"background", "My course project on program translation taught me how to design large programs with clean interfaces."},
    {"background", "I also took several electives in statistics, which gave me a solid foundation for data analysis."},
    {"background", "Outside the classroom I organized a weekly study group for students preparing for programming contests."},
    {"background", "Our team placed first in the regional contest, which strengthened my confidence and discipline."},
    {"background", "I spent one summer as an intern at a software company, where I improved the performance of a database service."},
    {"background", "The internship showed me how engineering decisions affect thousands of users every day."},
    {"background", "In my final year I completed an honors thesis under the supervision of a senior professor."},
    {"background", "These experiences prepared me well for the demands of graduate level coursework."},
    {"research", "My first research project studied how neural networks can classify short documents with limited data."},
    {"research", "I collected a new corpus, designed several baseline models, and measured their accuracy with cross validation."},
    {"research", "The results showed that simple features can rival complex models when training data is scarce."},
    {"research", "We presented this work as a poster at a national student conference."},
    {"research", "Later I joined a laboratory that works on efficient algorithms for large graphs."},
    {"research", "In that group I developed a parallel method that reduced the running time of a clustering algorithm."},
    {"research", "I wrote most of the code, ran the experiments, and drafted the section describing our evaluation."},
    {"research", "The paper was accepted at an international workshop, and I gave the oral presentation myself."},
    {"research", "Through this project I learned how to read the literature critically and to formulate precise hypotheses."},
    {"research", "I also learned that negative results are valuable when they are reported honestly."},
    {"research", "My advisor encouraged me to question my assumptions and to design careful experiments."},
    {"research", "Research taught me patience, because many ideas failed before one of them finally worked."},
    {"research", "I enjoyed the process of turning a vague question into a concrete claim that could be tested."},
    {"research", "These projects convinced me that I want to pursue research as a profession."},
    {"goals", "In graduate school I plan to study natural language processing and its applications in education."},
    {"goals", "I am particularly interested in models that give useful feedback to students about their writing."},
    {"goals", "Such systems could help learners who do not have access to personal tutors."},
    {"goals", "I would like to combine statistical methods with linguistic knowledge to build more reliable tools."},
    {"goals", "Several faculty members in your department work on exactly these problems."},
    {"goals", "I have read recent papers from your language group and found their approach to evaluation very convincing."},
    {"goals", "I would be excited to contribute to their ongoing work on automatic assessment."},
    {"goals", "Your program also offers courses in optimization and statistics that would deepen my technical skills."},
    {"goals", "I am confident that the collaborative environment of your department will help me grow as a researcher."},
    {"goals", "After completing my degree I intend to continue in academia and mentor students of my own."},
    {"goals", "I also hope to release my software as open source so that others can build on it."},
    {"goals", "I want my research to have a visible and positive impact beyond the laboratory."},
    {"closing", "In summary, my academic record, research experience, and clear goals make me a strong candidate."},
    {"closing", "I am prepared for the challenges of doctoral study and eager to begin."},
    {"closing", "I am grateful for the opportunity to apply and for your consideration of my application."},
    {"closing", "I look forward to joining a community of curious and dedicated researchers."},
    {"closing", "Thank you for taking the time to review my statement."},
    {"closing", "I believe that your program is the ideal place for me to pursue my goals."},
    {"closing", "With your support I am certain that I can make a lasting contribution to the field."},
    {"closing", "I am ready to commit the next years of my life to research and learning."},
};

struct Section {
  std::vector<std::string> sentences;
};

const std::vector<Section>& sections() {
  static const std::vector<Section> out = [] {
    std::vector<Section> s;
    std::string current;
    for (const auto& e : kPool) {
      if (current != e.section) {
        s.emplace_back();
        current = e.section;
      }
      s.back().sentences.emplace_back(e.sentence);
    }
    return s;
  }();
  return out;
}

using Essay = std::vector<std::vector<std::string>>;  // paragraphs of sentences

// Two to four sentences per section, kept in pool order.
Essay sample_essay(Rng& rng) {
  Essay essay;
  for (const auto& section : sections()) {
    std::vector<std::size_t> idx(section.sentences.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    rng.shuffle(std::span(idx));
    const auto take = std::min<std::size_t>(idx.size(), 2 + rng.uniform_index(3));
    idx.resize(take);
    std::sort(idx.begin(), idx.end());
    auto& paragraph = essay.emplace_back();
    for (auto i : idx) paragraph.push_back(section.sentences[i]);
  }
  return essay;
}

void scramble(Essay& essay, Rng& rng) {
  std::vector<std::string> all;
  for (auto& p : essay) all.insert(all.end(), p.begin(), p.end());
  rng.shuffle(std::span(all));
  std::size_t k = 0;
  for (auto& p : essay) {
    for (auto& s : p) s = all[k++];
  }
}

// A word slot: sentence text split on spaces, with trailing punctuation apart.
struct Slot {
  std::size_t paragraph, sentence, word;
};

std::string core_of(const std::string& token) {
  std::size_t end = token.size();
  while (end > 0 && !std::isalpha(static_cast<unsigned char>(token[end - 1]))) --end;
  return token.substr(0, end);
}

std::string with_case_of(const std::string& original, std::string replacement) {
  if (!original.empty() && std::isupper(static_cast<unsigned char>(original[0]))) {
    replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
  }
  return replacement;
}

class Corrupter {
 public:
  Corrupter(const LexicalResources& lexicon, const std::set<std::string>& vocabulary)
      : lexicon_(lexicon), vocabulary_(vocabulary) {
    for (auto tag : {PosTag::noun, PosTag::verb, PosTag::adjective, PosTag::adverb}) {
      auto& list = replacements_[static_cast<int>(tag)];
      for (auto& w : lexicon.lexicon_words(tag)) {
        if (text::is_alphabetic(w) && lexicon.in_dictionary(w) && !lexicon.is_stopword(w) &&
            !vocabulary.contains(w)) {
          list.push_back(std::move(w));
        }
      }
    }
  }

  void corrupt(Essay& essay, const Options& options, Rng& rng) const {
    std::vector<std::vector<std::vector<std::string>>> words;
    std::vector<Slot> eligible;
    std::size_t word_tokens = 0;
    for (std::size_t p = 0; p < essay.size(); ++p) {
      auto& pw = words.emplace_back();
      for (std::size_t s = 0; s < essay[p].size(); ++s) {
        auto& sw = pw.emplace_back(split(essay[p][s]));
        for (std::size_t w = 0; w < sw.size(); ++w) {
          const auto core = core_of(sw[w]);
          ++word_tokens;
          if (core.size() >= 4 && !lexicon_.is_stopword(core)) eligible.push_back({p, s, w});
        }
      }
    }
    rng.shuffle(std::span(eligible));
    const auto rate_count = [&](double rate) {
      return static_cast<std::size_t>(std::floor(rate * static_cast<double>(word_tokens) + 0.5));
    };
    const auto n_miss = std::min(eligible.size(), rate_count(options.misspelling_rate));
    const auto n_oov = std::min(eligible.size() - n_miss, rate_count(options.oov_rate));
    for (std::size_t i = 0; i < n_miss + n_oov; ++i) {
      const auto& slot = eligible[i];
      auto& token = words[slot.paragraph][slot.sentence][slot.word];
      const auto core = core_of(token);
      const auto tail = token.substr(core.size());
      const auto lower = text::to_lower(core);
      const auto next = i < n_miss ? misspell(lower, rng) : replacement(lower, rng);
      token = with_case_of(core, next) + tail;
    }
    for (std::size_t p = 0; p < essay.size(); ++p) {
      for (std::size_t s = 0; s < essay[p].size(); ++s) essay[p][s] = join(words[p][s]);
    }
  }

 private:
  static std::vector<std::string> split(const std::string& sentence) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < sentence.size()) {
      auto end = sentence.find(' ', start);
      if (end == std::string::npos) end = sentence.size();
      out.push_back(sentence.substr(start, end - start));
      start = end + 1;
    }
    return out;
  }

  static std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  }

  bool usable_typo(const std::string& w) const {
    return !lexicon_.in_dictionary(w) && !vocabulary_.contains(w);
  }

  // Substitutes one interior letter; falls back to swapping two neighbours.
  std::string misspell(const std::string& word, Rng& rng) const {
    for (int attempt = 0; attempt < 64; ++attempt) {
      auto w = word;
      const auto pos = 1 + rng.uniform_index(w.size() - 2);
      const char c = static_cast<char>('a' + rng.uniform_index(26));
      if (c == w[pos]) continue;
      w[pos] = c;
      if (usable_typo(w)) return w;
    }
    for (std::size_t pos = 1; pos + 2 < word.size(); ++pos) {
      auto w = word;
      std::swap(w[pos], w[pos + 1]);
      if (usable_typo(w)) return w;
    }
    return word + "q";
  }

  // A dictionary word with the same tag and a similar length.
  std::string replacement(const std::string& word, Rng& rng) const {
    auto tag = lexicon_.tag(word);
    if (tag == PosTag::other) tag = PosTag::noun;
    const auto& list = replacements_[static_cast<int>(tag)];
    if (list.empty()) throw Error("synthetic", "lexicon has no replacement words");
    for (int attempt = 0; attempt < 256; ++attempt) {
      const auto& cand = list[rng.uniform_index(list.size())];
      const auto diff = static_cast<long>(cand.size()) - static_cast<long>(word.size());
      if (diff >= -2 && diff <= 2) return cand;
    }
    return list[rng.uniform_index(list.size())];
  }

  const LexicalResources& lexicon_;
  const std::set<std::string>& vocabulary_;
  std::vector<std::string> replacements_[5];
};

std::string render(const Essay& essay) {
  std::string out;
  for (const auto& p : essay) {
    if (!out.empty()) out += "\n\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (i) out += ' ';
      out += p[i];
    }
  }
  return out;
}

std::string numbered(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%03zu", prefix, i + 1);
  return buf;
}

}  // namespace

const std::vector<std::string>& sentence_pool() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> s;
    for (const auto& e : kPool) s.emplace_back(e.sentence);
    return s;
  }();
  return out;
}

Dataset generate(const LexicalResources& lexicon, const Options& options) {
  if (options.accepted == 0 || options.rejected == 0) throw Error("synthetic", "both classes need documents");
  if (options.misspelling_rate < 0 || options.oov_rate < 0 || options.misspelling_rate + options.oov_rate > 0.5) {
    throw Error("synthetic", "noise rates must be non-negative and sum to at most 0.5");
  }
  if (options.embedding_dimension == 0) throw Error("synthetic", "embedding dimension must be positive");

  std::set<std::string> vocab;
  for (const auto& s : sentence_pool()) {
    const auto doc = text::tokenize(s);
    for (const auto& t : doc.tokens()) {
      if (t.is_word) vocab.insert(text::to_lower(t.text));
    }
  }

  // Word vectors: a function-word or content-word centroid plus per-word noise.
  const auto dim = options.embedding_dimension;
  Rng centroid_rng(derive_seed(options.seed, 1));
  std::vector<float> centroids[2];
  for (auto& c : centroids) {
    c.resize(dim);
    for (auto& v : c) v = static_cast<float>(centroid_rng.normal() * 0.5);
  }
  auto table = std::make_shared<embedding::EmbeddingTable>(dim);
  std::vector<float> vec(dim);
  for (const auto& w : vocab) {
    Rng rng(derive_seed(options.seed, std::stoull(fnv1a_hex(w), nullptr, 16)));
    const auto& c = centroids[lexicon.is_stopword(w) ? 0 : 1];
    for (std::size_t i = 0; i < dim; ++i) vec[i] = c[i] + static_cast<float>(rng.normal() * options.embedding_noise);
    table->add(w, vec);
  }

  Rng rng(derive_seed(options.seed, 2));
  const Corrupter corrupter(lexicon, vocab);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < options.accepted; ++i) {
    docs.push_back({numbered("acc", i), render(sample_essay(rng)), Label::accepted});
  }
  for (std::size_t i = 0; i < options.rejected; ++i) {
    auto essay = sample_essay(rng);
    scramble(essay, rng);
    corrupter.corrupt(essay, options, rng);
    docs.push_back({numbered("rej", i), render(essay), Label::rejected});
  }
  Dataset out;
  out.corpus = Corpus(std::move(docs), "synthetic (seed " + std::to_string(options.seed) + ")");
  out.embeddings = std::move(table);
  out.vocabulary.assign(vocab.begin(), vocab.end());
  return out;
}

}  // namespace sopeval::synthetic
