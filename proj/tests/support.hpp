#pragma once

// Fixtures shared by the unit, integration and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "sopeval/classifiers/model.hpp"
#include "sopeval/corpus.hpp"
#include "sopeval/embedding.hpp"
#include "sopeval/features.hpp"
#include "sopeval/pipeline.hpp"
#include "sopeval/resources.hpp"
#include "sopeval/rng.hpp"
#include "sopeval/synthetic.hpp"

namespace testing {

inline std::shared_ptr<const sopeval::LexicalResources> bundled_lexicon() {
  static const auto lexicon = sopeval::LexicalResources::load(SOPEVAL_RESOURCE_DIR);
  return lexicon;
}

/// Two Gaussian blobs centred at -sep/2 and +sep/2 on every axis.
inline sopeval::classifiers::LabeledMatrix blobs(std::size_t n, std::size_t dim, double sep, std::uint64_t seed,
                                                 double spread = 1.0) {
  sopeval::Rng rng(seed);
  sopeval::classifiers::LabeledMatrix data;
  data.x = sopeval::Matrix(n, dim);
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = i % 2 == 0 ? 1 : -1;
    data.y[i] = y;
    for (std::size_t j = 0; j < dim; ++j) data.x(i, j) = y * sep / 2.0 + spread * rng.normal();
  }
  return data;
}

inline sopeval::classifiers::LabeledMatrix xor_data() {
  sopeval::classifiers::LabeledMatrix data;
  data.x = sopeval::Matrix::from_rows({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  data.y = {-1, -1, 1, 1};
  return data;
}

inline sopeval::classifiers::LabeledMatrix flip_labels(sopeval::classifiers::LabeledMatrix data) {
  for (int& y : data.y) y = -y;
  return data;
}

/// Balanced corpus of short essays with the given sizes; texts are filler.
inline sopeval::Corpus toy_corpus(std::size_t accepted, std::size_t rejected) {
  std::vector<sopeval::Document> docs;
  for (std::size_t i = 0; i < accepted; ++i)
    docs.push_back({"a" + std::to_string(i), "accepted essay number " + std::to_string(i) + ".",
                    sopeval::Label::accepted});
  for (std::size_t i = 0; i < rejected; ++i)
    docs.push_back({"r" + std::to_string(i), "rejected essay number " + std::to_string(i) + ".",
                    sopeval::Label::rejected});
  return sopeval::Corpus(std::move(docs));
}

/// The default synthetic corpus (25/25, 300-d vectors), built once per process.
inline const sopeval::synthetic::Dataset& synthetic_dataset() {
  static const sopeval::synthetic::Dataset data = [] {
    sopeval::synthetic::Options options;
    options.seed = 1;
    return sopeval::synthetic::generate(*bundled_lexicon(), options);
  }();
  return data;
}

inline sopeval::features::Resources synthetic_resources() {
  const auto& data = synthetic_dataset();
  return {bundled_lexicon(), data.embeddings, data.embeddings};
}

/// Analyses of the synthetic corpus with every set enabled.
inline const sopeval::CorpusFeatures& synthetic_features() {
  static const sopeval::CorpusFeatures cf(synthetic_dataset().corpus, sopeval::features::FeatureConfig{},
                                          synthetic_resources());
  return cf;
}

inline sopeval::features::FeatureConfig config_with(const std::string& sets) {
  sopeval::features::FeatureConfig c;
  c.sets = sopeval::features::FeatureConfig::parse_sets(sets);
  return c;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("sopeval-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Largest KKT violation over the training rows:
/// alpha=0 needs y f >= 1, 0<alpha<C needs y f = 1, alpha=C needs y f <= 1.
inline double kkt_violation(const sopeval::classifiers::SvmModel& m,
                            const sopeval::classifiers::LabeledMatrix& data) {
  std::vector<double> alpha(data.rows(), 0.0);
  for (std::size_t s = 0; s < m.support_indices.size(); ++s) alpha[m.support_indices[s]] = m.alphas[s];
  double worst = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double margin = data.y[i] * m.decision_value(data.x.row(i));
    double v = 0.0;
    if (alpha[i] <= 0.0) {
      v = 1.0 - margin;
    } else if (alpha[i] >= m.c) {
      v = margin - 1.0;
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

inline double sum_alpha_y(const sopeval::classifiers::SvmModel& m,
                          const sopeval::classifiers::LabeledMatrix& data) {
  double s = 0.0;
  for (std::size_t k = 0; k < m.support_indices.size(); ++k) s += m.alphas[k] * data.y[m.support_indices[k]];
  return s;
}

inline double training_accuracy(const sopeval::classifiers::Classifier& model,
                                const sopeval::classifiers::LabeledMatrix& data) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < data.rows(); ++i)
    hits += sopeval::to_sign(sopeval::classifiers::predict(model, data.x.row(i))) == data.y[i];
  return double(hits) / double(data.rows());
}

/// |a - b| / max(|a|, |b|), with an absolute floor so exact zeros compare.
inline double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
  return std::abs(a - b) / scale;
}

/// Largest relative error between `analytic` and central differences of f.
inline double gradient_check(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> theta, const std::vector<double>& analytic, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double keep = theta[i];
    theta[i] = keep + h;
    const double up = f(theta);
    theta[i] = keep - h;
    const double down = f(theta);
    theta[i] = keep;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2 * h)));
  }
  return worst;
}

}  // namespace testing
