#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>

#include "json.hpp"
#include "sopeval/classifiers/forest.hpp"
#include "sopeval/classifiers/labeled.hpp"
#include "sopeval/classifiers/logistic.hpp"
#include "sopeval/classifiers/net.hpp"
#include "sopeval/classifiers/svm.hpp"
#include "sopeval/corpus.hpp"

namespace sopeval::classifiers {

/// mlp trains on the training rows only; ffnn early-stops on a tune split.
enum class ModelKind { svm, lr, rfdt, mlp, ffnn };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view s);

struct ClassifierSpec {
  ModelKind kind = ModelKind::svm;
  SvmParams svm;
  LrParams lr;
  ForestParams forest;
  NetParams net;
  /// Share of the training rows held out as the ffnn tune set when the
  /// protocol does not provide one.
  double tune_fraction = 0.2;

  /// Seeds every randomized trainer.
  void set_seed(std::uint64_t seed);
  /// Standardization is skipped for the forest (splits are scale-invariant).
  bool standardizes() const { return kind != ModelKind::rfdt; }
  bool needs_tune_set() const { return kind == ModelKind::ffnn; }

  nlohmann::json to_json() const;
  static ClassifierSpec from_json(const nlohmann::json& j);
};

using Classifier = std::variant<SvmModel, LrModel, ForestModel, NetModel>;

/// `tune` is required for ffnn and ignored otherwise.
Classifier fit_classifier(const ClassifierSpec& spec, const LabeledMatrix& train, const LabeledMatrix* tune);

std::size_t input_dimension(const Classifier& model);
double decision_value(const Classifier& model, std::span<const double> x);
/// Positive decision values are accepted; zero (a tie) is rejected.
Label label_for(double decision_value);
Label predict(const Classifier& model, std::span<const double> x);

nlohmann::json to_json(const Classifier& model);
/// Throws on missing fields or inconsistent shapes.
Classifier classifier_from_json(const nlohmann::json& j);

}  // namespace sopeval::classifiers
