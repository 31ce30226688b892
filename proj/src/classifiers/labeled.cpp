#include "sopeval/classifiers/labeled.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sopeval/error.hpp"

namespace sopeval::classifiers {

LabeledMatrix LabeledMatrix::select(std::span<const std::size_t> indices) const {
  LabeledMatrix out{x.select_rows(indices), {}};
  out.y.reserve(indices.size());
  for (auto i : indices) out.y.push_back(y[i]);
  return out;
}

void validate_training_data(const LabeledMatrix& data, std::string_view who) {
  const std::string prefix(who);
  if (data.rows() == 0) throw Error("classifiers", prefix + ": no training rows");
  if (data.y.size() != data.rows()) throw Error("classifiers", prefix + ": label count differs from row count");
  if (!std::all_of(data.y.begin(), data.y.end(), [](int v) { return v == 1 || v == -1; })) {
    throw Error("classifiers", prefix + ": labels must be +1 or -1");
  }
  const bool has_pos = std::find(data.y.begin(), data.y.end(), 1) != data.y.end();
  const bool has_neg = std::find(data.y.begin(), data.y.end(), -1) != data.y.end();
  if (!has_pos || !has_neg) throw Error("classifiers", prefix + ": training data must contain both classes");
  if (!std::all_of(data.x.data().begin(), data.x.data().end(), [](double v) { return std::isfinite(v); })) {
    throw Error("classifiers", prefix + ": non-finite feature value");
  }
}

void check_dimension(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw Error("classifiers", "feature vector has " + std::to_string(got) + " components, model expects " +
                                   std::to_string(expected));
  }
}

}  // namespace sopeval::classifiers
