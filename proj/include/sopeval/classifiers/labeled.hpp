#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sopeval/matrix.hpp"

namespace sopeval::classifiers {

/// Feature rows with +1 (accepted) / -1 (rejected) labels.
struct LabeledMatrix {
  Matrix x;
  std::vector<int> y;

  std::size_t rows() const noexcept { return x.rows(); }
  std::size_t cols() const noexcept { return x.cols(); }
  LabeledMatrix select(std::span<const std::size_t> indices) const;
};

/// Throws unless rows are present, labels are +-1 and match the row count,
/// both classes occur and every feature is finite. `who` prefixes the message.
void validate_training_data(const LabeledMatrix& data, std::string_view who);

/// Throws when the vector's length differs from the model's input dimension.
void check_dimension(std::size_t expected, std::size_t got);

}  // namespace sopeval::classifiers
