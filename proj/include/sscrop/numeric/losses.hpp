#pragma once

#include <span>

#include "sscrop/numeric/matrix.hpp"

namespace sscrop {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before the log.
inline constexpr double kProbFloor = 1e-12;

double clamp_prob(double p) noexcept;

// Mean over rows of -log(probs[row][label]). Rows must sum to 1 within 1e-6.
double categorical_xent(const Matrix& probs, std::span<const int> labels);

// Mean of -[y log p + (1 - y) log(1 - p)], labels in {0, 1}.
double binary_xent(std::span<const double> probs, std::span<const int> labels);

}  // namespace sscrop
