#include "sscrop/numeric/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {

double clamp_prob(double p) noexcept { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

double categorical_xent(const Matrix& probs, std::span<const int> labels) {
  if (probs.rows() != labels.size()) {
    throw ShapeError("categorical_xent: " + std::to_string(probs.rows()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (probs.rows() == 0) throw ValueError("categorical_xent: empty batch");
  double total = 0.0;
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto row = probs.row(r);
    double sum = 0.0;
    for (double p : row) sum += p;
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ValueError("categorical_xent: row " + std::to_string(r) + " sums to " +
                       std::to_string(sum));
    }
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= probs.cols()) {
      throw ValueError("categorical_xent: label " + std::to_string(y) + " outside [0, " +
                       std::to_string(probs.cols()) + ") at row " + std::to_string(r));
    }
    total -= std::log(clamp_prob(row[static_cast<std::size_t>(y)]));
  }
  return total / static_cast<double>(probs.rows());
}

double binary_xent(std::span<const double> probs, std::span<const int> labels) {
  if (probs.size() != labels.size()) {
    throw ShapeError("binary_xent: " + std::to_string(probs.size()) + " probabilities but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (probs.empty()) throw ValueError("binary_xent: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const int y = labels[i];
    if (y != 0 && y != 1) {
      throw ValueError("binary_xent: label " + std::to_string(y) + " at index " +
                       std::to_string(i) + " is not 0 or 1");
    }
    const double p = clamp_prob(probs[i]);
    total -= y == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

}  // namespace sscrop
