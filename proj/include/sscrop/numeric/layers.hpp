#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "sscrop/numeric/matrix.hpp"

namespace sscrop {

enum class Activation { Identity, ReLU, Sigmoid, Softmax };

std::string_view to_string(Activation a) noexcept;

// Fully connected layer: activation(input * weights + bias).
struct DenseLayer {
  Matrix weights;             // in_dim x out_dim
  std::vector<double> bias;   // out_dim
  Activation activation = Activation::Identity;

  std::size_t in_dim() const noexcept { return weights.rows(); }
  std::size_t out_dim() const noexcept { return weights.cols(); }

  // Throws ShapeError if weights and bias disagree.
  void validate() const;

  // Glorot-uniform weights in +-sqrt(6 / (in + out)), zero bias.
  static DenseLayer glorot(std::size_t in_dim, std::size_t out_dim, Activation activation,
                           std::mt19937_64& rng);

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& input);

// Pre-activation input * weights + bias.
Matrix dense_logits(const DenseLayer& layer, const Matrix& input);

// In place. Softmax is row-wise and shifted by the row max.
void apply_activation(Activation activation, Matrix& z);

}  // namespace sscrop
