#include "sscrop/numeric/layers.hpp"

#include <algorithm>
#include <cmath>

#include "sscrop/error.hpp"
#include "sscrop/numeric/kernels.hpp"

namespace sscrop {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::ReLU: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
  }
  return "unknown";
}

void DenseLayer::validate() const {
  if (bias.size() != weights.cols()) {
    throw ShapeError("dense layer weights " + shape_string(weights) + " with bias of length " +
                     std::to_string(bias.size()));
  }
}

DenseLayer DenseLayer::glorot(std::size_t in_dim, std::size_t out_dim, Activation activation,
                              std::mt19937_64& rng) {
  if (in_dim == 0 || out_dim == 0) throw ShapeError("dense layer needs nonzero dimensions");
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  std::uniform_real_distribution<double> dist(-limit, limit);
  DenseLayer layer;
  layer.weights = Matrix(in_dim, out_dim);
  for (double& w : layer.weights.values()) w = dist(rng);
  layer.bias.assign(out_dim, 0.0);
  layer.activation = activation;
  return layer;
}

Matrix dense_logits(const DenseLayer& layer, const Matrix& input) {
  layer.validate();
  if (input.cols() != layer.in_dim()) {
    throw ShapeError("dense_forward: input " + shape_string(input) + " does not match weights " +
                     shape_string(layer.weights));
  }
  Matrix z;
  kernels::matmul(input, layer.weights, z);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
  }
  return z;
}

void apply_activation(Activation activation, Matrix& z) {
  switch (activation) {
    case Activation::Identity:
      return;
    case Activation::ReLU:
      for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
      return;
    case Activation::Sigmoid:
      for (double& v : z.values()) {
        // Split by sign so exp never overflows.
        if (v >= 0.0) {
          v = 1.0 / (1.0 + std::exp(-v));
        } else {
          const double e = std::exp(v);
          v = e / (1.0 + e);
        }
      }
      return;
    case Activation::Softmax:
      for (std::size_t r = 0; r < z.rows(); ++r) {
        auto row = z.row(r);
        const double mx = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double& v : row) {
          v = std::exp(v - mx);
          sum += v;
        }
        for (double& v : row) v /= sum;
      }
      return;
  }
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
  Matrix z = dense_logits(layer, input);
  apply_activation(layer.activation, z);
  require_finite(z, "dense_forward output");
  return z;
}

}  // namespace sscrop
