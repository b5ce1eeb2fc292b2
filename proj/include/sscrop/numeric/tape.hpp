#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sscrop/numeric/layers.hpp"
#include "sscrop/numeric/matrix.hpp"

namespace sscrop {

// Gradient reversal: identity forward, negated upstream gradient backward.
Matrix grl_forward(const Matrix& input);
Matrix grl_backward(const Matrix& upstream);

struct DenseGrad {
  Matrix weights;
  std::vector<double> bias;
};

// Per-layer gradient buffers produced by GradTape::backward, keyed by layer address.
class Gradients {
 public:
  // Throws ValueError if the layer was not part of the recorded forward pass.
  const DenseGrad& of(const DenseLayer& layer) const;
  const DenseGrad* find(const DenseLayer& layer) const noexcept;
  DenseGrad& slot(const DenseLayer& layer);
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<std::pair<const DenseLayer*, DenseGrad>> entries_;
};

using ValueId = std::size_t;

// Records a forward computation over dense layers, GRLs and cross-entropy
// terms, then runs reverse-mode accumulation over it.
//
// Layers are referenced, not copied, and must outlive the tape. A value may
// feed several consumers (a shared encoder output feeding several heads);
// its adjoint is the sum over consumers. The scalar objective is the sum of
// every recorded loss term.
class GradTape {
 public:
  ValueId input(Matrix value);
  ValueId dense(const DenseLayer& layer, ValueId x);
  ValueId grl(ValueId x);

  // Both return the term's value and add it to the objective.
  double categorical_xent(ValueId probs, std::span<const int> labels);
  double binary_xent(ValueId probs, std::span<const int> labels);

  const Matrix& value(ValueId id) const;
  double loss() const noexcept { return loss_; }
  std::size_t loss_terms() const noexcept { return losses_.size(); }

  // Gradients of loss_scale * loss() with respect to every layer on the tape.
  // Throws ValueError when no loss has been recorded.
  Gradients backward(double loss_scale = 1.0) const;

  void clear();

 private:
  enum class Kind { Input, Dense, Grl };
  struct Node {
    Kind kind;
    const DenseLayer* layer = nullptr;
    ValueId in = 0;
  };
  struct LossTerm {
    ValueId probs;
    std::vector<int> labels;
    bool binary;
  };

  ValueId push(Node node, Matrix value);
  void check_id(ValueId id) const;

  std::vector<Node> nodes_;
  std::vector<Matrix> values_;
  std::vector<LossTerm> losses_;
  double loss_ = 0.0;
};

}  // namespace sscrop
