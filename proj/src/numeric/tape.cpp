#include "sscrop/numeric/tape.hpp"

#include <string>

#include "sscrop/error.hpp"
#include "sscrop/numeric/kernels.hpp"
#include "sscrop/numeric/losses.hpp"

namespace sscrop {

Matrix grl_forward(const Matrix& input) { return input; }

Matrix grl_backward(const Matrix& upstream) {
  Matrix out = upstream;
  for (double& v : out.values()) v = -v;
  return out;
}

const DenseGrad* Gradients::find(const DenseLayer& layer) const noexcept {
  for (const auto& [key, grad] : entries_) {
    if (key == &layer) return &grad;
  }
  return nullptr;
}

const DenseGrad& Gradients::of(const DenseLayer& layer) const {
  if (const auto* g = find(layer)) return *g;
  throw ValueError("no gradient recorded for layer " + shape_string(layer.weights));
}

DenseGrad& Gradients::slot(const DenseLayer& layer) {
  for (auto& [key, grad] : entries_) {
    if (key == &layer) return grad;
  }
  entries_.emplace_back(&layer, DenseGrad{Matrix(layer.in_dim(), layer.out_dim()),
                                          std::vector<double>(layer.out_dim(), 0.0)});
  return entries_.back().second;
}

ValueId GradTape::push(Node node, Matrix value) {
  nodes_.push_back(node);
  values_.push_back(std::move(value));
  return nodes_.size() - 1;
}

void GradTape::check_id(ValueId id) const {
  if (id >= nodes_.size()) {
    throw ValueError("tape value " + std::to_string(id) + " does not exist");
  }
}

ValueId GradTape::input(Matrix value) { return push({Kind::Input}, std::move(value)); }

ValueId GradTape::dense(const DenseLayer& layer, ValueId x) {
  check_id(x);
  Matrix out = dense_forward(layer, values_[x]);
  return push({Kind::Dense, &layer, x}, std::move(out));
}

ValueId GradTape::grl(ValueId x) {
  check_id(x);
  return push({Kind::Grl, nullptr, x}, grl_forward(values_[x]));
}

double GradTape::categorical_xent(ValueId probs, std::span<const int> labels) {
  check_id(probs);
  const double l = sscrop::categorical_xent(values_[probs], labels);
  losses_.push_back({probs, {labels.begin(), labels.end()}, false});
  loss_ += l;
  return l;
}

double GradTape::binary_xent(ValueId probs, std::span<const int> labels) {
  check_id(probs);
  const Matrix& p = values_[probs];
  if (p.cols() != 1) {
    throw ShapeError("binary_xent expects a single probability column, got " + shape_string(p));
  }
  const double l = sscrop::binary_xent(p.values(), labels);
  losses_.push_back({probs, {labels.begin(), labels.end()}, true});
  loss_ += l;
  return l;
}

const Matrix& GradTape::value(ValueId id) const {
  check_id(id);
  return values_[id];
}

void GradTape::clear() {
  nodes_.clear();
  values_.clear();
  losses_.clear();
  loss_ = 0.0;
}

namespace {

Matrix& ensure(std::vector<Matrix>& buffers, ValueId id, std::size_t rows, std::size_t cols) {
  if (buffers[id].empty()) buffers[id] = Matrix(rows, cols);
  return buffers[id];
}

void add_into(Matrix& dst, const Matrix& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// Upstream gradient w.r.t. activation output -> gradient w.r.t. logits.
Matrix activation_backward(Activation act, const Matrix& out, const Matrix& upstream) {
  Matrix dz = upstream;
  switch (act) {
    case Activation::Identity:
      break;
    case Activation::ReLU: {
      auto d = dz.values();
      auto o = out.values();
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (o[i] <= 0.0) d[i] = 0.0;
      }
      break;
    }
    case Activation::Sigmoid: {
      auto d = dz.values();
      auto o = out.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= o[i] * (1.0 - o[i]);
      break;
    }
    case Activation::Softmax:
      for (std::size_t r = 0; r < dz.rows(); ++r) {
        auto d = dz.row(r);
        auto p = out.row(r);
        double dot = 0.0;
        for (std::size_t c = 0; c < d.size(); ++c) dot += d[c] * p[c];
        for (std::size_t c = 0; c < d.size(); ++c) d[c] = p[c] * (d[c] - dot);
      }
      break;
  }
  return dz;
}

bool clamped(double p) noexcept { return p <= kProbFloor || p >= 1.0 - kProbFloor; }

}  // namespace

Gradients GradTape::backward(double loss_scale) const {
  if (losses_.empty()) throw ValueError("backward called before any loss was recorded");

  const std::size_t n = nodes_.size();
  std::vector<Matrix> adj(n);        // d objective / d value
  std::vector<Matrix> logit_adj(n);  // d objective / d logits, fused losses only

  for (const auto& term : losses_) {
    const Matrix& p = values_[term.probs];
    const Node& node = nodes_[term.probs];
    const double inv_n = loss_scale / static_cast<double>(p.rows());
    const bool fused =
        node.kind == Kind::Dense &&
        node.layer->activation == (term.binary ? Activation::Sigmoid : Activation::Softmax);
    if (fused) {
      // Cross-entropy composed with its matching activation: (p - y) / N.
      Matrix& dz = ensure(logit_adj, term.probs, p.rows(), p.cols());
      for (std::size_t r = 0; r < p.rows(); ++r) {
        const auto y = static_cast<std::size_t>(term.labels[r]);
        if (term.binary) {
          dz(r, 0) += (p(r, 0) - static_cast<double>(y)) * inv_n;
        } else {
          for (std::size_t c = 0; c < p.cols(); ++c) {
            dz(r, c) += (p(r, c) - (c == y ? 1.0 : 0.0)) * inv_n;
          }
        }
      }
      continue;
    }
    Matrix& dp = ensure(adj, term.probs, p.rows(), p.cols());
    for (std::size_t r = 0; r < p.rows(); ++r) {
      const int y = term.labels[r];
      if (term.binary) {
        const double pr = p(r, 0);
        if (clamped(pr)) continue;
        dp(r, 0) += (y == 1 ? -1.0 / pr : 1.0 / (1.0 - pr)) * inv_n;
      } else {
        const double pr = p(r, static_cast<std::size_t>(y));
        if (clamped(pr)) continue;
        dp(r, static_cast<std::size_t>(y)) += -inv_n / pr;
      }
    }
  }

  Gradients grads;
  for (std::size_t i = n; i-- > 0;) {
    const Node& node = nodes_[i];
    switch (node.kind) {
      case Kind::Input:
        break;
      case Kind::Grl:
        if (!adj[i].empty()) {
          Matrix& dst = ensure(adj, node.in, adj[i].rows(), adj[i].cols());
          add_into(dst, grl_backward(adj[i]));
        }
        break;
      case Kind::Dense: {
        const DenseLayer& layer = *node.layer;
        DenseGrad& g = grads.slot(layer);
        if (adj[i].empty() && logit_adj[i].empty()) break;
        const Matrix& out = values_[i];
        Matrix dz = adj[i].empty() ? Matrix(out.rows(), out.cols())
                                   : activation_backward(layer.activation, out, adj[i]);
        if (!logit_adj[i].empty()) add_into(dz, logit_adj[i]);

        const Matrix& x = values_[node.in];
        Matrix dw;
        kernels::matmul_tn(x, dz, dw);
        add_into(g.weights, dw);
        for (std::size_t r = 0; r < dz.rows(); ++r) {
          auto row = dz.row(r);
          for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
        }
        if (nodes_[node.in].kind != Kind::Input) {
          Matrix dx;
          kernels::matmul_nt(dz, layer.weights, dx);
          Matrix& dst = ensure(adj, node.in, dx.rows(), dx.cols());
          add_into(dst, dx);
        }
        break;
      }
    }
  }
  return grads;
}

}  // namespace sscrop
