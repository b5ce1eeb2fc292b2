#include "sscrop/numeric/adam.hpp"

#include <cmath>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {

AdamState::AdamState(std::vector<std::size_t> tensor_sizes, AdamConfig config) : config_(config) {
  if (!(config_.lr > 0.0)) throw ValueError("adam: learning rate must be positive");
  m_.reserve(tensor_sizes.size());
  v_.reserve(tensor_sizes.size());
  for (std::size_t n : tensor_sizes) {
    m_.emplace_back(n, 0.0);
    v_.emplace_back(n, 0.0);
  }
}

void AdamState::set_lr(double lr) {
  if (!(lr > 0.0)) throw ValueError("adam: learning rate must be positive");
  config_.lr = lr;
}

void AdamState::step(std::span<const std::span<double>> params,
                     std::span<const std::span<const double>> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: expected " + std::to_string(m_.size()) + " tensors, got " +
                     std::to_string(params.size()) + " params and " +
                     std::to_string(grads.size()) + " grads");
  }
  for (std::size_t t = 0; t < m_.size(); ++t) {
    if (params[t].size() != m_[t].size() || grads[t].size() != m_[t].size()) {
      throw ShapeError("adam: tensor " + std::to_string(t) + " has length " +
                       std::to_string(params[t].size()) + "/" + std::to_string(grads[t].size()) +
                       ", state expects " + std::to_string(m_[t].size()));
    }
  }

  ++timestep_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(timestep_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);

  for (std::size_t k = 0; k < m_.size(); ++k) {
    auto& m = m_[k];
    auto& v = v_[k];
    auto p = params[k];
    auto g = grads[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

}  // namespace sscrop
