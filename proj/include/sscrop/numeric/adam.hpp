#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sscrop {

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction over a fixed list of parameter tensors.
// Tensor i of every step must have the length given at construction.
class AdamState {
 public:
  AdamState(std::vector<std::size_t> tensor_sizes, AdamConfig config = {});

  void step(std::span<const std::span<double>> params,
            std::span<const std::span<const double>> grads);

  std::uint64_t timestep() const noexcept { return timestep_; }
  double lr() const noexcept { return config_.lr; }
  void set_lr(double lr);
  const AdamConfig& config() const noexcept { return config_; }

  const std::vector<double>& first_moment(std::size_t tensor) const { return m_.at(tensor); }
  const std::vector<double>& second_moment(std::size_t tensor) const { return v_.at(tensor); }

 private:
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t timestep_ = 0;
};

}  // namespace sscrop
