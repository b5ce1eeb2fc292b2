#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sscrop {

// Main epochs at which a pretext-task epoch runs: ssl_epochs slots spread
// uniformly over [0, main_epochs), the first at epoch 0. Non-decreasing; a
// slot value repeats when ssl_epochs > main_epochs.
std::vector<std::size_t> ssl_epoch_slots(std::size_t main_epochs, std::size_t ssl_epochs);

// Number of joint steps that traverse every dataset exactly once when the
// largest one is cut into batches of batch_size.
std::size_t joint_steps(std::span<const std::size_t> dataset_sizes, std::size_t batch_size);

// Reshuffled permutation of one dataset, cut into `steps` near-equal slices.
class BatchStream {
 public:
  BatchStream(std::size_t dataset_size, std::uint64_t seed);

  // Reshuffles and sets the number of slices for the next pass.
  void begin_epoch(std::size_t steps);
  std::span<const std::size_t> slice(std::size_t step) const;
  std::size_t dataset_size() const noexcept { return order_.size(); }

 private:
  std::vector<std::size_t> order_;
  std::mt19937_64 rng_;
  std::size_t steps_ = 1;
};

}  // namespace sscrop
