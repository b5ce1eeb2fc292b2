#include "sscrop/train/schedule.hpp"

#include <algorithm>
#include <numeric>

#include "sscrop/error.hpp"

namespace sscrop {

std::vector<std::size_t> ssl_epoch_slots(std::size_t main_epochs, std::size_t ssl_epochs) {
  std::vector<std::size_t> slots;
  if (main_epochs == 0) return slots;
  slots.reserve(ssl_epochs);
  for (std::size_t i = 0; i < ssl_epochs; ++i) slots.push_back(i * main_epochs / ssl_epochs);
  return slots;
}

std::size_t joint_steps(std::span<const std::size_t> dataset_sizes, std::size_t batch_size) {
  if (batch_size == 0) throw ValueError("batch size must be positive");
  std::size_t largest = 0;
  for (std::size_t n : dataset_sizes) largest = std::max(largest, n);
  return std::max<std::size_t>(1, (largest + batch_size - 1) / batch_size);
}

BatchStream::BatchStream(std::size_t dataset_size, std::uint64_t seed)
    : order_(dataset_size), rng_(seed) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void BatchStream::begin_epoch(std::size_t steps) {
  if (steps == 0) throw ValueError("an epoch needs at least one step");
  std::shuffle(order_.begin(), order_.end(), rng_);
  steps_ = steps;
}

std::span<const std::size_t> BatchStream::slice(std::size_t step) const {
  const std::size_t n = order_.size();
  const std::size_t lo = step * n / steps_;
  const std::size_t hi = (step + 1) * n / steps_;
  return std::span<const std::size_t>(order_).subspan(lo, hi - lo);
}

}  // namespace sscrop
