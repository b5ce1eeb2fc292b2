#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sscrop/model/model.hpp"

namespace sscrop {

struct TrainConfig {
  double lr = 0.001;
  // Few-shot: epochs over the labeled shots. Standard: unused (see PatiencePolicy).
  // Domain adaptation: joint epochs.
  std::size_t main_epochs = 2000;
  // Few-shot only. 0 resolves to 20 with one pretext task and 10 with more.
  std::size_t ssl_epochs = 0;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  TaskActivation tasks;
  std::size_t cutoff = 2;
  std::size_t repeats = 1;
  std::vector<std::size_t> encoder_units = {64, 32};
  // Record one history row every this many epochs; 0 picks a protocol default.
  std::size_t history_every = 0;

  // Throws ValueError on lr <= 0, zero epochs or batch size, zero repeats.
  void validate() const;
};

struct PatiencePolicy {
  std::size_t patience = 25;
  bool lr_halving = true;
  double min_lr = 0.00005;
  std::size_t max_epochs = 1000;

  void validate(double initial_lr) const;
};

std::size_t resolved_ssl_epochs(const TrainConfig& config);

ModelConfig model_config_for(const TrainConfig& config, std::size_t steps, std::size_t bands);

}  // namespace sscrop
