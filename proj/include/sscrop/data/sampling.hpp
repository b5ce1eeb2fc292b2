#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sscrop/data/dataset.hpp"

namespace sscrop {

// Exactly k samples per class, drawn without replacement. Output is grouped
// by class. Throws ValueError if any class has fewer than k samples.
TaskDataset sample_few_shot(const TaskDataset& data, std::size_t k, std::uint64_t seed);

// Per-class count meaning "everything not taken by earlier parts".
inline constexpr std::size_t kRest = std::numeric_limits<std::size_t>::max();

// Disjoint stratified parts; part i receives per_class[i] samples of every
// class. Only the last entry may be kRest.
std::vector<TaskDataset> stratified_split(const TaskDataset& data,
                                          std::span<const std::size_t> per_class,
                                          std::uint64_t seed);

}  // namespace sscrop
