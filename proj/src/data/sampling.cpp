#include "sscrop/data/sampling.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {

std::vector<std::vector<std::size_t>> shuffled_by_class(const TaskDataset& data,
                                                        std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(data.num_classes));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int y = data.labels[i];
    if (y >= 0 && y < data.num_classes) by_class[static_cast<std::size_t>(y)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  for (auto& idx : by_class) std::shuffle(idx.begin(), idx.end(), rng);
  return by_class;
}

}  // namespace

TaskDataset sample_few_shot(const TaskDataset& data, std::size_t k, std::uint64_t seed) {
  const std::size_t parts[] = {k};
  return stratified_split(data, parts, seed).front();
}

std::vector<TaskDataset> stratified_split(const TaskDataset& data,
                                          std::span<const std::size_t> per_class,
                                          std::uint64_t seed) {
  for (std::size_t i = 0; i + 1 < per_class.size(); ++i) {
    if (per_class[i] == kRest) throw ValueError("only the last split part may take the rest");
  }
  const auto by_class = shuffled_by_class(data, seed);
  std::vector<std::vector<std::size_t>> picks(per_class.size());
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    const auto& idx = by_class[c];
    std::size_t offset = 0;
    for (std::size_t p = 0; p < per_class.size(); ++p) {
      const std::size_t want = per_class[p] == kRest ? idx.size() - offset : per_class[p];
      if (offset + want > idx.size()) {
        throw ValueError("class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                         " samples, fewer than the " + std::to_string(offset + want) +
                         " requested");
      }
      picks[p].insert(picks[p].end(), idx.begin() + static_cast<std::ptrdiff_t>(offset),
                      idx.begin() + static_cast<std::ptrdiff_t>(offset + want));
      offset += want;
    }
  }
  std::vector<TaskDataset> out;
  out.reserve(picks.size());
  for (const auto& p : picks) out.push_back(subset(data, p));
  return out;
}

}  // namespace sscrop
