#pragma once

#include <cstddef>
#include <vector>

#include "sscrop/data/dataset.hpp"

namespace sscrop {

inline constexpr std::size_t kHistogramBins = 50;
inline constexpr double kHistogramLow = 0.0;
inline constexpr double kHistogramHigh = 1.0;

struct TimestepDistribution {
  double mean = 0.0;
  double std = 0.0;  // population
  std::vector<std::size_t> histogram;
};

// Empirical distribution of one band for one class, per timestep.
// Histogram bins are uniform over [0, 1]; values outside fall into the edge bins.
struct BandDistribution {
  int class_id = 0;
  std::size_t band = 0;
  std::size_t samples = 0;
  std::vector<TimestepDistribution> steps;
};

// Throws ValueError if the class has no samples or the band does not exist.
BandDistribution band_distribution_report(const TaskDataset& data, int class_id,
                                          std::size_t band);

}  // namespace sscrop
