#include "sscrop/data/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {

BandDistribution band_distribution_report(const TaskDataset& data, int class_id,
                                          std::size_t band) {
  if (band >= data.bands) {
    throw ValueError("band " + std::to_string(band) + " does not exist (B=" +
                     std::to_string(data.bands) + ")");
  }
  if (class_id < 0 || class_id >= data.num_classes) {
    throw ValueError("class " + std::to_string(class_id) + " does not exist");
  }
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] == class_id) members.push_back(i);
  }
  if (members.empty()) throw ValueError("class " + std::to_string(class_id) + " has no samples");

  BandDistribution report;
  report.class_id = class_id;
  report.band = band;
  report.samples = members.size();
  report.steps.resize(data.steps);
  const double n = static_cast<double>(members.size());
  const double width = (kHistogramHigh - kHistogramLow) / static_cast<double>(kHistogramBins);
  for (std::size_t t = 0; t < data.steps; ++t) {
    auto& st = report.steps[t];
    st.histogram.assign(kHistogramBins, 0);
    double sum = 0.0;
    for (std::size_t i : members) sum += data.samples[i](t, band);
    st.mean = sum / n;
    double sq = 0.0;
    for (std::size_t i : members) {
      const double v = data.samples[i](t, band);
      sq += (v - st.mean) * (v - st.mean);
      const double pos = std::floor((v - kHistogramLow) / width);
      const auto bin = static_cast<std::size_t>(
          std::clamp(pos, 0.0, static_cast<double>(kHistogramBins - 1)));
      ++st.histogram[bin];
    }
    st.std = std::sqrt(sq / n);
  }
  return report;
}

}  // namespace sscrop
