#include <exception>

#include "sscrop/train/trainer.hpp"

namespace sscrop {

ExperimentReport run_repeats(const TrainConfig& config,
                             const std::function<RunReport(const TrainConfig&)>& experiment,
                             bool parallel) {
  config.validate();
  const std::size_t n = config.repeats;
  std::vector<RunReport> runs(n);
  std::vector<std::exception_ptr> errors(n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    try {
      TrainConfig c = config;
      c.seed = config.seed + static_cast<std::uint64_t>(i);
      runs[static_cast<std::size_t>(i)] = experiment(c);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentReport report;
  report.protocol = runs.front().protocol;
  report.variant = runs.front().variant;
  for (const auto& r : runs) report.accuracies.push_back(r.accuracy());
  std::tie(report.mean, report.std) = mean_and_std(report.accuracies);
  report.runs = std::move(runs);
  return report;
}

}  // namespace sscrop
