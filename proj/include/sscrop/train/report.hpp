#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace sscrop {

// One line of training history. accuracy is NaN when not measured that epoch.
struct HistoryRow {
  std::size_t epoch = 0;
  std::string task;
  double loss = 0.0;
  double accuracy = 0.0;
};

// Result of one training run.
struct RunReport {
  std::string protocol;  // fewshot | standard | da
  std::string variant;
  std::uint64_t seed = 0;
  std::vector<HistoryRow> history;
  // "crop" is the test accuracy; "domain" the held-out domain-head accuracy (da).
  std::map<std::string, double> final_accuracy;
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t epochs_run = 0;
  // Standard protocol only.
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  std::vector<double> val_accuracy;  // per epoch
  std::vector<double> lr_history;    // per epoch
  // Few-shot only: main epochs at which pretext epochs ran.
  std::vector<std::size_t> ssl_schedule;
  double wall_seconds = 0.0;

  double accuracy() const;  // final_accuracy["crop"]
};

// Repeated runs of one configuration.
struct ExperimentReport {
  std::string protocol;
  std::string variant;
  nlohmann::json config;
  std::vector<RunReport> runs;
  std::vector<double> accuracies;
  double mean = 0.0;
  double std = 0.0;  // sample std; 0 for one run
};

// Shortest round-trip decimal form; empty for NaN and infinities.
std::string format_double(double v);

// Mean and (n-1) standard deviation; std is 0 for a single value.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

nlohmann::json to_json(const RunReport& r, bool include_wall_time = true);
nlohmann::json to_json(const ExperimentReport& r, bool include_wall_time = true);

// Columns: variant,shots,repeat,epoch,task,loss,accuracy
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, const ExperimentReport*>>& reports);

}  // namespace sscrop
