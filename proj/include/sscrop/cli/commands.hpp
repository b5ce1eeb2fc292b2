#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sscrop/cli/config.hpp"

namespace sscrop::cli {

enum class LogLevel { Quiet, Info, Debug };

// From SSCROP_LOG: quiet, info (default) or debug.
LogLevel log_level_from_env();
void set_log_level(LogLevel level);

// Every command first writes the resolved config to <out>/config.json.

// source.csv, few_shot.csv and target.csv from the gen_data section. The
// config echo's data section names these files.
void cmd_gen_data(const RunConfig& config, const std::filesystem::path& out);

// kind is fewshot, standard or da. Writes report.json, history.csv,
// summary.csv and, when enabled, checkpoints/<variant>[_k<shots>].json for
// the first repeat of every configuration.
void cmd_experiment(const std::string& kind, const RunConfig& config,
                    const std::filesystem::path& out);

// curves.csv, histograms.csv and gap.csv comparing data.source to data.target.
void cmd_inspect(const RunConfig& config, const std::filesystem::path& out);

// eval.json with accuracy and confusion matrix of a checkpoint on a dataset.
void cmd_eval(const RunConfig& config, const std::filesystem::path& out);

struct SummaryRow {
  std::string protocol;
  std::string variant;
  std::string shots;  // k for fewshot, "all" otherwise
  std::size_t repeats = 0;
  double mean = 0.0;
  double std = 0.0;
  double mean_epochs = 0.0;
  double mean_domain_accuracy = 0.0;  // NaN unless scored
};

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace sscrop::cli
