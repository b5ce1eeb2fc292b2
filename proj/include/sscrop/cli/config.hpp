#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sscrop/data/csv.hpp"
#include "sscrop/synth/generator.hpp"
#include "sscrop/train/config.hpp"

// One JSON document configures every subcommand. Each command reads the
// top-level seed and data paths plus its own section; unknown keys anywhere
// are rejected with ConfigError.
namespace sscrop::cli {

struct DataPaths {
  std::filesystem::path source = "source.csv";
  std::filesystem::path few_shot = "few_shot.csv";
  std::filesystem::path target = "target.csv";
  double scale = kReflectanceScale;
};

struct GenDataSection {
  synth::ScenarioConfig scenario = synth::default_scenario_config();
  // Written values are reflectance / raw_scale, so ingestion with the same
  // scale recovers the generated values.
  double raw_scale = kReflectanceScale;
};

// Settings shared by the three experiment protocols.
struct CommonTraining {
  std::vector<std::string> variants;
  std::size_t repeats = 1;
  double lr = 0.001;
  std::size_t batch_size = 256;
  std::size_t cutoff = 2;
  std::vector<std::size_t> encoder_units = {64, 32};
  std::size_t history_every = 0;
  bool parallel_repeats = true;
  bool save_checkpoints = true;
};

struct FewShotSection {
  CommonTraining common{{"baseline", "baseline+R", "baseline+T", "baseline+B", "baseline+R+T+B"}, 10};
  std::vector<std::size_t> shots = {5, 10, 20, 50, 100};
  std::size_t main_epochs = 2000;
  std::size_t ssl_epochs = 0;
  // Pretext pool drawn per class from the source file; 0 uses all of it.
  std::size_t ssl_pool_per_class = 0;
};

struct StandardSection {
  CommonTraining common{{"baseline", "baseline+R", "baseline+T", "baseline+B", "baseline+R+T+B"}, 1};
  // Per-class split of the source file; the remainder is the test split.
  std::size_t train_per_class = 1200;
  std::size_t val_per_class = 400;
  PatiencePolicy patience;
};

struct DaSection {
  CommonTraining common{{"baseline", "baseline+R+T+B", "baseline+D", "baseline+R+T+B+D"}, 5};
  std::size_t epochs = 100;
  // Per class, held out of the unlabeled target pool, paired with the same
  // number of few-shot file samples to score the domain head.
  std::size_t heldout_per_class = 100;
};

struct InspectSection {
  std::vector<std::size_t> bands;  // empty: all
  std::vector<int> classes;        // empty: all
};

struct EvalSection {
  std::filesystem::path checkpoint = "checkpoint.json";
  std::filesystem::path data = "source.csv";
  // Second domain for task "domain"; the first file is labeled source.
  std::filesystem::path target;
  std::string task = "crop";
};

struct RunConfig {
  std::uint64_t seed = 0;
  DataPaths data;
  GenDataSection gen_data;
  FewShotSection fewshot;
  StandardSection standard;
  DaSection da;
  InspectSection inspect;
  EvalSection eval;

  // Throws ConfigError on invalid values.
  void validate() const;
};

// Missing keys keep their defaults. Relative paths resolve against base_dir.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
// Defaults resolved against base_dir, for runs without --config.
RunConfig default_run_config(const std::filesystem::path& base_dir);

nlohmann::json to_json(const RunConfig& config);

TrainConfig train_config_for(const CommonTraining& common, const std::string& variant,
                             std::uint64_t seed);

}  // namespace sscrop::cli
