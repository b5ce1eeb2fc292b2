#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sscrop/cli/commands.hpp"
#include "sscrop/cli/config.hpp"
#include "sscrop/error.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kNumeric = 4 };

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace sscrop::cli;

  CLI::App app{"Self-supervised multi-task crop classification experiments"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "overrides the config seed");

  auto* gen = app.add_subcommand("gen-data", "write synthetic source, few-shot and target CSVs");
  auto* exp = app.add_subcommand("experiment", "run a training protocol");
  std::string kind;
  exp->add_option("kind", kind, "fewshot, standard or da")
      ->required()
      ->check(CLI::IsMember({"fewshot", "standard", "da"}));
  auto* inspect = app.add_subcommand("inspect", "per-class band distributions of source vs target");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  for (auto* sub : {gen, exp, inspect, eval}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  set_log_level(log_level_from_env());
  try {
    RunConfig config = config_path.empty() ? default_run_config(fs::current_path())
                                           : load_run_config(config_path);
    if (seed) config.seed = *seed;
    const fs::path out = fs::absolute(out_dir).lexically_normal();
    if (gen->parsed()) {
      cmd_gen_data(config, out);
    } else if (exp->parsed()) {
      cmd_experiment(kind, config, out);
    } else if (inspect->parsed()) {
      cmd_inspect(config, out);
    } else if (eval->parsed()) {
      cmd_eval(config, out);
    }
  } catch (const sscrop::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const sscrop::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kIo;
  } catch (const sscrop::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
