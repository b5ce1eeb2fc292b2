#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sscrop/cli/commands.hpp"
#include "sscrop/cli/config.hpp"
#include "sscrop/data/csv.hpp"
#include "sscrop/error.hpp"

namespace sscrop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sscrop_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

class Quiet : public ::testing::Environment {
 public:
  void SetUp() override { set_log_level(LogLevel::Quiet); }
};
const auto* const kQuiet = ::testing::AddGlobalTestEnvironment(new Quiet);

// Small generated data under `dir`, shared by the command tests.
RunConfig small_config(const fs::path& dir) {
  const json j = {
      {"seed", 5},
      {"data", {{"source", "source.csv"}, {"few_shot", "few_shot.csv"}, {"target", "target.csv"}}},
      {"gen_data", {{"source_per_class", 20}, {"few_shot_per_class", 100}, {"target_per_class", 20}}},
      {"fewshot",
       {{"repeats", 1}, {"main_epochs", 3}, {"encoder_units", {8, 4}}, {"batch_size", 64}}},
      {"da",
       {{"repeats", 1}, {"epochs", 1}, {"heldout_per_class", 5}, {"encoder_units", {8, 4}}}},
      {"standard",
       {{"train_per_class", 10},
        {"val_per_class", 5},
        {"encoder_units", {8, 4}},
        {"patience", {{"max_epochs", 2}}}}},
  };
  return parse_run_config(j, dir);
}

// ---------------------------------------------------------------- config

TEST(Config, DefaultsRoundTrip) {
  const RunConfig d = default_run_config("/base");
  EXPECT_EQ(d.fewshot.shots, (std::vector<std::size_t>{5, 10, 20, 50, 100}));
  EXPECT_EQ(d.fewshot.common.repeats, 10u);
  EXPECT_EQ(d.standard.patience.patience, 25u);
  EXPECT_EQ(d.standard.patience.min_lr, 0.00005);
  const json j = to_json(d);
  EXPECT_EQ(to_json(parse_run_config(j, "/elsewhere")), j);
}

TEST(Config, RelativePathsResolveAgainstBaseDir) {
  const RunConfig c = parse_run_config({{"data", {{"source", "sub/../s.csv"}}}}, "/base/dir");
  EXPECT_EQ(c.data.source, fs::path("/base/dir/s.csv"));
  EXPECT_EQ(c.data.target, fs::path("/base/dir/target.csv"));
  const RunConfig a = parse_run_config({{"data", {{"source", "/abs/s.csv"}}}}, "/base");
  EXPECT_EQ(a.data.source, fs::path("/abs/s.csv"));
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_run_config({{"sed", 1}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"fewshot", {{"shot", {5}}}}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"standard", {{"patience", {{"pateince", 3}}}}}}, "/"),
               ConfigError);
  try {
    parse_run_config({{"da", {{"epoch", 3}}}}, "/");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("da.epoch"), std::string::npos) << e.what();
  }
}

TEST(Config, TypeAndValueErrors) {
  EXPECT_THROW(parse_run_config({{"seed", "seven"}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"fewshot", {{"shots", 5}}}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"fewshot", {{"lr", -1.0}}}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"fewshot", {{"variants", {"baseline+D"}}}}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config({{"fewshot", {{"variants", {"baseline+Q"}}}}}, "/"), ConfigError);
  EXPECT_THROW(parse_run_config(json::array(), "/"), ConfigError);
  EXPECT_NO_THROW(parse_run_config({{"da", {{"variants", {"baseline+D"}}}}}, "/"));
}

TEST(Config, TrainConfigFromSection) {
  CommonTraining c;
  c.lr = 0.01;
  c.batch_size = 7;
  c.cutoff = 5;
  const TrainConfig t = train_config_for(c, "baseline+R+B", 42);
  EXPECT_EQ(t.seed, 42u);
  EXPECT_EQ(t.lr, 0.01);
  EXPECT_EQ(t.batch_size, 7u);
  EXPECT_EQ(t.cutoff, 5u);
  EXPECT_TRUE(t.tasks.rotation && t.tasks.band && !t.tasks.time_segment && !t.tasks.domain);
}

TEST(Config, LoadFromFile) {
  const fs::path dir = fresh_dir("load");
  std::ofstream(dir / "c.json") << R"({"seed": 9, "data": {"source": "x.csv"}})";
  const RunConfig c = load_run_config(dir / "c.json");
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.data.source, dir / "x.csv");
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_THROW(load_run_config(dir / "broken.json"), ConfigError);
  EXPECT_THROW(load_run_config(dir / "missing.json"), IoError);
}

// ---------------------------------------------------------------- gen-data

TEST(GenData, DefaultCountsAndDeterminism) {
  const fs::path a = fresh_dir("gen_a");
  const fs::path b = fresh_dir("gen_b");
  cmd_gen_data(default_run_config(a), a);
  cmd_gen_data(default_run_config(b), b);
  EXPECT_EQ(lines(a / "few_shot.csv").size(), 401u);
  EXPECT_EQ(lines(a / "source.csv").size(), 8001u);
  EXPECT_EQ(lines(a / "target.csv").size(), 8001u);
  for (const char* f : {"source.csv", "few_shot.csv", "target.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  ASSERT_TRUE(fs::exists(a / "config.json"));

  const RunConfig echo = load_run_config(a / "config.json");
  EXPECT_EQ(echo.data.source, a / "source.csv");
  EXPECT_EQ(echo.data.few_shot, a / "few_shot.csv");
  EXPECT_EQ(echo.data.target, a / "target.csv");

  const TaskDataset few = read_csv(a / "few_shot.csv").data;
  EXPECT_EQ(few.class_counts(), (std::vector<std::size_t>{100, 100, 100, 100}));
}

TEST(GenData, OnePerClass) {
  const fs::path dir = fresh_dir("gen_one");
  const RunConfig c = parse_run_config(
      {{"gen_data", {{"source_per_class", 1}, {"few_shot_per_class", 1}, {"target_per_class", 1}}}},
      dir);
  cmd_gen_data(c, dir);
  for (const char* f : {"source.csv", "few_shot.csv", "target.csv"})
    EXPECT_EQ(lines(dir / f).size(), 5u) << f;
  const auto target_rows = lines(dir / "target.csv");
  EXPECT_NE(target_rows[1].find(",target,"), std::string::npos);
}

TEST(GenData, SeedChangesData) {
  const fs::path a = fresh_dir("gen_s1");
  const fs::path b = fresh_dir("gen_s2");
  RunConfig c = small_config(a);
  cmd_gen_data(c, a);
  c = small_config(b);
  c.seed = 6;
  cmd_gen_data(c, b);
  EXPECT_NE(slurp(a / "source.csv"), slurp(b / "source.csv"));
}

// ---------------------------------------------------------------- experiments

TEST(Experiment, FewShotGridWritesEveryCell) {
  const fs::path dir = fresh_dir("fewshot");
  const RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  cmd_experiment("fewshot", c, dir / "out");
  const auto rows = lines(dir / "out" / "summary.csv");
  ASSERT_EQ(rows.size(), 26u);
  EXPECT_EQ(rows[0],
            "protocol,variant,shots,repeats,mean_accuracy,std_accuracy,mean_epochs,"
            "mean_domain_accuracy");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 8u) << rows[i];
    EXPECT_EQ(cells[0], "fewshot");
    const double acc = std::stod(cells[4]);
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
    EXPECT_EQ(cells[7], "");
  }
  const json report = json::parse(slurp(dir / "out" / "report.json"));
  EXPECT_EQ(report["experiments"].size(), 25u);
  EXPECT_TRUE(fs::exists(dir / "out" / "history.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "checkpoints" / "baseline+R+T+B_k100.json"));

  // The saved checkpoint reproduces the first repeat's score.
  RunConfig e = c;
  e.eval.checkpoint = dir / "out" / "checkpoints" / "baseline+T_k20.json";
  e.eval.data = c.data.source;
  cmd_eval(e, dir / "eval");
  const json ev = json::parse(slurp(dir / "eval" / "eval.json"));
  double expected = -1.0;
  for (const auto& x : report["experiments"])
    if (x["variant"] == "baseline+T" && x["shots"] == "20") expected = x["accuracies"][0];
  EXPECT_EQ(ev["accuracy"].get<double>(), expected);
}

TEST(Experiment, DomainAdaptationRows) {
  const fs::path dir = fresh_dir("da");
  const RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  cmd_experiment("da", c, dir / "out");
  const auto rows = lines(dir / "out" / "summary.csv");
  ASSERT_EQ(rows.size(), 5u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    ASSERT_EQ(cells.size(), 8u);
    EXPECT_EQ(cells[2], "all");
    const bool has_domain = cells[1].find('D') != std::string::npos;
    EXPECT_EQ(cells[7].empty(), !has_domain) << rows[i];
  }
}

TEST(Experiment, DomainAdaptationNeedsTarget) {
  const fs::path dir = fresh_dir("da_missing");
  RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  c.data.target.clear();
  EXPECT_THROW(cmd_experiment("da", c, dir / "out"), ConfigError);
  c = small_config(dir);
  c.data.target = dir / "nope.csv";
  EXPECT_THROW(cmd_experiment("da", c, dir / "out"), IoError);
}

TEST(Experiment, StandardRows) {
  const fs::path dir = fresh_dir("standard");
  const RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  cmd_experiment("standard", c, dir / "out");
  const auto rows = lines(dir / "out" / "summary.csv");
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    EXPECT_EQ(cells[0], "standard");
    EXPECT_LE(std::stod(cells[6]), 2.0);
  }
  EXPECT_THROW(cmd_experiment("bogus", c, dir / "out"), ConfigError);
}

TEST(Experiment, RerunFromEchoIsByteIdentical) {
  const fs::path dir = fresh_dir("rerun");
  RunConfig c = small_config(dir);
  c.fewshot.shots = {5};
  c.fewshot.common.variants = {"baseline", "baseline+R"};
  c.fewshot.common.repeats = 2;
  cmd_gen_data(c, dir);
  cmd_experiment("fewshot", c, dir / "a");
  const RunConfig echo = load_run_config(dir / "a" / "config.json");
  cmd_experiment("fewshot", echo, dir / "b");
  EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
  EXPECT_EQ(slurp(dir / "a" / "config.json"), slurp(dir / "b" / "config.json"));
}

// ---------------------------------------------------------------- inspect

TEST(Inspect, IdenticalDomainsHaveZeroGap) {
  const fs::path dir = fresh_dir("inspect_same");
  RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  c.data.target = c.data.source;
  cmd_inspect(c, dir / "out");
  const auto gap = lines(dir / "out" / "gap.csv");
  ASSERT_EQ(gap.size(), 1u + 4 * 7 * 10);
  for (std::size_t i = 1; i < gap.size(); ++i) EXPECT_EQ(std::stod(split(gap[i]).back()), 0.0);
  const auto curves = lines(dir / "out" / "curves.csv");
  EXPECT_EQ(curves.size(), 1u + 2 * 4 * 7 * 10);
  EXPECT_TRUE(fs::exists(dir / "out" / "histograms.csv"));
}

TEST(Inspect, SelectedBandsAndClasses) {
  const fs::path dir = fresh_dir("inspect_sel");
  RunConfig c = small_config(dir);
  cmd_gen_data(c, dir);
  c.inspect.bands = {3};
  c.inspect.classes = {0, 2};
  cmd_inspect(c, dir / "out");
  EXPECT_EQ(lines(dir / "out" / "gap.csv").size(), 1u + 2 * 1 * 10);
  c.inspect.bands = {9};
  EXPECT_THROW(cmd_inspect(c, dir / "out"), ConfigError);
}

// ---------------------------------------------------------------- executable

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string("SSCROP_LOG=quiet '") + SSCROP_CLI_PATH + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Executable, ExitCodes) {
  const fs::path dir = fresh_dir("exe");
  std::ofstream(dir / "ok.json") << R"({"gen_data": {"source_per_class": 2, "few_shot_per_class": 2, "target_per_class": 2}})";
  std::ofstream(dir / "unknown.json") << R"({"colour": 1})";
  std::ofstream(dir / "noeval.json") << R"({"eval": {"checkpoint": "missing.json"}})";
  std::ofstream(dir / "blocker") << "x";
  std::ofstream(dir / "explode.json") << R"({
    "gen_data": {"source_per_class": 10, "few_shot_per_class": 10, "target_per_class": 10},
    "fewshot": {"variants": ["baseline"], "shots": [5], "repeats": 1, "main_epochs": 50, "lr": 1e300}
  })";
  const std::string d = "'" + dir.string() + "'";

  EXPECT_EQ(run_cli("--config " + d + "/ok.json --out " + d + "/gen gen-data"), 0);
  EXPECT_TRUE(fs::exists(dir / "gen" / "source.csv"));
  EXPECT_EQ(run_cli("--config " + d + "/unknown.json --out " + d + "/u gen-data"), 2);
  EXPECT_EQ(run_cli("--config " + d + "/does_not_exist.json gen-data"), 2);
  EXPECT_EQ(run_cli("experiment nonsense"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("--config " + d + "/ok.json --out " + d + "/blocker/sub gen-data"), 3);
  EXPECT_EQ(run_cli("--config " + d + "/noeval.json --out " + d + "/ev eval"), 3);

  EXPECT_EQ(run_cli("--config " + d + "/explode.json --out " + d + " gen-data"), 0);
  EXPECT_EQ(run_cli("--config " + d + "/explode.json --out " + d + "/boom experiment fewshot"), 4);
}

TEST(Executable, SeedOverrideIsEchoed) {
  const fs::path dir = fresh_dir("exe_seed");
  std::ofstream(dir / "c.json") << R"({"seed": 1, "gen_data": {"source_per_class": 1, "few_shot_per_class": 1, "target_per_class": 1}})";
  const std::string d = "'" + dir.string() + "'";
  ASSERT_EQ(run_cli("--config " + d + "/c.json --seed 77 --out " + d + "/o gen-data"), 0);
  EXPECT_EQ(json::parse(slurp(dir / "o" / "config.json"))["seed"], 77);
}

}  // namespace
}  // namespace sscrop::cli
