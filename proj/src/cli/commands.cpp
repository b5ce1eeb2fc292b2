#include "sscrop/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "sscrop/data/constructors.hpp"
#include "sscrop/data/csv.hpp"
#include "sscrop/data/distribution.hpp"
#include "sscrop/data/sampling.hpp"
#include "sscrop/error.hpp"
#include "sscrop/model/checkpoint.hpp"
#include "sscrop/train/evaluate.hpp"
#include "sscrop/train/trainer.hpp"

namespace sscrop::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::atomic<LogLevel> g_level{LogLevel::Info};

template <class... Args>
void log_info(const char* fmt, Args... args) {
  if (g_level.load() == LogLevel::Quiet) return;
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

template <class... Args>
void log_debug(const char* fmt, Args... args) {
  if (g_level.load() != LogLevel::Debug) return;
  std::fprintf(stderr, fmt, args...);
  std::fputc('\n', stderr);
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void echo_config(const RunConfig& config, const fs::path& out) {
  make_dir(out);
  write_json(out / "config.json", to_json(config));
}

TaskDataset load_labeled(const fs::path& path, double scale, const char* what) {
  if (path.empty()) throw ConfigError(std::string("no ") + what + " file configured");
  if (!fs::exists(path)) throw IoError(std::string(what) + " file not found: " + path.string());
  TaskDataset data = ingest_csv(path, scale);
  for (int label : data.labels) {
    if (label == kUnlabeled) {
      throw ConfigError(std::string(what) + " file " + path.string() + " has unlabeled rows");
    }
  }
  return data;
}

std::string checkpoint_name(const std::string& variant, const std::string& shots) {
  return shots.empty() ? variant + ".json" : variant + "_k" + shots + ".json";
}

SummaryRow summarize(const ExperimentReport& rep, const std::string& shots, bool best_epoch) {
  SummaryRow row{rep.protocol, rep.variant, shots, rep.runs.size(), rep.mean, rep.std, 0.0, kNaN};
  double epochs = 0.0;
  double domain = 0.0;
  std::size_t domain_runs = 0;
  for (const auto& r : rep.runs) {
    epochs += static_cast<double>(best_epoch ? r.best_epoch + 1 : r.epochs_run);
    const auto it = r.final_accuracy.find("domain");
    if (it != r.final_accuracy.end()) {
      domain += it->second;
      ++domain_runs;
    }
  }
  row.mean_epochs = epochs / static_cast<double>(rep.runs.size());
  if (domain_runs > 0) row.mean_domain_accuracy = domain / static_cast<double>(domain_runs);
  return row;
}

json train_config_json(const TrainConfig& c) {
  return {{"lr", c.lr},
          {"main_epochs", c.main_epochs},
          {"ssl_epochs", resolved_ssl_epochs(c)},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"variant", c.tasks.name()},
          {"cutoff", c.cutoff},
          {"repeats", c.repeats},
          {"encoder_units", c.encoder_units}};
}

struct Collected {
  std::vector<ExperimentReport> reports;
  std::vector<std::string> shots;
  std::vector<SummaryRow> summary;
};

void write_experiment_outputs(const fs::path& out, const std::string& kind, const Collected& c) {
  json runs = json::array();
  std::vector<std::pair<std::string, const ExperimentReport*>> hist;
  for (std::size_t i = 0; i < c.reports.size(); ++i) {
    json r = to_json(c.reports[i]);
    r["shots"] = c.shots[i];
    runs.push_back(std::move(r));
    hist.emplace_back(c.shots[i], &c.reports[i]);
  }
  write_json(out / "report.json", {{"protocol", kind}, {"experiments", runs}});
  write_history_csv(out / "history.csv", hist);
  write_summary_csv(out / "summary.csv", c.summary);
}

Collected run_fewshot(const RunConfig& cfg, const fs::path& out) {
  const auto& sec = cfg.fewshot;
  const TaskDataset source = load_labeled(cfg.data.source, cfg.data.scale, "source");
  const TaskDataset pool = load_labeled(cfg.data.few_shot, cfg.data.scale, "few-shot");
  const TaskDataset ssl_pool =
      sec.ssl_pool_per_class ? sample_few_shot(source, sec.ssl_pool_per_class, cfg.seed) : source;

  Collected c;
  for (const auto& variant : sec.common.variants) {
    TrainConfig tc = train_config_for(sec.common, variant, cfg.seed);
    tc.main_epochs = sec.main_epochs;
    tc.ssl_epochs = sec.ssl_epochs;
    const SslDatasets ssl = build_ssl_datasets(ssl_pool, tc.tasks, tc.cutoff);
    for (std::size_t k : sec.shots) {
      const std::string shots = std::to_string(k);
      log_info("fewshot %s k=%zu: %zu repeats", tc.tasks.name().c_str(), k, tc.repeats);
      ExperimentReport rep = run_repeats(
          tc,
          [&](const TrainConfig& run_cfg) {
            const TaskDataset few = sample_few_shot(pool, k, run_cfg.seed);
            TrainedRun run = train_fewshot(run_cfg, few, ssl, source);
            if (sec.common.save_checkpoints && run_cfg.seed == cfg.seed) {
              save_checkpoint(out / "checkpoints" / checkpoint_name(tc.tasks.name(), shots), run.model);
            }
            log_debug("  seed %llu: %.4f", static_cast<unsigned long long>(run_cfg.seed),
                      run.report.accuracy());
            return std::move(run.report);
          },
          sec.common.parallel_repeats);
      rep.config = train_config_json(tc);
      rep.config["shots"] = k;
      log_info("  mean %.4f std %.4f", rep.mean, rep.std);
      c.summary.push_back(summarize(rep, shots, false));
      c.shots.push_back(shots);
      c.reports.push_back(std::move(rep));
    }
  }
  return c;
}

Collected run_standard(const RunConfig& cfg, const fs::path& out) {
  const auto& sec = cfg.standard;
  const TaskDataset source = load_labeled(cfg.data.source, cfg.data.scale, "source");
  const std::vector<std::size_t> parts = {sec.train_per_class, sec.val_per_class, kRest};
  const auto split = stratified_split(source, parts, cfg.seed);

  Collected c;
  for (const auto& variant : sec.common.variants) {
    TrainConfig tc = train_config_for(sec.common, variant, cfg.seed);
    tc.main_epochs = sec.patience.max_epochs;
    log_info("standard %s: %zu repeats", tc.tasks.name().c_str(), tc.repeats);
    ExperimentReport rep = run_repeats(
        tc,
        [&](const TrainConfig& run_cfg) {
          TrainedRun run = train_standard(run_cfg, sec.patience, split[0], split[1], split[2]);
          if (sec.common.save_checkpoints && run_cfg.seed == cfg.seed) {
            save_checkpoint(out / "checkpoints" / checkpoint_name(tc.tasks.name(), ""), run.model);
          }
          log_info("  seed %llu: best epoch %zu, val %.4f, test %.4f",
                   static_cast<unsigned long long>(run_cfg.seed), run.report.best_epoch + 1,
                   run.report.best_val_accuracy, run.report.accuracy());
          return std::move(run.report);
        },
        sec.common.parallel_repeats);
    rep.config = train_config_json(tc);
    rep.config["patience"] = {{"patience", sec.patience.patience},
                              {"lr_halving", sec.patience.lr_halving},
                              {"min_lr", sec.patience.min_lr},
                              {"max_epochs", sec.patience.max_epochs}};
    c.summary.push_back(summarize(rep, "all", true));
    c.shots.push_back("all");
    c.reports.push_back(std::move(rep));
  }
  return c;
}

Collected run_da(const RunConfig& cfg, const fs::path& out) {
  const auto& sec = cfg.da;
  if (cfg.data.target.empty()) throw ConfigError("da protocol needs a target file (data.target)");
  const TaskDataset source = load_labeled(cfg.data.source, cfg.data.scale, "source");
  const TaskDataset pool = load_labeled(cfg.data.few_shot, cfg.data.scale, "few-shot");
  // Target labels are only read for the final evaluation.
  const TaskDataset target = load_labeled(cfg.data.target, cfg.data.scale, "target");

  const std::size_t heldout = sec.heldout_per_class * static_cast<std::size_t>(kCropClasses);
  if (heldout >= target.size() || heldout > pool.size()) {
    throw ConfigError("da.heldout_per_class is too large for the target or few-shot file");
  }
  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(target.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> held(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(heldout));
  std::vector<std::size_t> rest(order.begin() + static_cast<std::ptrdiff_t>(heldout), order.end());
  std::sort(held.begin(), held.end());
  std::sort(rest.begin(), rest.end());
  std::vector<std::size_t> pool_order(pool.size());
  std::iota(pool_order.begin(), pool_order.end(), std::size_t{0});
  std::shuffle(pool_order.begin(), pool_order.end(), rng);
  pool_order.resize(heldout);
  std::sort(pool_order.begin(), pool_order.end());

  const UnlabeledView target_train(subset(target, rest));
  const TaskDataset domain_heldout = make_domain(subset(pool, pool_order), subset(target, held));

  Collected c;
  for (const auto& variant : sec.common.variants) {
    TrainConfig tc = train_config_for(sec.common, variant, cfg.seed);
    tc.main_epochs = sec.epochs;
    log_info("da %s: %zu repeats", tc.tasks.name().c_str(), tc.repeats);
    ExperimentReport rep = run_repeats(
        tc,
        [&](const TrainConfig& run_cfg) {
          TrainedRun run =
              train_domain_adaptation(run_cfg, source, target_train, target, &domain_heldout);
          if (sec.common.save_checkpoints && run_cfg.seed == cfg.seed) {
            save_checkpoint(out / "checkpoints" / checkpoint_name(tc.tasks.name(), ""), run.model);
          }
          return std::move(run.report);
        },
        sec.common.parallel_repeats);
    rep.config = train_config_json(tc);
    rep.config["heldout_per_class"] = sec.heldout_per_class;
    log_info("  target mean %.4f std %.4f", rep.mean, rep.std);
    c.summary.push_back(summarize(rep, "all", false));
    c.shots.push_back("all");
    c.reports.push_back(std::move(rep));
  }
  return c;
}

std::vector<std::size_t> bands_of(const InspectSection& s, std::size_t bands) {
  if (s.bands.empty()) {
    std::vector<std::size_t> all(bands);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
  }
  for (std::size_t b : s.bands) {
    if (b >= bands) throw ConfigError("inspect band " + std::to_string(b) + " not in the data");
  }
  return s.bands;
}

std::vector<int> classes_of(const InspectSection& s) {
  if (!s.classes.empty()) return s.classes;
  std::vector<int> all(kCropClasses);
  std::iota(all.begin(), all.end(), 0);
  return all;
}

}  // namespace

LogLevel log_level_from_env() {
  const char* v = std::getenv("SSCROP_LOG");
  if (v == nullptr) return LogLevel::Info;
  const std::string s(v);
  if (s == "quiet" || s == "0") return LogLevel::Quiet;
  if (s == "debug" || s == "2") return LogLevel::Debug;
  return LogLevel::Info;
}

void set_log_level(LogLevel level) { g_level.store(level); }

void write_summary_csv(const fs::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  out << "protocol,variant,shots,repeats,mean_accuracy,std_accuracy,mean_epochs,mean_domain_accuracy\n";
  for (const auto& r : rows) {
    out << r.protocol << ',' << r.variant << ',' << r.shots << ',' << r.repeats << ','
        << format_double(r.mean) << ',' << format_double(r.std) << ',' << format_double(r.mean_epochs)
        << ',' << format_double(r.mean_domain_accuracy) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void cmd_gen_data(const RunConfig& config, const fs::path& out) {
  const auto& g = config.gen_data;
  // The echo points at the generated files so it can drive the next command.
  RunConfig echo = config;
  echo.data.source = out / "source.csv";
  echo.data.few_shot = out / "few_shot.csv";
  echo.data.target = out / "target.csv";
  echo.data.scale = g.raw_scale;
  echo_config(echo, out);
  const synth::Scenario s = synth::make_scenario(g.scenario, config.seed);
  write_csv(out / "source.csv", s.source, DomainTag::Source, g.raw_scale, "s");
  write_csv(out / "few_shot.csv", s.few_shot, DomainTag::Source, g.raw_scale, "f");
  write_csv(out / "target.csv", s.target, DomainTag::Target, g.raw_scale, "t");
  const std::pair<const char*, const TaskDataset*> files[] = {
      {"source.csv", &s.source}, {"few_shot.csv", &s.few_shot}, {"target.csv", &s.target}};
  for (const auto& [name, data] : files) {
    const auto counts = data->class_counts();
    std::printf("%s:", name);
    for (std::size_t c = 0; c < counts.size(); ++c) std::printf(" class%zu=%zu", c, counts[c]);
    std::printf(" total=%zu\n", data->size());
  }
}

void cmd_experiment(const std::string& kind, const RunConfig& config, const fs::path& out) {
  Collected c;
  echo_config(config, out);
  make_dir(out / "checkpoints");
  if (kind == "fewshot") {
    c = run_fewshot(config, out);
  } else if (kind == "standard") {
    c = run_standard(config, out);
  } else if (kind == "da") {
    c = run_da(config, out);
  } else {
    throw ConfigError("unknown experiment kind: " + kind + " (fewshot, standard, da)");
  }
  write_experiment_outputs(out, kind, c);
  for (const auto& r : c.summary) {
    std::printf("%s %s shots=%s mean=%.4f std=%.4f epochs=%.1f\n", r.protocol.c_str(),
                r.variant.c_str(), r.shots.c_str(), r.mean, r.std, r.mean_epochs);
  }
}

void cmd_inspect(const RunConfig& config, const fs::path& out) {
  echo_config(config, out);
  const TaskDataset source = load_labeled(config.data.source, config.data.scale, "source");
  const TaskDataset target = load_labeled(config.data.target, config.data.scale, "target");
  if (source.steps != target.steps || source.bands != target.bands) {
    throw ConfigError("source and target files have different shapes");
  }
  const auto bands = bands_of(config.inspect, source.bands);
  const auto classes = classes_of(config.inspect);

  auto curves = open_out(out / "curves.csv");
  auto hist = open_out(out / "histograms.csv");
  auto gap = open_out(out / "gap.csv");
  curves << "domain,class,band,t,samples,mean,std\n";
  hist << "domain,class,band,t,bin,low,high,count\n";
  gap << "class,band,t,source_mean,target_mean,gap\n";
  const double width = (kHistogramHigh - kHistogramLow) / static_cast<double>(kHistogramBins);
  for (int cls : classes) {
    for (std::size_t b : bands) {
      const BandDistribution dists[] = {band_distribution_report(source, cls, b),
                                        band_distribution_report(target, cls, b)};
      for (int d = 0; d < 2; ++d) {
        const std::string name(to_string(static_cast<DomainTag>(d)));
        for (std::size_t t = 0; t < dists[d].steps.size(); ++t) {
          const auto& s = dists[d].steps[t];
          curves << name << ',' << cls << ',' << b << ',' << t << ',' << dists[d].samples << ','
                 << format_double(s.mean) << ',' << format_double(s.std) << '\n';
          for (std::size_t i = 0; i < s.histogram.size(); ++i) {
            hist << name << ',' << cls << ',' << b << ',' << t << ',' << i << ','
                 << format_double(kHistogramLow + width * static_cast<double>(i)) << ','
                 << format_double(kHistogramLow + width * static_cast<double>(i + 1)) << ','
                 << s.histogram[i] << '\n';
          }
        }
      }
      for (std::size_t t = 0; t < source.steps; ++t) {
        const double ms = dists[0].steps[t].mean;
        const double mt = dists[1].steps[t].mean;
        gap << cls << ',' << b << ',' << t << ',' << format_double(ms) << ',' << format_double(mt)
            << ',' << format_double(mt - ms) << '\n';
      }
    }
  }
  if (!curves || !hist || !gap) throw IoError("write failed under " + out.string());
  log_info("inspect: %zu classes x %zu bands x %zu steps", classes.size(), bands.size(), source.steps);
}

void cmd_eval(const RunConfig& config, const fs::path& out) {
  echo_config(config, out);
  const auto& e = config.eval;
  if (!fs::exists(e.checkpoint)) throw IoError("checkpoint not found: " + e.checkpoint.string());
  const ModelGraph model = load_checkpoint(e.checkpoint);
  const Task task = task_from_string(e.task);
  if (!model.has_head(task)) throw ConfigError("checkpoint has no " + e.task + " head");
  const std::size_t cutoff = model.config().cutoff;

  TaskDataset data;
  if (task == Task::Domain) {
    const TaskDataset a = ingest_csv(e.data, config.data.scale);
    if (e.target.empty()) throw ConfigError("eval.task domain needs eval.target");
    const TaskDataset b = ingest_csv(e.target, config.data.scale);
    data = make_domain(a, b);
  } else {
    const TaskDataset raw = task == Task::Crop ? load_labeled(e.data, config.data.scale, "eval data")
                                               : ingest_csv(e.data, config.data.scale);
    switch (task) {
      case Task::Crop: data = raw; break;
      case Task::Rotation: data = make_rotation(raw); break;
      case Task::TimeSegment: data = make_time_segment(raw, cutoff); break;
      case Task::Band: data = make_band(raw); break;
      case Task::Domain: break;
    }
  }
  const EvalResult r = evaluate(model, data, task);
  write_json(out / "eval.json", {{"task", e.task},
                                 {"checkpoint", e.checkpoint.string()},
                                 {"data", e.data.string()},
                                 {"accuracy", r.accuracy},
                                 {"correct", r.correct},
                                 {"total", r.total},
                                 {"confusion", r.confusion}});
  std::printf("%s accuracy %.4f (%zu/%zu)\n", e.task.c_str(), r.accuracy, r.correct, r.total);
}

}  // namespace sscrop::cli
