#include "sscrop/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "sscrop/data/constructors.hpp"
#include "sscrop/error.hpp"
#include "sscrop/numeric/adam.hpp"
#include "sscrop/numeric/tape.hpp"
#include "sscrop/train/evaluate.hpp"
#include "sscrop/train/schedule.hpp"

namespace sscrop {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ValueError("learning rate must be positive");
  if (main_epochs < 1) throw ValueError("main_epochs must be at least 1");
  if (batch_size < 1) throw ValueError("batch_size must be at least 1");
  if (repeats < 1) throw ValueError("repeats must be at least 1");
  if (cutoff < 1) throw ValueError("cutoff must be at least 1");
}

void PatiencePolicy::validate(double initial_lr) const {
  if (patience < 1) throw ValueError("patience must be at least 1");
  if (max_epochs < 1) throw ValueError("max_epochs must be at least 1");
  if (lr_halving && !(min_lr > 0.0 && min_lr < initial_lr)) {
    throw ValueError("min_lr must lie in (0, initial lr)");
  }
}

std::size_t resolved_ssl_epochs(const TrainConfig& config) {
  if (config.ssl_epochs != 0) return config.ssl_epochs;
  const std::size_t n = config.tasks.ssl_count();
  if (n == 0) return 0;
  return n == 1 ? 20 : 10;
}

ModelConfig model_config_for(const TrainConfig& config, std::size_t steps, std::size_t bands) {
  ModelConfig mc;
  mc.steps = steps;
  mc.bands = bands;
  mc.cutoff = config.cutoff;
  mc.encoder_units = config.encoder_units;
  mc.tasks = config.tasks;
  mc.grl_on_domain = true;
  mc.seed = config.seed;
  return mc;
}

SslDatasets build_ssl_datasets(const TaskDataset& pool, const TaskActivation& tasks,
                               std::size_t cutoff) {
  SslDatasets out;
  if (tasks.rotation) out.emplace(Task::Rotation, make_rotation(pool));
  if (tasks.time_segment) out.emplace(Task::TimeSegment, make_time_segment(pool, cutoff));
  if (tasks.band) out.emplace(Task::Band, make_band(pool));
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t stream_seed(std::uint64_t seed, Task t) {
  std::uint64_t x = seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t) + 1;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct LossAccumulator {
  std::map<Task, std::pair<double, std::size_t>> sums;
  void add(Task t, double v) {
    auto& s = sums[t];
    s.first += v;
    ++s.second;
  }
  void clear() { sums.clear(); }
};

TaskBatch make_batch(const TaskDataset& data, std::span<const std::size_t> idx) {
  TaskBatch b;
  b.inputs = to_batch(data, idx);
  b.labels.reserve(idx.size());
  for (std::size_t i : idx) b.labels.push_back(data.labels[i]);
  return b;
}

TaskBatch full_batch(const TaskDataset& data) {
  TaskBatch b;
  b.inputs = to_batch(data);
  b.labels = data.labels;
  return b;
}

// One Adam optimiser over all model parameters; each step minimises the
// unweighted sum of the given task losses.
class JointOptimizer {
 public:
  JointOptimizer(ModelGraph& model, double lr)
      : model_(model), adam_(model.parameter_sizes(), AdamConfig{lr}) {}

  void set_lr(double lr) { adam_.set_lr(lr); }
  double lr() const { return adam_.lr(); }

  void step(const std::vector<std::pair<Task, const TaskBatch*>>& terms, LossAccumulator& acc) {
    GradTape tape;
    for (const auto& [task, batch] : terms) {
      acc.add(task, model_.record_task_loss(tape, *batch, task));
    }
    if (!std::isfinite(tape.loss())) throw NumericError("training loss is not finite");
    const auto grads = model_.gather_gradients(tape.backward());
    std::vector<std::span<const double>> grad_views(grads.begin(), grads.end());
    auto params = model_.parameters();
    adam_.step(params, grad_views);
  }

 private:
  ModelGraph& model_;
  AdamState adam_;
};

// Streams over a set of task datasets that are traversed together, one joint
// step per slice.
class JointEpoch {
 public:
  JointEpoch(const std::map<Task, const TaskDataset*>& data, std::size_t batch_size,
             std::uint64_t seed)
      : batch_size_(batch_size) {
    for (const auto& [task, ds] : data) {
      if (ds->empty()) continue;
      entries_.push_back({task, ds, BatchStream(ds->size(), stream_seed(seed, task))});
    }
  }

  bool empty() const { return entries_.empty(); }

  // Traverse every dataset once. `extra` terms are added to every step.
  void run(JointOptimizer& opt, LossAccumulator& acc,
           const std::vector<std::pair<Task, const TaskBatch*>>& extra = {}) {
    std::vector<std::size_t> sizes;
    for (const auto& e : entries_) sizes.push_back(e.stream.dataset_size());
    const std::size_t steps = joint_steps(sizes, batch_size_);
    for (auto& e : entries_) e.stream.begin_epoch(steps);
    std::vector<TaskBatch> batches(entries_.size());
    for (std::size_t s = 0; s < steps; ++s) {
      std::vector<std::pair<Task, const TaskBatch*>> terms = extra;
      for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto idx = entries_[i].stream.slice(s);
        if (idx.empty()) continue;
        batches[i] = make_batch(*entries_[i].data, idx);
        terms.emplace_back(entries_[i].task, &batches[i]);
      }
      if (!terms.empty()) opt.step(terms, acc);
    }
  }

 private:
  struct Entry {
    Task task;
    const TaskDataset* data;
    BatchStream stream;
  };
  std::size_t batch_size_;
  std::vector<Entry> entries_;
};

void flush_losses(RunReport& report, std::size_t epoch, LossAccumulator& acc) {
  for (const auto& [task, s] : acc.sums) {
    report.history.push_back(
        {epoch, std::string(to_string(task)), s.first / static_cast<double>(s.second), kNaN});
  }
  acc.clear();
}

void require_ssl(const TrainConfig& config, const SslDatasets& ssl) {
  for (Task t : {Task::Rotation, Task::TimeSegment, Task::Band}) {
    if (config.tasks.active(t) && !ssl.count(t)) {
      throw ValueError(std::string("task ") + std::string(to_string(t)) +
                       " is active but its dataset is missing");
    }
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finish(RunReport& report, const ModelGraph& model, const TaskDataset& test) {
  const EvalResult res = evaluate(model, test, Task::Crop);
  report.final_accuracy["crop"] = res.accuracy;
  report.confusion = res.confusion;
}

}  // namespace

TrainedRun train_fewshot(const TrainConfig& config, const TaskDataset& few_shot,
                         const TaskDataset& ssl_source, const TaskDataset& test) {
  return train_fewshot(config, few_shot, build_ssl_datasets(ssl_source, config.tasks, config.cutoff),
                       test);
}

TrainedRun train_fewshot(const TrainConfig& config, const TaskDataset& few_shot,
                         const SslDatasets& ssl, const TaskDataset& test) {
  config.validate();
  if (config.tasks.domain) throw ValueError("few-shot protocol has no domain task");
  if (few_shot.empty()) throw ValueError("few-shot set is empty");
  require_ssl(config, ssl);
  const auto start = Clock::now();

  TrainedRun run{ModelGraph::build(model_config_for(config, few_shot.steps, few_shot.bands)), {}};
  RunReport& report = run.report;
  report.protocol = "fewshot";
  report.variant = config.tasks.name();
  report.seed = config.seed;

  JointOptimizer opt(run.model, config.lr);
  std::map<Task, const TaskDataset*> ssl_data;
  for (const auto& [task, ds] : ssl) {
    if (config.tasks.active(task)) ssl_data.emplace(task, &ds);
  }
  JointEpoch ssl_epoch(ssl_data, config.batch_size, config.seed);
  report.ssl_schedule =
      ssl_epoch.empty() ? std::vector<std::size_t>{}
                        : ssl_epoch_slots(config.main_epochs, resolved_ssl_epochs(config));

  const TaskBatch shots = full_batch(few_shot);
  const std::vector<std::pair<Task, const TaskBatch*>> main_term = {{Task::Crop, &shots}};
  const std::size_t every =
      config.history_every ? config.history_every : std::max<std::size_t>(1, config.main_epochs / 100);

  LossAccumulator acc;
  std::size_t slot = 0;
  for (std::size_t epoch = 0; epoch < config.main_epochs; ++epoch) {
    const bool log = epoch % every == 0 || epoch + 1 == config.main_epochs;
    while (slot < report.ssl_schedule.size() && report.ssl_schedule[slot] == epoch) {
      LossAccumulator ssl_acc;
      ssl_epoch.run(opt, ssl_acc, main_term);
      ssl_acc.sums.erase(Task::Crop);
      flush_losses(report, epoch, ssl_acc);
      ++slot;
    }
    opt.step(main_term, acc);
    if (log) {
      const auto& [sum, n] = acc.sums[Task::Crop];
      const double train_acc = evaluate(run.model, few_shot, Task::Crop).accuracy;
      report.history.push_back({epoch, "crop", sum / static_cast<double>(n), train_acc});
    }
    acc.clear();
  }
  report.epochs_run = config.main_epochs;
  finish(report, run.model, test);
  report.wall_seconds = seconds_since(start);
  return run;
}

TrainedRun train_standard(const TrainConfig& config, const PatiencePolicy& policy,
                          const TaskDataset& train, const TaskDataset& val,
                          const TaskDataset& test) {
  config.validate();
  policy.validate(config.lr);
  if (config.tasks.domain) throw ValueError("standard protocol has no domain task");
  if (train.empty() || val.empty() || test.empty()) {
    throw ValueError("standard protocol needs non-empty train, validation and test splits");
  }
  const auto start = Clock::now();

  TrainedRun run{ModelGraph::build(model_config_for(config, train.steps, train.bands)), {}};
  RunReport& report = run.report;
  report.protocol = "standard";
  report.variant = config.tasks.name();
  report.seed = config.seed;

  const SslDatasets ssl = build_ssl_datasets(train, config.tasks, config.cutoff);
  std::map<Task, const TaskDataset*> data = {{Task::Crop, &train}};
  for (const auto& [task, ds] : ssl) data.emplace(task, &ds);
  JointEpoch epoch_runner(data, config.batch_size, config.seed);
  JointOptimizer opt(run.model, config.lr);

  double lr = config.lr;
  double best = -1.0;
  std::size_t wait = 0;
  ModelGraph best_model = run.model;
  LossAccumulator acc;
  for (std::size_t epoch = 0; epoch < policy.max_epochs; ++epoch) {
    epoch_runner.run(opt, acc);
    flush_losses(report, epoch, acc);
    const double val_acc = evaluate(run.model, val, Task::Crop).accuracy;
    report.history.push_back({epoch, "val", kNaN, val_acc});
    report.val_accuracy.push_back(val_acc);
    report.lr_history.push_back(lr);
    report.epochs_run = epoch + 1;

    if (val_acc > best) {
      best = val_acc;
      report.best_epoch = epoch;
      best_model = run.model;
      wait = 0;
      continue;
    }
    if (++wait < policy.patience) continue;
    if (!policy.lr_halving || lr <= policy.min_lr) break;
    lr = std::max(lr / 2.0, policy.min_lr);
    opt.set_lr(lr);
    wait = 0;
  }
  run.model = best_model;
  report.best_val_accuracy = best;
  finish(report, run.model, test);
  report.wall_seconds = seconds_since(start);
  return run;
}

TrainedRun train_domain_adaptation(const TrainConfig& config, const TaskDataset& source_labeled,
                                   const UnlabeledView& target_unlabeled,
                                   const TaskDataset& target_test,
                                   const TaskDataset* heldout_domain) {
  config.validate();
  if (source_labeled.empty()) throw ValueError("domain adaptation needs labeled source samples");
  if (target_test.empty()) throw ValueError("domain adaptation needs a target test set");
  const auto start = Clock::now();

  TrainedRun run{
      ModelGraph::build(model_config_for(config, source_labeled.steps, source_labeled.bands)), {}};
  RunReport& report = run.report;
  report.protocol = "da";
  report.variant = config.tasks.name();
  report.seed = config.seed;

  const TaskDataset target = target_unlabeled.as_unlabeled();
  const TaskDataset pooled = make_union_unlabeled(source_labeled, target);
  const SslDatasets ssl = build_ssl_datasets(pooled, config.tasks, config.cutoff);
  TaskDataset domain;
  if (config.tasks.domain) domain = make_domain(source_labeled, target);

  std::map<Task, const TaskDataset*> data = {{Task::Crop, &source_labeled}};
  for (const auto& [task, ds] : ssl) data.emplace(task, &ds);
  if (config.tasks.domain) data.emplace(Task::Domain, &domain);
  JointEpoch epoch_runner(data, config.batch_size, config.seed);
  JointOptimizer opt(run.model, config.lr);

  const bool score_domain = heldout_domain != nullptr && config.tasks.domain;
  LossAccumulator acc;
  for (std::size_t epoch = 0; epoch < config.main_epochs; ++epoch) {
    epoch_runner.run(opt, acc);
    flush_losses(report, epoch, acc);
    if (score_domain) {
      report.history.push_back(
          {epoch, "domain_heldout", kNaN, evaluate(run.model, *heldout_domain, Task::Domain).accuracy});
    }
  }
  report.epochs_run = config.main_epochs;
  finish(report, run.model, target_test);
  if (score_domain) {
    report.final_accuracy["domain"] = evaluate(run.model, *heldout_domain, Task::Domain).accuracy;
  }
  report.wall_seconds = seconds_since(start);
  return run;
}

}  // namespace sscrop
