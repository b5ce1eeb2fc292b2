#pragma once

#include <functional>
#include <map>

#include "sscrop/data/dataset.hpp"
#include "sscrop/model/model.hpp"
#include "sscrop/train/config.hpp"
#include "sscrop/train/report.hpp"

namespace sscrop {

// Pretext-task datasets keyed by task (Rotation, TimeSegment, Band).
using SslDatasets = std::map<Task, TaskDataset>;

// Builds the rotation / time-segment / band datasets enabled in `tasks` from
// an unlabeled (or labeled, labels ignored) pool.
SslDatasets build_ssl_datasets(const TaskDataset& pool, const TaskActivation& tasks,
                               std::size_t cutoff);

struct TrainedRun {
  ModelGraph model;
  RunReport report;
};

// Few-shot protocol. The crop head trains full-batch on `few_shot` for
// main_epochs; pretext epochs are spread over that run (ssl_epoch_slots).
// A pretext epoch traverses every pretext dataset once in joint steps, each
// step summing the pretext losses and the full few-shot crop loss. Final
// accuracy is measured on `test`.
TrainedRun train_fewshot(const TrainConfig& config, const TaskDataset& few_shot,
                         const SslDatasets& ssl, const TaskDataset& test);
TrainedRun train_fewshot(const TrainConfig& config, const TaskDataset& few_shot,
                         const TaskDataset& ssl_source, const TaskDataset& test);

// Standard protocol with validation patience: every `patience` epochs without
// a strictly better validation accuracy the learning rate halves (floored at
// min_lr); with no improvement at min_lr training stops. The best validation
// epoch's parameters are restored before testing. Pretext datasets are built
// from the training split.
TrainedRun train_standard(const TrainConfig& config, const PatiencePolicy& policy,
                          const TaskDataset& train, const TaskDataset& val,
                          const TaskDataset& test);

// Unsupervised domain adaptation. Crop loss on labeled source samples;
// pretext tasks on the pooled source and target samples; domain detection
// (source 0, target 1) through the gradient reversal layer. Target labels are
// only reachable through `target_test`, which is read after training.
// `heldout_domain`, when given, is a Domain-task set scored every epoch.
TrainedRun train_domain_adaptation(const TrainConfig& config, const TaskDataset& source_labeled,
                                   const UnlabeledView& target_unlabeled,
                                   const TaskDataset& target_test,
                                   const TaskDataset* heldout_domain = nullptr);

// Runs `experiment` with seeds seed, seed + 1, ... for config.repeats runs.
// Runs may execute concurrently; results are ordered by repeat index.
ExperimentReport run_repeats(const TrainConfig& config,
                             const std::function<RunReport(const TrainConfig&)>& experiment,
                             bool parallel = true);

}  // namespace sscrop
