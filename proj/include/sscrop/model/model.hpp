#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sscrop/data/dataset.hpp"
#include "sscrop/numeric/layers.hpp"
#include "sscrop/numeric/tape.hpp"

namespace sscrop {

// Which heads a model carries.
struct TaskActivation {
  bool crop = true;
  bool rotation = false;
  bool time_segment = false;
  bool band = false;
  bool domain = false;

  bool active(Task t) const noexcept;
  void set(Task t, bool on) noexcept;
  // Active tasks in kAllTasks order.
  std::vector<Task> tasks() const;
  // Number of active rotation / time-segment / band tasks.
  std::size_t ssl_count() const noexcept;

  // "baseline", "baseline+R", "baseline+T+B+R", "baseline+RTBD", "+RTB", ...
  // Letters: R rotation, T time-segment, B band, D domain. Crop is always on.
  static TaskActivation parse(std::string_view variant);
  // Canonical name, e.g. "baseline+R+T+B+D".
  std::string name() const;

  friend bool operator==(const TaskActivation&, const TaskActivation&) = default;
};

struct ModelConfig {
  std::size_t steps = kDefaultSteps;
  std::size_t bands = kDefaultBands;
  std::size_t cutoff = 2;
  std::vector<std::size_t> encoder_units = {64, 32};
  TaskActivation tasks;
  bool grl_on_domain = true;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// One batch of flattened samples for one task.
struct TaskBatch {
  Matrix inputs;
  std::vector<int> labels;
};

// Output width of a task head: 1 for the sigmoid heads, the class count otherwise.
std::size_t head_units(Task t, const ModelConfig& config);
// Class count used for evaluation (2 for the sigmoid heads).
std::size_t head_classes(Task t, const ModelConfig& config);
bool is_binary(Task t) noexcept;

// Shared encoder h(.) with one dense head per active task. The domain head
// sits behind a gradient reversal layer when grl_on_domain is set.
class ModelGraph {
 public:
  // Throws ValueError on head sizes that cannot be built (cutoff not dividing
  // steps, fewer than two segments or bands, empty encoder widths).
  static ModelGraph build(const ModelConfig& config);

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t input_dim() const noexcept { return config_.steps * config_.bands; }
  std::size_t feature_dim() const noexcept;

  const std::vector<DenseLayer>& encoder() const noexcept { return encoder_; }
  std::vector<DenseLayer>& encoder() noexcept { return encoder_; }
  bool has_head(Task t) const noexcept { return heads_.count(t) != 0; }
  const DenseLayer& head(Task t) const;
  DenseLayer& head(Task t);

  bool grl_on_domain() const noexcept { return config_.grl_on_domain; }
  void set_grl_on_domain(bool on) noexcept { config_.grl_on_domain = on; }

  // h(x) for a batch of flattened samples.
  Matrix encode(const Matrix& inputs) const;
  // Head probabilities for the batch. Throws ValueError if the task is inactive.
  Matrix forward_task(const Matrix& inputs, Task t) const;
  Matrix head_forward(const Matrix& features, Task t) const;

  // Mean cross-entropy of the task head (binary for rotation and domain).
  double task_loss(const TaskBatch& batch, Task t) const;
  // Unweighted sum of task_loss over the given batches.
  double total_loss(const std::map<Task, TaskBatch>& batches) const;

  // Tape recording for training.
  ValueId record_encoder(GradTape& tape, ValueId inputs) const;
  ValueId record_head(GradTape& tape, ValueId features, Task t) const;
  double record_task_loss(GradTape& tape, const TaskBatch& batch, Task t) const;

  // Weights and biases of every layer: encoder first, then heads in task order.
  std::vector<std::span<double>> parameters();
  std::vector<std::span<const double>> parameters() const;
  std::vector<std::size_t> parameter_sizes() const;
  // Names parallel to parameters(), e.g. "encoder.0.weights", "head.band.bias".
  std::vector<std::string> parameter_names() const;
  // Gradient tensors aligned with parameters(); layers absent from the tape get zeros.
  std::vector<std::vector<double>> gather_gradients(const Gradients& grads) const;

  friend bool operator==(const ModelGraph&, const ModelGraph&) = default;

 private:
  void require_head(Task t) const;

  ModelConfig config_;
  std::vector<DenseLayer> encoder_;
  std::map<Task, DenseLayer> heads_;
};

}  // namespace sscrop
