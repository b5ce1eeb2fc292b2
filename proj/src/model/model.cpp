#include "sscrop/model/model.hpp"

#include <random>

#include "sscrop/error.hpp"
#include "sscrop/numeric/losses.hpp"

namespace sscrop {

bool TaskActivation::active(Task t) const noexcept {
  switch (t) {
    case Task::Crop: return crop;
    case Task::Rotation: return rotation;
    case Task::TimeSegment: return time_segment;
    case Task::Band: return band;
    case Task::Domain: return domain;
  }
  return false;
}

void TaskActivation::set(Task t, bool on) noexcept {
  switch (t) {
    case Task::Crop: crop = on; break;
    case Task::Rotation: rotation = on; break;
    case Task::TimeSegment: time_segment = on; break;
    case Task::Band: band = on; break;
    case Task::Domain: domain = on; break;
  }
}

std::vector<Task> TaskActivation::tasks() const {
  std::vector<Task> out;
  for (Task t : kAllTasks) {
    if (active(t)) out.push_back(t);
  }
  return out;
}

std::size_t TaskActivation::ssl_count() const noexcept {
  return static_cast<std::size_t>(rotation) + static_cast<std::size_t>(time_segment) +
         static_cast<std::size_t>(band);
}

TaskActivation TaskActivation::parse(std::string_view variant) {
  TaskActivation act;
  auto fail = [&] {
    throw ValueError("unknown model variant '" + std::string(variant) +
                     "' (expected baseline[+R][+T][+B][+D])");
  };
  std::string_view rest = variant;
  if (rest.substr(0, 8) == "baseline" || rest.substr(0, 8) == "Baseline") rest.remove_prefix(8);
  for (char c : rest) {
    bool* flag = nullptr;
    switch (c) {
      case '+': case ' ': continue;
      case 'R': flag = &act.rotation; break;
      case 'T': flag = &act.time_segment; break;
      case 'B': flag = &act.band; break;
      case 'D': flag = &act.domain; break;
      default: fail();
    }
    if (*flag) fail();
    *flag = true;
  }
  return act;
}

std::string TaskActivation::name() const {
  std::string out = "baseline";
  if (rotation) out += "+R";
  if (time_segment) out += "+T";
  if (band) out += "+B";
  if (domain) out += "+D";
  return out;
}

bool is_binary(Task t) noexcept { return t == Task::Rotation || t == Task::Domain; }

std::size_t head_units(Task t, const ModelConfig& config) {
  switch (t) {
    case Task::Crop: return kCropClasses;
    case Task::Rotation: return 1;
    case Task::TimeSegment:
      if (config.cutoff == 0 || config.steps % config.cutoff != 0) {
        throw ValueError("time-segment cutoff " + std::to_string(config.cutoff) +
                         " does not divide T=" + std::to_string(config.steps));
      }
      return config.steps / config.cutoff;
    case Task::Band: return config.bands;
    case Task::Domain: return 1;
  }
  return 0;
}

std::size_t head_classes(Task t, const ModelConfig& config) {
  return is_binary(t) ? 2 : head_units(t, config);
}

ModelGraph ModelGraph::build(const ModelConfig& config) {
  if (config.steps < 2 || config.bands < 1) {
    throw ValueError("model needs T >= 2 and B >= 1, got " + shape_string(config.steps, config.bands));
  }
  if (config.encoder_units.empty()) throw ValueError("encoder needs at least one layer");
  if (config.tasks.tasks().empty()) {
    throw ValueError("model needs at least one active task");
  }
  ModelGraph g;
  g.config_ = config;
  std::mt19937_64 rng(config.seed);
  std::size_t in = config.steps * config.bands;
  for (std::size_t units : config.encoder_units) {
    if (units == 0) throw ValueError("encoder layer width must be positive");
    g.encoder_.push_back(DenseLayer::glorot(in, units, Activation::ReLU, rng));
    in = units;
  }
  for (Task t : config.tasks.tasks()) {
    const std::size_t units = head_units(t, config);
    if (!is_binary(t) && units < 2) {
      throw ValueError(std::string("head ") + std::string(to_string(t)) + " would have " +
                       std::to_string(units) + " classes; at least 2 required");
    }
    const Activation act = is_binary(t) ? Activation::Sigmoid : Activation::Softmax;
    g.heads_.emplace(t, DenseLayer::glorot(in, units, act, rng));
  }
  return g;
}

std::size_t ModelGraph::feature_dim() const noexcept { return encoder_.back().out_dim(); }

void ModelGraph::require_head(Task t) const {
  if (!has_head(t)) {
    throw ValueError(std::string("task ") + std::string(to_string(t)) + " is not active in this model");
  }
}

const DenseLayer& ModelGraph::head(Task t) const {
  require_head(t);
  return heads_.at(t);
}

DenseLayer& ModelGraph::head(Task t) {
  require_head(t);
  return heads_.at(t);
}

Matrix ModelGraph::encode(const Matrix& inputs) const {
  if (inputs.cols() != input_dim()) {
    throw ShapeError("model expects " + std::to_string(input_dim()) + " input columns, got " +
                     shape_string(inputs));
  }
  Matrix h = dense_forward(encoder_.front(), inputs);
  for (std::size_t i = 1; i < encoder_.size(); ++i) h = dense_forward(encoder_[i], h);
  return h;
}

Matrix ModelGraph::head_forward(const Matrix& features, Task t) const {
  // The GRL is the identity on the forward pass.
  return dense_forward(head(t), features);
}

Matrix ModelGraph::forward_task(const Matrix& inputs, Task t) const {
  require_head(t);
  return head_forward(encode(inputs), t);
}

double ModelGraph::task_loss(const TaskBatch& batch, Task t) const {
  const Matrix p = forward_task(batch.inputs, t);
  if (is_binary(t)) return binary_xent(p.values(), batch.labels);
  return categorical_xent(p, batch.labels);
}

double ModelGraph::total_loss(const std::map<Task, TaskBatch>& batches) const {
  if (batches.empty()) throw ValueError("total_loss needs at least one task batch");
  double total = 0.0;
  for (const auto& [task, batch] : batches) total += task_loss(batch, task);
  return total;
}

ValueId ModelGraph::record_encoder(GradTape& tape, ValueId inputs) const {
  ValueId h = inputs;
  for (const auto& layer : encoder_) h = tape.dense(layer, h);
  return h;
}

ValueId ModelGraph::record_head(GradTape& tape, ValueId features, Task t) const {
  const DenseLayer& layer = head(t);
  if (t == Task::Domain && config_.grl_on_domain) features = tape.grl(features);
  return tape.dense(layer, features);
}

double ModelGraph::record_task_loss(GradTape& tape, const TaskBatch& batch, Task t) const {
  require_head(t);
  const ValueId x = tape.input(batch.inputs);
  const ValueId p = record_head(tape, record_encoder(tape, x), t);
  return is_binary(t) ? tape.binary_xent(p, batch.labels) : tape.categorical_xent(p, batch.labels);
}

std::vector<std::span<double>> ModelGraph::parameters() {
  std::vector<std::span<double>> out;
  for (auto& l : encoder_) {
    out.push_back(l.weights.values());
    out.push_back(l.bias);
  }
  for (auto& [t, l] : heads_) {
    out.push_back(l.weights.values());
    out.push_back(l.bias);
  }
  return out;
}

std::vector<std::span<const double>> ModelGraph::parameters() const {
  std::vector<std::span<const double>> out;
  for (const auto& l : encoder_) {
    out.push_back(l.weights.values());
    out.push_back(l.bias);
  }
  for (const auto& [t, l] : heads_) {
    out.push_back(l.weights.values());
    out.push_back(l.bias);
  }
  return out;
}

std::vector<std::size_t> ModelGraph::parameter_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& p : parameters()) out.push_back(p.size());
  return out;
}

std::vector<std::string> ModelGraph::parameter_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < encoder_.size(); ++i) {
    out.push_back("encoder." + std::to_string(i) + ".weights");
    out.push_back("encoder." + std::to_string(i) + ".bias");
  }
  for (const auto& [t, l] : heads_) {
    out.push_back("head." + std::string(to_string(t)) + ".weights");
    out.push_back("head." + std::string(to_string(t)) + ".bias");
  }
  return out;
}

std::vector<std::vector<double>> ModelGraph::gather_gradients(const Gradients& grads) const {
  std::vector<std::vector<double>> out;
  auto add = [&](const DenseLayer& l) {
    if (const DenseGrad* g = grads.find(l)) {
      out.emplace_back(g->weights.values().begin(), g->weights.values().end());
      out.push_back(g->bias);
    } else {
      out.emplace_back(l.weights.size(), 0.0);
      out.emplace_back(l.bias.size(), 0.0);
    }
  };
  for (const auto& l : encoder_) add(l);
  for (const auto& [t, l] : heads_) add(l);
  return out;
}

}  // namespace sscrop
