#include "sscrop/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {

std::string_view to_string(Task t) noexcept {
  switch (t) {
    case Task::Crop: return "crop";
    case Task::Rotation: return "rotation";
    case Task::TimeSegment: return "time_segment";
    case Task::Band: return "band";
    case Task::Domain: return "domain";
  }
  return "unknown";
}

Task task_from_string(std::string_view name) {
  for (Task t : kAllTasks) {
    if (to_string(t) == name) return t;
  }
  throw ValueError("unknown task '" + std::string(name) + "'");
}

std::string_view to_string(DomainTag d) noexcept {
  return d == DomainTag::Source ? "source" : "target";
}

DomainTag domain_from_string(std::string_view name) {
  if (name == "source") return DomainTag::Source;
  if (name == "target") return DomainTag::Target;
  throw ValueError("unknown domain '" + std::string(name) + "' (expected source or target)");
}

TimeSeriesSample::TimeSeriesSample(std::size_t steps, std::size_t bands, double fill)
    : TimeSeriesSample(steps, bands, std::vector<double>(steps * bands, fill)) {}

TimeSeriesSample::TimeSeriesSample(std::size_t steps, std::size_t bands,
                                   std::vector<double> values)
    : steps_(steps), bands_(bands), values_(std::move(values)) {
  if (steps_ < 2 || bands_ < 1) {
    throw ShapeError("sample needs at least 2 steps and 1 band, got " +
                     shape_string(steps_, bands_));
  }
  if (values_.size() != steps_ * bands_) {
    throw ShapeError("sample " + shape_string(steps_, bands_) + " given " +
                     std::to_string(values_.size()) + " values");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("sample contains a non-finite value");
  }
}

void TaskDataset::push_back(TimeSeriesSample s, int label) {
  if (s.steps() != steps || s.bands() != bands) {
    throw ShapeError("sample " + std::to_string(s.steps()) + "x" + std::to_string(s.bands()) +
                     " does not match dataset " + std::to_string(steps) + "x" +
                     std::to_string(bands));
  }
  samples.push_back(std::move(s));
  labels.push_back(label);
}

void TaskDataset::validate() const {
  if (samples.size() != labels.size()) {
    throw ShapeError(std::to_string(samples.size()) + " samples but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (num_classes < 1) throw ValueError("dataset needs at least one class");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (s.steps() != steps || s.bands() != bands) {
      throw ShapeError("sample " + std::to_string(i) + " is " +
                       shape_string(s.steps(), s.bands()) + ", dataset is " +
                       shape_string(steps, bands));
    }
    const int y = labels[i];
    if (y != kUnlabeled && (y < 0 || y >= num_classes)) {
      throw ValueError("label " + std::to_string(y) + " of sample " + std::to_string(i) +
                       " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

std::vector<std::size_t> TaskDataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y >= 0 && y < num_classes) ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

Matrix to_batch(const TaskDataset& data, std::span<const std::size_t> indices) {
  const std::size_t width = data.steps * data.bands;
  Matrix batch(indices.size(), width);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = data.samples.at(indices[r]).values();
    if (src.size() != width) throw ShapeError("sample shape does not match dataset shape");
    auto dst = batch.row(r);
    for (std::size_t c = 0; c < width; ++c) dst[c] = src[c];
  }
  return batch;
}

Matrix to_batch(const TaskDataset& data) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return to_batch(data, all);
}

TaskDataset subset(const TaskDataset& data, std::span<const std::size_t> indices) {
  TaskDataset out;
  out.task = data.task;
  out.num_classes = data.num_classes;
  out.steps = data.steps;
  out.bands = data.bands;
  out.samples.reserve(indices.size());
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(data.samples.at(i), data.labels.at(i));
  return out;
}

TaskDataset concat(const TaskDataset& a, const TaskDataset& b) {
  if (a.steps != b.steps || a.bands != b.bands) {
    throw ShapeError("cannot concatenate " + shape_string(a.steps, a.bands) + " with " +
                     shape_string(b.steps, b.bands) + " samples");
  }
  if (a.task != b.task) throw ValueError("cannot concatenate datasets of different tasks");
  TaskDataset out = a;
  out.num_classes = std::max(a.num_classes, b.num_classes);
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
  return out;
}

UnlabeledView::UnlabeledView(TaskDataset labeled)
    : samples_(std::move(labeled.samples)),
      hidden_labels_(std::move(labeled.labels)),
      steps_(labeled.steps),
      bands_(labeled.bands) {}

TaskDataset UnlabeledView::as_unlabeled() const {
  TaskDataset out;
  out.task = Task::Crop;
  out.num_classes = kCropClasses;
  out.steps = steps_;
  out.bands = bands_;
  out.samples = samples_;
  out.labels.assign(samples_.size(), kUnlabeled);
  return out;
}

}  // namespace sscrop
