#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sscrop/numeric/matrix.hpp"

namespace sscrop {

enum class Task { Crop, Rotation, TimeSegment, Band, Domain };

inline constexpr std::array<Task, 5> kAllTasks = {Task::Crop, Task::Rotation, Task::TimeSegment,
                                                  Task::Band, Task::Domain};

std::string_view to_string(Task t) noexcept;
// Accepts the names produced by to_string.
Task task_from_string(std::string_view name);

enum class DomainTag : int { Source = 0, Target = 1 };

std::string_view to_string(DomainTag d) noexcept;
DomainTag domain_from_string(std::string_view name);

// Label carried by samples that have no class (the pooled unlabeled set).
inline constexpr int kUnlabeled = -1;
// Wheat, corn, rice, other.
inline constexpr int kCropClasses = 4;
inline constexpr std::size_t kDefaultSteps = 10;
inline constexpr std::size_t kDefaultBands = 7;

// One pixel's time series: `steps` rows (dates) by `bands` columns (spectral bands).
class TimeSeriesSample {
 public:
  // Empty placeholder; not a valid sample until assigned.
  TimeSeriesSample() = default;
  TimeSeriesSample(std::size_t steps, std::size_t bands, double fill = 0.0);
  TimeSeriesSample(std::size_t steps, std::size_t bands, std::vector<double> values);

  std::size_t steps() const noexcept { return steps_; }
  std::size_t bands() const noexcept { return bands_; }

  double& operator()(std::size_t t, std::size_t b) noexcept { return values_[t * bands_ + b]; }
  double operator()(std::size_t t, std::size_t b) const noexcept { return values_[t * bands_ + b]; }

  std::span<double> row(std::size_t t) noexcept { return {values_.data() + t * bands_, bands_}; }
  std::span<const double> row(std::size_t t) const noexcept {
    return {values_.data() + t * bands_, bands_};
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  friend bool operator==(const TimeSeriesSample&, const TimeSeriesSample&) = default;

 private:
  std::size_t steps_ = 0;
  std::size_t bands_ = 0;
  std::vector<double> values_;
};

// Samples with one integer label each, tagged with the task they train.
struct TaskDataset {
  std::vector<TimeSeriesSample> samples;
  std::vector<int> labels;
  Task task = Task::Crop;
  int num_classes = kCropClasses;
  std::size_t steps = kDefaultSteps;
  std::size_t bands = kDefaultBands;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }

  void push_back(TimeSeriesSample s, int label);

  // Shape agreement, label range (kUnlabeled allowed), finite values.
  void validate() const;

  // Count per class label; unlabeled samples are not counted.
  std::vector<std::size_t> class_counts() const;
};

// Flattened rows (t-major, T*B columns) for the selected samples.
Matrix to_batch(const TaskDataset& data, std::span<const std::size_t> indices);
Matrix to_batch(const TaskDataset& data);

TaskDataset subset(const TaskDataset& data, std::span<const std::size_t> indices);

// Concatenate datasets of the same task and shape.
TaskDataset concat(const TaskDataset& a, const TaskDataset& b);

// Samples whose class labels are withheld from the holder. Training code that
// must not see labels takes this type; the labels are kept only so the view can
// be built from an ordinary labeled dataset.
class UnlabeledView {
 public:
  explicit UnlabeledView(TaskDataset labeled);

  std::size_t size() const noexcept { return samples_.size(); }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t bands() const noexcept { return bands_; }
  const std::vector<TimeSeriesSample>& samples() const noexcept { return samples_; }

  // Same samples, every label set to kUnlabeled.
  TaskDataset as_unlabeled() const;

 private:
  friend struct UnlabeledViewProbe;

  std::vector<TimeSeriesSample> samples_;
  std::vector<int> hidden_labels_;
  std::size_t steps_;
  std::size_t bands_;
};

}  // namespace sscrop
