#include "sscrop/data/constructors.hpp"

#include <string>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {

TaskDataset shaped_like(const TaskDataset& data, Task task, int num_classes, std::size_t n) {
  TaskDataset out;
  out.task = task;
  out.num_classes = num_classes;
  out.steps = data.steps;
  out.bands = data.bands;
  out.samples.resize(n);
  out.labels.resize(n);
  return out;
}

void require_same_shape(const TaskDataset& a, const TaskDataset& b) {
  if (a.steps != b.steps || a.bands != b.bands) {
    throw ShapeError("domain shapes differ: source " + shape_string(a.steps, a.bands) +
                     ", target " + shape_string(b.steps, b.bands));
  }
}

}  // namespace

TimeSeriesSample reverse_time(const TimeSeriesSample& s) {
  TimeSeriesSample out(s.steps(), s.bands());
  const std::size_t last = s.steps() - 1;
  for (std::size_t t = 0; t < s.steps(); ++t) {
    for (std::size_t b = 0; b < s.bands(); ++b) out(t, b) = s(last - t, b);
  }
  return out;
}

TimeSeriesSample tile_segment(const TimeSeriesSample& s, std::size_t segment, std::size_t cutoff) {
  TimeSeriesSample out(s.steps(), s.bands());
  const std::size_t base = segment * cutoff;
  for (std::size_t t = 0; t < s.steps(); ++t) {
    const std::size_t src = base + t % cutoff;
    for (std::size_t b = 0; b < s.bands(); ++b) out(t, b) = s(src, b);
  }
  return out;
}

TimeSeriesSample spread_band(const TimeSeriesSample& s, std::size_t band) {
  TimeSeriesSample out(s.steps(), s.bands());
  for (std::size_t t = 0; t < s.steps(); ++t) {
    const double v = s(t, band);
    for (std::size_t b = 0; b < s.bands(); ++b) out(t, b) = v;
  }
  return out;
}

TaskDataset make_rotation(const TaskDataset& data) {
  const std::size_t n = data.size();
  TaskDataset out = shaped_like(data, Task::Rotation, 2, 2 * n);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.samples[k] = data.samples[k];
    out.labels[k] = 0;
    out.samples[n + k] = reverse_time(data.samples[k]);
    out.labels[n + k] = 1;
  }
  return out;
}

TaskDataset make_time_segment(const TaskDataset& data, std::size_t cutoff) {
  if (cutoff == 0 || data.steps % cutoff != 0) {
    throw ValueError("time-segment cutoff " + std::to_string(cutoff) +
                     " does not divide the step count T=" + std::to_string(data.steps));
  }
  const std::size_t segments = data.steps / cutoff;
  const std::size_t n = data.size();
  TaskDataset out =
      shaped_like(data, Task::TimeSegment, static_cast<int>(segments), n * segments);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const auto k = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < segments; ++j) {
      out.samples[k * segments + j] = tile_segment(data.samples[k], j, cutoff);
      out.labels[k * segments + j] = static_cast<int>(j);
    }
  }
  return out;
}

TaskDataset make_band(const TaskDataset& data) {
  if (data.bands < 2) throw ValueError("band detection needs at least 2 bands");
  const std::size_t bands = data.bands;
  const std::size_t n = data.size();
  TaskDataset out = shaped_like(data, Task::Band, static_cast<int>(bands), n * bands);
  const auto sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    const auto k = static_cast<std::size_t>(i);
    for (std::size_t b = 0; b < bands; ++b) {
      out.samples[k * bands + b] = spread_band(data.samples[k], b);
      out.labels[k * bands + b] = static_cast<int>(b);
    }
  }
  return out;
}

TaskDataset make_domain(const TaskDataset& source, const TaskDataset& target) {
  require_same_shape(source, target);
  TaskDataset out = shaped_like(source, Task::Domain, 2, 0);
  out.samples.reserve(source.size() + target.size());
  out.labels.reserve(source.size() + target.size());
  for (const auto& s : source.samples) out.push_back(s, static_cast<int>(DomainTag::Source));
  for (const auto& s : target.samples) out.push_back(s, static_cast<int>(DomainTag::Target));
  return out;
}

TaskDataset make_union_unlabeled(const TaskDataset& source, const TaskDataset& target) {
  require_same_shape(source, target);
  TaskDataset out = shaped_like(source, Task::Crop, kCropClasses, 0);
  out.samples.reserve(source.size() + target.size());
  out.samples.insert(out.samples.end(), source.samples.begin(), source.samples.end());
  out.samples.insert(out.samples.end(), target.samples.begin(), target.samples.end());
  out.labels.assign(out.samples.size(), kUnlabeled);
  return out;
}

}  // namespace sscrop
