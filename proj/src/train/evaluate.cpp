#include "sscrop/train/evaluate.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {
constexpr std::size_t kEvalChunk = 4096;
}

std::vector<int> predict(const ModelGraph& model, const TaskDataset& data, Task task) {
  std::vector<int> out;
  out.reserve(data.size());
  std::vector<std::size_t> idx;
  for (std::size_t lo = 0; lo < data.size(); lo += kEvalChunk) {
    const std::size_t hi = std::min(data.size(), lo + kEvalChunk);
    idx.resize(hi - lo);
    std::iota(idx.begin(), idx.end(), lo);
    const Matrix p = model.forward_task(to_batch(data, idx), task);
    for (std::size_t r = 0; r < p.rows(); ++r) {
      if (is_binary(task)) {
        out.push_back(p(r, 0) > 0.5 ? 1 : 0);
      } else {
        const auto row = p.row(r);
        out.push_back(static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()));
      }
    }
  }
  return out;
}

EvalResult score(std::span<const int> labels, std::span<const int> predictions,
                 std::size_t num_classes) {
  if (labels.size() != predictions.size()) throw ShapeError("labels and predictions differ in length");
  if (labels.empty()) throw ValueError("cannot score an empty set");
  EvalResult res;
  res.total = labels.size();
  res.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw ValueError("label " + std::to_string(y) + " at index " + std::to_string(i) +
                       " outside [0, " + std::to_string(num_classes) + ")");
    }
    if (p < 0 || static_cast<std::size_t>(p) >= num_classes) {
      throw ValueError("prediction " + std::to_string(p) + " out of range");
    }
    ++res.confusion[static_cast<std::size_t>(y)][static_cast<std::size_t>(p)];
    if (y == p) ++res.correct;
  }
  res.accuracy = static_cast<double>(res.correct) / static_cast<double>(res.total);
  return res;
}

EvalResult evaluate(const ModelGraph& model, const TaskDataset& data, Task task) {
  if (data.task != task) {
    throw ValueError("cannot evaluate task " + std::string(to_string(task)) + " on a " +
                     std::string(to_string(data.task)) + " dataset");
  }
  if (data.empty()) throw ValueError("cannot evaluate on an empty dataset");
  return score(data.labels, predict(model, data, task), head_classes(task, model.config()));
}

}  // namespace sscrop
