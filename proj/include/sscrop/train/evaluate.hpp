#pragma once

#include <cstddef>
#include <vector>

#include "sscrop/data/dataset.hpp"
#include "sscrop/model/model.hpp"

namespace sscrop {

struct EvalResult {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  // confusion[true][predicted]
  std::vector<std::vector<std::size_t>> confusion;
};

// Argmax for softmax heads, p > 0.5 for the sigmoid heads.
std::vector<int> predict(const ModelGraph& model, const TaskDataset& data, Task task);

// Throws ValueError if the dataset is tagged with another task, is empty, or
// holds unlabeled samples.
EvalResult evaluate(const ModelGraph& model, const TaskDataset& data, Task task);

// Confusion matrix and accuracy from parallel label and prediction lists.
EvalResult score(std::span<const int> labels, std::span<const int> predictions,
                 std::size_t num_classes);

}  // namespace sscrop
