#pragma once

#include <cstddef>

#include "sscrop/data/dataset.hpp"

// Label-construction algorithms for the pretext tasks. All are pure
// functions of their inputs; input labels are ignored except by make_domain,
// which ignores them too and labels by origin instead.
namespace sscrop {

// 2N samples: the N originals (label 0) followed by their time-reversed
// copies (label 1), in input order.
TaskDataset make_rotation(const TaskDataset& data);

// Split each sample into steps / cutoff contiguous segments of `cutoff` rows.
// Segment j is repeated along the time axis to full length and labelled j.
// Output is sample-major: sample 0 segments 0..S-1, then sample 1, ...
// Throws ValueError when cutoff does not divide the step count.
TaskDataset make_time_segment(const TaskDataset& data, std::size_t cutoff);

// B shards per sample: shard b holds band b's series copied into every band
// column, labelled b. Sample-major like make_time_segment.
TaskDataset make_band(const TaskDataset& data);

// Source samples labelled 0 followed by target samples labelled 1.
TaskDataset make_domain(const TaskDataset& source, const TaskDataset& target);

// Source then target samples, every label kUnlabeled.
TaskDataset make_union_unlabeled(const TaskDataset& source, const TaskDataset& target);

// Single sample helpers, exposed for tests and the constructors above.
TimeSeriesSample reverse_time(const TimeSeriesSample& s);
TimeSeriesSample tile_segment(const TimeSeriesSample& s, std::size_t segment, std::size_t cutoff);
TimeSeriesSample spread_band(const TimeSeriesSample& s, std::size_t band);

}  // namespace sscrop
