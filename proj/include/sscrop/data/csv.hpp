#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sscrop/data/dataset.hpp"

// Sample table format, one pixel per row:
//
//   id,domain,label,b0_t0,b0_t1,...,b0_t9,b1_t0,...,b6_t9
//
// `domain` is source or target, `label` is a crop class in [0, 4) or -1 for
// unlabeled. T and B are inferred from the b{band}_t{step} columns, which may
// appear in any order but must cover the full grid exactly once.
namespace sscrop {

// Scale applied to raw digital numbers on ingestion.
inline constexpr double kReflectanceScale = 1e-4;

struct CsvTable {
  TaskDataset data;
  std::vector<std::string> ids;
  std::vector<DomainTag> domains;
};

// Throws IoError naming the line number on any malformed content.
CsvTable read_csv(const std::filesystem::path& path, double scale = kReflectanceScale);

TaskDataset ingest_csv(const std::filesystem::path& path, double scale = kReflectanceScale);

// Writes value / raw_scale for every entry, shortest round-trip formatting.
// Ids are `<id_prefix><index>`.
void write_csv(const std::filesystem::path& path, const TaskDataset& data, DomainTag domain,
               double raw_scale, const std::string& id_prefix);

}  // namespace sscrop
