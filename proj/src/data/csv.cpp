#include "sscrop/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T v{};
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

// "b3_t7" -> (3, 7).
std::optional<std::pair<std::size_t, std::size_t>> parse_value_column(std::string_view name) {
  if (name.size() < 4 || name[0] != 'b') return std::nullopt;
  const std::size_t sep = name.find("_t");
  if (sep == std::string_view::npos) return std::nullopt;
  auto band = parse_number<std::size_t>(name.substr(1, sep - 1));
  auto step = parse_number<std::size_t>(name.substr(sep + 2));
  if (!band || !step) return std::nullopt;
  return std::pair{*band, *step};
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  throw IoError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0)) throw ValueError("csv scale must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) fail(path, line_no, "missing header");
  const auto header = split(trim(line));

  std::optional<std::size_t> id_col, domain_col, label_col;
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> value_cols;
  std::size_t steps = 0;
  std::size_t bands = 0;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto name = trim(header[c]);
    if (name == "id") {
      id_col = c;
    } else if (name == "domain") {
      domain_col = c;
    } else if (name == "label") {
      label_col = c;
    } else if (auto bt = parse_value_column(name)) {
      value_cols.emplace_back(c, *bt);
      bands = std::max(bands, bt->first + 1);
      steps = std::max(steps, bt->second + 1);
    } else {
      fail(path, line_no, "unexpected column '" + std::string(name) + "'");
    }
  }
  if (!id_col || !domain_col || !label_col) {
    fail(path, line_no, "header must contain id, domain and label columns");
  }
  if (value_cols.empty()) fail(path, line_no, "no b{band}_t{step} value columns");

  // Every (band, step) cell must appear exactly once.
  std::vector<int> seen(steps * bands, 0);
  for (const auto& [col, bt] : value_cols) ++seen[bt.second * bands + bt.first];
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < bands; ++b) {
      const int n = seen[t * bands + b];
      if (n != 1) {
        fail(path, line_no,
             std::string(n == 0 ? "missing" : "duplicate") + " value column b" +
                 std::to_string(b) + "_t" + std::to_string(t));
      }
    }
  }

  CsvTable table;
  table.data.task = Task::Crop;
  table.data.num_classes = kCropClasses;
  table.data.steps = steps;
  table.data.bands = bands;

  while (std::getline(in, line)) {
    ++line_no;
    const auto row_text = trim(line);
    if (row_text.empty()) continue;
    const auto fields = split(row_text);
    if (fields.size() != header.size()) {
      fail(path, line_no,
           "expected " + std::to_string(header.size()) + " fields, found " +
               std::to_string(fields.size()));
    }
    DomainTag domain;
    try {
      domain = domain_from_string(trim(fields[*domain_col]));
    } catch (const ValueError& e) {
      fail(path, line_no, e.what());
    }
    const auto label = parse_number<int>(trim(fields[*label_col]));
    if (!label || (*label != kUnlabeled && (*label < 0 || *label >= kCropClasses))) {
      fail(path, line_no,
           "label '" + std::string(trim(fields[*label_col])) + "' not in {-1, 0, 1, 2, 3}");
    }
    std::vector<double> values(steps * bands);
    for (const auto& [col, bt] : value_cols) {
      const auto v = parse_number<double>(trim(fields[col]));
      if (!v || !std::isfinite(*v)) {
        fail(path, line_no, "bad value '" + std::string(trim(fields[col])) + "' in column " +
                                std::string(trim(header[col])));
      }
      values[bt.second * bands + bt.first] = *v * scale;
    }
    table.data.push_back(TimeSeriesSample(steps, bands, std::move(values)), *label);
    table.ids.emplace_back(trim(fields[*id_col]));
    table.domains.push_back(domain);
  }
  return table;
}

TaskDataset ingest_csv(const std::filesystem::path& path, double scale) {
  return read_csv(path, scale).data;
}

void write_csv(const std::filesystem::path& path, const TaskDataset& data, DomainTag domain,
               double raw_scale, const std::string& id_prefix) {
  if (!(raw_scale > 0.0)) throw ValueError("csv raw_scale must be positive");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());

  out << "id,domain,label";
  for (std::size_t b = 0; b < data.bands; ++b) {
    for (std::size_t t = 0; t < data.steps; ++t) out << ",b" << b << "_t" << t;
  }
  out << '\n';

  char buf[64];
  const std::string_view dom = to_string(domain);
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << id_prefix << i << ',' << dom << ',' << data.labels[i];
    const auto& s = data.samples[i];
    for (std::size_t b = 0; b < data.bands; ++b) {
      for (std::size_t t = 0; t < data.steps; ++t) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), s(t, b) / raw_scale);
        out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sscrop
