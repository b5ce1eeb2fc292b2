#include "sscrop/train/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double RunReport::accuracy() const {
  auto it = final_accuracy.find("crop");
  if (it == final_accuracy.end()) throw ValueError("run report has no crop accuracy");
  return it->second;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

nlohmann::json to_json(const RunReport& r, bool include_wall_time) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : r.history) {
    history.push_back(
        {{"epoch", h.epoch}, {"task", h.task}, {"loss", number_or_null(h.loss)},
         {"accuracy", number_or_null(h.accuracy)}});
  }
  nlohmann::json j = {{"protocol", r.protocol},
                      {"variant", r.variant},
                      {"seed", r.seed},
                      {"final_accuracy", r.final_accuracy},
                      {"confusion", r.confusion},
                      {"epochs_run", r.epochs_run},
                      {"history", history}};
  if (r.protocol == "standard") {
    j["best_epoch"] = r.best_epoch;
    j["best_val_accuracy"] = r.best_val_accuracy;
    j["val_accuracy"] = r.val_accuracy;
    j["lr_history"] = r.lr_history;
  }
  if (r.protocol == "fewshot") j["ssl_schedule"] = r.ssl_schedule;
  if (include_wall_time) j["wall_seconds"] = r.wall_seconds;
  return j;
}

nlohmann::json to_json(const ExperimentReport& r, bool include_wall_time) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs) runs.push_back(to_json(run, include_wall_time));
  return {{"protocol", r.protocol}, {"variant", r.variant}, {"config", r.config},
          {"accuracies", r.accuracies}, {"mean", r.mean}, {"std", r.std}, {"runs", runs}};
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, const ExperimentReport*>>& reports) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "variant,shots,repeat,epoch,task,loss,accuracy\n";
  for (const auto& [shots, report] : reports) {
    for (std::size_t rep = 0; rep < report->runs.size(); ++rep) {
      for (const auto& h : report->runs[rep].history) {
        out << report->variant << ',' << shots << ',' << rep << ',' << h.epoch << ',' << h.task
            << ',' << format_double(h.loss) << ',' << format_double(h.accuracy) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace sscrop
