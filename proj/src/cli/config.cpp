#include "sscrop/cli/config.hpp"

#include <fstream>
#include <set>
#include <type_traits>

#include "sscrop/error.hpp"

namespace sscrop::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads keys out of one JSON object and remembers which it consumed, so that
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be a JSON object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    out = convert<T>(*it, where_ + "." + key);
  }

  void path(const std::string& key, fs::path& out, const fs::path& base) {
    std::string s = out.string();
    get(key, s);
    out = resolve(s, base);
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, where_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown config key " + where_ + "." + key);
    }
  }

  static fs::path resolve(const std::string& s, const fs::path& base) {
    if (s.empty()) return {};
    fs::path p(s);
    if (p.is_relative()) p = base / p;
    return fs::absolute(p).lexically_normal();
  }

 private:
  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + " must be a string");
      return v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + " must be a number");
      return v.get<T>();
    } else if constexpr (std::is_unsigned_v<T>) {
      const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
      if (!ok) throw ConfigError(where + " must be a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
      return v.get<T>();
    } else {
      if (!v.is_array()) throw ConfigError(where + " must be an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_common(Section& s, CommonTraining& c) {
  s.get("variants", c.variants);
  s.get("repeats", c.repeats);
  s.get("lr", c.lr);
  s.get("batch_size", c.batch_size);
  s.get("cutoff", c.cutoff);
  s.get("encoder_units", c.encoder_units);
  s.get("history_every", c.history_every);
  s.get("parallel_repeats", c.parallel_repeats);
  s.get("save_checkpoints", c.save_checkpoints);
}

void write_common(json& j, const CommonTraining& c) {
  j["variants"] = c.variants;
  j["repeats"] = c.repeats;
  j["lr"] = c.lr;
  j["batch_size"] = c.batch_size;
  j["cutoff"] = c.cutoff;
  j["encoder_units"] = c.encoder_units;
  j["history_every"] = c.history_every;
  j["parallel_repeats"] = c.parallel_repeats;
  j["save_checkpoints"] = c.save_checkpoints;
}

void validate_common(const CommonTraining& c, const std::string& where, bool allow_domain) {
  if (c.variants.empty()) throw ConfigError(where + ".variants must not be empty");
  for (const auto& v : c.variants) {
    const TrainConfig tc = train_config_for(c, v, 0);
    tc.validate();
    if (!allow_domain && tc.tasks.domain) {
      throw ConfigError(where + " variant " + v + " uses domain detection, which needs the da protocol");
    }
  }
}

}  // namespace

TrainConfig train_config_for(const CommonTraining& common, const std::string& variant,
                             std::uint64_t seed) {
  TrainConfig c;
  c.lr = common.lr;
  c.batch_size = common.batch_size;
  c.seed = seed;
  c.tasks = TaskActivation::parse(variant);
  c.cutoff = common.cutoff;
  c.repeats = common.repeats;
  c.encoder_units = common.encoder_units;
  c.history_every = common.history_every;
  return c;
}

void RunConfig::validate() const {
  try {
    if (!(data.scale > 0.0)) throw ConfigError("data.scale must be positive");
    if (!(gen_data.raw_scale > 0.0)) throw ConfigError("gen_data.raw_scale must be positive");
    const auto& sc = gen_data.scenario;
    if (sc.source_per_class < 1 || sc.few_shot_per_class < 1 || sc.target_per_class < 1) {
      throw ConfigError("gen_data sample counts must be at least 1");
    }
    if (sc.generator.steps < 2) throw ConfigError("gen_data.steps must be at least 2");
    if (sc.generator.noise_std < 0 || sc.generator.time_jitter < 0 ||
        sc.generator.amplitude_jitter < 0 || sc.generator.offset_jitter < 0) {
      throw ConfigError("gen_data noise parameters must be non-negative");
    }
    sc.shift.validate(synth::default_templates().front().bands.size());

    validate_common(fewshot.common, "fewshot", false);
    if (fewshot.shots.empty()) throw ConfigError("fewshot.shots must not be empty");
    for (std::size_t k : fewshot.shots) {
      if (k < 1) throw ConfigError("fewshot.shots entries must be at least 1");
    }
    if (fewshot.main_epochs < 1) throw ConfigError("fewshot.main_epochs must be at least 1");

    validate_common(standard.common, "standard", false);
    if (standard.train_per_class < 1 || standard.val_per_class < 1) {
      throw ConfigError("standard split sizes must be at least 1");
    }
    standard.patience.validate(standard.common.lr);

    validate_common(da.common, "da", true);
    if (da.epochs < 1) throw ConfigError("da.epochs must be at least 1");
    if (da.heldout_per_class < 1) throw ConfigError("da.heldout_per_class must be at least 1");

    for (int c : inspect.classes) {
      if (c < 0 || c >= kCropClasses) throw ConfigError("inspect.classes entries must be in [0, 4)");
    }
    (void)task_from_string(eval.task);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  Section root(j, "config");
  root.get("seed", c.seed);

  {
    Section s = root.sub("data");
    s.path("source", c.data.source, base_dir);
    s.path("few_shot", c.data.few_shot, base_dir);
    s.path("target", c.data.target, base_dir);
    s.get("scale", c.data.scale);
    s.finish();
  }
  {
    Section s = root.sub("gen_data");
    auto& sc = c.gen_data.scenario;
    s.get("source_per_class", sc.source_per_class);
    s.get("few_shot_per_class", sc.few_shot_per_class);
    s.get("target_per_class", sc.target_per_class);
    s.get("steps", sc.generator.steps);
    s.get("noise_std", sc.generator.noise_std);
    s.get("time_jitter", sc.generator.time_jitter);
    s.get("amplitude_jitter", sc.generator.amplitude_jitter);
    s.get("offset_jitter", sc.generator.offset_jitter);
    s.get("raw_scale", c.gen_data.raw_scale);
    Section sh = s.sub("shift");
    sh.get("offset", sc.shift.offset);
    sh.get("gain", sc.shift.gain);
    sh.get("peak_shift", sc.shift.peak_shift);
    sh.get("noise_std", sc.shift.noise_std);
    sh.finish();
    s.finish();
  }
  {
    Section s = root.sub("fewshot");
    read_common(s, c.fewshot.common);
    s.get("shots", c.fewshot.shots);
    s.get("main_epochs", c.fewshot.main_epochs);
    s.get("ssl_epochs", c.fewshot.ssl_epochs);
    s.get("ssl_pool_per_class", c.fewshot.ssl_pool_per_class);
    s.finish();
  }
  {
    Section s = root.sub("standard");
    read_common(s, c.standard.common);
    s.get("train_per_class", c.standard.train_per_class);
    s.get("val_per_class", c.standard.val_per_class);
    Section p = s.sub("patience");
    p.get("patience", c.standard.patience.patience);
    p.get("lr_halving", c.standard.patience.lr_halving);
    p.get("min_lr", c.standard.patience.min_lr);
    p.get("max_epochs", c.standard.patience.max_epochs);
    p.finish();
    s.finish();
  }
  {
    Section s = root.sub("da");
    read_common(s, c.da.common);
    s.get("epochs", c.da.epochs);
    s.get("heldout_per_class", c.da.heldout_per_class);
    s.finish();
  }
  {
    Section s = root.sub("inspect");
    s.get("bands", c.inspect.bands);
    s.get("classes", c.inspect.classes);
    s.finish();
  }
  {
    Section s = root.sub("eval");
    s.path("checkpoint", c.eval.checkpoint, base_dir);
    s.path("data", c.eval.data, base_dir);
    s.path("target", c.eval.target, base_dir);
    s.get("task", c.eval.task);
    s.finish();
  }
  root.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_run_config(j, fs::absolute(path).parent_path());
}

RunConfig default_run_config(const fs::path& base_dir) {
  return parse_run_config(json::object(), base_dir);
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["data"] = {{"source", c.data.source.string()},
               {"few_shot", c.data.few_shot.string()},
               {"target", c.data.target.string()},
               {"scale", c.data.scale}};
  const auto& sc = c.gen_data.scenario;
  j["gen_data"] = {{"source_per_class", sc.source_per_class},
                   {"few_shot_per_class", sc.few_shot_per_class},
                   {"target_per_class", sc.target_per_class},
                   {"steps", sc.generator.steps},
                   {"noise_std", sc.generator.noise_std},
                   {"time_jitter", sc.generator.time_jitter},
                   {"amplitude_jitter", sc.generator.amplitude_jitter},
                   {"offset_jitter", sc.generator.offset_jitter},
                   {"raw_scale", c.gen_data.raw_scale},
                   {"shift",
                    {{"offset", sc.shift.offset},
                     {"gain", sc.shift.gain},
                     {"peak_shift", sc.shift.peak_shift},
                     {"noise_std", sc.shift.noise_std}}}};

  json few = json::object();
  write_common(few, c.fewshot.common);
  few["shots"] = c.fewshot.shots;
  few["main_epochs"] = c.fewshot.main_epochs;
  few["ssl_epochs"] = c.fewshot.ssl_epochs;
  few["ssl_pool_per_class"] = c.fewshot.ssl_pool_per_class;
  j["fewshot"] = few;

  json st = json::object();
  write_common(st, c.standard.common);
  st["train_per_class"] = c.standard.train_per_class;
  st["val_per_class"] = c.standard.val_per_class;
  st["patience"] = {{"patience", c.standard.patience.patience},
                    {"lr_halving", c.standard.patience.lr_halving},
                    {"min_lr", c.standard.patience.min_lr},
                    {"max_epochs", c.standard.patience.max_epochs}};
  j["standard"] = st;

  json da = json::object();
  write_common(da, c.da.common);
  da["epochs"] = c.da.epochs;
  da["heldout_per_class"] = c.da.heldout_per_class;
  j["da"] = da;

  j["inspect"] = {{"bands", c.inspect.bands}, {"classes", c.inspect.classes}};
  j["eval"] = {{"checkpoint", c.eval.checkpoint.string()},
               {"data", c.eval.data.string()},
               {"target", c.eval.target.string()},
               {"task", c.eval.task}};
  return j;
}

}  // namespace sscrop::cli
