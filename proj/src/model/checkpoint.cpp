#include "sscrop/model/checkpoint.hpp"

#include <fstream>
#include <set>

#include "sscrop/error.hpp"

namespace sscrop {
namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"steps", c.steps},
          {"bands", c.bands},
          {"cutoff", c.cutoff},
          {"encoder_units", c.encoder_units},
          {"variant", c.tasks.name()},
          {"grl_on_domain", c.grl_on_domain},
          {"seed", c.seed}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  reject_unknown(j, {"steps", "bands", "cutoff", "encoder_units", "variant", "grl_on_domain", "seed"},
                 "model config");
  ModelConfig c;
  try {
    c.steps = j.value("steps", c.steps);
    c.bands = j.value("bands", c.bands);
    c.cutoff = j.value("cutoff", c.cutoff);
    c.encoder_units = j.value("encoder_units", c.encoder_units);
    if (j.contains("variant")) c.tasks = TaskActivation::parse(j.at("variant").get<std::string>());
    c.grl_on_domain = j.value("grl_on_domain", c.grl_on_domain);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  return c;
}

nlohmann::json checkpoint_to_json(const ModelGraph& model) {
  nlohmann::json tensors = nlohmann::json::array();
  const auto names = model.parameter_names();
  const auto params = model.parameters();
  // Shapes: weights are in x out, biases 1 x out.
  std::vector<std::pair<std::size_t, std::size_t>> shapes;
  for (const auto& l : model.encoder()) {
    shapes.emplace_back(l.in_dim(), l.out_dim());
    shapes.emplace_back(1, l.out_dim());
  }
  for (Task t : model.config().tasks.tasks()) {
    const auto& l = model.head(t);
    shapes.emplace_back(l.in_dim(), l.out_dim());
    shapes.emplace_back(1, l.out_dim());
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    tensors.push_back({{"name", names[i]},
                       {"rows", shapes[i].first},
                       {"cols", shapes[i].second},
                       {"values", std::vector<double>(params[i].begin(), params[i].end())}});
  }
  return {{"format", "sscrop-checkpoint"},
          {"version", kCheckpointVersion},
          {"config", model_config_to_json(model.config())},
          {"tensors", tensors}};
}

ModelGraph checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "sscrop-checkpoint") throw IoError("not an sscrop checkpoint");
    if (j.value("version", 0) != kCheckpointVersion) {
      throw IoError("unsupported checkpoint version " + j.value("version", nlohmann::json()).dump());
    }
    ModelGraph model = ModelGraph::build(model_config_from_json(j.at("config")));
    const auto names = model.parameter_names();
    auto params = model.parameters();
    const auto& tensors = j.at("tensors");
    if (tensors.size() != params.size()) {
      throw IoError("checkpoint has " + std::to_string(tensors.size()) + " tensors, model expects " +
                    std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& t = tensors[i];
      if (t.at("name").get<std::string>() != names[i]) {
        throw IoError("checkpoint tensor " + std::to_string(i) + " is '" +
                      t.at("name").get<std::string>() + "', expected '" + names[i] + "'");
      }
      const auto values = t.at("values").get<std::vector<double>>();
      const auto rows = t.at("rows").get<std::size_t>();
      const auto cols = t.at("cols").get<std::size_t>();
      if (values.size() != params[i].size() || rows * cols != values.size()) {
        throw IoError("checkpoint tensor '" + names[i] + "' has shape " + shape_string(rows, cols) +
                      " with " + std::to_string(values.size()) + " values");
      }
      std::copy(values.begin(), values.end(), params[i].begin());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint config: ") + e.what());
  } catch (const ValueError& e) {
    throw IoError(std::string("checkpoint config: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << checkpoint_to_json(model).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

ModelGraph load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace sscrop
