// Copyright 2026 The vacaug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vacaug/config.hpp"

#include <algorithm>
#include <set>

#include "vacaug/errors.hpp"

namespace vacaug {

namespace {

void require_keys(const nlohmann::json& j, const std::string& section, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(section + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) throw ConfigError(section + ": unknown key '" + k + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(section + "." + key + ": wrong type");
  }
}

ModelSpec parse_model(const nlohmann::json& j, std::size_t index) {
  const std::string section = "models[" + std::to_string(index) + "]";
  require_keys(j, section, {"name", "kind", "hyperparams", "command", "timeout_s", "max_batch"});
  ModelSpec m;
  std::string kind = "ridge";
  read(j, "kind", kind, section);
  m.kind = model_kind_from_string(kind);
  m.name = kind;
  read(j, "name", m.name, section);
  if (j.contains("hyperparams")) {
    m.hyperparams = j.at("hyperparams");
    if (!m.hyperparams.is_object()) throw ConfigError(section + ".hyperparams: expected an object");
    std::set<std::string> known;
    switch (m.kind) {
      case ModelKind::kRidge: known = {"lambda", "grid_search"}; break;
      case ModelKind::kKnn: known = {"k", "grid_search"}; break;
      case ModelKind::kMlp:
        known = {"learning_rate", "epochs", "batch_size", "weight_decay", "grid_search"};
        break;
      case ModelKind::kExternal: break;
    }
    require_keys(m.hyperparams, section + ".hyperparams", known);
  }
  if (m.kind == ModelKind::kExternal) {
    read(j, "command", m.endpoint.command, section);
    if (m.endpoint.command.empty()) throw ConfigError(section + ": external model needs a command");
    double timeout_s = 30.0;
    read(j, "timeout_s", timeout_s, section);
    if (!(timeout_s > 0.0)) throw ConfigError(section + ".timeout_s must be positive");
    m.endpoint.timeout = std::chrono::milliseconds(static_cast<long>(timeout_s * 1000.0));
    read(j, "max_batch", m.endpoint.max_batch, section);
  } else if (j.contains("command")) {
    throw ConfigError(section + ": 'command' only applies to external models");
  }
  return m;
}

}  // namespace

std::filesystem::path RunConfig::dictionary_path() const {
  return dictionary.empty() ? out_dir / "dictionary.json" : dictionary;
}

std::filesystem::path RunConfig::augmented_path() const {
  return augmented_dir.empty() ? out_dir / "augmented" : augmented_dir;
}

std::vector<ModelSpec> default_models() {
  return {
      {"ridge", ModelKind::kRidge, {{"grid_search", true}}, {}},
      {"knn", ModelKind::kKnn, {{"grid_search", true}}, {}},
      {"mlp", ModelKind::kMlp, nlohmann::json::object(), {}},
  };
}

RunConfig parse_config(const nlohmann::json& j) {
  require_keys(j, "config", {"paths", "chamber", "decomposition", "augmentation", "models",
                             "thresholds", "split", "synth", "workers", "train_seed"});
  RunConfig c;
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    require_keys(p, "paths", {"gt_dir", "out_dir", "eval_dir", "dictionary", "augmented_dir"});
    auto path = [&](const char* key, std::filesystem::path& out) {
      std::string s = out.string();
      read(p, key, s, "paths");
      out = s;
    };
    path("gt_dir", c.gt_dir);
    path("out_dir", c.out_dir);
    path("eval_dir", c.eval_dir);
    path("dictionary", c.dictionary);
    path("augmented_dir", c.augmented_dir);
  }
  if (j.contains("chamber")) {
    const auto& ch = j.at("chamber");
    require_keys(ch, "chamber", {"volume_m3", "leak_flow", "surface_flow"});
    if (!ch.contains("volume_m3")) throw ConfigError("chamber.volume_m3 is required");
    read(ch, "volume_m3", c.chamber.volume_m3, "chamber");
    read(ch, "leak_flow", c.chamber.leak_flow, "chamber");
    read(ch, "surface_flow", c.chamber.surface_flow, "chamber");
    try {
      c.chamber.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
    c.chamber_given = true;
  }
  if (j.contains("decomposition")) {
    const auto& d = j.at("decomposition");
    require_keys(d, "decomposition", {"resolution", "epsilon"});
    read(d, "resolution", c.resolution, "decomposition");
    read(d, "epsilon", c.epsilon, "decomposition");
    if (c.resolution < 2) throw ConfigError("decomposition.resolution must be >= 2");
    if (!(c.epsilon > 0.0)) throw ConfigError("decomposition.epsilon must be positive");
  }
  if (j.contains("augmentation")) {
    const auto& a = j.at("augmentation");
    require_keys(a, "augmentation", {"m", "seed", "max_nnz"});
    read(a, "m", c.m, "augmentation");
    read(a, "seed", c.augment_seed, "augmentation");
    read(a, "max_nnz", c.max_nnz, "augmentation");
    if (c.m == 0) throw ConfigError("augmentation.m must be positive");
    if (c.max_nnz == 0) throw ConfigError("augmentation.max_nnz must be positive");
  }
  if (j.contains("models")) {
    const auto& ms = j.at("models");
    if (!ms.is_array()) throw ConfigError("models: expected an array");
    for (std::size_t i = 0; i < ms.size(); ++i) c.models.push_back(parse_model(ms[i], i));
    std::set<std::string> names;
    for (const auto& m : c.models) {
      if (!names.insert(m.name).second) throw ConfigError("models: duplicate name '" + m.name + "'");
    }
  }
  if (j.contains("thresholds")) c.thresholds = j.at("thresholds").get<Thresholds>();
  if (j.contains("split")) {
    const auto& s = j.at("split");
    require_keys(s, "split", {"ratio", "seed"});
    read(s, "ratio", c.split_ratio, "split");
    read(s, "seed", c.split_seed, "split");
    if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw ConfigError("split.ratio must be in (0, 1)");
  }
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    require_keys(s, "synth", {"n_events", "p0_mean", "p0_std", "t_mean", "t_std", "speed_archetypes",
                              "noise_rel", "sample_interval_s", "seed", "label"});
    read(s, "n_events", c.synth.n_events, "synth");
    read(s, "p0_mean", c.synth.p0_mean, "synth");
    read(s, "p0_std", c.synth.p0_std, "synth");
    read(s, "t_mean", c.synth.t_mean, "synth");
    read(s, "t_std", c.synth.t_std, "synth");
    read(s, "speed_archetypes", c.synth.speed_archetypes, "synth");
    read(s, "noise_rel", c.synth.noise_rel, "synth");
    read(s, "sample_interval_s", c.synth.sample_interval_s, "synth");
    read(s, "seed", c.synth.seed, "synth");
    read(s, "label", c.synth.label, "synth");
  }
  read(j, "workers", c.workers, "config");
  read(j, "train_seed", c.train_seed, "config");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  try {
    return parse_config(read_json(path));
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : c.models) {
    nlohmann::json e = {{"name", m.name}, {"kind", to_string(m.kind)}, {"hyperparams", m.hyperparams}};
    if (m.kind == ModelKind::kExternal) {
      e["command"] = m.endpoint.command;
      e["timeout_s"] = static_cast<double>(m.endpoint.timeout.count()) / 1000.0;
      e["max_batch"] = m.endpoint.max_batch;
    }
    models.push_back(std::move(e));
  }
  return {{"paths",
           {{"gt_dir", c.gt_dir.string()},
            {"out_dir", c.out_dir.string()},
            {"eval_dir", c.eval_dir.string()},
            {"dictionary", c.dictionary_path().string()},
            {"augmented_dir", c.augmented_path().string()}}},
          {"chamber", c.chamber},
          {"decomposition", {{"resolution", c.resolution}, {"epsilon", c.epsilon}}},
          {"augmentation", {{"m", c.m}, {"seed", c.augment_seed}, {"max_nnz", c.max_nnz}}},
          {"models", std::move(models)},
          {"thresholds", c.thresholds},
          {"split", {{"ratio", c.split_ratio}, {"seed", c.split_seed}}},
          {"train_seed", c.train_seed},
          {"workers", c.workers}};
}

}  // namespace vacaug
