// Copyright 2026 The coded-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON experiment configuration.
//
//   {
//     "k": 1000000,
//     "model": "per-task",              // or "per-row"
//     "trials": 10000,
//     "seed": 1,
//     "loads": "integer",               // or "real"
//     "groups": [ {"workers": 300, "mu": 16, "alpha": 1}, ... ],
//     "schemes": [
//       {"type": "optimal"},
//       {"type": "uniform", "n": 2000000},   // or "rate": 0.5, or "n": "optimal"
//       {"type": "uncoded"},                 // uniform with n = k
//       {"type": "fixed-r", "r": 100},
//       {"type": "reisizadeh"}
//     ],
//     "sweep": {"variable": "N_scale", "grid": [1, 10, 100], "groups": [0, 1]},
//     "output": "out.csv"
//   }
//
// "sweep" and "output" are optional; "sweep.groups" restricts the scaling to
// the listed group indices (all groups when absent).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coded_alloc/cluster.hpp"
#include "coded_alloc/errors.hpp"
#include "coded_alloc/latency_mc.hpp"

namespace coded_alloc {

enum class SchemeKind { Optimal, Uniform, Uncoded, FixedR, Reisizadeh };

struct SchemeSelector {
  SchemeKind kind = SchemeKind::Optimal;
  std::optional<std::int64_t> n;  // uniform: explicit code length
  std::optional<double> rate;     // uniform: code rate k/n
  bool n_star = false;            // uniform: reuse the optimal scheme's n*
  std::optional<std::int64_t> r;  // fixed-r

  friend bool operator==(const SchemeSelector&, const SchemeSelector&) = default;
};

enum class SweepVariable { NScale, MuScale, Rate };

struct Sweep {
  SweepVariable variable = SweepVariable::NScale;
  std::vector<double> grid;
  std::vector<std::size_t> groups;  // empty: every group

  friend bool operator==(const Sweep&, const Sweep&) = default;
};

struct ExperimentConfig {
  ClusterSpec cluster;
  RuntimeModel model = RuntimeModel::PerTask;
  std::vector<SchemeSelector> schemes;
  std::optional<Sweep> sweep;
  std::size_t trials = 10'000;
  std::uint64_t seed = 1;
  LoadKind loads = LoadKind::Integer;
  std::string output_path;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::NScale: return "N_scale";
    case SweepVariable::MuScale: return "mu_scale";
    case SweepVariable::Rate: return "rate";
  }
  return "N_scale";
}

/// Display label of a scheme selector, used as the CSV scheme column.
inline std::string scheme_label(const SchemeSelector& s) {
  switch (s.kind) {
    case SchemeKind::Optimal: return "optimal";
    case SchemeKind::Uncoded: return "uncoded";
    case SchemeKind::Reisizadeh: return "reisizadeh";
    case SchemeKind::FixedR: return "fixed-r(r=" + std::to_string(s.r.value_or(0)) + ")";
    case SchemeKind::Uniform: {
      if (s.n_star) return "uniform(n=n*)";
      if (s.n) return "uniform(n=" + std::to_string(*s.n) + ")";
      std::ostringstream os;
      os << "uniform(rate=" << s.rate.value_or(0.0) << ")";
      return os.str();
    }
  }
  return "unknown";
}

namespace detail {

using nlohmann::json;

template <class T>
T get_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": bad '" + key + "': " + e.what());
  }
}

inline SchemeSelector parse_scheme(const json& j, std::size_t index) {
  const std::string where = "schemes[" + std::to_string(index) + "]";
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const auto type = get_field<std::string>(j, "type", where);
  SchemeSelector s;
  if (type == "optimal") {
    s.kind = SchemeKind::Optimal;
  } else if (type == "uncoded") {
    s.kind = SchemeKind::Uncoded;
  } else if (type == "reisizadeh") {
    s.kind = SchemeKind::Reisizadeh;
  } else if (type == "fixed-r") {
    s.kind = SchemeKind::FixedR;
    s.r = get_field<std::int64_t>(j, "r", where);
    if (*s.r < 1) throw ConfigError(where + ": r must be >= 1");
  } else if (type == "uniform") {
    s.kind = SchemeKind::Uniform;
    if (j.contains("n")) {
      if (j.at("n").is_string()) {
        if (j.at("n").get<std::string>() != "optimal") {
          throw ConfigError(where + ": n must be an integer or \"optimal\"");
        }
        s.n_star = true;
      } else {
        s.n = get_field<std::int64_t>(j, "n", where);
      }
    } else if (j.contains("rate")) {
      s.rate = get_field<double>(j, "rate", where);
      if (!(*s.rate > 0.0 && *s.rate <= 1.0)) throw ConfigError(where + ": rate must be in (0, 1]");
    } else {
      throw ConfigError(where + ": uniform scheme needs 'n' or 'rate'");
    }
  } else {
    throw ConfigError(where + ": unknown scheme type '" + type + "'");
  }
  return s;
}

inline json scheme_to_json(const SchemeSelector& s) {
  switch (s.kind) {
    case SchemeKind::Optimal: return {{"type", "optimal"}};
    case SchemeKind::Uncoded: return {{"type", "uncoded"}};
    case SchemeKind::Reisizadeh: return {{"type", "reisizadeh"}};
    case SchemeKind::FixedR: return {{"type", "fixed-r"}, {"r", s.r.value_or(1)}};
    case SchemeKind::Uniform: {
      json j = {{"type", "uniform"}};
      if (s.n_star) {
        j["n"] = "optimal";
      } else if (s.n) {
        j["n"] = *s.n;
      } else {
        j["rate"] = s.rate.value_or(1.0);
      }
      return j;
    }
  }
  return {};
}

}  // namespace detail

/// Parses a configuration document. Throws ConfigError on schema problems;
/// cluster invariants are checked separately by validate_cluster.
inline ExperimentConfig parse_config(const std::string& text) {
  using detail::get_field;
  using nlohmann::json;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  ExperimentConfig cfg;
  cfg.cluster.k = get_field<std::int64_t>(root, "k", "config");
  if (root.contains("model")) {
    cfg.model = parse_runtime_model(get_field<std::string>(root, "model", "config"));
  }
  if (root.contains("trials")) {
    const auto trials = get_field<std::int64_t>(root, "trials", "config");
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    cfg.trials = static_cast<std::size_t>(trials);
  }
  if (root.contains("seed")) cfg.seed = get_field<std::uint64_t>(root, "seed", "config");
  if (root.contains("loads")) {
    const auto kind = get_field<std::string>(root, "loads", "config");
    if (kind == "integer") {
      cfg.loads = LoadKind::Integer;
    } else if (kind == "real") {
      cfg.loads = LoadKind::Real;
    } else {
      throw ConfigError("config: loads must be \"integer\" or \"real\"");
    }
  }
  if (root.contains("output")) cfg.output_path = get_field<std::string>(root, "output", "config");

  if (!root.contains("groups") || !root.at("groups").is_array()) {
    throw ConfigError("config: 'groups' must be an array");
  }
  std::size_t index = 0;
  for (const auto& g : root.at("groups")) {
    const std::string where = "groups[" + std::to_string(index++) + "]";
    if (!g.is_object()) throw ConfigError(where + ": expected an object");
    cfg.cluster.groups.push_back({get_field<std::int64_t>(g, "workers", where),
                                  get_field<double>(g, "mu", where),
                                  get_field<double>(g, "alpha", where)});
  }

  if (root.contains("schemes")) {
    if (!root.at("schemes").is_array()) throw ConfigError("config: 'schemes' must be an array");
    index = 0;
    for (const auto& s : root.at("schemes")) cfg.schemes.push_back(detail::parse_scheme(s, index++));
  } else {
    cfg.schemes.push_back({});
  }
  if (cfg.schemes.empty()) throw ConfigError("config: 'schemes' must not be empty");

  if (root.contains("sweep")) {
    const auto& sw = root.at("sweep");
    if (!sw.is_object()) throw ConfigError("config: 'sweep' must be an object");
    Sweep sweep;
    const auto var = get_field<std::string>(sw, "variable", "sweep");
    if (var == "N_scale") {
      sweep.variable = SweepVariable::NScale;
    } else if (var == "mu_scale" || var == "q") {
      sweep.variable = SweepVariable::MuScale;
    } else if (var == "rate") {
      sweep.variable = SweepVariable::Rate;
    } else {
      throw ConfigError("sweep: unknown variable '" + var + "'");
    }
    sweep.grid = get_field<std::vector<double>>(sw, "grid", "sweep");
    if (sweep.grid.empty()) throw ConfigError("sweep: grid must not be empty");
    for (double v : sweep.grid) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("sweep: grid values must be > 0");
      if (sweep.variable == SweepVariable::Rate && v > 1.0) {
        throw ConfigError("sweep: rates must lie in (0, 1]");
      }
    }
    if (sw.contains("groups")) {
      sweep.groups = get_field<std::vector<std::size_t>>(sw, "groups", "sweep");
      for (auto gi : sweep.groups) {
        if (gi >= cfg.cluster.groups.size()) throw ConfigError("sweep: group index out of range");
      }
    }
    cfg.sweep = std::move(sweep);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

/// Serializes a configuration; parse_config(dump_config(c)) == c.
inline std::string dump_config(const ExperimentConfig& cfg) {
  using nlohmann::json;
  json root;
  root["k"] = cfg.cluster.k;
  root["model"] = std::string(to_string(cfg.model));
  root["trials"] = cfg.trials;
  root["seed"] = cfg.seed;
  root["loads"] = cfg.loads == LoadKind::Integer ? "integer" : "real";
  json groups = json::array();
  for (const auto& g : cfg.cluster.groups) {
    groups.push_back({{"workers", g.workers}, {"mu", g.mu}, {"alpha", g.alpha}});
  }
  root["groups"] = std::move(groups);
  json schemes = json::array();
  for (const auto& s : cfg.schemes) schemes.push_back(detail::scheme_to_json(s));
  root["schemes"] = std::move(schemes);
  if (cfg.sweep) {
    json sw = {{"variable", std::string(to_string(cfg.sweep->variable))},
               {"grid", cfg.sweep->grid}};
    if (!cfg.sweep->groups.empty()) sw["groups"] = cfg.sweep->groups;
    root["sweep"] = std::move(sw);
  }
  if (!cfg.output_path.empty()) root["output"] = cfg.output_path;
  return root.dump(2);
}

/// Cluster at one sweep point. N_scale multiplies worker counts (rounded,
/// at least 1); mu_scale multiplies straggling rates; rate leaves the cluster
/// unchanged.
inline ClusterSpec apply_sweep(const ClusterSpec& base, const Sweep& sweep, double value) {
  ClusterSpec out = base;
  for (std::size_t j = 0; j < out.groups.size(); ++j) {
    const bool selected = sweep.groups.empty() ||
                          std::find(sweep.groups.begin(), sweep.groups.end(), j) !=
                              sweep.groups.end();
    if (!selected) continue;
    auto& g = out.groups[j];
    if (sweep.variable == SweepVariable::NScale) {
      g.workers = std::max<std::int64_t>(
          1, std::llround(static_cast<double>(g.workers) * value));
    } else if (sweep.variable == SweepVariable::MuScale) {
      g.mu *= value;
    }
  }
  return out;
}

}  // namespace coded_alloc
