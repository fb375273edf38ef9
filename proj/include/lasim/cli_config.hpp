// SPDX-License-Identifier: Apache-2.0
//
// Config-file schema for the CLI. A config document mirrors ExperimentConfig
// plus output settings, carries an explicit schema version, and is parsed
// strictly: unknown keys are rejected by their dotted path, and scheme keys
// that do not apply to the declared kind are rejected rather than silently
// ignored. The resolved config written next to the results uses the same
// schema, so a run can be reproduced by pointing --config at its own echo.

#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lasim/harness.hpp"
#include "lasim/io.hpp"
#include "lasim/presets.hpp"

namespace lasim {

inline constexpr int cli_config_schema_version = 1;

inline std::string to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::lri: return "lri";
    case SchemeKind::lrp: return "lrp";
    case SchemeKind::lrep: return "lrep";
    case SchemeKind::pursuit: return "pursuit";
    case SchemeKind::multi_fixed: return "multi_fixed";
    case SchemeKind::multi_adaptive: return "multi_adaptive";
  }
  throw std::logic_error("to_string: unhandled SchemeKind");
}

inline SchemeKind scheme_kind_from_string(const std::string& name) {
  if (name == "lri") return SchemeKind::lri;
  if (name == "lrp") return SchemeKind::lrp;
  if (name == "lrep") return SchemeKind::lrep;
  if (name == "pursuit") return SchemeKind::pursuit;
  if (name == "multi_fixed") return SchemeKind::multi_fixed;
  if (name == "multi_adaptive") return SchemeKind::multi_adaptive;
  throw std::invalid_argument(
      "config: unknown scheme kind '" + name +
      "' (valid: lri, lrp, lrep, pursuit, multi_fixed, multi_adaptive)");
}

inline std::string to_string(ConvergenceTarget target) {
  return target == ConvergenceTarget::optimal_only ? "optimal" : "any";
}

inline ConvergenceTarget target_from_string(const std::string& name) {
  if (name == "optimal") return ConvergenceTarget::optimal_only;
  if (name == "any") return ConvergenceTarget::any_action;
  throw std::invalid_argument("config: unknown criterion target '" + name +
                              "' (valid: optimal, any)");
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& prefix) {
  for (const auto& item : obj.items()) {
    bool known = std::any_of(allowed.begin(), allowed.end(),
                             [&](const char* k) { return item.key() == k; });
    if (!known) {
      throw std::invalid_argument("config: unknown key '" + prefix +
                                  item.key() + "'");
    }
  }
}

inline double get_number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) {
    throw std::invalid_argument("config: '" + path + "' must be a number");
  }
  return v.get<double>();
}

inline std::uint64_t get_uint(const nlohmann::json& v,
                              const std::string& path) {
  // Signed storage is fine as long as the value itself is non-negative;
  // nlohmann keeps in-memory integer literals signed even when parsed text
  // would be unsigned.
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw std::invalid_argument("config: '" + path +
                              "' must be a non-negative integer");
}

inline bool get_bool(const nlohmann::json& v, const std::string& path) {
  if (!v.is_boolean()) {
    throw std::invalid_argument("config: '" + path + "' must be a boolean");
  }
  return v.get<bool>();
}

inline std::string get_string(const nlohmann::json& v,
                              const std::string& path) {
  if (!v.is_string()) {
    throw std::invalid_argument("config: '" + path + "' must be a string");
  }
  return v.get<std::string>();
}

inline std::vector<double> get_number_array(const nlohmann::json& v,
                                            const std::string& path) {
  if (!v.is_array()) {
    throw std::invalid_argument("config: '" + path +
                                "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(
        get_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace detail

inline EnvironmentSpec environment_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: 'environment' must be an object");
  }
  detail::reject_unknown_keys(obj, {"rewards"}, "environment.");
  if (!obj.contains("rewards")) {
    throw std::invalid_argument(
        "config: 'environment.rewards' is required");
  }
  return EnvironmentSpec(
      detail::get_number_array(obj.at("rewards"), "environment.rewards"));
}

inline SchemeConfig scheme_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: 'scheme' must be an object");
  }
  if (!obj.contains("kind")) {
    throw std::invalid_argument("config: 'scheme.kind' is required");
  }
  SchemeConfig c;
  c.kind = scheme_kind_from_string(
      detail::get_string(obj.at("kind"), "scheme.kind"));

  auto applies = [&](std::initializer_list<const char*> keys) {
    detail::reject_unknown_keys(
        obj, {"kind", "a", "b", "lambda", "model_grid", "gains", "init_pulls"},
        "scheme.");
    for (const auto& item : obj.items()) {
      bool listed = std::any_of(keys.begin(), keys.end(), [&](const char* k) {
        return item.key() == k;
      });
      if (!listed) {
        throw std::invalid_argument("config: key 'scheme." + item.key() +
                                    "' does not apply to scheme kind '" +
                                    to_string(c.kind) + "'");
      }
    }
  };

  switch (c.kind) {
    case SchemeKind::lri:
      applies({"kind", "a"});
      if (!obj.contains("a")) {
        throw std::invalid_argument("config: 'scheme.a' is required for lri");
      }
      c.a = detail::get_number(obj.at("a"), "scheme.a");
      break;
    case SchemeKind::lrp:
    case SchemeKind::lrep:
      applies({"kind", "a", "b"});
      if (!obj.contains("a") || !obj.contains("b")) {
        throw std::invalid_argument("config: 'scheme.a' and 'scheme.b' are "
                                    "required for lrp/lrep");
      }
      c.a = detail::get_number(obj.at("a"), "scheme.a");
      c.b = detail::get_number(obj.at("b"), "scheme.b");
      break;
    case SchemeKind::pursuit:
      applies({"kind", "lambda", "init_pulls"});
      if (!obj.contains("lambda")) {
        throw std::invalid_argument(
            "config: 'scheme.lambda' is required for pursuit");
      }
      c.lambda = detail::get_number(obj.at("lambda"), "scheme.lambda");
      break;
    case SchemeKind::multi_fixed:
      applies({"kind", "lambda", "model_grid", "init_pulls"});
      if (!obj.contains("lambda") || !obj.contains("model_grid")) {
        throw std::invalid_argument(
            "config: 'scheme.lambda' and 'scheme.model_grid' are required "
            "for multi_fixed");
      }
      c.lambda = detail::get_number(obj.at("lambda"), "scheme.lambda");
      c.model_grid =
          detail::get_number_array(obj.at("model_grid"), "scheme.model_grid");
      break;
    case SchemeKind::multi_adaptive:
      applies({"kind", "lambda", "gains", "init_pulls"});
      if (!obj.contains("lambda") || !obj.contains("gains")) {
        throw std::invalid_argument(
            "config: 'scheme.lambda' and 'scheme.gains' are required for "
            "multi_adaptive");
      }
      c.lambda = detail::get_number(obj.at("lambda"), "scheme.lambda");
      c.gains = detail::get_number_array(obj.at("gains"), "scheme.gains");
      break;
  }
  if (obj.contains("init_pulls")) {
    c.init_pulls = static_cast<std::size_t>(
        detail::get_uint(obj.at("init_pulls"), "scheme.init_pulls"));
  }
  c.validate();
  return c;
}

inline ConvergenceCriterion criterion_from_json(const nlohmann::json& obj) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: 'criterion' must be an object");
  }
  detail::reject_unknown_keys(obj, {"threshold", "target"}, "criterion.");
  ConvergenceCriterion c;
  if (obj.contains("threshold")) {
    c.threshold =
        detail::get_number(obj.at("threshold"), "criterion.threshold");
  }
  if (obj.contains("target")) {
    c.target = target_from_string(
        detail::get_string(obj.at("target"), "criterion.target"));
  }
  c.validate();
  return c;
}

struct CliConfigFile {
  ExperimentConfig experiment;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> workers;
};

inline CliConfigFile config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw std::invalid_argument("config: root must be a JSON object");
  }
  detail::reject_unknown_keys(
      doc,
      {"version", "preset", "environment", "scheme", "steps", "runs",
       "master_seed", "criterion", "record_stride", "stop_on_convergence",
       "out_dir", "workers"},
      "");
  if (!doc.contains("version")) {
    throw std::invalid_argument("config: 'version' is required");
  }
  if (detail::get_uint(doc.at("version"), "version") !=
      static_cast<std::uint64_t>(cli_config_schema_version)) {
    throw std::invalid_argument(
        "config: unsupported version " + doc.at("version").dump() +
        " (supported: " + std::to_string(cli_config_schema_version) + ")");
  }

  std::optional<ExperimentConfig> experiment;
  if (doc.contains("preset")) {
    experiment =
        benchmark_preset(detail::get_string(doc.at("preset"), "preset"));
  }
  std::optional<EnvironmentSpec> env;
  if (doc.contains("environment")) {
    env = environment_from_json(doc.at("environment"));
  }
  std::optional<SchemeConfig> scheme;
  if (doc.contains("scheme")) {
    scheme = scheme_from_json(doc.at("scheme"));
  }
  if (experiment) {
    if (env) experiment->env = *env;
    if (scheme) experiment->scheme = *scheme;
  } else {
    if (!env) {
      throw std::invalid_argument(
          "config: 'environment' is required when no 'preset' is given");
    }
    if (!scheme) {
      throw std::invalid_argument(
          "config: 'scheme' is required when no 'preset' is given");
    }
    experiment.emplace(std::move(*env), std::move(*scheme));
  }

  if (doc.contains("steps")) {
    experiment->steps = detail::get_uint(doc.at("steps"), "steps");
  }
  if (doc.contains("runs")) {
    experiment->runs = detail::get_uint(doc.at("runs"), "runs");
  }
  if (doc.contains("master_seed")) {
    experiment->master_seed =
        detail::get_uint(doc.at("master_seed"), "master_seed");
  }
  if (doc.contains("criterion")) {
    experiment->criterion = criterion_from_json(doc.at("criterion"));
  }
  if (doc.contains("record_stride")) {
    experiment->record_stride =
        detail::get_uint(doc.at("record_stride"), "record_stride");
  }
  if (doc.contains("stop_on_convergence")) {
    experiment->stop_on_convergence =
        detail::get_bool(doc.at("stop_on_convergence"), "stop_on_convergence");
  }
  experiment->validate();

  CliConfigFile file{std::move(*experiment), std::nullopt, std::nullopt};
  if (doc.contains("out_dir")) {
    file.out_dir = detail::get_string(doc.at("out_dir"), "out_dir");
  }
  if (doc.contains("workers")) {
    file.workers = detail::get_uint(doc.at("workers"), "workers");
  }
  return file;
}

inline CliConfigFile load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: '" + path.string() +
                                "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

// Applies one named parameter override. Shared by the CLI override flags and
// cmd_sweep, so both reject parameters that do not apply to the scheme kind
// with the same message.
inline void apply_parameter(ExperimentConfig& config, const std::string& name,
                            double value) {
  SchemeKind kind = config.scheme.kind;
  if (name == "a") {
    if (is_estimator_kind(kind)) {
      throw std::invalid_argument("parameter 'a' does not apply to scheme "
                                  "kind '" + to_string(kind) + "'");
    }
    config.scheme.a = value;
    config.scheme.validate();
  } else if (name == "b") {
    if (kind != SchemeKind::lrp && kind != SchemeKind::lrep) {
      throw std::invalid_argument("parameter 'b' does not apply to scheme "
                                  "kind '" + to_string(kind) + "'");
    }
    config.scheme.b = value;
    config.scheme.validate();
  } else if (name == "lambda") {
    if (!is_estimator_kind(kind)) {
      throw std::invalid_argument("parameter 'lambda' does not apply to "
                                  "scheme kind '" + to_string(kind) + "'");
    }
    config.scheme.lambda = value;
    config.scheme.validate();
  } else if (name == "threshold") {
    config.criterion.threshold = value;
    config.criterion.validate();
  } else {
    throw std::invalid_argument("unknown parameter '" + name +
                                "' (valid: a, b, lambda, threshold)");
  }
}

namespace detail {

inline void append_number_array(JsonWriter& w, const std::vector<double>& xs) {
  w.begin_array();
  for (double x : xs) w.value_number(x);
  w.end_array();
}

inline void append_experiment_json(JsonWriter& w,
                                   const ExperimentConfig& c) {
  w.key("environment");
  w.begin_object();
  w.key("rewards");
  append_number_array(w, c.env.rewards());
  w.end_object();

  w.key("scheme");
  w.begin_object();
  w.key("kind");
  w.value_string(to_string(c.scheme.kind));
  switch (c.scheme.kind) {
    case SchemeKind::lri:
      w.key("a");
      w.value_number(c.scheme.a);
      break;
    case SchemeKind::lrp:
    case SchemeKind::lrep:
      w.key("a");
      w.value_number(c.scheme.a);
      w.key("b");
      w.value_number(c.scheme.b);
      break;
    case SchemeKind::pursuit:
      w.key("lambda");
      w.value_number(c.scheme.lambda);
      w.key("init_pulls");
      w.value_int(c.scheme.init_pulls);
      break;
    case SchemeKind::multi_fixed:
      w.key("lambda");
      w.value_number(c.scheme.lambda);
      w.key("model_grid");
      append_number_array(w, c.scheme.model_grid);
      w.key("init_pulls");
      w.value_int(c.scheme.init_pulls);
      break;
    case SchemeKind::multi_adaptive:
      w.key("lambda");
      w.value_number(c.scheme.lambda);
      w.key("gains");
      append_number_array(w, c.scheme.gains);
      w.key("init_pulls");
      w.value_int(c.scheme.init_pulls);
      break;
  }
  w.end_object();

  w.key("steps");
  w.value_int(c.steps);
  w.key("runs");
  w.value_int(c.runs);
  w.key("master_seed");
  w.value_int(c.master_seed);
  w.key("criterion");
  w.begin_object();
  w.key("threshold");
  w.value_number(c.criterion.threshold);
  w.key("target");
  w.value_string(to_string(c.criterion.target));
  w.end_object();
  w.key("record_stride");
  w.value_int(c.record_stride);
  w.key("stop_on_convergence");
  w.value_bool(c.stop_on_convergence);
}

}  // namespace detail

// Echo of the effective run configuration. Uses the config-file schema, so
// the emitted document can be fed back through --config to reproduce the run.
inline std::string resolved_config_json(const ExperimentConfig& c,
                                        const std::string& out_dir,
                                        std::uint64_t workers) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("version");
  w.value_int(cli_config_schema_version);
  detail::append_experiment_json(w, c);
  w.key("out_dir");
  w.value_string(out_dir);
  w.key("workers");
  w.value_int(workers);
  w.end_object();
  return w.take();
}

// Provenance echo for a sweep: the base configuration plus the sweep block.
inline std::string sweep_resolved_json(const ExperimentConfig& base,
                                       const std::string& out_dir,
                                       std::uint64_t workers,
                                       const std::string& parameter,
                                       const std::vector<double>& values) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("version");
  w.value_int(cli_config_schema_version);
  w.key("sweep");
  w.begin_object();
  w.key("parameter");
  w.value_string(parameter);
  w.key("values");
  detail::append_number_array(w, values);
  w.end_object();
  detail::append_experiment_json(w, base);
  w.key("out_dir");
  w.value_string(out_dir);
  w.key("workers");
  w.value_int(workers);
  w.end_object();
  return w.take();
}

// Provenance echo for a comparison: every preset's effective configuration.
inline std::string compare_resolved_json(
    const std::vector<std::pair<std::string, ExperimentConfig>>& experiments,
    const std::string& out_dir, std::uint64_t workers) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("version");
  w.value_int(cli_config_schema_version);
  w.key("compare");
  w.begin_array();
  for (const auto& [name, config] : experiments) {
    w.begin_object();
    w.key("preset");
    w.value_string(name);
    detail::append_experiment_json(w, config);
    w.end_object();
  }
  w.end_array();
  w.key("out_dir");
  w.value_string(out_dir);
  w.key("workers");
  w.value_int(workers);
  w.end_object();
  return w.take();
}

}  // namespace lasim
