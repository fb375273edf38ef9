// SPDX-License-Identifier: Apache-2.0
//
// Serialization of traces and summaries. Traces go to CSV (streamable,
// plot-tool friendly), summaries to JSON (nested statistics); both carry an
// explicit schema version. Floating-point values are printed with 17
// significant digits so parsing an emitted file recovers every double
// bit-for-bit. JSON has no NaN, so unset statistics serialize as null.

#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "lasim/harness.hpp"
#include "lasim/metrics.hpp"

namespace lasim {

inline constexpr int trace_csv_schema_version = 1;
inline constexpr int summary_json_schema_version = 1;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 17 significant digits: enough to reproduce any double exactly on parse.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return format_double(v);
}

// Emits one fixed-schema document with deterministic key order and 2-space
// indentation. Commas are managed by tracking whether the current container
// already has an entry.
class JsonWriter {
 public:
  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& name) {
    comma_and_newline();
    out_ += quote(name);
    out_ += ": ";
    pending_value_ = true;
  }

  void value_number(double v) { raw(json_number(v)); }
  void value_int(std::uint64_t v) { raw(std::to_string(v)); }
  void value_bool(bool v) { raw(v ? "true" : "false"); }
  void value_string(const std::string& v) { raw(quote(v)); }
  void value_null() { raw("null"); }

  std::string take() {
    out_ += '\n';
    return std::move(out_);
  }

 private:
  static std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      switch (c) {
        case '"': q += "\\\""; break;
        case '\\': q += "\\\\"; break;
        case '\n': q += "\\n"; break;
        case '\t': q += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            q += buf;
          } else {
            q += c;
          }
      }
    }
    q += '"';
    return q;
  }

  void open(char bracket) {
    if (!pending_value_) comma_and_newline();
    pending_value_ = false;
    out_ += bracket;
    depth_ += 1;
    has_entry_.push_back(false);
  }

  void close(char bracket) {
    depth_ -= 1;
    bool had_entries = has_entry_.back();
    has_entry_.pop_back();
    if (had_entries) {
      out_ += '\n';
      out_.append(2 * depth_, ' ');
    }
    out_ += bracket;
    if (!has_entry_.empty()) has_entry_.back() = true;
  }

  void raw(const std::string& text) {
    if (!pending_value_) comma_and_newline();
    pending_value_ = false;
    out_ += text;
    if (!has_entry_.empty()) has_entry_.back() = true;
  }

  void comma_and_newline() {
    if (has_entry_.empty()) return;
    if (has_entry_.back()) out_ += ',';
    out_ += '\n';
    out_.append(2 * depth_, ' ');
  }

  std::string out_;
  std::vector<bool> has_entry_;
  std::size_t depth_ = 0;
  bool pending_value_ = false;
};

}  // namespace detail

// CSV schema, fixed: run_index,step,action,response,p_opt,expected_reward.
// response is 1 for reward, 0 for penalty; p_opt is the probability of the
// environment's optimal action after the step.
inline std::string trace_csv(const std::vector<RunTrace>& traces,
                             const EnvironmentSpec& env) {
  std::size_t opt = env.opt_index();
  std::string out = "run_index,step,action,response,p_opt,expected_reward\n";
  std::size_t rows = 0;
  for (const RunTrace& t : traces) rows += t.records.size();
  out.reserve(out.size() + rows * 64);
  for (const RunTrace& t : traces) {
    for (const StepRecord& rec : t.records) {
      out += std::to_string(t.run_index);
      out += ',';
      out += std::to_string(rec.step);
      out += ',';
      out += std::to_string(rec.action);
      out += ',';
      out += is_reward(rec.response) ? '1' : '0';
      out += ',';
      out += format_double(rec.p_after[opt]);
      out += ',';
      out += format_double(expected_reward(rec.p_after, env));
      out += '\n';
    }
  }
  return out;
}

inline std::string summary_json(const ExperimentSummary& s) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("schema_version");
  w.value_int(summary_json_schema_version);
  w.key("runs");
  w.value_int(s.num_runs);
  w.key("converged_fraction");
  w.value_number(s.converged_fraction);
  w.key("wrong_fraction");
  w.value_number(s.wrong_fraction);
  w.key("converged_steps");
  w.begin_object();
  w.key("count");
  w.value_int(s.step_stats.count);
  w.key("median");
  w.value_number(s.step_stats.median);
  w.key("mean");
  w.value_number(s.step_stats.mean);
  w.key("percentile_10");
  w.value_number(s.step_stats.percentile_10);
  w.key("percentile_90");
  w.value_number(s.step_stats.percentile_90);
  w.end_object();
  w.key("mean_final_reward");
  w.value_number(s.mean_final_reward);
  w.key("epsilon");
  w.value_number(s.epsilon);
  w.end_object();
  return w.take();
}

// Inverse of summary_json; null statistics come back as NaN. Re-serializing
// the parsed summary reproduces the original document byte-for-byte.
inline ExperimentSummary parse_summary_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.is_object()) {
    throw std::invalid_argument("parse_summary_json: not a JSON object");
  }
  if (doc.at("schema_version").get<int>() != summary_json_schema_version) {
    throw std::invalid_argument(
        "parse_summary_json: unsupported schema_version " +
        doc.at("schema_version").dump());
  }
  auto number_or_nan = [](const nlohmann::json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN()
                       : v.get<double>();
  };
  ExperimentSummary s;
  s.num_runs = doc.at("runs").get<std::size_t>();
  s.converged_fraction = number_or_nan(doc.at("converged_fraction"));
  s.wrong_fraction = number_or_nan(doc.at("wrong_fraction"));
  const nlohmann::json& stats = doc.at("converged_steps");
  s.step_stats.count = stats.at("count").get<std::uint64_t>();
  s.step_stats.median = number_or_nan(stats.at("median"));
  s.step_stats.mean = number_or_nan(stats.at("mean"));
  s.step_stats.percentile_10 = number_or_nan(stats.at("percentile_10"));
  s.step_stats.percentile_90 = number_or_nan(stats.at("percentile_90"));
  s.mean_final_reward = number_or_nan(doc.at("mean_final_reward"));
  s.epsilon = number_or_nan(doc.at("epsilon"));
  return s;
}

// One row per swept value, in sweep order.
inline std::string sweep_csv(
    const std::string& parameter,
    const std::vector<std::pair<double, ExperimentSummary>>& rows) {
  std::string out =
      "parameter,value,runs,converged_fraction,median_converged_step,"
      "wrong_fraction,mean_final_reward,epsilon\n";
  for (const auto& [value, s] : rows) {
    out += parameter;
    out += ',';
    out += format_double(value);
    out += ',';
    out += std::to_string(s.num_runs);
    out += ',';
    out += format_double(s.converged_fraction);
    out += ',';
    out += format_double(s.step_stats.median);
    out += ',';
    out += format_double(s.wrong_fraction);
    out += ',';
    out += format_double(s.mean_final_reward);
    out += ',';
    out += format_double(s.epsilon);
    out += '\n';
  }
  return out;
}

// One row per preset, already ranked by the caller.
inline std::string compare_csv(
    const std::vector<std::pair<std::string, ExperimentSummary>>& rows) {
  std::string out =
      "preset,runs,converged_fraction,median_converged_step,"
      "mean_converged_step,wrong_fraction,mean_final_reward,epsilon\n";
  for (const auto& [name, s] : rows) {
    out += name;
    out += ',';
    out += std::to_string(s.num_runs);
    out += ',';
    out += format_double(s.converged_fraction);
    out += ',';
    out += format_double(s.step_stats.median);
    out += ',';
    out += format_double(s.step_stats.mean);
    out += ',';
    out += format_double(s.wrong_fraction);
    out += ',';
    out += format_double(s.mean_final_reward);
    out += ',';
    out += format_double(s.epsilon);
    out += '\n';
  }
  return out;
}

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written file and a crashed writer leaves the old content
// intact.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out.write(content.data(),
              static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw IoError("rename '" + tmp.string() + "' to '" + path.string() +
                  "' failed: " + ec.message());
  }
}

}  // namespace lasim
