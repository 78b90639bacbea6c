// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Tool configuration. An INI-style file with [llm], [toolchains], [pipeline]
// and [bench] sections; every key has a built-in default. Unknown sections or
// keys are hard errors so typos fail fast. The API key is taken from the
// PAST_LLM_API_KEY environment variable only — it never appears in files.

#ifndef PAST_CONFIG_HPP
#define PAST_CONFIG_HPP

#include <cstdlib>
#include <map>
#include <string>
#include <string_view>

#include "past/executor.hpp"
#include "past/pipeline.hpp"
#include "past/util.hpp"

namespace past {

inline constexpr const char* kApiKeyEnvVar = "PAST_LLM_API_KEY";

struct LlmConfig {
  std::string backend = "mock";   // "mock" | "http"
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string mock_script;        // path, required for the mock backend in the CLI
  int max_in_flight = 4;
  int min_interval_ms = 0;
  int attempts = 3;
  double temperature = 0.2;
  double top_p = 0.95;
  int max_output_tokens = 8192;
};

struct PipelineFileConfig {
  int direct_repair_rounds = 1;
  int localize_rounds = 1;
  int instrumentation_retries = 2;
  bool repair_compile_errors = false;
  int diff_summary_budget = 100;
  int run_timeout_ms = 10000;
  int compile_timeout_ms = 60000;
  size_t output_cap_bytes = kDefaultOutputCap;
  int jobs = 1;
};

struct BenchConfig {
  double dedup_threshold = 0.85;
};

struct Config {
  LlmConfig llm;
  ToolchainSet toolchains;
  PipelineFileConfig pipeline;
  BenchConfig bench;

  PipelineConfig pipeline_config() const {
    PipelineConfig pc;
    pc.direct_repair_rounds = pipeline.direct_repair_rounds;
    pc.localize_rounds = pipeline.localize_rounds;
    pc.instrumentation_retries = pipeline.instrumentation_retries;
    pc.repair_compile_errors = pipeline.repair_compile_errors;
    pc.diff_summary_budget = pipeline.diff_summary_budget;
    pc.llm_attempts = llm.attempts;
    pc.temperature = llm.temperature;
    pc.top_p = llm.top_p;
    pc.max_output_tokens = llm.max_output_tokens;
    return pc;
  }

  ExecutorOptions executor_options() const {
    ExecutorOptions eo;
    eo.toolchains = toolchains;
    eo.compile_timeout_ms = pipeline.compile_timeout_ms;
    eo.run_limits.timeout_ms = pipeline.run_timeout_ms;
    eo.run_limits.output_cap = pipeline.output_cap_bytes;
    return eo;
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(Errc::ConfigError, where + ": expected a boolean, got \"" + v + "\"");
}

inline int parse_int(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(Errc::ConfigError, where + ": expected an integer, got \"" + v + "\"");
  }
}

inline double parse_double(const std::string& v, const std::string& where) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw Error(Errc::ConfigError, where + ": expected a number, got \"" + v + "\"");
  }
}

}  // namespace detail

/// Parses INI-style config text. `origin` is used in error messages.
inline Config parse_config(std::string_view text, const std::string& origin) {
  Config cfg;
  std::string section;
  size_t lineno = 0;
  for (const auto& raw : util::split_lines(text)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    std::string line = raw;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    if (util::is_blank(line)) continue;
    std::string body(util::strip(line));
    if (body.front() == '[') {
      if (body.back() != ']')
        throw Error(Errc::ConfigError, where + ": unterminated section header");
      section = body.substr(1, body.size() - 2);
      if (section != "llm" && section != "toolchains" && section != "pipeline" &&
          section != "bench")
        throw Error(Errc::ConfigError, where + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigError, where + ": expected key = value");
    std::string key(util::strip(body.substr(0, eq)));
    std::string value(util::strip(body.substr(eq + 1)));
    if (section.empty())
      throw Error(Errc::ConfigError, where + ": key outside any section");

    if (section == "llm") {
      if (key == "backend") {
        if (value != "mock" && value != "http")
          throw Error(Errc::ConfigError, where + ": backend must be mock or http");
        cfg.llm.backend = value;
      } else if (key == "base_url") cfg.llm.base_url = value;
      else if (key == "model") cfg.llm.model = value;
      else if (key == "mock_script") cfg.llm.mock_script = value;
      else if (key == "max_in_flight") cfg.llm.max_in_flight = detail::parse_int(value, where);
      else if (key == "min_interval_ms") cfg.llm.min_interval_ms = detail::parse_int(value, where);
      else if (key == "attempts") cfg.llm.attempts = detail::parse_int(value, where);
      else if (key == "temperature") cfg.llm.temperature = detail::parse_double(value, where);
      else if (key == "top_p") cfg.llm.top_p = detail::parse_double(value, where);
      else if (key == "max_output_tokens") cfg.llm.max_output_tokens = detail::parse_int(value, where);
      else throw Error(Errc::ConfigError, where + ": unknown key \"" + key + "\" in [llm]");
    } else if (section == "toolchains") {
      if (key == "cpp_compile") cfg.toolchains.cpp.compile_template = value;
      else if (key == "cpp_run") cfg.toolchains.cpp.run_template = value;
      else if (key == "java_compile") cfg.toolchains.java.compile_template = value;
      else if (key == "java_run") cfg.toolchains.java.run_template = value;
      else if (key == "python_compile") cfg.toolchains.python.compile_template = value;
      else if (key == "python_run") cfg.toolchains.python.run_template = value;
      else throw Error(Errc::ConfigError, where + ": unknown key \"" + key + "\" in [toolchains]");
    } else if (section == "pipeline") {
      if (key == "direct_repair_rounds") cfg.pipeline.direct_repair_rounds = detail::parse_int(value, where);
      else if (key == "localize_rounds") cfg.pipeline.localize_rounds = detail::parse_int(value, where);
      else if (key == "instrumentation_retries") cfg.pipeline.instrumentation_retries = detail::parse_int(value, where);
      else if (key == "repair_compile_errors") cfg.pipeline.repair_compile_errors = detail::parse_bool(value, where);
      else if (key == "diff_summary_budget") cfg.pipeline.diff_summary_budget = detail::parse_int(value, where);
      else if (key == "run_timeout_ms") cfg.pipeline.run_timeout_ms = detail::parse_int(value, where);
      else if (key == "compile_timeout_ms") cfg.pipeline.compile_timeout_ms = detail::parse_int(value, where);
      else if (key == "output_cap_bytes") {
        int v = detail::parse_int(value, where);
        if (v <= 0) throw Error(Errc::ConfigError, where + ": output_cap_bytes must be positive");
        cfg.pipeline.output_cap_bytes = static_cast<size_t>(v);
      } else if (key == "jobs") cfg.pipeline.jobs = detail::parse_int(value, where);
      else throw Error(Errc::ConfigError, where + ": unknown key \"" + key + "\" in [pipeline]");
    } else {  // bench
      if (key == "dedup_threshold") cfg.bench.dedup_threshold = detail::parse_double(value, where);
      else throw Error(Errc::ConfigError, where + ": unknown key \"" + key + "\" in [bench]");
    }
  }
  return cfg;
}

inline Config load_config(const std::string& path) {
  return parse_config(util::read_file(path), path);
}

/// The API key, from the environment; empty when unset.
inline std::string api_key_from_env() {
  const char* v = std::getenv(kApiKeyEnvVar);
  return v ? std::string(v) : std::string();
}

}  // namespace past

#endif  // PAST_CONFIG_HPP
