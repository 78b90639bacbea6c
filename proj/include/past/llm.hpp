// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// LLM backends. The pipeline talks to a Backend interface; production traffic
// goes through an OpenAI-compatible chat-completions endpoint, tests use a
// deterministic scripted mock.

#ifndef PAST_LLM_HPP
#define PAST_LLM_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "past/core.hpp"
#include "past/util.hpp"

namespace past {

struct LlmMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct LlmRequest {
  std::vector<LlmMessage> messages;
  double temperature = 0.2;
  double top_p = 0.95;
  int max_output_tokens = 8192;
};

struct LlmResponse {
  std::string text;
  int64_t prompt_tokens = -1;      // -1 when the server reports no usage
  int64_t completion_tokens = -1;
};

class Backend {
 public:
  virtual ~Backend() = default;
  /// Single completion attempt. Throws past::Error on failure.
  virtual LlmResponse complete(const LlmRequest& request) = 0;
  virtual std::string name() const = 0;
};

// ---------------------------------------------------------------------------
// Retry wrapper
// ---------------------------------------------------------------------------

inline bool retryable(Errc code) {
  return code == Errc::Transport || code == Errc::RateLimited ||
         code == Errc::EmptyResponse;
}

/// Runs `backend.complete` with exponential backoff: up to `attempts` tries,
/// sleeping 500ms, 1s, 2s, ... between them. Auth failures and other
/// non-retryable errors propagate immediately. `sleeper` is injectable so
/// tests do not wait.
inline LlmResponse complete_with_retry(
    Backend& backend, const LlmRequest& request, int attempts = 3,
    const std::function<void(std::chrono::milliseconds)>& sleeper =
        [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }) {
  if (attempts < 1)
    throw Error(Errc::UsageError, "retry attempts must be at least 1");
  std::chrono::milliseconds delay{500};
  for (int i = 1;; ++i) {
    try {
      return backend.complete(request);
    } catch (const Error& e) {
      if (!retryable(e.code()) || i >= attempts) throw;
    }
    sleeper(delay);
    delay *= 2;
  }
}

// ---------------------------------------------------------------------------
// Scripted mock backend
// ---------------------------------------------------------------------------

struct MockRule {
  std::optional<std::string> match;  // substring the prompt must contain
  std::string response;
};

/// Serves canned responses in order. Each complete() call consumes the first
/// unconsumed rule that either has no match pattern or whose pattern occurs
/// in the concatenated prompt text. Running out of applicable rules is an
/// EmptyResponse error, which keeps accidental over-consumption loud.
class MockBackend : public Backend {
 public:
  MockBackend() = default;
  explicit MockBackend(std::vector<MockRule> rules) : rules_(std::move(rules)) {}

  void push(MockRule rule) { rules_.push_back(std::move(rule)); }
  void push_response(std::string text) { rules_.push_back({std::nullopt, std::move(text)}); }

  LlmResponse complete(const LlmRequest& request) override {
    std::lock_guard<std::mutex> lock(mu_);
    history_.push_back(request);
    std::string prompt;
    for (const auto& m : request.messages) {
      prompt += m.content;
      prompt.push_back('\n');
    }
    for (size_t i = 0; i < rules_.size(); ++i) {
      if (consumed_.size() > i && consumed_[i]) continue;
      if (rules_[i].match && prompt.find(*rules_[i].match) == std::string::npos)
        continue;
      if (consumed_.size() <= i) consumed_.resize(rules_.size(), false);
      consumed_[i] = true;
      return {rules_[i].response, -1, -1};
    }
    throw Error(Errc::EmptyResponse, "mock script has no applicable response");
  }

  std::string name() const override { return "mock"; }

  /// Requests seen so far, for test inspection.
  const std::vector<LlmRequest>& history() const { return history_; }
  size_t remaining() const {
    size_t used = 0;
    for (bool b : consumed_)
      if (b) ++used;
    return rules_.size() - used;
  }

 private:
  std::vector<MockRule> rules_;
  std::vector<bool> consumed_;
  std::vector<LlmRequest> history_;
  mutable std::mutex mu_;
};

/// Loads a mock script: a JSON array of objects with an optional "match"
/// substring and either an inline "response" or a "response_file" path
/// resolved against the script's directory.
inline std::vector<MockRule> load_mock_script(const std::filesystem::path& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(util::read_file(path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError,
                "mock script " + path.string() + ": " + e.what());
  }
  if (!doc.is_array())
    throw Error(Errc::ConfigError,
                "mock script " + path.string() + ": expected a JSON array");
  std::vector<MockRule> rules;
  for (const auto& item : doc) {
    if (!item.is_object())
      throw Error(Errc::ConfigError, "mock script entries must be objects");
    MockRule rule;
    if (item.contains("match")) rule.match = item.at("match").get<std::string>();
    const bool has_inline = item.contains("response");
    const bool has_file = item.contains("response_file");
    if (has_inline == has_file)
      throw Error(Errc::ConfigError,
                  "mock script entries need exactly one of response/response_file");
    if (has_inline) {
      rule.response = item.at("response").get<std::string>();
    } else {
      std::filesystem::path rel = item.at("response_file").get<std::string>();
      rule.response = util::read_file((path.parent_path() / rel).string());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

// ---------------------------------------------------------------------------
// OpenAI-compatible HTTP backend
// ---------------------------------------------------------------------------

struct HttpBackendOptions {
  std::string base_url;     // e.g. "https://api.example.com/v1"
  std::string model;
  std::string api_key;      // sent as a Bearer token when nonempty
  int max_in_flight = 4;    // concurrent request cap
  int min_interval_ms = 0;  // pacing between request starts
  int timeout_s = 300;      // per-request read timeout
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options) : opt_(std::move(options)) {
    if (opt_.max_in_flight < 1)
      throw Error(Errc::ConfigError, "max_in_flight must be at least 1");
    const auto scheme_end = opt_.base_url.find("://");
    if (scheme_end == std::string::npos)
      throw Error(Errc::ConfigError, "base_url needs a scheme: " + opt_.base_url);
    const auto path_start = opt_.base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
      origin_ = opt_.base_url;
    } else {
      origin_ = opt_.base_url.substr(0, path_start);
      prefix_ = opt_.base_url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  LlmResponse complete(const LlmRequest& request) override {
    Pacer pacer(*this);

    nlohmann::json body;
    body["model"] = opt_.model;
    body["temperature"] = request.temperature;
    body["top_p"] = request.top_p;
    body["max_tokens"] = request.max_output_tokens;
    auto& messages = body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages)
      messages.push_back({{"role", m.role}, {"content", m.content}});

    httplib::Client client(origin_);
    client.set_connection_timeout(30, 0);
    client.set_read_timeout(opt_.timeout_s, 0);
    client.set_write_timeout(opt_.timeout_s, 0);
    httplib::Headers headers;
    if (!opt_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + opt_.api_key);

    auto res = client.Post(prefix_ + "/chat/completions", headers, body.dump(),
                           "application/json");
    if (!res)
      throw Error(Errc::Transport,
                  "request to " + origin_ + " failed: " + httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw Error(Errc::AuthFailure,
                  "authentication rejected (HTTP " + std::to_string(res->status) + ")");
    if (res->status == 429)
      throw Error(Errc::RateLimited, "rate limited (HTTP 429)");
    if (res->status != 200)
      throw Error(Errc::Transport,
                  "HTTP " + std::to_string(res->status) + " from " + origin_);

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Transport, std::string("bad response JSON: ") + e.what());
    }
    LlmResponse out;
    try {
      const auto& choices = doc.at("choices");
      if (choices.empty()) throw Error(Errc::EmptyResponse, "no choices");
      out.text = choices.at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw Error(Errc::EmptyResponse, "response carries no message content");
    }
    if (util::strip(out.text).empty())
      throw Error(Errc::EmptyResponse, "model returned empty text");
    if (doc.contains("usage")) {
      const auto& u = doc["usage"];
      if (u.contains("prompt_tokens")) out.prompt_tokens = u["prompt_tokens"].get<int64_t>();
      if (u.contains("completion_tokens"))
        out.completion_tokens = u["completion_tokens"].get<int64_t>();
    }
    return out;
  }

  std::string name() const override { return "http:" + opt_.model; }

 private:
  // Enforces the in-flight cap and inter-request pacing; RAII releases the slot.
  struct Pacer {
    explicit Pacer(HttpBackend& b) : backend(b) {
      std::unique_lock<std::mutex> lock(b.mu_);
      b.cv_.wait(lock, [&] { return b.in_flight_ < b.opt_.max_in_flight; });
      ++b.in_flight_;
      if (b.opt_.min_interval_ms > 0) {
        const auto interval = std::chrono::milliseconds(b.opt_.min_interval_ms);
        auto now = std::chrono::steady_clock::now();
        if (b.last_start_ + interval > now) {
          auto wake = b.last_start_ + interval;
          lock.unlock();
          std::this_thread::sleep_until(wake);
          lock.lock();
          now = std::chrono::steady_clock::now();
        }
        b.last_start_ = now;
      }
    }
    ~Pacer() {
      std::lock_guard<std::mutex> lock(backend.mu_);
      --backend.in_flight_;
      backend.cv_.notify_one();
    }
    HttpBackend& backend;
  };

  HttpBackendOptions opt_;
  std::string origin_;
  std::string prefix_;
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::chrono::steady_clock::time_point last_start_{};
};

// ---------------------------------------------------------------------------
// Code block extraction
// ---------------------------------------------------------------------------

/// Extracts fenced code blocks (``` delimited) from a model reply, in order.
/// An unterminated trailing fence yields a block so that replies truncated at
/// the token limit still surface their code.
inline std::vector<std::string> extract_code_blocks(std::string_view reply) {
  std::vector<std::string> blocks;
  std::vector<std::string> lines = util::split_lines(reply);
  std::string current;
  bool open = false;
  for (const auto& raw : lines) {
    std::string_view body = util::strip(util::rstrip(raw));
    if (body.size() >= 3 && body.substr(0, 3) == "```") {
      if (!open) {
        open = true;
        current.clear();
      } else {
        blocks.push_back(current);
        open = false;
      }
      continue;
    }
    if (open) {
      current += raw;
      current.push_back('\n');
    }
  }
  if (open) blocks.push_back(current);
  return blocks;
}

/// The last `count` blocks of a reply, oldest first. Models often echo the
/// input before answering, so the final blocks are the answer. Throws
/// NotEnoughBlocks when fewer than `count` are present.
inline std::vector<std::string> last_code_blocks(std::string_view reply,
                                                 size_t count) {
  std::vector<std::string> blocks = extract_code_blocks(reply);
  if (blocks.size() < count)
    throw Error(Errc::NotEnoughBlocks,
                "expected " + std::to_string(count) + " fenced code block(s), got " +
                    std::to_string(blocks.size()));
  return {blocks.end() - static_cast<long>(count), blocks.end()};
}

inline std::string last_code_block(std::string_view reply) {
  return last_code_blocks(reply, 1).front();
}

// ---------------------------------------------------------------------------
// Prompt renderers
// ---------------------------------------------------------------------------

/// Wraps text in a code fence, keeping the closing fence on its own line.
inline std::string fenced(std::string_view text) {
  std::string out = "```\n";
  out += text;
  if (out.empty() || out.back() != '\n') out.push_back('\n');
  out += "```";
  return out;
}

inline constexpr const char* kSystemPrompt =
    "You are an expert software engineer who translates programs between "
    "C++, Java, and Python without changing their behavior.";

/// Prompt for translating a whole program. The program is expected to carry
/// trace prints already; the translation must preserve them.
inline std::string render_translation_prompt(const Language& from,
                                             const Language& to,
                                             std::string_view source_text) {
  std::ostringstream os;
  os << "Translate the following " << from.display_name << " program into "
     << to.display_name << ".\n"
     << "Requirements:\n"
     << "1. The translation must read the same input from standard input and "
        "write the same output to standard output as the original.\n"
     << "2. The original contains trace print statements whose output lines "
        "start with \"PAST_TRACE|\"; reproduce every one of them in the "
        "translation, printing the same text at the equivalent program "
        "position, and keep the \"PAST-INSTR\" marker comment on each such "
        "line using the comment syntax of " << to.display_name << ".\n"
     << "3. The result must be a single self-contained file with no external "
        "dependencies beyond the standard library.\n"
     << "4. Reply with exactly one fenced code block containing the complete "
        "translated program and nothing else.\n\n"
     << fenced(source_text) << "\n";
  return os.str();
}

/// The four payloads of a repair request, in fixed order: original program,
/// faulty translation, error message (empty when every run terminated
/// normally), output differences.
inline std::string render_repair_payload(const Language& from,
                                         const Language& to,
                                         std::string_view source_text,
                                         std::string_view candidate_text,
                                         std::string_view error_text,
                                         std::string_view diff_summary) {
  std::ostringstream os;
  os << "Original " << from.display_name << " program:\n"
     << fenced(source_text) << "\n\n"
     << to.display_name << " translation:\n"
     << fenced(candidate_text) << "\n\n"
     << "Error message:\n" << error_text;
  if (!error_text.empty() && error_text.back() != '\n') os << "\n";
  os << "\nOutput differences:\n"
     << (diff_summary.empty() ? "outputs identical up to captured length"
                              : diff_summary)
     << "\n";
  return os.str();
}

/// Prompt for repairing a faulty translation in one shot, given the original,
/// the broken candidate, and evidence from execution.
inline std::string render_direct_repair_prompt(const Language& from,
                                               const Language& to,
                                               std::string_view source_text,
                                               std::string_view candidate_text,
                                               std::string_view error_text,
                                               std::string_view diff_summary) {
  std::ostringstream os;
  os << "A " << from.display_name << " program was translated into "
     << to.display_name << ", but the translation misbehaves.\n\n"
     << render_repair_payload(from, to, source_text, candidate_text,
                              error_text, diff_summary)
     << "\n"
     << "Fix the " << to.display_name << " program so it behaves exactly like "
        "the original, keeping all trace print statements (lines printing "
        "\"PAST_TRACE|\") and their \"PAST-INSTR\" marker comments intact.\n"
     << "Reply with exactly one fenced code block containing the complete "
        "corrected " << to.display_name << " program and nothing else.\n";
  return os.str();
}

/// Prompt for locating the faulty region. The model must answer with two
/// fenced code blocks: first the faulty snippet copied verbatim from the
/// translation, then the corresponding snippet copied verbatim from the
/// original.
inline std::string render_localization_prompt(const Language& from,
                                              const Language& to,
                                              std::string_view source_text,
                                              std::string_view candidate_text,
                                              std::string_view error_text,
                                              std::string_view diff_summary) {
  std::ostringstream os;
  os << "A " << from.display_name << " program was translated into "
     << to.display_name << ". At runtime the two programs diverge.\n\n"
     << render_repair_payload(from, to, source_text, candidate_text,
                              error_text, diff_summary)
     << "\n"
     << "Identify the smallest contiguous region of the " << to.display_name
     << " translation that causes the divergence.\n"
     << "Reply with exactly two fenced code blocks and nothing else:\n"
     << "1. the faulty snippet, copied verbatim (byte for byte, including "
        "indentation) from the " << to.display_name << " translation;\n"
     << "2. the corresponding snippet, copied verbatim from the original "
     << from.display_name << " program.\n";
  return os.str();
}

/// Prompt for re-translating just the localized snippet.
inline std::string render_snippet_translation_prompt(
    const Language& from, const Language& to, std::string_view source_snippet,
    std::string_view faulty_snippet, std::string_view evidence) {
  std::ostringstream os;
  os << "Translate the following " << from.display_name << " snippet into "
     << to.display_name << ". It will replace a faulty region inside an "
        "existing " << to.display_name << " program, so match the surrounding "
        "style: same identifiers where they already exist, and keep any trace "
        "print statements (lines printing \"PAST_TRACE|\") together with "
        "their \"PAST-INSTR\" marker comments.\n\n"
     << "Snippet to translate, from the original " << from.display_name
     << " program:\n"
     << fenced(source_snippet) << "\n\n"
     << "Faulty " << to.display_name << " region it replaces:\n"
     << fenced(faulty_snippet) << "\n\n"
     << "Previously observed problem:\n" << evidence << "\n\n"
     << "Reply with exactly one fenced code block containing only the "
        "replacement snippet.\n";
  return os.str();
}

inline LlmRequest make_request(std::string user_prompt,
                               double temperature = 0.2, double top_p = 0.95,
                               int max_output_tokens = 8192) {
  LlmRequest req;
  req.messages.push_back({"system", kSystemPrompt});
  req.messages.push_back({"user", std::move(user_prompt)});
  req.temperature = temperature;
  req.top_p = top_p;
  req.max_output_tokens = max_output_tokens;
  return req;
}

}  // namespace past

#endif  // PAST_LLM_HPP
