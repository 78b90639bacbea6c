// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace past {

enum class Errc {
  // core
  SameLanguage,
  NoPublicTests,
  DuplicateTestId,
  InvalidProgram,
  // instrument
  MutatedOriginal,
  NoBreakpoints,
  MarkerOnOriginalLine,
  MalformedTrace,
  // llm
  Transport,
  RateLimited,
  EmptyResponse,
  AuthFailure,
  NotEnoughBlocks,
  // executor
  CompileFailed,
  ToolchainMissing,
  HarnessFault,
  // pipeline
  SnippetNotFound,
  AmbiguousSnippet,
  // bench
  TooShort,
  EmptyResults,
  // cli / io
  UsageError,
  ConfigError,
  IoError,
};

inline std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::SameLanguage: return "SameLanguage";
    case Errc::NoPublicTests: return "NoPublicTests";
    case Errc::DuplicateTestId: return "DuplicateTestId";
    case Errc::InvalidProgram: return "InvalidProgram";
    case Errc::MutatedOriginal: return "MutatedOriginal";
    case Errc::NoBreakpoints: return "NoBreakpoints";
    case Errc::MarkerOnOriginalLine: return "MarkerOnOriginalLine";
    case Errc::MalformedTrace: return "MalformedTrace";
    case Errc::Transport: return "Transport";
    case Errc::RateLimited: return "RateLimited";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::AuthFailure: return "AuthFailure";
    case Errc::NotEnoughBlocks: return "NotEnoughBlocks";
    case Errc::CompileFailed: return "CompileFailed";
    case Errc::ToolchainMissing: return "ToolchainMissing";
    case Errc::HarnessFault: return "HarnessFault";
    case Errc::SnippetNotFound: return "SnippetNotFound";
    case Errc::AmbiguousSnippet: return "AmbiguousSnippet";
    case Errc::TooShort: return "TooShort";
    case Errc::EmptyResults: return "EmptyResults";
    case Errc::UsageError: return "UsageError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

namespace util {

/// Splits on '\n'. "a\nb\n" -> {"a","b"}; "a\nb" -> {"a","b"}; "" -> {}.
/// A trailing newline does not produce an extra empty element.
inline std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.emplace_back(text.substr(pos));
      break;
    }
    out.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

inline std::string_view rstrip(std::string_view s) {
  size_t end = s.size();
  while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\t' ||
                     s[end - 1] == '\r' || s[end - 1] == '\f' ||
                     s[end - 1] == '\v')) {
    --end;
  }
  return s.substr(0, end);
}

inline std::string_view strip(std::string_view s) {
  size_t begin = 0;
  while (begin < s.size() && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  size_t end = s.size();
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

inline bool is_blank(std::string_view s) { return strip(s).empty(); }

inline bool is_valid_utf8(std::string_view s) {
  size_t i = 0;
  while (i < s.size()) {
    unsigned char c = s[i];
    size_t extra;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      if (c < 0xC2) return false;  // overlong
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      if (c > 0xF4) return false;  // beyond U+10FFFF
    } else {
      return false;
    }
    if (i + extra >= s.size() && extra > 0) return false;
    for (size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    // surrogate range
    if (extra == 2 && c == 0xED && static_cast<unsigned char>(s[i + 1]) >= 0xA0) return false;
    i += extra + 1;
  }
  return true;
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline uint64_t hash_bytes(std::string_view data, uint64_t seed = 0) {
  // FNV-1a with a finalizing mix; adequate for interning and signatures.
  uint64_t h = 14695981039346656037ull ^ splitmix64(seed);
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return splitmix64(h);
}

inline std::string to_hex(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

/// 128-bit content address rendered as 32 hex chars.
inline std::string content_hash(std::string_view data) {
  return to_hex(hash_bytes(data, 0x706173741ull)) + to_hex(hash_bytes(data, 0x7472616365ull));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path);
}

inline bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  if (from.empty()) return s;
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

}  // namespace util
}  // namespace past
