// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "past/util.hpp"

namespace past {

// ---------------------------------------------------------------------------
// Language

enum class LanguageTag { CPP, JAVA, PYTHON };

/// One of the three supported languages. Use the language() accessors; there
/// are exactly three instances.
struct Language {
  LanguageTag tag;
  std::string_view display_name;
  std::string_view source_extension;

  bool operator==(const Language& o) const noexcept { return tag == o.tag; }
  bool operator!=(const Language& o) const noexcept { return tag != o.tag; }
};

inline const Language& language(LanguageTag tag) {
  static const Language cpp{LanguageTag::CPP, "C++", ".cpp"};
  static const Language java{LanguageTag::JAVA, "Java", ".java"};
  static const Language python{LanguageTag::PYTHON, "Python", ".py"};
  switch (tag) {
    case LanguageTag::CPP: return cpp;
    case LanguageTag::JAVA: return java;
    case LanguageTag::PYTHON: return python;
  }
  return cpp;  // unreachable
}

inline const std::vector<Language>& all_languages() {
  static const std::vector<Language> all = {language(LanguageTag::CPP),
                                            language(LanguageTag::JAVA),
                                            language(LanguageTag::PYTHON)};
  return all;
}

/// Accepts the canonical short names used in meta files and CLI flags.
inline std::optional<Language> parse_language(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "cpp" || s == "c++" || s == "cxx") return language(LanguageTag::CPP);
  if (s == "java") return language(LanguageTag::JAVA);
  if (s == "python" || s == "py") return language(LanguageTag::PYTHON);
  return std::nullopt;
}

/// Canonical name used in files and logs: "cpp", "java", "python".
inline std::string_view language_key(const Language& lang) {
  switch (lang.tag) {
    case LanguageTag::CPP: return "cpp";
    case LanguageTag::JAVA: return "java";
    case LanguageTag::PYTHON: return "python";
  }
  return "cpp";
}

// ---------------------------------------------------------------------------
// SourceProgram

/// A single-file stdin/stdout console program. Text is held in canonical
/// form: UTF-8, LF line endings, exactly one trailing newline. Construction
/// is idempotent: SourceProgram(p.text()) == p.
class SourceProgram {
 public:
  SourceProgram(std::string id, Language lang, std::string_view raw_text)
      : id_(std::move(id)), language_(lang), text_(canonicalize(raw_text)) {}

  const std::string& id() const noexcept { return id_; }
  const Language& language() const noexcept { return language_; }
  const std::string& text() const noexcept { return text_; }
  std::vector<std::string> lines() const { return util::split_lines(text_); }

  bool operator==(const SourceProgram& o) const {
    return id_ == o.id_ && language_ == o.language_ && text_ == o.text_;
  }

  static std::string canonicalize(std::string_view raw) {
    if (!util::is_valid_utf8(raw))
      throw Error(Errc::InvalidProgram, "program text is not valid UTF-8");
    std::string text;
    text.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
      char c = raw[i];
      if (c == '\r') {
        if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
        text += '\n';
      } else {
        text += c;
      }
    }
    if (util::is_blank(text))
      throw Error(Errc::InvalidProgram, "program text is empty");
    if (text.back() != '\n') text += '\n';
    return text;
  }

 private:
  std::string id_;
  Language language_;
  std::string text_;
};

// ---------------------------------------------------------------------------
// Tests and tasks

enum class TestVisibility { PUBLIC, PRIVATE };

struct TestCase {
  std::string id;
  std::string stdin_payload;
  TestVisibility visibility;
};

/// One unit of work: translate `source` into `target_language`, align on
/// public tests, verify on private tests.
class TranslationTask {
 public:
  TranslationTask(SourceProgram source, Language target,
                  std::vector<TestCase> public_tests,
                  std::vector<TestCase> private_tests)
      : source_(std::move(source)),
        target_(target),
        public_tests_(std::move(public_tests)),
        private_tests_(std::move(private_tests)) {
    if (source_.language() == target_)
      throw Error(Errc::SameLanguage,
                  "source and target language are both " +
                      std::string(target_.display_name));
    if (public_tests_.empty())
      throw Error(Errc::NoPublicTests,
                  "task " + source_.id() + " has no public tests");
    std::set<std::string> seen;
    for (const auto& t : public_tests_) {
      if (t.visibility != TestVisibility::PUBLIC)
        throw Error(Errc::InvalidProgram,
                    "test " + t.id + " in public list is not PUBLIC");
      if (!seen.insert(t.id).second)
        throw Error(Errc::DuplicateTestId, "duplicate test id " + t.id);
    }
    for (const auto& t : private_tests_) {
      if (t.visibility != TestVisibility::PRIVATE)
        throw Error(Errc::InvalidProgram,
                    "test " + t.id + " in private list is not PRIVATE");
      if (!seen.insert(t.id).second)
        throw Error(Errc::DuplicateTestId, "duplicate test id " + t.id);
    }
  }

  const std::string& id() const noexcept { return source_.id(); }
  const SourceProgram& source() const noexcept { return source_; }
  const Language& target_language() const noexcept { return target_; }
  const std::vector<TestCase>& public_tests() const noexcept { return public_tests_; }
  const std::vector<TestCase>& private_tests() const noexcept { return private_tests_; }

 private:
  SourceProgram source_;
  Language target_;
  std::vector<TestCase> public_tests_;
  std::vector<TestCase> private_tests_;
};

inline TranslationTask make_task(SourceProgram source, Language target,
                                 std::vector<TestCase> public_tests,
                                 std::vector<TestCase> private_tests) {
  return TranslationTask(std::move(source), target, std::move(public_tests),
                         std::move(private_tests));
}

// ---------------------------------------------------------------------------
// Pipeline outcome types (filled in by the pipeline module)

enum class Stage { TRANSLATION, DIRECT_REPAIR, LOCALIZE_RETRANSLATE, FAILED };

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::TRANSLATION: return "TRANSLATION";
    case Stage::DIRECT_REPAIR: return "DIRECT_REPAIR";
    case Stage::LOCALIZE_RETRANSLATE: return "LOCALIZE_RETRANSLATE";
    case Stage::FAILED: return "FAILED";
  }
  return "FAILED";
}

inline std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "TRANSLATION") return Stage::TRANSLATION;
  if (s == "DIRECT_REPAIR") return Stage::DIRECT_REPAIR;
  if (s == "LOCALIZE_RETRANSLATE") return Stage::LOCALIZE_RETRANSLATE;
  if (s == "FAILED") return Stage::FAILED;
  return std::nullopt;
}

}  // namespace past
