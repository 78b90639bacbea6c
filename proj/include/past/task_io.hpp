// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// On-disk task format. A task is a directory holding:
//   meta                      key = value lines (id, source_language,
//                             target_language); id defaults to the dir name
//   source.<ext>              single-file program (.cpp / .java / .py)
//   tests/public/<id>.in      stdin payloads, one file per test
//   tests/private/<id>.in     optional hidden tests

#ifndef PAST_TASK_IO_HPP
#define PAST_TASK_IO_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "past/core.hpp"
#include "past/util.hpp"

namespace past {

/// Parses "key = value" lines; '#' starts a comment, blanks are skipped.
inline std::map<std::string, std::string> parse_meta(std::string_view text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> kv;
  size_t lineno = 0;
  for (const auto& raw : util::split_lines(text)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    if (util::is_blank(line)) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(Errc::ConfigError, origin + ":" + std::to_string(lineno) +
                                         ": expected key = value");
    std::string key(util::strip(line.substr(0, eq)));
    std::string value(util::strip(line.substr(eq + 1)));
    if (key.empty())
      throw Error(Errc::ConfigError,
                  origin + ":" + std::to_string(lineno) + ": empty key");
    if (!kv.emplace(key, value).second)
      throw Error(Errc::ConfigError, origin + ":" + std::to_string(lineno) +
                                         ": duplicate key \"" + key + "\"");
  }
  return kv;
}

namespace detail {

inline std::vector<TestCase> load_tests(const std::filesystem::path& dir,
                                        TestVisibility visibility) {
  std::vector<TestCase> tests;
  if (!std::filesystem::is_directory(dir)) return tests;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".in")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    tests.push_back({f.stem().string(), util::read_file(f.string()), visibility});
  return tests;
}

}  // namespace detail

/// Loads one task directory. Throws ConfigError / IoError on malformed or
/// missing pieces, and the TranslationTask constructor's errors on semantic
/// problems (same language, no public tests, ...).
inline TranslationTask load_task(const std::filesystem::path& dir) {
  const std::filesystem::path meta_path = dir / "meta";
  if (!std::filesystem::is_regular_file(meta_path))
    throw Error(Errc::IoError, "no meta file in " + dir.string());
  auto kv = parse_meta(util::read_file(meta_path.string()), meta_path.string());

  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end())
      throw Error(Errc::ConfigError,
                  meta_path.string() + ": missing key \"" + std::string(key) + "\"");
    return it->second;
  };
  for (const auto& [key, value] : kv) {
    (void)value;
    if (key != "id" && key != "source_language" && key != "target_language")
      throw Error(Errc::ConfigError,
                  meta_path.string() + ": unknown key \"" + key + "\"");
  }

  auto language_or_die = [&](const char* key) -> Language {
    const std::string value = take(key);
    std::optional<Language> lang = parse_language(value);
    if (!lang)
      throw Error(Errc::ConfigError, meta_path.string() + ": unsupported " +
                                         key + " \"" + value + "\"");
    return *lang;
  };
  const Language from = language_or_die("source_language");
  const Language to = language_or_die("target_language");
  std::string id = kv.count("id") ? kv.at("id")
                                  : std::filesystem::absolute(dir).filename().string();

  const std::filesystem::path src_path =
      dir / ("source" + std::string(from.source_extension));
  if (!std::filesystem::is_regular_file(src_path))
    throw Error(Errc::IoError, "no " + src_path.filename().string() + " in " +
                                   dir.string());
  SourceProgram source(id, from, util::read_file(src_path.string()));

  std::vector<TestCase> pub =
      detail::load_tests(dir / "tests" / "public", TestVisibility::PUBLIC);
  std::vector<TestCase> priv =
      detail::load_tests(dir / "tests" / "private", TestVisibility::PRIVATE);

  return make_task(std::move(source), to, std::move(pub), std::move(priv));
}

/// Finds task directories: `root` itself when it holds a meta file, otherwise
/// every descendant directory that does, sorted by path.
inline std::vector<std::filesystem::path> discover_tasks(
    const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root))
    throw Error(Errc::IoError, root.string() + " is not a directory");
  if (std::filesystem::is_regular_file(root / "meta")) return {root};
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_directory() &&
        std::filesystem::is_regular_file(entry.path() / "meta"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace past

#endif  // PAST_TASK_IO_HPP
