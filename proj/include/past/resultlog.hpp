// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Results log: one JSON object per line, one line per task. Large texts
// (prompts, replies, candidates) are stored content-addressed under
// <out_dir>/blobs/ and referenced by hash, keeping the log greppable.

#ifndef PAST_RESULTLOG_HPP
#define PAST_RESULTLOG_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "past/bench.hpp"
#include "past/core.hpp"
#include "past/pipeline.hpp"
#include "past/util.hpp"

namespace past {

struct TestStatusRecord {
  std::string id;
  std::string status;  // "passed" | "wrong_answer" | "runtime_error"
  bool aligned = false;
};

struct AttemptSummary {
  std::string stage;
  bool compiled = false;
  bool aligned = false;
  std::string note;
  std::string prompt_blob;     // content hashes, "" when absent
  std::string response_blob;
  std::string candidate_blob;
  std::vector<TestStatusRecord> public_tests;
};

struct ResultRecord {
  std::string task_id;
  std::string task_dir;
  std::string source_language;
  std::string target_language;
  bool public_aligned = false;
  std::string success_stage;    // stage name, "failed" when none
  bool instrumented = false;
  bool compiled = false;        // final program compiled during verification
  std::string verdict;          // "passed" or a failure-category name
  bool used_private_tests = false;
  size_t source_tokens = 0;
  std::string final_program_path;  // empty when no program was produced
  std::string final_program_blob;
  std::vector<TestStatusRecord> verification_tests;
  std::vector<AttemptSummary> attempts;
  std::vector<std::string> warnings;
  std::string note;
};

inline void to_json(nlohmann::json& j, const TestStatusRecord& r) {
  j = {{"id", r.id}, {"status", r.status}, {"aligned", r.aligned}};
}
inline void from_json(const nlohmann::json& j, TestStatusRecord& r) {
  j.at("id").get_to(r.id);
  j.at("status").get_to(r.status);
  r.aligned = j.value("aligned", false);
}

inline void to_json(nlohmann::json& j, const AttemptSummary& a) {
  j = {{"stage", a.stage},
       {"compiled", a.compiled},
       {"aligned", a.aligned},
       {"note", a.note},
       {"prompt_blob", a.prompt_blob},
       {"response_blob", a.response_blob},
       {"candidate_blob", a.candidate_blob},
       {"public_tests", a.public_tests}};
}
inline void from_json(const nlohmann::json& j, AttemptSummary& a) {
  j.at("stage").get_to(a.stage);
  a.compiled = j.value("compiled", false);
  a.aligned = j.value("aligned", false);
  a.note = j.value("note", "");
  a.prompt_blob = j.value("prompt_blob", "");
  a.response_blob = j.value("response_blob", "");
  a.candidate_blob = j.value("candidate_blob", "");
  if (j.contains("public_tests")) j.at("public_tests").get_to(a.public_tests);
}

inline void to_json(nlohmann::json& j, const ResultRecord& r) {
  j = {{"task_id", r.task_id},
       {"task_dir", r.task_dir},
       {"source_language", r.source_language},
       {"target_language", r.target_language},
       {"public_aligned", r.public_aligned},
       {"success_stage", r.success_stage},
       {"instrumented", r.instrumented},
       {"compiled", r.compiled},
       {"verdict", r.verdict},
       {"used_private_tests", r.used_private_tests},
       {"source_tokens", r.source_tokens},
       {"final_program_path", r.final_program_path},
       {"final_program_blob", r.final_program_blob},
       {"verification_tests", r.verification_tests},
       {"attempts", r.attempts},
       {"warnings", r.warnings},
       {"note", r.note}};
}
inline void from_json(const nlohmann::json& j, ResultRecord& r) {
  j.at("task_id").get_to(r.task_id);
  r.task_dir = j.value("task_dir", "");
  j.at("source_language").get_to(r.source_language);
  j.at("target_language").get_to(r.target_language);
  r.public_aligned = j.value("public_aligned", false);
  r.success_stage = j.value("success_stage", "failed");
  r.instrumented = j.value("instrumented", false);
  r.compiled = j.value("compiled", false);
  r.verdict = j.value("verdict", "");
  r.used_private_tests = j.value("used_private_tests", false);
  r.source_tokens = j.value("source_tokens", size_t{0});
  r.final_program_path = j.value("final_program_path", "");
  r.final_program_blob = j.value("final_program_blob", "");
  if (j.contains("verification_tests"))
    j.at("verification_tests").get_to(r.verification_tests);
  if (j.contains("attempts")) j.at("attempts").get_to(r.attempts);
  if (j.contains("warnings")) j.at("warnings").get_to(r.warnings);
  r.note = j.value("note", "");
}

// ---------------------------------------------------------------------------
// Blob store
// ---------------------------------------------------------------------------

/// Writes `text` under dir/blobs/<hash>.txt (idempotent) and returns the hash.
inline std::string write_blob(const std::filesystem::path& out_dir,
                              std::string_view text) {
  const std::string hash = util::content_hash(text);
  const std::filesystem::path dir = out_dir / "blobs";
  std::filesystem::create_directories(dir);
  const std::filesystem::path file = dir / (hash + ".txt");
  if (!std::filesystem::exists(file)) util::write_file(file.string(), text);
  return hash;
}

inline std::string read_blob(const std::filesystem::path& out_dir,
                             const std::string& hash) {
  return util::read_file((out_dir / "blobs" / (hash + ".txt")).string());
}

// ---------------------------------------------------------------------------
// Record assembly
// ---------------------------------------------------------------------------

/// Converts a pipeline result plus its verification into one log record,
/// writing blobs and the final program file as side effects.
inline ResultRecord make_record(const std::filesystem::path& out_dir,
                                const std::filesystem::path& task_dir,
                                const TranslationTask& task,
                                const PipelineResult& pipeline_result,
                                const Verification& verification) {
  ResultRecord rec;
  rec.task_id = task.id();
  rec.task_dir = task_dir.string();
  rec.source_language = std::string(language_key(task.source().language()));
  rec.target_language = std::string(language_key(task.target_language()));
  rec.public_aligned = pipeline_result.success;
  rec.success_stage = pipeline_result.success
                          ? stage_name(pipeline_result.final_stage)
                          : stage_name(Stage::FAILED);
  rec.instrumented = pipeline_result.instrumented;
  rec.compiled = verification.outcome.compiled;
  rec.used_private_tests = verification.used_private_tests;
  rec.source_tokens = count_tokens(task.source().text());
  rec.warnings = pipeline_result.warnings;
  rec.note = pipeline_result.note;

  if (sample_correct(verification.outcome))
    rec.verdict = "passed";
  else
    rec.verdict = failure_category_name(categorize_failure(verification.outcome));

  if (pipeline_result.final_program) {
    const SourceProgram& fp = *pipeline_result.final_program;
    rec.final_program_blob = write_blob(out_dir, fp.text());
    std::filesystem::path programs = out_dir / "programs";
    std::filesystem::create_directories(programs);
    std::filesystem::path file =
        programs / (task.id() + std::string(fp.language().source_extension));
    util::write_file(file.string(), fp.text());
    rec.final_program_path = file.string();
  }

  const std::vector<TestCase>& vtests = task.private_tests().empty()
                                            ? task.public_tests()
                                            : task.private_tests();
  for (size_t i = 0; i < verification.outcome.tests.size(); ++i) {
    TestStatusRecord t;
    t.id = i < vtests.size() ? vtests[i].id : std::to_string(i);
    t.status = test_status_name(verification.outcome.tests[i]);
    t.aligned = verification.outcome.tests[i] == TestStatus::PASSED;
    rec.verification_tests.push_back(std::move(t));
  }

  for (const auto& a : pipeline_result.attempts) {
    AttemptSummary s;
    s.stage = stage_name(a.stage);
    s.compiled = a.compiled;
    s.aligned = a.aligned;
    s.note = a.note;
    if (!a.prompt.empty()) s.prompt_blob = write_blob(out_dir, a.prompt);
    if (!a.response.empty()) s.response_blob = write_blob(out_dir, a.response);
    if (a.candidate_text) s.candidate_blob = write_blob(out_dir, *a.candidate_text);
    for (const auto& pt : a.public_tests) {
      TestStatusRecord t;
      t.id = pt.test_id;
      t.status = test_status_name(pt.candidate_status);
      t.aligned = pt.aligned;
      s.public_tests.push_back(std::move(t));
    }
    rec.attempts.push_back(std::move(s));
  }
  return rec;
}

// ---------------------------------------------------------------------------
// JSONL I/O
// ---------------------------------------------------------------------------

inline void append_record(const std::filesystem::path& log_path,
                          const ResultRecord& rec) {
  std::ofstream out(log_path, std::ios::app | std::ios::binary);
  if (!out)
    throw Error(Errc::IoError, "cannot open " + log_path.string() + " for append");
  out << nlohmann::json(rec).dump() << "\n";
}

inline std::vector<ResultRecord> read_records(const std::filesystem::path& log_path) {
  std::string text = util::read_file(log_path.string());
  std::vector<ResultRecord> records;
  size_t lineno = 0;
  for (const auto& line : util::split_lines(text)) {
    ++lineno;
    if (util::is_blank(line)) continue;
    try {
      records.push_back(nlohmann::json::parse(line).get<ResultRecord>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::IoError, log_path.string() + ":" + std::to_string(lineno) +
                                     ": bad record: " + e.what());
    }
  }
  return records;
}

/// Rebuilds the per-sample outcome used by the benchmark layer.
inline SampleOutcome outcome_from_record(const ResultRecord& rec) {
  SampleOutcome s;
  s.id = rec.task_id;
  s.compiled = rec.compiled;
  for (const auto& t : rec.verification_tests) {
    if (t.status == "passed") s.tests.push_back(TestStatus::PASSED);
    else if (t.status == "wrong_answer") s.tests.push_back(TestStatus::WRONG_ANSWER);
    else s.tests.push_back(TestStatus::RUNTIME_ERROR);
  }
  return s;
}

}  // namespace past

#endif  // PAST_RESULTLOG_HPP
