// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// The translation pipeline: instrument, translate, execute on shared tests,
// diff runtime behavior, and repair — first directly, then by localizing the
// divergence and re-translating just the faulty region.

#ifndef PAST_PIPELINE_HPP
#define PAST_PIPELINE_HPP

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "past/align.hpp"
#include "past/bench.hpp"
#include "past/core.hpp"
#include "past/executor.hpp"
#include "past/instrument.hpp"
#include "past/llm.hpp"
#include "past/util.hpp"

namespace past {

struct PipelineConfig {
  int direct_repair_rounds = 1;
  int localize_rounds = 1;
  int instrumentation_retries = 2;  // extra attempts after the first
  bool repair_compile_errors = false;
  int diff_summary_budget = 100;    // lines of diff evidence shown to the model
  int llm_attempts = 3;             // transport-level retries per call
  double temperature = 0.2;
  double top_p = 0.95;
  int max_output_tokens = 8192;
};

/// Per-test behavioral comparison between the source reference run and the
/// candidate run. Aligned means: same termination class and identical
/// normalized stdout (trace lines included).
struct TestAlignment {
  std::string test_id;
  bool source_ok = false;     // reference run terminated normally
  bool candidate_ok = false;
  bool aligned = false;
  TestStatus candidate_status = TestStatus::RUNTIME_ERROR;  // vs. reference stdout
};

struct AttemptRecord {
  Stage stage = Stage::TRANSLATION;
  std::string prompt;                        // user prompt of the main call
  std::string response;                      // raw model reply
  std::optional<std::string> candidate_text; // instrumented candidate, canonical
  bool compiled = false;
  bool aligned = false;
  std::vector<TestAlignment> public_tests;
  // Repair evidence: how the first failing run died (empty when every run
  // terminated normally) and the output diff of the first misaligned test.
  std::string error_text;
  std::string diff_summary;
  std::string note;
};

/// Outcome of running the finished translation against the verification
/// tests (private when the task has them, public otherwise), with the plain
/// source program as the reference.
struct Verification {
  SampleOutcome outcome;          // feeds computational accuracy
  std::vector<TestRun> runs;      // final program runs, one per test
  bool used_private_tests = false;
};

struct PipelineResult {
  std::string task_id;
  bool success = false;                 // aligned on every public test
  Stage final_stage = Stage::FAILED;    // stage that produced the final program
  bool instrumented = false;            // trace instrumentation was in effect
  std::optional<SourceProgram> final_program;  // de-instrumented
  std::vector<AttemptRecord> attempts;
  std::vector<std::string> warnings;    // e.g. source program failing its own tests
  std::string note;                     // why the pipeline stopped, on failure
  // Absent when the verification harness itself failed.
  std::optional<Verification> verification;
  // Verdict of the held-out test run; absent when the task has no private
  // tests or verification failed.
  std::optional<FailureCategory> private_verdict;
};

namespace detail {

inline std::string head_of(std::string_view text, size_t max_bytes) {
  if (text.size() <= max_bytes) return std::string(text);
  return std::string(text.substr(0, max_bytes)) + "\n[truncated]";
}

}  // namespace detail

/// Renders the output-difference evidence for one misaligned test: the test
/// input, how each side terminated, and a unified diff of candidate vs.
/// reference stdout.
inline std::string build_diff_summary(const TestCase& test,
                                      const ExecutionOutcome& reference,
                                      const ExecutionOutcome& candidate,
                                      int diff_budget) {
  std::ostringstream os;
  os << "On public test \"" << test.id << "\" the translation diverges from "
     << "the original program.\n";
  os << "Test input (stdin):\n" << detail::head_of(test.stdin_payload, 2048);
  if (!test.stdin_payload.empty() && test.stdin_payload.back() != '\n') os << "\n";
  os << "Original program: " << reference.describe() << "\n";
  os << "Translation: " << candidate.describe() << "\n";
  CappedComparison cmp = compare_outputs(
      candidate.stdout_data, candidate.stdout_truncated, reference.stdout_data,
      reference.stdout_truncated);
  if (cmp.divergence && !cmp.divergence->note.empty())
    os << cmp.divergence->note << "\n";
  LineDiff diff = diff_by_line(candidate.stdout_data, reference.stdout_data);
  os << "Line diff of combined stdout (trace lines start with \""
     << kTraceSentinel << "\"):\n";
  os << summarize_diff(diff, cmp.divergence, diff_budget);
  return os.str();
}

inline std::string splice_snippet(std::string_view program,
                                  std::string_view faulty,
                                  std::string_view replacement);

inline Verification verify_translation(Executor& executor,
                                       const TranslationTask& task,
                                       const std::optional<SourceProgram>& final_program);
inline FailureCategory categorize_verification(const Verification& v);

class Pipeline {
 public:
  Pipeline(Backend& backend, Executor& executor, PipelineConfig config = {})
      : backend_(backend), executor_(executor), cfg_(std::move(config)) {}

  /// Runs the full pipeline for one task, then verifies the de-instrumented
  /// result: on the private tests when the task has them, else on the public
  /// ones. Defined after verify_translation below.
  PipelineResult run(const TranslationTask& task);

 private:
  /// Instrument, translate, and align on the public tests.
  PipelineResult run_aligned(const TranslationTask& task) {
    PipelineResult result;
    result.task_id = task.id();

    // 1. Instrument the source with trace prints; fall back to the plain
    //    source when the model cannot produce a valid instrumentation.
    std::optional<InstrumentedProgram> instrumented = instrument(task, result);
    result.instrumented = instrumented.has_value();
    const std::string& working_source_text =
        instrumented ? instrumented->text() : task.source().text();
    SourceProgram working_source(
        task.source().id(), task.source().language(), working_source_text);

    // 2. Translate.
    std::optional<std::string> candidate =
        translate(task, working_source_text, result);
    if (!candidate) {
      result.note = "translation produced no usable program: " +
                    result.attempts.back().note;
      return result;
    }

    // 3. Compile the (instrumented) source; without a reference executable
    //    there is nothing to align against, so return the translation as is.
    Prepared source_prep = executor_.prepare(working_source);
    if (!source_prep.ok) {
      result.warnings.push_back("source program failed to compile; returning "
                                "unverified translation");
      finalize(task, *candidate, result);
      result.note = "source compile failure prevented behavioral alignment";
      return result;
    }

    // 4. Reference runs on the public tests.
    std::vector<TestRun> reference = executor_.run_tests(source_prep, task.public_tests());
    for (const auto& r : reference) {
      if (!r.outcome.ran_ok())
        result.warnings.push_back("source program failed public test \"" +
                                  r.test_id + "\": " + r.outcome.describe());
    }

    // 5. Check the fresh translation, then run the repair ladder.
    AttemptRecord& first = result.attempts.back();
    if (evaluate_candidate(task, *candidate, reference, first)) {
      succeed(task, *candidate, Stage::TRANSLATION, result);
      return result;
    }
    if (!first.compiled && !cfg_.repair_compile_errors) {
      finalize(task, *candidate, result);
      result.note = "translation does not compile";
      return result;
    }

    for (int round = 0; round < cfg_.direct_repair_rounds; ++round) {
      std::optional<std::string> repaired =
          direct_repair(task, working_source_text, *candidate, reference, result);
      if (repaired) {
        candidate = std::move(repaired);
        if (result.attempts.back().aligned) {
          succeed(task, *candidate, Stage::DIRECT_REPAIR, result);
          return result;
        }
        if (!result.attempts.back().compiled && !cfg_.repair_compile_errors)
          break;
      }
      // A reply without a usable program leaves the previous candidate (and
      // its evidence) in place, so the ladder keeps going.
    }

    // Localization needs runtime evidence, which a non-compiling candidate
    // cannot produce. The current candidate is always the last evaluated one.
    const AttemptRecord* last_eval = last_evaluated(result);
    const bool can_localize =
        last_eval && (last_eval->compiled || cfg_.repair_compile_errors);
    for (int round = 0; can_localize && round < cfg_.localize_rounds; ++round) {
      std::optional<std::string> repaired = localize_and_retranslate(
          task, working_source_text, *candidate, reference, result);
      if (repaired) {
        candidate = std::move(repaired);
        if (result.attempts.back().aligned) {
          succeed(task, *candidate, Stage::LOCALIZE_RETRANSLATE, result);
          return result;
        }
      }
    }

    finalize(task, *candidate, result);
    result.note = result.attempts.back().note.empty()
                      ? "behavior still diverges after all repair rounds"
                      : result.attempts.back().note;
    return result;
  }

  LlmResponse call(const std::string& user_prompt) {
    LlmRequest req = make_request(user_prompt, cfg_.temperature, cfg_.top_p,
                                  cfg_.max_output_tokens);
    return complete_with_retry(backend_, req, cfg_.llm_attempts);
  }

  /// The most recent attempt that produced a candidate program; its evidence
  /// describes the candidate currently under repair. Null before the first
  /// successful translation.
  static const AttemptRecord* last_evaluated(const PipelineResult& result) {
    for (auto it = result.attempts.rbegin(); it != result.attempts.rend(); ++it)
      if (it->candidate_text) return &*it;
    return nullptr;
  }

  // Instrumentation calls do not enter the attempt log: the log records
  // translation candidates, and instrumentation produces none. Retries repeat
  // the request with the rejected attempt's violation appended.
  std::optional<InstrumentedProgram> instrument(const TranslationTask& task,
                                                PipelineResult& result) {
    const std::string base_prompt = build_instrumentation_prompt(task.source());
    std::string prompt = base_prompt;
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.instrumentation_retries; ++attempt) {
      try {
        LlmResponse resp = call(prompt);
        return validate_instrumented(task.source(), last_code_block(resp.text));
      } catch (const Error& e) {
        last_error = e.what();
        prompt = base_prompt +
                 "\n\nYour previous attempt was rejected: " + last_error +
                 "\nInsert whole new print lines only — never reword, reorder "
                 "or delete existing lines — and end every inserted line with "
                 "the marker comment.";
      }
    }
    result.warnings.push_back("instrumentation failed (" + last_error +
                              "); translating without trace prints");
    return std::nullopt;
  }

  std::optional<std::string> translate(const TranslationTask& task,
                                       std::string_view source_text,
                                       PipelineResult& result) {
    AttemptRecord rec;
    rec.stage = Stage::TRANSLATION;
    rec.prompt = render_translation_prompt(task.source().language(),
                                           task.target_language(), source_text);
    try {
      LlmResponse resp = call(rec.prompt);
      rec.response = resp.text;
      std::string text = SourceProgram::canonicalize(last_code_block(resp.text));
      rec.candidate_text = text;
      result.attempts.push_back(std::move(rec));
      return text;
    } catch (const Error& e) {
      rec.note = e.what();
      result.attempts.push_back(std::move(rec));
      return std::nullopt;
    }
  }

  /// Compiles and runs a candidate on the public tests, filling `rec` with
  /// the alignment outcome and repair evidence. Returns rec.aligned.
  bool evaluate_candidate(const TranslationTask& task, const std::string& text,
                          const std::vector<TestRun>& reference,
                          AttemptRecord& rec) {
    rec.candidate_text = text;
    SourceProgram prog = make_candidate_program(task, text);
    Prepared prep = executor_.prepare(prog);
    rec.compiled = prep.ok;
    if (!prep.ok) {
      rec.error_text = "compilation failed:\n" +
                       detail::head_of(prep.compile_log, 4000);
      rec.note = "candidate failed to compile";
      rec.aligned = false;
      return false;
    }
    rec.public_tests.clear();
    bool all = true;
    for (size_t i = 0; i < reference.size(); ++i) {
      const TestCase& test = task.public_tests()[i];
      ExecutionOutcome run = executor_.run(prep, test.stdin_payload);
      TestAlignment ta;
      ta.test_id = test.id;
      ta.source_ok = reference[i].outcome.ran_ok();
      ta.candidate_ok = run.ran_ok();
      ta.candidate_status = classify_run(run, reference[i].outcome.stdout_data);
      CappedComparison cmp = compare_outputs(
          run.stdout_data, run.stdout_truncated,
          reference[i].outcome.stdout_data, reference[i].outcome.stdout_truncated);
      ta.aligned = (ta.source_ok == ta.candidate_ok) && cmp.equal;
      if (!run.ran_ok() && rec.error_text.empty())
        rec.error_text =
            "on public test \"" + test.id + "\": " + run.describe();
      if (!ta.aligned && rec.diff_summary.empty())
        rec.diff_summary = build_diff_summary(test, reference[i].outcome, run,
                                              cfg_.diff_summary_budget);
      all = all && ta.aligned;
      rec.public_tests.push_back(std::move(ta));
    }
    rec.aligned = all;
    return all;
  }

  std::optional<std::string> direct_repair(const TranslationTask& task,
                                           std::string_view source_text,
                                           const std::string& candidate,
                                           const std::vector<TestRun>& reference,
                                           PipelineResult& result) {
    AttemptRecord rec;
    rec.stage = Stage::DIRECT_REPAIR;
    const AttemptRecord& prev = *last_evaluated(result);
    rec.prompt = render_direct_repair_prompt(
        task.source().language(), task.target_language(), source_text,
        candidate, prev.error_text, prev.diff_summary);
    try {
      LlmResponse resp = call(rec.prompt);
      rec.response = resp.text;
      std::string text = SourceProgram::canonicalize(last_code_block(resp.text));
      evaluate_candidate(task, text, reference, rec);
      result.attempts.push_back(std::move(rec));
      return text;
    } catch (const Error& e) {
      rec.note = std::string("direct repair failed: ") + e.what();
      result.attempts.push_back(std::move(rec));
      return std::nullopt;
    }
  }

  std::optional<std::string> localize_and_retranslate(
      const TranslationTask& task, std::string_view source_text,
      const std::string& candidate, const std::vector<TestRun>& reference,
      PipelineResult& result) {
    AttemptRecord rec;
    rec.stage = Stage::LOCALIZE_RETRANSLATE;
    const std::string prev_error = last_evaluated(result)->error_text;
    const std::string prev_diff = last_evaluated(result)->diff_summary;
    rec.prompt = render_localization_prompt(
        task.source().language(), task.target_language(), source_text,
        candidate, prev_error, prev_diff);
    try {
      LlmResponse locate = call(rec.prompt);
      rec.response = locate.text;
      std::vector<std::string> blocks = last_code_blocks(locate.text, 2);
      const std::string& faulty = blocks[0];
      const std::string& source_snippet = blocks[1];

      const std::string retrans_prompt = render_snippet_translation_prompt(
          task.source().language(), task.target_language(), source_snippet,
          faulty, prev_diff);
      LlmResponse snip = call(retrans_prompt);
      std::string replacement = last_code_block(snip.text);

      std::string splice_note;
      std::string text;
      try {
        text = SourceProgram::canonicalize(
            splice_snippet(candidate, faulty, replacement));
      } catch (const Error& e) {
        if (e.code() != Errc::SnippetNotFound &&
            e.code() != Errc::AmbiguousSnippet)
          throw;
        // The named snippet cannot be spliced back; ask once for the whole
        // corrected program instead.
        splice_note = std::string("splice failed (") + e.what() +
                      "); fell back to a full-program request";
        LlmResponse full = call(render_direct_repair_prompt(
            task.source().language(), task.target_language(), source_text,
            candidate, prev_error, prev_diff));
        text = SourceProgram::canonicalize(last_code_block(full.text));
      }
      evaluate_candidate(task, text, reference, rec);
      if (!splice_note.empty())
        rec.note = rec.note.empty() ? splice_note
                                    : splice_note + "\n" + rec.note;
      result.attempts.push_back(std::move(rec));
      return text;
    } catch (const Error& e) {
      rec.note = std::string("localization failed: ") + e.what();
      result.attempts.push_back(std::move(rec));
      return std::nullopt;
    }
  }

  SourceProgram make_candidate_program(const TranslationTask& task,
                                       std::string_view text) const {
    return SourceProgram(task.id() + ".candidate", task.target_language(), text);
  }

  void succeed(const TranslationTask& task, const std::string& candidate,
               Stage stage, PipelineResult& result) {
    result.success = true;
    result.final_stage = stage;
    finalize(task, candidate, result);
  }

  void finalize(const TranslationTask& task, const std::string& candidate,
                PipelineResult& result) {
    std::string clean = strip_instrumentation(candidate);
    if (util::is_blank(clean)) {
      result.final_program.reset();
      result.warnings.push_back("candidate is empty after removing trace lines");
      return;
    }
    result.final_program =
        SourceProgram(task.id() + ".out", task.target_language(), clean);
  }

  Backend& backend_;
  Executor& executor_;
  PipelineConfig cfg_;
};

// ---------------------------------------------------------------------------
// Snippet splicing
// ---------------------------------------------------------------------------

/// Replaces the unique occurrence of `faulty` inside `program` with
/// `replacement`, matching whole lines with trailing whitespace ignored.
/// Throws SnippetNotFound / AmbiguousSnippet accordingly.
inline std::string splice_snippet(std::string_view program,
                                  std::string_view faulty,
                                  std::string_view replacement) {
  std::vector<std::string> prog_lines = util::split_lines(program);
  std::vector<std::string> faulty_lines = util::split_lines(faulty);
  while (!faulty_lines.empty() && util::is_blank(faulty_lines.back()))
    faulty_lines.pop_back();
  while (!faulty_lines.empty() && util::is_blank(faulty_lines.front()))
    faulty_lines.erase(faulty_lines.begin());
  if (faulty_lines.empty())
    throw Error(Errc::SnippetNotFound, "empty snippet cannot be located");

  auto line_eq = [](const std::string& a, const std::string& b) {
    return util::rstrip(a) == util::rstrip(b);
  };
  std::vector<size_t> starts;
  for (size_t i = 0; i + faulty_lines.size() <= prog_lines.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < faulty_lines.size() && match; ++j)
      match = line_eq(prog_lines[i + j], faulty_lines[j]);
    if (match) starts.push_back(i);
  }
  if (starts.empty())
    throw Error(Errc::SnippetNotFound,
                "snippet does not occur in the candidate program");
  if (starts.size() > 1)
    throw Error(Errc::AmbiguousSnippet,
                "snippet occurs " + std::to_string(starts.size()) +
                    " times in the candidate program");

  std::vector<std::string> repl_lines = util::split_lines(replacement);
  while (!repl_lines.empty() && util::is_blank(repl_lines.back()))
    repl_lines.pop_back();

  std::vector<std::string> out;
  out.reserve(prog_lines.size() + repl_lines.size());
  for (size_t i = 0; i < starts[0]; ++i) out.push_back(std::move(prog_lines[i]));
  for (auto& l : repl_lines) out.push_back(std::move(l));
  for (size_t i = starts[0] + faulty_lines.size(); i < prog_lines.size(); ++i)
    out.push_back(std::move(prog_lines[i]));
  return util::join_lines(out);
}

// ---------------------------------------------------------------------------
// Private-test verification
// ---------------------------------------------------------------------------

/// Verifies a finished translation against the task's private tests (public
/// tests when no private ones exist). The reference behavior comes from the
/// plain, uninstrumented source program.
inline Verification verify_translation(Executor& executor,
                                       const TranslationTask& task,
                                       const std::optional<SourceProgram>& final_program) {
  Verification v;
  v.outcome.id = task.id();
  const std::vector<TestCase>& tests =
      task.private_tests().empty() ? task.public_tests() : task.private_tests();
  v.used_private_tests = !task.private_tests().empty();

  if (!final_program) {
    v.outcome.compiled = false;
    return v;
  }
  Prepared cand = executor.prepare(*final_program);
  if (!cand.ok) {
    v.outcome.compiled = false;
    return v;
  }
  Prepared ref = executor.prepare(task.source());
  if (!ref.ok)
    throw Error(Errc::InvalidProgram,
                "source program of task " + task.id() + " does not compile");
  v.outcome.compiled = true;
  for (const auto& t : tests) {
    ExecutionOutcome expected = executor.run(ref, t.stdin_payload);
    ExecutionOutcome got = executor.run(cand, t.stdin_payload);
    TestStatus status;
    if (!expected.ran_ok())
      // The reference itself misbehaves; mirror alignment semantics.
      status = (got.ran_ok() == expected.ran_ok() &&
                outputs_equal(got.stdout_data, expected.stdout_data))
                   ? TestStatus::PASSED
                   : (got.ran_ok() ? TestStatus::WRONG_ANSWER
                                   : TestStatus::RUNTIME_ERROR);
    else
      status = classify_run(got, expected.stdout_data);
    v.outcome.tests.push_back(status);
    v.runs.push_back({t.id, std::move(got)});
  }
  return v;
}

/// Maps a verification outcome onto the failure taxonomy. NONE means every
/// test passed.
inline FailureCategory categorize_verification(const Verification& v) {
  return categorize_failure(v.outcome);
}

inline PipelineResult Pipeline::run(const TranslationTask& task) {
  PipelineResult result = run_aligned(task);
  try {
    Verification v = verify_translation(executor_, task, result.final_program);
    if (v.used_private_tests)
      result.private_verdict = categorize_verification(v);
    result.verification = std::move(v);
  } catch (const Error& e) {
    if (e.code() == Errc::HarnessFault || e.code() == Errc::ToolchainMissing)
      throw;
    result.warnings.push_back(std::string("verification failed: ") + e.what());
  }
  return result;
}

}  // namespace past

#endif  // PAST_PIPELINE_HPP
