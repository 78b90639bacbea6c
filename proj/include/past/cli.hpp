// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line interface. Subcommands:
//   translate  run the pipeline over a tree of task directories
//   eval       re-execute logged final programs and recompute accuracy
//   dedup      cluster near-duplicate programs in a corpus
//   report     render accuracy/failure/length tables from a results log
//
// Exit codes: 0 success, 1 task failures or accuracy below 1, 2 usage or
// configuration errors, 3 harness or toolchain faults.

#ifndef PAST_CLI_HPP
#define PAST_CLI_HPP

#include <signal.h>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "past/config.hpp"
#include "past/core.hpp"
#include "past/executor.hpp"
#include "past/llm.hpp"
#include "past/pipeline.hpp"
#include "past/report.hpp"
#include "past/resultlog.hpp"
#include "past/task_io.hpp"

namespace past {

inline constexpr int kExitOk = 0;
inline constexpr int kExitTaskFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitHarness = 3;

struct TranslateArgs {
  std::string tasks_root;
  std::string out_dir;
  std::string config_path;
  std::string backend;      // override: "mock" | "http" | "mock:<script>"
  std::string mock_script;  // override
  std::string model;        // override
  std::string base_url;     // override
  std::string target;       // override every task's target language
  int jobs = 0;             // 0: take the config value
  double timeout_secs = 0;  // 0: take the config value
};

struct EvalArgs {
  std::string tasks_root;
  std::string results_path;
  std::string config_path;
};

struct DedupArgs {
  std::string input_path;
  double threshold = 0.85;
  bool as_json = false;
};

struct ReportArgs {
  std::string results_path;
  bool as_csv = false;
  bool buckets_only = false;
};

using Command = std::variant<TranslateArgs, EvalArgs, DedupArgs, ReportArgs>;

struct ParseOutcome {
  std::optional<Command> command;  // empty: exit immediately with exit_code
  int exit_code = kExitOk;
  std::string message;             // help text or parse error
};

// ---------------------------------------------------------------------------
// Argument parsing
// ---------------------------------------------------------------------------

/// Parses argv (without the program name). Never throws; --help and parse
/// errors come back as an empty command plus message and exit code.
inline ParseOutcome parse_args(const std::vector<std::string>& args) {
  CLI::App app{"past: translate stdin/stdout programs between C++, Java and "
               "Python, aligning runtime behavior on shared tests"};
  app.require_subcommand(1);

  TranslateArgs tr;
  auto* t = app.add_subcommand("translate", "run the translation pipeline");
  t->add_option("--tasks", tr.tasks_root, "root directory of task dirs")->required();
  t->add_option("--out", tr.out_dir, "output directory for results")->required();
  t->add_option("--config", tr.config_path, "config file (INI)");
  t->add_option("--backend", tr.backend,
                "override [llm] backend: mock|http|mock:<script path>");
  t->add_option("--mock-script", tr.mock_script, "override [llm] mock_script");
  t->add_option("--model", tr.model, "override [llm] model");
  t->add_option("--base-url", tr.base_url, "override [llm] base_url");
  t->add_option("--target", tr.target,
                "override the target language of every task");
  t->add_option("--jobs", tr.jobs, "parallel tasks")->check(CLI::PositiveNumber);
  t->add_option("--timeout-secs", tr.timeout_secs, "override the run timeout")
      ->check(CLI::PositiveNumber);

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "re-verify logged translations");
  e->add_option("--tasks", ev.tasks_root, "root directory of task dirs")->required();
  e->add_option("--results", ev.results_path, "results.jsonl to evaluate")->required();
  e->add_option("--config", ev.config_path, "config file (INI)");

  DedupArgs dd;
  auto* d = app.add_subcommand("dedup", "cluster near-duplicate programs");
  d->add_option("input", dd.input_path, "tasks root or directory of source files")
      ->required();
  d->add_option("--threshold", dd.threshold, "similarity threshold (default 0.85)")
      ->check(CLI::Range(0.0, 1.0));
  d->add_flag("--json", dd.as_json, "emit clusters as JSON");

  ReportArgs rp;
  auto* r = app.add_subcommand("report", "summarize a results log");
  r->add_option("--results", rp.results_path, "results.jsonl to summarize")->required();
  r->add_flag("--csv", rp.as_csv, "emit CSV instead of tables");
  r->add_flag("--buckets", rp.buckets_only, "emit only the length-bucket table");

  std::vector<const char*> argv;
  argv.push_back("past");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& ex) {
    return {std::nullopt, kExitOk, app.help()};
  } catch (const CLI::ParseError& ex) {
    return {std::nullopt, kExitUsage, std::string(ex.what())};
  }

  if (t->parsed()) return {tr, kExitOk, ""};
  if (e->parsed()) return {ev, kExitOk, ""};
  if (d->parsed()) return {dd, kExitOk, ""};
  return {rp, kExitOk, ""};
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

namespace detail {

inline std::atomic<bool> g_interrupted{false};

inline void handle_sigint(int) { g_interrupted.store(true); }

/// Installs a SIGINT handler for the duration of a run; the translate loop
/// drains the current task and stops instead of dying mid-write.
struct InterruptGuard {
  InterruptGuard() {
    g_interrupted.store(false);
    struct sigaction sa = {};
    sa.sa_handler = handle_sigint;
    ::sigaction(SIGINT, &sa, &old_);
  }
  ~InterruptGuard() { ::sigaction(SIGINT, &old_, nullptr); }
  struct sigaction old_ = {};
};

inline Config load_config_or_default(const std::string& path) {
  if (path.empty()) return Config{};
  return load_config(path);
}

inline std::unique_ptr<Backend> make_backend(const LlmConfig& llm) {
  if (llm.backend == "mock") {
    if (llm.mock_script.empty())
      throw Error(Errc::ConfigError,
                  "mock backend needs a mock_script (config [llm] or --mock-script)");
    return std::make_unique<MockBackend>(load_mock_script(llm.mock_script));
  }
  HttpBackendOptions opt;
  opt.base_url = llm.base_url;
  opt.model = llm.model;
  opt.api_key = api_key_from_env();
  opt.max_in_flight = llm.max_in_flight;
  opt.min_interval_ms = llm.min_interval_ms;
  return std::make_unique<HttpBackend>(std::move(opt));
}

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::UsageError:
    case Errc::ConfigError:
      return kExitUsage;
    case Errc::HarnessFault:
    case Errc::ToolchainMissing:
      return kExitHarness;
    default:
      return kExitTaskFailure;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// translate
// ---------------------------------------------------------------------------

inline int run_translate(const TranslateArgs& args, std::ostream& out,
                         std::ostream& err) {
  Config cfg = detail::load_config_or_default(args.config_path);
  if (!args.backend.empty()) {
    if (args.backend.rfind("mock:", 0) == 0) {
      cfg.llm.backend = "mock";
      cfg.llm.mock_script = args.backend.substr(5);
    } else if (args.backend == "mock" || args.backend == "http") {
      cfg.llm.backend = args.backend;
    } else {
      throw Error(Errc::ConfigError,
                  "unknown backend \"" + args.backend +
                      "\" (expected mock, http, or mock:<script path>)");
    }
  }
  if (!args.mock_script.empty()) cfg.llm.mock_script = args.mock_script;
  if (!args.model.empty()) cfg.llm.model = args.model;
  if (!args.base_url.empty()) cfg.llm.base_url = args.base_url;
  if (args.timeout_secs > 0)
    cfg.pipeline.run_timeout_ms = static_cast<int>(args.timeout_secs * 1000.0);
  std::optional<Language> target_override;
  if (!args.target.empty()) {
    target_override = parse_language(args.target);
    if (!target_override)
      throw Error(Errc::ConfigError,
                  "unsupported target language \"" + args.target + "\"");
  }
  const int jobs = args.jobs > 0 ? args.jobs : std::max(1, cfg.pipeline.jobs);

  std::unique_ptr<Backend> backend = detail::make_backend(cfg.llm);
  Executor executor(cfg.executor_options());

  std::vector<std::filesystem::path> dirs = discover_tasks(args.tasks_root);
  if (dirs.empty())
    throw Error(Errc::IoError, "no task directories under " + args.tasks_root);

  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path log_path =
      std::filesystem::path(args.out_dir) / "results.jsonl";

  struct Slot {
    std::optional<ResultRecord> record;
    std::string error;
    bool harness_fault = false;
  };
  std::vector<Slot> slots(dirs.size());
  std::atomic<size_t> next{0};
  std::mutex print_mu;
  detail::InterruptGuard guard;

  auto worker = [&]() {
    Pipeline pipeline(*backend, executor, cfg.pipeline_config());
    for (;;) {
      if (detail::g_interrupted.load()) return;
      const size_t i = next.fetch_add(1);
      if (i >= dirs.size()) return;
      Slot& slot = slots[i];
      try {
        TranslationTask task = load_task(dirs[i]);
        if (target_override)
          task = make_task(task.source(), *target_override, task.public_tests(),
                           task.private_tests());
        PipelineResult pr = pipeline.run(task);
        Verification v;
        if (pr.verification) {
          v = *pr.verification;
        } else {
          v.outcome.id = task.id();  // verification failed; logged in warnings
        }
        slot.record = make_record(args.out_dir, dirs[i], task, pr, v);
        std::lock_guard<std::mutex> lock(print_mu);
        out << "task " << slot.record->task_id << ": "
            << (pr.success ? "aligned at " + std::string(stage_name(pr.final_stage))
                           : std::string("not aligned"))
            << ", verification " << slot.record->verdict << "\n";
      } catch (const Error& e) {
        slot.error = std::string(errc_name(e.code())) + ": " + e.what();
        slot.harness_fault = e.code() == Errc::HarnessFault ||
                             e.code() == Errc::ToolchainMissing;
        std::lock_guard<std::mutex> lock(print_mu);
        err << "task dir " << dirs[i].string() << ": " << slot.error << "\n";
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  bool all_ok = true, any_fault = false;
  size_t done = 0;
  for (const auto& slot : slots) {
    if (slot.record) {
      append_record(log_path, *slot.record);
      ++done;
      all_ok = all_ok && slot.record->public_aligned &&
               slot.record->verdict == "passed";
    } else if (!slot.error.empty()) {
      all_ok = false;
      any_fault = any_fault || slot.harness_fault;
    } else {
      all_ok = false;  // skipped after interrupt
    }
  }

  if (detail::g_interrupted.load())
    err << "interrupted; " << done << "/" << dirs.size()
        << " tasks recorded in " << log_path.string() << "\n";
  out << "wrote " << done << " record(s) to " << log_path.string() << "\n";
  if (any_fault) return kExitHarness;
  return all_ok ? kExitOk : kExitTaskFailure;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  Config cfg = detail::load_config_or_default(args.config_path);
  Executor executor(cfg.executor_options());
  std::vector<ResultRecord> records = read_records(args.results_path);
  if (records.empty())
    throw Error(Errc::EmptyResults, "no records in " + args.results_path);
  const std::filesystem::path out_dir =
      std::filesystem::path(args.results_path).parent_path();

  std::map<std::string, std::filesystem::path> by_id;
  for (const auto& dir : discover_tasks(args.tasks_root)) {
    try {
      by_id[load_task(dir).id()] = dir;
    } catch (const Error& e) {
      err << "skipping " << dir.string() << ": " << e.what() << "\n";
    }
  }

  std::vector<SampleOutcome> outcomes;
  bool any_fault = false;
  for (const auto& rec : records) {
    SampleOutcome oc;
    oc.id = rec.task_id;
    auto it = by_id.find(rec.task_id);
    if (it == by_id.end()) {
      err << "task " << rec.task_id << ": not found under " << args.tasks_root
          << "\n";
      oc.compiled = false;
      outcomes.push_back(std::move(oc));
      continue;
    }
    try {
      TranslationTask task = load_task(it->second);
      std::optional<SourceProgram> program;
      if (!rec.final_program_blob.empty()) {
        program = SourceProgram(rec.task_id + ".out", task.target_language(),
                                read_blob(out_dir, rec.final_program_blob));
      } else if (!rec.final_program_path.empty()) {
        program = SourceProgram(rec.task_id + ".out", task.target_language(),
                                util::read_file(rec.final_program_path));
      }
      Verification v = verify_translation(executor, task, program);
      oc = v.outcome;
      const std::string verdict = sample_correct(oc)
                                      ? "passed"
                                      : failure_category_name(categorize_failure(oc));
      out << "task " << rec.task_id << ": " << verdict;
      if (verdict != rec.verdict)
        out << " (logged as " << rec.verdict << ")";
      out << "\n";
    } catch (const Error& e) {
      err << "task " << rec.task_id << ": " << e.what() << "\n";
      any_fault = any_fault || e.code() == Errc::HarnessFault ||
                  e.code() == Errc::ToolchainMissing;
      oc.compiled = false;
    }
    outcomes.push_back(std::move(oc));
  }

  const double ca = compute_ca(outcomes);
  out << "computational accuracy: " << detail::fmt_ca(ca) << " ("
      << outcomes.size() << " samples)\n";
  if (any_fault) return kExitHarness;
  return ca >= 1.0 ? kExitOk : kExitTaskFailure;
}

// ---------------------------------------------------------------------------
// dedup
// ---------------------------------------------------------------------------

inline int run_dedup(const DedupArgs& args, std::ostream& out, std::ostream&) {
  std::vector<DedupDoc> docs;
  std::vector<std::string> labels;
  const std::filesystem::path root = args.input_path;
  if (!std::filesystem::is_directory(root))
    throw Error(Errc::IoError, root.string() + " is not a directory");

  std::vector<std::filesystem::path> task_dirs;
  try {
    task_dirs = discover_tasks(root);
  } catch (const Error&) {
    task_dirs.clear();
  }
  if (!task_dirs.empty()) {
    for (const auto& dir : task_dirs) {
      TranslationTask task = load_task(dir);
      docs.push_back({task.id(), task.source().text()});
      labels.push_back(dir.string());
    }
  } else {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension();
      if (ext == ".cpp" || ext == ".java" || ext == ".py")
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      docs.push_back({f.stem().string(), util::read_file(f.string())});
      labels.push_back(f.string());
    }
  }
  if (docs.empty())
    throw Error(Errc::EmptyResults, "no programs found under " + root.string());

  DedupResult result = dedup_and_cluster(docs, args.threshold);

  if (args.as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& cluster : result.clusters) {
      nlohmann::json c;
      c["representative"] = labels[cluster.representative];
      c["members"] = nlohmann::json::array();
      for (size_t m : cluster.members) c["members"].push_back(labels[m]);
      j.push_back(std::move(c));
    }
    out << j.dump(2) << "\n";
  } else {
    out << docs.size() << " program(s), " << result.clusters.size()
        << " cluster(s), threshold " << args.threshold << "\n";
    for (size_t c = 0; c < result.clusters.size(); ++c) {
      const auto& cluster = result.clusters[c];
      out << "cluster " << c << " (" << cluster.members.size() << "): keep "
          << labels[cluster.representative] << "\n";
      for (size_t m : cluster.members)
        if (m != cluster.representative) out << "  drop " << labels[m] << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

inline int run_report(const ReportArgs& args, std::ostream& out, std::ostream&) {
  std::vector<ResultRecord> records = read_records(args.results_path);
  Report rep = build_report(records);
  if (args.as_csv)
    out << render_report_csv(rep);
  else
    out << (args.buckets_only ? render_bucket_table(rep) : render_report_text(rep));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int run_command(const Command& command, std::ostream& out,
                       std::ostream& err) {
  try {
    if (const auto* t = std::get_if<TranslateArgs>(&command))
      return run_translate(*t, out, err);
    if (const auto* e = std::get_if<EvalArgs>(&command))
      return run_eval(*e, out, err);
    if (const auto* d = std::get_if<DedupArgs>(&command))
      return run_dedup(*d, out, err);
    return run_report(std::get<ReportArgs>(command), out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << errc_name(e.code()) << "]\n";
    return detail::exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitHarness;
  }
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  ParseOutcome parsed = parse_args(args);
  if (!parsed.command) {
    (parsed.exit_code == kExitOk ? std::cout : std::cerr) << parsed.message << "\n";
    return parsed.exit_code;
  }
  return run_command(*parsed.command, std::cout, std::cerr);
}

}  // namespace past

#endif  // PAST_CLI_HPP
