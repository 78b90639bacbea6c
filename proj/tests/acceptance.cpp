// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Release gate. Each check prints exactly one [PASS]/[FAIL] line (plus [SKIP]
// lines for legs that need a toolchain the host lacks) and the process exits
// nonzero when anything failed. Checks that cannot run their full input space
// say in their output line what was actually covered.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "past/align.hpp"
#include "past/bench.hpp"
#include "past/cli.hpp"
#include "past/core.hpp"
#include "past/executor.hpp"
#include "past/instrument.hpp"
#include "past/llm.hpp"
#include "past/pipeline.hpp"
#include "past/report.hpp"
#include "past/resultlog.hpp"
#include "past/task_io.hpp"
#include "past/util.hpp"

using namespace past;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void pass(int idx, const std::string& text) {
  std::cout << "[PASS] " << idx << ". " << text << std::endl;
}
void fail(int idx, const std::string& text) {
  std::cout << "[FAIL] " << idx << ". " << text << std::endl;
  ++g_failures;
}
void skip(int idx, const std::string& text) {
  std::cout << "[SKIP] " << idx << ". " << text << std::endl;
}

struct Timer {
  Clock::time_point t0 = Clock::now();
  long ms() const {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
        Clock::now() - t0).count());
  }
};

fs::path scratch_dir() {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("past_accept_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

// ---------------------------------------------------------------------------
// 1. instrumentation round trip
// ---------------------------------------------------------------------------

std::string random_program_text(std::mt19937& rng) {
  std::uniform_int_distribution<int> nlines(1, 40);
  std::uniform_int_distribution<int> shape(0, 4);
  std::uniform_int_distribution<int> num(0, 99);
  const int n = nlines(rng);
  std::string text;
  for (int i = 0; i < n; ++i) {
    switch (shape(rng)) {
      case 0:
        text += "x" + std::to_string(num(rng)) + " = x" + std::to_string(num(rng)) +
                " + " + std::to_string(num(rng));
        break;
      case 1:
        text += "if (x" + std::to_string(num(rng)) + " > " +
                std::to_string(num(rng)) + ") {";
        break;
      case 2:
        text += "}";
        break;
      case 3:
        text += "    call_helper(x" + std::to_string(num(rng)) + ");";
        break;
      default:
        text += "// step " + std::to_string(num(rng));
        break;
    }
    text += "\n";
  }
  return text;
}

std::string trace_print_line(const Language& lang, int tag) {
  const std::string t = std::to_string(tag);
  switch (lang.tag) {
    case LanguageTag::CPP:
      return "std::cout << \"PAST_TRACE|step " + t +
             ": v = \" << v << std::endl; // PAST-INSTR";
    case LanguageTag::JAVA:
      return "System.out.println(\"PAST_TRACE|step " + t +
             ": v = \" + v); // PAST-INSTR";
    default:
      return "print(\"PAST_TRACE|step " + t + ": v = \" + str(v), flush=True)"
             "  # PAST-INSTR";
  }
}

void criterion_instrument_round_trip() {
  Timer timer;
  std::mt19937 rng(20260825);
  const LanguageTag tags[] = {LanguageTag::CPP, LanguageTag::JAVA,
                              LanguageTag::PYTHON};
  const int kIterations = 500;
  int ok = 0;
  for (int iter = 0; iter < kIterations; ++iter) {
    const Language& lang = language(tags[iter % 3]);
    const std::string original_text = random_program_text(rng);
    SourceProgram original("fixture" + std::to_string(iter), lang, original_text);

    std::vector<std::string> lines = util::split_lines(original_text);
    std::uniform_int_distribution<size_t> slot(0, lines.size());
    std::uniform_int_distribution<int> count(1, 5);
    const int k = count(rng);
    std::vector<size_t> slots;
    for (int j = 0; j < k; ++j) slots.push_back(slot(rng));
    std::sort(slots.begin(), slots.end());

    std::string candidate;
    size_t next = 0;
    int tag = 0;
    for (size_t i = 0; i <= lines.size(); ++i) {
      while (next < slots.size() && slots[next] == i) {
        candidate += trace_print_line(lang, tag++) + "\n";
        ++next;
      }
      if (i < lines.size()) candidate += lines[i] + "\n";
    }

    InstrumentedProgram instrumented = validate_instrumented(original, candidate);
    if (remove_instrumentation(instrumented).text() == original_text) ++ok;
  }
  const long ms = timer.ms();
  std::ostringstream line;
  line << "instrumentation round trip: " << ok << "/" << kIterations
       << " randomized fixtures byte-identical across C++/Java/Python in "
       << ms << " ms";
  if (ok == kIterations && ms < 5000)
    pass(1, line.str());
  else
    fail(1, line.str());
}

// ---------------------------------------------------------------------------
// 2. trace line grammar
// ---------------------------------------------------------------------------

void criterion_trace_grammar() {
  struct ValidCase {
    std::string line, description, name, value;
  };
  const std::vector<ValidCase> valid = {
      {"PAST_TRACE|after loop: total = 42", "after loop", "total", "42"},
      {"PAST_TRACE|before return: expr = a = b", "before return", "expr", "a = b"},
      {"PAST_TRACE|a: b: c = 1", "a", "b: c", "1"},
      {"PAST_TRACE|d: x = ", "d", "x", ""},
      {"PAST_TRACE|d: x =  y", "d", "x", " y"},
      {"PAST_TRACE|step 3: arr[0] = [1, 2]", "step 3", "arr[0]", "[1, 2]"},
      {"PAST_TRACE|x: y = a = b = c", "x", "y", "a = b = c"},
      {"PAST_TRACE|desc with spaces: name_1 = -7", "desc with spaces", "name_1", "-7"},
      {"PAST_TRACE|p: q = =", "p", "q", "="},
      {"PAST_TRACE|loop iter: s = hello world", "loop iter", "s", "hello world"},
      {"PAST_TRACE|f: g = None", "f", "g", "None"},
      {"PAST_TRACE|m: n = 3.14", "m", "n", "3.14"},
  };
  const std::vector<std::string> malformed = {
      "PAST_TRACE|no colon here = 5", "PAST_TRACE|d: noequals",
      "PAST_TRACE|: x = 1",           "PAST_TRACE|d: = 1",
      "PAST_TRACE|d:  = 1",           "PAST_TRACE|d: a=b = 1",
      "PAST_TRACE|d: x=1",            "PAST_TRACE|desc: name =value",
  };

  int crafted_ok = 0;
  for (const auto& c : valid) {
    try {
      std::optional<TraceEvent> ev = parse_trace_line(c.line);
      if (ev && ev->description == c.description && ev->variable_name == c.name &&
          ev->rendered_value == c.value)
        ++crafted_ok;
    } catch (const Error&) {
    }
  }
  for (const auto& line : malformed) {
    try {
      parse_trace_line(line);
    } catch (const Error& e) {
      if (e.code() == Errc::MalformedTrace) ++crafted_ok;
    }
  }

  std::mt19937 rng(424242);
  std::uniform_int_distribution<int> len(0, 120);
  std::uniform_int_distribution<int> ch(32, 126);
  int rejected = 0;
  const int kFuzz = 1000;
  for (int i = 0; i < kFuzz; ++i) {
    std::string line;
    const int n = len(rng);
    for (int j = 0; j < n; ++j) line.push_back(static_cast<char>(ch(rng)));
    size_t at;
    while ((at = line.find("PAST_TRACE|")) != std::string::npos)
      line.erase(at, 1);  // keep the fuzz sentinel-free
    try {
      if (!parse_trace_line(line).has_value()) ++rejected;
    } catch (const Error&) {
    }
  }

  std::ostringstream line;
  line << "trace grammar: " << crafted_ok << "/" << valid.size() + malformed.size()
       << " crafted cases match hand-derived expectations, " << rejected << "/"
       << kFuzz << " sentinel-free fuzz lines rejected";
  if (crafted_ok == static_cast<int>(valid.size() + malformed.size()) &&
      rejected == kFuzz)
    pass(2, line.str());
  else
    fail(2, line.str());
}

// ---------------------------------------------------------------------------
// 3. line diff vs. LCS oracle
// ---------------------------------------------------------------------------

size_t lcs_oracle(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  std::vector<std::vector<size_t>> dp(a.size() + 1,
                                      std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i)
    for (size_t j = 1; j <= b.size(); ++j)
      dp[i][j] = a[i - 1] == b[j - 1] ? dp[i - 1][j - 1] + 1
                                      : std::max(dp[i - 1][j], dp[i][j - 1]);
  return dp[a.size()][b.size()];
}

std::string to_text(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += "\n";
  }
  return out;
}

void criterion_diff_oracle() {
  Timer timer;
  const std::vector<std::string> alphabet = {"a", "b", "c"};

  // Every sequence of length <= 5 over three symbols.
  std::vector<std::vector<std::string>> seqs = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (int l = 0; l < 5; ++l) {
    std::vector<std::vector<std::string>> next;
    for (const auto& s : frontier)
      for (const auto& sym : alphabet) {
        auto t = s;
        t.push_back(sym);
        next.push_back(t);
        seqs.push_back(t);
      }
    frontier = std::move(next);
  }

  size_t exhaustive_pairs = 0, mismatches = 0;
  for (const auto& a : seqs)
    for (const auto& b : seqs) {
      ++exhaustive_pairs;
      if (diff_by_line(to_text(a), to_text(b)).equal_count() != lcs_oracle(a, b))
        ++mismatches;
    }

  std::mt19937 rng(31415926);
  auto random_seq = [&](size_t max_len, size_t alpha) {
    std::uniform_int_distribution<size_t> len(0, max_len);
    std::uniform_int_distribution<size_t> sym(0, alpha - 1);
    std::vector<std::string> s(len(rng));
    for (auto& x : s) x = std::string(1, static_cast<char>('a' + sym(rng)));
    return s;
  };

  const int kMedium = 100000;
  for (int i = 0; i < kMedium; ++i) {
    auto a = random_seq(12, 3), b = random_seq(12, 3);
    if (diff_by_line(to_text(a), to_text(b)).equal_count() != lcs_oracle(a, b))
      ++mismatches;
  }
  const int kLarge = 1000;
  for (int i = 0; i < kLarge; ++i) {
    auto a = random_seq(50, 4), b = random_seq(50, 4);
    if (diff_by_line(to_text(a), to_text(b)).equal_count() != lcs_oracle(a, b))
      ++mismatches;
  }

  const long ms = timer.ms();
  std::ostringstream line;
  line << "diff EQUAL count equals the LCS oracle: exhaustive on all "
       << exhaustive_pairs << " pairs of length <= 5 over 3 symbols, " << kMedium
       << " random pairs of length <= 12, " << kLarge
       << " random pairs of length <= 50; " << mismatches << " mismatches in "
       << ms << " ms";
  if (mismatches == 0 && ms < 30000)
    pass(3, line.str());
  else
    fail(3, line.str());
}

// ---------------------------------------------------------------------------
// 4. executor outcome classification
// ---------------------------------------------------------------------------

struct ExecFixture {
  std::string name;
  std::string text;
  std::string stdin_payload;
  std::string expected_stdout;  // for the passing program
  enum Kind { PASS, COMPILE_ERROR, RUNTIME_ERROR, TIMEOUT } kind;
};

std::vector<ExecFixture> exec_fixtures(LanguageTag tag) {
  switch (tag) {
    case LanguageTag::CPP:
      return {
          {"cpp pass",
           "#include <iostream>\nint main(){int x;std::cin>>x;std::cout<<2*x<<\"\\n\";}\n",
           "21\n", "42\n", ExecFixture::PASS},
          {"cpp compile error", "int main( { this does not parse\n", "", "",
           ExecFixture::COMPILE_ERROR},
          {"cpp runtime error", "int main(){return 3;}\n", "", "",
           ExecFixture::RUNTIME_ERROR},
          {"cpp timeout",
           "#include <chrono>\n#include <thread>\nint main(){"
           "std::this_thread::sleep_for(std::chrono::seconds(30));}\n",
           "", "", ExecFixture::TIMEOUT},
      };
    case LanguageTag::PYTHON:
      return {
          {"python pass", "x = int(input())\nprint(2 * x)\n", "21\n", "42\n",
           ExecFixture::PASS},
          {"python compile error", "def broken(:\n    pass\n", "", "",
           ExecFixture::COMPILE_ERROR},
          {"python runtime error", "raise RuntimeError('boom')\n", "", "",
           ExecFixture::RUNTIME_ERROR},
          {"python timeout", "import time\ntime.sleep(30)\n", "", "",
           ExecFixture::TIMEOUT},
      };
    default:
      return {
          {"java pass",
           "import java.util.Scanner;\npublic class Main {\n"
           "    public static void main(String[] args) {\n"
           "        Scanner sc = new Scanner(System.in);\n"
           "        System.out.println(2 * sc.nextInt());\n    }\n}\n",
           "21\n", "42\n", ExecFixture::PASS},
          {"java compile error", "public class Main { this does not parse\n", "",
           "", ExecFixture::COMPILE_ERROR},
          {"java runtime error",
           "public class Main {\n    public static void main(String[] args) {\n"
           "        throw new RuntimeException(\"boom\");\n    }\n}\n",
           "", "", ExecFixture::RUNTIME_ERROR},
          {"java timeout",
           "public class Main {\n    public static void main(String[] args)"
           " throws Exception {\n        Thread.sleep(30000);\n    }\n}\n",
           "", "", ExecFixture::TIMEOUT},
      };
  }
}

void criterion_executor_classification() {
  Executor executor;  // default limits: 10 s run timeout, 1 MiB output cap
  const long limit_ms = 10000;
  int total = 0, ok = 0;
  long worst_timeout_ms = 0;
  std::vector<std::string> wrong;
  const LanguageTag tags[] = {LanguageTag::CPP, LanguageTag::JAVA,
                              LanguageTag::PYTHON};
  int languages_run = 0;
  for (LanguageTag tag : tags) {
    if (!executor.toolchain_available(tag)) {
      skip(4, std::string("executor classification: ") +
                  std::string(language(tag).display_name) +
                  " fixtures (toolchain not on PATH)");
      continue;
    }
    ++languages_run;
    int n = 0;
    for (const auto& f : exec_fixtures(tag)) {
      ++total;
      SourceProgram prog("exec" + std::to_string(n++), language(tag), f.text);
      Prepared prep = executor.prepare(prog);
      bool good = false;
      switch (f.kind) {
        case ExecFixture::COMPILE_ERROR:
          good = !prep.ok;
          break;
        case ExecFixture::PASS: {
          if (prep.ok)
            good = classify_run(executor.run(prep, f.stdin_payload),
                                f.expected_stdout) == TestStatus::PASSED;
          break;
        }
        case ExecFixture::RUNTIME_ERROR: {
          if (prep.ok) {
            ExecutionOutcome out = executor.run(prep, f.stdin_payload);
            good = !out.ran_ok() && !out.timed_out &&
                   classify_run(out, "") == TestStatus::RUNTIME_ERROR;
          }
          break;
        }
        case ExecFixture::TIMEOUT: {
          if (prep.ok) {
            ExecutionOutcome out = executor.run(prep, f.stdin_payload);
            worst_timeout_ms = std::max(worst_timeout_ms, static_cast<long>(out.wall_ms));
            good = out.timed_out && out.wall_ms <= limit_ms + 1000 &&
                   classify_run(out, "") == TestStatus::RUNTIME_ERROR;
          }
          break;
        }
      }
      if (good)
        ++ok;
      else
        wrong.push_back(f.name);
    }
  }
  std::ostringstream line;
  line << "executor classification: " << ok << "/" << total
       << " fixtures classified correctly over " << languages_run
       << " available toolchain(s); slowest timeout run " << worst_timeout_ms
       << " ms (limit " << limit_ms << " + 1000)";
  if (!wrong.empty()) {
    line << "; wrong:";
    for (const auto& w : wrong) line << " [" << w << "]";
  }
  if (ok == total && total > 0)
    pass(4, line.str());
  else
    fail(4, line.str());
}

// ---------------------------------------------------------------------------
// 5. pipeline stage scenarios
// ---------------------------------------------------------------------------

const std::string kCppSum =
    "#include <iostream>\n"
    "int main() {\n"
    "  long n;\n"
    "  std::cin >> n;\n"
    "  long total = 0;\n"
    "  for (long i = 1; i <= n; ++i) total += i;\n"
    "  std::cout << total << std::endl;\n"
    "  return 0;\n"
    "}\n";

const std::string kCppSumInstr =
    "#include <iostream>\n"
    "int main() {\n"
    "  long n;\n"
    "  std::cin >> n;\n"
    "  long total = 0;\n"
    "  for (long i = 1; i <= n; ++i) total += i;\n"
    "  std::cout << \"PAST_TRACE|after summation loop: total = \" << total << "
    "std::endl; // PAST-INSTR\n"
    "  std::cout << total << std::endl;\n"
    "  return 0;\n"
    "}\n";

const std::string kPySumGood =
    "n = int(input())\n"
    "total = 0\n"
    "for i in range(1, n + 1):\n"
    "    total += i\n"
    "print(\"PAST_TRACE|after summation loop: total = \" + str(total))  # "
    "PAST-INSTR\n"
    "print(total)\n";

const std::string kPySumBuggy =
    "n = int(input())\n"
    "total = 0\n"
    "for i in range(1, n + 1):\n"
    "    total += i * i\n"
    "print(\"PAST_TRACE|after summation loop: total = \" + str(total))  # "
    "PAST-INSTR\n"
    "print(total)\n";

const std::string kPyMax =
    "data = input().split()\n"
    "n = int(data[0])\n"
    "vals = [int(x) for x in data[1:1 + n]]\n"
    "best = vals[0]\n"
    "for v in vals:\n"
    "    if v > best:\n"
    "        best = v\n"
    "print(best)\n";

const std::string kPyMaxInstr =
    "data = input().split()\n"
    "n = int(data[0])\n"
    "vals = [int(x) for x in data[1:1 + n]]\n"
    "best = vals[0]\n"
    "for v in vals:\n"
    "    if v > best:\n"
    "        best = v\n"
    "print(\"PAST_TRACE|after scan: best = \" + str(best))  # PAST-INSTR\n"
    "print(best)\n";

// Classic porting bug: `best` declared unsigned, so the signed comparison
// promotes negative candidates to huge values and the maximum of a negative
// list comes out wrong.
const std::string kCppMaxBuggy =
    "#include <iostream>\n"
    "#include <vector>\n"
    "int main() {\n"
    "  int n;\n"
    "  std::cin >> n;\n"
    "  std::vector<int> vals(n);\n"
    "  for (int i = 0; i < n; ++i) std::cin >> vals[i];\n"
    "  unsigned best = vals[0];\n"
    "  for (int i = 1; i < n; ++i)\n"
    "    if (vals[i] > best) best = vals[i];\n"
    "  std::cout << \"PAST_TRACE|after scan: best = \" << best << std::endl; // "
    "PAST-INSTR\n"
    "  std::cout << best << std::endl;\n"
    "  return 0;\n"
    "}\n";

const std::string kCppMaxFixed =
    "#include <iostream>\n"
    "#include <vector>\n"
    "int main() {\n"
    "  int n;\n"
    "  std::cin >> n;\n"
    "  std::vector<int> vals(n);\n"
    "  for (int i = 0; i < n; ++i) std::cin >> vals[i];\n"
    "  long best = vals[0];\n"
    "  for (int i = 1; i < n; ++i)\n"
    "    if (vals[i] > best) best = vals[i];\n"
    "  std::cout << \"PAST_TRACE|after scan: best = \" << best << std::endl; // "
    "PAST-INSTR\n"
    "  std::cout << best << std::endl;\n"
    "  return 0;\n"
    "}\n";

const std::string kInstrMark = "Insert only whole new print lines";
const std::string kTranslateCppPy = "Translate the following C++ program into Python";
const std::string kTranslatePyCpp = "Translate the following Python program into C++";
const std::string kRepairMark = "but the translation misbehaves";
const std::string kLocalizeMark = "Identify the smallest contiguous region";
const std::string kSnippetMark = "It will replace a faulty region";

std::string reply_with(std::string_view code) {
  return "Here you go.\n" + fenced(code) + "\n";
}

bool sentinel_free(const PipelineResult& result) {
  if (!result.final_program) return false;
  const std::string& text = result.final_program->text();
  return text.find(kTraceSentinel) == std::string::npos &&
         text.find(kMarkerToken) == std::string::npos;
}

void criterion_pipeline_scenarios() {
  Executor executor;
  if (!executor.toolchain_available(LanguageTag::CPP) ||
      !executor.toolchain_available(LanguageTag::PYTHON)) {
    fail(5, "pipeline scenarios: need both the C++ and Python toolchains");
    return;
  }
  auto sum_task = [&] {
    return TranslationTask(
        SourceProgram("sum", language(LanguageTag::CPP), kCppSum),
        language(LanguageTag::PYTHON),
        {{"t1", "3\n", TestVisibility::PUBLIC}, {"t2", "10\n", TestVisibility::PUBLIC}},
        {});
  };
  std::vector<std::string> problems;

  auto expect_scenario = [&](const char* label, std::vector<MockRule> rules,
                             Stage stage, size_t attempts) {
    MockBackend mock(std::move(rules));
    Pipeline pipeline(mock, executor);
    PipelineResult r = pipeline.run(sum_task());
    if (!r.success || r.final_stage != stage || r.attempts.size() != attempts ||
        !sentinel_free(r))
      problems.push_back(std::string(label) + " (success=" +
                         (r.success ? "yes" : "no") + ", stage=" +
                         std::string(stage_name(r.final_stage)) + ", attempts=" +
                         std::to_string(r.attempts.size()) + ")");
  };

  expect_scenario("translation",
                  {{kInstrMark, reply_with(kCppSumInstr)},
                   {kTranslateCppPy, reply_with(kPySumGood)}},
                  Stage::TRANSLATION, 1);
  expect_scenario("direct repair",
                  {{kInstrMark, reply_with(kCppSumInstr)},
                   {kTranslateCppPy, reply_with(kPySumBuggy)},
                   {kRepairMark, reply_with(kPySumGood)}},
                  Stage::DIRECT_REPAIR, 2);
  const std::string localize_reply =
      "The accumulation line is wrong.\n" + fenced("    total += i * i") +
      "\nMatching source region:\n" +
      fenced("  for (long i = 1; i <= n; ++i) total += i;") + "\n";
  expect_scenario("localize and re-translate",
                  {{kInstrMark, reply_with(kCppSumInstr)},
                   {kTranslateCppPy, reply_with(kPySumBuggy)},
                   {kRepairMark, reply_with(kPySumBuggy)},
                   {kLocalizeMark, localize_reply},
                   {kSnippetMark, reply_with("    total += i")}},
                  Stage::LOCALIZE_RETRANSLATE, 3);

  // A signed/unsigned comparison bug in a Python -> C++ translation, repaired
  // by the scripted direct-repair reply, must pass all private tests.
  {
    TranslationTask task(
        SourceProgram("maxval", language(LanguageTag::PYTHON), kPyMax),
        language(LanguageTag::CPP),
        {{"t1", "3 -5 -2 -9\n", TestVisibility::PUBLIC},
         {"t2", "4 7 3 9 2\n", TestVisibility::PUBLIC}},
        {{"p1", "5 -10 -20 -30 -40 -50\n", TestVisibility::PRIVATE},
         {"p2", "1 -7\n", TestVisibility::PRIVATE}});
    MockBackend mock({{kInstrMark, reply_with(kPyMaxInstr)},
                      {kTranslatePyCpp, reply_with(kCppMaxBuggy)},
                      {kRepairMark, reply_with(kCppMaxFixed)}});
    Pipeline pipeline(mock, executor);
    PipelineResult r = pipeline.run(task);
    bool private_pass = r.verification && r.verification->used_private_tests &&
                        r.verification->outcome.compiled &&
                        !r.verification->outcome.tests.empty();
    if (private_pass)
      for (TestStatus s : r.verification->outcome.tests)
        private_pass = private_pass && s == TestStatus::PASSED;
    if (!r.success || r.final_stage != Stage::DIRECT_REPAIR ||
        r.attempts.size() != 2 || !sentinel_free(r) || !private_pass ||
        r.private_verdict != FailureCategory::NONE)
      problems.push_back("signed/unsigned repair (success=" +
                         std::string(r.success ? "yes" : "no") + ", stage=" +
                         std::string(stage_name(r.final_stage)) +
                         ", attempts=" + std::to_string(r.attempts.size()) + ")");
  }

  if (problems.empty()) {
    pass(5,
         "pipeline scenarios stop at TRANSLATION/DIRECT_REPAIR/"
         "LOCALIZE_RETRANSLATE with attempt logs 1/2/3, aligned and "
         "sentinel-free; signed/unsigned bug repaired and all private tests pass");
  } else {
    std::string msg = "pipeline scenarios:";
    for (const auto& p : problems) msg += " " + p + ";";
    fail(5, msg);
  }
}

// ---------------------------------------------------------------------------
// 6. computational accuracy and failure taxonomy
// ---------------------------------------------------------------------------

double ca_oracle(const std::vector<SampleOutcome>& samples) {
  size_t good = 0;
  for (const auto& s : samples) {
    bool all = s.compiled && !s.tests.empty();
    for (TestStatus t : s.tests) all = all && t == TestStatus::PASSED;
    if (all) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(samples.size());
}

void criterion_ca_and_taxonomy() {
  const TestStatus kStatuses[] = {TestStatus::PASSED, TestStatus::WRONG_ANSWER,
                                  TestStatus::RUNTIME_ERROR};
  size_t assignments = 0, ca_mismatches = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int t = 1; t <= 3; ++t) {
      // Per-sample states: not compiled, or compiled with one of 3^t status
      // vectors. Enumerate all state tuples by mixed-radix counting.
      size_t per_sample = 1;
      for (int k = 0; k < t; ++k) per_sample *= 3;
      per_sample += 1;  // the "did not compile" state
      std::vector<size_t> digits(static_cast<size_t>(n), 0);
      for (;;) {
        std::vector<SampleOutcome> samples;
        for (int s = 0; s < n; ++s) {
          SampleOutcome oc;
          oc.id = "s" + std::to_string(s);
          size_t code = digits[static_cast<size_t>(s)];
          if (code == 0) {
            oc.compiled = false;
          } else {
            oc.compiled = true;
            size_t rest = code - 1;
            for (int k = 0; k < t; ++k) {
              oc.tests.push_back(kStatuses[rest % 3]);
              rest /= 3;
            }
          }
          samples.push_back(std::move(oc));
        }
        ++assignments;
        if (compute_ca(samples) != ca_oracle(samples)) ++ca_mismatches;
        // increment
        size_t i = 0;
        while (i < digits.size() && ++digits[i] == per_sample) digits[i++] = 0;
        if (i == digits.size()) break;
      }
    }
  }

  // Hand-labeled taxonomy fixture (P = passed, W = wrong answer, R = runtime
  // error; "!" marks a sample that did not compile).
  struct Labeled {
    bool compiled;
    std::string statuses;
    FailureCategory expected;
  };
  const FailureCategory CE = FailureCategory::COMPILATION_ERROR;
  const FailureCategory RA = FailureCategory::RUNTIME_ERROR_ALL;
  const FailureCategory RS = FailureCategory::RUNTIME_ERROR_SOME;
  const FailureCategory WA = FailureCategory::WRONG_ANSWER_ALL;
  const FailureCategory WS = FailureCategory::WRONG_ANSWER_SOME;
  const FailureCategory OK = FailureCategory::NONE;
  const std::vector<Labeled> labeled = {
      {false, "", CE},    {false, "W", CE},   {false, "RP", CE},
      {true, "R", RA},    {true, "RR", RA},   {true, "RRR", RA},
      {true, "RP", RS},   {true, "PRP", RS},  {true, "WR", RS},
      {true, "RWP", RS},  {true, "WWR", RS},  {true, "RRW", RS},
      {true, "WRR", RS},  {true, "RPR", RS},  {true, "PRR", RS},
      {true, "RRP", RS},  {true, "RWW", RS},  {true, "W", WA},
      {true, "WW", WA},   {true, "WWW", WA},  {true, "WP", WS},
      {true, "PWP", WS},  {true, "PPW", WS},  {true, "WPW", WS},
      {true, "PWW", WS},  {true, "WWP", WS},  {true, "P", OK},
      {true, "PP", OK},   {true, "PPP", OK},  {true, "RW", RS},
  };
  size_t taxonomy_ok = 0;
  for (const auto& c : labeled) {
    SampleOutcome oc;
    oc.id = "labeled";
    oc.compiled = c.compiled;
    for (char ch : c.statuses)
      oc.tests.push_back(ch == 'P' ? TestStatus::PASSED
                         : ch == 'W' ? TestStatus::WRONG_ANSWER
                                     : TestStatus::RUNTIME_ERROR);
    if (categorize_failure(oc) == c.expected) ++taxonomy_ok;
  }

  std::ostringstream line;
  line << "computational accuracy matches a brute-force oracle on " << assignments
       << " exhaustive status assignments (<= 4 samples x <= 3 tests, exact), "
       << "and " << taxonomy_ok << "/" << labeled.size()
       << " hand-labeled samples categorize correctly";
  if (ca_mismatches == 0 && taxonomy_ok == labeled.size())
    pass(6, line.str());
  else
    fail(6, line.str());
}

// ---------------------------------------------------------------------------
// 7. MinHash similarity
// ---------------------------------------------------------------------------

double jaccard_exact(const std::string& a, const std::string& b) {
  auto shingles = [](const std::string& text) {
    std::set<std::string> out;
    std::vector<std::string_view> toks = tokenize(text);
    for (size_t s = 0; s + kShingleSize <= toks.size(); ++s) {
      std::string sh;
      for (size_t k = 0; k < kShingleSize; ++k) {
        if (k) sh.push_back('\x1f');
        sh.append(toks[s + k]);
      }
      out.insert(std::move(sh));
    }
    return out;
  };
  std::set<std::string> sa = shingles(a), sb = shingles(b);
  size_t inter = 0;
  for (const auto& s : sa) inter += sb.count(s);
  const size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

void criterion_minhash() {
  std::mt19937 rng(20260401);
  std::uniform_int_distribution<int> word(0, 49);
  std::uniform_int_distribution<int> doc_len(60, 199);
  auto make_doc = [&](int len) {
    std::string text;
    for (int i = 0; i < len; ++i) {
      if (i) text.push_back(' ');
      text += "w" + std::to_string(word(rng));
    }
    return text;
  };

  int within = 0;
  const int kPairs = 100;
  for (int p = 0; p < kPairs; ++p) {
    const int len = doc_len(rng);
    std::string a = make_doc(len);
    // Mutate a copy token-by-token at a rate that sweeps 0 .. 27 %.
    std::vector<std::string_view> toks = tokenize(a);
    const double rate = (p % 10) * 0.03;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::string b;
    for (size_t i = 0; i < toks.size(); ++i) {
      if (i) b.push_back(' ');
      if (coin(rng) < rate)
        b += "m" + std::to_string(word(rng));
      else
        b.append(toks[i]);
    }
    const double est = estimate_similarity(minhash_signature(a), minhash_signature(b));
    if (std::abs(est - jaccard_exact(a, b)) <= 0.06) ++within;
  }

  const std::string doc = make_doc(120);
  const bool identical_exact =
      estimate_similarity(minhash_signature(doc), minhash_signature(doc)) == 1.0;

  // A 200-token document with one token changed sits at Jaccard 191/201 =
  // 0.950 and must merge at the 0.85 threshold.
  std::string orig = make_doc(200);
  std::vector<std::string_view> toks = tokenize(orig);
  std::string near;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) near.push_back(' ');
    if (i == 100)
      near += "zzz";
    else
      near.append(toks[i]);
  }
  DedupResult dd = dedup_and_cluster({{"orig", orig}, {"near", near}}, 0.85);
  const bool merged = dd.clusters.size() == 1;

  std::ostringstream line;
  line << "minhash: " << within << "/" << kPairs
       << " random pairs within 0.06 of exact Jaccard (need >= 95), identical "
          "docs estimate exactly 1.0: "
       << (identical_exact ? "yes" : "no")
       << ", one-token-in-200 near-duplicate merges at 0.85: "
       << (merged ? "yes" : "no");
  if (within >= 95 && identical_exact && merged)
    pass(7, line.str());
  else
    fail(7, line.str());
}

// ---------------------------------------------------------------------------
// 8. source length buckets
// ---------------------------------------------------------------------------

void criterion_buckets() {
  const std::vector<std::pair<size_t, std::string>> cases = {
      {255, "<256"},      {256, "256-512"},  {512, "512-1024"},
      {1024, "1024-2048"}, {2048, ">2048"},  {2049, ">2048"},
  };
  int ok = 0;
  for (const auto& [tokens, expected] : cases)
    if (std::string(bucket_name(tokens)) == expected) ++ok;
  std::ostringstream line;
  line << "length buckets: " << ok << "/" << cases.size()
       << " boundary token counts (255/256/512/1024/2048/2049) land in the "
          "expected buckets";
  if (ok == static_cast<int>(cases.size()))
    pass(8, line.str());
  else
    fail(8, line.str());
}

// ---------------------------------------------------------------------------
// 9. report rendering
// ---------------------------------------------------------------------------

ResultRecord report_record(const std::string& id, const std::string& src,
                           const std::string& tgt, bool compiled,
                           const std::vector<std::string>& statuses,
                           size_t tokens) {
  ResultRecord rec;
  rec.task_id = id;
  rec.source_language = src;
  rec.target_language = tgt;
  rec.compiled = compiled;
  rec.source_tokens = tokens;
  for (const auto& s : statuses)
    rec.verification_tests.push_back({id, s, s == "passed"});
  return rec;
}

void criterion_report_shape() {
  Timer timer;
  const fs::path base = scratch_dir();
  const fs::path log = base / "results.jsonl";
  append_record(log, report_record("r1", "cpp", "python", true,
                                   {"passed", "passed"}, 100));
  append_record(log, report_record("r2", "cpp", "python", true,
                                   {"wrong_answer", "wrong_answer"}, 300));
  append_record(log, report_record("r3", "python", "cpp", false, {}, 600));
  append_record(log, report_record("r4", "java", "python", true,
                                   {"passed", "runtime_error"}, 1500));
  append_record(log, report_record("r5", "python", "java", true,
                                   {"wrong_answer", "passed"}, 3000));
  append_record(log, report_record("r6", "cpp", "java", true,
                                   {"runtime_error", "runtime_error"}, 10));

  ReportArgs args;
  args.results_path = log.string();
  std::ostringstream out, err;
  const int rc = run_report(args, out, err);
  const std::string text = out.str();
  const std::vector<std::string> required = {
      "Computational accuracy", "cpp->python",  "overall",
      "Failure histogram",      "compilation error",
      "runtime error on all tests",  "runtime error on some tests",
      "wrong answer on all tests",   "wrong answer on some tests",
      "Accuracy by source length (tokens)"};
  size_t found = 0;
  for (const auto& r : required)
    if (text.find(r) != std::string::npos) ++found;
  const long ms = timer.ms();
  fs::remove_all(base);

  std::ostringstream line;
  line << "report shape: accuracy-by-pair table and five-category histogram "
          "with verbatim names ("
       << found << "/" << required.size() << " markers) in " << ms << " ms";
  if (rc == kExitOk && found == required.size() && ms < 1000)
    pass(9, line.str());
  else
    fail(9, line.str());
}

// ---------------------------------------------------------------------------
// 10. end-to-end with real toolchains and a perfect-translator script
// ---------------------------------------------------------------------------

void criterion_end_to_end() {
  Timer timer;
  const fs::path fixtures = fs::path(PAST_FIXTURE_DIR) / "e2e";
  Executor probe;
  const bool have_java = probe.toolchain_available(LanguageTag::JAVA);
  if (!probe.toolchain_available(LanguageTag::CPP) ||
      !probe.toolchain_available(LanguageTag::PYTHON)) {
    fail(10, "end to end: need both the C++ and Python toolchains");
    return;
  }

  std::vector<ResultRecord> records;
  bool run_ok = true;
  std::string detail;
  auto run_group = [&](const fs::path& tasks, const fs::path& script) {
    const fs::path out_dir = scratch_dir();
    TranslateArgs args;
    args.tasks_root = tasks.string();
    args.out_dir = out_dir.string();
    args.backend = "mock:" + script.string();
    std::ostringstream out, err;
    const int rc = run_translate(args, out, err);
    if (rc != kExitOk) {
      run_ok = false;
      detail += " " + tasks.filename().string() + " exited " +
                std::to_string(rc) + " (" + err.str() + ")";
    }
    for (auto& rec : read_records(out_dir / "results.jsonl"))
      records.push_back(std::move(rec));
    fs::remove_all(out_dir);
  };

  run_group(fixtures / "tasks_nojava", fixtures / "mock" / "nojava.json");
  if (have_java)
    run_group(fixtures / "tasks_java", fixtures / "mock" / "java.json");
  else
    skip(10,
         "end to end: java-pair fixtures revwords_cpp_java, sortints_py_java, "
         "vowels_java_py (no JDK on PATH)");

  std::vector<SampleOutcome> outcomes;
  size_t passed = 0;
  for (const auto& rec : records) {
    outcomes.push_back(outcome_from_record(rec));
    if (rec.verdict == "passed") ++passed;
  }
  const double ca = outcomes.empty() ? 0.0 : compute_ca(outcomes);
  const long ms = timer.ms();

  std::ostringstream line;
  line << "end to end: perfect-translator script over " << records.size()
       << " of 5 task fixtures via real compile+run, CA = " << detail::fmt_ca(ca)
       << " (" << passed << "/" << records.size() << " passed) in " << ms
       << " ms" << detail;
  if (run_ok && !records.empty() && passed == records.size() && ca == 1.0 &&
      ms < 120000)
    pass(10, line.str());
  else
    fail(10, line.str());
}

}  // namespace

int main() {
  struct Check {
    int idx;
    void (*fn)();
    const char* label;
  };
  const Check checks[] = {
      {1, criterion_instrument_round_trip, "instrumentation round trip"},
      {2, criterion_trace_grammar, "trace grammar"},
      {3, criterion_diff_oracle, "diff oracle"},
      {4, criterion_executor_classification, "executor classification"},
      {5, criterion_pipeline_scenarios, "pipeline scenarios"},
      {6, criterion_ca_and_taxonomy, "accuracy and taxonomy"},
      {7, criterion_minhash, "minhash"},
      {8, criterion_buckets, "length buckets"},
      {9, criterion_report_shape, "report shape"},
      {10, criterion_end_to_end, "end to end"},
  };
  for (const Check& c : checks) {
    try {
      c.fn();
    } catch (const std::exception& e) {
      fail(c.idx, std::string(c.label) + ": unexpected exception: " + e.what());
    }
  }
  std::cout << (g_failures == 0 ? "acceptance: all checks passed"
                                : "acceptance: " + std::to_string(g_failures) +
                                      " check(s) failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
