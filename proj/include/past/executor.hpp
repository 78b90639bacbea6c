// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sandboxed-ish program execution: compiles single-file programs per
// language toolchain, runs them on test inputs with wall-clock timeouts and
// output caps, and classifies results against reference outputs.

#ifndef PAST_EXECUTOR_HPP
#define PAST_EXECUTOR_HPP

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "past/align.hpp"
#include "past/bench.hpp"
#include "past/core.hpp"
#include "past/util.hpp"

namespace past {

// ---------------------------------------------------------------------------
// Low-level process runner
// ---------------------------------------------------------------------------

inline constexpr size_t kDefaultOutputCap = 1048576;  // 1 MiB per stream

struct ExecutionOutcome {
  int exit_code = -1;
  int signal = 0;           // terminating signal, 0 if none
  bool timed_out = false;
  std::string stdout_data;
  std::string stderr_data;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
  int64_t wall_ms = 0;

  bool ran_ok() const { return !timed_out && signal == 0 && exit_code == 0; }

  /// Short human-readable verdict plus a stderr excerpt, for repair prompts.
  std::string describe() const {
    std::string s;
    if (timed_out)
      s = "timed out after " + std::to_string(wall_ms) + " ms";
    else if (signal != 0)
      s = "killed by signal " + std::to_string(signal);
    else
      s = "exited with code " + std::to_string(exit_code);
    if (!stderr_data.empty()) {
      s += "; stderr:\n";
      s += stderr_data.size() > 2000 ? stderr_data.substr(0, 2000) + "\n[stderr truncated]"
                                     : stderr_data;
    }
    return s;
  }
};

struct RunLimits {
  int timeout_ms = 10000;
  size_t output_cap = kDefaultOutputCap;
};

namespace detail {

inline void ignore_sigpipe_once() {
  static std::once_flag once;
  std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

// Reads everything currently available from fd; returns false on EOF.
inline bool drain_fd(int fd, std::string& sink, bool& truncated, size_t cap) {
  char buf[65536];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof(buf));
    if (n > 0) {
      if (sink.size() < cap) {
        size_t take = std::min(static_cast<size_t>(n), cap - sink.size());
        sink.append(buf, take);
        if (take < static_cast<size_t>(n)) truncated = true;
      } else {
        truncated = true;
      }
      continue;
    }
    if (n == 0) return false;
    if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
    if (errno == EINTR) continue;
    return false;  // treat read errors as EOF
  }
}

}  // namespace detail

/// Runs `command` through /bin/sh -c in its own process group, feeding
/// `stdin_payload` and capturing stdout/stderr up to the byte cap. On timeout
/// the whole process group is killed. Throws HarnessFault only for harness
/// problems (fork/pipe failures), never for program failures.
inline ExecutionOutcome run_process(const std::string& command,
                                    const std::filesystem::path& cwd,
                                    std::string_view stdin_payload,
                                    const RunLimits& limits) {
  detail::ignore_sigpipe_once();

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0 || ::pipe2(out_pipe, O_CLOEXEC) != 0 ||
      ::pipe2(err_pipe, O_CLOEXEC) != 0)
    throw Error(Errc::HarnessFault, std::string("pipe2: ") + std::strerror(errno));

  const pid_t pid = ::fork();
  if (pid < 0)
    throw Error(Errc::HarnessFault, std::string("fork: ") + std::strerror(errno));

  if (pid == 0) {
    ::setpgid(0, 0);
    ::signal(SIGPIPE, SIG_DFL);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(err_pipe[1], STDERR_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }

  ::setpgid(pid, pid);  // best effort; the child also sets it
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  ::close(err_pipe[1]);
  int stdin_fd = in_pipe[1], stdout_fd = out_pipe[0], stderr_fd = err_pipe[0];
  ::fcntl(stdin_fd, F_SETFL, O_NONBLOCK);
  ::fcntl(stdout_fd, F_SETFL, O_NONBLOCK);
  ::fcntl(stderr_fd, F_SETFL, O_NONBLOCK);

  ExecutionOutcome out;
  size_t written = 0;
  if (stdin_payload.empty()) {
    ::close(stdin_fd);
    stdin_fd = -1;
  }

  const auto start = std::chrono::steady_clock::now();
  const auto deadline = start + std::chrono::milliseconds(limits.timeout_ms);
  bool killed = false, reaped = false;
  int status = 0;

  auto service_streams = [&](int wait_ms) {
    struct pollfd fds[3];
    int n = 0;
    int out_slot = -1, err_slot = -1, in_slot = -1;
    if (stdout_fd >= 0) { fds[n] = {stdout_fd, POLLIN, 0}; out_slot = n++; }
    if (stderr_fd >= 0) { fds[n] = {stderr_fd, POLLIN, 0}; err_slot = n++; }
    if (stdin_fd >= 0) { fds[n] = {stdin_fd, POLLOUT, 0}; in_slot = n++; }
    if (n == 0) {
      ::poll(nullptr, 0, wait_ms);
      return;
    }
    if (::poll(fds, static_cast<nfds_t>(n), wait_ms) <= 0) return;
    if (out_slot >= 0 && (fds[out_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
      if (!detail::drain_fd(stdout_fd, out.stdout_data, out.stdout_truncated,
                            limits.output_cap)) {
        ::close(stdout_fd);
        stdout_fd = -1;
      }
    }
    if (err_slot >= 0 && (fds[err_slot].revents & (POLLIN | POLLHUP | POLLERR))) {
      if (!detail::drain_fd(stderr_fd, out.stderr_data, out.stderr_truncated,
                            limits.output_cap)) {
        ::close(stderr_fd);
        stderr_fd = -1;
      }
    }
    if (in_slot >= 0 && (fds[in_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
      bool close_in = (fds[in_slot].revents & (POLLERR | POLLHUP)) != 0;
      while (!close_in && written < stdin_payload.size()) {
        ssize_t w = ::write(stdin_fd, stdin_payload.data() + written,
                            std::min<size_t>(stdin_payload.size() - written, 65536));
        if (w > 0) {
          written += static_cast<size_t>(w);
        } else if (w < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
          break;
        } else if (w < 0 && errno == EINTR) {
          continue;
        } else {
          close_in = true;  // EPIPE and friends: receiver is gone
        }
      }
      if (close_in || written >= stdin_payload.size()) {
        ::close(stdin_fd);
        stdin_fd = -1;
      }
    }
  };

  while (!reaped) {
    const auto now = std::chrono::steady_clock::now();
    if (!killed && now >= deadline) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      killed = true;
      out.timed_out = true;
    }
    pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) {
      reaped = true;
      break;
    }
    int wait_ms = 50;
    if (!killed) {
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
      wait_ms = static_cast<int>(std::clamp<int64_t>(left, 1, 50));
    }
    service_streams(wait_ms);
  }

  // The child is gone; give lingering grandchildren a short grace period to
  // flush, then stop reading.
  const auto grace = std::chrono::steady_clock::now() + std::chrono::milliseconds(200);
  while ((stdout_fd >= 0 || stderr_fd >= 0) && std::chrono::steady_clock::now() < grace)
    service_streams(20);

  if (stdin_fd >= 0) ::close(stdin_fd);
  if (stdout_fd >= 0) ::close(stdout_fd);
  if (stderr_fd >= 0) ::close(stderr_fd);
  if (killed) ::kill(-pid, SIGKILL);  // sweep any stragglers in the group

  out.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  if (WIFEXITED(status))
    out.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    out.signal = WTERMSIG(status);
  return out;
}

// ---------------------------------------------------------------------------
// Toolchains
// ---------------------------------------------------------------------------

/// Command templates for one language. Placeholders: {src} is the source file
/// path, {dir} the build/run directory, {bin} the produced binary path for
/// compiled-to-native languages or the main class name for Java.
struct Toolchain {
  std::string compile_template;
  std::string run_template;
};

struct ToolchainSet {
  Toolchain cpp{"g++ -O2 -std=c++17 {src} -o {bin}", "{bin}"};
  Toolchain java{"javac -d {dir} {src}", "java -cp {dir} {bin}"};
  Toolchain python{"python3 -m py_compile {src}", "python3 {src}"};

  const Toolchain& for_language(LanguageTag tag) const {
    switch (tag) {
      case LanguageTag::CPP: return cpp;
      case LanguageTag::JAVA: return java;
      case LanguageTag::PYTHON: return python;
    }
    throw Error(Errc::HarnessFault, "unknown language tag");
  }
  Toolchain& for_language(LanguageTag tag) {
    return const_cast<Toolchain&>(
        static_cast<const ToolchainSet*>(this)->for_language(tag));
  }
};

namespace detail {

inline std::string substitute(std::string tpl, const std::string& src,
                              const std::string& bin, const std::string& dir) {
  tpl = util::replace_all(std::move(tpl), "{src}", shell_quote(src));
  tpl = util::replace_all(std::move(tpl), "{bin}", shell_quote(bin));
  tpl = util::replace_all(std::move(tpl), "{dir}", shell_quote(dir));
  return tpl;
}

/// Blanks out comments and string/char literal contents so that textual scans
/// (class-name discovery) do not trip over them. Keeps offsets stable.
inline std::string strip_java_noise(std::string_view text) {
  std::string out(text);
  enum { CODE, LINE, BLOCK, STR, CHR } state = CODE;
  for (size_t i = 0; i < out.size(); ++i) {
    char c = out[i];
    char next = i + 1 < out.size() ? out[i + 1] : '\0';
    switch (state) {
      case CODE:
        if (c == '/' && next == '/') { state = LINE; out[i] = ' '; }
        else if (c == '/' && next == '*') { state = BLOCK; out[i] = ' '; }
        else if (c == '"') state = STR;
        else if (c == '\'') state = CHR;
        break;
      case LINE:
        if (c == '\n') state = CODE;
        else out[i] = ' ';
        break;
      case BLOCK:
        if (c == '*' && next == '/') { state = CODE; out[i] = ' '; out[++i] = ' '; }
        else if (c != '\n') out[i] = ' ';
        break;
      case STR:
        if (c == '\\') { out[i] = ' '; if (i + 1 < out.size()) out[++i] = ' '; }
        else if (c == '"') state = CODE;
        else out[i] = ' ';
        break;
      case CHR:
        if (c == '\\') { out[i] = ' '; if (i + 1 < out.size()) out[++i] = ' '; }
        else if (c == '\'') state = CODE;
        else out[i] = ' ';
        break;
    }
  }
  return out;
}

}  // namespace detail

/// Finds the entry-point class of a Java source file: the public top-level
/// class when present, otherwise the first declared class. Returns the fully
/// qualified name (package-qualified) and the simple name.
struct JavaEntryPoint {
  std::string qualified;
  std::string simple;
};

inline JavaEntryPoint java_entry_point(std::string_view source) {
  const std::string text = detail::strip_java_noise(source);
  static const std::regex pkg_re(R"(^[ \t]*package[ \t]+([A-Za-z_$][\w.$]*)[ \t]*;)",
                                 std::regex::multiline);
  static const std::regex pub_re(
      R"(\bpublic\b(?:[ \t]+(?:final|abstract|strictfp|sealed))*[ \t]+class[ \t]+([A-Za-z_$][\w$]*))");
  static const std::regex any_re(R"(\bclass[ \t]+([A-Za-z_$][\w$]*))");

  std::string pkg;
  std::smatch m;
  if (std::regex_search(text, m, pkg_re)) pkg = m[1].str();

  std::string simple;
  if (std::regex_search(text, m, pub_re))
    simple = m[1].str();
  else if (std::regex_search(text, m, any_re))
    simple = m[1].str();
  else
    throw Error(Errc::InvalidProgram, "no class declaration in Java source");

  JavaEntryPoint ep;
  ep.simple = simple;
  ep.qualified = pkg.empty() ? simple : pkg + "." + simple;
  return ep;
}

// ---------------------------------------------------------------------------
// Executor
// ---------------------------------------------------------------------------

struct ExecutorOptions {
  ToolchainSet toolchains;
  int compile_timeout_ms = 60000;
  RunLimits run_limits;            // defaults: 10s, 1 MiB
  std::filesystem::path scratch_root;  // empty: a fresh temp dir
  bool keep_scratch = false;
};

/// A compiled (or compile-checked) program ready to run.
struct Prepared {
  bool ok = false;
  std::string compile_log;     // combined stdout+stderr of the compile step
  std::string run_command;     // fully substituted shell command
  std::filesystem::path dir;   // working directory for runs
  bool cache_hit = false;
};

struct TestRun {
  std::string test_id;
  ExecutionOutcome outcome;
};

class Executor {
 public:
  explicit Executor(ExecutorOptions options = {}) : opt_(std::move(options)) {
    if (opt_.scratch_root.empty()) {
      std::string tpl =
          (std::filesystem::temp_directory_path() / "past-XXXXXX").string();
      std::vector<char> buf(tpl.begin(), tpl.end());
      buf.push_back('\0');
      if (::mkdtemp(buf.data()) == nullptr)
        throw Error(Errc::HarnessFault, std::string("mkdtemp: ") + std::strerror(errno));
      opt_.scratch_root = buf.data();
      owns_root_ = true;
    } else {
      std::filesystem::create_directories(opt_.scratch_root);
    }
  }

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  ~Executor() {
    if (owns_root_ && !opt_.keep_scratch) {
      std::error_code ec;
      std::filesystem::remove_all(opt_.scratch_root, ec);
    }
  }

  const ExecutorOptions& options() const { return opt_; }
  const std::filesystem::path& scratch_root() const { return opt_.scratch_root; }

  /// True when every executable named by the language's command templates is
  /// on PATH. Results are cached.
  bool toolchain_available(LanguageTag tag) {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = tool_ok_.find(tag);
    if (it != tool_ok_.end()) return it->second;
    const Toolchain& tc = opt_.toolchains.for_language(tag);
    bool ok = true;
    for (const std::string* tpl : {&tc.compile_template, &tc.run_template}) {
      std::string word = tpl->substr(0, tpl->find(' '));
      if (word.empty() || word.front() == '{') continue;  // e.g. "{bin}"
      ExecutionOutcome r = run_process("command -v " + detail::shell_quote(word), {},
                                       "", {5000, 65536});
      if (!r.ran_ok()) {
        ok = false;
        break;
      }
    }
    tool_ok_[tag] = ok;
    return ok;
  }

  /// Writes the program into a fresh scratch dir and runs the compile step.
  /// Results are cached by (language, source text, toolchain). A failed
  /// compile is a normal result, not an exception; a missing toolchain throws
  /// ToolchainMissing.
  Prepared prepare(const SourceProgram& program) {
    const Toolchain& tc = opt_.toolchains.for_language(program.language().tag);
    const std::string key = std::string(language_key(program.language())) + ":" +
                            util::content_hash(program.text()) + ":" +
                            util::content_hash(tc.compile_template + "\x1f" +
                                               tc.run_template);
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = cache_.find(key);
      if (it != cache_.end()) {
        Prepared hit = it->second;
        hit.cache_hit = true;
        return hit;
      }
    }
    if (!toolchain_available(program.language().tag))
      throw Error(Errc::ToolchainMissing,
                  "toolchain for " + std::string(program.language().display_name) +
                      " not found on PATH");

    Prepared prep;
    prep.dir = fresh_dir();
    std::string src_name, bin;
    switch (program.language().tag) {
      case LanguageTag::CPP:
        src_name = "main.cpp";
        bin = (prep.dir / "prog").string();
        break;
      case LanguageTag::PYTHON:
        src_name = "main.py";
        bin = (prep.dir / "main.py").string();
        break;
      case LanguageTag::JAVA: {
        JavaEntryPoint ep = java_entry_point(program.text());
        src_name = ep.simple + ".java";
        bin = ep.qualified;
        break;
      }
    }
    const std::string src = (prep.dir / src_name).string();
    util::write_file(src, program.text());

    const std::string compile_cmd =
        detail::substitute(tc.compile_template, src, bin, prep.dir.string());
    ExecutionOutcome c = run_process(compile_cmd, prep.dir, "",
                                     {opt_.compile_timeout_ms, kDefaultOutputCap});
    prep.compile_log = c.stdout_data;
    if (!c.stderr_data.empty()) {
      if (!prep.compile_log.empty()) prep.compile_log += "\n";
      prep.compile_log += c.stderr_data;
    }
    if (c.timed_out) prep.compile_log += "\n[compile step timed out]";
    prep.ok = c.ran_ok();
    prep.run_command = detail::substitute(tc.run_template, src, bin, prep.dir.string());

    std::lock_guard<std::mutex> lock(mu_);
    cache_.emplace(key, prep);
    return prep;
  }

  /// Runs a prepared program once.
  ExecutionOutcome run(const Prepared& prep, std::string_view stdin_payload) const {
    if (!prep.ok)
      throw Error(Errc::CompileFailed, "attempted to run a program that did not compile");
    return run_process(prep.run_command, prep.dir, stdin_payload, opt_.run_limits);
  }

  /// Runs a prepared program on every test, in order.
  std::vector<TestRun> run_tests(const Prepared& prep,
                                 const std::vector<TestCase>& tests) const {
    std::vector<TestRun> out;
    out.reserve(tests.size());
    for (const auto& t : tests) out.push_back({t.id, run(prep, t.stdin_payload)});
    return out;
  }

 private:
  std::filesystem::path fresh_dir() {
    std::string tpl = (opt_.scratch_root / "run-XXXXXX").string();
    std::vector<char> buf(tpl.begin(), tpl.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr)
      throw Error(Errc::HarnessFault, std::string("mkdtemp: ") + std::strerror(errno));
    return {std::string(buf.data())};
  }

  ExecutorOptions opt_;
  bool owns_root_ = false;
  std::mutex mu_;
  std::map<std::string, Prepared> cache_;
  std::map<LanguageTag, bool> tool_ok_;
};

/// Classifies one run against a reference stdout: any abnormal termination
/// (nonzero exit, signal, timeout) is a runtime error; otherwise output
/// equality decides between pass and wrong answer.
inline TestStatus classify_run(const ExecutionOutcome& outcome,
                               std::string_view expected_stdout) {
  if (!outcome.ran_ok()) return TestStatus::RUNTIME_ERROR;
  return outputs_equal(outcome.stdout_data, expected_stdout)
             ? TestStatus::PASSED
             : TestStatus::WRONG_ANSWER;
}

}  // namespace past

#endif  // PAST_EXECUTOR_HPP
