// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "past/core.hpp"
#include "past/util.hpp"

namespace past {

// Public wire constants. They appear in prompts, in program output, and in
// stored attempt logs; changing either is a breaking change.
inline constexpr std::string_view kTraceSentinel = "PAST_TRACE|";
inline constexpr std::string_view kMarkerToken = "PAST-INSTR";

/// The marker comment expected at the end of every inserted line.
inline std::string marker_comment(const Language& lang) {
  if (lang.tag == LanguageTag::PYTHON) return "# PAST-INSTR";
  return "// PAST-INSTR";
}

// ---------------------------------------------------------------------------
// Types

/// A source program plus LLM-inserted trace-print lines. Valid instances
/// reproduce the base program byte-for-byte when the inserted lines are
/// deleted; construct them through validate_instrumented().
class InstrumentedProgram {
 public:
  const SourceProgram& base() const noexcept { return base_; }
  const std::string& text() const noexcept { return text_; }
  const std::vector<size_t>& breakpoint_line_indices() const noexcept {
    return breakpoints_;
  }
  const Language& language() const noexcept { return base_.language(); }

 private:
  friend InstrumentedProgram validate_instrumented(const SourceProgram&,
                                                   std::string_view);
  InstrumentedProgram(SourceProgram base, std::string text,
                      std::vector<size_t> breakpoints)
      : base_(std::move(base)),
        text_(std::move(text)),
        breakpoints_(std::move(breakpoints)) {}

  SourceProgram base_;
  std::string text_;
  std::vector<size_t> breakpoints_;  // 0-based, strictly increasing
};

/// One parsed trace line: "<sentinel><description>: <name> = <value>".
struct TraceEvent {
  std::string description;
  std::string variable_name;
  std::string rendered_value;
  size_t sequence_index = 0;  // assigned by the caller

  bool operator==(const TraceEvent& o) const {
    return description == o.description && variable_name == o.variable_name &&
           rendered_value == o.rendered_value &&
           sequence_index == o.sequence_index;
  }
};

// ---------------------------------------------------------------------------
// Operations

/// Prompt asking the model to insert trace prints into `program`.
inline std::string build_instrumentation_prompt(const SourceProgram& program) {
  const Language& lang = program.language();
  std::string print_idiom;
  switch (lang.tag) {
    case LanguageTag::PYTHON:
      print_idiom = "print(\"PAST_TRACE|...\", flush=True)";
      break;
    case LanguageTag::CPP:
      print_idiom = "std::cout << \"PAST_TRACE|...\" << std::endl";
      break;
    case LanguageTag::JAVA:
      print_idiom = "System.out.println(\"PAST_TRACE|...\") followed by System.out.flush()";
      break;
  }
  std::string p;
  p += "Insert trace print statements (breakpoints) into the ";
  p += lang.display_name;
  p += " program below so its runtime state can be observed.\n\n";
  p += "Rules:\n";
  p += "1. Insert only whole new print lines. Never modify, reorder, or delete "
       "any existing line; every original line must remain byte-identical.\n";
  p += "2. Each inserted statement must print exactly one line that starts with "
       "the sentinel token \"PAST_TRACE|\".\n";
  p += "3. After the sentinel, the printed line must follow this format exactly: "
       "[description of the current position]: [variable_name] = [variable_value]\n";
  p += "   Example output line: PAST_TRACE|after loop iteration: i = 3\n";
  p += "4. Place breakpoints at key points relevant to understanding the "
       "program's logic and flow (entry, branches, loop steps, before output). "
       "Do not flood the output: prefer a small number of informative "
       "breakpoints. For any container value, print at most the first 8 "
       "elements plus the container length.\n";
  p += "5. Use the " + std::string(lang.display_name) + " print idiom " +
       print_idiom + " and make sure the output is flushed line by line "
       "(unbuffered or per-line flush) so trace lines interleave "
       "deterministically with normal program output. Each breakpoint must "
       "emit a single line per breakpoint execution.\n";
  p += "6. Append the marker comment \"" + marker_comment(lang) +
       "\" at the end of every inserted line.\n";
  p += "7. Return the full instrumented program in one fenced code block and "
       "nothing else.\n\n";
  p += "Program:\n";
  p += "```" + std::string(language_key(lang)) + "\n";
  p += program.text();
  p += "```\n";
  return p;
}

/// Checks an LLM-produced candidate against the instrumentation contract:
/// the lines carrying the marker comment are the inserted ones, and deleting
/// exactly those lines must reproduce the original byte-for-byte.
inline InstrumentedProgram validate_instrumented(const SourceProgram& original,
                                                 std::string_view candidate_text) {
  if (util::is_blank(candidate_text))
    throw Error(Errc::InvalidProgram, "instrumented candidate is empty");
  std::string canonical = SourceProgram::canonicalize(candidate_text);
  std::vector<std::string> lines = util::split_lines(canonical);

  std::vector<size_t> breakpoints;
  std::vector<std::string> remaining;
  remaining.reserve(lines.size());
  for (size_t i = 0; i < lines.size(); ++i) {
    if (util::contains(lines[i], kMarkerToken)) {
      breakpoints.push_back(i);
    } else {
      remaining.push_back(lines[i]);
    }
  }
  if (breakpoints.empty())
    throw Error(Errc::NoBreakpoints, "no lines carry the marker comment");

  if (util::join_lines(remaining) != original.text()) {
    // Reconstruction failed. If the original itself holds marker lines, the
    // candidate cannot be separated from it; report that case distinctly.
    for (const auto& line : util::split_lines(original.text())) {
      if (util::contains(line, kMarkerToken))
        throw Error(Errc::MarkerOnOriginalLine,
                    "an original line carries the marker token");
    }
    throw Error(Errc::MutatedOriginal,
                "removing marker lines does not reproduce the original");
  }
  return InstrumentedProgram(original, std::move(canonical), std::move(breakpoints));
}

/// Inverse of instrumentation: drops exactly the recorded inserted lines.
inline SourceProgram remove_instrumentation(const InstrumentedProgram& p) {
  std::vector<std::string> lines = util::split_lines(p.text());
  std::vector<std::string> kept;
  kept.reserve(lines.size());
  size_t next_bp = 0;
  const auto& bps = p.breakpoint_line_indices();
  for (size_t i = 0; i < lines.size(); ++i) {
    if (next_bp < bps.size() && bps[next_bp] == i) {
      ++next_bp;
      continue;
    }
    kept.push_back(std::move(lines[i]));
  }
  return SourceProgram(p.base().id(), p.base().language(),
                       util::join_lines(kept));
}

/// Removes every line carrying the marker comment or the trace sentinel from
/// arbitrary program text. Used on translated candidates, which cannot be
/// validated against a base program. Returns canonical text.
inline std::string strip_instrumentation(std::string_view text) {
  std::string canonical = SourceProgram::canonicalize(text);
  std::vector<std::string> kept;
  for (auto& line : util::split_lines(canonical)) {
    if (util::contains(line, kMarkerToken) || util::contains(line, kTraceSentinel))
      continue;
    kept.push_back(std::move(line));
  }
  return util::join_lines(kept);
}

/// Parses one output line. Returns nullopt for lines without the sentinel.
/// Grammar after the sentinel: split on the FIRST ": ", then on the FIRST
/// " = " of the tail. Throws MalformedTrace when the sentinel is present but
/// the grammar does not match (an LLM contract breach; callers treat the
/// line as plain output).
inline std::optional<TraceEvent> parse_trace_line(std::string_view line) {
  if (line.substr(0, kTraceSentinel.size()) != kTraceSentinel)
    return std::nullopt;
  std::string_view rest = line.substr(kTraceSentinel.size());
  size_t colon = rest.find(": ");
  if (colon == std::string_view::npos)
    throw Error(Errc::MalformedTrace, "missing \": \" in trace line");
  std::string_view description = rest.substr(0, colon);
  std::string_view tail = rest.substr(colon + 2);
  size_t eq = tail.find(" = ");
  if (eq == std::string_view::npos)
    throw Error(Errc::MalformedTrace, "missing \" = \" in trace line");
  std::string_view name = tail.substr(0, eq);
  std::string_view value = tail.substr(eq + 3);
  if (description.empty())
    throw Error(Errc::MalformedTrace, "empty description");
  if (name.empty() || name.find('=') != std::string_view::npos)
    throw Error(Errc::MalformedTrace, "bad variable name");
  TraceEvent ev;
  ev.description = std::string(description);
  ev.variable_name = std::string(name);
  ev.rendered_value = std::string(value);
  return ev;
}

/// Inverse of parse_trace_line for values without newlines.
inline std::string format_trace_line(const TraceEvent& ev) {
  return std::string(kTraceSentinel) + ev.description + ": " +
         ev.variable_name + " = " + ev.rendered_value;
}

}  // namespace past
