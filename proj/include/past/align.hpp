// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "past/instrument.hpp"
#include "past/util.hpp"

namespace past {

// ---------------------------------------------------------------------------
// Output normalization

/// Split on newlines, strip trailing whitespace per line (CR included), drop
/// trailing empty lines.
inline std::vector<std::string> normalize_output(std::string_view raw) {
  std::vector<std::string> lines;
  for (auto& l : util::split_lines(raw))
    lines.emplace_back(util::rstrip(l));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

inline bool outputs_equal(std::string_view a, std::string_view b) {
  return normalize_output(a) == normalize_output(b);
}

// ---------------------------------------------------------------------------
// Line diff

enum class EditKind { EQUAL, DELETE, INSERT };

struct EditOp {
  EditKind kind;
  std::string line;  // from A for EQUAL/DELETE, from B for INSERT

  bool operator==(const EditOp& o) const {
    return kind == o.kind && line == o.line;
  }
};

struct LineDiff {
  std::vector<EditOp> ops;

  size_t equal_count() const {
    size_t n = 0;
    for (const auto& op : ops)
      if (op.kind == EditKind::EQUAL) ++n;
    return n;
  }
  bool has_changes() const {
    for (const auto& op : ops)
      if (op.kind != EditKind::EQUAL) return true;
    return false;
  }
};

namespace detail {

// Hirschberg linear-space LCS diff over interned line ids. Quadratic time in
// the non-common core, but common prefixes and suffixes are trimmed first,
// which covers the typical aligned-until-divergence outputs cheaply.
class LcsDiff {
 public:
  LcsDiff(const std::vector<int>& a, const std::vector<int>& b)
      : a_(a), b_(b) {}

  // Emits (kind, index-into-A-or-B) pairs in script order.
  template <typename Emit>
  void run(Emit&& emit) {
    solve(0, static_cast<long>(a_.size()), 0, static_cast<long>(b_.size()), emit);
  }

 private:
  template <typename Emit>
  void solve(long a0, long a1, long b0, long b1, Emit& emit) {
    while (a0 < a1 && b0 < b1 && a_[a0] == b_[b0]) {
      emit(EditKind::EQUAL, a0);
      ++a0;
      ++b0;
    }
    long suffix = 0;
    while (a0 < a1 - suffix && b0 < b1 - suffix &&
           a_[a1 - suffix - 1] == b_[b1 - suffix - 1])
      ++suffix;
    const long a1c = a1 - suffix, b1c = b1 - suffix;

    if (a0 == a1c) {
      for (long j = b0; j < b1c; ++j) emit(EditKind::INSERT, j);
    } else if (b0 == b1c) {
      for (long i = a0; i < a1c; ++i) emit(EditKind::DELETE, i);
    } else if (a1c - a0 == 1) {
      // One A line left: keep it if it occurs anywhere in the B range.
      long match = -1;
      for (long j = b0; j < b1c; ++j) {
        if (b_[j] == a_[a0]) {
          match = j;
          break;
        }
      }
      if (match < 0) {
        emit(EditKind::DELETE, a0);
        for (long j = b0; j < b1c; ++j) emit(EditKind::INSERT, j);
      } else {
        for (long j = b0; j < match; ++j) emit(EditKind::INSERT, j);
        emit(EditKind::EQUAL, a0);
        for (long j = match + 1; j < b1c; ++j) emit(EditKind::INSERT, j);
      }
    } else {
      const long mid = a0 + (a1c - a0) / 2;
      std::vector<long> fwd = lcs_row(a0, mid, b0, b1c, /*reverse=*/false);
      std::vector<long> bwd = lcs_row(mid, a1c, b0, b1c, /*reverse=*/true);
      long best_j = b0, best = -1;
      const long m = b1c - b0;
      for (long j = 0; j <= m; ++j) {
        long v = fwd[static_cast<size_t>(j)] + bwd[static_cast<size_t>(m - j)];
        if (v > best) {
          best = v;
          best_j = b0 + j;
        }
      }
      solve(a0, mid, b0, best_j, emit);
      solve(mid, a1c, best_j, b1c, emit);
    }
    for (long i = 0; i < suffix; ++i) emit(EditKind::EQUAL, a1c + i);
  }

  // Last row of the LCS-length table for A[a0,a1) x B[b0,b1); when `reverse`,
  // both ranges are scanned right to left.
  std::vector<long> lcs_row(long a0, long a1, long b0, long b1, bool reverse) const {
    const long n = a1 - a0, m = b1 - b0;
    std::vector<long> prev(static_cast<size_t>(m) + 1, 0);
    std::vector<long> cur(static_cast<size_t>(m) + 1, 0);
    for (long i = 0; i < n; ++i) {
      cur[0] = 0;
      const int av = reverse ? a_[a1 - 1 - i] : a_[a0 + i];
      for (long j = 1; j <= m; ++j) {
        const int bv = reverse ? b_[b1 - j] : b_[b0 + j - 1];
        if (av == bv)
          cur[static_cast<size_t>(j)] = prev[static_cast<size_t>(j - 1)] + 1;
        else
          cur[static_cast<size_t>(j)] = std::max(prev[static_cast<size_t>(j)],
                                                 cur[static_cast<size_t>(j - 1)]);
      }
      std::swap(prev, cur);
    }
    return prev;
  }

  const std::vector<int>& a_;
  const std::vector<int>& b_;
};

inline std::vector<int> intern(const std::vector<std::string>& lines,
                               std::unordered_map<std::string, int>& table) {
  std::vector<int> ids;
  ids.reserve(lines.size());
  for (const auto& l : lines) {
    auto [it, inserted] =
        table.emplace(l, static_cast<int>(table.size()));
    ids.push_back(it->second);
  }
  return ids;
}

}  // namespace detail

/// Minimal line-level edit script over normalized lines. The number of EQUAL
/// ops equals the length of a longest common subsequence of the two line
/// sequences.
inline LineDiff diff_by_line(std::string_view a, std::string_view b) {
  std::vector<std::string> la = normalize_output(a);
  std::vector<std::string> lb = normalize_output(b);
  std::unordered_map<std::string, int> table;
  std::vector<int> ia = detail::intern(la, table);
  std::vector<int> ib = detail::intern(lb, table);

  LineDiff diff;
  diff.ops.reserve(la.size() + lb.size());
  detail::LcsDiff lcs(ia, ib);
  lcs.run([&](EditKind kind, long idx) {
    if (kind == EditKind::INSERT)
      diff.ops.push_back({kind, lb[static_cast<size_t>(idx)]});
    else
      diff.ops.push_back({kind, la[static_cast<size_t>(idx)]});
  });
  return diff;
}

// ---------------------------------------------------------------------------
// Divergence localization

enum class DivergenceKind {
  TRACE_DIVERGENCE,
  FINAL_OUTPUT_DIVERGENCE,
  LENGTH_DIVERGENCE,
};

inline std::string_view divergence_kind_name(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::TRACE_DIVERGENCE: return "TRACE_DIVERGENCE";
    case DivergenceKind::FINAL_OUTPUT_DIVERGENCE: return "FINAL_OUTPUT_DIVERGENCE";
    case DivergenceKind::LENGTH_DIVERGENCE: return "LENGTH_DIVERGENCE";
  }
  return "FINAL_OUTPUT_DIVERGENCE";
}

struct DivergencePoint {
  size_t index_a = 0;  // first non-matching line in A (or one-past-end)
  size_t index_b = 0;
  std::vector<std::string> context_a;  // divergent line plus up to 5 lines each side
  std::vector<std::string> context_b;
  DivergenceKind kind = DivergenceKind::FINAL_OUTPUT_DIVERGENCE;
  std::string note;
};

inline constexpr size_t kDivergenceContext = 5;

namespace detail {
inline std::vector<std::string> context_slice(const std::vector<std::string>& lines,
                                              size_t idx) {
  size_t lo = idx > kDivergenceContext ? idx - kDivergenceContext : 0;
  size_t hi = std::min(lines.size(), idx + kDivergenceContext + 1);
  if (lo >= hi) return {};
  return {lines.begin() + static_cast<long>(lo), lines.begin() + static_cast<long>(hi)};
}
}  // namespace detail

/// First point where the normalized outputs disagree. The comparison is a
/// prefix scan, not diff-based: it finds where the executions first diverge
/// in emission order. Absent iff outputs_equal(a, b).
inline std::optional<DivergencePoint> first_divergence(std::string_view a,
                                                       std::string_view b) {
  std::vector<std::string> la = normalize_output(a);
  std::vector<std::string> lb = normalize_output(b);
  size_t i = 0;
  while (i < la.size() && i < lb.size() && la[i] == lb[i]) ++i;
  if (i == la.size() && i == lb.size()) return std::nullopt;

  DivergencePoint dp;
  dp.index_a = i;
  dp.index_b = i;
  dp.context_a = detail::context_slice(la, i);
  dp.context_b = detail::context_slice(lb, i);
  const bool a_has = i < la.size();
  const bool b_has = i < lb.size();
  auto is_trace = [](const std::string& l) {
    return l.rfind(kTraceSentinel, 0) == 0;
  };
  if ((a_has && is_trace(la[i])) || (b_has && is_trace(lb[i])))
    dp.kind = DivergenceKind::TRACE_DIVERGENCE;
  else if (!a_has || !b_has)
    dp.kind = DivergenceKind::LENGTH_DIVERGENCE;
  else
    dp.kind = DivergenceKind::FINAL_OUTPUT_DIVERGENCE;
  return dp;
}

/// Equality under executor output caps: when either side was truncated, the
/// texts are compared only up to the shorter captured length and can never
/// be reported equal. Divergence past both truncation points comes back as
/// LENGTH_DIVERGENCE with an explanatory note.
struct CappedComparison {
  bool equal = false;
  std::optional<DivergencePoint> divergence;
};

inline CappedComparison compare_outputs(std::string_view a, bool a_truncated,
                                        std::string_view b, bool b_truncated) {
  CappedComparison res;
  if (!a_truncated && !b_truncated) {
    res.equal = outputs_equal(a, b);
    if (!res.equal) res.divergence = first_divergence(a, b);
    return res;
  }
  size_t cut = std::min(a.size(), b.size());
  std::string_view ac = a.substr(0, cut), bc = b.substr(0, cut);
  res.equal = false;
  if (!outputs_equal(ac, bc)) {
    res.divergence = first_divergence(ac, bc);
  } else {
    DivergencePoint dp;
    std::vector<std::string> lines = normalize_output(ac);
    dp.index_a = dp.index_b = lines.size();
    dp.kind = DivergenceKind::LENGTH_DIVERGENCE;
    dp.note = "outputs identical up to captured length; comparison truncated "
              "at the output byte cap";
    res.divergence = dp;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Diff summarization

inline constexpr size_t kDefaultSummaryBudget = 100;
inline constexpr size_t kSummaryContext = 5;

/// Unified-diff-style summary: hunks with 5 context lines per side, starting
/// at the first divergence, until `budget_lines` content lines are spent.
/// "-" lines come from A (the candidate), "+" lines from B (the reference).
/// A trailer reports how many edit-script lines were not shown.
inline std::string summarize_diff(const LineDiff& d,
                                  const std::optional<DivergencePoint>& dp,
                                  size_t budget_lines = kDefaultSummaryBudget) {
  if (budget_lines < 11)
    throw Error(Errc::UsageError, "summary budget must be at least 11 lines");
  if (!d.has_changes()) return "outputs identical";

  const auto& ops = d.ops;
  const size_t n = ops.size();

  // Hunks: change runs widened by context, merged when the equal gap between
  // them does not exceed twice the context.
  struct Hunk {
    size_t begin, end;  // op index range
  };
  std::vector<Hunk> hunks;
  size_t i = 0;
  while (i < n) {
    if (ops[i].kind == EditKind::EQUAL) {
      ++i;
      continue;
    }
    size_t begin = i > kSummaryContext ? i - kSummaryContext : 0;
    size_t last_change = i;
    size_t j = i + 1;
    while (j < n) {
      if (ops[j].kind != EditKind::EQUAL) {
        last_change = j;
        ++j;
      } else {
        size_t k = j;
        while (k < n && ops[k].kind == EditKind::EQUAL) ++k;
        if (k < n && k - j <= 2 * kSummaryContext) {
          j = k;
        } else {
          break;
        }
      }
    }
    size_t end = std::min(n, last_change + kSummaryContext + 1);
    hunks.push_back({begin, end});
    i = end;
  }

  // Line numbers (1-based) per op for hunk headers.
  std::vector<std::pair<size_t, size_t>> pos(n);  // (a_line, b_line) at op start
  size_t al = 1, bl = 1;
  for (size_t k = 0; k < n; ++k) {
    pos[k] = {al, bl};
    if (ops[k].kind != EditKind::INSERT) ++al;
    if (ops[k].kind != EditKind::DELETE) ++bl;
  }

  std::string out;
  out += "--- candidate output (-)\n+++ reference output (+)\n";
  if (dp) {
    out += "first divergence at candidate line " + std::to_string(dp->index_a + 1) +
           ", reference line " + std::to_string(dp->index_b + 1) + " (" +
           std::string(divergence_kind_name(dp->kind)) + ")";
    if (!dp->note.empty()) out += "; " + dp->note;
    out += "\n";
  }

  size_t shown = 0;
  bool truncated = false;
  for (const auto& h : hunks) {
    if (shown >= budget_lines) {
      truncated = true;
      break;
    }
    size_t a_count = 0, b_count = 0;
    for (size_t k = h.begin; k < h.end; ++k) {
      if (ops[k].kind != EditKind::INSERT) ++a_count;
      if (ops[k].kind != EditKind::DELETE) ++b_count;
    }
    out += "@@ -" + std::to_string(pos[h.begin].first) + "," + std::to_string(a_count) +
           " +" + std::to_string(pos[h.begin].second) + "," + std::to_string(b_count) +
           " @@\n";
    for (size_t k = h.begin; k < h.end; ++k) {
      if (shown >= budget_lines) {
        truncated = true;
        break;
      }
      switch (ops[k].kind) {
        case EditKind::EQUAL: out += ' '; break;
        case EditKind::DELETE: out += '-'; break;
        case EditKind::INSERT: out += '+'; break;
      }
      out += ops[k].line;
      out += '\n';
      ++shown;
    }
  }
  size_t omitted = n - shown;
  if (omitted > 0 || truncated)
    out += "... " + std::to_string(omitted) + " lines omitted\n";
  return out;
}

}  // namespace past
