// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Report rendering over the results log: computational accuracy per language
// pair, a failure histogram, and token-length buckets. Human-readable tables
// or CSV.

#ifndef PAST_REPORT_HPP
#define PAST_REPORT_HPP

#include <algorithm>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "past/bench.hpp"
#include "past/resultlog.hpp"

namespace past {

struct PairStats {
  size_t samples = 0;
  size_t correct = 0;
  double ca() const {
    return samples ? static_cast<double>(correct) / static_cast<double>(samples) : 0.0;
  }
};

struct BucketStats {
  size_t samples = 0;
  size_t correct = 0;
};

struct Report {
  std::map<std::string, PairStats> by_pair;  // "cpp->java" etc.
  PairStats overall;
  // Histogram over the five failure categories, keyed by their display name.
  std::vector<std::pair<std::string, size_t>> failure_histogram;
  std::vector<std::pair<std::string, BucketStats>> buckets;  // in bucket order
};

inline Report build_report(const std::vector<ResultRecord>& records) {
  if (records.empty())
    throw Error(Errc::EmptyResults, "no records to report on");
  Report rep;
  static const FailureCategory cats[] = {
      FailureCategory::COMPILATION_ERROR, FailureCategory::RUNTIME_ERROR_ALL,
      FailureCategory::RUNTIME_ERROR_SOME, FailureCategory::WRONG_ANSWER_ALL,
      FailureCategory::WRONG_ANSWER_SOME};
  std::map<std::string, size_t> hist;
  for (FailureCategory c : cats) hist[failure_category_name(c)] = 0;

  std::map<size_t, BucketStats> buckets;
  for (size_t i = 0; i < kBucketNames.size(); ++i) buckets[i];

  for (const auto& rec : records) {
    SampleOutcome outcome = outcome_from_record(rec);
    const bool ok = sample_correct(outcome);
    const std::string pair = rec.source_language + "->" + rec.target_language;
    auto& p = rep.by_pair[pair];
    ++p.samples;
    ++rep.overall.samples;
    auto& b = buckets[bucket_index(rec.source_tokens)];
    ++b.samples;
    if (ok) {
      ++p.correct;
      ++rep.overall.correct;
      ++b.correct;
    } else {
      ++hist[failure_category_name(categorize_failure(outcome))];
    }
  }
  for (FailureCategory c : cats)
    rep.failure_histogram.emplace_back(failure_category_name(c),
                                       hist[failure_category_name(c)]);
  for (size_t i = 0; i < kBucketNames.size(); ++i)
    rep.buckets.emplace_back(kBucketNames[i], buckets[i]);
  return rep;
}

namespace detail {

inline std::string fmt_ratio(size_t num, size_t den) {
  std::ostringstream os;
  os << num << "/" << den;
  return os.str();
}

inline std::string fmt_ca(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

// Renders rows as a simple aligned table with a header rule.
inline std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream os;
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t i = 0; i < rows[r].size(); ++i) {
      os << std::left << std::setw(static_cast<int>(width[i])) << rows[r][i];
      if (i + 1 < rows[r].size()) os << "  ";
    }
    os << "\n";
    if (r == 0) {
      for (size_t i = 0; i < width.size(); ++i) {
        os << std::string(width[i], '-');
        if (i + 1 < width.size()) os << "  ";
      }
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace detail

inline std::string render_bucket_table(const Report& rep) {
  std::ostringstream os;
  os << "Accuracy by source length (tokens)\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"bucket", "correct", "samples", "CA"});
  for (const auto& [name, stats] : rep.buckets) {
    double ca = stats.samples ? static_cast<double>(stats.correct) /
                                    static_cast<double>(stats.samples)
                              : 0.0;
    rows.push_back({name, std::to_string(stats.correct),
                    std::to_string(stats.samples), detail::fmt_ca(ca)});
  }
  os << detail::render_table(rows);
  return os.str();
}

inline std::string render_report_text(const Report& rep) {
  std::ostringstream os;
  os << "Computational accuracy\n";
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"pair", "correct", "samples", "CA"});
  for (const auto& [pair, stats] : rep.by_pair)
    rows.push_back({pair, std::to_string(stats.correct),
                    std::to_string(stats.samples), detail::fmt_ca(stats.ca())});
  rows.push_back({"overall", std::to_string(rep.overall.correct),
                  std::to_string(rep.overall.samples),
                  detail::fmt_ca(rep.overall.ca())});
  os << detail::render_table(rows) << "\n";

  os << "Failure histogram\n";
  rows.clear();
  rows.push_back({"category", "count"});
  for (const auto& [name, count] : rep.failure_histogram)
    rows.push_back({name, std::to_string(count)});
  os << detail::render_table(rows) << "\n";

  os << render_bucket_table(rep);
  return os.str();
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// CSV rendering: three blocks (accuracy, histogram, buckets) separated by a
/// `table` column so one file round-trips the whole report.
inline std::string render_report_csv(const Report& rep) {
  std::ostringstream os;
  os << "table,key,correct,samples,ca\n";
  for (const auto& [pair, stats] : rep.by_pair)
    os << "accuracy," << detail::csv_quote(pair) << "," << stats.correct << ","
       << stats.samples << "," << detail::fmt_ca(stats.ca()) << "\n";
  os << "accuracy,overall," << rep.overall.correct << "," << rep.overall.samples
     << "," << detail::fmt_ca(rep.overall.ca()) << "\n";
  for (const auto& [name, count] : rep.failure_histogram)
    os << "failures," << detail::csv_quote(name) << "," << count << ",,\n";
  for (const auto& [name, stats] : rep.buckets) {
    double ca = stats.samples ? static_cast<double>(stats.correct) /
                                    static_cast<double>(stats.samples)
                              : 0.0;
    os << "buckets," << detail::csv_quote(name) << "," << stats.correct << ","
       << stats.samples << "," << detail::fmt_ca(ca) << "\n";
  }
  return os.str();
}

}  // namespace past

#endif  // PAST_REPORT_HPP
