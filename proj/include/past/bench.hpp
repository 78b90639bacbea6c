// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark utilities: computational accuracy, failure classification,
// length bucketing, and MinHash-based near-duplicate clustering.

#ifndef PAST_BENCH_HPP
#define PAST_BENCH_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "past/util.hpp"

namespace past {

// ---------------------------------------------------------------------------
// Per-test execution status, shared by the executor and the benchmark layer.
// ---------------------------------------------------------------------------

enum class TestStatus {
  PASSED,         // ran to completion and matched the reference output
  WRONG_ANSWER,   // ran to completion, output mismatch
  RUNTIME_ERROR,  // nonzero exit, signal, or timeout
};

inline const char* test_status_name(TestStatus s) {
  switch (s) {
    case TestStatus::PASSED: return "passed";
    case TestStatus::WRONG_ANSWER: return "wrong_answer";
    case TestStatus::RUNTIME_ERROR: return "runtime_error";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Computational accuracy
// ---------------------------------------------------------------------------

/// Outcome of one translated sample on its verification tests.
struct SampleOutcome {
  std::string id;
  bool compiled = true;
  std::vector<TestStatus> tests;  // empty means no tests were run
};

/// True when every test ran to completion and matched the reference.
inline bool sample_correct(const SampleOutcome& s) {
  if (!s.compiled || s.tests.empty()) return false;
  return std::all_of(s.tests.begin(), s.tests.end(),
                     [](TestStatus t) { return t == TestStatus::PASSED; });
}

/// Fraction of samples that are correct on all of their tests. Throws
/// EmptyResults when there are no samples at all.
inline double compute_ca(const std::vector<SampleOutcome>& samples) {
  if (samples.empty())
    throw Error(Errc::EmptyResults, "computational accuracy over zero samples");
  size_t ok = 0;
  for (const auto& s : samples)
    if (sample_correct(s)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(samples.size());
}

// ---------------------------------------------------------------------------
// Failure taxonomy
// ---------------------------------------------------------------------------

enum class FailureCategory {
  NONE,                    // sample passed everything
  COMPILATION_ERROR,
  RUNTIME_ERROR_ALL,       // runtime error on every test
  RUNTIME_ERROR_SOME,      // runtime error on a strict subset
  WRONG_ANSWER_ALL,        // wrong answer on every test (no runtime errors)
  WRONG_ANSWER_SOME,       // wrong answer on a strict subset (no runtime errors)
};

/// Human-readable category labels as they appear in reports.
inline const char* failure_category_name(FailureCategory c) {
  switch (c) {
    case FailureCategory::NONE: return "passed";
    case FailureCategory::COMPILATION_ERROR: return "compilation error";
    case FailureCategory::RUNTIME_ERROR_ALL: return "runtime error on all tests";
    case FailureCategory::RUNTIME_ERROR_SOME: return "runtime error on some tests";
    case FailureCategory::WRONG_ANSWER_ALL: return "wrong answer on all tests";
    case FailureCategory::WRONG_ANSWER_SOME: return "wrong answer on some tests";
  }
  return "?";
}

/// Classifies a failed sample. Runtime errors take precedence over wrong
/// answers: a sample with both lands in a runtime-error bucket. Timeouts are
/// recorded as runtime errors by the executor, so they need no special case.
inline FailureCategory categorize_failure(const SampleOutcome& s) {
  if (!s.compiled) return FailureCategory::COMPILATION_ERROR;
  if (s.tests.empty())
    throw Error(Errc::EmptyResults, "compiled sample with no test results");
  size_t re = 0, wa = 0;
  for (TestStatus t : s.tests) {
    if (t == TestStatus::RUNTIME_ERROR) ++re;
    else if (t == TestStatus::WRONG_ANSWER) ++wa;
  }
  const size_t total = s.tests.size();
  if (re == total) return FailureCategory::RUNTIME_ERROR_ALL;
  if (re > 0) return FailureCategory::RUNTIME_ERROR_SOME;
  if (wa == total) return FailureCategory::WRONG_ANSWER_ALL;
  if (wa > 0) return FailureCategory::WRONG_ANSWER_SOME;
  return FailureCategory::NONE;
}

// ---------------------------------------------------------------------------
// Tokenization and length buckets
// ---------------------------------------------------------------------------

/// Splits source text into tokens: maximal runs of [A-Za-z0-9_] count as one
/// token each, and every other non-whitespace byte is a single token.
/// "int main()" therefore has four tokens.
inline std::vector<std::string_view> tokenize(std::string_view text) {
  std::vector<std::string_view> out;
  auto is_word = [](unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
  };
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (is_word(c)) {
      size_t j = i + 1;
      while (j < text.size() && is_word(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back(text.substr(i, j - i));
      i = j;
    } else {
      out.push_back(text.substr(i, 1));
      ++i;
    }
  }
  return out;
}

inline size_t count_tokens(std::string_view text) { return tokenize(text).size(); }

/// Token-count buckets used by length-stratified reporting. Boundaries are
/// half-open: [0,256), [256,512), [512,1024), [1024,2048), [2048, inf).
inline constexpr std::array<size_t, 4> kBucketBounds = {256, 512, 1024, 2048};

inline constexpr std::array<const char*, 5> kBucketNames = {
    "<256", "256-512", "512-1024", "1024-2048", ">2048"};

inline size_t bucket_index(size_t token_count) {
  for (size_t i = 0; i < kBucketBounds.size(); ++i)
    if (token_count < kBucketBounds[i]) return i;
  return kBucketBounds.size();
}

inline const char* bucket_name(size_t token_count) {
  return kBucketNames[bucket_index(token_count)];
}

// ---------------------------------------------------------------------------
// MinHash near-duplicate detection
// ---------------------------------------------------------------------------

inline constexpr size_t kMinHashSlots = 256;
inline constexpr size_t kShingleSize = 5;

using MinHashSignature = std::array<uint64_t, kMinHashSlots>;

/// MinHash signature over 5-token shingles. The i-th slot keeps the minimum
/// of h1 + i*h2 over all shingles, where h1/h2 are two independent hashes of
/// the shingle bytes. Throws TooShort for texts with fewer than 5 tokens.
inline MinHashSignature minhash_signature(std::string_view text) {
  std::vector<std::string_view> toks = tokenize(text);
  if (toks.size() < kShingleSize)
    throw Error(Errc::TooShort, "fewer tokens than the shingle width");
  MinHashSignature sig;
  sig.fill(UINT64_MAX);
  std::string shingle;
  for (size_t s = 0; s + kShingleSize <= toks.size(); ++s) {
    shingle.clear();
    for (size_t k = 0; k < kShingleSize; ++k) {
      if (k) shingle.push_back('\x1f');  // unit separator, not a token byte
      shingle.append(toks[s + k].data(), toks[s + k].size());
    }
    const uint64_t h1 = util::hash_bytes(shingle, 0x9e3779b97f4a7c15ULL);
    const uint64_t h2 = util::hash_bytes(shingle, 0xc2b2ae3d27d4eb4fULL) | 1;
    uint64_t h = h1;
    for (size_t i = 0; i < kMinHashSlots; ++i, h += h2)
      sig[i] = std::min(sig[i], h);
  }
  return sig;
}

/// Jaccard similarity estimate: the fraction of matching signature slots.
inline double estimate_similarity(const MinHashSignature& a,
                                  const MinHashSignature& b) {
  size_t same = 0;
  for (size_t i = 0; i < kMinHashSlots; ++i)
    if (a[i] == b[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(kMinHashSlots);
}

// ---------------------------------------------------------------------------
// Greedy leader clustering
// ---------------------------------------------------------------------------

struct DedupDoc {
  std::string id;
  std::string text;
};

struct DedupCluster {
  std::vector<size_t> members;   // indices into the input docs, in input order
  size_t representative = 0;     // index of the shortest member (first wins ties)
};

struct DedupResult {
  std::vector<DedupCluster> clusters;
  // For each input doc, the cluster it landed in.
  std::vector<size_t> cluster_of;
};

/// Groups near-duplicate documents. Docs are scanned in input order; each doc
/// joins the first existing cluster whose leader's signature is at least
/// `threshold` similar, otherwise it starts a new cluster. Documents too short
/// to shingle only cluster with exact text matches.
inline DedupResult dedup_and_cluster(const std::vector<DedupDoc>& docs,
                                     double threshold = 0.85) {
  DedupResult result;
  result.cluster_of.resize(docs.size());
  std::vector<std::optional<MinHashSignature>> leader_sig;
  std::vector<size_t> leader_doc;

  for (size_t i = 0; i < docs.size(); ++i) {
    std::optional<MinHashSignature> sig;
    try {
      sig = minhash_signature(docs[i].text);
    } catch (const Error& e) {
      if (e.code() != Errc::TooShort) throw;
    }
    size_t found = SIZE_MAX;
    for (size_t c = 0; c < leader_sig.size(); ++c) {
      if (sig && leader_sig[c]) {
        if (estimate_similarity(*sig, *leader_sig[c]) >= threshold) {
          found = c;
          break;
        }
      } else if (!sig && !leader_sig[c]) {
        if (docs[i].text == docs[leader_doc[c]].text) {
          found = c;
          break;
        }
      }
    }
    if (found == SIZE_MAX) {
      found = result.clusters.size();
      result.clusters.push_back({});
      leader_sig.push_back(sig);
      leader_doc.push_back(i);
    }
    result.clusters[found].members.push_back(i);
    result.cluster_of[i] = found;
  }

  for (auto& cluster : result.clusters) {
    size_t best = cluster.members.front();
    for (size_t m : cluster.members)
      if (docs[m].text.size() < docs[best].text.size()) best = m;
    cluster.representative = best;
  }
  return result;
}

}  // namespace past

#endif  // PAST_BENCH_HPP
