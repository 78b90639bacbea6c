// Copyright 2026 The past Authors
// SPDX-License-Identifier: Apache-2.0

#include "past/bench.hpp"

#include <random>
#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "past/util.hpp"

using namespace past;

namespace {

constexpr TestStatus kStatuses[] = {TestStatus::PASSED, TestStatus::WRONG_ANSWER,
                                    TestStatus::RUNTIME_ERROR};

SampleOutcome sample(bool compiled, std::vector<TestStatus> tests) {
  SampleOutcome s;
  s.id = "s";
  s.compiled = compiled;
  s.tests = std::move(tests);
  return s;
}

/// Brute-force re-derivation of computational accuracy: a sample counts iff it
/// compiled, has at least one test, and no test deviated.
double ca_oracle(const std::vector<SampleOutcome>& samples) {
  size_t good = 0;
  for (const auto& s : samples) {
    bool ok = s.compiled && !s.tests.empty();
    for (TestStatus t : s.tests)
      if (t != TestStatus::PASSED) ok = false;
    if (ok) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(samples.size());
}

/// Independent restatement of the taxonomy rules.
FailureCategory taxonomy_oracle(const SampleOutcome& s) {
  if (!s.compiled) return FailureCategory::COMPILATION_ERROR;
  size_t re = 0, wa = 0, pass = 0;
  for (TestStatus t : s.tests) {
    if (t == TestStatus::RUNTIME_ERROR) ++re;
    if (t == TestStatus::WRONG_ANSWER) ++wa;
    if (t == TestStatus::PASSED) ++pass;
  }
  if (re == s.tests.size()) return FailureCategory::RUNTIME_ERROR_ALL;
  if (re > 0) return FailureCategory::RUNTIME_ERROR_SOME;
  if (wa == s.tests.size()) return FailureCategory::WRONG_ANSWER_ALL;
  if (wa > 0) return FailureCategory::WRONG_ANSWER_SOME;
  (void)pass;
  return FailureCategory::NONE;
}

/// Exact shingle-set Jaccard similarity, computed from scratch with std::set.
double jaccard_oracle(std::string_view a, std::string_view b) {
  auto shingles = [](std::string_view text) {
    auto toks = tokenize(text);
    std::set<std::string> out;
    for (size_t i = 0; i + 5 <= toks.size(); ++i) {
      std::string sh;
      for (size_t k = 0; k < 5; ++k) {
        if (k) sh += '\x1f';
        sh += std::string(toks[i + k]);
      }
      out.insert(sh);
    }
    return out;
  };
  std::set<std::string> sa = shingles(a), sb = shingles(b);
  size_t inter = 0;
  for (const auto& s : sa) inter += sb.count(s);
  size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

TEST_CASE("compute_ca on documented examples", "[bench]") {
  std::vector<SampleOutcome> all_pass = {
      sample(true, {TestStatus::PASSED}),
      sample(true, {TestStatus::PASSED, TestStatus::PASSED}),
  };
  CHECK(compute_ca(all_pass) == 1.0);

  std::vector<SampleOutcome> three_of_four = {
      sample(true, {TestStatus::PASSED}),
      sample(true, {TestStatus::PASSED}),
      sample(true, {TestStatus::PASSED}),
      sample(true, {TestStatus::WRONG_ANSWER}),
  };
  CHECK(compute_ca(three_of_four) == 0.75);

  std::vector<SampleOutcome> none = {
      sample(false, {}),
      sample(true, {TestStatus::RUNTIME_ERROR}),
  };
  CHECK(compute_ca(none) == 0.0);
}

TEST_CASE("compute_ca rejects an empty sample set", "[bench]") {
  try {
    compute_ca({});
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyResults);
  }
}

TEST_CASE("one failing test fails the whole sample", "[bench]") {
  SampleOutcome s = sample(true, {TestStatus::PASSED, TestStatus::PASSED,
                                  TestStatus::WRONG_ANSWER});
  CHECK_FALSE(sample_correct(s));
  CHECK(compute_ca({s}) == 0.0);
}

TEST_CASE("compute_ca matches the oracle on all small assignments", "[bench]") {
  // Every status assignment for n samples x t tests, n <= 4, t in 1..3.
  for (size_t n = 1; n <= 4; ++n) {
    for (size_t t = 1; t <= 3; ++t) {
      size_t total = 1;
      for (size_t k = 0; k < n * t; ++k) total *= 3;
      for (size_t code = 0; code < total; ++code) {
        std::vector<SampleOutcome> samples;
        size_t c = code;
        for (size_t i = 0; i < n; ++i) {
          std::vector<TestStatus> tests;
          for (size_t j = 0; j < t; ++j) {
            tests.push_back(kStatuses[c % 3]);
            c /= 3;
          }
          samples.push_back(sample(true, std::move(tests)));
        }
        REQUIRE(compute_ca(samples) == ca_oracle(samples));
      }
    }
  }
}

TEST_CASE("failure category names are the report labels", "[bench]") {
  CHECK(std::string(failure_category_name(FailureCategory::NONE)) == "passed");
  CHECK(std::string(failure_category_name(FailureCategory::COMPILATION_ERROR)) ==
        "compilation error");
  CHECK(std::string(failure_category_name(FailureCategory::RUNTIME_ERROR_ALL)) ==
        "runtime error on all tests");
  CHECK(std::string(failure_category_name(FailureCategory::RUNTIME_ERROR_SOME)) ==
        "runtime error on some tests");
  CHECK(std::string(failure_category_name(FailureCategory::WRONG_ANSWER_ALL)) ==
        "wrong answer on all tests");
  CHECK(std::string(failure_category_name(FailureCategory::WRONG_ANSWER_SOME)) ==
        "wrong answer on some tests");
}

TEST_CASE("categorize_failure on documented cases", "[bench]") {
  using FC = FailureCategory;
  using TS = TestStatus;
  CHECK(categorize_failure(sample(false, {})) == FC::COMPILATION_ERROR);
  CHECK(categorize_failure(sample(false, {TS::PASSED})) == FC::COMPILATION_ERROR);
  CHECK(categorize_failure(sample(true, {TS::RUNTIME_ERROR, TS::RUNTIME_ERROR})) ==
        FC::RUNTIME_ERROR_ALL);
  CHECK(categorize_failure(sample(true, {TS::RUNTIME_ERROR, TS::PASSED})) ==
        FC::RUNTIME_ERROR_SOME);
  CHECK(categorize_failure(sample(true, {TS::WRONG_ANSWER, TS::WRONG_ANSWER})) ==
        FC::WRONG_ANSWER_ALL);
  CHECK(categorize_failure(sample(true, {TS::WRONG_ANSWER, TS::PASSED})) ==
        FC::WRONG_ANSWER_SOME);
  CHECK(categorize_failure(sample(true, {TS::PASSED, TS::PASSED})) == FC::NONE);
}

TEST_CASE("runtime errors take precedence over wrong answers", "[bench]") {
  SampleOutcome s = sample(true, {TestStatus::WRONG_ANSWER,
                                  TestStatus::RUNTIME_ERROR, TestStatus::PASSED});
  CHECK(categorize_failure(s) == FailureCategory::RUNTIME_ERROR_SOME);

  SampleOutcome all_bad = sample(true, {TestStatus::WRONG_ANSWER,
                                        TestStatus::RUNTIME_ERROR});
  CHECK(categorize_failure(all_bad) == FailureCategory::RUNTIME_ERROR_SOME);
}

TEST_CASE("categorize_failure rejects compiled samples with no tests", "[bench]") {
  try {
    categorize_failure(sample(true, {}));
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyResults);
  }
}

TEST_CASE("taxonomy matches the oracle on every small assignment", "[bench]") {
  for (size_t t = 1; t <= 3; ++t) {
    size_t total = 1;
    for (size_t k = 0; k < t; ++k) total *= 3;
    for (size_t code = 0; code < total; ++code) {
      std::vector<TestStatus> tests;
      size_t c = code;
      for (size_t j = 0; j < t; ++j) {
        tests.push_back(kStatuses[c % 3]);
        c /= 3;
      }
      for (bool compiled : {true, false}) {
        SampleOutcome s = sample(compiled, tests);
        REQUIRE(categorize_failure(s) == taxonomy_oracle(s));
        // A sample is categorized "passed" exactly when it counts toward CA.
        CHECK((categorize_failure(s) == FailureCategory::NONE) ==
              (compute_ca({s}) == 1.0));
      }
    }
  }
}

TEST_CASE("tokenize counts word runs and single punctuation", "[bench]") {
  CHECK(count_tokens("int main()") == 4);
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens("   \n\t ") == 0);
  CHECK(count_tokens("a a a") == 3);
  CHECK(count_tokens("x+=1") == 4);       // x, +, =, 1
  CHECK(count_tokens("foo_bar123 baz") == 2);
  CHECK(count_tokens("a->b") == 4);        // a, -, >, b
  auto toks = tokenize("int main()");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0] == "int");
  CHECK(toks[1] == "main");
  CHECK(toks[2] == "(");
  CHECK(toks[3] == ")");
}

TEST_CASE("bucket boundaries follow the half-open convention", "[bench]") {
  CHECK(std::string(bucket_name(0)) == "<256");
  CHECK(std::string(bucket_name(255)) == "<256");
  CHECK(std::string(bucket_name(256)) == "256-512");
  CHECK(std::string(bucket_name(511)) == "256-512");
  CHECK(std::string(bucket_name(512)) == "512-1024");
  CHECK(std::string(bucket_name(1023)) == "512-1024");
  CHECK(std::string(bucket_name(1024)) == "1024-2048");
  CHECK(std::string(bucket_name(2047)) == "1024-2048");
  CHECK(std::string(bucket_name(2048)) == ">2048");
  CHECK(std::string(bucket_name(2049)) == ">2048");
}

TEST_CASE("buckets partition all counts monotonically", "[bench]") {
  size_t prev = 0;
  for (size_t n = 0; n <= 4096; ++n) {
    size_t idx = bucket_index(n);
    REQUIRE(idx < kBucketNames.size());
    REQUIRE(idx >= prev);
    prev = idx;
  }
  CHECK(bucket_index(4096) == 4);
}

TEST_CASE("identical documents estimate similarity 1.0 exactly", "[bench]") {
  std::string text = "for i in range n : total = total + i * i";
  MinHashSignature a = minhash_signature(text);
  MinHashSignature b = minhash_signature(text);
  CHECK(a == b);
  CHECK(estimate_similarity(a, b) == 1.0);
}

TEST_CASE("token-disjoint documents estimate near zero", "[bench]") {
  std::string a, b;
  for (int i = 0; i < 100; ++i) {
    a += "alpha" + std::to_string(i) + " ";
    b += "beta" + std::to_string(i) + " ";
  }
  double est = estimate_similarity(minhash_signature(a), minhash_signature(b));
  CHECK(est < 0.05);
  CHECK(jaccard_oracle(a, b) == 0.0);
}

TEST_CASE("texts under five tokens cannot be shingled", "[bench]") {
  try {
    minhash_signature("a b c d");
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooShort);
  }
  CHECK_NOTHROW(minhash_signature("a b c d e"));
}

TEST_CASE("estimates track exact Jaccard within tolerance", "[bench]") {
  std::mt19937 rng(20260401);
  int within = 0;
  const int kPairs = 100;
  for (int p = 0; p < kPairs; ++p) {
    const size_t len = 60 + rng() % 140;
    std::vector<std::string> base;
    for (size_t i = 0; i < len; ++i)
      base.push_back("w" + std::to_string(rng() % 50));
    // Mutate a fraction of tokens for the second document.
    const double mut = (p % 10) * 0.03;
    std::vector<std::string> other = base;
    for (auto& tok : other)
      if ((rng() % 1000) < mut * 1000) tok = "m" + std::to_string(rng() % 50);
    std::string doc_a, doc_b;
    for (const auto& t : base) doc_a += t + " ";
    for (const auto& t : other) doc_b += t + " ";

    double est = estimate_similarity(minhash_signature(doc_a),
                                     minhash_signature(doc_b));
    double exact = jaccard_oracle(doc_a, doc_b);
    if (std::abs(est - exact) <= 0.06) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("dedup clusters byte-identical documents", "[bench]") {
  std::string prog = "def main ( ) : print ( int ( input ( ) ) * 2 )";
  std::vector<DedupDoc> docs = {
      {"a", prog}, {"b", prog}, {"c", "something else entirely with words"}};
  DedupResult r = dedup_and_cluster(docs);
  REQUIRE(r.clusters.size() == 2);
  CHECK(r.clusters[0].members == std::vector<size_t>{0, 1});
  CHECK(r.clusters[1].members == std::vector<size_t>{2});
  CHECK(r.cluster_of == std::vector<size_t>{0, 0, 1});
  CHECK(r.clusters[0].representative == 0);  // equal lengths: first wins
}

TEST_CASE("unrelated documents stay in singleton clusters", "[bench]") {
  std::vector<DedupDoc> docs;
  for (int d = 0; d < 4; ++d) {
    std::string text;
    for (int i = 0; i < 50; ++i)
      text += "d" + std::to_string(d) + "t" + std::to_string(i) + " ";
    docs.push_back({"doc" + std::to_string(d), text});
  }
  DedupResult r = dedup_and_cluster(docs);
  CHECK(r.clusters.size() == 4);
  for (size_t c = 0; c < r.clusters.size(); ++c)
    CHECK(r.clusters[c].members == std::vector<size_t>{c});
}

TEST_CASE("one changed token in 200 merges at threshold 0.85", "[bench]") {
  std::vector<std::string> toks;
  for (int i = 0; i < 200; ++i) toks.push_back("tok" + std::to_string(i));
  std::string original;
  for (const auto& t : toks) original += t + " ";
  toks[100] = "x";  // one substitution, also makes the copy shorter
  std::string near;
  for (const auto& t : toks) near += t + " ";

  // By construction only the 5 shingles covering position 100 changed.
  double exact = jaccard_oracle(original, near);
  CHECK(exact > 0.85);
  CHECK(exact < 1.0);

  DedupResult r = dedup_and_cluster({{"orig", original}, {"near", near}}, 0.85);
  REQUIRE(r.clusters.size() == 1);
  CHECK(r.clusters[0].members == std::vector<size_t>{0, 1});
  CHECK(r.clusters[0].representative == 1);  // the shorter text
}

TEST_CASE("too-short documents cluster only on exact equality", "[bench]") {
  std::vector<DedupDoc> docs = {
      {"a", "x y"}, {"b", "x y"}, {"c", "x z"},
      {"d", "a much longer document with plenty of tokens to shingle here"}};
  DedupResult r = dedup_and_cluster(docs);
  REQUIRE(r.clusters.size() == 3);
  CHECK(r.cluster_of[0] == r.cluster_of[1]);
  CHECK(r.cluster_of[2] != r.cluster_of[0]);
  CHECK(r.cluster_of[3] != r.cluster_of[0]);
  CHECK(r.cluster_of[3] != r.cluster_of[2]);
}

TEST_CASE("dedup is deterministic", "[bench]") {
  std::mt19937 rng(5);
  std::vector<DedupDoc> docs;
  for (int d = 0; d < 10; ++d) {
    std::string text;
    for (int i = 0; i < 40; ++i)
      text += "v" + std::to_string(rng() % 12) + " ";
    docs.push_back({"doc" + std::to_string(d), text});
  }
  DedupResult r1 = dedup_and_cluster(docs);
  DedupResult r2 = dedup_and_cluster(docs);
  CHECK(r1.cluster_of == r2.cluster_of);
  REQUIRE(r1.clusters.size() == r2.clusters.size());
  for (size_t c = 0; c < r1.clusters.size(); ++c) {
    CHECK(r1.clusters[c].members == r2.clusters[c].members);
    CHECK(r1.clusters[c].representative == r2.clusters[c].representative);
  }
}
