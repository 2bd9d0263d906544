#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sftlab/localq.hpp"

using namespace sftlab;

namespace {

// Naive long-double oracle for log2(E!).
long double naive_log2_factorial(std::uint64_t e) {
  long double sum = 0;
  for (std::uint64_t k = 2; k <= e; ++k) sum += std::log2(static_cast<long double>(k));
  return sum;
}

}  // namespace

TEST_CASE("scaled log arithmetic") {
  ScaledLog a = ScaledLog::from_log2(100.0);
  ScaledLog b = ScaledLog::from_log2(28.0);
  CHECK(a.plus(b).to_double() == doctest::Approx(128.0));
  CHECK(a.times(b).to_double() == doctest::Approx(2800.0));
  CHECK(a.minus_scalar(1.0).to_double() == doctest::Approx(99.0));
  CHECK(ScaledLog::from_log2(256.0).log2_value() == doctest::Approx(8.0));

  // Huge values survive in scale-free form.
  ScaledLog huge = ScaledLog::exp2_of(5000.0).times(ScaledLog::from_log2(3.0));
  CHECK(huge.log2_value() == doctest::Approx(5000.0 + std::log2(3.0)));

  // Counts, including exact powers of two.
  CHECK(ScaledLog::from_count(BigInt(1) << 100).to_double() == 100.0);
  CHECK(ScaledLog::from_count(BigInt(12)).to_double() == doctest::Approx(std::log2(12.0)));
}

TEST_CASE("exact log factorial matches a naive oracle") {
  for (std::uint64_t e : {2ull, 5ull, 64ull, 128ull, 1000ull, 20000ull}) {
    double got = log2_factorial_exact(e).to_double();
    long double want = naive_log2_factorial(e);
    CHECK(got == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
  }
}

TEST_CASE("stirling stays within its certified bound") {
  for (std::uint64_t e : {32ull, 100ull, 640ull, 4096ull, 10000ull}) {
    ScaledLog exact = log2_factorial_exact(e);
    ScaledLog st = log2_factorial_stirling(std::log2(static_cast<double>(e)), 0);
    double a = exact.to_double(), b = st.to_double();
    double bound = a * (exact.rel_error() + st.rel_error());
    CHECK(std::abs(a - b) <= bound);
  }
  // Dispatch: exact below 10^6, Stirling above.
  BigInt big = BigInt(1) << 40;
  ScaledLog viaBig = log2_factorial(big);
  ScaledLog direct = log2_factorial_stirling(40.0, 0);
  CHECK(viaBig.to_double() == doctest::Approx(direct.to_double()));
}

TEST_CASE("ps membership") {
  CHECK(ps_membership({{BigInt(60), BigInt(60)}}, 1.0, 2));
  CHECK(!ps_membership({{BigInt(60), BigInt(60), BigInt(60)}}, 1.0, 2));
  // log 2520 / log 60 is about 1.913.
  double ratio = std::log2(2520.0) / std::log2(60.0);
  CHECK(ratio > 1.3);
  CHECK(!ps_membership({{BigInt(60), BigInt(2520)}}, 1.3, 2));
  CHECK(ps_membership({{BigInt(60), BigInt(2520)}}, 2.0, 2));
}

TEST_CASE("boundary weight") {
  CHECK(boundary_weight(FiniteSet::interval(-4, 4), 1, 2) == 4);
  CHECK(boundary_weight(FiniteSet::box({0, 0}, {2, 2}), 1, 2) == 256);
  CHECK(boundary_weight(FiniteSet::singleton({0, 0}), 1, 2) == 2);
  CHECK_THROWS_AS(boundary_weight(FiniteSet::interval(0, 3), 1, 1), Error);
}

TEST_CASE("beeps statistic") {
  Budget budget;
  SftSpec full4 = full_shift_spec(1, 4);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(4, 9);
  std::uniform_int_distribution<int> s(1, 2);
  for (int t = 0; t < 10; ++t) {
    auto res = beeps_statistic(full4, FiniteSet::interval(0, len(rng)), s(rng), budget);
    CHECK(res.value == 2.0);
  }

  SftSpec gm = golden_mean_spec();
  auto res = beeps_statistic(gm, FiniteSet::interval(0, 4), 1, budget);
  // Brute-force oracle: counts 5,3,3,2; the maximum is at (5, 2).
  double expect = 2.0 * (5.0 / 2.0) * (std::log2(5.0) / std::log2(2.0));
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-12));

  auto larger = beeps_statistic(gm, FiniteSet::interval(0, 10), 1, budget);
  CHECK(larger.value < res.value);

  // Degenerate when a boundary row admits at most one extension.
  CHECK_THROWS_AS(beeps_statistic(gm, FiniteSet::interval(0, 1), 1, budget), Error);
}

TEST_CASE("kn level reports") {
  Budget budget;
  SftSpec full2 = full_shift_spec(1, 2);
  Tower t = build_centered_tower(3, 1, 4);

  auto level1 = kn_loglog_order(full2, t.subgroups[0], t.domains[0], 1, budget);
  CHECK(level1.trivial);

  auto level2 = kn_loglog_order(full2, t.subgroups[1], t.domains[1], 1, budget);
  CHECK(!level2.trivial);
  CHECK(level2.log2_num_rows == 2.0);
  CHECK(level2.log2_extension == 7.0);
  // Oracle: log2 |K_2| = 4 (log2(128!) - 1).
  long double expect = 4.0L * (naive_log2_factorial(128) - 1.0L);
  CHECK(level2.log2_kn.to_double() == doctest::Approx(static_cast<double>(expect)));
  CHECK(level2.loglog_kn ==
        doctest::Approx(std::log2(static_cast<double>(expect))).epsilon(1e-12));

  // Level 4 runs through the Stirling path: closed-form oracle.
  auto level4 = kn_loglog_order(full2, t.subgroups[3], t.domains[3], 1, budget);
  const double lam = 79.0;
  const double log2e = std::log2(std::exp(1.0));
  // log2|K_4| = 4 (2^79 (79 - log2 e) + 0.5 log2(2 pi 2^79) - 1)
  double main = std::exp2(lam) * (lam - log2e);
  double loglog = std::log2(4.0 * (main + 0.5 * (std::log2(2 * M_PI) + lam) - 1.0));
  CHECK(level4.loglog_kn == doctest::Approx(loglog).epsilon(1e-12));
  CHECK(level4.error_bound < 1e-6);
}

TEST_CASE("entropy recovery sequences") {
  Budget budget;
  SftSpec full2 = full_shift_spec(1, 2);
  auto seq = entropy_recovery_sequence(full2, 3, 1, 7, budget);
  REQUIRE(seq.size() == 7);
  CHECK(seq[0].trivial);
  double last = 1e18;
  for (int n = 2; n <= 7; ++n) {
    const auto& rep = seq[n - 1];
    CHECK(!rep.trivial);
    CHECK(rep.a_n > 1.0);
    CHECK(rep.a_n < last);
    CHECK(rep.error_bound < 1e-6);
    last = rep.a_n;
  }
  CHECK(std::abs(seq[6].a_n - 1.0) < 0.006);

  SftSpec full4 = full_shift_spec(1, 4);
  auto seq4 = entropy_recovery_sequence(full4, 3, 1, 7, budget);
  CHECK(std::abs(seq4[6].a_n - 2.0) < 0.012);
  for (int n = 2; n <= 7; ++n) CHECK(seq4[n - 1].a_n > 2.0);

  // One-point shift: every level is trivial.
  SftSpec point = full_shift_spec(1, 1);
  auto seqp = entropy_recovery_sequence(point, 3, 1, 3, budget);
  for (const auto& rep : seqp) CHECK(rep.trivial);

  // Golden mean levels via exact extension tables.
  SftSpec gm = golden_mean_spec();
  auto seqg = entropy_recovery_sequence(gm, 3, 1, 3, budget);
  const double h = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
  CHECK(!seqg[2].trivial);
  CHECK(seqg[2].a_n > h);
}

TEST_CASE("log ratio rationality") {
  auto r1 = log_ratio_rational(4, 8);
  REQUIRE(r1.has_value());
  CHECK(r1->first == 3);
  CHECK(r1->second == 2);

  auto r2 = log_ratio_rational(2, 8);
  REQUIRE(r2.has_value());
  CHECK(r2->first == 3);
  CHECK(r2->second == 1);

  CHECK(!log_ratio_rational(6, 12).has_value());

  // Exhaustive power-search oracle on a small range.
  for (long a = 2; a <= 12; ++a) {
    for (long b = 2; b <= 12; ++b) {
      bool found = false;
      long fm = 0, fn = 0;
      for (long m = 1; m <= 20 && !found; ++m) {
        BigInt am = 1;
        for (long i = 0; i < m; ++i) am *= a;
        BigInt bn = 1;
        long n = 0;
        while (bn < am) {
          bn *= b;
          ++n;
        }
        if (bn == am) {
          found = true;
          fm = m;
          fn = n;
        }
      }
      auto got = log_ratio_rational(a, b);
      CHECK(got.has_value() == found);
      if (found && got) {
        CHECK(got->first == fm);
        CHECK(got->second == fn);
      }
    }
  }
}

TEST_CASE("index ratio identity") {
  CHECK(index_ratio_identity_check(4, 2, 1, 2));
  CHECK(!index_ratio_identity_check(2, 3, 5, 7));
  CHECK(index_ratio_identity_check(6, 6, 3, 3));
  CHECK(index_ratio_identity_check(8, 4, 2, 3));
}
