#pragma once

#include <optional>
#include <vector>

#include "sftlab/sft.hpp"

namespace sftlab {

// A nonnegative quantity Q held by its base-2 logarithm in scale-free form:
// log2 Q = mantissa * 2^exponent with mantissa in [1,2), plus an exact zero.
// Relative error of the stored log2 Q is tracked through every operation;
// |K_n| reaches 2^(2^thousands), so Q itself is never materialized.
class ScaledLog {
 public:
  ScaledLog() = default;  // log2 Q = 0, i.e. Q = 1

  static ScaledLog from_log2(double log2_q, double rel_err = 1e-15);
  static ScaledLog from_count(const BigInt& q);
  // log2 Q = mantissa * 2^exponent directly.
  static ScaledLog from_scaled(double mantissa, std::int64_t exponent, double rel_err);
  // The number 2^x itself (not its logarithm); x may exceed the double range
  // of 2^x.
  static ScaledLog exp2_of(double x, double rel_err = 0);

  bool is_zero_log() const { return zero_; }
  double rel_error() const { return rel_err_; }

  ScaledLog plus(const ScaledLog& other) const;       // log2 Q1 + log2 Q2
  ScaledLog times(const ScaledLog& other) const;      // (log2 Q1) * (log2 Q2)
  ScaledLog minus_scalar(double c) const;             // log2 Q - c, requires c < log2 Q
  double log2_value(double* abs_err = nullptr) const; // log2(log2 Q)
  double to_double() const;                           // log2 Q when it fits

 private:
  bool zero_ = true;
  double mant_ = 0;
  std::int64_t exp_ = 0;
  double rel_err_ = 0;
  void normalize();
};

// log2(E!) with a certified bound: the exact digit-by-digit sum for E <= 10^6
// (compensated summation), otherwise E(log2 E - log2 e) + (1/2) log2(2 pi E)
// with remainder bound 1/(8 E ln 2).
ScaledLog log2_factorial_exact(std::uint64_t e);
ScaledLog log2_factorial_stirling(double log2_e, double log2_e_abs_err = 0);
ScaledLog log2_factorial(const BigInt& e);

struct SimpleFactorProfile {
  std::vector<BigInt> factors;  // orders of declared simple factors, each >= 2
};

// Membership in P^s(M, N): at most N factors, pairwise log-order ratios <= M.
bool ps_membership(const SimpleFactorProfile& profile, double m, long n);

// kappa^|inner boundary_R(F)|.
BigInt boundary_weight(const FiniteSet& f, Coord r, const BigInt& kappa);

struct BeepsResult {
  double value = 2.0;
  std::vector<Symbol> max_u, min_v;  // boundary patterns attaining the maximum
  Provenance provenance = Provenance::Exact;
};
// max over ordered pairs (u, v) of 2 (|E(u)|/|E(v)|) (log|E(u)|/log|E(v)|).
BeepsResult beeps_statistic(const SftSpec& spec, const FiniteSet& f, double s, Budget& budget);

struct KnReport {
  int level = 0;
  BigInt index;              // [Z^d : H_n]
  double log2_num_rows = 0;  // log2 #(boundary patterns)
  double log2_extension = 0; // log2 |E(u)| of the largest row
  ScaledLog log2_kn;         // log2 |K_n| = sum over rows of (log2 |E(u)|! - 1)
  double loglog_kn = 0;
  double a_n = 0;            // loglog |K_n| / index
  double error_bound = 0;    // certified absolute error on a_n
  bool trivial = false;      // every |E(u)| <= 2, so K_n is trivial
  Provenance provenance = Provenance::Exact;
};

KnReport kn_loglog_order(const SftSpec& spec, const LatticeSubgroup& hn, const FiniteSet& cn,
                         double s, Budget& budget);

// Levels 1..n_max of the odd-base centered tower; trivial levels are flagged
// and carried in the output.
std::vector<KnReport> entropy_recovery_sequence(const SftSpec& spec, Coord base_k, double s,
                                                int n_max, Budget& budget);

// Minimal (m, n) with a^m = b^n, decided by prime exponent proportionality.
std::optional<std::pair<long, long>> log_ratio_rational(const BigInt& a, const BigInt& b);

// idx1 * log2(a) == idx2 * log2(b), exactly on the integer-power level.
bool index_ratio_identity_check(const BigInt& a, const BigInt& b, long idx1, long idx2);

}  // namespace sftlab
