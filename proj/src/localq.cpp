#include "sftlab/localq.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace sftlab {

namespace {

constexpr double kLog2E = 1.4426950408889634;  // log2(e)
constexpr double kLog2TwoPi = 2.6514961294723187;  // log2(2 pi)
constexpr double kEps = 2.3e-16;

std::map<BigInt, long> factorize(BigInt n) {
  std::map<BigInt, long> f;
  for (BigInt p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

}  // namespace

void ScaledLog::normalize() {
  if (zero_) return;
  if (mant_ <= 0) throw Error(ErrorKind::BadArgument, "scaled log must stay nonnegative");
  while (mant_ >= 2) {
    mant_ /= 2;
    ++exp_;
  }
  while (mant_ < 1) {
    mant_ *= 2;
    --exp_;
  }
}

ScaledLog ScaledLog::from_log2(double log2_q, double rel_err) {
  if (log2_q < 0) throw Error(ErrorKind::BadArgument, "negative log");
  ScaledLog s;
  if (log2_q == 0) return s;
  s.zero_ = false;
  int e;
  s.mant_ = std::frexp(log2_q, &e) * 2;  // frexp mantissa is in [0.5, 1)
  s.exp_ = e - 1;
  s.rel_err_ = rel_err + kEps;
  s.normalize();
  return s;
}

ScaledLog ScaledLog::from_count(const BigInt& q) {
  if (q < 1) throw Error(ErrorKind::BadArgument, "count must be positive");
  if (q == 1) return ScaledLog();
  std::int64_t p2;
  if (exact_power_of_two(q, &p2)) return from_log2(static_cast<double>(p2), 0);
  return from_log2(log2_of(q), kEps);
}

ScaledLog ScaledLog::from_scaled(double mantissa, std::int64_t exponent, double rel_err) {
  if (mantissa < 0) throw Error(ErrorKind::BadArgument, "negative log");
  ScaledLog s;
  if (mantissa == 0) return s;
  s.zero_ = false;
  s.mant_ = mantissa;
  s.exp_ = exponent;
  s.rel_err_ = rel_err + kEps;
  s.normalize();
  return s;
}

ScaledLog ScaledLog::exp2_of(double x, double rel_err) {
  if (x < 0) throw Error(ErrorKind::BadArgument, "negative log");
  const double e = std::floor(x);
  return from_scaled(std::exp2(x - e), static_cast<std::int64_t>(e), rel_err);
}

ScaledLog ScaledLog::plus(const ScaledLog& other) const {
  if (zero_) return other;
  if (other.zero_) return *this;
  const ScaledLog& big = (exp_ >= other.exp_) ? *this : other;
  const ScaledLog& small = (exp_ >= other.exp_) ? other : *this;
  ScaledLog out = big;
  std::int64_t d = big.exp_ - small.exp_;
  if (d < 64) out.mant_ += std::ldexp(small.mant_, -static_cast<int>(d));
  out.rel_err_ = std::max(rel_err_, other.rel_err_) + kEps;
  out.normalize();
  return out;
}

ScaledLog ScaledLog::times(const ScaledLog& other) const {
  if (zero_ || other.zero_) return ScaledLog();
  ScaledLog out;
  out.zero_ = false;
  out.mant_ = mant_ * other.mant_;
  out.exp_ = exp_ + other.exp_;
  out.rel_err_ = rel_err_ + other.rel_err_ + kEps;
  out.normalize();
  return out;
}

ScaledLog ScaledLog::minus_scalar(double c) const {
  if (c == 0) return *this;
  if (zero_ || c < 0) throw Error(ErrorKind::BadArgument, "invalid scalar subtraction");
  if (exp_ <= 52) {
    double v = to_double() - c;
    if (v < 0) throw Error(ErrorKind::BadArgument, "scaled log must stay nonnegative");
    double abs_err = rel_err_ * to_double();
    return from_log2(v, v > 0 ? abs_err / v + kEps : 0);
  }
  // c is negligible against 2^exp; fold it into the error bound.
  ScaledLog out = *this;
  out.rel_err_ += std::ldexp(c, -static_cast<int>(std::min<std::int64_t>(exp_, 1000))) + kEps;
  return out;
}

double ScaledLog::to_double() const {
  if (zero_) return 0;
  if (exp_ > 1000) throw Error(ErrorKind::BadArgument, "scaled log exceeds double range");
  return std::ldexp(mant_, static_cast<int>(exp_));
}

double ScaledLog::log2_value(double* abs_err) const {
  if (zero_) throw Error(ErrorKind::DegenerateExtensionCount, "log of a zero log");
  double v = static_cast<double>(exp_) + std::log2(mant_);
  if (abs_err) *abs_err = rel_err_ * kLog2E + kEps * std::abs(v);
  return v;
}

ScaledLog log2_factorial_exact(std::uint64_t e) {
  if (e > 1'000'000) throw Error(ErrorKind::BadArgument, "exact path capped at 10^6");
  // Compensated summation keeps the relative error within a few ulps.
  double sum = 0, comp = 0;
  for (std::uint64_t k = 2; k <= e; ++k) {
    double term = std::log2(static_cast<double>(k)) - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
  }
  return ScaledLog::from_log2(sum, 5e-15);
}

ScaledLog log2_factorial_stirling(double log2_e, double log2_e_abs_err) {
  if (log2_e < 1) throw Error(ErrorKind::BadArgument, "Stirling path needs log2 E >= 1");
  // Main term E (log2 E - log2 e) held in scaled form since E = 2^log2_e.
  const double ee = std::floor(log2_e);
  const double frac = log2_e - ee;
  ScaledLog value =
      ScaledLog::from_scaled((log2_e - kLog2E) * std::exp2(frac), static_cast<std::int64_t>(ee), 0);
  value = value.plus(ScaledLog::from_log2(0.5 * (kLog2TwoPi + log2_e)));

  // Certified bounds: Stirling remainder |eps| <= 1/(8 E ln 2) relative to the
  // main term, plus the propagated uncertainty of log2_e itself.
  const double ln2 = 0.6931471805599453;
  double log2_rel_rem = -std::log2(8.0 * ln2) - 2.0 * log2_e - std::log2(log2_e - kLog2E);
  double rel = std::exp2(std::max(log2_rel_rem, -900.0)) + ln2 * log2_e_abs_err + 4 * kEps;
  return ScaledLog::from_scaled((log2_e - kLog2E) * std::exp2(frac), static_cast<std::int64_t>(ee),
                                rel)
      .plus(ScaledLog::from_log2(0.5 * (kLog2TwoPi + log2_e)));
}

ScaledLog log2_factorial(const BigInt& e) {
  if (e < 0) throw Error(ErrorKind::BadArgument, "negative factorial");
  if (e <= 1) return ScaledLog::from_log2(0);
  if (e <= 1'000'000) return log2_factorial_exact(e.convert_to<std::uint64_t>());
  return log2_factorial_stirling(log2_of(e), kEps * log2_of(e));
}

bool ps_membership(const SimpleFactorProfile& profile, double m, long n) {
  if (profile.factors.empty())
    throw Error(ErrorKind::BadArgument, "profile must have at least one factor");
  for (const BigInt& f : profile.factors)
    if (f < 2) throw Error(ErrorKind::BadArgument, "factors must be at least 2");
  if (static_cast<long>(profile.factors.size()) > n) return false;
  double max_log = 0, min_log = 0;
  for (std::size_t i = 0; i < profile.factors.size(); ++i) {
    double l = log2_of(profile.factors[i]);
    if (i == 0) {
      max_log = min_log = l;
    } else {
      max_log = std::max(max_log, l);
      min_log = std::min(min_log, l);
    }
  }
  return max_log / min_log <= m;
}

BigInt boundary_weight(const FiniteSet& f, Coord r, const BigInt& kappa) {
  if (kappa < 2) throw Error(ErrorKind::BadArgument, "kappa must be at least 2");
  std::size_t cells = inner_boundary(f, static_cast<double>(r)).size();
  BigInt w = 1;
  for (std::size_t i = 0; i < cells; ++i) w *= kappa;
  return w;
}

BeepsResult beeps_statistic(const SftSpec& spec, const FiniteSet& f, double s, Budget& budget) {
  ExtensionTable table = extension_table(spec, f, s, budget);
  BeepsResult res;
  res.provenance = table.provenance;
  if (table.rows.empty()) throw Error(ErrorKind::DegenerateExtensionCount, "no boundary rows");
  const ExtensionTable::Row* max_row = &table.rows[0];
  const ExtensionTable::Row* min_row = &table.rows[0];
  for (const auto& row : table.rows) {
    if (row.count <= 1)
      throw Error(ErrorKind::DegenerateExtensionCount,
                  "a boundary row has at most one extension");
    if (row.count > max_row->count) max_row = &row;
    if (row.count < min_row->count) min_row = &row;
  }
  // The statistic is monotone in |E(u)| and antitone in |E(v)|, so the
  // extremal pair attains the maximum. Computed in the log domain.
  double lu = log2_of(max_row->count);
  double lv = log2_of(min_row->count);
  if (max_row->count == min_row->count) {
    res.value = 2.0;
  } else {
    res.value = 2.0 * std::exp2(lu - lv) * (lu / lv);
  }
  res.max_u = max_row->boundary_pattern;
  res.min_v = min_row->boundary_pattern;
  return res;
}

KnReport kn_loglog_order(const SftSpec& spec, const LatticeSubgroup& hn, const FiniteSet& cn,
                         double s, Budget& budget) {
  KnReport rep;
  rep.index = hn.index();
  FiniteSet boundary = inner_boundary(cn, s);

  if (spec.full_shift()) {
    const double l2a = std::log2(static_cast<double>(spec.alphabet_size()));
    const std::size_t interior = cn.size() - boundary.size();
    rep.log2_num_rows = l2a * static_cast<double>(boundary.size());
    rep.log2_extension = l2a * static_cast<double>(interior);
    rep.provenance = Provenance::Exact;
    if (rep.log2_extension <= 1.0 + 1e-12) {  // |E(u)| <= 2 for every row
      rep.trivial = true;
      return rep;
    }
    ScaledLog term = (rep.log2_extension <= 19.9)
                         ? log2_factorial_exact(static_cast<std::uint64_t>(
                               std::llround(std::exp2(rep.log2_extension))))
                         : log2_factorial_stirling(rep.log2_extension, 0);
    term = term.minus_scalar(1.0);  // |Alt(E)| = E!/2 per row
    rep.log2_kn = term.times(ScaledLog::exp2_of(rep.log2_num_rows));
  } else {
    ExtensionTable table = extension_table(spec, cn, s, budget);
    rep.provenance = table.provenance;
    rep.log2_num_rows = std::log2(static_cast<double>(table.rows.size()));
    BigInt max_count = 0;
    ScaledLog total;
    bool any = false;
    for (const auto& row : table.rows) {
      if (row.count > max_count) max_count = row.count;
      if (row.count <= 2) continue;  // Alt(E) trivial for E <= 2
      ScaledLog term = log2_factorial(row.count).minus_scalar(1.0);
      total = total.plus(term);
      any = true;
    }
    rep.log2_extension = max_count > 0 ? log2_of(max_count) : 0;
    if (!any) {
      rep.trivial = true;
      return rep;
    }
    rep.log2_kn = total;
  }
  double abs_err = 0;
  rep.loglog_kn = rep.log2_kn.log2_value(&abs_err);
  const double index_d = rep.index.convert_to<double>();
  rep.a_n = rep.loglog_kn / index_d;
  rep.error_bound = abs_err / index_d + kEps * std::abs(rep.a_n);
  return rep;
}

std::vector<KnReport> entropy_recovery_sequence(const SftSpec& spec, Coord base_k, double s,
                                                int n_max, Budget& budget) {
  Tower tower = build_centered_tower(base_k, spec.dim, n_max);
  std::vector<KnReport> out;
  for (int n = 1; n <= n_max; ++n) {
    KnReport rep = kn_loglog_order(spec, tower.subgroups[n - 1], tower.domains[n - 1], s, budget);
    rep.level = n;
    out.push_back(std::move(rep));
  }
  return out;
}

std::optional<std::pair<long, long>> log_ratio_rational(const BigInt& a, const BigInt& b) {
  if (a < 2 || b < 2) throw Error(ErrorKind::BadArgument, "arguments must be at least 2");
  auto fa = factorize(a);
  auto fb = factorize(b);
  if (fa.size() != fb.size()) return std::nullopt;
  for (auto& [p, e] : fa)
    if (!fb.count(p)) return std::nullopt;
  // a^m = b^n iff m*alpha_p = n*beta_p for every prime p.
  long alpha0 = fa.begin()->second;
  long beta0 = fb.at(fa.begin()->first);
  long g = std::gcd(alpha0, beta0);
  long n = alpha0 / g, m = beta0 / g;
  for (auto& [p, e] : fa) {
    if (static_cast<long long>(m) * e != static_cast<long long>(n) * fb.at(p))
      return std::nullopt;
  }
  return std::make_pair(m, n);
}

bool index_ratio_identity_check(const BigInt& a, const BigInt& b, long idx1, long idx2) {
  if (a < 2 || b < 2) throw Error(ErrorKind::BadArgument, "arguments must be at least 2");
  if (idx1 < 1 || idx2 < 1) throw Error(ErrorKind::BadArgument, "indices must be positive");
  auto fa = factorize(a);
  auto fb = factorize(b);
  if (fa.size() != fb.size()) return false;
  for (auto& [p, e] : fa) {
    auto it = fb.find(p);
    if (it == fb.end()) return false;
    if (static_cast<long long>(idx1) * e != static_cast<long long>(idx2) * it->second)
      return false;
  }
  return true;
}

}  // namespace sftlab
