#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace sftlab {

using BigInt = boost::multiprecision::cpp_int;

enum class ErrorKind {
  SingularBasis,
  EvenBase,
  BudgetExceeded,
  ZeroNotFixed,
  NoTracks,
  InvalidCondition,
  NotBijective,
  ContextUnsafe,
  OddPermutation,
  MarginTooSmall,
  DegreeTooLarge,
  OverlappingSupports,
  Inadmissible,
  ZeroConfig,
  OrbitsNotDistinct,
  SeparationTooSmall,
  OrbitEquivalent,
  HypothesesFail,
  DegenerateExtensionCount,
  IncompatibleLattice,
  BadSpec,
  BadArgument,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Node-count budget shared by search/enumeration operations. Exhaustion is an
// error, never a silent approximation.
class Budget {
 public:
  explicit Budget(std::uint64_t limit = kDefaultLimit) : limit_(limit) {}

  void charge(std::uint64_t n = 1) {
    used_ += n;
    if (used_ > limit_) throw Error(ErrorKind::BudgetExceeded, "node budget of " + std::to_string(limit_) + " exhausted");
  }
  std::uint64_t used() const { return used_; }
  std::uint64_t limit() const { return limit_; }

  static constexpr std::uint64_t kDefaultLimit = 200'000'000;

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

// log2 of a positive big integer, correct to double precision.
double log2_of(const BigInt& n);

// True and exponent returned when n is an exact power of two.
bool exact_power_of_two(const BigInt& n, std::int64_t* exponent);

}  // namespace sftlab
