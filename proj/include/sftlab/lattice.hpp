#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sftlab/common.hpp"

namespace sftlab {

using Coord = std::int64_t;
using Vec = std::vector<Coord>;

Vec vec_add(const Vec& a, const Vec& b);
Vec vec_sub(const Vec& a, const Vec& b);
Vec vec_neg(const Vec& a);
Coord linf_norm(const Vec& a);
Coord linf_dist(const Vec& a, const Vec& b);

// Inductive lexicographic order on Z^d.
bool lex_less(const Vec& a, const Vec& b);

struct VecHash {
  std::size_t operator()(const Vec& v) const noexcept;
};

// A finite subset of Z^d held sorted (lex) and duplicate-free.
class FiniteSet {
 public:
  FiniteSet() = default;
  explicit FiniteSet(std::vector<Vec> points);

  static FiniteSet interval(Coord lo, Coord hi);                  // d = 1
  static FiniteSet box(const Vec& lo, const Vec& hi);             // product of [lo_i, hi_i]
  static FiniteSet centered_box(int dim, Coord radius);
  static FiniteSet singleton(const Vec& v);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  int dim() const { return points_.empty() ? 0 : static_cast<int>(points_[0].size()); }
  const std::vector<Vec>& points() const { return points_; }
  const Vec& operator[](std::size_t i) const { return points_[i]; }

  bool contains(const Vec& v) const;
  std::optional<std::size_t> index_of(const Vec& v) const;
  bool subset_of(const FiniteSet& other) const;

  FiniteSet translate(const Vec& v) const;
  FiniteSet union_with(const FiniteSet& other) const;
  FiniteSet intersect_with(const FiniteSet& other) const;
  FiniteSet minus(const FiniteSet& other) const;
  FiniteSet minkowski_sum(const FiniteSet& other) const;
  FiniteSet negate() const;

  // Is this an interval [lo, hi] (d = 1 only)?
  bool is_interval(Coord* lo = nullptr, Coord* hi = nullptr) const;

  Coord max_linf_norm() const;   // 0 on empty
  Coord diameter_linf() const;   // max pairwise distance, 0 on empty/singleton

  bool operator==(const FiniteSet& other) const { return points_ == other.points_; }

 private:
  std::vector<Vec> points_;
};

// Cells of F within distance S of the complement (inner boundary reading).
FiniteSet inner_boundary(const FiniteSet& f, double s);
// All cells within distance r of F.
FiniteSet ball(const FiniteSet& f, Coord r);
FiniteSet ball_around(const Vec& center, Coord r, int dim);

// Finite-index subgroup of Z^d. Basis columns generate the lattice; the matrix
// is kept in column Hermite normal form: lower triangular, positive diagonal,
// and each below-diagonal entry reduced modulo the diagonal of its row. This
// form is unique per subgroup.
class LatticeSubgroup {
 public:
  // matrix[i][j] is row i, column j; columns are generators.
  static LatticeSubgroup from_basis(const std::vector<std::vector<Coord>>& matrix);
  static LatticeSubgroup diagonal(const std::vector<Coord>& diag);
  static LatticeSubgroup scaled_identity(int dim, Coord k);

  int dim() const { return dim_; }
  const std::vector<std::vector<Coord>>& basis() const { return basis_; }

  BigInt index() const;

  // Unique representative of v's coset inside the HNF digit box
  // {x : 0 <= x_i < basis[i][i]}.
  Vec reduce(const Vec& v) const;
  bool contains(const Vec& v) const;

  // All digit-box representatives, in lex order. Size equals the index.
  FiniteSet fundamental_domain() const;

  bool operator==(const LatticeSubgroup& other) const { return basis_ == other.basis_; }

  // Subgroup relation: every generator of this lies in `other`.
  bool subgroup_of(const LatticeSubgroup& other) const;

 private:
  LatticeSubgroup(int dim, std::vector<std::vector<Coord>> basis)
      : dim_(dim), basis_(std::move(basis)) {}
  int dim_;
  std::vector<std::vector<Coord>> basis_;
};

LatticeSubgroup intersect(const LatticeSubgroup& l1, const LatticeSubgroup& l2);

struct CommensurabilityResult {
  LatticeSubgroup intersection;
  BigInt index_in_l1;  // [L1 : L1 cap L2]
  BigInt index_in_l2;  // [L2 : L1 cap L2]
};
CommensurabilityResult commensurable_check(const LatticeSubgroup& l1, const LatticeSubgroup& l2);

struct Tower {
  std::vector<LatticeSubgroup> subgroups;
  std::vector<FiniteSet> domains;
  std::size_t depth() const { return subgroups.size(); }
};

// H_n = k^n Z^d with centered boxes C_n of radius (k^n - 1)/2; k must be odd.
Tower build_centered_tower(Coord k, int dim, int depth);

struct TowerCheckResult {
  bool pass = true;
  std::string first_violation;       // empty when pass
  std::vector<double> folner_ratios; // |d_1 D_m| / |D_m| per level, informational
};
TowerCheckResult verify_tower(const Tower& tower);

}  // namespace sftlab
