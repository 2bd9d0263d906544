#include "sftlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace sftlab {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularBasis: return "SingularBasis";
    case ErrorKind::EvenBase: return "EvenBase";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::ZeroNotFixed: return "ZeroNotFixed";
    case ErrorKind::NoTracks: return "NoTracks";
    case ErrorKind::InvalidCondition: return "InvalidCondition";
    case ErrorKind::NotBijective: return "NotBijective";
    case ErrorKind::ContextUnsafe: return "ContextUnsafe";
    case ErrorKind::OddPermutation: return "OddPermutation";
    case ErrorKind::MarginTooSmall: return "MarginTooSmall";
    case ErrorKind::DegreeTooLarge: return "DegreeTooLarge";
    case ErrorKind::OverlappingSupports: return "OverlappingSupports";
    case ErrorKind::Inadmissible: return "Inadmissible";
    case ErrorKind::ZeroConfig: return "ZeroConfig";
    case ErrorKind::OrbitsNotDistinct: return "OrbitsNotDistinct";
    case ErrorKind::SeparationTooSmall: return "SeparationTooSmall";
    case ErrorKind::OrbitEquivalent: return "OrbitEquivalent";
    case ErrorKind::HypothesesFail: return "HypothesesFail";
    case ErrorKind::DegenerateExtensionCount: return "DegenerateExtensionCount";
    case ErrorKind::IncompatibleLattice: return "IncompatibleLattice";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::BadArgument: return "BadArgument";
  }
  return "UnknownError";
}

double log2_of(const BigInt& n) {
  if (n <= 0) throw Error(ErrorKind::BadArgument, "log2 of nonpositive integer");
  const std::size_t bits = boost::multiprecision::msb(n);  // floor(log2 n)
  if (bits <= 62) return std::log2(static_cast<double>(n.convert_to<std::uint64_t>()));
  // Top 64 bits carry full double precision.
  BigInt top = n >> (bits - 63);
  return std::log2(static_cast<double>(top.convert_to<std::uint64_t>())) +
         static_cast<double>(bits - 63);
}

bool exact_power_of_two(const BigInt& n, std::int64_t* exponent) {
  if (n <= 0) return false;
  const std::size_t bits = boost::multiprecision::msb(n);
  if ((BigInt(1) << bits) != n) return false;
  if (exponent) *exponent = static_cast<std::int64_t>(bits);
  return true;
}

Vec vec_add(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec vec_sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec vec_neg(const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

Coord linf_norm(const Vec& a) {
  Coord m = 0;
  for (Coord c : a) m = std::max(m, std::abs(c));
  return m;
}

Coord linf_dist(const Vec& a, const Vec& b) {
  Coord m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::size_t VecHash::operator()(const Vec& v) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull ^ v.size();
  for (Coord c : v) {
    std::size_t x = static_cast<std::size_t>(c) * 0xbf58476d1ce4e5b9ull;
    x ^= x >> 31;
    h = (h ^ x) * 0x94d049bb133111ebull;
  }
  return h;
}

FiniteSet::FiniteSet(std::vector<Vec> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end(), lex_less);
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  for (const Vec& p : points_) {
    if (p.size() != points_[0].size())
      throw Error(ErrorKind::BadArgument, "mixed dimensions in finite set");
  }
}

FiniteSet FiniteSet::interval(Coord lo, Coord hi) {
  std::vector<Vec> pts;
  for (Coord x = lo; x <= hi; ++x) pts.push_back({x});
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::box(const Vec& lo, const Vec& hi) {
  const int d = static_cast<int>(lo.size());
  std::vector<Vec> pts;
  Vec cur = lo;
  while (true) {
    pts.push_back(cur);
    int i = d - 1;
    while (i >= 0) {
      if (++cur[i] <= hi[i]) break;
      cur[i] = lo[i];
      --i;
    }
    if (i < 0) break;
  }
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::centered_box(int dim, Coord radius) {
  Vec lo(dim, -radius), hi(dim, radius);
  return box(lo, hi);
}

FiniteSet FiniteSet::singleton(const Vec& v) { return FiniteSet({v}); }

bool FiniteSet::contains(const Vec& v) const {
  return std::binary_search(points_.begin(), points_.end(), v, lex_less);
}

std::optional<std::size_t> FiniteSet::index_of(const Vec& v) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), v, lex_less);
  if (it == points_.end() || *it != v) return std::nullopt;
  return static_cast<std::size_t>(it - points_.begin());
}

bool FiniteSet::subset_of(const FiniteSet& other) const {
  return std::includes(other.points_.begin(), other.points_.end(), points_.begin(),
                       points_.end(), lex_less);
}

FiniteSet FiniteSet::translate(const Vec& v) const {
  std::vector<Vec> pts;
  pts.reserve(points_.size());
  for (const Vec& p : points_) pts.push_back(vec_add(p, v));
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::union_with(const FiniteSet& other) const {
  std::vector<Vec> pts = points_;
  pts.insert(pts.end(), other.points_.begin(), other.points_.end());
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::intersect_with(const FiniteSet& other) const {
  std::vector<Vec> pts;
  for (const Vec& p : points_)
    if (other.contains(p)) pts.push_back(p);
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::minus(const FiniteSet& other) const {
  std::vector<Vec> pts;
  for (const Vec& p : points_)
    if (!other.contains(p)) pts.push_back(p);
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::minkowski_sum(const FiniteSet& other) const {
  std::vector<Vec> pts;
  pts.reserve(points_.size() * other.points_.size());
  for (const Vec& p : points_)
    for (const Vec& q : other.points_) pts.push_back(vec_add(p, q));
  return FiniteSet(std::move(pts));
}

FiniteSet FiniteSet::negate() const {
  std::vector<Vec> pts;
  pts.reserve(points_.size());
  for (const Vec& p : points_) pts.push_back(vec_neg(p));
  return FiniteSet(std::move(pts));
}

bool FiniteSet::is_interval(Coord* lo, Coord* hi) const {
  if (empty() || dim() != 1) return false;
  Coord a = points_.front()[0], b = points_.back()[0];
  if (static_cast<Coord>(points_.size()) != b - a + 1) return false;
  if (lo) *lo = a;
  if (hi) *hi = b;
  return true;
}

Coord FiniteSet::max_linf_norm() const {
  Coord m = 0;
  for (const Vec& p : points_) m = std::max(m, linf_norm(p));
  return m;
}

Coord FiniteSet::diameter_linf() const {
  Coord m = 0;
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      m = std::max(m, linf_dist(points_[i], points_[j]));
  return m;
}

FiniteSet inner_boundary(const FiniteSet& f, double s) {
  if (f.empty()) return f;
  const Coord si = static_cast<Coord>(std::floor(s));
  std::vector<Vec> pts;
  for (const Vec& p : f.points()) {
    // p is boundary iff some cell within distance floor(s) lies outside f.
    bool is_boundary = false;
    FiniteSet nb = ball_around(p, si, f.dim());
    for (const Vec& q : nb.points()) {
      if (!f.contains(q)) {
        is_boundary = true;
        break;
      }
    }
    if (is_boundary) pts.push_back(p);
  }
  return FiniteSet(std::move(pts));
}

FiniteSet ball(const FiniteSet& f, Coord r) {
  std::vector<Vec> pts;
  for (const Vec& p : f.points()) {
    FiniteSet nb = ball_around(p, r, f.dim());
    pts.insert(pts.end(), nb.points().begin(), nb.points().end());
  }
  return FiniteSet(std::move(pts));
}

FiniteSet ball_around(const Vec& center, Coord r, int dim) {
  Vec lo(dim), hi(dim);
  for (int i = 0; i < dim; ++i) {
    lo[i] = center[i] - r;
    hi[i] = center[i] + r;
  }
  return FiniteSet::box(lo, hi);
}

namespace {

// Column HNF in place by integer column operations. Requires nonsingular d x d.
void column_hnf(std::vector<std::vector<Coord>>& m) {
  const int d = static_cast<int>(m.size());
  for (int row = 0; row < d; ++row) {
    // Euclidean elimination across columns row.. using row `row`.
    for (int col = row + 1; col < d; ++col) {
      while (m[row][col] != 0) {
        if (m[row][row] == 0) {
          for (int i = 0; i < d; ++i) std::swap(m[i][row], m[i][col]);
          continue;
        }
        Coord q = m[row][col] / m[row][row];
        for (int i = 0; i < d; ++i) m[i][col] -= q * m[i][row];
        if (m[row][col] != 0) {
          for (int i = 0; i < d; ++i) std::swap(m[i][row], m[i][col]);
        }
      }
    }
    if (m[row][row] == 0) throw Error(ErrorKind::SingularBasis, "basis is singular");
    if (m[row][row] < 0) {
      for (int i = 0; i < d; ++i) m[i][row] = -m[i][row];
    }
    // Reduce earlier columns so entries in this row lie in [0, pivot).
    for (int col = 0; col < row; ++col) {
      Coord q = m[row][col] / m[row][row];
      if (m[row][col] - q * m[row][row] < 0) --q;
      if (q != 0)
        for (int i = 0; i < d; ++i) m[i][col] -= q * m[i][row];
    }
  }
}

}  // namespace

LatticeSubgroup LatticeSubgroup::from_basis(const std::vector<std::vector<Coord>>& matrix) {
  const int d = static_cast<int>(matrix.size());
  if (d == 0) throw Error(ErrorKind::BadArgument, "empty basis");
  for (const auto& row : matrix)
    if (static_cast<int>(row.size()) != d)
      throw Error(ErrorKind::BadArgument, "basis matrix not square");
  std::vector<std::vector<Coord>> m = matrix;
  column_hnf(m);
  return LatticeSubgroup(d, std::move(m));
}

LatticeSubgroup LatticeSubgroup::diagonal(const std::vector<Coord>& diag) {
  const int d = static_cast<int>(diag.size());
  std::vector<std::vector<Coord>> m(d, std::vector<Coord>(d, 0));
  for (int i = 0; i < d; ++i) m[i][i] = diag[i];
  return from_basis(m);
}

LatticeSubgroup LatticeSubgroup::scaled_identity(int dim, Coord k) {
  return diagonal(std::vector<Coord>(dim, k));
}

BigInt LatticeSubgroup::index() const {
  BigInt p = 1;
  for (int i = 0; i < dim_; ++i) p *= basis_[i][i];
  return p;
}

Vec LatticeSubgroup::reduce(const Vec& v) const {
  if (static_cast<int>(v.size()) != dim_)
    throw Error(ErrorKind::BadArgument, "vector dimension mismatch");
  Vec x = v;
  // Forward substitution; column i has zeros above row i.
  for (int i = 0; i < dim_; ++i) {
    Coord p = basis_[i][i];
    Coord q = x[i] / p;
    if (x[i] - q * p < 0) --q;
    if (q != 0)
      for (int j = i; j < dim_; ++j) x[j] -= q * basis_[j][i];
  }
  return x;
}

bool LatticeSubgroup::contains(const Vec& v) const {
  Vec x = v;
  for (int i = 0; i < dim_; ++i) {
    if (x[i] % basis_[i][i] != 0) return false;
    Coord q = x[i] / basis_[i][i];
    for (int j = i; j < dim_; ++j) x[j] -= q * basis_[j][i];
  }
  return true;
}

FiniteSet LatticeSubgroup::fundamental_domain() const {
  BigInt idx = index();
  if (idx > 10'000'000)
    throw Error(ErrorKind::BudgetExceeded, "fundamental domain too large to enumerate");
  Vec lo(dim_, 0), hi(dim_);
  for (int i = 0; i < dim_; ++i) hi[i] = basis_[i][i] - 1;
  return FiniteSet::box(lo, hi);
}

bool LatticeSubgroup::subgroup_of(const LatticeSubgroup& other) const {
  if (dim_ != other.dim_) return false;
  for (int col = 0; col < dim_; ++col) {
    Vec gen(dim_);
    for (int i = 0; i < dim_; ++i) gen[i] = basis_[i][col];
    if (!other.contains(gen)) return false;
  }
  return true;
}

LatticeSubgroup intersect(const LatticeSubgroup& l1, const LatticeSubgroup& l2) {
  if (l1.dim() != l2.dim()) throw Error(ErrorKind::BadArgument, "dimension mismatch");
  const int d = l1.dim();
  // Integer kernel of [B1 | -B2]: columns (a; b) with B1 a = B2 b. The
  // intersection is generated by B1 a over a kernel basis. Column-reduce the
  // d x 2d matrix with a tracked 2d x 2d unimodular transform.
  std::vector<std::vector<Coord>> m(d, std::vector<Coord>(2 * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      m[i][j] = l1.basis()[i][j];
      m[i][d + j] = -l2.basis()[i][j];
    }
  std::vector<std::vector<Coord>> u(2 * d, std::vector<Coord>(2 * d, 0));
  for (int i = 0; i < 2 * d; ++i) u[i][i] = 1;

  int lead = 0;
  for (int row = 0; row < d && lead < 2 * d; ++row) {
    int pivot = -1;
    for (int col = lead; col < 2 * d; ++col)
      if (m[row][col] != 0) {
        pivot = col;
        break;
      }
    if (pivot < 0) continue;
    for (int i = 0; i < d; ++i) std::swap(m[i][lead], m[i][pivot]);
    for (int i = 0; i < 2 * d; ++i) std::swap(u[i][lead], u[i][pivot]);
    for (int col = lead + 1; col < 2 * d; ++col) {
      while (m[row][col] != 0) {
        Coord q = m[row][col] / m[row][lead];
        for (int i = 0; i < d; ++i) m[i][col] -= q * m[i][lead];
        for (int i = 0; i < 2 * d; ++i) u[i][col] -= q * u[i][lead];
        if (m[row][col] != 0) {
          for (int i = 0; i < d; ++i) std::swap(m[i][lead], m[i][col]);
          for (int i = 0; i < 2 * d; ++i) std::swap(u[i][lead], u[i][col]);
        }
      }
    }
    ++lead;
  }
  // Columns lead..2d-1 of u span the kernel; both lattices are full rank so
  // there are exactly d of them.
  if (2 * d - lead != d) throw Error(ErrorKind::SingularBasis, "degenerate intersection");
  std::vector<std::vector<Coord>> gens(d, std::vector<Coord>(d, 0));
  for (int k = 0; k < d; ++k) {
    // a-part of kernel column, mapped through B1.
    for (int i = 0; i < d; ++i) {
      Coord acc = 0;
      for (int j = 0; j < d; ++j) acc += l1.basis()[i][j] * u[j][lead + k];
      gens[i][k] = acc;
    }
  }
  return LatticeSubgroup::from_basis(gens);
}

CommensurabilityResult commensurable_check(const LatticeSubgroup& l1, const LatticeSubgroup& l2) {
  LatticeSubgroup cap = intersect(l1, l2);
  BigInt idx = cap.index();
  return CommensurabilityResult{cap, idx / l1.index(), idx / l2.index()};
}

Tower build_centered_tower(Coord k, int dim, int depth) {
  if (k < 3 || k % 2 == 0)
    throw Error(ErrorKind::EvenBase, "centered tower requires odd base k >= 3");
  Tower t;
  Coord kn = 1;
  for (int n = 1; n <= depth; ++n) {
    kn *= k;
    t.subgroups.push_back(LatticeSubgroup::scaled_identity(dim, kn));
    t.domains.push_back(FiniteSet::centered_box(dim, (kn - 1) / 2));
  }
  return t;
}

TowerCheckResult verify_tower(const Tower& tower) {
  TowerCheckResult res;
  const std::size_t levels = tower.depth();
  if (levels == 0 || tower.domains.size() != levels) {
    res.pass = false;
    res.first_violation = "malformed tower";
    return res;
  }
  for (std::size_t i = 0; i < levels; ++i) {
    const auto& h = tower.subgroups[i];
    const auto& d = tower.domains[i];
    // (1) fundamental domain: right cardinality and pairwise distinct cosets.
    if (BigInt(d.size()) != h.index()) {
      res.pass = false;
      res.first_violation = "condition (1) at level " + std::to_string(i + 1) +
                            ": |D| != index";
      return res;
    }
    std::set<Vec> seen;
    for (const Vec& p : d.points()) {
      if (!seen.insert(h.reduce(p)).second) {
        res.pass = false;
        res.first_violation = "condition (1) at level " + std::to_string(i + 1) +
                              ": repeated coset";
        return res;
      }
    }
    // (2) identity contained and nesting.
    if (!d.contains(Vec(d.dim(), 0))) {
      res.pass = false;
      res.first_violation = "condition (2) at level " + std::to_string(i + 1) + ": 0 not in D";
      return res;
    }
    if (i + 1 < levels) {
      if (!d.subset_of(tower.domains[i + 1])) {
        res.pass = false;
        res.first_violation = "condition (2) at level " + std::to_string(i + 1) +
                              ": D not nested in next level";
        return res;
      }
      if (!tower.subgroups[i + 1].subgroup_of(h)) {
        res.pass = false;
        res.first_violation = "subgroups not nested at level " + std::to_string(i + 1);
        return res;
      }
    }
  }
  // (4) tiling compatibility for every pair n > m.
  for (std::size_t n = 1; n < levels; ++n) {
    for (std::size_t m = 0; m < n; ++m) {
      const auto& dn = tower.domains[n];
      const auto& dm = tower.domains[m];
      const auto& hm = tower.subgroups[m];
      std::vector<Vec> rebuilt;
      for (const Vec& g : dn.points()) {
        if (hm.contains(g)) {
          for (const Vec& p : dm.points()) rebuilt.push_back(vec_add(g, p));
        }
      }
      if (FiniteSet(std::move(rebuilt)) != dn) {
        res.pass = false;
        res.first_violation = "condition (4) between levels " + std::to_string(m + 1) +
                              " and " + std::to_string(n + 1);
        return res;
      }
    }
  }
  for (const auto& d : tower.domains) {
    res.folner_ratios.push_back(static_cast<double>(inner_boundary(d, 1).size()) /
                                static_cast<double>(d.size()));
  }
  return res;
}

}  // namespace sftlab
