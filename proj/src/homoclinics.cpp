#include "sftlab/homoclinics.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sftlab {

namespace {

Vec unit_e1(int dim) {
  Vec v(dim, 0);
  v[0] = 1;
  return v;
}

Coord min_dist_to_others(const FiniteSet& support, const Vec& cell) {
  Coord best = -1;
  for (const Vec& s : support.points()) {
    if (s == cell) continue;
    Coord d = linf_dist(s, cell);
    if (best < 0 || d < best) best = d;
  }
  return best;  // -1 when there is nothing else
}

}  // namespace

FiniteConfig sum_disjoint(const SftSpec& spec, const FiniteConfig& x, const FiniteConfig& y) {
  for (const Vec& c : x.support.points())
    if (y.support.contains(c))
      throw Error(ErrorKind::OverlappingSupports, "supports overlap");
  std::vector<Vec> cells = x.support.points();
  cells.insert(cells.end(), y.support.points().begin(), y.support.points().end());
  FiniteSet supp(cells);
  std::vector<Symbol> vals(supp.size());
  for (std::size_t i = 0; i < x.support.size(); ++i)
    vals[*supp.index_of(x.support[i])] = x.values[i];
  for (std::size_t i = 0; i < y.support.size(); ++i)
    vals[*supp.index_of(y.support[i])] = y.values[i];
  FiniteConfig out{supp, vals};
  if (!is_admissible_config(out, spec))
    throw Error(ErrorKind::Inadmissible, "sum is not admissible");
  return out;
}

FiniteConfig translate_config(const FiniteConfig& x, const Vec& v) {
  FiniteSet supp = x.support.translate(v);
  std::vector<Symbol> vals(x.values.size());
  for (std::size_t i = 0; i < x.support.size(); ++i)
    vals[*supp.index_of(vec_add(x.support[i], v))] = x.values[i];
  return FiniteConfig{supp, vals};
}

FiniteConfig good_position(const FiniteConfig& x) {
  if (x.support.empty()) throw Error(ErrorKind::ZeroConfig, "zero configuration has no position");
  return translate_config(x, vec_neg(x.support[0]));
}

std::optional<Vec> orbit_equivalent(const FiniteConfig& x, const FiniteConfig& y) {
  if (x.support.size() != y.support.size()) return std::nullopt;
  if (x.support.empty()) return Vec{};
  Vec v = vec_sub(y.support[0], x.support[0]);
  if (translate_config(x, v) == y) return v;
  return std::nullopt;
}

GliderSystem GliderSystem::build(std::shared_ptr<const SftSpec> spec, Symbol a1, Symbol a2,
                                 Params params, Budget& budget) {
  if (!spec->zero) throw Error(ErrorKind::BadSpec, "glider system needs a zero symbol");
  const Symbol zero = *spec->zero;
  if (a1 == a2 || a1 == zero || a2 == zero)
    throw Error(ErrorKind::BadArgument, "glider species must be distinct nonzero symbols");
  if (params.r < 2 || params.r < spec->window_size())
    throw Error(ErrorKind::BadArgument, "radius must be at least 2 and cover the window");
  for (Symbol a : {a1, a2}) {
    FiniteConfig single{FiniteSet::singleton(Vec(spec->dim, 0)), {a}};
    if (!is_admissible_config(single, *spec))
      throw Error(ErrorKind::BadArgument, "glider symbol is not isolated-admissible");
  }
  GliderSystem gs;
  gs.spec_ = spec;
  gs.a1_ = a1;
  gs.a2_ = a2;
  gs.params_ = params;
  if (gs.params_.symbol_isolation <= 0) gs.params_.symbol_isolation = 2 * params.r;
  if (gs.params_.occurrence_separation <= 0) gs.params_.occurrence_separation = 3 * params.r;
  const Coord iso = gs.params_.symbol_isolation;
  const Coord occ = gs.params_.occurrence_separation;
  const int dim = spec->dim;
  const Vec e1 = unit_e1(dim);

  // f: exchange the species of a symbol with no other support within r.
  {
    FiniteSet n = ball_around(Vec(dim, 0), params.r - 1, dim);
    const std::size_t center = *n.index_of(Vec(dim, 0));
    auto rule = [zero, a1, a2, center](std::size_t, const std::vector<Symbol>& vals) -> Symbol {
      Symbol s = vals[center];
      if (s != a1 && s != a2) return s;
      for (std::size_t j = 0; j < vals.size(); ++j)
        if (j != center && vals[j] != zero) return s;
      return s == a1 ? a2 : a1;
    };
    gs.f_ = BlockMap::functional(spec, n, rule, std::nullopt, "glider_f");
  }

  // g: walk a doubly isolated symbol one step (0a1 <-> a20). An occurrence is
  // the two-cell pattern at {p, p+e1}; activity requires every other nonzero
  // symbol at distance >= iso from that cell pair and every other occurrence
  // pair at distance >= occ. Referencing the invariant cell pair (not the
  // moving a-cell) is what makes the gate an involution.
  {
    FiniteSet n = ball_around(Vec(dim, 0), occ + 2, dim);
    auto npts = std::make_shared<FiniteSet>(n);
    auto rule = [zero, a1, a2, iso, occ, npts, e1](std::size_t,
                                                   const std::vector<Symbol>& vals) -> Symbol {
      auto at = [&](const Vec& v) -> Symbol {
        auto idx = npts->index_of(v);
        return idx ? vals[*idx] : zero;  // cells beyond the ball are irrelevant
      };
      auto pair_dist = [&](const Vec& c, const Vec& p) {
        return std::min(linf_dist(c, p), linf_dist(c, vec_add(p, e1)));
      };
      // Occurrence anchored at p: (0,a1) or (a2,0) on {p, p+e1}.
      auto is_occurrence = [&](const Vec& p) {
        Symbol s0 = at(p), s1 = at(vec_add(p, e1));
        return (s0 == zero && s1 == a1) || (s0 == a2 && s1 == zero);
      };
      auto active = [&](const Vec& p) {
        const Vec p1 = vec_add(p, e1);
        FiniteSet near = ball_around(p, iso - 1, static_cast<int>(p.size()))
                             .union_with(ball_around(p1, iso - 1, static_cast<int>(p.size())));
        for (const Vec& c : near.points()) {
          if (c == p || c == p1) continue;
          if (at(c) != zero) return false;
        }
        FiniteSet scan = ball_around(p, occ, static_cast<int>(p.size()))
                             .union_with(ball_around(p1, occ, static_cast<int>(p.size())));
        for (const Vec& q : scan.points()) {
          if (q == p) continue;
          if (!is_occurrence(q)) continue;
          Coord d = std::min(pair_dist(q, p), pair_dist(vec_add(q, e1), p));
          if (d < occ) return false;
        }
        return true;
      };
      const Vec v0(e1.size(), 0);
      const Vec left = vec_neg(e1);
      // v0 as the first cell of an occurrence.
      if (is_occurrence(v0) && active(v0)) {
        Symbol s0 = at(v0);
        return s0 == zero ? a2 : zero;  // (0,a1)->(a2,0) or (a2,0)->(0,a1)
      }
      // v0 as the second cell.
      if (is_occurrence(left) && active(left)) {
        Symbol s1 = at(v0);
        return s1 == a1 ? zero : a1;
      }
      return at(v0);
    };
    gs.g_ = BlockMap::functional(spec, n, rule, std::nullopt, "glider_g");
  }

  gs.h_ = compose(gs.g_, gs.f_, budget);
  gs.h_.set_name("glider_h");

  if (params.verify) {
    // f is an involution as a full rule table when tabulation is feasible.
    if (dim == 1 && std::pow(spec->alphabet_size(), 4 * params.r - 3) <= 1e6) {
      if (!maps_equal(compose(gs.f_, gs.f_, budget), identity_map(spec), budget).equal)
        throw Error(ErrorKind::BadArgument, "glider f failed the involution table check");
    }
    // g is the product of commuting anchored gates; certify the gate table.
    if (dim == 1) {
      if (!gs.gate_involution_check(budget))
        throw Error(ErrorKind::BadArgument, "anchored gate failed the involution table check");
    }
    // Exhaustive involution check on sparse configurations (all geometries
    // within one interaction radius) plus cardinality conservation under h.
    const Coord w = 2 * occ + 2;
    std::vector<Vec> window_cells;
    for (Coord c = -w; c <= w; ++c) {
      Vec v(dim, 0);
      v[0] = c;
      window_cells.push_back(v);
    }
    std::vector<Symbol> species = {a1, a2};
    std::vector<std::size_t> pick(3);
    const std::size_t wn = window_cells.size();
    for (std::size_t i = 0; i < wn; ++i) {
      for (std::size_t j = i; j < wn; ++j) {
        for (std::size_t k = j; k < wn; ++k) {
          for (int mask = 0; mask < 8; ++mask) {
            std::vector<Vec> cells;
            std::vector<Symbol> vals;
            std::set<Vec> used;
            std::vector<std::size_t> ids = {i, j, k};
            bool ok = true;
            for (int t = 0; t < 3; ++t) {
              if (t == 1 && j == i) continue;
              if (t == 2 && (k == j || k == i)) continue;
              const Vec& cell = window_cells[ids[t]];
              if (!used.insert(cell).second) {
                ok = false;
                break;
              }
              cells.push_back(cell);
              vals.push_back(species[(mask >> t) & 1]);
            }
            if (!ok) continue;
            budget.charge();
            FiniteSet supp(cells);
            std::vector<Symbol> sorted_vals(supp.size());
            for (std::size_t t = 0; t < cells.size(); ++t)
              sorted_vals[*supp.index_of(cells[t])] = vals[t];
            FiniteConfig x{supp, sorted_vals};
            if (!is_admissible_config(x, *spec)) continue;
            if (!(gs.step_f(gs.step_f(x)) == x))
              throw Error(ErrorKind::BadArgument, "glider f failed a sparse involution check");
            if (!(gs.step_g(gs.step_g(x)) == x))
              throw Error(ErrorKind::BadArgument, "glider g failed a sparse involution check");
            if (gs.step_h(x).support.size() != x.support.size())
              throw Error(ErrorKind::BadArgument, "glider h failed cardinality conservation");
          }
        }
      }
    }
  }
  return gs;
}

FiniteConfig GliderSystem::step_f(const FiniteConfig& x) const {
  std::vector<Vec> cells = x.support.points();
  std::vector<Symbol> vals = x.values;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    Symbol s = vals[i];
    if (s != a1_ && s != a2_) continue;
    Coord d = min_dist_to_others(x.support, cells[i]);
    if (d < 0 || d >= params_.r) vals[i] = (s == a1_) ? a2_ : a1_;
  }
  return FiniteConfig{x.support, vals};
}

FiniteConfig GliderSystem::step_g(const FiniteConfig& x) const {
  const Symbol zero = *spec_->zero;
  const Vec e1 = unit_e1(spec_->dim);
  const Coord iso = params_.symbol_isolation;
  const Coord occ = params_.occurrence_separation;

  struct Occ {
    Vec pos;     // first cell of the pair {pos, pos+e1}
    bool right;  // true: (0,a1), false: (a2,0)
  };
  std::vector<Occ> occs;
  for (std::size_t i = 0; i < x.support.size(); ++i) {
    const Vec& q = x.support[i];
    Symbol s = x.values[i];
    if (s == a1_ && x.at(vec_sub(q, e1), zero) == zero) occs.push_back({vec_sub(q, e1), true});
    if (s == a2_ && x.at(vec_add(q, e1), zero) == zero) occs.push_back({q, false});
  }
  auto pair_dist = [&](const Vec& c, const Vec& p) {
    return std::min(linf_dist(c, p), linf_dist(c, vec_add(p, e1)));
  };
  std::vector<Occ> active;
  for (const Occ& o : occs) {
    const Vec p1 = vec_add(o.pos, e1);
    bool blocked = false;
    for (const Vec& c : x.support.points()) {
      if (c == o.pos || c == p1) continue;
      if (pair_dist(c, o.pos) < iso) {
        blocked = true;
        break;
      }
    }
    for (const Occ& other : occs) {
      if (blocked) break;
      if (other.pos == o.pos) continue;
      Coord d = std::min(pair_dist(other.pos, o.pos), pair_dist(vec_add(other.pos, e1), o.pos));
      if (d < occ) blocked = true;
    }
    if (!blocked) active.push_back(o);
  }
  std::map<Vec, Symbol> out;
  for (std::size_t i = 0; i < x.support.size(); ++i) out[x.support[i]] = x.values[i];
  for (const Occ& o : active) {
    if (o.right) {  // (0,a1) -> (a2,0)
      out.erase(vec_add(o.pos, e1));
      out[o.pos] = a2_;
    } else {  // (a2,0) -> (0,a1)
      out.erase(o.pos);
      out[vec_add(o.pos, e1)] = a1_;
    }
  }
  std::vector<Vec> cells;
  std::vector<Symbol> vals;
  for (auto& [c, s] : out) {
    cells.push_back(c);
    vals.push_back(s);
  }
  FiniteSet supp(cells);
  std::vector<Symbol> sorted_vals(supp.size());
  for (std::size_t i = 0; i < cells.size(); ++i) sorted_vals[*supp.index_of(cells[i])] = vals[i];
  return FiniteConfig{supp, sorted_vals};
}

FiniteConfig GliderSystem::apply_anchored_gate(const FiniteConfig& x, const Vec& pos) const {
  const Symbol zero = *spec_->zero;
  const Vec e1 = unit_e1(spec_->dim);
  const Vec second = vec_add(pos, e1);
  const Coord iso = params_.symbol_isolation;
  const Coord occ = params_.occurrence_separation;
  Symbol s0 = x.at(pos, zero), s1 = x.at(second, zero);

  Symbol rewrite0, rewrite1;
  if (s0 == zero && s1 == a1_) {  // 0a1 -> a20
    rewrite0 = a2_;
    rewrite1 = zero;
  } else if (s0 == a2_ && s1 == zero) {  // a20 -> 0a1
    rewrite0 = zero;
    rewrite1 = a1_;
  } else {
    return x;
  }
  auto pair_dist = [&](const Vec& c, const Vec& p) {
    return std::min(linf_dist(c, p), linf_dist(c, vec_add(p, e1)));
  };
  for (const Vec& c : x.support.points()) {
    if (c == pos || c == second) continue;
    if (pair_dist(c, pos) < iso) return x;
  }
  for (const Vec& c : x.support.points()) {
    Symbol s = x.at(c, zero);
    Vec qpos;
    if (s == a1_ && x.at(vec_sub(c, e1), zero) == zero)
      qpos = vec_sub(c, e1);
    else if (s == a2_ && x.at(vec_add(c, e1), zero) == zero)
      qpos = c;
    else
      continue;
    if (qpos == pos) continue;
    Coord d = std::min(pair_dist(qpos, pos), pair_dist(vec_add(qpos, e1), pos));
    if (d < occ) return x;
  }
  std::map<Vec, Symbol> out;
  for (std::size_t i = 0; i < x.support.size(); ++i) out[x.support[i]] = x.values[i];
  out.erase(pos);
  out.erase(second);
  if (rewrite0 != zero) out[pos] = rewrite0;
  if (rewrite1 != zero) out[second] = rewrite1;
  std::vector<Vec> cells;
  std::vector<Symbol> vals;
  for (auto& [c, s] : out) {
    cells.push_back(c);
    vals.push_back(s);
  }
  FiniteSet supp(cells);
  std::vector<Symbol> sv(supp.size());
  for (std::size_t i = 0; i < cells.size(); ++i) sv[*supp.index_of(cells[i])] = vals[i];
  return FiniteConfig{supp, sv};
}

bool GliderSystem::gate_involution_check(Budget& budget) const {
  if (spec_->dim != 1) throw Error(ErrorKind::BadArgument, "gate check implemented for d = 1");
  const Symbol zero = *spec_->zero;
  const Coord occ = params_.occurrence_separation;
  // Window (-occ .. occ+1) covers both cells' activity scans.
  const Coord lo = -occ, hi = occ + 1;
  const int cells = static_cast<int>(hi - lo + 1);
  const int a = spec_->alphabet_size();
  std::uint64_t total = 1;
  for (int i = 0; i < cells; ++i) {
    total *= static_cast<std::uint64_t>(a);
    if (total > 200'000'000) throw Error(ErrorKind::BudgetExceeded, "gate window too large");
  }
  budget.charge(total);
  const Coord iso = params_.symbol_isolation;
  const int i0 = static_cast<int>(-lo);  // index of cell 0
  std::vector<Symbol> word(cells);
  // The gate anchored at {0, 1} reads only this window, so enumerating the
  // window contents is exhaustive.
  auto pair_dist_1d = [](int i, int p) { return std::min(std::abs(i - p), std::abs(i - p - 1)); };
  auto apply_word = [&](std::vector<Symbol>& w) {
    Symbol s0 = w[i0], s1 = w[i0 + 1];
    if (!((s0 == zero && s1 == a1_) || (s0 == a2_ && s1 == zero))) return;
    for (int i = 0; i < cells; ++i) {
      if (i == i0 || i == i0 + 1 || w[i] == zero) continue;
      if (pair_dist_1d(i, i0) < iso) return;
    }
    // Occurrence pairs within occ of the anchor pair; pairs straddling the
    // window edge are farther than occ, so edge reads defaulting to zero are
    // sound.
    for (int q = 0; q + 1 < cells; ++q) {
      if (q == i0) continue;
      bool occur = (w[q] == zero && w[q + 1] == a1_) || (w[q] == a2_ && w[q + 1] == zero);
      if (!occur) continue;
      int d = std::min(pair_dist_1d(q, i0), pair_dist_1d(q + 1, i0));
      if (d < occ) return;
    }
    std::swap(w[i0], w[i0 + 1]);
    w[i0] = (w[i0] == a1_) ? a2_ : (w[i0] == a2_ ? a1_ : w[i0]);
    w[i0 + 1] = (w[i0 + 1] == a1_) ? a2_ : (w[i0 + 1] == a2_ ? a1_ : w[i0 + 1]);
  };
  for (std::uint64_t code = 0; code < total; ++code) {
    std::uint64_t rem = code;
    for (int i = 0; i < cells; ++i) {
      word[i] = static_cast<Symbol>(rem % a);
      rem /= a;
    }
    std::vector<Symbol> w = word;
    apply_word(w);
    apply_word(w);
    if (w != word) return false;
  }
  return true;
}

SimulationTrace simulate_trace(const GliderSystem& gs, const FiniteConfig& x, long steps) {
  SimulationTrace tr;
  tr.states.push_back(x);
  for (long t = 0; t < steps; ++t) {
    FiniteConfig next = gs.step_h(tr.states.back());
    if (next.support.size() != x.support.size())
      throw Error(ErrorKind::BadArgument, "support cardinality not conserved");
    tr.states.push_back(std::move(next));
  }
  return tr;
}

namespace {

struct PartitionAttempt {
  bool ok = false;
  FiniteConfig left, middle, right;
};

FiniteConfig config_from_cells(const std::vector<std::pair<Vec, Symbol>>& cells) {
  std::vector<Vec> cs;
  cs.reserve(cells.size());
  for (auto& [c, s] : cells) cs.push_back(c);
  FiniteSet supp(cs);
  std::vector<Symbol> vals(supp.size());
  for (auto& [c, s] : cells) vals[*supp.index_of(c)] = s;
  return FiniteConfig{supp, vals};
}

PartitionAttempt try_partition(const GliderSystem& gs, const FiniteConfig& a,
                               const FiniteConfig& b, long p) {
  PartitionAttempt out;
  const Vec e1 = [&] {
    Vec v(gs.spec().dim, 0);
    v[0] = 1;
    return v;
  }();
  Vec move_l = e1, move_r = e1;
  for (auto& c : move_l) c *= -p;
  for (auto& c : move_r) c *= p;

  std::vector<std::pair<Vec, Symbol>> mid, left, right;
  std::set<Vec> b_claimed;
  // Cells identical in both states form the middle candidate.
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    const Vec& c = a.support[i];
    if (b.at(c, -1) == a.values[i]) {
      mid.push_back({c, a.values[i]});
      b_claimed.insert(c);
    }
  }
  for (std::size_t i = 0; i < a.support.size(); ++i) {
    const Vec& c = a.support[i];
    if (b.at(c, -1) == a.values[i]) continue;
    Symbol s = a.values[i];
    Vec lv = vec_add(c, move_l), rv = vec_add(c, move_r);
    if (s == gs.a2() && b.at(lv, -1) == gs.a2() && !b_claimed.count(lv)) {
      left.push_back({c, s});
      b_claimed.insert(lv);
    } else if (s == gs.a1() && b.at(rv, -1) == gs.a1() && !b_claimed.count(rv)) {
      right.push_back({c, s});
      b_claimed.insert(rv);
    } else {
      return out;
    }
  }
  if (b_claimed.size() != b.support.size()) return out;

  // Geometric certification: clouds r-separated and strictly ordered along e1.
  const Coord r = gs.r();
  auto e1_min = [](const std::vector<std::pair<Vec, Symbol>>& cs, Coord def) {
    Coord m = def;
    for (auto& [c, s] : cs) m = std::min(m, c[0]);
    return m;
  };
  auto e1_max = [](const std::vector<std::pair<Vec, Symbol>>& cs, Coord def) {
    Coord m = def;
    for (auto& [c, s] : cs) m = std::max(m, c[0]);
    return m;
  };
  auto cloud_separated = [&](const std::vector<std::pair<Vec, Symbol>>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (linf_dist(cs[i].first, cs[j].first) < r) return false;
    return true;
  };
  if (!cloud_separated(left) || !cloud_separated(right)) return out;
  if (!left.empty() && (!mid.empty() || !right.empty())) {
    Coord boundary = std::min(e1_min(mid, std::numeric_limits<Coord>::max() / 2),
                              e1_min(right, std::numeric_limits<Coord>::max() / 2));
    if (e1_max(left, std::numeric_limits<Coord>::min() / 2) + r > boundary) return out;
  }
  if (!right.empty() && (!mid.empty() || !left.empty())) {
    Coord boundary = std::max(e1_max(mid, std::numeric_limits<Coord>::min() / 2),
                              e1_max(left, std::numeric_limits<Coord>::min() / 2));
    if (e1_min(right, std::numeric_limits<Coord>::max() / 2) - r < boundary) return out;
  }

  out.ok = true;
  out.left = config_from_cells(left);
  out.middle = config_from_cells(mid);
  out.right = config_from_cells(right);
  return out;
}

FiniteConfig assemble(const GliderSystem& gs, const GliderDecomposition& d, long k) {
  Vec lshift(gs.spec().dim, 0), rshift(gs.spec().dim, 0);
  lshift[0] = -k * d.period;
  rshift[0] = k * d.period;
  std::vector<std::pair<Vec, Symbol>> cells;
  auto add = [&](const FiniteConfig& part, const Vec& shift) {
    for (std::size_t i = 0; i < part.support.size(); ++i)
      cells.push_back({vec_add(part.support[i], shift), part.values[i]});
  };
  add(d.left, lshift);
  add(d.middle, Vec(gs.spec().dim, 0));
  add(d.right, rshift);
  return config_from_cells(cells);
}

}  // namespace

GliderDecomposition simulate_decomposition(const GliderSystem& gs, const FiniteConfig& x,
                                           long step_budget, Budget& budget) {
  if (!is_admissible_config(x, gs.spec()))
    throw Error(ErrorKind::Inadmissible, "initial configuration not admissible");
  std::vector<FiniteConfig> history;
  history.push_back(x);
  auto extend_to = [&](long t) {
    while (static_cast<long>(history.size()) <= t) {
      budget.charge();
      FiniteConfig next = gs.step_h(history.back());
      if (next.support.size() != x.support.size())
        throw Error(ErrorKind::BadArgument, "support cardinality not conserved");
      history.push_back(std::move(next));
    }
  };

  const long p_cap = 600;
  for (long n = 0; n <= step_budget; ++n) {
    extend_to(n);
    for (long p = 1; p <= p_cap && n + 4 * p <= step_budget; ++p) {
      extend_to(n + p);
      PartitionAttempt att = try_partition(gs, history[n], history[n + p], p);
      if (!att.ok) continue;
      GliderDecomposition dec;
      dec.transient = n;
      dec.period = p;
      dec.left = att.left;
      dec.middle = att.middle;
      dec.right = att.right;
      bool replay_ok = true;
      for (long k = 0; k <= 3 && replay_ok; ++k) {
        extend_to(n + k * p);
        if (!(assemble(gs, dec, k) == history[n + k * p])) replay_ok = false;
      }
      if (replay_ok) return dec;
    }
  }
  throw Error(ErrorKind::BudgetExceeded, "no certified decomposition within the step budget");
}

FiniteConfig HomoclinicPermuter::apply(const FiniteConfig& x) const {
  const Symbol zero = *spec->zero;

  struct Occurrence {
    Vec anchor;
    std::size_t point;
  };
  // Exact isolated islands: support matches a translated point and nothing
  // else lies within M of the island.
  std::vector<Occurrence> occs;
  std::set<Vec> seen_anchors;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const FiniteConfig& pt = points[pi];
    for (const Vec& s : x.support.points()) {
      Vec anchor = vec_sub(s, pt.support[0]);
      bool match = true;
      for (std::size_t j = 0; j < pt.support.size() && match; ++j)
        if (x.at(vec_add(anchor, pt.support[j]), zero) != pt.values[j]) match = false;
      if (!match) continue;
      // Island must be exactly this set inside its M-collar.
      FiniteSet island = pt.support.translate(anchor);
      bool isolated = true;
      for (const Vec& c : x.support.points()) {
        if (island.contains(c)) continue;
        Coord d = std::numeric_limits<Coord>::max();
        for (const Vec& ic : island.points()) d = std::min(d, linf_dist(c, ic));
        if (d <= isolation_m) {
          isolated = false;
          break;
        }
      }
      if (!isolated) continue;
      if (seen_anchors.insert(anchor).second) occs.push_back({anchor, pi});
    }
  }
  // Cancellation: two occurrences within N drop both.
  std::vector<char> cancelled(occs.size(), 0);
  for (std::size_t i = 0; i < occs.size(); ++i) {
    for (std::size_t j = i + 1; j < occs.size(); ++j) {
      FiniteSet isl_i = points[occs[i].point].support.translate(occs[i].anchor);
      FiniteSet isl_j = points[occs[j].point].support.translate(occs[j].anchor);
      Coord d = std::numeric_limits<Coord>::max();
      for (const Vec& a : isl_i.points())
        for (const Vec& b : isl_j.points()) d = std::min(d, linf_dist(a, b));
      if (d <= cancellation_n) cancelled[i] = cancelled[j] = 1;
    }
  }

  std::map<Vec, Symbol> out;
  for (std::size_t i = 0; i < x.support.size(); ++i) out[x.support[i]] = x.values[i];
  for (std::size_t i = 0; i < occs.size(); ++i) {
    if (cancelled[i]) continue;
    const FiniteConfig& src = points[occs[i].point];
    const FiniteConfig& dst = points[perm[occs[i].point]];
    for (const Vec& c : src.support.points()) out.erase(vec_add(occs[i].anchor, c));
    for (std::size_t j = 0; j < dst.support.size(); ++j)
      out[vec_add(occs[i].anchor, dst.support[j])] = dst.values[j];
  }
  std::vector<std::pair<Vec, Symbol>> cells(out.begin(), out.end());
  std::vector<Vec> cs;
  for (auto& [c, s] : cells) cs.push_back(c);
  FiniteSet supp(cs);
  std::vector<Symbol> vals(supp.size());
  for (auto& [c, s] : cells) vals[*supp.index_of(c)] = s;
  return FiniteConfig{supp, vals};
}

BlockMap HomoclinicPermuter::as_blockmap() const {
  Coord max_diam = 0;
  for (const auto& pt : points) max_diam = std::max(max_diam, pt.support.diameter_linf());
  const Coord radius = cancellation_n + isolation_m + 2 * max_diam + 2;
  FiniteSet n = ball_around(Vec(spec->dim, 0), radius, spec->dim);
  auto self = std::make_shared<HomoclinicPermuter>(*this);
  auto cells = std::make_shared<FiniteSet>(n);
  const Symbol zero = *spec->zero;
  auto rule = [self, cells, zero](std::size_t, const std::vector<Symbol>& vals) -> Symbol {
    std::vector<std::pair<Vec, Symbol>> nz;
    for (std::size_t i = 0; i < cells->size(); ++i)
      if (vals[i] != zero) nz.push_back({(*cells)[i], vals[i]});
    std::vector<Vec> cs;
    for (auto& [c, s] : nz) cs.push_back(c);
    FiniteSet supp(cs);
    std::vector<Symbol> vs(supp.size());
    for (auto& [c, s] : nz) vs[*supp.index_of(c)] = s;
    FiniteConfig local{supp, vs};
    FiniteConfig image = self->apply(local);
    return image.at(Vec(self->spec->dim, 0), zero);
  };
  return BlockMap::functional(spec, n, rule, std::nullopt, "homoclinic_permuter");
}

HomoclinicPermuter homoclinic_permuter(std::shared_ptr<const SftSpec> spec,
                                       const std::vector<FiniteConfig>& points,
                                       const std::vector<std::size_t>& perm, Coord isolation_m,
                                       Coord cancellation_n, Budget& budget) {
  if (!spec->zero) throw Error(ErrorKind::BadSpec, "permuter needs a zero symbol");
  if (points.empty()) throw Error(ErrorKind::BadArgument, "no points given");
  if (perm.size() != points.size()) throw Error(ErrorKind::BadArgument, "permutation size mismatch");
  {
    std::vector<char> seen(points.size(), 0);
    for (std::size_t i : perm) {
      if (i >= points.size() || seen[i]) throw Error(ErrorKind::NotBijective, "not a permutation");
      seen[i] = 1;
    }
  }
  HomoclinicPermuter hp;
  hp.spec = spec;
  for (const auto& pt : points) {
    if (pt.support.empty()) throw Error(ErrorKind::ZeroConfig, "points must be nonzero");
    if (!is_admissible_config(pt, *spec))
      throw Error(ErrorKind::Inadmissible, "point not admissible");
    hp.points.push_back(good_position(pt));
  }
  for (std::size_t i = 0; i < hp.points.size(); ++i)
    for (std::size_t j = i + 1; j < hp.points.size(); ++j)
      if (orbit_equivalent(hp.points[i], hp.points[j]))
        throw Error(ErrorKind::OrbitsNotDistinct, "two points share a shift orbit");
  hp.perm = perm;

  Coord max_diam = 0;
  for (const auto& pt : hp.points) max_diam = std::max(max_diam, pt.support.diameter_linf());
  const Coord m_min = 2 * max_diam + spec->window_size() + 1;
  hp.isolation_m = isolation_m > 0 ? isolation_m : m_min;
  hp.cancellation_n = cancellation_n > 0 ? cancellation_n : 10 * hp.isolation_m;
  if (hp.isolation_m < m_min)
    throw Error(ErrorKind::SeparationTooSmall, "isolation must cover twice the island diameter");
  if (hp.cancellation_n < 4 * (hp.isolation_m + max_diam))
    throw Error(ErrorKind::SeparationTooSmall, "cancellation window too small");

  // The permuter must realize the permutation on the given islands.
  for (std::size_t i = 0; i < hp.points.size(); ++i) {
    budget.charge();
    if (!(hp.apply(hp.points[i]) == hp.points[perm[i]]))
      throw Error(ErrorKind::BadArgument, "permuter failed to realize the permutation");
  }
  return hp;
}

namespace {

std::optional<BlockMap> plain_track_perm(std::shared_ptr<const SftSpec> spec,
                                         const FiniteConfig& mover, const FiniteConfig& fixer,
                                         int track) {
  const int tsize = (*spec->tracks)[track];
  std::set<int> fixed_digits = {0};
  for (std::size_t i = 0; i < fixer.support.size(); ++i)
    fixed_digits.insert(spec->track_digits(fixer.values[i])[track]);
  int movable = -1;
  for (std::size_t i = 0; i < mover.support.size(); ++i) {
    int d = spec->track_digits(mover.values[i])[track];
    if (!fixed_digits.count(d)) {
      movable = d;
      break;
    }
  }
  if (movable < 0) return std::nullopt;
  std::vector<int> spare;
  for (int d = 0; d < tsize; ++d)
    if (d != movable && !fixed_digits.count(d)) spare.push_back(d);
  if (spare.size() < 2) return std::nullopt;
  // Even 3-cycle (movable, spare0, spare1) on the track digit.
  std::vector<Symbol> perm(spec->alphabet_size());
  for (Symbol s = 0; s < spec->alphabet_size(); ++s) {
    std::vector<int> digits = spec->track_digits(s);
    int& d = digits[track];
    if (d == movable)
      d = spare[0];
    else if (d == spare[0])
      d = spare[1];
    else if (d == spare[1])
      d = movable;
    perm[s] = spec->symbol_from_digits(digits);
  }
  return make_symbol_perm(spec, perm);
}

std::optional<BlockMap> conditioned_separator(std::shared_ptr<const SftSpec> spec,
                                              const FiniteConfig& mover,
                                              const FiniteConfig& fixer, int cond_track,
                                              int targ_track) {
  const int tsize = (*spec->tracks)[targ_track];
  // Cylinder: the mover's condition-track contents on a one-cell collar around
  // its whole support. Requires a nonzero condition digit somewhere.
  FiniteSet box = ball(mover.support, 1);
  std::vector<int> digits;
  bool has_nonzero = false;
  for (const Vec& c : box.points()) {
    int d = spec->track_digits(mover.at(c, *spec->zero))[cond_track];
    digits.push_back(d);
    if (d != 0) has_nonzero = true;
  }
  if (!has_nonzero) return std::nullopt;

  // Occurrence anchors of the cylinder inside a finite configuration.
  auto occurrences = [&](const FiniteConfig& cfg) {
    std::vector<Vec> anchors;
    std::set<Vec> cand;
    std::size_t first_nz = 0;
    while (spec->track_digits(mover.at(box[first_nz], *spec->zero))[cond_track] == 0) ++first_nz;
    for (const Vec& s : cfg.support.points()) cand.insert(vec_sub(s, box[first_nz]));
    for (const Vec& t : cand) {
      bool match = true;
      for (std::size_t i = 0; i < box.size() && match; ++i) {
        int want = digits[i];
        int got = spec->track_digits(cfg.at(vec_add(box[i], t), *spec->zero))[cond_track];
        if (want != got) match = false;
      }
      if (match) anchors.push_back(t);
    }
    return anchors;
  };
  auto mover_occ = occurrences(mover);
  auto fixer_occ = occurrences(fixer);
  if (mover_occ.empty()) return std::nullopt;

  // Pick a target cell where the mover's digit can be 3-cycled away from all
  // of the fixer's digits at its occurrence-aligned cells.
  for (const Vec& cell : box.points()) {
    std::set<int> avoid;
    bool aligned_all_equal = true;
    int bm = -1;
    for (const Vec& t : mover_occ) {
      int d = spec->track_digits(mover.at(vec_add(cell, t), *spec->zero))[targ_track];
      if (bm < 0) bm = d;
      if (d != bm) aligned_all_equal = false;
    }
    if (!aligned_all_equal) continue;  // keep the construction simple
    for (const Vec& t : fixer_occ)
      avoid.insert(spec->track_digits(fixer.at(vec_add(cell, t), *spec->zero))[targ_track]);
    if (avoid.count(bm)) continue;
    std::vector<int> spare;
    for (int d = 0; d < tsize; ++d)
      if (d != bm && !avoid.count(d)) spare.push_back(d);
    if (spare.size() < 2) continue;
    std::vector<int> perm(tsize);
    for (int d = 0; d < tsize; ++d) perm[d] = d;
    perm[bm] = spare[0];
    perm[spare[0]] = spare[1];
    perm[spare[1]] = bm;
    // Anchor the cylinder so the permuted cell is at the origin.
    std::vector<Vec> rel;
    for (const Vec& c : box.points()) rel.push_back(vec_sub(c, cell));
    Cylinder cyl{FiniteSet(rel), {}};
    cyl.digits.resize(box.size());
    for (std::size_t i = 0; i < box.size(); ++i)
      cyl.digits[*cyl.domain.index_of(vec_sub(box[i], cell))] = digits[i];
    return make_conditioned_perm(spec, perm, {cyl}, cond_track, targ_track);
  }
  return std::nullopt;
}

}  // namespace

SeparationReport separating_automorphism(std::shared_ptr<const SftSpec> spec,
                                         const FiniteConfig& x, const FiniteConfig& y,
                                         Budget& budget) {
  if (!spec->tracks || spec->num_tracks() < 2)
    throw Error(ErrorKind::NoTracks, "separator needs a product-track full shift");
  if (!spec->full_shift())
    throw Error(ErrorKind::BadSpec, "separator is built for full shifts");
  if (orbit_equivalent(x, y))
    throw Error(ErrorKind::OrbitEquivalent, "x and y lie in one shift orbit");

  struct Candidate {
    std::optional<BlockMap> map;
    int moved;
    std::string method;
  };
  std::vector<Candidate> candidates;
  const int t = spec->num_tracks();
  for (int track = t - 1; track >= 0; --track) {
    candidates.push_back({plain_track_perm(spec, y, x, track), 1, "symbol_perm"});
    candidates.push_back({plain_track_perm(spec, x, y, track), 0, "symbol_perm"});
  }
  for (int ct = 0; ct < t; ++ct) {
    for (int tt = 0; tt < t; ++tt) {
      if (ct == tt) continue;
      candidates.push_back({conditioned_separator(spec, y, x, ct, tt), 1, "conditioned_perm"});
      candidates.push_back({conditioned_separator(spec, x, y, ct, tt), 0, "conditioned_perm"});
    }
  }
  for (auto& cand : candidates) {
    if (!cand.map) continue;
    FiniteConfig ix = apply_map(*cand.map, x, budget);
    FiniteConfig iy = apply_map(*cand.map, y, budget);
    bool moved_x = !(ix == x);
    bool moved_y = !(iy == y);
    if (moved_x == moved_y) continue;
    return SeparationReport{*cand.map, moved_y ? 1 : 0, cand.method};
  }
  throw Error(ErrorKind::BadArgument, "no support-based separator found");
}

SumStabResult sumstab_check(const SftSpec& spec, const FiniteConfig& x1, const FiniteConfig& x2,
                            const FiniteConfig& y1, const FiniteConfig& y2, Coord r_ball,
                            Coord r_annulus) {
  auto in_ball = [&](const FiniteConfig& c) {
    for (const Vec& v : c.support.points())
      if (linf_norm(v) > r_ball) return false;
    return true;
  };
  auto in_annulus = [&](const FiniteConfig& c) {
    for (const Vec& v : c.support.points())
      if (linf_norm(v) < r_annulus || linf_norm(v) > r_annulus + r_ball) return false;
    return true;
  };
  if (!in_ball(x1) || !in_ball(y1))
    throw Error(ErrorKind::HypothesesFail, "central parts escape the R-ball");
  if (!in_annulus(x2) || !in_annulus(y2))
    throw Error(ErrorKind::HypothesesFail, "outer parts escape the annulus");
  if (x1.support.size() != y1.support.size())
    throw Error(ErrorKind::HypothesesFail, "central cardinality mismatch");
  if (x1.support.size() <= x2.support.size() || x1.support.size() <= y2.support.size())
    throw Error(ErrorKind::HypothesesFail, "cardinality: central part must dominate");
  if (r_annulus < 4 * r_ball)
    throw Error(ErrorKind::HypothesesFail, "annulus radius must be at least 4R");

  FiniteConfig x = sum_disjoint(spec, x1, x2);
  FiniteConfig y = sum_disjoint(spec, y1, y2);

  SumStabResult res;
  std::set<Vec> shifts;
  for (const Vec& a : x.support.points())
    for (const Vec& b : y.support.points()) shifts.insert(vec_sub(b, a));
  for (const Vec& g : shifts) {
    res.translations_checked.push_back(g);
    if (!(translate_config(x, g) == y)) continue;
    bool ok = translate_config(x1, g) == y1 && translate_config(x2, g) == y2;
    if (!ok) {
      res.holds = false;
      res.witness = g;
      return res;
    }
  }
  return res;
}

}  // namespace sftlab
