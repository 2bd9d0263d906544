#include "sftlab/morphisms.hpp"

#include <algorithm>
#include <set>

namespace sftlab {

namespace {

std::size_t checked_table_size(int alphabet, std::size_t cells) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < cells; ++i) {
    if (size > (std::size_t{1} << 24) / static_cast<std::size_t>(alphabet))
      throw Error(ErrorKind::BudgetExceeded, "neighborhood too large to tabulate");
    size *= static_cast<std::size_t>(alphabet);
  }
  return size;
}

std::size_t pattern_rank(int alphabet, const std::vector<Symbol>& vals) {
  std::size_t r = 0;
  for (std::size_t i = vals.size(); i-- > 0;) r = r * alphabet + static_cast<std::size_t>(vals[i]);
  return r;
}

// Positions of (sub + offset) cells inside the (sorted) ambient set.
std::vector<std::size_t> embed_indices(const FiniteSet& ambient, const FiniteSet& sub,
                                       const Vec& offset) {
  std::vector<std::size_t> idx;
  idx.reserve(sub.size());
  for (const Vec& c : sub.points()) {
    auto i = ambient.index_of(vec_add(c, offset));
    if (!i) throw Error(ErrorKind::BadArgument, "sub-neighborhood escapes ambient set");
    idx.push_back(*i);
  }
  return idx;
}

LatticeSubgroup identity_lattice(int dim) { return LatticeSubgroup::scaled_identity(dim, 1); }

std::optional<LatticeSubgroup> combined_period(const BlockMap& a, const BlockMap& b) {
  if (!a.period() && !b.period()) return std::nullopt;
  if (a.period() && !b.period()) return a.period();
  if (!a.period() && b.period()) return b.period();
  return intersect(*a.period(), *b.period());
}

}  // namespace

BlockMap BlockMap::tabulated(std::shared_ptr<const SftSpec> spec, FiniteSet neighborhood,
                             std::vector<std::vector<Symbol>> tables,
                             std::optional<LatticeSubgroup> period, std::string name) {
  BlockMap m;
  m.spec_ = std::move(spec);
  m.neighborhood_ = std::move(neighborhood);
  m.period_ = std::move(period);
  if (m.period_) m.coset_domain_ = m.period_->fundamental_domain();
  m.tables_ = std::move(tables);
  m.name_ = std::move(name);
  if (m.tables_.size() != m.num_cosets())
    throw Error(ErrorKind::BadArgument, "one table per coset required");
  return m;
}

BlockMap BlockMap::functional(std::shared_ptr<const SftSpec> spec, FiniteSet neighborhood,
                              LocalRule rule, std::optional<LatticeSubgroup> period,
                              std::string name) {
  BlockMap m;
  m.spec_ = std::move(spec);
  m.neighborhood_ = std::move(neighborhood);
  m.period_ = std::move(period);
  if (m.period_) m.coset_domain_ = m.period_->fundamental_domain();
  m.fn_ = std::move(rule);
  m.name_ = std::move(name);
  return m;
}

std::size_t BlockMap::num_cosets() const { return period_ ? coset_domain_.size() : 1; }

std::size_t BlockMap::coset_of(const Vec& v) const {
  if (!period_) return 0;
  return *coset_domain_.index_of(period_->reduce(v));
}

Symbol BlockMap::eval(std::size_t coset, const std::vector<Symbol>& vals) const {
  if (!tables_.empty()) return tables_[coset][pattern_rank(spec_->alphabet_size(), vals)];
  return fn_(coset, vals);
}

BlockMap BlockMap::tabulate(Budget& budget) const {
  if (!tables_.empty()) return *this;
  const std::size_t size = checked_table_size(spec_->alphabet_size(), neighborhood_.size());
  budget.charge(size * num_cosets());
  std::vector<std::vector<Symbol>> tables(num_cosets(), std::vector<Symbol>(size, -1));
  auto locals = enumerate_local_patterns(*spec_, neighborhood_, budget);
  for (const auto& pat : locals) {
    const std::size_t r = pattern_rank(spec_->alphabet_size(), pat);
    for (std::size_t c = 0; c < num_cosets(); ++c) tables[c][r] = fn_(c, pat);
  }
  BlockMap m = BlockMap::tabulated(spec_, neighborhood_, std::move(tables), period_, name_);
  m.partial_ = partial_;
  return m;
}

BlockMap identity_map(std::shared_ptr<const SftSpec> spec) {
  const int a = spec->alphabet_size();
  std::vector<Symbol> table(a);
  for (Symbol s = 0; s < a; ++s) table[s] = s;
  const int dim = spec->dim;
  return BlockMap::tabulated(std::move(spec), FiniteSet::singleton(Vec(dim, 0)), {table},
                             std::nullopt, "id");
}

BlockMap make_shift(std::shared_ptr<const SftSpec> spec, const Vec& v) {
  const int a = spec->alphabet_size();
  std::vector<Symbol> table(a);
  for (Symbol s = 0; s < a; ++s) table[s] = s;
  std::string name = "shift(";
  for (std::size_t i = 0; i < v.size(); ++i) name += (i ? "," : "") + std::to_string(v[i]);
  name += ")";
  return BlockMap::tabulated(std::move(spec), FiniteSet::singleton(v), {table}, std::nullopt,
                             name);
}

BlockMap make_symbol_perm(std::shared_ptr<const SftSpec> spec, const std::vector<Symbol>& perm) {
  const int a = spec->alphabet_size();
  if (static_cast<int>(perm.size()) != a)
    throw Error(ErrorKind::BadArgument, "permutation size mismatch");
  std::vector<char> seen(a, 0);
  for (Symbol s : perm) {
    if (s < 0 || s >= a || seen[s]) throw Error(ErrorKind::NotBijective, "not a permutation");
    seen[s] = 1;
  }
  const int dim = spec->dim;
  return BlockMap::tabulated(std::move(spec), FiniteSet::singleton(Vec(dim, 0)),
                             {std::vector<Symbol>(perm)}, std::nullopt, "symbol_perm");
}

BlockMap make_partial_shift(std::shared_ptr<const SftSpec> spec, int track, const Vec& v) {
  if (!spec->tracks) throw Error(ErrorKind::NoTracks, "partial shift needs a track structure");
  if (track < 0 || track >= spec->num_tracks())
    throw Error(ErrorKind::BadArgument, "track index out of range");
  if (linf_norm(v) == 0) return identity_map(std::move(spec));
  FiniteSet n({Vec(spec->dim, 0), v});
  const std::size_t at0 = *n.index_of(Vec(spec->dim, 0));
  const std::size_t atv = *n.index_of(v);
  auto spec_keep = spec;
  auto rule = [spec_keep, track, at0, atv](std::size_t, const std::vector<Symbol>& vals) -> Symbol {
    std::vector<int> digits = spec_keep->track_digits(vals[at0]);
    digits[track] = spec_keep->track_digits(vals[atv])[track];
    return spec_keep->symbol_from_digits(digits);
  };
  return BlockMap::functional(std::move(spec), n, rule, std::nullopt,
                              "partial_shift(" + std::to_string(track) + ")");
}

BlockMap make_track_swap(std::shared_ptr<const SftSpec> spec, int track1, int track2) {
  if (!spec->tracks) throw Error(ErrorKind::NoTracks, "track swap needs a track structure");
  if ((*spec->tracks)[track1] != (*spec->tracks)[track2])
    throw Error(ErrorKind::BadArgument, "track sizes differ");
  const int a = spec->alphabet_size();
  std::vector<Symbol> perm(a);
  for (Symbol s = 0; s < a; ++s) {
    std::vector<int> digits = spec->track_digits(s);
    std::swap(digits[track1], digits[track2]);
    perm[s] = spec->symbol_from_digits(digits);
  }
  BlockMap m = make_symbol_perm(std::move(spec), perm);
  m.set_name("track_swap");
  return m;
}

std::vector<Cylinder> intersect_cylinder_unions(const std::vector<Cylinder>& u1,
                                                const std::vector<Cylinder>& u2) {
  std::vector<Cylinder> out;
  for (const Cylinder& c1 : u1) {
    for (const Cylinder& c2 : u2) {
      FiniteSet dom = c1.domain.union_with(c2.domain);
      std::vector<int> digits(dom.size(), -1);
      bool consistent = true;
      for (std::size_t i = 0; i < c1.domain.size(); ++i)
        digits[*dom.index_of(c1.domain[i])] = c1.digits[i];
      for (std::size_t i = 0; i < c2.domain.size() && consistent; ++i) {
        std::size_t j = *dom.index_of(c2.domain[i]);
        if (digits[j] >= 0 && digits[j] != c2.digits[i]) consistent = false;
        digits[j] = c2.digits[i];
      }
      if (consistent) out.push_back(Cylinder{dom, digits});
    }
  }
  return out;
}

TrackPermMap TrackPermMap::from_condition(std::shared_ptr<const SftSpec> spec,
                                          const std::vector<int>& perm,
                                          const std::vector<Cylinder>& condition, int cond_track,
                                          int targ_track) {
  if (!spec->tracks || spec->num_tracks() < 2)
    throw Error(ErrorKind::NoTracks, "conditioned permutation needs at least two tracks");
  if (cond_track == targ_track) throw Error(ErrorKind::InvalidCondition, "tracks must differ");
  const int csize = (*spec->tracks)[cond_track];
  const int tsize = (*spec->tracks)[targ_track];
  if (static_cast<int>(perm.size()) != tsize)
    throw Error(ErrorKind::BadArgument, "permutation size mismatch");
  {
    std::vector<char> seen(tsize, 0);
    for (int d : perm) {
      if (d < 0 || d >= tsize || seen[d]) throw Error(ErrorKind::NotBijective, "not a permutation");
      seen[d] = 1;
    }
  }
  TrackPermMap m;
  m.spec_ = std::move(spec);
  m.cond_track_ = cond_track;
  m.targ_track_ = targ_track;
  std::vector<Vec> cells;
  for (const Cylinder& c : condition) {
    if (c.digits.size() != c.domain.size())
      throw Error(ErrorKind::InvalidCondition, "cylinder digits mismatch");
    for (int d : c.digits)
      if (d < 0 || d >= csize) throw Error(ErrorKind::InvalidCondition, "digit out of range");
    cells.insert(cells.end(), c.domain.points().begin(), c.domain.points().end());
  }
  m.domain_ = FiniteSet(cells);
  std::size_t count = 1;
  for (std::size_t i = 0; i < m.domain_.size(); ++i) {
    if (count > 1'000'000 / static_cast<std::size_t>(csize))
      throw Error(ErrorKind::BudgetExceeded, "condition domain too large");
    count *= static_cast<std::size_t>(csize);
  }
  std::vector<int> ident(tsize);
  for (int i = 0; i < tsize; ++i) ident[i] = i;
  m.perms_.assign(count, ident);
  std::vector<int> digits(m.domain_.size());
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t rem = r;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      digits[i] = static_cast<int>(rem % csize);
      rem /= csize;
    }
    bool matches = false;
    for (const Cylinder& c : condition) {
      bool all = true;
      for (std::size_t i = 0; i < c.domain.size() && all; ++i)
        if (digits[*m.domain_.index_of(c.domain[i])] != c.digits[i]) all = false;
      if (all) {
        matches = true;
        break;
      }
    }
    if (matches) m.perms_[r] = perm;
  }
  return m;
}

TrackPermMap TrackPermMap::identity(std::shared_ptr<const SftSpec> spec, int cond_track,
                                    int targ_track) {
  const int tsize = (*spec->tracks)[targ_track];
  std::vector<int> ident(tsize);
  for (int i = 0; i < tsize; ++i) ident[i] = i;
  return from_condition(std::move(spec), ident, {}, cond_track, targ_track);
}

std::size_t TrackPermMap::rank(const std::vector<int>& digits) const {
  const int csize = (*spec_->tracks)[cond_track_];
  std::size_t r = 0;
  for (std::size_t i = digits.size(); i-- > 0;) r = r * csize + static_cast<std::size_t>(digits[i]);
  return r;
}

const std::vector<int>& TrackPermMap::perm_at(const std::vector<int>& cond_digits) const {
  return perms_[rank(cond_digits)];
}

TrackPermMap TrackPermMap::after(const TrackPermMap& inner) const {
  if (cond_track_ != inner.cond_track_ || targ_track_ != inner.targ_track_)
    throw Error(ErrorKind::BadArgument, "track roles differ");
  TrackPermMap out;
  out.spec_ = spec_;
  out.cond_track_ = cond_track_;
  out.targ_track_ = targ_track_;
  out.domain_ = domain_.union_with(inner.domain_);
  const int csize = (*spec_->tracks)[cond_track_];
  const int tsize = (*spec_->tracks)[targ_track_];
  std::size_t count = 1;
  for (std::size_t i = 0; i < out.domain_.size(); ++i) {
    if (count > 1'000'000 / static_cast<std::size_t>(csize))
      throw Error(ErrorKind::BudgetExceeded, "condition domain too large");
    count *= static_cast<std::size_t>(csize);
  }
  out.perms_.assign(count, std::vector<int>(tsize));
  std::vector<std::size_t> mine = embed_indices(out.domain_, domain_, Vec(spec_->dim, 0));
  std::vector<std::size_t> theirs = embed_indices(out.domain_, inner.domain_, Vec(spec_->dim, 0));
  std::vector<int> digits(out.domain_.size());
  std::vector<int> dmine(mine.size()), dtheirs(theirs.size());
  for (std::size_t r = 0; r < count; ++r) {
    std::size_t rem = r;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      digits[i] = static_cast<int>(rem % csize);
      rem /= csize;
    }
    for (std::size_t i = 0; i < mine.size(); ++i) dmine[i] = digits[mine[i]];
    for (std::size_t i = 0; i < theirs.size(); ++i) dtheirs[i] = digits[theirs[i]];
    const std::vector<int>& pm = perm_at(dmine);
    const std::vector<int>& pi = inner.perm_at(dtheirs);
    for (int d = 0; d < tsize; ++d) out.perms_[r][d] = pm[pi[d]];
  }
  return out;
}

TrackPermMap TrackPermMap::inverse() const {
  TrackPermMap out = *this;
  for (auto& p : out.perms_) {
    std::vector<int> inv(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) inv[p[i]] = static_cast<int>(i);
    p = inv;
  }
  return out;
}

bool TrackPermMap::is_identity() const {
  for (const auto& p : perms_)
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] != static_cast<int>(i)) return false;
  return true;
}

BlockMap TrackPermMap::to_blockmap() const {
  FiniteSet n = domain_.union_with(FiniteSet::singleton(Vec(spec_->dim, 0)));
  std::vector<std::size_t> dom_idx = embed_indices(n, domain_, Vec(spec_->dim, 0));
  const std::size_t at0 = *n.index_of(Vec(spec_->dim, 0));
  const int ct = cond_track_, tt = targ_track_;
  auto self = std::make_shared<TrackPermMap>(*this);
  auto spec_keep = spec_;
  auto rule = [spec_keep, self, dom_idx, at0, ct,
               tt](std::size_t, const std::vector<Symbol>& vals) -> Symbol {
    std::vector<int> cond(dom_idx.size());
    for (std::size_t i = 0; i < dom_idx.size(); ++i)
      cond[i] = spec_keep->track_digits(vals[dom_idx[i]])[ct];
    const std::vector<int>& p = self->perm_at(cond);
    std::vector<int> digits = spec_keep->track_digits(vals[at0]);
    digits[tt] = p[digits[tt]];
    return spec_keep->symbol_from_digits(digits);
  };
  return BlockMap::functional(spec_, n, rule, std::nullopt, "conditioned_perm");
}

TrackPermMap track_perm_commutator(const TrackPermMap& a, const TrackPermMap& b) {
  return a.after(b).after(a.inverse()).after(b.inverse());
}

BlockMap make_conditioned_perm(std::shared_ptr<const SftSpec> spec, const std::vector<int>& perm,
                               const std::vector<Cylinder>& condition, int cond_track,
                               int targ_track) {
  return TrackPermMap::from_condition(std::move(spec), perm, condition, cond_track, targ_track)
      .to_blockmap();
}

PeriodicConfig apply_map(const BlockMap& map, const PeriodicConfig& config, Budget& budget) {
  PeriodicConfig c = config;
  if (map.period() && !c.lattice.subgroup_of(*map.period()))
    c = re_periodize(c, intersect(c.lattice, *map.period()));
  FiniteSet fd = c.lattice.fundamental_domain();
  const FiniteSet& n = map.neighborhood();
  std::vector<Symbol> out(fd.size());
  std::vector<Symbol> vals(n.size());
  for (std::size_t i = 0; i < fd.size(); ++i) {
    budget.charge();
    for (std::size_t j = 0; j < n.size(); ++j)
      vals[j] = c.values[*fd.index_of(c.lattice.reduce(vec_add(fd[i], n[j])))];
    Symbol s = map.eval(map.coset_of(fd[i]), vals);
    if (s < 0) throw Error(ErrorKind::Inadmissible, "rule undefined on configuration");
    out[i] = s;
  }
  return PeriodicConfig{c.lattice, std::move(out)};
}

FiniteConfig apply_map(const BlockMap& map, const FiniteConfig& config, Budget& budget) {
  const SftSpec& spec = map.spec();
  if (!spec.zero) throw Error(ErrorKind::BadSpec, "finite configurations need a zero symbol");
  const Symbol zero = *spec.zero;
  const FiniteSet& n = map.neighborhood();
  std::vector<Symbol> zeros(n.size(), zero);
  for (std::size_t c = 0; c < map.num_cosets(); ++c) {
    if (map.eval(c, zeros) != zero)
      throw Error(ErrorKind::ZeroNotFixed, "rule does not fix the zero point");
  }
  std::set<Vec> candidates;
  for (const Vec& s : config.support.points())
    for (const Vec& cell : n.points()) candidates.insert(vec_sub(s, cell));
  std::vector<Vec> support;
  std::vector<Symbol> values;
  std::vector<Symbol> vals(n.size());
  for (const Vec& v : candidates) {
    budget.charge();
    for (std::size_t j = 0; j < n.size(); ++j) vals[j] = config.at(vec_add(v, n[j]), zero);
    Symbol s = map.eval(map.coset_of(v), vals);
    if (s < 0) throw Error(ErrorKind::Inadmissible, "rule undefined on configuration");
    if (s != zero) {
      support.push_back(v);
      values.push_back(s);
    }
  }
  FiniteSet supp(support);
  std::vector<Symbol> sorted_vals(supp.size());
  for (std::size_t i = 0; i < support.size(); ++i)
    sorted_vals[*supp.index_of(support[i])] = values[i];
  return FiniteConfig{supp, sorted_vals};
}

Pattern apply_map(const BlockMap& map, const Pattern& pattern, Budget& budget) {
  const FiniteSet& n = map.neighborhood();
  std::vector<Vec> cells;
  for (const Vec& v : pattern.domain.points()) {
    bool inside = true;
    for (const Vec& c : n.points())
      if (!pattern.domain.contains(vec_add(v, c))) {
        inside = false;
        break;
      }
    if (inside) cells.push_back(v);
  }
  FiniteSet out_domain(cells);
  std::vector<Symbol> out(out_domain.size());
  std::vector<Symbol> vals(n.size());
  for (std::size_t i = 0; i < out_domain.size(); ++i) {
    budget.charge();
    for (std::size_t j = 0; j < n.size(); ++j)
      vals[j] = pattern.values[*pattern.domain.index_of(vec_add(out_domain[i], n[j]))];
    Symbol s = map.eval(map.coset_of(out_domain[i]), vals);
    if (s < 0) throw Error(ErrorKind::Inadmissible, "rule undefined on pattern");
    out[i] = s;
  }
  return Pattern{out_domain, std::move(out)};
}

BlockMap compose(const BlockMap& outer, const BlockMap& inner, Budget& budget) {
  budget.charge(outer.neighborhood().size() * inner.neighborhood().size());
  FiniteSet n_total = outer.neighborhood().minkowski_sum(inner.neighborhood());
  std::optional<LatticeSubgroup> period = combined_period(outer, inner);
  FiniteSet reps =
      period ? period->fundamental_domain() : FiniteSet::singleton(Vec(outer.spec().dim, 0));

  // Per outer cell, where the inner neighborhood sits inside the total one.
  auto plans = std::make_shared<std::vector<std::vector<std::size_t>>>();
  for (const Vec& nf : outer.neighborhood().points())
    plans->push_back(embed_indices(n_total, inner.neighborhood(), nf));

  auto out_map = std::make_shared<BlockMap>(outer);
  auto in_map = std::make_shared<BlockMap>(inner);
  auto reps_ptr = std::make_shared<FiniteSet>(reps);
  auto rule = [out_map, in_map, plans, reps_ptr](std::size_t coset,
                                                 const std::vector<Symbol>& vals) -> Symbol {
    const Vec& rep = (*reps_ptr)[coset];
    const auto& nf_cells = out_map->neighborhood().points();
    std::vector<Symbol> ivals(nf_cells.size());
    std::vector<Symbol> sub;
    for (std::size_t k = 0; k < nf_cells.size(); ++k) {
      const auto& idx = (*plans)[k];
      sub.resize(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) sub[j] = vals[idx[j]];
      Symbol iv = in_map->eval(in_map->coset_of(vec_add(rep, nf_cells[k])), sub);
      if (iv < 0) return -1;
      ivals[k] = iv;
    }
    return out_map->eval(out_map->coset_of(rep), ivals);
  };
  BlockMap m = BlockMap::functional(outer.spec_ptr(), n_total, rule, period,
                                    outer.name() + " o " + inner.name());
  m.set_partial(outer.partial() || inner.partial());
  return m;
}

MapComparison maps_equal(const BlockMap& a, const BlockMap& b, Budget& budget) {
  MapComparison cmp;
  const SftSpec& spec = a.spec();
  cmp.caveat_local_only = (spec.dim >= 2 && !spec.full_shift()) || a.partial() || b.partial();
  FiniteSet n = a.neighborhood().union_with(b.neighborhood());
  std::vector<std::size_t> ia = embed_indices(n, a.neighborhood(), Vec(spec.dim, 0));
  std::vector<std::size_t> ib = embed_indices(n, b.neighborhood(), Vec(spec.dim, 0));

  std::vector<Vec> reps;
  if (!a.period() && !b.period()) {
    reps.push_back(Vec(spec.dim, 0));
  } else {
    LatticeSubgroup pa = a.period() ? *a.period() : identity_lattice(spec.dim);
    LatticeSubgroup pb = b.period() ? *b.period() : identity_lattice(spec.dim);
    reps = intersect(pa, pb).fundamental_domain().points();
  }

  auto locals = enumerate_local_patterns(spec, n, budget);
  std::vector<Symbol> va(ia.size()), vb(ib.size());
  for (const auto& pat : locals) {
    budget.charge();
    for (const Vec& rep : reps) {
      for (std::size_t j = 0; j < ia.size(); ++j) va[j] = pat[ia[j]];
      for (std::size_t j = 0; j < ib.size(); ++j) vb[j] = pat[ib[j]];
      Symbol sa = a.eval(a.coset_of(rep), va);
      Symbol sb = b.eval(b.coset_of(rep), vb);
      if (sa < 0 || sb < 0) {
        cmp.caveat_local_only = true;
        continue;
      }
      if (sa != sb) {
        cmp.equal = false;
        cmp.witness = pat;
        return cmp;
      }
    }
  }
  return cmp;
}

bool exact_commutes(const BlockMap& a, const BlockMap& b, Budget& budget, MapComparison* detail) {
  BlockMap ab = compose(a, b, budget);
  BlockMap ba = compose(b, a, budget);
  MapComparison cmp = maps_equal(ab, ba, budget);
  if (detail) *detail = cmp;
  return cmp.equal;
}

bool certify_automorphism(const BlockMap& map, const BlockMap& inverse, Budget& budget) {
  BlockMap id = identity_map(map.spec_ptr());
  return maps_equal(compose(map, inverse, budget), id, budget).equal &&
         maps_equal(compose(inverse, map, budget), id, budget).equal;
}

bool PermutationOnFix::is_identity() const {
  for (std::size_t i = 0; i < images.size(); ++i)
    if (images[i] != i) return false;
  return true;
}

PermutationOnFix periodic_action(const BlockMap& map, const LatticeSubgroup& l, Budget& budget) {
  if (map.period() && !l.subgroup_of(*map.period()))
    throw Error(ErrorKind::IncompatibleLattice, "periodic action needs L inside the map's period");
  auto fix = fixed_points(map.spec(), l, budget);
  // fixed_points enumerates valuations in lexicographic order.
  auto locate = [&fix](const std::vector<Symbol>& vals) -> std::size_t {
    auto it = std::lower_bound(
        fix.begin(), fix.end(), vals,
        [](const PeriodicConfig& c, const std::vector<Symbol>& v) { return c.values < v; });
    if (it == fix.end() || it->values != vals)
      throw Error(ErrorKind::NotBijective, "image is not a fixed point of the lattice");
    return static_cast<std::size_t>(it - fix.begin());
  };
  PermutationOnFix perm{l, std::vector<std::uint32_t>(fix.size())};
  std::vector<char> hit(fix.size(), 0);
  for (std::size_t i = 0; i < fix.size(); ++i) {
    PeriodicConfig img = apply_map(map, fix[i], budget);
    std::size_t j = locate(img.values);
    if (hit[j]) throw Error(ErrorKind::NotBijective, "restriction is not injective");
    hit[j] = 1;
    perm.images[i] = static_cast<std::uint32_t>(j);
  }
  return perm;
}

PermutationOnFix compose_actions(const PermutationOnFix& f, const PermutationOnFix& g) {
  if (!(f.lattice == g.lattice) || f.images.size() != g.images.size())
    throw Error(ErrorKind::BadArgument, "actions on different fixed-point sets");
  PermutationOnFix out{f.lattice, std::vector<std::uint32_t>(f.images.size())};
  for (std::size_t i = 0; i < f.images.size(); ++i) out.images[i] = f.images[g.images[i]];
  return out;
}

Parity permutation_parity(const std::vector<std::uint32_t>& images) {
  std::vector<char> seen(images.size(), 0);
  std::size_t transpositions = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    std::size_t j = i;
    while (!seen[j]) {
      seen[j] = 1;
      j = images[j];
      ++len;
    }
    transpositions += len - 1;
  }
  return (transpositions % 2 == 0) ? Parity::Even : Parity::Odd;
}

bool square_root_obstruction(const SftSpec& spec, const Vec& v, const LatticeSubgroup& l,
                             Budget& budget) {
  auto spec_ptr = std::make_shared<SftSpec>(spec);
  PermutationOnFix p = periodic_action(make_shift(spec_ptr, v), l, budget);
  return permutation_parity(p) == Parity::Odd;
}

}  // namespace sftlab
