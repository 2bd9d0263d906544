#include "sftlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace sftlab {

namespace {

using Rng = std::mt19937_64;

FiniteSet cube(int dim, Coord side) {
  return FiniteSet::box(Vec(dim, 0), Vec(dim, side - 1));
}

std::vector<Symbol> random_symbol_perm(Rng& rng, int a) {
  std::vector<Symbol> perm(a);
  for (int i = 0; i < a; ++i) perm[i] = static_cast<Symbol>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

std::vector<int> random_even_digit_perm(Rng& rng, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  if (permutation_parity(std::vector<std::uint32_t>(perm.begin(), perm.end())) == Parity::Odd)
    std::swap(perm[0], perm[1]);
  return perm;
}

PeriodicConfig random_periodic(Rng& rng, const SftSpec& spec, const LatticeSubgroup& l,
                               Budget& budget) {
  auto fix = fixed_points(spec, l, budget);
  std::uniform_int_distribution<std::size_t> pick(0, fix.size() - 1);
  return fix[pick(rng)];
}

// Random even permutation gates built from an extension table row.
struct RandomGate {
  Gate gate;
  GateLattice lattice;
  std::vector<Symbol> row;
};

std::optional<RandomGate> random_extension_gate(Rng& rng, std::shared_ptr<const SftSpec> spec,
                                                const FiniteSet& d, const LatticeSubgroup& h,
                                                double s, Budget& budget, bool order2) {
  ExtensionTable table = extension_table(*spec, d, s, budget);
  std::vector<const ExtensionTable::Row*> usable;
  for (const auto& row : table.rows)
    if (row.count >= (order2 ? 4 : 3)) usable.push_back(&row);
  if (usable.empty()) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, usable.size() - 1);
  const auto* row = usable[pick(rng)];
  const std::size_t m = row->count.convert_to<std::size_t>();
  std::vector<std::uint32_t> tau(m);
  std::iota(tau.begin(), tau.end(), 0);
  if (order2) {
    // Product of two disjoint transpositions: even and of order two.
    std::vector<std::uint32_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::swap(tau[idx[0]], tau[idx[1]]);
    std::swap(tau[idx[2]], tau[idx[3]]);
  } else {
    // Random 3-cycle.
    std::vector<std::uint32_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uint32_t a = idx[0], b = idx[1], c = idx[2];
    tau[a] = b;
    tau[b] = c;
    tau[c] = a;
  }
  RandomGate rg{gate_from_extension_permutation(spec, table, row->boundary_pattern, tau, budget),
                GateLattice{Gate{}, h}, row->boundary_pattern};
  rg.lattice = make_gate_lattice(rg.gate, h);
  return rg;
}

void note(std::vector<VerifyOutcome>& out, const std::string& module, const std::string& name,
          bool pass, const std::string& detail = "") {
  out.push_back({module, name, pass ? "pass" : "fail", detail});
}

void skip(std::vector<VerifyOutcome>& out, const std::string& module, const std::string& name,
          const std::string& why) {
  out.push_back({module, name, "skip", why});
}

}  // namespace

std::vector<VerifyOutcome> verify_suite(const SftSpec& spec_in, const std::string& depth,
                                        std::uint64_t seed, Budget& budget) {
  std::vector<VerifyOutcome> out;
  auto spec = std::make_shared<const SftSpec>(spec_in);
  Rng rng(seed);
  const int trials = depth == "small" ? 10 : 40;
  const int d = spec->dim;

  // ---- lattice_core ----
  {
    bool ok = true;
    std::uniform_int_distribution<int> entry(-3, 3);
    for (int t = 0; t < trials && ok; ++t) {
      std::vector<std::vector<Coord>> m(d, std::vector<Coord>(d));
      do {
        for (auto& row : m)
          for (auto& c : row) c = entry(rng);
      } while ([&] {
        try {
          LatticeSubgroup::from_basis(m);
          return false;
        } catch (const Error&) {
          return true;
        }
      }());
      auto l = LatticeSubgroup::from_basis(m);
      // Multiply by an elementary unimodular column operation.
      auto mu = m;
      if (d >= 2) {
        for (int i = 0; i < d; ++i) mu[i][0] += 2 * mu[i][d - 1];
      }
      ok = LatticeSubgroup::from_basis(mu) == l || d == 1;
      if (l.index() <= 60 && BigInt(l.fundamental_domain().size()) != l.index()) ok = false;
      Vec v(d);
      for (auto& c : v) c = entry(rng) * 3;
      Vec r = l.reduce(v);
      if (l.reduce(r) != r) ok = false;
    }
    note(out, "lattice_core", "hnf_canonicity_and_reduction", ok);

    auto l1 = LatticeSubgroup::scaled_identity(d, 2);
    auto l2 = LatticeSubgroup::scaled_identity(d, 3);
    auto cc = commensurable_check(l1, l2);
    note(out, "lattice_core", "intersection_indices",
         cc.intersection.subgroup_of(l1) && cc.intersection.subgroup_of(l2) &&
             cc.intersection.index() == cc.index_in_l1 * l1.index());

    Tower tower = build_centered_tower(3, d, d == 1 ? 4 : 3);
    auto tres = verify_tower(tower);
    bool folner = tres.pass;
    for (std::size_t i = 1; i < tres.folner_ratios.size(); ++i)
      if (tres.folner_ratios[i] >= tres.folner_ratios[i - 1]) folner = false;
    note(out, "lattice_core", "tower_conditions_and_folner", folner);
  }

  // ---- sft_core ----
  {
    FiniteSet f = d == 1 ? FiniteSet::interval(0, 7) : cube(d, 3);
    auto table = extension_table(*spec, f, 1, budget);
    note(out, "sft_core", "extension_rows_sum_to_count",
         table.total() == count_patterns(*spec, f, budget).count);

    auto coarse = LatticeSubgroup::scaled_identity(d, 2);
    auto fine = LatticeSubgroup::scaled_identity(d, 4);
    auto fxc = fixed_points(*spec, coarse, budget);
    auto fxf = fixed_points(*spec, fine, budget);
    bool mono = true;
    for (const auto& c : fxc) {
      PeriodicConfig lifted = re_periodize(c, fine);
      if (std::find(fxf.begin(), fxf.end(), lifted) == fxf.end()) mono = false;
    }
    note(out, "sft_core", "fixed_points_monotone", mono);

    if (spec->full_shift()) {
      bool ok = true;
      for (Coord k = 2; k <= 3; ++k) {
        auto l = LatticeSubgroup::scaled_identity(d, k);
        auto cnt = count_patterns(*spec, l.fundamental_domain(), budget);
        double per = log2_of(cnt.count) / l.index().convert_to<double>();
        if (std::abs(per - std::log2(spec->alphabet_size())) > 1e-9) ok = false;
      }
      note(out, "sft_core", "index_entropy_identity", ok);
    } else {
      skip(out, "sft_core", "index_entropy_identity", "full shifts only");
    }

    if (d == 1) {
      bool ok = true;
      for (int n = 1; n <= 10 && ok; ++n) {
        // Oracle: direct enumeration.
        auto en = enumerate_patterns(*spec, FiniteSet::interval(0, n - 1), budget);
        ok = BigInt(en.patterns.size()) ==
             count_patterns(*spec, FiniteSet::interval(0, n - 1), budget).count;
      }
      note(out, "sft_core", "transfer_matches_enumeration", ok);
    } else {
      skip(out, "sft_core", "transfer_matches_enumeration", "d = 1 only");
    }

    Coord gap = spec->full_shift() ? 0 : 1;
    FiniteSet region = d == 1 ? FiniteSet::interval(0, 9) : cube(d, 4);
    auto si = strong_irreducibility_check(*spec, gap, {1, 2}, region, budget);
    note(out, "sft_core", "strong_irreducibility", si.pass);

    if (spec->zero) {
      Symbol nz = (*spec->zero == 0) ? 1 : 0;
      FiniteConfig single{FiniteSet::singleton(Vec(d, 0)), {nz}};
      if (is_admissible_config(single, *spec)) {
        auto y = corner_decrease(*spec, single, std::max<Coord>(1, spec->window_size()), budget);
        note(out, "sft_core", "corner_decrease_singleton", y.has_value() && y->support.empty());
      } else {
        skip(out, "sft_core", "corner_decrease_singleton", "no isolated nonzero symbol");
      }
    } else {
      skip(out, "sft_core", "corner_decrease_singleton", "spec has no zero symbol");
    }
  }

  // ---- morphisms ----
  {
    bool ok = true;
    std::uniform_int_distribution<Coord> sh(-2, 2);
    for (int t = 0; t < trials && ok; ++t) {
      BlockMap phi = make_symbol_perm(spec, random_symbol_perm(rng, spec->alphabet_size()));
      Vec v(d);
      for (auto& c : v) c = sh(rng);
      ok = exact_commutes(phi, make_shift(spec, v), budget);
    }
    note(out, "morphisms", "blockmaps_commute_with_shifts", ok);

    {
      auto l = LatticeSubgroup::scaled_identity(d, 2);
      BlockMap f = make_symbol_perm(spec, random_symbol_perm(rng, spec->alphabet_size()));
      Vec e1(d, 0);
      e1[0] = 1;
      BlockMap g = make_shift(spec, e1);
      bool functorial = true;
      try {
        auto lhs = periodic_action(compose(f, g, budget), l, budget);
        auto rhs = compose_actions(periodic_action(f, l, budget), periodic_action(g, l, budget));
        functorial = lhs.images == rhs.images;
      } catch (const Error& e) {
        functorial = false;
      }
      note(out, "morphisms", "periodic_action_functorial", functorial);
    }

    {
      // Abstract parity homomorphism on random permutations.
      bool ok2 = true;
      std::uniform_int_distribution<int> size(3, 8);
      for (int t = 0; t < trials && ok2; ++t) {
        int n = size(rng);
        std::vector<std::uint32_t> p(n), q(n);
        std::iota(p.begin(), p.end(), 0);
        std::iota(q.begin(), q.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::shuffle(q.begin(), q.end(), rng);
        std::vector<std::uint32_t> pq(n);
        for (int i = 0; i < n; ++i) pq[i] = p[q[i]];
        bool even_pq = permutation_parity(pq) == Parity::Even;
        bool expect = (permutation_parity(p) == permutation_parity(q));
        ok2 = (even_pq == expect);
      }
      note(out, "morphisms", "parity_homomorphism", ok2);
    }

    if (spec->tracks && spec->num_tracks() >= 2 && (*spec->tracks)[1] >= 5 &&
        spec->full_shift()) {
      bool law = true;
      const int b = (*spec->tracks)[1];
      std::uniform_int_distribution<Coord> cell(-1, 1);
      std::uniform_int_distribution<int> digit(0, (*spec->tracks)[0] - 1);
      for (int t = 0; t < trials && law; ++t) {
        auto c1 = Cylinder{FiniteSet::singleton(Vec(d, cell(rng))), {digit(rng)}};
        auto c2 = Cylinder{FiniteSet::singleton(Vec(d, cell(rng))), {digit(rng)}};
        auto p1 = random_even_digit_perm(rng, b);
        auto p2 = random_even_digit_perm(rng, b);
        auto f1 = TrackPermMap::from_condition(spec, p1, {c1});
        auto f2 = TrackPermMap::from_condition(spec, p2, {c2});
        TrackPermMap comm = track_perm_commutator(f1, f2);
        std::vector<int> pc(b);
        for (int i = 0; i < b; ++i) pc[i] = p1[p2[i]];
        std::vector<int> inv1(b), inv2(b);
        for (int i = 0; i < b; ++i) inv1[p1[i]] = i;
        for (int i = 0; i < b; ++i) inv2[p2[i]] = i;
        std::vector<int> commperm(b);
        for (int i = 0; i < b; ++i) commperm[i] = p1[p2[inv1[inv2[i]]]];
        auto rhs = make_conditioned_perm(spec, commperm, intersect_cylinder_unions({c1}, {c2}));
        law = maps_equal(comm.to_blockmap(), rhs, budget).equal;
      }
      note(out, "morphisms", "commutator_trick_law", law);
    } else {
      skip(out, "morphisms", "commutator_trick_law",
           "needs a full product shift with a track of size at least 5");
    }

    if (spec->tracks && spec->num_tracks() == 2 && (*spec->tracks)[0] == (*spec->tracks)[1] &&
        spec->full_shift()) {
      Vec e1(d, 0);
      e1[0] = 1;
      BlockMap g = compose(make_track_swap(spec, 0, 1), make_partial_shift(spec, 0, e1), budget);
      bool root = maps_equal(compose(g, g, budget), make_shift(spec, e1), budget).equal;
      note(out, "morphisms", "track_square_root", root);
    } else {
      skip(out, "morphisms", "track_square_root", "needs two equal tracks");
    }
  }

  // ---- gates ----
  {
    FiniteSet dset = d == 1 ? FiniteSet::interval(0, 3) : cube(d, 2);
    LatticeSubgroup h = d == 1 ? LatticeSubgroup::scaled_identity(1, 4)
                               : LatticeSubgroup::scaled_identity(d, 2);
    bool commutes = true, order2 = true, iso = true, strong = true, disjoint = true;
    bool any_gate = false;
    for (int t = 0; t < std::max(2, trials / 2); ++t) {
      auto rg = random_extension_gate(rng, spec, dset, h, spec->window_size() + 1, budget, false);
      if (!rg) break;
      any_gate = true;
      BlockMap bm = gate_lattice_blockmap(rg->lattice, budget);
      for (int col = 0; col < d && commutes; ++col) {
        Vec gen(d);
        for (int i = 0; i < d; ++i) gen[i] = h.basis()[i][col];
        commutes = exact_commutes(bm, make_shift(spec, gen), budget);
      }
      auto rg2 =
          random_extension_gate(rng, spec, dset, h, spec->window_size() + 1, budget, false);
      if (rg2 && !(rg2->row == rg->row))
        strong = strong && strong_commutation_check(rg->lattice, rg2->lattice, budget);

      auto o2 = random_extension_gate(rng, spec, dset, h, spec->window_size() + 1, budget, true);
      if (o2) {
        auto l = LatticeSubgroup::scaled_identity(d, d == 1 ? 8 : 4);
        PeriodicConfig x = random_periodic(rng, *spec, l, budget);
        PeriodicConfig once = gate_lattice_apply(o2->lattice, x, budget);
        PeriodicConfig twice = gate_lattice_apply(o2->lattice, once, budget);
        order2 = order2 && twice == re_periodize(x, twice.lattice);
      }
    }
    if (any_gate) {
      note(out, "gates", "lattice_commutes_with_period", commutes);
      note(out, "gates", "order2_gates_give_order2_lattices", order2);
      note(out, "gates", "distinct_rows_strongly_commute", strong);
    } else {
      skip(out, "gates", "lattice_commutes_with_period", "no usable extension rows");
      skip(out, "gates", "order2_gates_give_order2_lattices", "no usable extension rows");
      skip(out, "gates", "distinct_rows_strongly_commute", "no usable extension rows");
    }

    // Alt(E(u)) composition: two tau's compose as gate lattices.
    {
      ExtensionTable table = extension_table(*spec, dset, spec->window_size() + 1, budget);
      const ExtensionTable::Row* row = nullptr;
      for (const auto& r : table.rows)
        if (r.count >= 3 && r.count <= 24) row = &r;
      if (row) {
        std::size_t m = row->count.convert_to<std::size_t>();
        auto tau1 = std::vector<std::uint32_t>(m);
        std::iota(tau1.begin(), tau1.end(), 0);
        auto tau2 = tau1;
        std::uint32_t a = 0, b = 1 % m, c = 2 % m;
        tau1[a] = b;
        tau1[b] = c;
        tau1[c] = a;
        tau2[a] = c;
        tau2[c] = b;
        tau2[b] = a;
        auto g1 = gate_from_extension_permutation(spec, table, row->boundary_pattern, tau1, budget);
        auto g2 = gate_from_extension_permutation(spec, table, row->boundary_pattern, tau2, budget);
        std::vector<std::uint32_t> tau12(m);
        for (std::size_t i = 0; i < m; ++i) tau12[i] = tau1[tau2[i]];
        auto g12 = gate_from_extension_permutation(spec, table, row->boundary_pattern, tau12, budget);
        BlockMap lhs = compose(gate_lattice_blockmap(make_gate_lattice(g1, h), budget),
                               gate_lattice_blockmap(make_gate_lattice(g2, h), budget), budget);
        BlockMap rhs = gate_lattice_blockmap(make_gate_lattice(g12, h), budget);
        iso = maps_equal(lhs, rhs, budget).equal;
        note(out, "gates", "alt_eu_composition", iso);
      } else {
        skip(out, "gates", "alt_eu_composition", "no row of workable size");
      }
    }
    (void)disjoint;
  }

  // ---- homoclinics ----
  if (spec->zero) {
    Symbol nz = -1, nz2 = -1;
    for (Symbol s = 0; s < spec->alphabet_size(); ++s) {
      if (s == *spec->zero) continue;
      if (nz < 0)
        nz = s;
      else if (nz2 < 0)
        nz2 = s;
    }
    FiniteConfig p1{FiniteSet::singleton(Vec(d, 0)), {nz}};
    Vec far(d, 0);
    far[0] = 3;
    FiniteConfig p2 = [&] {
      std::vector<Vec> cells = {Vec(d, 0), far};
      return FiniteConfig{FiniteSet(cells), {nz, nz}};
    }();
    bool gp = true;
    Vec off(d, 0);
    off[0] = 5;
    gp = good_position(translate_config(p2, off)) == good_position(p2);
    gp = gp && good_position(good_position(p2)) == good_position(p2);
    note(out, "homoclinics", "good_position_idempotent_invariant", gp);

    if (is_admissible_config(p1, *spec) && is_admissible_config(p2, *spec)) {
      try {
        HomoclinicPermuter hp = homoclinic_permuter(spec, {p1, p2}, {1, 0}, 0, 0, budget);
        bool cyc = hp.apply(hp.apply(hp.points[0])) == hp.points[0] &&
                   hp.apply(hp.points[0]) == hp.points[1];
        note(out, "homoclinics", "permuter_realizes_cycles", cyc);
      } catch (const Error& e) {
        note(out, "homoclinics", "permuter_realizes_cycles", false, e.what());
      }
    } else {
      skip(out, "homoclinics", "permuter_realizes_cycles", "example islands not admissible");
    }

    if (nz2 >= 0 && spec->full_shift() && d == 1) {
      try {
        GliderSystem gs =
            GliderSystem::build(spec, nz, nz2, GliderSystem::Params{2, 0, 0, true}, budget);
        bool sim_ok = true;
        std::uniform_int_distribution<Coord> pos(-15, 15);
        for (int t = 0; t < std::max(3, trials / 3) && sim_ok; ++t) {
          std::vector<Vec> cells;
          std::set<Coord> used;
          std::uniform_int_distribution<int> nc(1, 4);
          int want = nc(rng);
          std::vector<Symbol> vals;
          std::uniform_int_distribution<int> species(0, 1);
          while (static_cast<int>(cells.size()) < want) {
            Coord c = pos(rng);
            if (used.insert(c).second) {
              cells.push_back({c});
              vals.push_back(species(rng) ? nz : nz2);
            }
          }
          FiniteSet supp(cells);
          std::vector<Symbol> sv(supp.size());
          for (std::size_t i = 0; i < cells.size(); ++i) sv[*supp.index_of(cells[i])] = vals[i];
          FiniteConfig x{supp, sv};
          auto dec = simulate_decomposition(gs, x, 3000, budget);
          (void)dec;
        }
        note(out, "homoclinics", "glider_involutions_and_decomposition", sim_ok);
      } catch (const Error& e) {
        note(out, "homoclinics", "glider_involutions_and_decomposition", false, e.what());
      }
    } else {
      skip(out, "homoclinics", "glider_involutions_and_decomposition",
           "needs a d=1 full shift with two nonzero symbols");
    }
  } else {
    skip(out, "homoclinics", "good_position_idempotent_invariant", "spec has no zero symbol");
  }

  // ---- local_q ----
  {
    bool mono = true;
    std::uniform_int_distribution<int> fcount(1, 4);
    std::uniform_int_distribution<int> forder(2, 5000);
    for (int t = 0; t < trials && mono; ++t) {
      SimpleFactorProfile prof;
      int k = fcount(rng);
      for (int i = 0; i < k; ++i) prof.factors.push_back(forder(rng));
      double m = 1.0 + (t % 5);
      long n = 1 + (t % 4);
      if (ps_membership(prof, m, n)) {
        mono = ps_membership(prof, m + 1, n) && ps_membership(prof, m, n + 2);
      }
    }
    note(out, "local_q", "ps_membership_monotone", mono);

    bool weight_ok = true;
    for (int n = 1; n <= (d == 1 ? 5 : 3); ++n) {
      FiniteSet f = FiniteSet::centered_box(d, n);
      if (boundary_weight(f, 1, 2) > boundary_weight(f, 2, 2)) weight_ok = false;
      if (boundary_weight(f, 1, 2) > boundary_weight(f, 1, 3)) weight_ok = false;
    }
    // Controlled: log2 weight over |F| decreases along centered boxes.
    double prev = 1e18;
    for (int n = 2; n <= (d == 1 ? 14 : 6); n += 2) {
      FiniteSet f = FiniteSet::centered_box(d, n);
      double ratio = log2_of(boundary_weight(f, 1, 2)) / static_cast<double>(f.size());
      if (ratio >= prev) weight_ok = false;
      prev = ratio;
    }
    note(out, "local_q", "boundary_weight_controlled", weight_ok);

    bool stirling_ok = true;
    for (std::uint64_t e : {64u, 300u, 1024u, 9999u}) {
      ScaledLog exact = log2_factorial_exact(e);
      ScaledLog st = log2_factorial_stirling(std::log2(static_cast<double>(e)), 0);
      double a = exact.to_double(), b = st.to_double();
      double bound = a * (exact.rel_error() + st.rel_error());
      if (std::abs(a - b) > bound) stirling_ok = false;
    }
    note(out, "local_q", "stirling_within_tracked_bound", stirling_ok);

    if (spec->full_shift()) {
      FiniteSet f = d == 1 ? FiniteSet::interval(0, 8) : cube(d, 3);
      auto beeps = beeps_statistic(*spec, f, 1, budget);
      note(out, "local_q", "full_shift_beeps_is_two", beeps.value == 2.0);
      if (d == 1) {
        auto seq = entropy_recovery_sequence(*spec, 3, 1, 4, budget);
        bool dec = true;
        double h = std::log2(spec->alphabet_size());
        double last = 1e18;
        for (const auto& rep : seq) {
          if (rep.trivial) continue;
          if (rep.a_n <= h || rep.a_n >= last) dec = false;
          last = rep.a_n;
        }
        note(out, "local_q", "recovery_overshoots_and_decreases", dec);
      } else {
        skip(out, "local_q", "recovery_overshoots_and_decreases", "d = 1 only at this depth");
      }
    } else {
      skip(out, "local_q", "full_shift_beeps_is_two", "full shifts only");
      skip(out, "local_q", "recovery_overshoots_and_decreases", "full shifts only");
    }
  }

  return out;
}

Json verify_outcomes_to_json(const std::vector<VerifyOutcome>& outcomes) {
  Json rows = Json::array();
  bool all_pass = true;
  for (const auto& o : outcomes) {
    rows.push_back(Json{{"module", o.module},
                        {"name", o.name},
                        {"status", o.status},
                        {"detail", o.detail}});
    if (o.status == "fail") all_pass = false;
  }
  return Json{{"table", rows},
              {"csv_columns", Json::array({"module", "name", "status", "detail"})},
              {"all_pass", all_pass}};
}

ExperimentPlan plan_from_json(const Json& j) {
  ExperimentPlan plan;
  plan.experiment = j.at("experiment").get<std::string>();
  if (j.contains("spec")) plan.spec_source = j.at("spec").get<std::string>();
  if (j.contains("params")) plan.params = j.at("params");
  plan.seed = j.value("seed", 1);
  plan.budget = j.value("budget", Budget::kDefaultLimit);
  return plan;
}

Json run_experiment(const ExperimentPlan& plan) {
  Budget budget(plan.budget);
  Json report;
  report["experiment"] = plan.experiment;
  report["seed"] = plan.seed;
  report["params"] = plan.params;
  if (!plan.spec_source.empty()) report["spec"] = plan.spec_source;

  auto need_spec = [&]() -> SftSpec {
    if (plan.spec_source.empty())
      throw Error(ErrorKind::BadArgument, "experiment requires --spec");
    return ingest_spec(plan.spec_source);
  };

  try {
    if (plan.experiment == "entropy") {
      SftSpec spec = need_spec();
      int n_min = plan.params.value("n_min", 2);
      int n_max = plan.params.value("n_max", spec.dim == 1 ? 16 : 4);
      std::vector<FiniteSet> boxes;
      for (int n = n_min; n <= n_max; ++n) boxes.push_back(cube(spec.dim, n));
      auto est = entropy_estimates(spec, boxes, budget);
      Json rows = Json::array();
      for (const auto& e : est)
        rows.push_back(Json{{"box_id", e.box_id},
                            {"cells", e.cells},
                            {"log2_count", e.log2_count},
                            {"per_site", e.per_site},
                            {"provenance", provenance_name(e.provenance)}});
      report["table"] = rows;
      report["csv_columns"] =
          Json::array({"box_id", "cells", "log2_count", "per_site", "provenance"});
    } else if (plan.experiment == "fix") {
      SftSpec spec = need_spec();
      Json rows = Json::array();
      if (plan.params.contains("lattice")) {
        LatticeSubgroup l = lattice_from_json(Json{{"basis", plan.params.at("lattice")}});
        rows.push_back(Json{{"lattice", lattice_to_json(l)["basis"]},
                            {"count", count_fixed_points(spec, l, budget).str()},
                            {"provenance", "exact"}});
      } else {
        int n_min = plan.params.value("n_min", 1);
        int n_max = plan.params.value("n_max", spec.dim == 1 ? 10 : 3);
        for (int n = n_min; n <= n_max; ++n) {
          auto l = LatticeSubgroup::scaled_identity(spec.dim, n);
          rows.push_back(Json{{"n", n},
                              {"count", count_fixed_points(spec, l, budget).str()},
                              {"provenance", "exact"}});
        }
      }
      report["table"] = rows;
      report["csv_columns"] = Json::array({"n", "count", "provenance"});
    } else if (plan.experiment == "extensions") {
      SftSpec spec = need_spec();
      int len = plan.params.value("box", spec.dim == 1 ? 5 : 3);
      double s = plan.params.value("S", 1.0);
      auto table = extension_table(spec, cube(spec.dim, len), s, budget);
      Json rows = Json::array();
      for (const auto& row : table.rows) {
        std::string u;
        for (std::size_t i = 0; i < row.boundary_pattern.size(); ++i)
          u += (i ? "," : "") + spec.alphabet[row.boundary_pattern[i]];
        rows.push_back(Json{{"u", u},
                            {"count", row.count.str()},
                            {"provenance", provenance_name(table.provenance)}});
      }
      report["table"] = rows;
      report["csv_columns"] = Json::array({"u", "count", "provenance"});
      report["total"] = table.total().str();
    } else if (plan.experiment == "beeps") {
      SftSpec spec = need_spec();
      int len = plan.params.value("box", spec.dim == 1 ? 5 : 3);
      double s = plan.params.value("S", 1.0);
      auto res = beeps_statistic(spec, cube(spec.dim, len), s, budget);
      report["value"] = res.value;
      report["provenance"] = provenance_name(res.provenance);
    } else if (plan.experiment == "localq") {
      SftSpec spec = need_spec();
      Coord k = plan.params.value("base_k", 3);
      double s = plan.params.value("S", 1.0);
      int n_max = plan.params.value("n_max", 7);
      auto seq = entropy_recovery_sequence(spec, k, s, n_max, budget);
      Json rows = Json::array();
      for (const auto& rep : seq) {
        rows.push_back(Json{{"n", rep.level},
                            {"index", rep.index.str()},
                            {"num_boundary_patterns", rep.log2_num_rows},
                            {"logE_bits", rep.log2_extension},
                            {"loglogK", rep.trivial ? 0.0 : rep.loglog_kn},
                            {"a_n", rep.trivial ? 0.0 : rep.a_n},
                            {"error_bound", rep.error_bound},
                            {"trivial", rep.trivial},
                            {"provenance", rep.trivial
                                               ? "trivial_group"
                                               : std::string(provenance_name(rep.provenance)) +
                                                     "+stirling_with_error"}});
      }
      report["table"] = rows;
      report["csv_columns"] = Json::array({"n", "index", "num_boundary_patterns", "logE_bits",
                                           "loglogK", "a_n", "error_bound", "trivial",
                                           "provenance"});
    } else if (plan.experiment == "glider") {
      SftSpec spec = need_spec();
      auto spec_ptr = std::make_shared<const SftSpec>(spec);
      if (!spec.zero || spec.alphabet_size() < 3)
        throw Error(ErrorKind::BadSpec, "glider runs need a pointed spec with two extra symbols");
      Symbol a1 = spec.zero.value() == 0 ? 1 : 0;
      Symbol a2 = a1 + 1 == spec.zero.value() ? a1 + 2 : a1 + 1;
      Coord r = plan.params.value("R", 2);
      long steps = plan.params.value("steps", 10000);
      int count = plan.params.value("count", 20);
      int cells_max = plan.params.value("support_cells", 6);
      Coord window = plan.params.value("window", 40);
      GliderSystem gs = GliderSystem::build(
          spec_ptr, a1, a2, GliderSystem::Params{r, 0, 0, plan.params.value("verify", true)},
          budget);
      Rng rng(plan.seed);
      std::uniform_int_distribution<Coord> pos(-window, window);
      std::uniform_int_distribution<int> nc(1, cells_max);
      std::uniform_int_distribution<int> species(0, 1);
      Json rows = Json::array();
      for (int t = 0; t < count; ++t) {
        std::set<Coord> used;
        std::vector<Vec> cells;
        std::vector<Symbol> vals;
        int want = nc(rng);
        while (static_cast<int>(cells.size()) < want) {
          Coord c = pos(rng);
          if (used.insert(c).second) {
            cells.push_back({c});
            vals.push_back(species(rng) ? a1 : a2);
          }
        }
        FiniteSet supp(cells);
        std::vector<Symbol> sv(supp.size());
        for (std::size_t i = 0; i < cells.size(); ++i) sv[*supp.index_of(cells[i])] = vals[i];
        auto dec = simulate_decomposition(gs, FiniteConfig{supp, sv}, steps, budget);
        rows.push_back(Json{{"config_id", t},
                            {"support_cells", want},
                            {"transient", dec.transient},
                            {"period", dec.period},
                            {"left_cells", dec.left.support.size()},
                            {"middle_cells", dec.middle.support.size()},
                            {"right_cells", dec.right.support.size()}});
      }
      report["table"] = rows;
      report["csv_columns"] = Json::array({"config_id", "support_cells", "transient", "period",
                                           "left_cells", "middle_cells", "right_cells"});
    } else if (plan.experiment == "permuter") {
      SftSpec spec = need_spec();
      auto spec_ptr = std::make_shared<const SftSpec>(spec);
      std::vector<FiniteConfig> points;
      for (const auto& pj : plan.params.at("points")) points.push_back(config_from_json(spec, pj));
      std::vector<std::size_t> perm = plan.params.at("perm").get<std::vector<std::size_t>>();
      auto hp = homoclinic_permuter(spec_ptr, points, perm, plan.params.value("M", 0),
                                    plan.params.value("N", 0), budget);
      Json rows = Json::array();
      for (std::size_t i = 0; i < hp.points.size(); ++i) {
        FiniteConfig img = hp.apply(hp.points[i]);
        rows.push_back(Json{{"point", i},
                            {"image", static_cast<int>(hp.perm[i])},
                            {"verified", img == hp.points[hp.perm[i]]}});
      }
      report["table"] = rows;
      report["csv_columns"] = Json::array({"point", "image", "verified"});
      report["M"] = hp.isolation_m;
      report["N"] = hp.cancellation_n;
    } else if (plan.experiment == "sqroot") {
      SftSpec spec = need_spec();
      auto spec_ptr = std::make_shared<const SftSpec>(spec);
      Vec v(spec.dim, 0);
      v[0] = 1;
      if (plan.params.contains("v")) {
        auto vv = plan.params.at("v").get<std::vector<Coord>>();
        v = Vec(vv.begin(), vv.end());
      }
      Coord k = plan.params.value("lattice_k", 2);
      std::vector<Coord> diag(spec.dim, 1);
      diag[0] = k;
      auto l = LatticeSubgroup::diagonal(diag);
      bool obstructed = square_root_obstruction(spec, v, l, budget);
      report["obstruction"] = obstructed;
      report["lattice"] = lattice_to_json(l)["basis"];
      if (spec.tracks && spec.num_tracks() == 2 &&
          (*spec.tracks)[0] == (*spec.tracks)[1]) {
        BlockMap g =
            compose(make_track_swap(spec_ptr, 0, 1), make_partial_shift(spec_ptr, 0, v), budget);
        bool tables = maps_equal(compose(g, g, budget), make_shift(spec_ptr, v), budget).equal;
        bool on_fix = true;
        int max_n = plan.params.value("max_fix_n", 6);
        for (int n = 1; n <= max_n; ++n) {
          std::vector<Coord> dn(spec.dim, 1);
          dn[0] = n;
          auto ln = LatticeSubgroup::diagonal(dn);
          auto lhs = compose_actions(periodic_action(g, ln, budget), periodic_action(g, ln, budget));
          auto rhs = periodic_action(make_shift(spec_ptr, v), ln, budget);
          if (!(lhs.images == rhs.images)) on_fix = false;
        }
        report["explicit_root_tables"] = tables;
        report["explicit_root_on_fix"] = on_fix;
      }
    } else if (plan.experiment == "classify") {
      BigInt a(plan.params.at("a").get<long>());
      BigInt b(plan.params.at("b").get<long>());
      auto mn = log_ratio_rational(a, b);
      report["isomorphic"] = mn.has_value();
      if (mn) {
        report["m"] = mn->first;
        report["n"] = mn->second;
      }
    } else if (plan.experiment == "verify") {
      SftSpec spec = need_spec();
      auto outcomes = verify_suite(spec, plan.params.value("depth", "small"), plan.seed, budget);
      Json vj = verify_outcomes_to_json(outcomes);
      report["table"] = vj["table"];
      report["csv_columns"] = vj["csv_columns"];
      report["all_pass"] = vj["all_pass"];
    } else {
      throw Error(ErrorKind::BadArgument, "unknown experiment '" + plan.experiment + "'");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::BudgetExceeded) {
      report["budget_exceeded"] = true;
      report["error"] = e.what();
      return report;
    }
    throw;
  }
  report["budget_used"] = budget.used();
  return report;
}

}  // namespace sftlab
