#include "sftlab/gates.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace sftlab {

namespace {

std::map<std::vector<Symbol>, std::size_t> index_patterns(
    const std::vector<std::vector<Symbol>>& patterns) {
  std::map<std::vector<Symbol>, std::size_t> m;
  for (std::size_t i = 0; i < patterns.size(); ++i) m[patterns[i]] = i;
  return m;
}

void check_bijection(const std::vector<std::uint32_t>& perm, std::size_t n) {
  if (perm.size() != n) throw Error(ErrorKind::NotBijective, "permutation size mismatch");
  std::vector<char> seen(n, 0);
  for (std::uint32_t i : perm) {
    if (i >= n || seen[i]) throw Error(ErrorKind::NotBijective, "not a permutation of X|D");
    seen[i] = 1;
  }
}

}  // namespace

std::size_t Gate::pattern_index(const std::vector<Symbol>& vals) const {
  auto it = std::lower_bound(patterns.begin(), patterns.end(), vals);
  if (it == patterns.end() || *it != vals)
    throw Error(ErrorKind::BadArgument, "pattern is not an admissible D-pattern");
  return static_cast<std::size_t>(it - patterns.begin());
}

Gate validate_gate(std::shared_ptr<const SftSpec> spec, const FiniteSet& d,
                   const std::vector<std::uint32_t>& perm, int margin, Budget& budget) {
  Gate gate;
  gate.spec = spec;
  gate.neighborhood = d;
  auto enumd = enumerate_patterns(*spec, d, budget);
  gate.patterns = std::move(enumd.patterns);
  gate.pattern_provenance = enumd.provenance;
  std::sort(gate.patterns.begin(), gate.patterns.end());
  check_bijection(perm, gate.patterns.size());
  gate.perm = perm;
  gate.margin = margin;

  if (!spec->full_shift() && margin > 0) {
    // Exhaustive surroundings search: every admissible pattern on the margin
    // ball must stay admissible after rewriting its D-part.
    FiniteSet region = ball(d, margin);
    std::vector<std::size_t> d_idx;
    for (const Vec& c : d.points()) d_idx.push_back(*region.index_of(c));
    auto surroundings = enumerate_patterns(*spec, region, budget);
    std::vector<Symbol> dpart(d.size());
    for (const auto& q : surroundings.patterns) {
      budget.charge();
      for (std::size_t j = 0; j < d.size(); ++j) dpart[j] = q[d_idx[j]];
      auto it = std::lower_bound(gate.patterns.begin(), gate.patterns.end(), dpart);
      if (it == gate.patterns.end() || *it != dpart) continue;  // not globally extendable
      const auto& image = gate.patterns[gate.perm[it - gate.patterns.begin()]];
      std::vector<Symbol> rewritten = q;
      for (std::size_t j = 0; j < d.size(); ++j) rewritten[d_idx[j]] = image[j];
      if (!is_locally_admissible(Pattern{region, rewritten}, *spec)) {
        std::string msg = "rewrite breaks admissibility, witness surrounding:";
        for (Symbol s : q) msg += " " + std::to_string(s);
        throw Error(ErrorKind::ContextUnsafe, msg);
      }
    }
  }
  return gate;
}

Parity gate_parity(const Gate& gate) {
  return permutation_parity(gate.perm);
}

Gate gate_from_extension_permutation(std::shared_ptr<const SftSpec> spec,
                                     const ExtensionTable& table,
                                     const std::vector<Symbol>& boundary_pattern,
                                     const std::vector<std::uint32_t>& tau, Budget& budget) {
  if (table.margin_s < static_cast<double>(spec->window_diameter()))
    throw Error(ErrorKind::MarginTooSmall,
                "margin S must cover the window diameter for collar-fixed gates");
  Gate gate;
  gate.spec = spec;
  gate.neighborhood = table.box;
  auto enumd = enumerate_patterns(*spec, table.box, budget);
  gate.patterns = std::move(enumd.patterns);
  gate.pattern_provenance = enumd.provenance;
  std::sort(gate.patterns.begin(), gate.patterns.end());
  gate.margin = static_cast<int>(table.margin_s);
  gate.structural = true;

  std::vector<std::size_t> boundary_idx;
  for (const Vec& b : table.boundary.points())
    boundary_idx.push_back(*table.box.index_of(b));

  // Members of E(u): patterns whose boundary restriction equals u, in pattern
  // order.
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < gate.patterns.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < boundary_idx.size() && match; ++j)
      if (gate.patterns[i][boundary_idx[j]] != boundary_pattern[j]) match = false;
    if (match) members.push_back(i);
  }
  if (members.empty())
    throw Error(ErrorKind::BadArgument, "boundary pattern has no extensions");
  check_bijection(tau, members.size());
  if (permutation_parity(tau) != Parity::Even)
    throw Error(ErrorKind::OddPermutation, "extension permutation must be even");

  gate.perm.resize(gate.patterns.size());
  std::iota(gate.perm.begin(), gate.perm.end(), 0);
  for (std::size_t k = 0; k < members.size(); ++k)
    gate.perm[members[k]] = static_cast<std::uint32_t>(members[tau[k]]);
  return gate;
}

GateLattice make_gate_lattice(Gate gate, const LatticeSubgroup& h) {
  if (BigInt(gate.neighborhood.size()) != h.index())
    throw Error(ErrorKind::IncompatibleLattice, "neighborhood size differs from the index");
  std::vector<Vec> reduced;
  for (const Vec& c : gate.neighborhood.points()) reduced.push_back(h.reduce(c));
  FiniteSet distinct(reduced);
  if (distinct.size() != gate.neighborhood.size())
    throw Error(ErrorKind::IncompatibleLattice, "neighborhood does not tile under the lattice");
  return GateLattice{std::move(gate), h};
}

BlockMap gate_lattice_blockmap(const GateLattice& gl, Budget& budget) {
  budget.charge(gl.gate.patterns.size());
  const FiniteSet& d = gl.gate.neighborhood;
  FiniteSet n = d.minkowski_sum(d.negate());
  FiniteSet fd = gl.lattice.fundamental_domain();

  // Per coset: the D-cell congruent to the representative, the embedding of
  // (D - that cell) in the neighborhood, and the output position inside D.
  struct CosetPlan {
    std::vector<std::size_t> tile_idx;
    std::size_t out_pos;
  };
  auto plans = std::make_shared<std::vector<CosetPlan>>();
  for (const Vec& rep : fd.points()) {
    Vec anchor;
    bool found = false;
    for (const Vec& c : d.points()) {
      if (gl.lattice.reduce(c) == rep) {
        anchor = c;
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorKind::IncompatibleLattice, "missing coset representative");
    CosetPlan plan;
    for (const Vec& c : d.points()) {
      auto idx = n.index_of(vec_sub(c, anchor));
      plan.tile_idx.push_back(*idx);
    }
    plan.out_pos = *d.index_of(anchor);
    plans->push_back(std::move(plan));
  }

  auto patterns = std::make_shared<std::vector<std::vector<Symbol>>>(gl.gate.patterns);
  auto perm = std::make_shared<std::vector<std::uint32_t>>(gl.gate.perm);
  auto rule = [plans, patterns, perm](std::size_t coset,
                                      const std::vector<Symbol>& vals) -> Symbol {
    const CosetPlan& plan = (*plans)[coset];
    std::vector<Symbol> tile(plan.tile_idx.size());
    for (std::size_t j = 0; j < tile.size(); ++j) tile[j] = vals[plan.tile_idx[j]];
    auto it = std::lower_bound(patterns->begin(), patterns->end(), tile);
    if (it == patterns->end() || *it != tile) return -1;  // tile not in X|D
    const auto& image = (*patterns)[(*perm)[it - patterns->begin()]];
    return image[plan.out_pos];
  };
  return BlockMap::functional(gl.gate.spec, n, rule, gl.lattice, "gate_lattice");
}

PeriodicConfig gate_lattice_apply(const GateLattice& gl, const PeriodicConfig& config,
                                  Budget& budget) {
  return apply_map(gate_lattice_blockmap(gl, budget), config, budget);
}

FiniteConfig gate_lattice_apply(const GateLattice& gl, const FiniteConfig& config, Budget& budget) {
  return apply_map(gate_lattice_blockmap(gl, budget), config, budget);
}

bool strong_commutation_check(const GateLattice& g1, const GateLattice& g2, Budget& budget) {
  return exact_commutes(gate_lattice_blockmap(g1, budget), gate_lattice_blockmap(g2, budget),
                        budget);
}

// ---- permutation groups ----

PermutationGroup::PermutationGroup(int degree) : degree_(degree) {
  if (degree < 1 || degree > kMaxPermDegree)
    throw Error(ErrorKind::DegreeTooLarge,
                "degree must be between 1 and " + std::to_string(kMaxPermDegree));
}

PermutationGroup::Perm PermutationGroup::mul(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

PermutationGroup::Perm PermutationGroup::inv(const Perm& a) {
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[a[i]] = static_cast<int>(i);
  return c;
}

void PermutationGroup::add_generator(const std::vector<int>& perm) {
  if (static_cast<int>(perm.size()) != degree_)
    throw Error(ErrorKind::BadArgument, "permutation degree mismatch");
  std::vector<char> seen(degree_, 0);
  for (int p : perm) {
    if (p < 0 || p >= degree_ || seen[p])
      throw Error(ErrorKind::NotBijective, "not a permutation");
    seen[p] = 1;
  }
  bool is_id = true;
  for (int i = 0; i < degree_; ++i)
    if (perm[i] != i) is_id = false;
  if (is_id) return;
  if (base_.empty()) {
    for (int i = 0; i < degree_; ++i)
      if (perm[i] != i) {
        base_.push_back(i);
        level_gens_.emplace_back();
        transversals_.emplace_back();
        break;
      }
  }
  level_gens_[0].push_back(perm);
  dirty_ = true;
  rebuild();
}

std::pair<PermutationGroup::Perm, std::size_t> PermutationGroup::sift(Perm g,
                                                                      std::size_t from) const {
  for (std::size_t i = from; i < base_.size(); ++i) {
    int x = g[base_[i]];
    auto it = transversals_[i].find(x);
    if (it == transversals_[i].end()) return {g, i};
    g = mul(inv(it->second), g);
  }
  return {g, base_.size()};
}

void PermutationGroup::rebuild() {
  if (!dirty_) return;
  auto gens_at = [this](std::size_t level) {
    std::vector<Perm> gens;
    for (std::size_t j = level; j < level_gens_.size(); ++j)
      gens.insert(gens.end(), level_gens_[j].begin(), level_gens_[j].end());
    return gens;
  };
  auto recompute_orbits = [this, &gens_at]() {
    for (std::size_t i = 0; i < base_.size(); ++i) {
      auto gens = gens_at(i);
      transversals_[i].clear();
      Perm id(degree_);
      std::iota(id.begin(), id.end(), 0);
      transversals_[i][base_[i]] = id;
      std::vector<int> frontier = {base_[i]};
      while (!frontier.empty()) {
        std::vector<int> next;
        for (int p : frontier) {
          for (const Perm& s : gens) {
            int q = s[p];
            if (!transversals_[i].count(q)) {
              transversals_[i][q] = mul(s, transversals_[i][p]);
              next.push_back(q);
            }
          }
        }
        frontier = std::move(next);
      }
    }
  };

  bool changed = true;
  while (changed) {
    changed = false;
    recompute_orbits();
    for (std::size_t i = 0; i < base_.size() && !changed; ++i) {
      auto gens = gens_at(i);
      for (const auto& [p, tp] : transversals_[i]) {
        for (const Perm& s : gens) {
          Perm schreier = mul(inv(transversals_[i].at(s[p])), mul(s, tp));
          auto [residue, level] = sift(schreier, i + 1);
          bool is_id = true;
          for (int k = 0; k < degree_; ++k)
            if (residue[k] != k) is_id = false;
          if (is_id) continue;
          if (level == base_.size()) {
            for (int k = 0; k < degree_; ++k)
              if (residue[k] != k) {
                base_.push_back(k);
                level_gens_.emplace_back();
                transversals_.emplace_back();
                break;
              }
          }
          level_gens_[level].push_back(residue);
          changed = true;
          break;
        }
        if (changed) break;
      }
    }
  }
  dirty_ = false;
}

BigInt PermutationGroup::order() const {
  BigInt o = 1;
  for (const auto& t : transversals_) o *= BigInt(t.size());
  return o;
}

bool PermutationGroup::contains(const std::vector<int>& perm) const {
  auto [residue, level] = sift(perm, 0);
  if (level != base_.size()) return false;
  for (int i = 0; i < degree_; ++i)
    if (residue[i] != i) return false;
  return true;
}

BigInt perm_group_order(const std::vector<std::vector<int>>& generators) {
  if (generators.empty()) return 1;
  const int degree = static_cast<int>(generators[0].size());
  PermutationGroup g(degree);
  for (const auto& gen : generators) g.add_generator(gen);
  return g.order();
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

HypergraphCheckResult hypergraph_generation_check(int num_vertices,
                                                  const std::vector<std::array<int, 3>>& edges,
                                                  const std::vector<std::array<int, 3>>& rotations) {
  if (num_vertices < 3 || num_vertices > kMaxPermDegree)
    throw Error(ErrorKind::DegreeTooLarge, "vertex count out of range");
  HypergraphCheckResult res;

  // Weak connectivity of the derived graph on 2-subsets of hyperedges.
  std::vector<int> parent(num_vertices);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  for (const auto& e : edges) {
    parent[find(e[0])] = find(e[1]);
    parent[find(e[1])] = find(e[2]);
  }
  res.weakly_connected = true;
  for (int v = 1; v < num_vertices; ++v)
    if (find(v) != find(0)) res.weakly_connected = false;

  PermutationGroup g(num_vertices);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::array<int, 3> rot = (i < rotations.size()) ? rotations[i] : edges[i];
    std::vector<int> perm(num_vertices);
    std::iota(perm.begin(), perm.end(), 0);
    perm[rot[0]] = rot[1];
    perm[rot[1]] = rot[2];
    perm[rot[2]] = rot[0];
    g.add_generator(perm);
  }
  res.order = g.order();
  res.generates_alt = (res.order == factorial(num_vertices) / 2);
  return res;
}

bool universal_gates_check(int alphabet_size, int num_vertices,
                           const std::vector<std::pair<int, int>>& edges, BigInt* order_out) {
  if (alphabet_size < 3)
    throw Error(ErrorKind::BadArgument, "universal gates need an alphabet of size at least 3");
  long degree = 1;
  for (int i = 0; i < num_vertices; ++i) {
    degree *= alphabet_size;
    if (degree > kMaxPermDegree)
      throw Error(ErrorKind::DegreeTooLarge, "B^V exceeds the stabilizer-chain degree cap");
  }

  // Generators of Alt(m) on pair states: a 3-cycle plus a long even cycle.
  const int m = alphabet_size * alphabet_size;
  std::vector<std::vector<int>> alt_gens;
  {
    std::vector<int> three(m);
    std::iota(three.begin(), three.end(), 0);
    three[0] = 1;
    three[1] = 2;
    three[2] = 0;
    alt_gens.push_back(three);
    std::vector<int> cycle(m);
    std::iota(cycle.begin(), cycle.end(), 0);
    if (m % 2 == 1) {
      for (int i = 0; i < m; ++i) cycle[i] = (i + 1) % m;
    } else {
      cycle[0] = 0;
      for (int i = 1; i < m; ++i) cycle[i] = 1 + (i % (m - 1));
    }
    alt_gens.push_back(cycle);
  }

  PermutationGroup g(static_cast<int>(degree));
  // Point encoding: mixed radix over vertices, vertex 0 fastest.
  auto digit = [&](long point, int vertex) {
    for (int i = 0; i < vertex; ++i) point /= alphabet_size;
    return static_cast<int>(point % alphabet_size);
  };
  auto with_digit = [&](long point, int vertex, int value) {
    long scale = 1;
    for (int i = 0; i < vertex; ++i) scale *= alphabet_size;
    long old = (point / scale) % alphabet_size;
    return point + (value - old) * scale;
  };
  for (const auto& [u, v] : edges) {
    for (const auto& ag : alt_gens) {
      std::vector<int> perm(degree);
      for (long point = 0; point < degree; ++point) {
        int du = digit(point, u), dv = digit(point, v);
        int pair_state = du * alphabet_size + dv;
        int image = ag[pair_state];
        long q = with_digit(point, u, image / alphabet_size);
        q = with_digit(q, v, image % alphabet_size);
        perm[point] = static_cast<int>(q);
      }
      g.add_generator(perm);
    }
  }
  BigInt order = g.order();
  if (order_out) *order_out = order;
  return order == factorial(static_cast<int>(degree)) / 2;
}

}  // namespace sftlab
