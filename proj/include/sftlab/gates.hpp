#pragma once

#include <array>
#include <memory>
#include <unordered_map>
#include <vector>

#include "sftlab/morphisms.hpp"

namespace sftlab {

// Permutation of the admissible patterns on a strong neighborhood D. Applying
// a gate rewrites x|D in place and fixes everything else; context-safety means
// every rewrite keeps admissible surroundings admissible (checked exhaustively
// at the declared margin, or structural for extension-row gates).
struct Gate {
  std::shared_ptr<const SftSpec> spec;
  FiniteSet neighborhood;                      // D
  std::vector<std::vector<Symbol>> patterns;   // admissible X|D, canonical order
  std::vector<std::uint32_t> perm;             // index permutation of `patterns`
  int margin = 0;
  bool structural = false;  // collar-fixing construction, safety not searched
  Provenance pattern_provenance = Provenance::Exact;

  std::size_t pattern_index(const std::vector<Symbol>& vals) const;
};

struct GateWitness {
  std::vector<Symbol> surrounding;  // admissible pattern on ball_margin(D)
  FiniteSet region;
};

// Exhaustive context-safety validation; throws ContextUnsafe (with witness in
// the message) or NotBijective.
Gate validate_gate(std::shared_ptr<const SftSpec> spec, const FiniteSet& d,
                   const std::vector<std::uint32_t>& perm, int margin, Budget& budget);

Parity gate_parity(const Gate& gate);

// Gate fixing the inner boundary collar pointwise, acting by tau on E(u) and
// the identity on every other row. Safe whenever S covers the window diameter.
Gate gate_from_extension_permutation(std::shared_ptr<const SftSpec> spec,
                                     const ExtensionTable& table,
                                     const std::vector<Symbol>& boundary_pattern,
                                     const std::vector<std::uint32_t>& tau, Budget& budget);

struct GateLattice {
  Gate gate;
  LatticeSubgroup lattice;  // H; gate.neighborhood is a fundamental domain of H
};

// Checks that D tiles under H (one cell per coset).
GateLattice make_gate_lattice(Gate gate, const LatticeSubgroup& h);

// The simultaneous application on every H-translate of D, realized as an
// H-periodic block map with neighborhood D + (-D).
BlockMap gate_lattice_blockmap(const GateLattice& gl, Budget& budget);

PeriodicConfig gate_lattice_apply(const GateLattice& gl, const PeriodicConfig& config,
                                  Budget& budget);
FiniteConfig gate_lattice_apply(const GateLattice& gl, const FiniteConfig& config, Budget& budget);

// Exact rule-table commutation of the two induced gate lattices.
bool strong_commutation_check(const GateLattice& g1, const GateLattice& g2, Budget& budget);

// ---- permutation groups (stabilizer chains, degree <= 16) ----

constexpr int kMaxPermDegree = 16;

class PermutationGroup {
 public:
  explicit PermutationGroup(int degree);
  void add_generator(const std::vector<int>& perm);
  BigInt order() const;
  bool contains(const std::vector<int>& perm) const;
  int degree() const { return degree_; }

 private:
  using Perm = std::vector<int>;
  static Perm mul(const Perm& a, const Perm& b);  // apply b first, then a
  static Perm inv(const Perm& a);
  void rebuild();
  // Returns the residue and the level where sifting stopped.
  std::pair<Perm, std::size_t> sift(Perm g, std::size_t from_level) const;

  int degree_;
  std::vector<int> base_;
  std::vector<std::vector<Perm>> level_gens_;
  std::vector<std::unordered_map<int, Perm>> transversals_;
  bool dirty_ = false;
};

BigInt perm_group_order(const std::vector<std::vector<int>>& generators);
BigInt factorial(int n);

struct HypergraphCheckResult {
  bool generates_alt = false;
  bool weakly_connected = false;
  BigInt order;
};
// One 3-rotation per hyperedge; empty `rotations` defaults to cyclic rotations.
HypergraphCheckResult hypergraph_generation_check(
    int num_vertices, const std::vector<std::array<int, 3>>& edges,
    const std::vector<std::array<int, 3>>& rotations = {});

// Do edgewise Alt(B^2) generators on a graph generate Alt(B^V)?
bool universal_gates_check(int alphabet_size, int num_vertices,
                           const std::vector<std::pair<int, int>>& edges, BigInt* order_out = nullptr);

}  // namespace sftlab
