#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sftlab/morphisms.hpp"

namespace sftlab {

// Union of configurations with disjoint supports; the result must be
// admissible as a point.
FiniteConfig sum_disjoint(const SftSpec& spec, const FiniteConfig& x, const FiniteConfig& y);

// The unique shift-translate whose lexicographically minimal support cell is
// the origin.
FiniteConfig good_position(const FiniteConfig& x);
FiniteConfig translate_config(const FiniteConfig& x, const Vec& v);

// The unique v with shift_v(x) = y, when it exists.
std::optional<Vec> orbit_equivalent(const FiniteConfig& x, const FiniteConfig& y);

// Two one-cell glider species over a pointed spec: f exchanges the species of
// an isolated symbol, g walks a doubly-isolated symbol one step along e1
// (exchanging the two-cell patterns 0a1 and a20), h = g o f moves a1 right and
// a2 left at speed one. The isolation thresholds 2R and 3R are parameters with
// those defaults.
class GliderSystem {
 public:
  struct Params {
    Coord r = 2;
    Coord symbol_isolation = 0;  // defaults to 2R when 0
    Coord occurrence_separation = 0;  // defaults to 3R when 0
    bool verify = true;  // involution certification at construction
  };

  static GliderSystem build(std::shared_ptr<const SftSpec> spec, Symbol a1, Symbol a2,
                            Params params, Budget& budget);

  const SftSpec& spec() const { return *spec_; }
  Symbol a1() const { return a1_; }
  Symbol a2() const { return a2_; }
  Coord r() const { return params_.r; }

  const BlockMap& f() const { return f_; }
  const BlockMap& g() const { return g_; }
  const BlockMap& h() const { return h_; }

  // Fast configuration-level steps, equal to applying the block maps.
  FiniteConfig step_f(const FiniteConfig& x) const;
  FiniteConfig step_g(const FiniteConfig& x) const;
  FiniteConfig step_h(const FiniteConfig& x) const { return step_g(step_f(x)); }

  // g is the simultaneous product of one anchored two-cell gate per position;
  // this applies the single gate anchored at cells {pos, pos + e1}.
  FiniteConfig apply_anchored_gate(const FiniteConfig& x, const Vec& pos) const;

  // Exhaustive involution check of the anchored gate over every pattern on its
  // reading window (d = 1).
  bool gate_involution_check(Budget& budget) const;

 private:
  std::shared_ptr<const SftSpec> spec_;
  Symbol a1_ = 0, a2_ = 0;
  Params params_;
  BlockMap f_, g_, h_;
};

struct GliderDecomposition {
  long transient = 0;  // n
  long period = 1;     // p
  FiniteConfig left, middle, right;
};

// Runs h until the middle repeats with some period while the escaped clouds
// translate rigidly, then certifies the decomposition by replaying
// h^(n+kp)(x) = shift(-kp e1) left + middle + shift(kp e1) right for k = 0..3.
// Support cardinality is asserted at every step.
GliderDecomposition simulate_decomposition(const GliderSystem& gs, const FiniteConfig& x,
                                           long step_budget, Budget& budget);

struct SimulationTrace {
  std::vector<FiniteConfig> states;
};
SimulationTrace simulate_trace(const GliderSystem& gs, const FiniteConfig& x, long steps);

// Permutes the occurrence islands of the given configurations (each held up to
// shift) wherever an island appears with M zeros around it and no other island
// within N; occurrences closer than N cancel each other.
struct HomoclinicPermuter {
  std::shared_ptr<const SftSpec> spec;
  std::vector<FiniteConfig> points;  // in good position
  std::vector<std::size_t> perm;
  Coord isolation_m = 0;
  Coord cancellation_n = 0;

  FiniteConfig apply(const FiniteConfig& x) const;
  BlockMap as_blockmap() const;
};

// M and N default (when 0) to 2*max support diameter + window size + 1 and 10*M.
HomoclinicPermuter homoclinic_permuter(std::shared_ptr<const SftSpec> spec,
                                       const std::vector<FiniteConfig>& points,
                                       const std::vector<std::size_t>& perm, Coord isolation_m,
                                       Coord cancellation_n, Budget& budget);

struct SeparationReport {
  BlockMap map;
  int moved = 0;  // 0: x moved, 1: y moved
  std::string method;
};

// A block map built from symbol or conditioned permutations that moves exactly
// one of {x, y}; requires a product-track full shift.
SeparationReport separating_automorphism(std::shared_ptr<const SftSpec> spec,
                                         const FiniteConfig& x, const FiniteConfig& y,
                                         Budget& budget);

struct SumStabResult {
  bool holds = true;
  std::optional<Vec> witness;  // translation violating the implication
  std::vector<Vec> translations_checked;
};

// Checks the translation-rigidity implication for x = x1 + x2, y = y1 + y2 by
// brute force over all support-aligning shifts. Hypotheses are validated
// first (ball/annulus containment, cardinalities, r >= 4R).
SumStabResult sumstab_check(const SftSpec& spec, const FiniteConfig& x1, const FiniteConfig& x2,
                            const FiniteConfig& y1, const FiniteConfig& y2, Coord r_ball,
                            Coord r_annulus);

}  // namespace sftlab
