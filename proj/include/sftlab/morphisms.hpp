#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sftlab/sft.hpp"

namespace sftlab {

// Sliding-block local rule. Fully shift-commuting when `period` is empty;
// otherwise the rule may additionally depend on the cell's coset modulo the
// period lattice (the realization used by gate lattices), in which case the
// map commutes exactly with the period subgroup.
//
// Rules are defined on locally admissible neighborhood patterns. Storage is
// either a dense table per coset (indexed by mixed-radix pattern rank) or a
// functional rule evaluated on demand.
class BlockMap {
 public:
  using LocalRule = std::function<Symbol(std::size_t coset, const std::vector<Symbol>& vals)>;

  BlockMap() = default;
  static BlockMap tabulated(std::shared_ptr<const SftSpec> spec, FiniteSet neighborhood,
                            std::vector<std::vector<Symbol>> tables,
                            std::optional<LatticeSubgroup> period = std::nullopt,
                            std::string name = {});
  static BlockMap functional(std::shared_ptr<const SftSpec> spec, FiniteSet neighborhood,
                             LocalRule rule, std::optional<LatticeSubgroup> period = std::nullopt,
                             std::string name = {});

  const SftSpec& spec() const { return *spec_; }
  std::shared_ptr<const SftSpec> spec_ptr() const { return spec_; }
  const FiniteSet& neighborhood() const { return neighborhood_; }
  const std::optional<LatticeSubgroup>& period() const { return period_; }
  Coord radius() const { return neighborhood_.max_linf_norm(); }
  const std::string& name() const { return name_; }
  bool partial() const { return partial_; }
  void set_partial(bool p) { partial_ = p; }
  void set_name(std::string n) { name_ = std::move(n); }

  std::size_t num_cosets() const;
  std::size_t coset_of(const Vec& v) const;
  const FiniteSet& coset_domain() const { return coset_domain_; }

  // -1 when the rule is undefined on the pattern.
  Symbol eval(std::size_t coset, const std::vector<Symbol>& vals) const;

  // Materializes dense tables (no-op if already tabulated).
  BlockMap tabulate(Budget& budget) const;

 private:
  std::shared_ptr<const SftSpec> spec_;
  FiniteSet neighborhood_;
  std::optional<LatticeSubgroup> period_;
  FiniteSet coset_domain_;  // fundamental domain of the period, when set
  std::vector<std::vector<Symbol>> tables_;
  LocalRule fn_;
  bool partial_ = false;
  std::string name_;
};

BlockMap identity_map(std::shared_ptr<const SftSpec> spec);
BlockMap make_shift(std::shared_ptr<const SftSpec> spec, const Vec& v);
BlockMap make_symbol_perm(std::shared_ptr<const SftSpec> spec, const std::vector<Symbol>& perm);
// Shifts one track of a product alphabet, fixing the others.
BlockMap make_partial_shift(std::shared_ptr<const SftSpec> spec, int track, const Vec& v);
BlockMap make_track_swap(std::shared_ptr<const SftSpec> spec, int track1, int track2);

// A cylinder on one track: prescribed digits on a finite set of cells.
struct Cylinder {
  FiniteSet domain;
  std::vector<int> digits;  // parallel to domain, values on the condition track
};

// Intersection of two unions of cylinders (pairwise merges, contradictions
// dropped). An empty result is the empty condition.
std::vector<Cylinder> intersect_cylinder_unions(const std::vector<Cylinder>& u1,
                                                const std::vector<Cylinder>& u2);

// Applies `perm` to the target-track digit at the origin iff the condition
// track matches one of the cylinders; identity elsewhere.
BlockMap make_conditioned_perm(std::shared_ptr<const SftSpec> spec, const std::vector<int>& perm,
                               const std::vector<Cylinder>& condition, int cond_track = 0,
                               int targ_track = 1);

PeriodicConfig apply_map(const BlockMap& map, const PeriodicConfig& config, Budget& budget);
FiniteConfig apply_map(const BlockMap& map, const FiniteConfig& config, Budget& budget);
Pattern apply_map(const BlockMap& map, const Pattern& pattern, Budget& budget);

// outer after inner; the result is evaluated lazily.
BlockMap compose(const BlockMap& outer, const BlockMap& inner, Budget& budget);

struct MapComparison {
  bool equal = true;
  // Set when equality was decided on locally admissible patterns that may
  // exceed the globally admissible ones (d >= 2), or when a rule was partial.
  bool caveat_local_only = false;
  std::optional<std::vector<Symbol>> witness;  // pattern where the maps differ
};
MapComparison maps_equal(const BlockMap& a, const BlockMap& b, Budget& budget);
bool exact_commutes(const BlockMap& a, const BlockMap& b, Budget& budget,
                    MapComparison* detail = nullptr);

// Certification per the automorphism policy: an explicit inverse composes to
// the identity on both sides.
bool certify_automorphism(const BlockMap& map, const BlockMap& inverse, Budget& budget);

// Closed algebra of maps that read one track on a finite domain and permute
// another track's digit at the origin. Conditioned permutations live here;
// composition and inverse stay in the class, which keeps commutator chains
// exactly representable without neighborhood blowup.
class TrackPermMap {
 public:
  static TrackPermMap from_condition(std::shared_ptr<const SftSpec> spec,
                                     const std::vector<int>& perm,
                                     const std::vector<Cylinder>& condition, int cond_track = 0,
                                     int targ_track = 1);
  static TrackPermMap identity(std::shared_ptr<const SftSpec> spec, int cond_track = 0,
                               int targ_track = 1);

  TrackPermMap after(const TrackPermMap& inner) const;  // this  o  inner
  TrackPermMap inverse() const;
  bool is_identity() const;
  BlockMap to_blockmap() const;

  const FiniteSet& domain() const { return domain_; }
  const std::vector<int>& perm_at(const std::vector<int>& cond_digits) const;

 private:
  std::shared_ptr<const SftSpec> spec_;
  int cond_track_ = 0, targ_track_ = 1;
  FiniteSet domain_;
  std::vector<std::vector<int>> perms_;  // indexed by cond-pattern rank
  std::size_t rank(const std::vector<int>& digits) const;
};

TrackPermMap track_perm_commutator(const TrackPermMap& a, const TrackPermMap& b);

struct PermutationOnFix {
  LatticeSubgroup lattice;
  std::vector<std::uint32_t> images;  // over the canonical Fix(L) enumeration

  bool is_identity() const;
};

PermutationOnFix periodic_action(const BlockMap& map, const LatticeSubgroup& l, Budget& budget);
PermutationOnFix compose_actions(const PermutationOnFix& f, const PermutationOnFix& g);

enum class Parity { Even, Odd };
Parity permutation_parity(const std::vector<std::uint32_t>& images);
inline Parity permutation_parity(const PermutationOnFix& p) { return permutation_parity(p.images); }

// True iff the shift by v restricts to an odd permutation of Fix(L): then no
// homeomorphism commuting with L squares to that shift.
bool square_root_obstruction(const SftSpec& spec, const Vec& v, const LatticeSubgroup& l,
                             Budget& budget);

}  // namespace sftlab
