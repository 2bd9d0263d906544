#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sftlab/common.hpp"
#include "sftlab/lattice.hpp"

namespace sftlab {

using Symbol = std::int16_t;

struct Pattern {
  FiniteSet domain;
  std::vector<Symbol> values;  // parallel to domain.points()

  bool operator==(const Pattern& other) const {
    return domain == other.domain && values == other.values;
  }
};

// Alphabet symbols are indices into `alphabet`. With a product-track structure,
// symbol s has track digits given by mixed radix over `tracks` (last track
// fastest): s = ((d_0 * t_1 + d_1) * t_2 + d_2) ...
class SftSpec {
 public:
  int dim = 1;
  std::vector<std::string> alphabet;
  std::optional<Symbol> zero;
  std::optional<std::vector<int>> tracks;
  FiniteSet window;
  std::vector<std::vector<Symbol>> forbidden;  // full-window value tuples, deduped

  int alphabet_size() const { return static_cast<int>(alphabet.size()); }
  bool full_shift() const { return forbidden.empty(); }
  Coord window_size() const { return window.max_linf_norm(); }
  Coord window_diameter() const { return window.diameter_linf(); }
  bool is_forbidden_window(const std::vector<Symbol>& window_values) const;

  int num_tracks() const { return tracks ? static_cast<int>(tracks->size()) : 1; }
  std::vector<int> track_digits(Symbol s) const;
  Symbol symbol_from_digits(const std::vector<int>& digits) const;

  Symbol symbol_index(const std::string& name) const;  // BadSpec when unknown
};

struct RawForbiddenPattern {
  std::vector<std::pair<Vec, std::string>> cells;
};

// Validates and normalizes a spec document. Forbidden patterns may be given on
// any subset of the window; they are expanded to full-window tuples.
SftSpec make_sft(int dim, std::vector<std::string> alphabet,
                 const std::optional<std::string>& zero_name,
                 const std::optional<std::vector<int>>& tracks, const FiniteSet& window,
                 const std::vector<RawForbiddenPattern>& forbidden);

// Convenience constructors used across tests and experiments.
SftSpec full_shift_spec(int dim, int alphabet_size);
SftSpec full_shift_tracks_spec(int dim, const std::vector<int>& track_sizes);
SftSpec golden_mean_spec();
SftSpec triangular_hard_square_spec();
SftSpec glider_full_shift_spec();  // {0, a1, a2} full shift, d = 1

// L-periodic configuration: values over the fundamental domain of L in
// canonical (lex digit box) order.
struct PeriodicConfig {
  LatticeSubgroup lattice;
  std::vector<Symbol> values;

  Symbol at(const Vec& v, const FiniteSet& domain_cache) const;
  bool operator==(const PeriodicConfig& other) const {
    return lattice == other.lattice && values == other.values;
  }
};

// Finite-support configuration over a spec with a zero symbol; zero elsewhere.
struct FiniteConfig {
  FiniteSet support;
  std::vector<Symbol> values;  // parallel to support, all nonzero

  Symbol at(const Vec& v, Symbol zero) const;
  bool operator==(const FiniteConfig& other) const {
    return support == other.support && values == other.values;
  }
};

bool is_locally_admissible(const Pattern& p, const SftSpec& spec);
bool is_admissible_torus(const PeriodicConfig& c, const SftSpec& spec);
bool is_admissible_config(const FiniteConfig& c, const SftSpec& spec);

enum class Provenance { Exact, UpperBound, ExactWithinMargin };
const char* provenance_name(Provenance p);

struct CountResult {
  BigInt count;
  Provenance provenance = Provenance::Exact;
  int margin = 0;  // meaningful for ExactWithinMargin
};

// Exact count of admissible patterns on F when the engine supports it
// (full shifts; d = 1 intervals via transfer counting). Otherwise a locally
// admissible count flagged UpperBound, or certified within an extension margin
// when margin >= 0.
CountResult count_patterns(const SftSpec& spec, const FiniteSet& f, Budget& budget,
                           int margin = -1);

struct EnumerateResult {
  std::vector<std::vector<Symbol>> patterns;  // values in F cell order
  Provenance provenance = Provenance::Exact;
  int margin = 0;
};
EnumerateResult enumerate_patterns(const SftSpec& spec, const FiniteSet& f, Budget& budget,
                                   int margin = -1);

// Locally admissible assignments only; used for sliding-block rule domains.
std::vector<std::vector<Symbol>> enumerate_local_patterns(const SftSpec& spec,
                                                          const FiniteSet& f, Budget& budget);

// Is there an admissible completion of `f` agreeing with the fixed cells?
// Fixed cells are (index into f, symbol) pairs. Global for d = 1 intervals.
bool exists_admissible_completion(const SftSpec& spec, const FiniteSet& f,
                                  const std::vector<std::pair<std::size_t, Symbol>>& fixed,
                                  Budget& budget, int margin = -1);

struct ExtensionTable {
  FiniteSet box;
  double margin_s = 0;
  FiniteSet boundary;  // inner boundary of the box
  struct Row {
    std::vector<Symbol> boundary_pattern;  // in boundary cell order
    BigInt count;
    std::vector<std::vector<Symbol>> members;  // box patterns, kept on request
  };
  std::vector<Row> rows;
  Provenance provenance = Provenance::Exact;
  bool small_margin_warning = false;  // S below the window size

  BigInt total() const;
  const Row* find(const std::vector<Symbol>& boundary_pattern) const;
};

ExtensionTable extension_table(const SftSpec& spec, const FiniteSet& f, double s, Budget& budget,
                               bool keep_members = false, int margin = -1);

struct EntropyEstimate {
  std::size_t box_id = 0;
  std::size_t cells = 0;
  double log2_count = 0;
  double per_site = 0;
  Provenance provenance = Provenance::Exact;
};
std::vector<EntropyEstimate> entropy_estimates(const SftSpec& spec,
                                               const std::vector<FiniteSet>& boxes,
                                               Budget& budget);

// Exact enumeration of X intersected with Fix(L) via torus admissibility.
std::vector<PeriodicConfig> fixed_points(const SftSpec& spec, const LatticeSubgroup& l,
                                         Budget& budget);
BigInt count_fixed_points(const SftSpec& spec, const LatticeSubgroup& l, Budget& budget);

PeriodicConfig re_periodize(const PeriodicConfig& c, const LatticeSubgroup& finer);

struct IrreducibilityWitness {
  FiniteSet shape_a, shape_b;
  std::vector<Symbol> pattern_a, pattern_b;
};
struct IrreducibilityResult {
  bool pass = true;
  std::optional<IrreducibilityWitness> witness;
};
// For all admissible p on A-shaped and q on B-shaped boxes placed in `region`
// with gap > g, checks that a joint admissible extension exists.
IrreducibilityResult strong_irreducibility_check(const SftSpec& spec, Coord gap,
                                                 const std::vector<Coord>& box_lengths,
                                                 const FiniteSet& region, Budget& budget);

// Exhaustive search for an admissible y with strictly smaller support that
// differs from x only inside ball_R(origin). x must be in good position.
std::optional<FiniteConfig> corner_decrease(const SftSpec& spec, const FiniteConfig& x, Coord r,
                                            Budget& budget);

}  // namespace sftlab
