#include "sftlab/sft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace sftlab {

namespace {

struct SymbolsHash {
  std::size_t operator()(const std::vector<Symbol>& v) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ v.size();
    for (Symbol s : v) {
      std::size_t x = static_cast<std::size_t>(static_cast<std::uint16_t>(s)) * 0xff51afd7ed558ccdull;
      x ^= x >> 33;
      h = (h ^ x) * 0xc4ceb9fe1a85ec53ull;
    }
    return h;
  }
};

using TupleSet = std::unordered_set<std::vector<Symbol>, SymbolsHash>;

TupleSet forbidden_set(const SftSpec& spec) {
  TupleSet set;
  for (const auto& t : spec.forbidden) set.insert(t);
  return set;
}

// Window placements fully inside F: per placement the F-cell index of each
// window cell (window order) plus the last DFS index that completes it.
struct Placements {
  std::vector<std::vector<std::size_t>> cells;
  std::vector<std::vector<std::size_t>> by_trigger;  // placement ids by completing cell
};

Placements placements_inside(const SftSpec& spec, const FiniteSet& f) {
  Placements out;
  out.by_trigger.resize(f.size());
  if (f.empty()) return out;
  std::set<Vec> candidates;
  for (const Vec& c : f.points())
    for (const Vec& w : spec.window.points()) candidates.insert(vec_sub(c, w));
  for (const Vec& t : candidates) {
    std::vector<std::size_t> idx;
    idx.reserve(spec.window.size());
    bool inside = true;
    for (const Vec& w : spec.window.points()) {
      auto i = f.index_of(vec_add(t, w));
      if (!i) {
        inside = false;
        break;
      }
      idx.push_back(*i);
    }
    if (!inside) continue;
    std::size_t trigger = *std::max_element(idx.begin(), idx.end());
    out.by_trigger[trigger].push_back(out.cells.size());
    out.cells.push_back(std::move(idx));
  }
  return out;
}

// Depth-first enumeration of assignments on F that avoid forbidden windows
// fully contained in F. Fixed cells are pinned. Returns false if the visitor
// stopped the walk.
bool backtrack(const SftSpec& spec, const FiniteSet& f, const TupleSet& forb,
               const Placements& plan, const std::vector<Symbol>& fixed, Budget& budget,
               const std::function<bool(const std::vector<Symbol>&)>& visit) {
  const std::size_t n = f.size();
  std::vector<Symbol> cur(n, -1);
  std::vector<Symbol> window_buf(spec.window.size());
  const int a = spec.alphabet_size();

  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == n) return visit(cur);
    for (Symbol s = 0; s < a; ++s) {
      if (!fixed.empty() && fixed[i] >= 0 && fixed[i] != s) continue;
      budget.charge();
      cur[i] = s;
      bool ok = true;
      for (std::size_t pid : plan.by_trigger[i]) {
        const auto& idx = plan.cells[pid];
        for (std::size_t j = 0; j < idx.size(); ++j) window_buf[j] = cur[idx[j]];
        if (forb.count(window_buf)) {
          ok = false;
          break;
        }
      }
      if (ok && !go(i + 1)) return false;
    }
    cur[i] = -1;
    return true;
  };
  return go(0);
}

// d = 1 transfer-counting system on the hull of the window. States are words
// of length w-1; a word is globally admissible iff its state path starts
// backward-alive and ends forward-alive.
class TransferSystem {
 public:
  TransferSystem(const SftSpec& spec, Budget& budget) : a_(spec.alphabet_size()) {
    if (spec.dim != 1) throw Error(ErrorKind::BadArgument, "transfer system needs d = 1");
    Coord wmin = 0, wmax = 0;
    for (const Vec& v : spec.window.points()) {
      wmin = std::min(wmin, v[0]);
      wmax = std::max(wmax, v[0]);
    }
    w_ = static_cast<int>(wmax - wmin + 1);

    // Expand forbidden window tuples to hull blocks of width w.
    TupleSet blocks;
    std::vector<int> win_pos;
    for (const Vec& v : spec.window.points()) win_pos.push_back(static_cast<int>(v[0] - wmin));
    for (const auto& tuple : spec.forbidden) {
      std::vector<Symbol> block(w_, -1);
      for (std::size_t j = 0; j < win_pos.size(); ++j) block[win_pos[j]] = tuple[j];
      std::vector<int> free_pos;
      for (int i = 0; i < w_; ++i)
        if (block[i] < 0) free_pos.push_back(i);
      std::vector<Symbol> filled = block;
      std::function<void(std::size_t)> fill = [&](std::size_t k) {
        if (k == free_pos.size()) {
          blocks.insert(filled);
          return;
        }
        for (Symbol s = 0; s < a_; ++s) {
          budget.charge();
          filled[free_pos[k]] = s;
          fill(k + 1);
        }
      };
      fill(0);
    }

    num_states_ = 1;
    for (int i = 0; i + 1 < w_; ++i) {
      num_states_ *= a_;
      if (num_states_ > (1 << 22)) throw Error(ErrorKind::BudgetExceeded, "transfer state space too large");
    }
    budget.charge(static_cast<std::uint64_t>(num_states_) * a_);
    edge_.assign(static_cast<std::size_t>(num_states_) * a_, -1);
    std::vector<Symbol> word(w_);
    for (long s = 0; s < num_states_; ++s) {
      long rem = s;
      for (int i = w_ - 2; i >= 0; --i) {
        word[i] = static_cast<Symbol>(rem % a_);
        rem /= a_;
      }
      for (Symbol sym = 0; sym < a_; ++sym) {
        word[w_ - 1] = sym;
        if (w_ >= 1 && blocks.count(word)) continue;
        long t = (w_ == 1) ? 0 : (s % pow_int(a_, w_ - 2)) * a_ + sym;
        edge_[static_cast<std::size_t>(s) * a_ + sym] = t;
      }
    }

    forward_alive_ = compute_alive(/*forward=*/true);
    backward_alive_ = compute_alive(/*forward=*/false);
  }

  int width() const { return w_; }

  BigInt count_interval(Coord len, Budget& budget) const {
    if (len == 0) return 1;
    std::vector<Symbol> free_fixed(static_cast<std::size_t>(len), -1);
    return count_constrained(free_fixed, budget);
  }

  // fixed[i] >= 0 pins position i. Counts globally admissible words.
  BigInt count_constrained(const std::vector<Symbol>& fixed, Budget& budget) const {
    const Coord n = static_cast<Coord>(fixed.size());
    if (n == 0) return 1;
    if (n < w_ - 1) return count_short(fixed, budget);
    std::vector<BigInt> v(num_states_, 0);
    std::vector<Symbol> word(w_ - 1);
    for (long s = 0; s < num_states_; ++s) {
      if (!backward_alive_[s]) continue;
      state_word(s, word);
      bool ok = true;
      for (int i = 0; i < w_ - 1; ++i)
        if (fixed[i] >= 0 && fixed[i] != word[i]) {
          ok = false;
          break;
        }
      if (ok) v[s] = 1;
    }
    for (Coord pos = w_ - 1; pos < n; ++pos) {
      budget.charge(static_cast<std::uint64_t>(num_states_));
      std::vector<BigInt> next(num_states_, 0);
      for (long s = 0; s < num_states_; ++s) {
        if (v[s] == 0) continue;
        for (Symbol sym = 0; sym < a_; ++sym) {
          if (fixed[pos] >= 0 && fixed[pos] != sym) continue;
          long t = edge_[static_cast<std::size_t>(s) * a_ + sym];
          if (t >= 0) next[t] += v[s];
        }
      }
      v = std::move(next);
    }
    BigInt total = 0;
    for (long s = 0; s < num_states_; ++s)
      if (forward_alive_[s]) total += v[s];
    return total;
  }

  void enumerate_constrained(const std::vector<Symbol>& fixed, Budget& budget,
                             const std::function<bool(const std::vector<Symbol>&)>& visit) const {
    const Coord n = static_cast<Coord>(fixed.size());
    if (n == 0) {
      visit({});
      return;
    }
    if (n < w_ - 1) {
      enumerate_short(fixed, budget, visit);
      return;
    }
    std::vector<Symbol> cur(static_cast<std::size_t>(n), -1);
    std::function<bool(Coord, long)> go = [&](Coord pos, long state) -> bool {
      if (pos == n) {
        if (!forward_alive_[state]) return true;
        return visit(cur);
      }
      for (Symbol sym = 0; sym < a_; ++sym) {
        if (fixed[pos] >= 0 && fixed[pos] != sym) continue;
        budget.charge();
        cur[pos] = sym;
        if (pos < w_ - 1) {
          // Still assembling the first state.
          if (!go(pos + 1, 0)) return false;
        } else if (pos == w_ - 1) {
          long s0 = 0;
          for (int i = 0; i < w_ - 1; ++i) s0 = s0 * a_ + cur[i];
          if (!backward_alive_[s0]) continue;
          long t = edge_[static_cast<std::size_t>(s0) * a_ + sym];
          if (t >= 0 && !go(pos + 1, t)) return false;
        } else {
          long t = edge_[static_cast<std::size_t>(state) * a_ + sym];
          if (t >= 0 && !go(pos + 1, t)) return false;
        }
      }
      cur[pos] = -1;
      return true;
    };
    if (w_ == 1) {
      // Degenerate: states carry no memory; edges encode per-symbol admissibility.
      std::function<bool(Coord)> go1 = [&](Coord pos) -> bool {
        if (pos == n) return visit(cur);
        for (Symbol sym = 0; sym < a_; ++sym) {
          if (fixed[pos] >= 0 && fixed[pos] != sym) continue;
          if (edge_[sym] < 0) continue;
          budget.charge();
          cur[pos] = sym;
          if (!go1(pos + 1)) return false;
        }
        cur[pos] = -1;
        return true;
      };
      go1(0);
      return;
    }
    go(0, 0);
  }

 private:
  static long pow_int(int base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
  }

  void state_word(long s, std::vector<Symbol>& word) const {
    for (int i = w_ - 2; i >= 0; --i) {
      word[i] = static_cast<Symbol>(s % a_);
      s /= a_;
    }
  }

  std::vector<char> compute_alive(bool forward) const {
    std::vector<char> alive(num_states_, 1);
    bool changed = true;
    while (changed) {
      changed = false;
      for (long s = 0; s < num_states_; ++s) {
        if (!alive[s]) continue;
        bool has = false;
        if (forward) {
          for (Symbol sym = 0; sym < a_ && !has; ++sym) {
            long t = edge_[static_cast<std::size_t>(s) * a_ + sym];
            if (t >= 0 && alive[t]) has = true;
          }
        } else {
          // Incoming edge from an alive state.
          for (long p = 0; p < num_states_ && !has; ++p) {
            if (!alive[p]) continue;
            for (Symbol sym = 0; sym < a_; ++sym) {
              if (edge_[static_cast<std::size_t>(p) * a_ + sym] == s) {
                has = true;
                break;
              }
            }
          }
        }
        if (!has) {
          alive[s] = 0;
          changed = true;
        }
      }
    }
    return alive;
  }

  BigInt count_short(const std::vector<Symbol>& fixed, Budget& budget) const {
    TupleSet seen;
    const std::size_t n = fixed.size();
    std::vector<Symbol> word(w_ - 1);
    for (long s = 0; s < num_states_; ++s) {
      budget.charge();
      if (!backward_alive_[s] || !forward_alive_[s]) continue;
      state_word(s, word);
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i)
        if (fixed[i] >= 0 && fixed[i] != word[i]) {
          ok = false;
          break;
        }
      if (ok) seen.insert(std::vector<Symbol>(word.begin(), word.begin() + n));
    }
    return BigInt(seen.size());
  }

  void enumerate_short(const std::vector<Symbol>& fixed, Budget& budget,
                       const std::function<bool(const std::vector<Symbol>&)>& visit) const {
    TupleSet seen;
    const std::size_t n = fixed.size();
    std::vector<Symbol> word(w_ - 1);
    for (long s = 0; s < num_states_; ++s) {
      budget.charge();
      if (!backward_alive_[s] || !forward_alive_[s]) continue;
      state_word(s, word);
      bool ok = true;
      for (std::size_t i = 0; i < n; ++i)
        if (fixed[i] >= 0 && fixed[i] != word[i]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      std::vector<Symbol> prefix(word.begin(), word.begin() + n);
      if (seen.insert(prefix).second) {
        if (!visit(prefix)) return;
      }
    }
  }

  int a_;
  int w_ = 1;
  long num_states_ = 1;
  std::vector<long> edge_;
  std::vector<char> forward_alive_;
  std::vector<char> backward_alive_;
};

BigInt int_pow(BigInt base, std::size_t exp) {
  BigInt r = 1;
  while (exp) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

bool certify_with_margin(const SftSpec& spec, const FiniteSet& f,
                         const std::vector<Symbol>& pattern, int margin, Budget& budget) {
  FiniteSet g = ball(f, margin);
  std::vector<std::pair<std::size_t, Symbol>> fixed;
  for (std::size_t i = 0; i < f.size(); ++i) fixed.push_back({*g.index_of(f[i]), pattern[i]});
  TupleSet forb = forbidden_set(spec);
  Placements plan = placements_inside(spec, g);
  std::vector<Symbol> pinned(g.size(), -1);
  for (auto& [idx, sym] : fixed) pinned[idx] = sym;
  bool found = false;
  backtrack(spec, g, forb, plan, pinned, budget, [&](const std::vector<Symbol>&) {
    found = true;
    return false;
  });
  return found;
}

}  // namespace

bool SftSpec::is_forbidden_window(const std::vector<Symbol>& window_values) const {
  return std::find(forbidden.begin(), forbidden.end(), window_values) != forbidden.end();
}

std::vector<int> SftSpec::track_digits(Symbol s) const {
  if (!tracks) throw Error(ErrorKind::NoTracks, "alphabet has no track structure");
  std::vector<int> digits(tracks->size());
  int rem = s;
  for (int i = static_cast<int>(tracks->size()) - 1; i >= 0; --i) {
    digits[i] = rem % (*tracks)[i];
    rem /= (*tracks)[i];
  }
  return digits;
}

Symbol SftSpec::symbol_from_digits(const std::vector<int>& digits) const {
  if (!tracks) throw Error(ErrorKind::NoTracks, "alphabet has no track structure");
  long s = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) s = s * (*tracks)[i] + digits[i];
  return static_cast<Symbol>(s);
}

Symbol SftSpec::symbol_index(const std::string& name) const {
  auto it = std::find(alphabet.begin(), alphabet.end(), name);
  if (it == alphabet.end()) throw Error(ErrorKind::BadSpec, "unknown symbol '" + name + "'");
  return static_cast<Symbol>(it - alphabet.begin());
}

SftSpec make_sft(int dim, std::vector<std::string> alphabet,
                 const std::optional<std::string>& zero_name,
                 const std::optional<std::vector<int>>& tracks, const FiniteSet& window,
                 const std::vector<RawForbiddenPattern>& forbidden) {
  SftSpec spec;
  spec.dim = dim;
  spec.alphabet = std::move(alphabet);
  if (spec.alphabet.empty()) throw Error(ErrorKind::BadSpec, "empty alphabet");
  {
    std::set<std::string> names(spec.alphabet.begin(), spec.alphabet.end());
    if (names.size() != spec.alphabet.size()) throw Error(ErrorKind::BadSpec, "duplicate symbol names");
  }
  if (tracks) {
    long prod = 1;
    for (int t : *tracks) {
      if (t < 1) throw Error(ErrorKind::BadSpec, "track sizes must be positive");
      prod *= t;
    }
    if (prod != static_cast<long>(spec.alphabet.size()))
      throw Error(ErrorKind::BadSpec, "track sizes do not multiply to the alphabet size");
    spec.tracks = tracks;
  }
  if (window.empty() || window.dim() != dim)
    throw Error(ErrorKind::BadSpec, "window must be a nonempty subset of Z^dim");
  if (!window.contains(Vec(dim, 0))) throw Error(ErrorKind::BadSpec, "origin not in window");
  spec.window = window;
  if (zero_name) spec.zero = spec.symbol_index(*zero_name);

  const int a = spec.alphabet_size();
  std::set<std::vector<Symbol>> tuples;
  int pattern_no = 0;
  for (const auto& raw : forbidden) {
    ++pattern_no;
    std::vector<Symbol> base(window.size(), -1);
    for (const auto& [cell, name] : raw.cells) {
      auto idx = window.index_of(cell);
      if (!idx)
        throw Error(ErrorKind::BadSpec, "forbidden pattern " + std::to_string(pattern_no) +
                                            " uses a cell outside the window");
      base[*idx] = spec.symbol_index(name);
    }
    std::vector<std::size_t> free_pos;
    for (std::size_t i = 0; i < base.size(); ++i)
      if (base[i] < 0) free_pos.push_back(i);
    std::vector<Symbol> cur = base;
    std::function<void(std::size_t)> fill = [&](std::size_t k) {
      if (k == free_pos.size()) {
        tuples.insert(cur);
        return;
      }
      for (Symbol s = 0; s < a; ++s) {
        cur[free_pos[k]] = s;
        fill(k + 1);
      }
    };
    fill(0);
  }
  spec.forbidden.assign(tuples.begin(), tuples.end());

  if (spec.zero) {
    std::vector<Symbol> all_zero(window.size(), *spec.zero);
    if (spec.is_forbidden_window(all_zero))
      throw Error(ErrorKind::BadSpec, "declared zero symbol is not a fixed point");
  }
  return spec;
}

SftSpec full_shift_spec(int dim, int alphabet_size) {
  std::vector<std::string> names;
  for (int i = 0; i < alphabet_size; ++i) names.push_back(std::to_string(i));
  return make_sft(dim, names, names[0], std::nullopt,
                  FiniteSet::singleton(Vec(dim, 0)), {});
}

SftSpec full_shift_tracks_spec(int dim, const std::vector<int>& track_sizes) {
  long prod = 1;
  for (int t : track_sizes) prod *= t;
  std::vector<std::string> names;
  for (long s = 0; s < prod; ++s) {
    std::string name;
    long rem = s;
    std::vector<int> digits(track_sizes.size());
    for (int i = static_cast<int>(track_sizes.size()) - 1; i >= 0; --i) {
      digits[i] = static_cast<int>(rem % track_sizes[i]);
      rem /= track_sizes[i];
    }
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i) name += '.';
      name += std::to_string(digits[i]);
    }
    names.push_back(name);
  }
  return make_sft(dim, names, names[0], track_sizes, FiniteSet::singleton(Vec(dim, 0)), {});
}

SftSpec golden_mean_spec() {
  RawForbiddenPattern p;
  p.cells = {{{0}, "1"}, {{1}, "1"}};
  return make_sft(1, {"0", "1"}, std::string("0"), std::nullopt, FiniteSet::interval(0, 1), {p});
}

SftSpec triangular_hard_square_spec() {
  FiniteSet window({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  RawForbiddenPattern horiz, vert, diag;
  horiz.cells = {{{0, 0}, "1"}, {{1, 0}, "1"}};
  vert.cells = {{{0, 0}, "1"}, {{0, 1}, "1"}};
  diag.cells = {{{0, 0}, "1"}, {{1, 1}, "1"}};
  return make_sft(2, {"0", "1"}, std::string("0"), std::nullopt, window, {horiz, vert, diag});
}

SftSpec glider_full_shift_spec() {
  return make_sft(1, {"0", "a1", "a2"}, std::string("0"), std::nullopt,
                  FiniteSet::singleton({0}), {});
}

Symbol PeriodicConfig::at(const Vec& v, const FiniteSet& domain_cache) const {
  auto idx = domain_cache.index_of(lattice.reduce(v));
  return values[*idx];
}

Symbol FiniteConfig::at(const Vec& v, Symbol zero) const {
  auto idx = support.index_of(v);
  return idx ? values[*idx] : zero;
}

bool is_locally_admissible(const Pattern& p, const SftSpec& spec) {
  Placements plan = placements_inside(spec, p.domain);
  std::vector<Symbol> buf(spec.window.size());
  for (const auto& idx : plan.cells) {
    for (std::size_t j = 0; j < idx.size(); ++j) buf[j] = p.values[idx[j]];
    if (spec.is_forbidden_window(buf)) return false;
  }
  return true;
}

bool is_admissible_torus(const PeriodicConfig& c, const SftSpec& spec) {
  FiniteSet fd = c.lattice.fundamental_domain();
  std::vector<Symbol> buf(spec.window.size());
  for (const Vec& v : fd.points()) {
    std::size_t j = 0;
    for (const Vec& w : spec.window.points()) {
      buf[j++] = c.values[*fd.index_of(c.lattice.reduce(vec_add(v, w)))];
    }
    if (spec.is_forbidden_window(buf)) return false;
  }
  return true;
}

bool is_admissible_config(const FiniteConfig& c, const SftSpec& spec) {
  if (!spec.zero) throw Error(ErrorKind::BadSpec, "finite configurations need a zero symbol");
  const Symbol zero = *spec.zero;
  std::set<Vec> translates;
  for (const Vec& s : c.support.points())
    for (const Vec& w : spec.window.points()) translates.insert(vec_sub(s, w));
  std::vector<Symbol> buf(spec.window.size());
  for (const Vec& t : translates) {
    std::size_t j = 0;
    for (const Vec& w : spec.window.points()) buf[j++] = c.at(vec_add(t, w), zero);
    if (spec.is_forbidden_window(buf)) return false;
  }
  return true;
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::UpperBound: return "upper_bound";
    case Provenance::ExactWithinMargin: return "exact_within_margin";
  }
  return "?";
}

CountResult count_patterns(const SftSpec& spec, const FiniteSet& f, Budget& budget, int margin) {
  if (f.empty()) return {BigInt(1), Provenance::Exact, 0};
  if (spec.full_shift()) return {int_pow(spec.alphabet_size(), f.size()), Provenance::Exact, 0};
  Coord lo, hi;
  if (spec.dim == 1 && f.is_interval(&lo, &hi)) {
    TransferSystem ts(spec, budget);
    return {ts.count_interval(hi - lo + 1, budget), Provenance::Exact, 0};
  }
  TupleSet forb = forbidden_set(spec);
  Placements plan = placements_inside(spec, f);
  BigInt count = 0;
  backtrack(spec, f, forb, plan, {}, budget, [&](const std::vector<Symbol>& pat) {
    if (margin < 0 || certify_with_margin(spec, f, pat, margin, budget)) ++count;
    return true;
  });
  if (margin < 0) return {count, Provenance::UpperBound, 0};
  return {count, Provenance::ExactWithinMargin, margin};
}

EnumerateResult enumerate_patterns(const SftSpec& spec, const FiniteSet& f, Budget& budget,
                                   int margin) {
  EnumerateResult out;
  if (f.empty()) {
    out.patterns.push_back({});
    return out;
  }
  Coord lo, hi;
  if (spec.dim == 1 && f.is_interval(&lo, &hi) && !spec.full_shift()) {
    TransferSystem ts(spec, budget);
    std::vector<Symbol> free_fixed(static_cast<std::size_t>(hi - lo + 1), -1);
    ts.enumerate_constrained(free_fixed, budget, [&](const std::vector<Symbol>& pat) {
      out.patterns.push_back(pat);
      return true;
    });
    out.provenance = Provenance::Exact;
    return out;
  }
  TupleSet forb = forbidden_set(spec);
  Placements plan = placements_inside(spec, f);
  backtrack(spec, f, forb, plan, {}, budget, [&](const std::vector<Symbol>& pat) {
    if (margin < 0 || certify_with_margin(spec, f, pat, margin, budget))
      out.patterns.push_back(pat);
    return true;
  });
  if (spec.full_shift()) {
    out.provenance = Provenance::Exact;
  } else if (margin < 0) {
    out.provenance = Provenance::UpperBound;
  } else {
    out.provenance = Provenance::ExactWithinMargin;
    out.margin = margin;
  }
  return out;
}

std::vector<std::vector<Symbol>> enumerate_local_patterns(const SftSpec& spec, const FiniteSet& f,
                                                          Budget& budget) {
  std::vector<std::vector<Symbol>> out;
  if (f.empty()) {
    out.push_back({});
    return out;
  }
  TupleSet forb = forbidden_set(spec);
  Placements plan = placements_inside(spec, f);
  backtrack(spec, f, forb, plan, {}, budget, [&](const std::vector<Symbol>& pat) {
    out.push_back(pat);
    return true;
  });
  return out;
}

bool exists_admissible_completion(const SftSpec& spec, const FiniteSet& f,
                                  const std::vector<std::pair<std::size_t, Symbol>>& fixed,
                                  Budget& budget, int margin) {
  Coord lo, hi;
  if (spec.dim == 1 && f.is_interval(&lo, &hi)) {
    TransferSystem ts(spec, budget);
    std::vector<Symbol> pinned(static_cast<std::size_t>(hi - lo + 1), -1);
    for (auto& [idx, sym] : fixed) pinned[idx] = sym;
    return ts.count_constrained(pinned, budget) > 0;
  }
  FiniteSet region = margin >= 0 ? ball(f, margin) : f;
  std::vector<Symbol> pinned(region.size(), -1);
  for (auto& [idx, sym] : fixed) pinned[*region.index_of(f[idx])] = sym;
  TupleSet forb = forbidden_set(spec);
  Placements plan = placements_inside(spec, region);
  bool found = false;
  backtrack(spec, region, forb, plan, pinned, budget, [&](const std::vector<Symbol>&) {
    found = true;
    return false;
  });
  return found;
}

BigInt ExtensionTable::total() const {
  BigInt t = 0;
  for (const auto& r : rows) t += r.count;
  return t;
}

const ExtensionTable::Row* ExtensionTable::find(const std::vector<Symbol>& boundary_pattern) const {
  for (const auto& r : rows)
    if (r.boundary_pattern == boundary_pattern) return &r;
  return nullptr;
}

ExtensionTable extension_table(const SftSpec& spec, const FiniteSet& f, double s, Budget& budget,
                               bool keep_members, int margin) {
  ExtensionTable table;
  table.box = f;
  table.margin_s = s;
  table.boundary = inner_boundary(f, s);
  table.small_margin_warning = s < static_cast<double>(spec.window_size());

  std::vector<std::size_t> boundary_idx;
  for (const Vec& b : table.boundary.points()) boundary_idx.push_back(*f.index_of(b));

  std::map<std::vector<Symbol>, ExtensionTable::Row> rows;

  Coord lo, hi;
  const bool exact_1d = spec.dim == 1 && f.is_interval(&lo, &hi);
  if (exact_1d && !keep_members) {
    TransferSystem ts(spec, budget);
    const std::size_t n = f.size();
    // Enumerate boundary assignments; count completions for each.
    const int a = spec.alphabet_size();
    std::vector<Symbol> bpat(boundary_idx.size(), 0);
    std::function<void(std::size_t)> go = [&](std::size_t k) {
      if (k == bpat.size()) {
        std::vector<Symbol> pinned(n, -1);
        for (std::size_t j = 0; j < boundary_idx.size(); ++j) pinned[boundary_idx[j]] = bpat[j];
        BigInt c = ts.count_constrained(pinned, budget);
        if (c > 0) rows[bpat] = {bpat, c, {}};
        return;
      }
      for (Symbol sym = 0; sym < a; ++sym) {
        budget.charge();
        bpat[k] = sym;
        go(k + 1);
      }
    };
    go(0);
    table.provenance = Provenance::Exact;
  } else {
    EnumerateResult all = enumerate_patterns(spec, f, budget, margin);
    for (const auto& pat : all.patterns) {
      std::vector<Symbol> bpat;
      bpat.reserve(boundary_idx.size());
      for (std::size_t j : boundary_idx) bpat.push_back(pat[j]);
      auto& row = rows[bpat];
      if (row.count == 0) row.boundary_pattern = bpat;
      row.count += 1;
      if (keep_members) row.members.push_back(pat);
    }
    table.provenance = all.provenance;
  }
  for (auto& [k, row] : rows) table.rows.push_back(std::move(row));
  return table;
}

std::vector<EntropyEstimate> entropy_estimates(const SftSpec& spec,
                                               const std::vector<FiniteSet>& boxes,
                                               Budget& budget) {
  for (std::size_t i = 1; i < boxes.size(); ++i)
    if (boxes[i].size() < boxes[i - 1].size())
      throw Error(ErrorKind::BadArgument, "box family must be nondecreasing");
  std::vector<EntropyEstimate> out;
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    EntropyEstimate e;
    e.box_id = i;
    e.cells = boxes[i].size();
    if (spec.full_shift()) {
      const double l2a = std::log2(static_cast<double>(spec.alphabet_size()));
      e.per_site = l2a;
      e.log2_count = l2a * static_cast<double>(e.cells);
      e.provenance = Provenance::Exact;
    } else {
      CountResult c = count_patterns(spec, boxes[i], budget);
      std::int64_t p2;
      e.log2_count = exact_power_of_two(c.count, &p2) ? static_cast<double>(p2) : log2_of(c.count);
      e.per_site = e.cells ? e.log2_count / static_cast<double>(e.cells) : 0.0;
      e.provenance = c.provenance;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<PeriodicConfig> fixed_points(const SftSpec& spec, const LatticeSubgroup& l,
                                         Budget& budget) {
  if (l.dim() != spec.dim) throw Error(ErrorKind::BadArgument, "lattice dimension mismatch");
  FiniteSet fd = l.fundamental_domain();
  // Torus placements: one per domain cell, coordinates reduced mod L.
  Placements plan;
  plan.by_trigger.resize(fd.size());
  for (const Vec& v : fd.points()) {
    std::vector<std::size_t> idx;
    for (const Vec& w : spec.window.points()) idx.push_back(*fd.index_of(l.reduce(vec_add(v, w))));
    std::size_t trigger = *std::max_element(idx.begin(), idx.end());
    plan.by_trigger[trigger].push_back(plan.cells.size());
    plan.cells.push_back(std::move(idx));
  }
  TupleSet forb = forbidden_set(spec);
  std::vector<PeriodicConfig> out;
  backtrack(spec, fd, forb, plan, {}, budget, [&](const std::vector<Symbol>& vals) {
    out.push_back(PeriodicConfig{l, vals});
    return true;
  });
  return out;
}

BigInt count_fixed_points(const SftSpec& spec, const LatticeSubgroup& l, Budget& budget) {
  return BigInt(fixed_points(spec, l, budget).size());
}

PeriodicConfig re_periodize(const PeriodicConfig& c, const LatticeSubgroup& finer) {
  if (!finer.subgroup_of(c.lattice))
    throw Error(ErrorKind::IncompatibleLattice, "target lattice is not a subgroup");
  FiniteSet coarse_fd = c.lattice.fundamental_domain();
  FiniteSet fine_fd = finer.fundamental_domain();
  std::vector<Symbol> vals;
  vals.reserve(fine_fd.size());
  for (const Vec& v : fine_fd.points()) vals.push_back(c.at(v, coarse_fd));
  return PeriodicConfig{finer, std::move(vals)};
}

IrreducibilityResult strong_irreducibility_check(const SftSpec& spec, Coord gap,
                                                 const std::vector<Coord>& box_lengths,
                                                 const FiniteSet& region, Budget& budget) {
  IrreducibilityResult res;
  const int d = spec.dim;
  for (Coord la : box_lengths) {
    for (Coord lb : box_lengths) {
      FiniteSet shape_a = FiniteSet::box(Vec(d, 0), Vec(d, la - 1));
      FiniteSet shape_b = FiniteSet::box(Vec(d, 0), Vec(d, lb - 1));
      EnumerateResult pa = enumerate_patterns(spec, shape_a, budget);
      EnumerateResult pb = enumerate_patterns(spec, shape_b, budget);
      // All placements of the two shapes inside the region with gap > g.
      for (const Vec& ta : region.points()) {
        FiniteSet placed_a = shape_a.translate(ta);
        if (!placed_a.subset_of(region)) continue;
        for (const Vec& tb : region.points()) {
          FiniteSet placed_b = shape_b.translate(tb);
          if (!placed_b.subset_of(region)) continue;
          Coord dist = -1;
          for (const Vec& x : placed_a.points())
            for (const Vec& y : placed_b.points()) {
              Coord dd = linf_dist(x, y);
              if (dist < 0 || dd < dist) dist = dd;
            }
          if (dist <= gap) continue;  // need gap strictly exceeded
          for (const auto& p : pa.patterns) {
            for (const auto& q : pb.patterns) {
              std::vector<std::pair<std::size_t, Symbol>> fixed;
              bool consistent = true;
              for (std::size_t i = 0; i < placed_a.size() && consistent; ++i)
                fixed.push_back({*region.index_of(placed_a[i]), p[i]});
              for (std::size_t i = 0; i < placed_b.size() && consistent; ++i) {
                std::size_t ri = *region.index_of(placed_b[i]);
                for (auto& [fi, fs] : fixed)
                  if (fi == ri && fs != q[i]) consistent = false;
                fixed.push_back({ri, q[i]});
              }
              if (!consistent) continue;
              if (!exists_admissible_completion(spec, region, fixed, budget)) {
                res.pass = false;
                res.witness = IrreducibilityWitness{placed_a, placed_b, p, q};
                return res;
              }
            }
          }
        }
      }
    }
  }
  return res;
}

std::optional<FiniteConfig> corner_decrease(const SftSpec& spec, const FiniteConfig& x, Coord r,
                                            Budget& budget) {
  if (!spec.zero) throw Error(ErrorKind::BadSpec, "corner decrease needs a zero symbol");
  if (x.support.empty()) throw Error(ErrorKind::ZeroConfig, "x must be nonzero");
  if (x.support[0] != Vec(spec.dim, 0))
    throw Error(ErrorKind::BadArgument, "x must be in good position");
  const Symbol zero = *spec.zero;
  FiniteSet b = ball_around(Vec(spec.dim, 0), r, spec.dim);
  const std::size_t target = x.support.size();

  const int a = spec.alphabet_size();
  std::vector<Symbol> assign(b.size(), 0);
  std::function<std::optional<FiniteConfig>(std::size_t)> go =
      [&](std::size_t i) -> std::optional<FiniteConfig> {
    if (i == b.size()) {
      std::vector<Vec> cells;
      std::vector<Symbol> vals;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (assign[j] != zero) {
          cells.push_back(b[j]);
          vals.push_back(assign[j]);
        }
      }
      for (std::size_t j = 0; j < x.support.size(); ++j) {
        if (!b.contains(x.support[j])) {
          cells.push_back(x.support[j]);
          vals.push_back(x.values[j]);
        }
      }
      FiniteSet supp(cells);
      if (supp.size() != cells.size()) return std::nullopt;  // duplicates cannot occur
      std::vector<Symbol> sorted_vals(supp.size());
      for (std::size_t j = 0; j < cells.size(); ++j) sorted_vals[*supp.index_of(cells[j])] = vals[j];
      FiniteConfig y{supp, sorted_vals};
      if (y.support.size() < target && is_admissible_config(y, spec)) return y;
      return std::nullopt;
    }
    for (Symbol s = 0; s < a; ++s) {
      budget.charge();
      assign[i] = s;
      if (auto y = go(i + 1)) return y;
    }
    return std::nullopt;
  };
  return go(0);
}

}  // namespace sftlab
