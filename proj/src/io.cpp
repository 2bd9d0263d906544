#include "sftlab/io.hpp"

#include <fstream>
#include <sstream>

namespace sftlab {

namespace {

std::string vec_key(const Vec& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

Vec vec_from_key(const std::string& key) {
  Vec v;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(std::stoll(part));
  return v;
}

Vec vec_from_json(const Json& j) {
  Vec v;
  for (const auto& c : j) v.push_back(c.get<Coord>());
  return v;
}

Json vec_to_json(const Vec& v) {
  Json j = Json::array();
  for (Coord c : v) j.push_back(c);
  return j;
}

}  // namespace

Json finite_set_to_json(const FiniteSet& f) {
  Json j = Json::array();
  for (const Vec& p : f.points()) j.push_back(vec_to_json(p));
  return j;
}

FiniteSet finite_set_from_json(const Json& j) {
  std::vector<Vec> pts;
  for (const auto& p : j) pts.push_back(vec_from_json(p));
  return FiniteSet(pts);
}

Json lattice_to_json(const LatticeSubgroup& l) {
  Json rows = Json::array();
  for (const auto& row : l.basis()) {
    Json r = Json::array();
    for (Coord c : row) r.push_back(c);
    rows.push_back(r);
  }
  return Json{{"basis", rows}};
}

LatticeSubgroup lattice_from_json(const Json& j) {
  std::vector<std::vector<Coord>> m;
  for (const auto& row : j.at("basis")) {
    std::vector<Coord> r;
    for (const auto& c : row) r.push_back(c.get<Coord>());
    m.push_back(r);
  }
  return LatticeSubgroup::from_basis(m);
}

Json spec_to_json(const SftSpec& spec) {
  Json j;
  j["dim"] = spec.dim;
  j["alphabet"] = spec.alphabet;
  if (spec.zero) j["zero"] = spec.alphabet[*spec.zero];
  if (spec.tracks) j["tracks"] = *spec.tracks;
  j["window"] = finite_set_to_json(spec.window);
  Json forb = Json::array();
  for (const auto& tuple : spec.forbidden) {
    Json values = Json::object();
    for (std::size_t i = 0; i < tuple.size(); ++i)
      values[vec_key(spec.window[i])] = spec.alphabet[tuple[i]];
    forb.push_back(Json{{"values", values}});
  }
  j["forbidden"] = forb;
  return j;
}

SftSpec spec_from_json(const Json& j) {
  int dim = j.at("dim").get<int>();
  std::vector<std::string> alphabet = j.at("alphabet").get<std::vector<std::string>>();
  std::optional<std::string> zero;
  if (j.contains("zero")) zero = j.at("zero").get<std::string>();
  std::optional<std::vector<int>> tracks;
  if (j.contains("tracks")) tracks = j.at("tracks").get<std::vector<int>>();
  FiniteSet window = finite_set_from_json(j.at("window"));
  std::vector<RawForbiddenPattern> forbidden;
  if (j.contains("forbidden")) {
    for (const auto& f : j.at("forbidden")) {
      RawForbiddenPattern raw;
      for (auto it = f.at("values").begin(); it != f.at("values").end(); ++it)
        raw.cells.push_back({vec_from_key(it.key()), it.value().get<std::string>()});
      forbidden.push_back(raw);
    }
  }
  return make_sft(dim, alphabet, zero, tracks, window, forbidden);
}

SftSpec ingest_spec(const std::string& source) {
  if (source.rfind("builtin:", 0) == 0) {
    std::string name = source.substr(8);
    if (name == "golden_mean") return golden_mean_spec();
    if (name == "hard_square") return triangular_hard_square_spec();
    if (name == "glider3") return glider_full_shift_spec();
    if (name.rfind("full:", 0) == 0) {
      std::stringstream ss(name.substr(5));
      std::string k, d;
      std::getline(ss, k, ':');
      std::getline(ss, d, ':');
      return full_shift_spec(d.empty() ? 1 : std::stoi(d), std::stoi(k));
    }
    if (name.rfind("tracks:", 0) == 0) {
      std::stringstream ss(name.substr(7));
      std::string sizes, d;
      std::getline(ss, sizes, ':');
      std::getline(ss, d, ':');
      std::vector<int> track_sizes;
      std::stringstream st(sizes);
      std::string part;
      while (std::getline(st, part, 'x')) track_sizes.push_back(std::stoi(part));
      return full_shift_tracks_spec(d.empty() ? 1 : std::stoi(d), track_sizes);
    }
    throw Error(ErrorKind::BadSpec, "unknown builtin spec '" + name + "'");
  }
  Json j;
  try {
    j = Json::parse(read_text_file(source));
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::BadSpec, "cannot parse " + source + ": " + e.what());
  }
  return spec_from_json(j);
}

Json pattern_to_json(const SftSpec& spec, const Pattern& p) {
  Json j;
  j["domain"] = finite_set_to_json(p.domain);
  Json vals = Json::array();
  for (Symbol s : p.values) vals.push_back(spec.alphabet[s]);
  j["values"] = vals;
  return j;
}

Pattern pattern_from_json(const SftSpec& spec, const Json& j) {
  Pattern p;
  p.domain = finite_set_from_json(j.at("domain"));
  for (const auto& v : j.at("values")) p.values.push_back(spec.symbol_index(v.get<std::string>()));
  if (p.values.size() != p.domain.size())
    throw Error(ErrorKind::BadSpec, "pattern values do not match the domain");
  return p;
}

Json config_to_json(const SftSpec& spec, const FiniteConfig& c) {
  Json j;
  j["support"] = finite_set_to_json(c.support);
  Json vals = Json::array();
  for (Symbol s : c.values) vals.push_back(spec.alphabet[s]);
  j["values"] = vals;
  return j;
}

FiniteConfig config_from_json(const SftSpec& spec, const Json& j) {
  FiniteConfig c;
  c.support = finite_set_from_json(j.at("support"));
  for (const auto& v : j.at("values")) c.values.push_back(spec.symbol_index(v.get<std::string>()));
  if (c.values.size() != c.support.size())
    throw Error(ErrorKind::BadSpec, "config values do not match the support");
  return c;
}

Json blockmap_to_json(const BlockMap& map, Budget& budget) {
  BlockMap tab = map.tabulate(budget);
  Json j;
  j["neighborhood"] = finite_set_to_json(tab.neighborhood());
  if (tab.period()) j["period"] = lattice_to_json(*tab.period());
  Json rules = Json::array();
  auto locals = enumerate_local_patterns(tab.spec(), tab.neighborhood(), budget);
  for (std::size_t c = 0; c < tab.num_cosets(); ++c) {
    for (const auto& pat : locals) {
      Symbol out = tab.eval(c, pat);
      if (out < 0) continue;
      Json in = Json::array();
      for (Symbol s : pat) in.push_back(tab.spec().alphabet[s]);
      Json rule{{"in", in}, {"out", tab.spec().alphabet[out]}};
      if (tab.num_cosets() > 1) rule["coset"] = c;
      rules.push_back(rule);
    }
  }
  j["rule"] = rules;
  return j;
}

BlockMap blockmap_from_json(std::shared_ptr<const SftSpec> spec, const Json& j, Budget& budget) {
  if (j.contains("builder")) {
    std::string b = j.at("builder").get<std::string>();
    if (b == "shift") return make_shift(spec, vec_from_json(j.at("v")));
    if (b == "identity") return identity_map(spec);
    if (b == "partial_shift")
      return make_partial_shift(spec, j.at("track").get<int>(), vec_from_json(j.at("v")));
    if (b == "track_swap")
      return make_track_swap(spec, j.at("track1").get<int>(), j.at("track2").get<int>());
    if (b == "symbol_perm") {
      std::vector<Symbol> perm;
      for (const auto& v : j.at("perm")) perm.push_back(spec->symbol_index(v.get<std::string>()));
      return make_symbol_perm(spec, perm);
    }
    if (b == "conditioned_perm") {
      std::vector<int> perm = j.at("perm").get<std::vector<int>>();
      std::vector<Cylinder> condition;
      for (const auto& cj : j.at("condition")) {
        Cylinder c;
        c.domain = finite_set_from_json(cj.at("domain"));
        c.digits = cj.at("digits").get<std::vector<int>>();
        condition.push_back(c);
      }
      return make_conditioned_perm(spec, perm, condition, j.value("cond_track", 0),
                                   j.value("targ_track", 1));
    }
    throw Error(ErrorKind::BadSpec, "unknown builder '" + b + "'");
  }
  FiniteSet n = finite_set_from_json(j.at("neighborhood"));
  std::optional<LatticeSubgroup> period;
  if (j.contains("period")) period = lattice_from_json(j.at("period"));
  std::size_t cosets = period ? period->fundamental_domain().size() : 1;
  std::size_t size = 1;
  for (std::size_t i = 0; i < n.size(); ++i) {
    size *= static_cast<std::size_t>(spec->alphabet_size());
    if (size > (1u << 24)) throw Error(ErrorKind::BudgetExceeded, "rule table too large");
  }
  budget.charge(size * cosets);
  std::vector<std::vector<Symbol>> tables(cosets, std::vector<Symbol>(size, -1));
  for (const auto& rule : j.at("rule")) {
    std::vector<Symbol> pat;
    for (const auto& v : rule.at("in")) pat.push_back(spec->symbol_index(v.get<std::string>()));
    if (pat.size() != n.size()) throw Error(ErrorKind::BadSpec, "rule arity mismatch");
    std::size_t r = 0;
    for (std::size_t i = pat.size(); i-- > 0;)
      r = r * spec->alphabet_size() + static_cast<std::size_t>(pat[i]);
    Symbol out = spec->symbol_index(rule.at("out").get<std::string>());
    std::size_t coset = rule.value("coset", 0);
    tables.at(coset)[r] = out;
  }
  return BlockMap::tabulated(spec, n, std::move(tables), period, j.value("name", "custom"));
}

namespace {

std::string pattern_string(const SftSpec& spec, const std::vector<Symbol>& vals) {
  std::string s;
  for (std::size_t i = 0; i < vals.size(); ++i) s += (i ? "," : "") + spec.alphabet[vals[i]];
  return s;
}

std::vector<Symbol> pattern_from_string(const SftSpec& spec, const std::string& s) {
  std::vector<Symbol> vals;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) vals.push_back(spec.symbol_index(part));
  return vals;
}

}  // namespace

Json gate_to_json(const Gate& gate) {
  Json j;
  j["D"] = finite_set_to_json(gate.neighborhood);
  j["margin"] = gate.margin;
  Json perm = Json::array();
  for (std::size_t i = 0; i < gate.perm.size(); ++i) {
    if (gate.perm[i] == i) continue;  // identity rows are implicit
    perm.push_back(Json::array({pattern_string(*gate.spec, gate.patterns[i]),
                                pattern_string(*gate.spec, gate.patterns[gate.perm[i]])}));
  }
  j["perm"] = perm;
  return j;
}

Gate gate_from_json(std::shared_ptr<const SftSpec> spec, const Json& j, Budget& budget) {
  FiniteSet d = finite_set_from_json(j.at("D"));
  auto patterns = enumerate_patterns(*spec, d, budget).patterns;
  std::sort(patterns.begin(), patterns.end());
  auto index_of = [&](const std::vector<Symbol>& vals) -> std::size_t {
    auto it = std::lower_bound(patterns.begin(), patterns.end(), vals);
    if (it == patterns.end() || *it != vals)
      throw Error(ErrorKind::BadSpec, "gate pattern is not admissible on D");
    return static_cast<std::size_t>(it - patterns.begin());
  };
  std::vector<std::uint32_t> perm(patterns.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::uint32_t>(i);
  for (const auto& pair : j.at("perm")) {
    std::size_t from = index_of(pattern_from_string(*spec, pair.at(0).get<std::string>()));
    std::size_t to = index_of(pattern_from_string(*spec, pair.at(1).get<std::string>()));
    perm[from] = static_cast<std::uint32_t>(to);
  }
  return validate_gate(spec, d, perm, j.value("margin", static_cast<int>(spec->window_size())),
                       budget);
}

void emit_report(const Json& report, const std::string& path, const std::string& format) {
  if (format == "json") {
    write_text_file(path, report.dump(2) + "\n");
  } else if (format == "csv") {
    write_text_file(path, report_to_csv(report));
  } else {
    throw Error(ErrorKind::BadArgument, "unknown format '" + format + "'");
  }
}

std::string report_to_csv(const Json& report) {
  if (!report.contains("table") || !report.contains("csv_columns"))
    throw Error(ErrorKind::BadArgument, "report has no tabular payload");
  std::ostringstream out;
  const auto& cols = report.at("csv_columns");
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i].get<std::string>();
  out << "\n";
  for (const auto& row : report.at("table")) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& key = cols[i].get<std::string>();
      out << (i ? "," : "");
      if (row.contains(key)) {
        const auto& v = row.at(key);
        if (v.is_string())
          out << v.get<std::string>();
        else
          out << v.dump();
      }
    }
    out << "\n";
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::BadArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::BadArgument, "cannot write " + path);
  out << content;
}

}  // namespace sftlab
