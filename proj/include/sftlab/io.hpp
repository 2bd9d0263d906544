#pragma once

#include <string>

#include <json.hpp>

#include "sftlab/gates.hpp"
#include "sftlab/homoclinics.hpp"
#include "sftlab/morphisms.hpp"
#include "sftlab/sft.hpp"

namespace sftlab {

using Json = nlohmann::json;

Json finite_set_to_json(const FiniteSet& f);
FiniteSet finite_set_from_json(const Json& j);

Json lattice_to_json(const LatticeSubgroup& l);
LatticeSubgroup lattice_from_json(const Json& j);

Json spec_to_json(const SftSpec& spec);
SftSpec spec_from_json(const Json& j);

// Path or "builtin:<name>" where name is one of golden_mean, hard_square,
// glider3, full:<k>:<d>, tracks:<t1>x<t2>...:<d>.
SftSpec ingest_spec(const std::string& source);

Json pattern_to_json(const SftSpec& spec, const Pattern& p);
Pattern pattern_from_json(const SftSpec& spec, const Json& j);

Json config_to_json(const SftSpec& spec, const FiniteConfig& c);
FiniteConfig config_from_json(const SftSpec& spec, const Json& j);

Json blockmap_to_json(const BlockMap& map, Budget& budget);
BlockMap blockmap_from_json(std::shared_ptr<const SftSpec> spec, const Json& j, Budget& budget);

Json gate_to_json(const Gate& gate);
Gate gate_from_json(std::shared_ptr<const SftSpec> spec, const Json& j, Budget& budget);

// Reports carry "table" (array of flat rows) and "csv_columns"; CSV emission
// uses those. JSON emission writes the document verbatim.
void emit_report(const Json& report, const std::string& path, const std::string& format);
std::string report_to_csv(const Json& report);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace sftlab
