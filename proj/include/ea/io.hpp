#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ea/barrier.hpp"
#include "ea/ground_state.hpp"
#include "ea/hermite.hpp"
#include "ea/lattice.hpp"
#include "ea/spectral.hpp"

namespace ea::io {

using json = nlohmann::json;

/// {"edges": [indices...], "pairs": ["(x,y)-(x,y)", ...]}
json to_json(const GridGraph& graph, const EdgeSet& S);
EdgeSet edge_set_from_json(const GridGraph& graph, const json& j);

/// {"n_cols", "n_rows", "couplings": [J_e in edge order]}
json to_json(const CouplingField& J);
CouplingField coupling_from_json(const json& j);

/// {"n_cols", "n_rows", "pinned", "spins": [+-1 in vertex order]}
json to_json(const SpinConfig& s);
SpinConfig spins_from_json(const json& j);

json to_json(const QuadratureRule<double>& rule);
json to_json(const GridGraph& graph, const Census& census);
json to_json(const GridGraph& graph, const BarrierSpec& spec);

/// Counterexample bundle for a failed obliviousness check.
json barrier_counterexample(const GridGraph& graph, const CouplingField& J,
                            const BarrierSpec& spec, const BarrierReport& report);

/// Binary coupling dump: 16-byte little-endian header (magic "EAJF",
/// version, n_cols, n_rows as uint32) followed by one or more records of
/// num_edges IEEE-754 doubles.
inline constexpr char kBinaryMagic[4] = {'E', 'A', 'J', 'F'};
inline constexpr std::uint32_t kBinaryVersion = 1;

void write_couplings_binary(std::ostream& os, const std::vector<CouplingField>& fields);
std::vector<CouplingField> read_couplings_binary(std::istream& is);

}  // namespace ea::io
