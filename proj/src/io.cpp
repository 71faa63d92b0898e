#include "ea/io.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ea::io {

json to_json(const GridGraph& graph, const EdgeSet& S) {
  return {{"edges", S.indices()}, {"pairs", describe_edges(graph, S)}};
}

EdgeSet edge_set_from_json(const GridGraph& graph, const json& j) {
  const json& arr = j.is_array() ? j : j.at("edges");
  EdgeSet S(graph.num_edges());
  for (const auto& e : arr) S.insert(e.get<int>());
  return S;
}

json to_json(const CouplingField& J) {
  std::vector<double> v(J.values().data(), J.values().data() + J.size());
  return {{"n_cols", J.n_cols()}, {"n_rows", J.n_rows()}, {"couplings", v}};
}

CouplingField coupling_from_json(const json& j) {
  const GridGraph graph(j.at("n_cols").get<int>(), j.at("n_rows").get<int>());
  const auto v = j.at("couplings").get<std::vector<double>>();
  return {graph, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()))};
}

json to_json(const SpinConfig& s) {
  return {{"n_cols", s.n_cols()}, {"n_rows", s.n_rows()}, {"pinned", s.pinned()},
          {"spins", s.to_vector()}};
}

SpinConfig spins_from_json(const json& j) {
  const GridGraph graph(j.at("n_cols").get<int>(), j.at("n_rows").get<int>());
  const auto v = j.at("spins").get<std::vector<int>>();
  return {graph, v};
}

json to_json(const QuadratureRule<double>& rule) {
  std::vector<double> x(rule.nodes.data(), rule.nodes.data() + rule.size());
  std::vector<double> w(rule.weights.data(), rule.weights.data() + rule.size());
  return {{"order", rule.size()}, {"nodes", x}, {"weights", w}};
}

json to_json(const GridGraph& graph, const Census& census) {
  json entries = json::array();
  for (const auto& entry : census.entries) {
    json pairs = json::array();
    for (const auto& [e, d] : entry.k.entries()) pairs.push_back({e, d});
    entries.push_back({{"multi_index", pairs},
                       {"alpha_sq", entry.alpha_sq},
                       {"weight", entry.k.weight()},
                       {"support_connects", entry.support_connects}});
  }
  return {{"n_cols", graph.n_cols()},
          {"n_rows", graph.n_rows()},
          {"degree_cap", census.degree_cap},
          {"quadrature_order", census.order},
          {"captured_mass", census.captured_mass},
          {"entries", entries}};
}

json to_json(const GridGraph& graph, const BarrierSpec& spec) {
  std::vector<int> walk(spec.boundary_walk.begin(), spec.boundary_walk.end());
  json walk_xy = json::array();
  for (int w : walk) {
    const Vertex p = graph.vertex(w);
    walk_xy.push_back({p.x, p.y});
  }
  return {{"center_edge", spec.center_edge},
          {"low_threshold", spec.low_threshold},
          {"high_threshold", spec.high_threshold},
          {"low_edges", to_json(graph, spec.low_edges)},
          {"high_edges", to_json(graph, spec.high_edges)},
          {"boundary_walk", walk_xy}};
}

json barrier_counterexample(const GridGraph& graph, const CouplingField& J,
                            const BarrierSpec& spec, const BarrierReport& report) {
  return {{"couplings", to_json(J)},
          {"spin_config_plus", to_json(report.plus.spins)},
          {"spin_config_minus", to_json(report.minus.spins)},
          {"relative_plus", report.relative_plus},
          {"relative_minus", report.relative_minus},
          {"walk_positive_plus", report.walk_positive_plus},
          {"walk_positive_minus", report.walk_positive_minus},
          {"spec", to_json(graph, spec)}};
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary dump assumes a little-endian host");

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw std::runtime_error("truncated coupling dump header");
  }
  return v;
}

}  // namespace

void write_couplings_binary(std::ostream& os, const std::vector<CouplingField>& fields) {
  if (fields.empty()) throw std::invalid_argument("no coupling fields to write");
  const int n_cols = fields.front().n_cols();
  const int n_rows = fields.front().n_rows();
  os.write(kBinaryMagic, 4);
  put_u32(os, kBinaryVersion);
  put_u32(os, static_cast<std::uint32_t>(n_cols));
  put_u32(os, static_cast<std::uint32_t>(n_rows));
  for (const auto& J : fields) {
    if (J.n_cols() != n_cols || J.n_rows() != n_rows) {
      throw std::invalid_argument("mixed grid shapes in one dump");
    }
    os.write(reinterpret_cast<const char*>(J.values().data()),
             static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(J.size())));
  }
  if (!os) throw std::runtime_error("failed writing coupling dump");
}

std::vector<CouplingField> read_couplings_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kBinaryMagic, 4) != 0) {
    throw std::runtime_error("not a coupling dump (bad magic)");
  }
  const std::uint32_t version = get_u32(is);
  if (version != kBinaryVersion) throw std::runtime_error("unsupported dump version");
  const int n_cols = static_cast<int>(get_u32(is));
  const int n_rows = static_cast<int>(get_u32(is));
  const GridGraph graph(n_cols, n_rows);
  std::vector<CouplingField> out;
  for (;;) {
    CouplingField J(graph);
    const auto bytes = static_cast<std::streamsize>(sizeof(double) * static_cast<size_t>(J.size()));
    is.read(reinterpret_cast<char*>(J.values().data()), bytes);
    if (is.gcount() == 0) break;
    if (is.gcount() != bytes) throw std::runtime_error("truncated coupling record");
    out.push_back(std::move(J));
  }
  return out;
}

}  // namespace ea::io
