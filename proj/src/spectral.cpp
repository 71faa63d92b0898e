#include "ea/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "ea/parallel.hpp"

namespace ea {

namespace {

constexpr int kMaxBruteForceVertices = 20;

// Per-configuration edge signs sigma_a sigma_b for every configuration with
// vertex 0 pinned, plus each configuration's relative spin.
struct ConfigTable {
  int num_edges = 0;
  std::vector<signed char> edge_sign;  // config-major
  std::vector<int> rel;

  ConfigTable(const GridGraph& graph, const TerminalPair& pair) : num_edges(graph.num_edges()) {
    const int nv = graph.num_vertices();
    if (nv > kMaxBruteForceVertices) {
      throw SizingError("brute-force relative spin limited to " +
                        std::to_string(kMaxBruteForceVertices) + " vertices");
    }
    const int u = graph.vertex_index(pair.u);
    const int v = graph.vertex_index(pair.v);
    const std::uint32_t configs = std::uint32_t{1} << (nv - 1);
    edge_sign.resize(static_cast<size_t>(configs) * static_cast<size_t>(num_edges));
    rel.resize(configs);
    for (std::uint32_t c = 0; c < configs; ++c) {
      const std::uint32_t mask = c << 1;  // vertex 0 stays +1
      auto spin = [&](int w) { return ((mask >> w) & 1U) ? -1 : 1; };
      for (int e = 0; e < num_edges; ++e) {
        const Edge& ed = graph.edge(e);
        edge_sign[static_cast<size_t>(c) * num_edges + e] =
            static_cast<signed char>(spin(ed.a) * spin(ed.b));
      }
      rel[c] = spin(u) * spin(v);
    }
  }

  // Average relative spin over all maximisers. Energies are summed in edge
  // order, so configurations related by a coupling sign flip compare equal
  // bit for bit.
  double evaluate(std::span<const double> J) const {
    double best = -std::numeric_limits<double>::infinity();
    long sum = 0;
    long count = 0;
    const size_t configs = rel.size();
    for (size_t c = 0; c < configs; ++c) {
      const signed char* s = edge_sign.data() + c * static_cast<size_t>(num_edges);
      double h = 0.0;
      for (int e = 0; e < num_edges; ++e) h += J[static_cast<size_t>(e)] * s[e];
      if (h > best) {
        best = h;
        sum = rel[c];
        count = 1;
      } else if (h == best) {
        sum += rel[c];
        ++count;
      }
    }
    return static_cast<double>(sum) / static_cast<double>(count);
  }
};

// f(J) on the full tensor grid, first edge varying fastest.
Eigen::VectorXd tabulate_relative_spin(const GridGraph& graph, const TerminalPair& pair,
                                       const QuadratureRule<double>& rule) {
  const ConfigTable table(graph, pair);
  const int E = graph.num_edges();
  const int Q = rule.size();
  size_t points = 1;
  for (int e = 0; e < E; ++e) points *= static_cast<size_t>(Q);
  Eigen::VectorXd f(static_cast<Eigen::Index>(points));
  std::vector<int> digit(static_cast<size_t>(E), 0);
  std::vector<double> J(static_cast<size_t>(E));
  for (int e = 0; e < E; ++e) J[static_cast<size_t>(e)] = rule.nodes[0];
  for (size_t p = 0; p < points; ++p) {
    f[static_cast<Eigen::Index>(p)] = table.evaluate(J);
    for (int e = 0; e < E; ++e) {
      auto& d = digit[static_cast<size_t>(e)];
      if (++d < Q) {
        J[static_cast<size_t>(e)] = rule.nodes[d];
        break;
      }
      d = 0;
      J[static_cast<size_t>(e)] = rule.nodes[0];
    }
  }
  return f;
}

void check_pair(const GridGraph& graph, const TerminalPair& pair) {
  if (graph.vertex_index(pair.u) == graph.vertex_index(pair.v)) {
    throw std::invalid_argument("terminal pair must be two distinct vertices");
  }
}

}  // namespace

double symmetric_relative_spin(const GridGraph& graph, const CouplingField& J,
                               const TerminalPair& pair) {
  check_pair(graph, pair);
  const ConfigTable table(graph, pair);
  return table.evaluate({J.values().data(), static_cast<size_t>(J.size())});
}

SpectralEstimate coefficient_quadrature(const GridGraph& graph, const TerminalPair& pair,
                                        const MultiIndex& k, int q) {
  check_pair(graph, pair);
  if (graph.num_edges() > kMaxQuadratureEdges) {
    throw SizingError("tensor quadrature limited to " + std::to_string(kMaxQuadratureEdges) +
                      " edges (got " + std::to_string(graph.num_edges()) + ")");
  }
  if (k.num_edges() != graph.num_edges()) throw std::invalid_argument("multi-index shape mismatch");
  const QuadratureRule<double> rule = split_quadrature_rule(q);
  const Eigen::VectorXd f = tabulate_relative_spin(graph, pair, rule);

  const int E = graph.num_edges();
  const int Q = rule.size();
  // weight_h(e, i) = w_i h_{k_e}(x_i)
  Eigen::MatrixXd weight_h(E, Q);
  for (int e = 0; e < E; ++e) {
    for (int i = 0; i < Q; ++i) {
      weight_h(e, i) = rule.weights[i] * hermite_eval(k.degree(e), rule.nodes[i]);
    }
  }
  double acc = 0.0;
  std::vector<int> digit(static_cast<size_t>(E), 0);
  for (Eigen::Index p = 0; p < f.size(); ++p) {
    double w = f[p];
    for (int e = 0; e < E; ++e) w *= weight_h(e, digit[static_cast<size_t>(e)]);
    acc += w;
    for (int e = 0; e < E; ++e) {
      if (++digit[static_cast<size_t>(e)] < Q) break;
      digit[static_cast<size_t>(e)] = 0;
    }
  }
  return {k, acc, 0.0, EstimateMethod::quadrature};
}

SpectralEstimate coefficient_mc(const GridGraph& graph, const TerminalPair& pair,
                                const MultiIndex& k, int samples, const StreamSeeder& seeder,
                                const RunOptions& options) {
  check_pair(graph, pair);
  check_solver_capable(graph, options.solver);
  if (samples < 1) throw std::invalid_argument("sample count must be positive");
  std::vector<double> vals(static_cast<size_t>(samples));
  parallel_for(vals.size(), options.threads, [&](size_t i) {
    auto rng = seeder.engine({i, 0, tag(Stream::outer)});
    const CouplingField J = gaussian_field(graph, rng);
    const GroundStateResult g = solve(graph, J, options.solver);
    vals[i] = relative_spin(graph, g.spins, pair) * hermite_tensor_eval(k, J);
  });
  const MeanStderr m = mean_stderr(vals);
  return {k, m.mean, m.stderr_, EstimateMethod::monte_carlo};
}

SubsetMassEstimate subset_mass(const GridGraph& graph, const TerminalPair& pair,
                               const EdgeSet& S, const SubsetMassOptions& options,
                               const StreamSeeder& seeder) {
  check_pair(graph, pair);
  if (S.universe() != graph.num_edges()) throw std::invalid_argument("subset shape mismatch");
  if (options.outer < 1 || options.inner < 2) {
    throw std::invalid_argument("subset_mass needs outer >= 1 and inner >= 2");
  }
  SolverOptions solver = options.run.solver;
  solver.track_gap = true;
  check_solver_capable(graph, solver);

  SubsetMassEstimate out;
  out.S = S;
  out.outer_samples = options.outer;
  out.inner_samples = options.inner;

  std::optional<EdgeSet> pairing;
  if (options.antithetic && !is_connecting(graph, S, pair)) {
    pairing = component_boundary_cutset(graph, S, pair).edges;
    out.antithetic = true;
  }
  const EdgeSet free_edges = ~S;
  const std::vector<int> free_idx = free_edges.indices();
  const int half = options.inner / 2;

  std::vector<double> products(static_cast<size_t>(options.outer));
  std::vector<long> excluded(static_cast<size_t>(options.outer), 0);

  parallel_for(products.size(), options.run.threads, [&](size_t o) {
    auto outer_rng = seeder.engine({o, 0, tag(Stream::outer)});
    CouplingField J = gaussian_field(graph, outer_rng);
    if (free_idx.empty()) {
      const GroundStateResult g = solve(graph, J, solver);
      products[o] = 1.0;  // (sigma_u sigma_v)^2
      excluded[o] = g.near_tie() ? 1 : 0;
      return;
    }
    double half_mean[2] = {0.0, 0.0};
    const Stream roles[2] = {Stream::inner_a, Stream::inner_b};
    std::normal_distribution<double> normal;
    for (int h = 0; h < 2; ++h) {
      long sum = 0;
      long count = 0;
      for (int i = 0; i < half; ++i) {
        auto rng = seeder.engine({o, static_cast<std::uint64_t>(i), tag(roles[h])});
        for (int e : free_idx) J[e] = normal(rng);
        const GroundStateResult g = solve(graph, J, solver);
        if (pairing) {
          const GroundStateResult gf = solve(graph, flip_cutset(J, *pairing), solver);
          if (g.near_tie() || gf.near_tie()) {
            excluded[o] += 2;
            continue;
          }
          sum += relative_spin(graph, g.spins, pair) + relative_spin(graph, gf.spins, pair);
          count += 2;
        } else {
          if (g.near_tie()) {
            ++excluded[o];
            continue;
          }
          sum += relative_spin(graph, g.spins, pair);
          ++count;
        }
      }
      half_mean[h] = count > 0 ? static_cast<double>(sum) / static_cast<double>(count) : 0.0;
    }
    products[o] = half_mean[0] * half_mean[1];
  });

  const MeanStderr m = mean_stderr(products);
  out.mass_hat = m.mean;
  out.stderr_ = m.stderr_;
  for (long x : excluded) out.excluded += x;
  return out;
}

SubsetMassEstimate line_mass(const GridGraph& graph, const TerminalPair& pair,
                             const SubsetMassOptions& options, const StreamSeeder& seeder) {
  return subset_mass(graph, pair, line_L(graph, pair), options, seeder);
}

Census spectral_support_census(const GridGraph& graph, const TerminalPair& pair,
                               int degree_cap, int q) {
  check_pair(graph, pair);
  const int E = graph.num_edges();
  if (E > kMaxCensusEdges) {
    throw SizingError("census limited to graphs with at most " +
                      std::to_string(kMaxCensusEdges) + " edges");
  }
  if (degree_cap < 0 || degree_cap > 32) throw std::invalid_argument("degree cap out of range");
  const QuadratureRule<double> rule = split_quadrature_rule(q);
  const int Q = rule.size();
  const int K = degree_cap + 1;

  // basis(k, i) = w_i h_k(x_i)
  Eigen::MatrixXd basis(K, Q);
  for (int i = 0; i < Q; ++i) {
    basis.col(i) = rule.weights[i] * hermite_all(degree_cap, rule.nodes[i]);
  }

  // Mode-by-mode contraction: each step contracts the fastest axis and
  // rotates it to the slowest position.
  Eigen::VectorXd tensor = tabulate_relative_spin(graph, pair, rule);
  Eigen::Index rest = tensor.size() / Q;
  for (int e = 0; e < E; ++e) {
    const Eigen::Map<const Eigen::MatrixXd> slab(tensor.data(), Q, rest);
    Eigen::MatrixXd rotated = (basis * slab).transpose();
    tensor = Eigen::Map<Eigen::VectorXd>(rotated.data(), rotated.size());
    if (e + 1 < E) rest = tensor.size() / Q;
  }

  Census census;
  census.degree_cap = degree_cap;
  census.order = q;
  std::vector<int> digit(static_cast<size_t>(E), 0);
  for (Eigen::Index idx = 0; idx < tensor.size(); ++idx) {
    int weight = 0;
    for (int d : digit) weight += d;
    if (weight <= degree_cap) {
      CensusEntry entry;
      entry.k = MultiIndex(E);
      for (int e = 0; e < E; ++e) entry.k.set(e, digit[static_cast<size_t>(e)]);
      entry.alpha = tensor[idx];
      entry.alpha_sq = entry.alpha * entry.alpha;
      entry.support_connects = is_connecting(graph, entry.k.support(), pair);
      census.entries.push_back(std::move(entry));
    }
    for (int e = 0; e < E; ++e) {
      if (++digit[static_cast<size_t>(e)] < K) break;
      digit[static_cast<size_t>(e)] = 0;
    }
  }
  std::stable_sort(census.entries.begin(), census.entries.end(),
                   [](const CensusEntry& a, const CensusEntry& b) {
                     if (a.k.weight() != b.k.weight()) return a.k.weight() < b.k.weight();
                     return a.k.entries() < b.k.entries();
                   });
  for (const auto& entry : census.entries) census.captured_mass += entry.alpha_sq;
  return census;
}

std::vector<IdentityRow> decorrelation_identity_check(const GridGraph& graph,
                                                      const TerminalPair& pair,
                                                      const std::vector<double>& t_grid,
                                                      int degree_cap, int q, int replicas,
                                                      const StreamSeeder& seeder,
                                                      const RunOptions& options) {
  const Census census = spectral_support_census(graph, pair, degree_cap, q);
  const auto mc = decorrelation_experiment(graph, pair, t_grid, replicas, seeder, options);
  std::vector<IdentityRow> rows;
  rows.reserve(t_grid.size());
  for (size_t i = 0; i < t_grid.size(); ++i) {
    IdentityRow row;
    row.t = t_grid[i];
    row.mc_cov = mc[i].mean_cov;
    row.mc_stderr = mc[i].stderr_cov;
    double captured = 0.0;
    for (const auto& entry : census.entries) {
      captured += entry.alpha_sq;
      row.spectral_sum += entry.alpha_sq * std::exp(-entry.k.weight() * row.t);
    }
    row.tail_bound = std::max(0.0, 1.0 - captured) * std::exp(-(degree_cap + 1) * row.t);
    row.agrees = std::abs(row.mc_cov - row.spectral_sum) <= 3.0 * row.mc_stderr + row.tail_bound;
    rows.push_back(row);
  }
  return rows;
}

std::string describe(const MultiIndex& k) {
  std::ostringstream os;
  if (k.is_zero()) return "0";
  for (const auto& [e, d] : k.entries()) os << '(' << e << ':' << d << ')';
  return os.str();
}

}  // namespace ea
