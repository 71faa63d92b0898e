#include "ea/ou_flow.hpp"

#include <cmath>
#include <stdexcept>

#include "ea/parallel.hpp"

namespace ea {

CouplingField evolve(const CouplingField& J0, double t, std::mt19937_64& rng) {
  if (t < 0) throw std::invalid_argument("evolve: negative time");
  CouplingField out = J0;
  if (t == 0) return out;
  const double decay = std::exp(-t);
  const double noise = std::sqrt(-std::expm1(-2.0 * t));
  std::normal_distribution<double> normal;
  for (int e = 0; e < out.size(); ++e) out[e] = decay * J0[e] + noise * normal(rng);
  return out;
}

double overlap(const SpinConfig& s0, const SpinConfig& st) {
  if (s0.n_cols() != st.n_cols() || s0.n_rows() != st.n_rows()) {
    throw std::invalid_argument("overlap: shape mismatch");
  }
  long acc = 0;
  for (int w = 0; w < s0.size(); ++w) acc += s0.spin(w) * st.spin(w);
  return static_cast<double>(acc) / s0.size();
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  const size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.stderr_ = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  return out;
}

std::vector<DecorrelationRow> decorrelation_experiment(const GridGraph& graph,
                                                       const TerminalPair& pair,
                                                       const std::vector<double>& t_grid,
                                                       int replicas,
                                                       const StreamSeeder& seeder,
                                                       const RunOptions& options) {
  check_solver_capable(graph, options.solver);
  if (replicas < 1) throw std::invalid_argument("replicas must be positive");
  for (double t : t_grid) {
    if (t < 0) throw std::invalid_argument("negative time in t grid");
  }
  const size_t nt = t_grid.size();
  const size_t nr = static_cast<size_t>(replicas);
  std::vector<double> r2(nr * nt);
  std::vector<double> cov(nr * nt);

  parallel_for(nr, options.threads, [&](size_t r) {
    auto init = seeder.engine({r, 0, tag(Stream::initial)});
    const CouplingField J0 = gaussian_field(graph, init);
    const GroundStateResult g0 = solve(graph, J0, options.solver);
    const int rel0 = relative_spin(graph, g0.spins, pair);
    for (size_t i = 0; i < nt; ++i) {
      auto flow = seeder.engine({r, i, tag(Stream::flow)});
      const CouplingField Jt = evolve(J0, t_grid[i], flow);
      const GroundStateResult gt = (t_grid[i] == 0) ? g0 : solve(graph, Jt, options.solver);
      const double R = overlap(g0.spins, gt.spins);
      r2[r * nt + i] = R * R;
      cov[r * nt + i] = rel0 * relative_spin(graph, gt.spins, pair);
    }
  });

  std::vector<DecorrelationRow> rows(nt);
  std::vector<double> col(nr);
  for (size_t i = 0; i < nt; ++i) {
    rows[i].t = t_grid[i];
    rows[i].replicas = replicas;
    for (size_t r = 0; r < nr; ++r) col[r] = r2[r * nt + i];
    const MeanStderr a = mean_stderr(col);
    for (size_t r = 0; r < nr; ++r) col[r] = cov[r * nt + i];
    const MeanStderr b = mean_stderr(col);
    rows[i].mean_r2 = a.mean;
    rows[i].stderr_r2 = a.stderr_;
    rows[i].mean_cov = b.mean;
    rows[i].stderr_cov = b.stderr_;
  }
  return rows;
}

}  // namespace ea
