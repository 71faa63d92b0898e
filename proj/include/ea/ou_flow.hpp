#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ea/ground_state.hpp"
#include "ea/lattice.hpp"
#include "ea/rng.hpp"

namespace ea {

/// Exact OU transition J^t = e^{-t} J^0 + sqrt(1 - e^{-2t}) J', with J'
/// a fresh standard Gaussian field drawn from `rng` in edge order.
CouplingField evolve(const CouplingField& J0, double t, std::mt19937_64& rng);

struct FlowSample {
  CouplingField J0;
  CouplingField Jt;
  double t = 0.0;
  std::uint64_t seed = 0;
};

/// Site overlap R = <s0, st> / |V|.
double overlap(const SpinConfig& s0, const SpinConfig& st);

struct DecorrelationRow {
  double t = 0.0;
  int replicas = 0;
  double mean_r2 = 0.0;
  double stderr_r2 = 0.0;
  /// Mean of sigma_u^t sigma_v^t sigma_u^0 sigma_v^0.
  double mean_cov = 0.0;
  double stderr_cov = 0.0;
};

struct RunOptions {
  int threads = 1;
  SolverOptions solver;
};

/// For each replica draws J^0, evolves it independently to every t of the
/// grid, solves both ground states and accumulates R^2 and the two-point
/// product. Replica r uses streams {r, 0, initial} and {r, i, flow}.
std::vector<DecorrelationRow> decorrelation_experiment(const GridGraph& graph,
                                                       const TerminalPair& pair,
                                                       const std::vector<double>& t_grid,
                                                       int replicas,
                                                       const StreamSeeder& seeder,
                                                       const RunOptions& options = {});

/// Sample mean and its standard error.
struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};
MeanStderr mean_stderr(const std::vector<double>& values);

}  // namespace ea
