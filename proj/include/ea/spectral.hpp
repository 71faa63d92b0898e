#pragma once

#include <string>
#include <vector>

#include "ea/ground_state.hpp"
#include "ea/hermite.hpp"
#include "ea/lattice.hpp"
#include "ea/ou_flow.hpp"
#include "ea/rng.hpp"

namespace ea {

enum class EstimateMethod { quadrature, monte_carlo };

struct SpectralEstimate {
  MultiIndex k;
  double alpha_hat = 0.0;
  double stderr_ = 0.0;
  EstimateMethod method = EstimateMethod::quadrature;
};

struct SubsetMassEstimate {
  EdgeSet S;
  double mass_hat = 0.0;
  double stderr_ = 0.0;
  int outer_samples = 0;
  int inner_samples = 0;
  /// True when cutset pairing was applied (S must disconnect u and v).
  bool antithetic = false;
  /// Inner draws dropped because the ground state was a near-tie.
  long excluded = 0;
};

inline constexpr int kMaxQuadratureEdges = 8;
inline constexpr int kMaxCensusEdges = 5;

/// sigma_u sigma_v averaged over all exact maximisers of H (a single +-1
/// value unless the ground state is degenerate). Brute force; tiny graphs.
double symmetric_relative_spin(const GridGraph& graph, const CouplingField& J,
                               const TerminalPair& pair);

/// alpha_k = E[sigma_u sigma_v h_k(J)] by tensor quadrature over all edges
/// with the split rule of order q on each axis.
SpectralEstimate coefficient_quadrature(const GridGraph& graph, const TerminalPair& pair,
                                        const MultiIndex& k, int q);

/// Sample mean of sigma_u sigma_v h_k(J) over N draws (stream {i, 0, outer}).
SpectralEstimate coefficient_mc(const GridGraph& graph, const TerminalPair& pair,
                                const MultiIndex& k, int samples, const StreamSeeder& seeder,
                                const RunOptions& options = {});

struct SubsetMassOptions {
  int outer = 100;
  /// Total inner draws per outer draw, split into two equal half-batches.
  int inner = 100;
  bool antithetic = false;
  RunOptions run;
};

/// Unbiased estimate of E[E[sigma_u sigma_v | J_S]^2] = sum_{k within S} alpha_k^2.
/// Each outer draw fixes J_S; two independent half-batches of J_{S^c}
/// estimate the conditional mean and their product is averaged.
SubsetMassEstimate subset_mass(const GridGraph& graph, const TerminalPair& pair,
                               const EdgeSet& S, const SubsetMassOptions& options,
                               const StreamSeeder& seeder);

/// subset_mass with S = L; strict subsets of L carry no mass, so this
/// targets mu(L).
SubsetMassEstimate line_mass(const GridGraph& graph, const TerminalPair& pair,
                             const SubsetMassOptions& options, const StreamSeeder& seeder);

struct CensusEntry {
  MultiIndex k;
  double alpha = 0.0;
  double alpha_sq = 0.0;
  bool support_connects = false;
};

struct Census {
  std::vector<CensusEntry> entries;  // ordered by weight, then lexicographically
  double captured_mass = 0.0;
  int degree_cap = 0;
  int order = 0;
};

/// Quadrature coefficients of every multi-index with |k| <= D.
Census spectral_support_census(const GridGraph& graph, const TerminalPair& pair,
                               int degree_cap, int q);

struct IdentityRow {
  double t = 0.0;
  double mc_cov = 0.0;
  double mc_stderr = 0.0;
  double spectral_sum = 0.0;  // sum_{|k|<=D} alpha_k^2 e^{-|k| t}
  double tail_bound = 0.0;    // (1 - captured mass) e^{-(D+1) t}
  bool agrees = false;        // |mc - spectral| <= 3 stderr + tail
};

/// Monte Carlo covariance against the truncated spectral series.
std::vector<IdentityRow> decorrelation_identity_check(const GridGraph& graph,
                                                      const TerminalPair& pair,
                                                      const std::vector<double>& t_grid,
                                                      int degree_cap, int q, int replicas,
                                                      const StreamSeeder& seeder,
                                                      const RunOptions& options = {});

/// "(e:d)(e:d)..." compact form of a multi-index.
std::string describe(const MultiIndex& k);

}  // namespace ea
