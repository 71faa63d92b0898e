#pragma once

#include <array>
#include <random>
#include <vector>

#include "ea/ground_state.hpp"
#include "ea/lattice.hpp"
#include "ea/rng.hpp"

namespace ea {

/// Local barrier around a horizontal edge e: a 3-row band on e's row,
/// 5 edges wide. The ten boundary vertices of the inner 3x2-cell box are
/// joined by nine strong (`high`) edges; every other edge touching the box
/// boundary is weak (`low`). Under the gap condition the ground state
/// satisfies every strong edge, so sigma_u sigma_v cannot depend on J_e.
struct BarrierSpec {
  int center_edge = -1;
  EdgeSet low_edges;
  EdgeSet high_edges;
  double low_threshold = 1.0;
  double high_threshold = 100.0;
  /// w_1 .. w_10: top-right corner of the box, then anti-clockwise.
  std::array<int, 10> boundary_walk{};
  /// Edge (w_i, w_{i+1}) for i = 1..9; these are exactly the high edges.
  std::array<int, 9> walk_edges{};

  /// 2h - 2 |Low| l; the barrier forces the boundary spins when positive.
  double gap_margin() const {
    return 2.0 * high_threshold - 2.0 * low_edges.size() * low_threshold;
  }
  bool gap_condition() const { return gap_margin() > 0; }
};

inline constexpr int kBarrierWidth = 5;

/// Instantiates the template around horizontal edge e. Throws GeometryError
/// if e is vertical, the template leaves the grid, or u or v lies within
/// graph distance 1 of e (equivalently, on the barrier box).
BarrierSpec build_barrier_spec(const GridGraph& graph, int e, const TerminalPair& pair,
                               double low_threshold = 1.0, double high_threshold = 100.0);

/// Horizontal edges of L around which the template fits.
std::vector<int> barrier_sites(const GridGraph& graph, const TerminalPair& pair);

/// Whether |J| meets the Low/High constraints of `spec`.
bool barrier_holds(const BarrierSpec& spec, const CouplingField& J);

/// Rewrites magnitudes on Low (uniform in (0, l)) and High (uniform in
/// (h, h+1)) with uniform random signs; other edges, including e, keep
/// their base values.
CouplingField sample_barrier_couplings(const BarrierSpec& spec, const CouplingField& base,
                                       std::mt19937_64& rng);

struct BarrierReport {
  GroundStateResult plus;   // ground state for J
  GroundStateResult minus;  // ground state with J_e negated
  int relative_plus = 0;
  int relative_minus = 0;
  bool walk_positive_plus = false;
  bool walk_positive_minus = false;

  bool passed() const {
    return relative_plus == relative_minus && walk_positive_plus && walk_positive_minus;
  }
};

/// Solves J and J with J_e negated and checks that sigma_u sigma_v agrees and
/// that sigma_{w_i} sigma_{w_{i+1}} J_(w_i,w_{i+1}) > 0 along the walk.
BarrierReport verify_barrier_obliviousness(const GridGraph& graph, const TerminalPair& pair,
                                           const CouplingField& J, const BarrierSpec& spec,
                                           const SolverOptions& solver = {});

/// sigma_{w_i} sigma_{w_{i+1}} J_(w_i,w_{i+1}) > 0 for all nine walk edges.
bool walk_positive(const GridGraph& graph, const BarrierSpec& spec, const CouplingField& J,
                   const SpinConfig& s);

/// Flips every edge of the vertical cutset through e except e itself and
/// checks that sigma_u sigma_v changes sign. Returns the pair of relative
/// spins (original, flipped).
std::pair<int, int> flip_all_but_center(const GridGraph& graph, const TerminalPair& pair,
                                        const CouplingField& J, const BarrierSpec& spec,
                                        const SolverOptions& solver = {});

/// log of P(|N(0,1)| >= x), accurate far into the tail.
double log_gaussian_two_sided_tail(double x);

struct BarrierProbability {
  double log_p = 0.0;    // natural log of P(Barrier(e))
  double log10_p = 0.0;
  int templates = 0;     // disjoint placements along L
  double log_failure = 0.0;  // templates * log(1 - p): log P(no barrier on L)
};

/// Exact product of per-edge Gaussian probabilities for one template, and
/// the Good-event failure bound from disjoint templates along L.
BarrierProbability barrier_probability(const BarrierSpec& spec, int disjoint_templates = 1);

/// Number of pairwise edge-disjoint templates centred on L (stride W).
int disjoint_barrier_count(const GridGraph& graph, const TerminalPair& pair);

/// L together with every edge sharing a vertex with L.
EdgeSet line_neighbourhood(const GridGraph& graph, const TerminalPair& pair);

/// J_e in (100, 101) on L, |J_e| < 1/n_cols on the rest of the neighbourhood
/// of L, standard Gaussian elsewhere.
CouplingField build_lower_bound_field(const GridGraph& graph, const TerminalPair& pair,
                                      std::mt19937_64& rng);

struct LowerBoundReport {
  int relative_spin = 0;
  int resamples = 0;
  int agreeing = 0;  // exterior resamples with sigma_u sigma_v equal to +1
  bool line_aligned = false;  // every vertex on L carries sigma_u

  bool passed() const { return relative_spin == 1 && agreeing == resamples && line_aligned; }
};

/// Solves the field, then redraws every coupling outside the neighbourhood
/// of L `resamples` times (streams {instance, i, exterior}).
LowerBoundReport check_lower_bound(const GridGraph& graph, const TerminalPair& pair,
                                   const CouplingField& J, int resamples, std::uint64_t instance,
                                   const StreamSeeder& seeder, const SolverOptions& solver = {});

// --- straight columns ------------------------------------------------------

/// Column j (1-based) covers vertex columns [1 + (j-1)W, 1 + jW). It owns the
/// horizontal edges whose left end lies in that range and the vertical
/// edges strictly inside it; vertical edges on the boundary lines belong to
/// no column.
struct ColumnClass {
  int width = kBarrierWidth;
  int num_columns = 0;
  std::vector<int> straight;  // J: straight column labels, increasing
  std::vector<int> rows;      // Y: row of the straight segment of each
  double straight_fraction() const {
    return num_columns == 0 ? 0.0 : static_cast<double>(straight.size()) / num_columns;
  }
};

/// Requires W to divide n_cols - 1 (the number of horizontal steps).
ColumnClass straight_columns(const GridGraph& graph, const EdgeSet& S, int width = kBarrierWidth);

/// S_G: straight segments, every edge of each non-straight column (both
/// boundary lines included), and all vertical edges on column boundaries.
EdgeSet envelope(const GridGraph& graph, const ColumnClass& cls);

/// Random u-v path with at most floor(eps n) non-rightward steps plus random
/// extra edges, of total size at most floor((1 + eps) n), n = |v.x - u.x|.
EdgeSet sample_short_connecting_set(const GridGraph& graph, const TerminalPair& pair,
                                    double epsilon, std::mt19937_64& rng);

struct StraightBoundReport {
  int samples = 0;
  int bound_violations = 0;
  int containment_violations = 0;
  double min_fraction = 1.0;
  double bound = 0.0;  // 1 - eps W
  std::vector<EdgeSet> counterexamples;

  bool passed() const { return bound_violations == 0 && containment_violations == 0; }
};

StraightBoundReport straight_fraction_bound_check(const GridGraph& graph,
                                                  const std::vector<EdgeSet>& samples,
                                                  int width, double epsilon);

}  // namespace ea
