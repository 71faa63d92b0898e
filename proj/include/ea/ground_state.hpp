#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ea/lattice.hpp"

namespace ea {

/// One real coupling per edge of a grid.
class CouplingField {
 public:
  CouplingField() = default;
  explicit CouplingField(const GridGraph& graph);
  CouplingField(const GridGraph& graph, Eigen::VectorXd values);

  /// J_e = sign_e * magnitude_e.
  static CouplingField from_parts(const GridGraph& graph,
                                  const Eigen::VectorXd& magnitude,
                                  const Eigen::VectorXi& sign);

  int n_cols() const { return n_cols_; }
  int n_rows() const { return n_rows_; }
  int size() const { return static_cast<int>(values_.size()); }
  bool matches(const GridGraph& graph) const {
    return graph.n_cols() == n_cols_ && graph.n_rows() == n_rows_;
  }

  double operator[](int e) const { return values_[e]; }
  double& operator[](int e) { return values_[e]; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  Eigen::VectorXd magnitudes() const { return values_.cwiseAbs(); }
  /// +1 for J_e >= 0, -1 otherwise.
  Eigen::VectorXi signs() const;

  friend bool operator==(const CouplingField& a, const CouplingField& b) {
    return a.n_cols_ == b.n_cols_ && a.n_rows_ == b.n_rows_ &&
           a.values_ == b.values_;
  }

 private:
  int n_cols_ = 0;
  int n_rows_ = 0;
  Eigen::VectorXd values_;
};

/// I.i.d. standard Gaussian couplings, drawn in edge order.
template <typename URBG>
CouplingField gaussian_field(const GridGraph& graph, URBG& rng) {
  std::normal_distribution<double> normal;
  CouplingField J(graph);
  for (int e = 0; e < J.size(); ++e) J[e] = normal(rng);
  return J;
}

/// One +-1 spin per vertex, packed one bit per vertex (bit set = spin -1).
class SpinConfig {
 public:
  SpinConfig() = default;
  /// All spins +1, pinned at vertex 0.
  explicit SpinConfig(const GridGraph& graph);
  SpinConfig(const GridGraph& graph, std::span<const int> spins);

  int n_cols() const { return n_cols_; }
  int n_rows() const { return n_rows_; }
  int size() const { return n_cols_ * n_rows_; }
  bool matches(const GridGraph& graph) const {
    return graph.n_cols() == n_cols_ && graph.n_rows() == n_rows_;
  }

  int spin(int w) const {
    return ((words_[static_cast<size_t>(w) >> 6] >> (w & 63)) & 1U) ? -1 : 1;
  }
  void set(int w, int s);
  void flip(int w) { words_[static_cast<size_t>(w) >> 6] ^= std::uint64_t{1} << (w & 63); }
  void negate_all();

  /// Vertex whose spin is fixed to +1 by `canonicalize`.
  int pinned() const { return pinned_; }
  /// Global flip so that the pinned vertex carries +1.
  SpinConfig& canonicalize();
  SpinConfig canonical() const {
    SpinConfig s = *this;
    return s.canonicalize();
  }

  /// Pointwise product tau * sigma.
  SpinConfig operator*(const SpinConfig& tau) const;

  std::vector<int> to_vector() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  friend bool operator==(const SpinConfig& a, const SpinConfig& b) {
    return a.n_cols_ == b.n_cols_ && a.n_rows_ == b.n_rows_ && a.words_ == b.words_;
  }

 private:
  int n_cols_ = 0;
  int n_rows_ = 0;
  int pinned_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Energy margins below this are reported as near-ties.
inline constexpr double kNearTieGap = 1e-12;

struct GroundStateResult {
  SpinConfig spins;
  double energy = 0.0;
  /// Margin to the best configuration not equivalent under the global flip.
  std::optional<double> degeneracy_gap;

  bool near_tie() const { return degeneracy_gap && *degeneracy_gap < kNearTieGap; }
};

enum class SolverKind { automatic, enumeration, transfer_matrix };

struct SolverOptions {
  SolverKind kind = SolverKind::automatic;
  int max_enumeration_vertices = 26;
  int max_transfer_rows = 14;
  /// Transfer matrix only: also track the runner-up to report a gap.
  bool track_gap = false;
};

/// H(sigma) = sum_e J_e sigma_a sigma_b, summed in edge order.
double energy(const GridGraph& graph, const CouplingField& J, const SpinConfig& s);

/// Exhaustive maximisation over configurations with vertex 0 pinned to +1,
/// visited in Gray-code order with incremental energy updates.
GroundStateResult solve_enumeration(const GridGraph& graph, const CouplingField& J,
                                    int max_vertices = 26);

/// Column-by-column Viterbi recursion over per-column spin patterns.
GroundStateResult solve_transfer_matrix(const GridGraph& graph, const CouplingField& J,
                                        int max_rows = 14, bool track_gap = false);

/// Picks the transfer matrix when the row count allows it, enumeration
/// otherwise (or as requested).
GroundStateResult solve(const GridGraph& graph, const CouplingField& J,
                        const SolverOptions& options = {});

/// Throws SizingError if `options` cannot handle the graph.
void check_solver_capable(const GridGraph& graph, const SolverOptions& options);

/// J^tau_(a,b) = tau_a J_(a,b) tau_b.
CouplingField gauge_transform(const GridGraph& graph, const CouplingField& J,
                              const SpinConfig& tau);

/// Negates the couplings on C.
CouplingField flip_cutset(const CouplingField& J, const EdgeSet& C);

/// sigma_u * sigma_v.
inline int relative_spin(const GridGraph& graph, const SpinConfig& s,
                         const TerminalPair& pair) {
  return s.spin(graph.vertex_index(pair.u)) * s.spin(graph.vertex_index(pair.v));
}

}  // namespace ea
