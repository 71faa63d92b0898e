#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ea/ground_state.hpp"
#include "ea/lattice.hpp"

namespace ea {

/// Orthonormal probabilists' Hermite polynomial h_k at x, by the recurrence
/// h_{k+1} = (x h_k - sqrt(k) h_{k-1}) / sqrt(k+1).
template <typename Scalar>
Scalar hermite_eval(int k, Scalar x) {
  if (k < 0) throw std::invalid_argument("hermite degree must be nonnegative");
  using std::sqrt;
  Scalar prev(0);
  Scalar cur(1);
  for (int j = 0; j < k; ++j) {
    Scalar next = (x * cur - sqrt(Scalar(j)) * prev) / sqrt(Scalar(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

/// h_0(x) .. h_kmax(x).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> hermite_all(int kmax, Scalar x) {
  using std::sqrt;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> h(kmax + 1);
  h[0] = Scalar(1);
  if (kmax >= 1) h[1] = x;
  for (int j = 1; j < kmax; ++j) {
    h[j + 1] = (x * h[j] - sqrt(Scalar(j)) * h[j - 1]) / sqrt(Scalar(j + 1));
  }
  return h;
}

/// E[h_k(X_0) h_m(X_t)] for a stationary Ornstein-Uhlenbeck pair.
double ou_kernel(int k, int m, double t);

/// Nodes and weights for integrals against a probability density.
template <typename Scalar>
struct QuadratureRule {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector nodes;
  Vector weights;

  int size() const { return static_cast<int>(nodes.size()); }

  template <typename Fn>
  Scalar integrate(Fn&& fn) const {
    Scalar acc(0);
    for (int i = 0; i < size(); ++i) acc += weights[i] * fn(nodes[i]);
    return acc;
  }
};

/// Golub-Welsch: Gauss rule of the measure whose orthonormal polynomials
/// have Jacobi matrix tridiag(offdiag, diag, offdiag) and total mass mu0.
template <typename Scalar>
QuadratureRule<Scalar> gauss_from_jacobi(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
                                         const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& offdiag,
                                         Scalar mu0) {
  const Eigen::Index n = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> jacobi =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
  jacobi.diagonal() = diag;
  if (n > 1) {
    jacobi.diagonal(1) = offdiag;
    jacobi.diagonal(-1) = offdiag;
  }
  Eigen::SelfAdjointEigenSolver<decltype(jacobi)> solver(jacobi);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Jacobi eigensolve failed");
  QuadratureRule<Scalar> rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = (mu0 * solver.eigenvectors().row(0).transpose().array().square()).matrix();
  return rule;
}

inline constexpr int kMaxQuadratureOrder = 64;

/// q-point Gauss-Hermite rule for the standard Gaussian density.
template <typename Scalar = double>
QuadratureRule<Scalar> quadrature_rule(int q) {
  if (q < 1 || q > kMaxQuadratureOrder) {
    throw std::invalid_argument("quadrature order must lie in [1, 64]");
  }
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector diag = Vector::Zero(q);
  Vector off(std::max(q - 1, 0));
  for (int k = 1; k < q; ++k) off[k - 1] = std::sqrt(Scalar(k));
  QuadratureRule<Scalar> rule = gauss_from_jacobi<Scalar>(diag, off, Scalar(1));
  // Exact symmetry about 0: average mirrored pairs.
  for (int i = 0; i < q / 2; ++i) {
    const int j = q - 1 - i;
    const Scalar x = (rule.nodes[j] - rule.nodes[i]) / 2;
    const Scalar w = (rule.weights[i] + rule.weights[j]) / 2;
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = Scalar(0);
  rule.weights /= rule.weights.sum();
  return rule;
}

/// Symmetric rule for the standard Gaussian built from two mirrored Gauss
/// rules of the half-normal density, ceil(q/2) nodes per half-line. Exact
/// for f(x) = p(x) and f(x) = sign(x) p(x) with deg p < 2*ceil(q/2), which
/// is what coefficient integrals of sign-valued functions need.
QuadratureRule<double> split_quadrature_rule(int q);

/// Sparse multi-index over edges: edge -> degree >= 1.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int num_edges) : num_edges_(num_edges) {}
  MultiIndex(int num_edges, std::initializer_list<std::pair<const int, int>> entries);

  int num_edges() const { return num_edges_; }
  /// Sets k_e; a zero degree removes the entry.
  void set(int e, int degree);
  int degree(int e) const {
    auto it = entries_.find(e);
    return it == entries_.end() ? 0 : it->second;
  }
  int weight() const { return weight_; }
  EdgeSet support() const;
  const std::map<int, int>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  int num_edges_ = 0;
  int weight_ = 0;
  std::map<int, int> entries_;
};

/// prod_e h_{k_e}(J_e) over the support of k.
double hermite_tensor_eval(const MultiIndex& k, const CouplingField& J);

}  // namespace ea
