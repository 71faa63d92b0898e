#include "ea/hermite.hpp"

#include <numbers>

namespace ea {

double ou_kernel(int k, int m, double t) {
  if (t < 0) throw std::invalid_argument("ou_kernel: negative time");
  if (k < 0 || m < 0) throw std::invalid_argument("ou_kernel: negative degree");
  return k == m ? std::exp(-k * t) : 0.0;
}

namespace {

// Gauss-Legendre rule on [-1, 1].
QuadratureRule<double> legendre_rule(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return gauss_from_jacobi<double>(diag, off, 2.0);
}

// Recurrence coefficients of the half-normal density 2*phi(x) on (0, inf),
// by the Stieltjes procedure on a composite Gauss-Legendre discretisation.
// The density is below 1e-86 past x = 20, so truncating there is exact in
// double precision.
void half_normal_recurrence(int n, Eigen::VectorXd& diag, Eigen::VectorXd& off) {
  constexpr int kPanels = 200;
  constexpr int kPerPanel = 20;
  constexpr double kUpper = 20.0;
  const QuadratureRule<double> gl = legendre_rule(kPerPanel);
  const int m = kPanels * kPerPanel;
  Eigen::VectorXd x(m);
  Eigen::VectorXd w(m);
  const double h = kUpper / kPanels;
  const double norm = 2.0 / std::sqrt(2.0 * std::numbers::pi);
  for (int p = 0; p < kPanels; ++p) {
    for (int i = 0; i < kPerPanel; ++i) {
      const int j = p * kPerPanel + i;
      x[j] = h * (p + 0.5 * (gl.nodes[i] + 1.0));
      w[j] = 0.5 * h * gl.weights[i] * norm * std::exp(-0.5 * x[j] * x[j]);
    }
  }

  diag.resize(n);
  off.resize(std::max(n - 1, 0));
  // Orthonormal polynomial values at the discretisation points.
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd cur = Eigen::VectorXd::Constant(m, 1.0 / std::sqrt(w.sum()));
  double beta_prev = 0.0;
  for (int k = 0; k < n; ++k) {
    const double alpha = (w.array() * x.array() * cur.array().square()).sum();
    diag[k] = alpha;
    if (k + 1 == n) break;
    Eigen::VectorXd next =
        ((x.array() - alpha) * cur.array() - beta_prev * prev.array()).matrix();
    const double beta = std::sqrt((w.array() * next.array().square()).sum());
    off[k] = beta;
    next /= beta;
    prev = std::move(cur);
    cur = std::move(next);
    beta_prev = beta;
  }
}

}  // namespace

QuadratureRule<double> split_quadrature_rule(int q) {
  if (q < 1 || q > kMaxQuadratureOrder) {
    throw std::invalid_argument("quadrature order must lie in [1, 64]");
  }
  const int half = (q + 1) / 2;
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
  half_normal_recurrence(half, diag, off);
  const QuadratureRule<double> positive = gauss_from_jacobi<double>(diag, off, 1.0);

  QuadratureRule<double> rule;
  rule.nodes.resize(2 * half);
  rule.weights.resize(2 * half);
  for (int i = 0; i < half; ++i) {
    rule.nodes[half - 1 - i] = -positive.nodes[i];
    rule.nodes[half + i] = positive.nodes[i];
    rule.weights[half - 1 - i] = rule.weights[half + i] = 0.5 * positive.weights[i];
  }
  return rule;
}

MultiIndex::MultiIndex(int num_edges,
                       std::initializer_list<std::pair<const int, int>> entries)
    : num_edges_(num_edges) {
  for (const auto& [e, d] : entries) set(e, d);
}

void MultiIndex::set(int e, int degree) {
  if (e < 0 || e >= num_edges_) throw std::out_of_range("multi-index edge out of range");
  if (degree < 0) throw std::invalid_argument("negative multi-index degree");
  weight_ -= this->degree(e);
  if (degree == 0) {
    entries_.erase(e);
  } else {
    entries_[e] = degree;
    weight_ += degree;
  }
}

EdgeSet MultiIndex::support() const {
  EdgeSet s(num_edges_);
  for (const auto& [e, d] : entries_) s.insert(e);
  return s;
}

double hermite_tensor_eval(const MultiIndex& k, const CouplingField& J) {
  if (k.num_edges() != J.size()) throw std::invalid_argument("multi-index shape mismatch");
  double prod = 1.0;
  for (const auto& [e, d] : k.entries()) prod *= hermite_eval(d, J[e]);
  return prod;
}

}  // namespace ea
