#include "ea/ground_state.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>

namespace ea {

CouplingField::CouplingField(const GridGraph& graph)
    : n_cols_(graph.n_cols()),
      n_rows_(graph.n_rows()),
      values_(Eigen::VectorXd::Zero(graph.num_edges())) {}

CouplingField::CouplingField(const GridGraph& graph, Eigen::VectorXd values)
    : n_cols_(graph.n_cols()), n_rows_(graph.n_rows()), values_(std::move(values)) {
  if (values_.size() != graph.num_edges()) {
    throw std::invalid_argument("coupling count " + std::to_string(values_.size()) +
                                " does not match edge count " +
                                std::to_string(graph.num_edges()));
  }
}

CouplingField CouplingField::from_parts(const GridGraph& graph,
                                        const Eigen::VectorXd& magnitude,
                                        const Eigen::VectorXi& sign) {
  if (magnitude.size() != sign.size()) throw std::invalid_argument("part size mismatch");
  if ((magnitude.array() < 0).any()) throw std::invalid_argument("negative magnitude");
  return {graph, (magnitude.array() * sign.cast<double>().array()).matrix()};
}

Eigen::VectorXi CouplingField::signs() const {
  return values_.unaryExpr([](double v) { return v < 0 ? -1 : 1; });
}

// ---------------------------------------------------------------------------

SpinConfig::SpinConfig(const GridGraph& graph)
    : n_cols_(graph.n_cols()),
      n_rows_(graph.n_rows()),
      words_((static_cast<size_t>(graph.num_vertices()) + 63) / 64, 0) {}

SpinConfig::SpinConfig(const GridGraph& graph, std::span<const int> spins)
    : SpinConfig(graph) {
  if (static_cast<int>(spins.size()) != graph.num_vertices()) {
    throw std::invalid_argument("spin count does not match vertex count");
  }
  for (size_t w = 0; w < spins.size(); ++w) set(static_cast<int>(w), spins[w]);
}

void SpinConfig::set(int w, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("spin must be +1 or -1");
  const std::uint64_t bit = std::uint64_t{1} << (w & 63);
  auto& word = words_[static_cast<size_t>(w) >> 6];
  word = (s < 0) ? (word | bit) : (word & ~bit);
}

void SpinConfig::negate_all() {
  for (auto& w : words_) w = ~w;
  const int rem = size() & 63;
  if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

SpinConfig& SpinConfig::canonicalize() {
  if (spin(pinned_) < 0) negate_all();
  return *this;
}

SpinConfig SpinConfig::operator*(const SpinConfig& tau) const {
  if (tau.n_cols_ != n_cols_ || tau.n_rows_ != n_rows_) {
    throw std::invalid_argument("spin configurations on different grids");
  }
  SpinConfig out = *this;
  for (size_t i = 0; i < words_.size(); ++i) out.words_[i] ^= tau.words_[i];
  return out;
}

std::vector<int> SpinConfig::to_vector() const {
  std::vector<int> out(static_cast<size_t>(size()));
  for (int w = 0; w < size(); ++w) out[static_cast<size_t>(w)] = spin(w);
  return out;
}

// ---------------------------------------------------------------------------

double energy(const GridGraph& graph, const CouplingField& J, const SpinConfig& s) {
  if (!J.matches(graph) || !s.matches(graph)) {
    throw std::invalid_argument("energy: shape mismatch");
  }
  double h = 0.0;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    h += J[e] * s.spin(ed.a) * s.spin(ed.b);
  }
  return h;
}

namespace {

// Lexicographic order on spin bit-sets: the first differing vertex decides,
// with +1 (bit clear) ordered first.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t diff = a ^ b;
  if (diff == 0) return false;
  return (a & (diff & (~diff + 1))) == 0;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

GroundStateResult solve_enumeration(const GridGraph& graph, const CouplingField& J,
                                    int max_vertices) {
  if (!J.matches(graph)) throw std::invalid_argument("solve_enumeration: shape mismatch");
  const int nv = graph.num_vertices();
  if (nv > std::min(max_vertices, 62)) {
    throw SizingError("enumeration handles at most " + std::to_string(max_vertices) +
                      " vertices (got " + std::to_string(nv) +
                      "); use the transfer-matrix solver");
  }

  // Local fields f_w = sum over incident edges of J_e * sigma_other.
  std::vector<double> field(static_cast<size_t>(nv), 0.0);
  std::vector<int> sigma(static_cast<size_t>(nv), 1);
  double h = 0.0;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    h += J[e];
    field[static_cast<size_t>(ed.a)] += J[e];
    field[static_cast<size_t>(ed.b)] += J[e];
  }

  std::uint64_t mask = 0;
  std::uint64_t best_mask = 0;
  double best = h;
  double second = kNegInf;

  const std::uint64_t steps = std::uint64_t{1} << (nv - 1);
  for (std::uint64_t k = 1; k < steps; ++k) {
    const int w = std::countr_zero(k) + 1;
    const int s_old = sigma[static_cast<size_t>(w)];
    h -= 2.0 * s_old * field[static_cast<size_t>(w)];
    sigma[static_cast<size_t>(w)] = -s_old;
    mask ^= std::uint64_t{1} << w;
    for (int e : graph.incident(w)) {
      field[static_cast<size_t>(graph.other_end(e, w))] -= 2.0 * J[e] * s_old;
    }

    if (h > best || (h == best && lex_less(mask, best_mask))) {
      second = best;
      best = h;
      best_mask = mask;
    } else if (h > second) {
      second = h;
    }
  }

  GroundStateResult out;
  out.spins = SpinConfig(graph);
  for (int w = 0; w < nv; ++w) {
    if ((best_mask >> w) & 1U) out.spins.set(w, -1);
  }
  out.energy = energy(graph, J, out.spins);
  if (steps > 1) out.degeneracy_gap = best - second;
  return out;
}

namespace {

// table[d] = sum_r c_r * (1 - 2*bit_r(d)) for all d < 2^count.
void sign_sum_table(std::span<const double> c, std::vector<double>& table) {
  const size_t n = size_t{1} << c.size();
  table.resize(n);
  double base = 0.0;
  for (double v : c) base += v;
  table[0] = base;
  for (size_t d = 1; d < n; ++d) {
    table[d] = table[d & (d - 1)] - 2.0 * c[static_cast<size_t>(std::countr_zero(d))];
  }
}

}  // namespace

GroundStateResult solve_transfer_matrix(const GridGraph& graph, const CouplingField& J,
                                        int max_rows, bool track_gap) {
  if (!J.matches(graph)) throw std::invalid_argument("solve_transfer_matrix: shape mismatch");
  const int rows = graph.n_rows();
  const int cols = graph.n_cols();
  if (rows > std::min(max_rows, 24)) {
    throw SizingError("transfer matrix handles at most " + std::to_string(max_rows) +
                      " rows (got " + std::to_string(rows) + ")");
  }
  const size_t patterns = size_t{1} << rows;
  const std::uint32_t row_mask = static_cast<std::uint32_t>(patterns - 1);

  std::vector<double> coeff(static_cast<size_t>(rows));
  std::vector<double> inner_table;  // indexed by (p ^ p>>1) restricted to rows-1 bits
  std::vector<double> cross;        // indexed by p ^ q

  auto column_energy = [&](int x, std::vector<double>& out) {
    for (int r = 0; r + 1 < rows; ++r) {
      coeff[static_cast<size_t>(r)] = J[graph.vertical_edge(x, r + 1)];
    }
    sign_sum_table({coeff.data(), static_cast<size_t>(rows - 1)}, inner_table);
    out.resize(patterns);
    for (std::uint32_t p = 0; p < patterns; ++p) {
      out[p] = inner_table[(p ^ (p >> 1)) & (row_mask >> 1)];
    }
  };

  std::vector<double> vcol;
  std::vector<double> best(patterns, kNegInf);
  std::vector<double> second(patterns, kNegInf);
  std::vector<double> next_best(patterns);
  std::vector<double> next_second(patterns);
  std::vector<std::uint32_t> back(patterns * static_cast<size_t>(cols), 0);

  column_energy(1, vcol);
  for (std::uint32_t p = 0; p < patterns; p += 2) best[p] = vcol[p];  // pin (1,1)

  for (int x = 1; x < cols; ++x) {
    for (int r = 0; r < rows; ++r) {
      coeff[static_cast<size_t>(r)] = J[graph.horizontal_edge(x, r + 1)];
    }
    sign_sum_table(coeff, cross);
    column_energy(x + 1, vcol);
    std::uint32_t* back_col = back.data() + patterns * static_cast<size_t>(x);

    for (std::uint32_t q = 0; q < patterns; ++q) {
      double m1 = kNegInf;
      double m2 = kNegInf;
      std::uint32_t arg = 0;
      if (track_gap) {
        for (std::uint32_t p = 0; p < patterns; ++p) {
          const double val = best[p] + cross[p ^ q];
          if (val > m1) {
            m2 = m1;
            m1 = val;
            arg = p;
          } else if (val > m2) {
            m2 = val;
          }
        }
        next_second[q] = std::max(m2, second[arg] + cross[arg ^ q]) + vcol[q];
      } else {
        for (std::uint32_t p = 0; p < patterns; ++p) {
          const double val = best[p] + cross[p ^ q];
          if (val > m1) {
            m1 = val;
            arg = p;
          }
        }
      }
      next_best[q] = m1 + vcol[q];
      back_col[q] = arg;
    }
    best.swap(next_best);
    second.swap(next_second);
  }

  double top = kNegInf;
  double runner_up = kNegInf;
  std::uint32_t arg = 0;
  for (std::uint32_t q = 0; q < patterns; ++q) {
    if (best[q] > top) {
      runner_up = top;
      top = best[q];
      arg = q;
    } else if (best[q] > runner_up) {
      runner_up = best[q];
    }
  }

  GroundStateResult out;
  out.spins = SpinConfig(graph);
  std::uint32_t pattern = arg;
  for (int x = cols; x >= 1; --x) {
    for (int r = 0; r < rows; ++r) {
      if ((pattern >> r) & 1U) out.spins.set(graph.vertex_index({x, r + 1}), -1);
    }
    if (x > 1) pattern = back[patterns * static_cast<size_t>(x - 1) + pattern];
  }
  out.energy = energy(graph, J, out.spins);
  if (track_gap && graph.num_vertices() > 1) {
    out.degeneracy_gap = top - std::max(runner_up, second[arg]);
  }
  return out;
}

void check_solver_capable(const GridGraph& graph, const SolverOptions& options) {
  const bool tm = graph.n_rows() <= options.max_transfer_rows;
  const bool en = graph.num_vertices() <= options.max_enumeration_vertices;
  switch (options.kind) {
    case SolverKind::transfer_matrix:
      if (!tm) throw SizingError("grid has too many rows for the transfer-matrix solver");
      return;
    case SolverKind::enumeration:
      if (!en) throw SizingError("grid has too many vertices for enumeration");
      return;
    case SolverKind::automatic:
      if (!tm && !en) throw SizingError("no exact solver handles this grid");
      return;
  }
}

GroundStateResult solve(const GridGraph& graph, const CouplingField& J,
                        const SolverOptions& options) {
  check_solver_capable(graph, options);
  const bool use_tm = options.kind == SolverKind::transfer_matrix ||
                      (options.kind == SolverKind::automatic &&
                       graph.n_rows() <= options.max_transfer_rows);
  if (use_tm) {
    return solve_transfer_matrix(graph, J, options.max_transfer_rows, options.track_gap);
  }
  return solve_enumeration(graph, J, options.max_enumeration_vertices);
}

CouplingField gauge_transform(const GridGraph& graph, const CouplingField& J,
                              const SpinConfig& tau) {
  if (!J.matches(graph) || !tau.matches(graph)) {
    throw std::invalid_argument("gauge_transform: shape mismatch");
  }
  CouplingField out = J;
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    if (tau.spin(ed.a) * tau.spin(ed.b) < 0) out[e] = -J[e];
  }
  return out;
}

CouplingField flip_cutset(const CouplingField& J, const EdgeSet& C) {
  if (C.universe() != J.size()) throw std::invalid_argument("flip_cutset: shape mismatch");
  CouplingField out = J;
  C.for_each([&](int e) { out[e] = -out[e]; });
  return out;
}

}  // namespace ea
