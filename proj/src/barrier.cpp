#include "ea/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ea {

namespace {

struct Offset {
  int dx;
  int dy;
};
struct TemplateEdge {
  Offset a;
  Offset b;
};

// Barrier template in figure coordinates: e = (2,0)-(3,0), the box spans
// x in [1,4], y in [-1,1]. Transcribed edge by edge from the drawing.
const std::vector<TemplateEdge>& low_template() {
  static const std::vector<TemplateEdge> edges = [] {
    std::vector<TemplateEdge> out;
    // central axis inside the box, either side of e
    out.push_back({{1, 0}, {2, 0}});
    out.push_back({{3, 0}, {4, 0}});
    // verticals leaving the top and bottom sides
    for (int x = 1; x <= 4; ++x) {
      out.push_back({{x, 1}, {x, 2}});
      out.push_back({{x, -2}, {x, -1}});
    }
    // horizontals leaving the left and right sides
    for (int y = -1; y <= 1; ++y) {
      out.push_back({{0, y}, {1, y}});
      out.push_back({{4, y}, {5, y}});
    }
    // the one weak boundary edge, between w_10 and w_1
    out.push_back({{4, 0}, {4, 1}});
    // verticals from e's endpoints to the box
    out.push_back({{2, 0}, {2, 1}});
    out.push_back({{3, 0}, {3, 1}});
    out.push_back({{2, -1}, {2, 0}});
    out.push_back({{3, -1}, {3, 0}});
    return out;
  }();
  return edges;
}

// w_1 .. w_10, anti-clockwise from the top-right corner.
constexpr std::array<Offset, 10> kWalk = {{{4, 1}, {3, 1}, {2, 1}, {1, 1}, {1, 0},
                                           {1, -1}, {2, -1}, {3, -1}, {4, -1}, {4, 0}}};

int manhattan(Vertex a, Vertex b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

}  // namespace

BarrierSpec build_barrier_spec(const GridGraph& graph, int e, const TerminalPair& pair,
                               double low_threshold, double high_threshold) {
  if (e < 0 || e >= graph.num_edges()) throw GeometryError("barrier edge out of range");
  if (!(low_threshold > 0) || !(high_threshold > 0)) {
    throw std::invalid_argument("barrier thresholds must be positive");
  }
  const Edge& ed = graph.edge(e);
  if (!ed.horizontal) throw GeometryError("barrier centre must be a horizontal edge");
  const Vertex left = graph.vertex(ed.a);
  const Vertex right = graph.vertex(ed.b);
  const int x0 = left.x - 2;
  const int y0 = left.y;
  auto place = [&](Offset o) -> Vertex { return {x0 + o.dx, y0 + o.dy}; };

  if (!graph.contains(place({0, -2})) || !graph.contains(place({5, 2}))) {
    throw GeometryError("barrier template does not fit inside the grid");
  }
  for (const Vertex& t : {pair.u, pair.v}) {
    const int d = std::min(manhattan(t, left), manhattan(t, right));
    const bool in_box = t.x >= x0 + 1 && t.x <= x0 + 4 && t.y >= y0 - 1 && t.y <= y0 + 1;
    if (d < 2 || in_box) {
      throw GeometryError("barrier edge too close to a terminal (distance " +
                          std::to_string(d) + ")");
    }
  }

  BarrierSpec spec;
  spec.center_edge = e;
  spec.low_threshold = low_threshold;
  spec.high_threshold = high_threshold;
  spec.low_edges = EdgeSet(graph.num_edges());
  spec.high_edges = EdgeSet(graph.num_edges());
  for (const TemplateEdge& t : low_template()) {
    spec.low_edges.insert(graph.edge_between(place(t.a), place(t.b)));
  }
  for (size_t i = 0; i < kWalk.size(); ++i) {
    spec.boundary_walk[i] = graph.vertex_index(place(kWalk[i]));
  }
  for (size_t i = 0; i + 1 < kWalk.size(); ++i) {
    spec.walk_edges[i] = graph.edge_between(place(kWalk[i]), place(kWalk[i + 1]));
    spec.high_edges.insert(spec.walk_edges[i]);
  }
  return spec;
}

std::vector<int> barrier_sites(const GridGraph& graph, const TerminalPair& pair) {
  std::vector<int> sites;
  line_L(graph, pair).for_each([&](int e) {
    try {
      build_barrier_spec(graph, e, pair);
      sites.push_back(e);
    } catch (const GeometryError&) {
    }
  });
  return sites;
}

bool barrier_holds(const BarrierSpec& spec, const CouplingField& J) {
  bool ok = true;
  spec.low_edges.for_each([&](int f) { ok = ok && std::abs(J[f]) <= spec.low_threshold; });
  spec.high_edges.for_each([&](int f) { ok = ok && std::abs(J[f]) > spec.high_threshold; });
  return ok;
}

CouplingField sample_barrier_couplings(const BarrierSpec& spec, const CouplingField& base,
                                       std::mt19937_64& rng) {
  if (spec.low_edges.universe() != base.size()) {
    throw std::invalid_argument("barrier spec and couplings on different grids");
  }
  CouplingField out = base;
  std::uniform_real_distribution<double> low(0.0, spec.low_threshold);
  std::uniform_real_distribution<double> high(spec.high_threshold, spec.high_threshold + 1.0);
  std::bernoulli_distribution coin(0.5);
  spec.low_edges.for_each([&](int f) {
    const double m = low(rng);
    out[f] = coin(rng) ? m : -m;
  });
  spec.high_edges.for_each([&](int f) {
    // nextafter keeps the draw strictly above h
    const double m = std::max(high(rng), std::nextafter(spec.high_threshold, HUGE_VAL));
    out[f] = coin(rng) ? m : -m;
  });
  return out;
}

bool walk_positive(const GridGraph& graph, const BarrierSpec& spec, const CouplingField& J,
                   const SpinConfig& s) {
  (void)graph;
  for (size_t i = 0; i < spec.walk_edges.size(); ++i) {
    const int a = spec.boundary_walk[i];
    const int b = spec.boundary_walk[i + 1];
    if (!(s.spin(a) * s.spin(b) * J[spec.walk_edges[i]] > 0)) return false;
  }
  return true;
}

BarrierReport verify_barrier_obliviousness(const GridGraph& graph, const TerminalPair& pair,
                                           const CouplingField& J, const BarrierSpec& spec,
                                           const SolverOptions& solver) {
  BarrierReport r;
  CouplingField flipped = J;
  flipped[spec.center_edge] = -J[spec.center_edge];
  r.plus = solve(graph, J, solver);
  r.minus = solve(graph, flipped, solver);
  r.relative_plus = relative_spin(graph, r.plus.spins, pair);
  r.relative_minus = relative_spin(graph, r.minus.spins, pair);
  r.walk_positive_plus = walk_positive(graph, spec, J, r.plus.spins);
  r.walk_positive_minus = walk_positive(graph, spec, flipped, r.minus.spins);
  return r;
}

std::pair<int, int> flip_all_but_center(const GridGraph& graph, const TerminalPair& pair,
                                        const CouplingField& J, const BarrierSpec& spec,
                                        const SolverOptions& solver) {
  const Edge& ed = graph.edge(spec.center_edge);
  EdgeSet C = vertical_cutset(graph, graph.vertex(ed.a).x);
  C.erase(spec.center_edge);
  const GroundStateResult g = solve(graph, J, solver);
  const GroundStateResult h = solve(graph, flip_cutset(J, C), solver);
  return {relative_spin(graph, g.spins, pair), relative_spin(graph, h.spins, pair)};
}

double log_gaussian_two_sided_tail(double x) {
  if (x < 0) throw std::invalid_argument("tail threshold must be nonnegative");
  const double z = x / std::numbers::sqrt2;
  if (z < 25.0) return std::log(std::erfc(z));
  // erfc(z) = exp(-z^2) / (z sqrt(pi)) * sum_n (-1)^n (2n-1)!! / (2 z^2)^n
  double term = 1.0;
  double series = 1.0;
  for (int n = 1; n <= 12; ++n) {
    term *= -(2.0 * n - 1.0) / (2.0 * z * z);
    series += term;
  }
  return -z * z - std::log(z * std::sqrt(std::numbers::pi)) + std::log(series);
}

BarrierProbability barrier_probability(const BarrierSpec& spec, int disjoint_templates) {
  BarrierProbability out;
  const double log_low = std::log(std::erf(spec.low_threshold / std::numbers::sqrt2));
  const double log_high = log_gaussian_two_sided_tail(spec.high_threshold);
  out.log_p = spec.low_edges.size() * log_low + spec.high_edges.size() * log_high;
  out.log10_p = out.log_p / std::numbers::ln10;
  out.templates = disjoint_templates;
  out.log_failure = disjoint_templates * std::log1p(-std::exp(out.log_p));
  return out;
}

int disjoint_barrier_count(const GridGraph& graph, const TerminalPair& pair) {
  const std::vector<int> sites = barrier_sites(graph, pair);
  int count = 0;
  int last_x = -1000;
  for (int e : sites) {
    const int x = graph.vertex(graph.edge(e).a).x;
    if (x - last_x >= kBarrierWidth) {
      ++count;
      last_x = x;
    }
  }
  return count;
}

EdgeSet line_neighbourhood(const GridGraph& graph, const TerminalPair& pair) {
  const EdgeSet L = line_L(graph, pair);
  EdgeSet out = L;
  L.for_each([&](int e) {
    const Edge& ed = graph.edge(e);
    for (int w : {ed.a, ed.b}) {
      for (int f : graph.incident(w)) out.insert(f);
    }
  });
  return out;
}

CouplingField build_lower_bound_field(const GridGraph& graph, const TerminalPair& pair,
                                      std::mt19937_64& rng) {
  const EdgeSet L = line_L(graph, pair);
  const EdgeSet hat = line_neighbourhood(graph, pair);
  const double small = 1.0 / graph.n_cols();
  std::uniform_real_distribution<double> strong(100.0, 101.0);
  std::uniform_real_distribution<double> weak(-small, small);
  std::normal_distribution<double> normal;
  CouplingField J(graph);
  for (int e = 0; e < graph.num_edges(); ++e) {
    if (L.contains(e)) {
      J[e] = std::max(strong(rng), std::nextafter(100.0, HUGE_VAL));
    } else if (hat.contains(e)) {
      J[e] = weak(rng);
    } else {
      J[e] = normal(rng);
    }
  }
  return J;
}

LowerBoundReport check_lower_bound(const GridGraph& graph, const TerminalPair& pair,
                                   const CouplingField& J, int resamples, std::uint64_t instance,
                                   const StreamSeeder& seeder, const SolverOptions& solver) {
  LowerBoundReport r;
  const GroundStateResult g = solve(graph, J, solver);
  r.relative_spin = relative_spin(graph, g.spins, pair);
  const EdgeSet L = line_L(graph, pair);
  const int su = g.spins.spin(graph.vertex_index(pair.u));
  r.line_aligned = true;
  L.for_each([&](int e) {
    const Edge& ed = graph.edge(e);
    r.line_aligned = r.line_aligned && g.spins.spin(ed.a) == su && g.spins.spin(ed.b) == su;
  });

  const std::vector<int> exterior = (~line_neighbourhood(graph, pair)).indices();
  r.resamples = resamples;
  CouplingField K = J;
  std::normal_distribution<double> normal;
  for (int i = 0; i < resamples; ++i) {
    auto rng = seeder.engine({instance, static_cast<std::uint64_t>(i), tag(Stream::exterior)});
    for (int e : exterior) K[e] = normal(rng);
    const GroundStateResult h = solve(graph, K, solver);
    if (relative_spin(graph, h.spins, pair) == 1) ++r.agreeing;
  }
  return r;
}

// --- straight columns ------------------------------------------------------

namespace {

int column_count(const GridGraph& graph, int width) {
  if (width < 1) throw std::invalid_argument("column width must be positive");
  const int steps = graph.n_cols() - 1;
  if (steps < 1 || steps % width != 0) {
    throw std::invalid_argument("column width " + std::to_string(width) +
                                " must divide the " + std::to_string(steps) +
                                " horizontal steps of the grid");
  }
  return steps / width;
}

}  // namespace

ColumnClass straight_columns(const GridGraph& graph, const EdgeSet& S, int width) {
  ColumnClass cls;
  cls.width = width;
  cls.num_columns = column_count(graph, width);
  for (int j = 1; j <= cls.num_columns; ++j) {
    const int start = 1 + (j - 1) * width;
    int count = 0;
    int vertical = 0;
    int row = -1;
    bool one_row = true;
    for (int y = 1; y <= graph.n_rows(); ++y) {
      for (int x = start; x < start + width; ++x) {
        if (S.contains(graph.horizontal_edge(x, y))) {
          ++count;
          if (row == -1) row = y;
          one_row = one_row && row == y;
        }
      }
      if (y < graph.n_rows()) {
        for (int x = start + 1; x < start + width; ++x) {
          if (S.contains(graph.vertical_edge(x, y))) ++vertical;
        }
      }
    }
    if (vertical == 0 && count == width && one_row) {
      cls.straight.push_back(j);
      cls.rows.push_back(row);
    }
  }
  return cls;
}

EdgeSet envelope(const GridGraph& graph, const ColumnClass& cls) {
  const int W = cls.width;
  if (column_count(graph, W) != cls.num_columns) {
    throw std::invalid_argument("column class does not match the grid");
  }
  EdgeSet out(graph.num_edges());
  size_t next = 0;
  for (int j = 1; j <= cls.num_columns; ++j) {
    const int start = 1 + (j - 1) * W;
    const bool straight = next < cls.straight.size() && cls.straight[next] == j;
    if (straight) {
      for (int x = start; x < start + W; ++x) {
        out.insert(graph.horizontal_edge(x, cls.rows[next]));
      }
      ++next;
    } else {
      for (int y = 1; y <= graph.n_rows(); ++y) {
        for (int x = start; x < start + W; ++x) out.insert(graph.horizontal_edge(x, y));
      }
      for (int y = 1; y < graph.n_rows(); ++y) {
        for (int x = start; x <= start + W; ++x) out.insert(graph.vertical_edge(x, y));
      }
    }
    for (int y = 1; y < graph.n_rows(); ++y) {
      out.insert(graph.vertical_edge(start, y));
      out.insert(graph.vertical_edge(start + W, y));
    }
  }
  return out;
}

EdgeSet sample_short_connecting_set(const GridGraph& graph, const TerminalPair& pair,
                                    double epsilon, std::mt19937_64& rng) {
  if (pair.u.y != pair.v.y || pair.u.x >= pair.v.x) {
    throw GeometryError("path sampler needs u left of v on one row");
  }
  if (epsilon < 0) throw std::invalid_argument("epsilon must be nonnegative");
  const int n = pair.v.x - pair.u.x;
  const int detour = static_cast<int>(std::floor(epsilon * n + 1e-12));
  const int budget = static_cast<int>(std::floor((1.0 + epsilon) * n + 1e-12));

  enum Move : char { R, L, U, D };
  for (;;) {
    const int r = std::uniform_int_distribution<int>(0, detour)(rng);
    const int b = std::uniform_int_distribution<int>(0, r / 2)(rng);
    const int a = std::uniform_int_distribution<int>(0, r - 2 * b)(rng);
    std::vector<Move> moves;
    moves.insert(moves.end(), static_cast<size_t>(n + a), R);
    moves.insert(moves.end(), static_cast<size_t>(a), L);
    moves.insert(moves.end(), static_cast<size_t>(b), U);
    moves.insert(moves.end(), static_cast<size_t>(b), D);
    std::shuffle(moves.begin(), moves.end(), rng);

    EdgeSet S(graph.num_edges());
    Vertex at = pair.u;
    bool inside = true;
    for (Move m : moves) {
      Vertex to = at;
      switch (m) {
        case R: ++to.x; break;
        case L: --to.x; break;
        case U: ++to.y; break;
        case D: --to.y; break;
      }
      if (!graph.contains(to)) {
        inside = false;
        break;
      }
      S.insert(graph.edge_between(at, to));
      at = to;
    }
    if (!inside) continue;

    const int room = budget - S.size();
    const int extra = std::uniform_int_distribution<int>(0, std::max(room, 0))(rng);
    std::uniform_int_distribution<int> pick(0, graph.num_edges() - 1);
    for (int i = 0; i < extra; ++i) S.insert(pick(rng));
    return S;
  }
}

StraightBoundReport straight_fraction_bound_check(const GridGraph& graph,
                                                  const std::vector<EdgeSet>& samples,
                                                  int width, double epsilon) {
  StraightBoundReport r;
  r.bound = 1.0 - epsilon * width;
  for (const EdgeSet& S : samples) {
    ++r.samples;
    const ColumnClass cls = straight_columns(graph, S, width);
    const double theta = cls.straight_fraction();
    r.min_fraction = std::min(r.min_fraction, theta);
    const bool bound_ok = theta >= r.bound;
    const bool contained = S.is_subset_of(envelope(graph, cls));
    if (!bound_ok) ++r.bound_violations;
    if (!contained) ++r.containment_violations;
    if (!bound_ok || !contained) r.counterexamples.push_back(S);
  }
  return r;
}

}  // namespace ea
