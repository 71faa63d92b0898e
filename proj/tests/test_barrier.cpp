#include <doctest.h>

#include <cmath>
#include <random>

#include "ea/barrier.hpp"
#include "ea/rng.hpp"

using namespace ea;

namespace {

const GridGraph kGrid7(7, 7);
const TerminalPair kPair7{{1, 4}, {7, 4}};

int centre7() { return kGrid7.horizontal_edge(3, 4); }

// Reference drawing: 18x18 cells, W = 3. Drawing coordinates start at 0.
const GridGraph kDrawing(19, 19);

void add_polyline(EdgeSet& S, std::initializer_list<std::pair<int, int>> pts) {
  auto it = pts.begin();
  auto prev = *it++;
  for (; it != pts.end(); ++it) {
    auto [x0, y0] = prev;
    const auto [x1, y1] = *it;
    while (x0 != x1 || y0 != y1) {
      const int nx = x0 + (x1 > x0) - (x1 < x0);
      const int ny = y0 + (y1 > y0) - (y1 < y0);
      S.insert(kDrawing.edge_between({x0 + 1, y0 + 1}, {nx + 1, ny + 1}));
      x0 = nx;
      y0 = ny;
    }
    prev = *it;
  }
}

EdgeSet figure3_set() {
  EdgeSet S(kDrawing.num_edges());
  add_polyline(S, {{0, 9}, {2, 9}, {2, 10}, {6, 10}, {6, 8}, {6, 7}, {5, 7}, {5, 6}, {10, 6},
                   {10, 10}, {11, 10}, {16, 10}, {16, 9}, {18, 9}});
  add_polyline(S, {{1, 9}, {1, 11}, {3, 11}});
  add_polyline(S, {{16, 7}, {17, 7}, {17, 6}});
  return S;
}

// Its envelope, drawn edge by edge.
EdgeSet figure4_set() {
  EdgeSet S(kDrawing.num_edges());
  add_polyline(S, {{6, 6}, {9, 6}});
  add_polyline(S, {{12, 10}, {15, 10}});
  for (int j : {0, 1, 3, 5}) {
    for (int x = 3 * j; x <= 3 * j + 2; ++x) {
      for (int y = 0; y <= 17; ++y) {
        add_polyline(S, {{x, y}, {x + 1, y}});
        add_polyline(S, {{x, y}, {x, y + 1}});
        add_polyline(S, {{x, y + 1}, {x + 1, y + 1}});
      }
    }
    add_polyline(S, {{3 * j, 0}, {3 * j, 18}});
    add_polyline(S, {{3 * j + 3, 0}, {3 * j + 3, 18}});
  }
  return S;
}

}  // namespace

TEST_CASE("barrier template geometry") {
  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7);
  CHECK(spec.low_threshold == 1.0);
  CHECK(spec.high_threshold == 100.0);
  CHECK(spec.low_edges.size() == 21);
  CHECK(spec.high_edges.size() == 9);
  CHECK_FALSE(spec.low_edges.intersects(spec.high_edges));
  CHECK_FALSE(spec.low_edges.contains(spec.center_edge));
  CHECK_FALSE(spec.high_edges.contains(spec.center_edge));
  CHECK(spec.gap_margin() == 158.0);
  CHECK(spec.gap_condition());

  // Walk: top-right corner of the box, anti-clockwise, unit steps.
  CHECK(kGrid7.vertex(spec.boundary_walk[0]) == Vertex{5, 5});
  CHECK(kGrid7.vertex(spec.boundary_walk[3]) == Vertex{2, 5});
  CHECK(kGrid7.vertex(spec.boundary_walk[5]) == Vertex{2, 3});
  CHECK(kGrid7.vertex(spec.boundary_walk[9]) == Vertex{5, 4});
  for (size_t i = 0; i < 9; ++i) {
    const Vertex a = kGrid7.vertex(spec.boundary_walk[i]);
    const Vertex b = kGrid7.vertex(spec.boundary_walk[i + 1]);
    CHECK(std::abs(a.x - b.x) + std::abs(a.y - b.y) == 1);
    CHECK(spec.walk_edges[i] == kGrid7.edge_between(a, b));
  }

  // Every edge touching the box boundary is in the template.
  for (int w : spec.boundary_walk) {
    for (int f : kGrid7.incident(w)) {
      CHECK((spec.low_edges.contains(f) || spec.high_edges.contains(f)));
    }
  }

  CHECK(barrier_sites(kGrid7, kPair7) ==
        std::vector<int>{kGrid7.horizontal_edge(3, 4), kGrid7.horizontal_edge(4, 4)});
  CHECK_THROWS_AS(build_barrier_spec(kGrid7, kGrid7.vertical_edge(3, 3), kPair7), GeometryError);
  CHECK_THROWS_AS(build_barrier_spec(kGrid7, kGrid7.horizontal_edge(2, 4), kPair7), GeometryError);
  CHECK_THROWS_AS(build_barrier_spec(kGrid7, kGrid7.horizontal_edge(3, 2), kPair7), GeometryError);
  // u within distance 1 of e.
  const GridGraph big(12, 7);
  CHECK_THROWS_AS(build_barrier_spec(big, big.horizontal_edge(5, 4), {{4, 4}, {12, 4}}),
                  GeometryError);
  CHECK_NOTHROW(build_barrier_spec(big, big.horizontal_edge(5, 4), {{1, 4}, {12, 4}}));
}

TEST_CASE("gap condition under scaled thresholds") {
  const BarrierSpec tight = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 2.5);
  CHECK(tight.gap_condition() == (2 * 2.5 > 2 * tight.low_edges.size() * 0.2));
  CHECK_FALSE(tight.gap_condition());
  const BarrierSpec ok = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 5.0);
  CHECK(ok.gap_condition());
}

TEST_CASE("barrier sampling") {
  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7);
  std::mt19937_64 rng(12);
  const CouplingField base = gaussian_field(kGrid7, rng);
  for (int i = 0; i < 10000; ++i) {
    const CouplingField J = sample_barrier_couplings(spec, base, rng);
    REQUIRE(barrier_holds(spec, J));
    for (int e = 0; e < J.size(); ++e) {
      if (!spec.low_edges.contains(e) && !spec.high_edges.contains(e)) REQUIRE(J[e] == base[e]);
    }
  }
  // Magnitudes alone decide the event.
  CouplingField J = sample_barrier_couplings(spec, base, rng);
  std::bernoulli_distribution coin(0.5);
  for (int e = 0; e < J.size(); ++e) {
    if (coin(rng)) J[e] = -J[e];
  }
  CHECK(barrier_holds(spec, J));
  J[spec.center_edge] = 1e6;
  CHECK(barrier_holds(spec, J));
}

TEST_CASE("barrier obliviousness on 7x7") {
  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 5.0);
  const StreamSeeder seeder(2718);
  for (std::uint64_t i = 0; i < 40; ++i) {
    auto rng = seeder.engine({i, tag(Stream::barrier)});
    const CouplingField J = sample_barrier_couplings(spec, gaussian_field(kGrid7, rng), rng);
    const BarrierReport r = verify_barrier_obliviousness(kGrid7, kPair7, J, spec);
    REQUIRE(r.passed());

    for (double big : {1000.0, -1000.0}) {
      CouplingField K = J;
      K[spec.center_edge] = big;
      CHECK(verify_barrier_obliviousness(kGrid7, kPair7, K, spec).relative_plus == r.relative_plus);
    }

    // Cutset through e minus e: obliviousness makes this a full cutset flip.
    const auto [before, after] = flip_all_but_center(kGrid7, kPair7, J, spec);
    CHECK(after == -before);
  }
}

TEST_CASE("boundary walk spins are fixed by the high-edge signs") {
  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 5.0);
  std::mt19937_64 rng(5);
  const CouplingField J = sample_barrier_couplings(spec, gaussian_field(kGrid7, rng), rng);
  const EdgeSet fixed = spec.low_edges | spec.high_edges;
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 30; ++rep) {
    CouplingField K = J;
    for (int e = 0; e < K.size(); ++e) {
      if (!fixed.contains(e)) K[e] = 3.0 * normal(rng);
    }
    const SpinConfig s = solve(kGrid7, K).spins;
    for (size_t i = 0; i < 9; ++i) {
      const int prod = s.spin(spec.boundary_walk[i]) * s.spin(spec.boundary_walk[i + 1]);
      CHECK(prod == (J[spec.walk_edges[i]] > 0 ? 1 : -1));
    }
  }
}

TEST_CASE("paired sign assignments cancel exactly") {
  // Conditioning on |J| and the barrier, J and its flip along the vertical
  // cutset through e (minus e) are equally likely and give opposite
  // relative spins, so the paired sum is an exact integer zero.
  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 5.0);
  std::mt19937_64 rng(77);
  long sum = 0;
  for (int i = 0; i < 30; ++i) {
    const CouplingField J = sample_barrier_couplings(spec, gaussian_field(kGrid7, rng), rng);
    const auto [a, b] = flip_all_but_center(kGrid7, kPair7, J, spec);
    sum += a + b;
  }
  CHECK(sum == 0);
}

TEST_CASE("barrier probability") {
  CHECK(log_gaussian_two_sided_tail(0.0) == 0.0);
  // 50-digit references.
  CHECK(log_gaussian_two_sided_tail(100.0) / std::log(10.0) ==
        doctest::Approx(-2173.5705128733704).epsilon(1e-13));
  CHECK(std::log10(std::erf(1.0 / std::sqrt(2.0))) ==
        doctest::Approx(-0.16577678169790582).epsilon(1e-13));
  // Continuity across the switch to the asymptotic series.
  const double z = 25.0 * std::sqrt(2.0);
  CHECK(log_gaussian_two_sided_tail(z * (1 - 1e-9)) ==
        doctest::Approx(log_gaussian_two_sided_tail(z)).epsilon(1e-8));

  const BarrierSpec spec = build_barrier_spec(kGrid7, centre7(), kPair7);
  const BarrierProbability p = barrier_probability(spec);
  CHECK(p.log10_p == doctest::Approx(-19565.615928275990).epsilon(1e-12));
  CHECK(p.log_failure == 0.0);  // 1 - p rounds to 1

  const BarrierSpec scaled = build_barrier_spec(kGrid7, centre7(), kPair7, 0.2, 2.5);
  CHECK(barrier_probability(scaled).log_p == doctest::Approx(-78.17595157880838).epsilon(1e-12));

  const BarrierSpec loose = build_barrier_spec(kGrid7, centre7(), kPair7, 40.0, 1e-12);
  CHECK(barrier_probability(loose).log_p > -1e-9);

  const GridGraph long_grid(40, 7);
  const TerminalPair lp{{1, 4}, {40, 4}};
  CHECK(disjoint_barrier_count(long_grid, lp) == 7);
  const BarrierProbability many = barrier_probability(scaled, 7);
  CHECK(many.log_failure == doctest::Approx(7 * std::log1p(-std::exp(many.log_p))));
}

TEST_CASE("lower-bound construction") {
  const StreamSeeder seeder(404);
  for (int n : {4, 6}) {
    const GridGraph g(n, n);
    const TerminalPair p = canonical_pair(g).pair;
    auto rng = seeder.engine({static_cast<std::uint64_t>(n), tag(Stream::barrier)});
    const CouplingField J = build_lower_bound_field(g, p, rng);
    const EdgeSet L = line_L(g, p);
    const EdgeSet hat = line_neighbourhood(g, p);
    for (int e = 0; e < J.size(); ++e) {
      if (L.contains(e)) CHECK((J[e] > 100.0 && J[e] < 101.0));
      else if (hat.contains(e)) CHECK(std::abs(J[e]) < 1.0 / n);
    }
    const LowerBoundReport r = check_lower_bound(g, p, J, 50, 0, seeder);
    CHECK(r.passed());
  }

  // Energy defect on n = 4 by brute force over every configuration.
  const GridGraph g(4, 4);
  const TerminalPair p = canonical_pair(g).pair;
  std::mt19937_64 rng(9);
  const CouplingField J = build_lower_bound_field(g, p, rng);
  const EdgeSet L = line_L(g, p);
  const GroundStateResult best = solve(g, J);
  double worst_gap = 1e300;
  for (std::uint32_t m = 0; m < (1U << 15); ++m) {
    std::vector<int> s(16, 1);
    for (int w = 1; w < 16; ++w) s[static_cast<size_t>(w)] = ((m >> (w - 1)) & 1U) ? -1 : 1;
    bool aligned = true;
    L.for_each([&](int e) {
      aligned = aligned && s[static_cast<size_t>(g.edge(e).a)] == s[static_cast<size_t>(g.edge(e).b)];
    });
    if (aligned) continue;
    worst_gap = std::min(worst_gap, best.energy - energy(g, J, SpinConfig(g, s)));
  }
  CHECK(worst_gap >= 100.0 - 2.0 * 4 * (1.0 / 4));
}

TEST_CASE("straight columns on the reference drawing") {
  const EdgeSet S = figure3_set();
  const TerminalPair p{{1, 10}, {19, 10}};
  CHECK(is_connecting(kDrawing, S, p));
  const ColumnClass cls = straight_columns(kDrawing, S, 3);
  CHECK(cls.num_columns == 6);
  CHECK(cls.straight == std::vector<int>{3, 5});
  CHECK(cls.rows == std::vector<int>{7, 11});
  // I_3 has S-edges on its left boundary line and is still straight.
  CHECK(S.contains(kDrawing.vertical_edge(7, 8)));

  const EdgeSet env = envelope(kDrawing, cls);
  CHECK(env == figure4_set());
  CHECK(S.is_subset_of(env));
  CHECK_THROWS(straight_columns(kDrawing, S, 5));
}

TEST_CASE("S = L is all straight") {
  const GridGraph g(41, 41);
  const TerminalPair p{{1, 20}, {41, 20}};
  const ColumnClass cls = straight_columns(g, line_L(g, p), 5);
  CHECK(cls.num_columns == 8);
  CHECK(cls.straight_fraction() == 1.0);
  for (int y : cls.rows) CHECK(y == 20);

  const EdgeSet env = envelope(g, cls);
  EdgeSet expect = line_L(g, p);
  for (int j = 0; j <= 8; ++j) {
    for (int y = 1; y < 41; ++y) expect.insert(g.vertical_edge(1 + 5 * j, y));
  }
  CHECK(env == expect);
}

TEST_CASE("envelope contains every member of randomly generated classes") {
  std::mt19937_64 rng(1234);
  const GridGraph g(21, 9);
  const int W = 5;
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution sparse(0.15);
  std::uniform_int_distribution<int> row(1, g.n_rows());
  for (int trial = 0; trial < 500; ++trial) {
    ColumnClass cls;
    cls.width = W;
    cls.num_columns = 4;
    EdgeSet S(g.num_edges());
    for (int j = 1; j <= 4; ++j) {
      const int start = 1 + (j - 1) * W;
      if (coin(rng)) {
        const int y = row(rng);
        cls.straight.push_back(j);
        cls.rows.push_back(y);
        for (int x = start; x < start + W; ++x) S.insert(g.horizontal_edge(x, y));
      } else {
        for (int y = 1; y <= g.n_rows(); ++y) {
          for (int x = start; x < start + W; ++x) {
            if (sparse(rng)) S.insert(g.horizontal_edge(x, y));
            if (y < g.n_rows() && x > start && sparse(rng)) S.insert(g.vertical_edge(x, y));
          }
        }
      }
      for (int y = 1; y < g.n_rows(); ++y) {
        if (sparse(rng)) S.insert(g.vertical_edge(start, y));
        if (sparse(rng)) S.insert(g.vertical_edge(start + W, y));
      }
    }
    REQUIRE(S.is_subset_of(envelope(g, cls)));
    REQUIRE(S.is_subset_of(envelope(g, straight_columns(g, S, W))));
  }
}

TEST_CASE("short connecting sets and the straight fraction bound") {
  const GridGraph g(41, 41);
  const TerminalPair p{{1, 20}, {41, 20}};
  const int n = 40;
  for (double eps : {0.0, 0.02, 0.1, 0.2}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(eps * 1000) + 1);
    std::vector<EdgeSet> samples;
    for (int i = 0; i < 500; ++i) {
      EdgeSet S = sample_short_connecting_set(g, p, eps, rng);
      REQUIRE(is_connecting(g, S, p));
      REQUIRE(S.size() <= static_cast<int>(std::floor((1 + eps) * n + 1e-12)));
      // Each non-straight column owns at least W + 1 edges of a crossing path.
      const double theta = straight_columns(g, S, 5).straight_fraction();
      REQUIRE(S.size() >= n * (1 + (1 - theta) / 5) - 1e-9);
      samples.push_back(std::move(S));
    }
    const StraightBoundReport r = straight_fraction_bound_check(g, samples, 5, eps);
    CHECK(r.passed());
    CHECK(r.samples == 500);
    if (eps == 0.0) CHECK(r.min_fraction == 1.0);
    if (eps >= 0.1) CHECK(r.min_fraction < 1.0);
  }
}
