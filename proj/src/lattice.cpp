#include "ea/lattice.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace ea {

GridGraph::GridGraph(int n_cols, int n_rows) : n_cols_(n_cols), n_rows_(n_rows) {
  if (n_cols < 1 || n_rows < 1) {
    throw SizingError("grid dimensions must be positive, got " +
                      std::to_string(n_cols) + "x" + std::to_string(n_rows));
  }
  edges_.reserve(static_cast<size_t>(num_edges()));
  for (int y = 1; y <= n_rows_; ++y) {
    for (int x = 1; x < n_cols_; ++x) {
      edges_.push_back({vertex_index({x, y}), vertex_index({x + 1, y}), true});
    }
  }
  for (int y = 1; y < n_rows_; ++y) {
    for (int x = 1; x <= n_cols_; ++x) {
      edges_.push_back({vertex_index({x, y}), vertex_index({x, y + 1}), false});
    }
  }

  std::vector<int> degree(static_cast<size_t>(num_vertices()) + 1, 0);
  for (const Edge& e : edges_) {
    ++degree[static_cast<size_t>(e.a) + 1];
    ++degree[static_cast<size_t>(e.b) + 1];
  }
  adj_offset_.assign(degree.size(), 0);
  for (size_t i = 1; i < degree.size(); ++i) {
    adj_offset_[i] = adj_offset_[i - 1] + degree[i];
  }
  adj_.assign(static_cast<size_t>(adj_offset_.back()), 0);
  std::vector<int> fill(adj_offset_.begin(), adj_offset_.end() - 1);
  for (int e = 0; e < num_edges(); ++e) {
    const Edge& ed = edges_[static_cast<size_t>(e)];
    adj_[static_cast<size_t>(fill[static_cast<size_t>(ed.a)]++)] = e;
    adj_[static_cast<size_t>(fill[static_cast<size_t>(ed.b)]++)] = e;
  }
}

int GridGraph::vertex_index(Vertex w) const {
  if (!contains(w)) {
    throw GeometryError("vertex (" + std::to_string(w.x) + "," +
                        std::to_string(w.y) + ") outside grid");
  }
  return (w.y - 1) * n_cols_ + (w.x - 1);
}

int GridGraph::horizontal_edge(int x, int y) const {
  if (x < 1 || x >= n_cols_ || y < 1 || y > n_rows_) {
    throw GeometryError("no horizontal edge at (" + std::to_string(x) + "," +
                        std::to_string(y) + ")");
  }
  return (y - 1) * (n_cols_ - 1) + (x - 1);
}

int GridGraph::vertical_edge(int x, int y) const {
  if (x < 1 || x > n_cols_ || y < 1 || y >= n_rows_) {
    throw GeometryError("no vertical edge at (" + std::to_string(x) + "," +
                        std::to_string(y) + ")");
  }
  return num_horizontal() + (y - 1) * n_cols_ + (x - 1);
}

int GridGraph::edge_between(Vertex a, Vertex b) const {
  if (a.y == b.y && std::abs(a.x - b.x) == 1) {
    return horizontal_edge(std::min(a.x, b.x), a.y);
  }
  if (a.x == b.x && std::abs(a.y - b.y) == 1) {
    return vertical_edge(a.x, std::min(a.y, b.y));
  }
  throw GeometryError("vertices are not adjacent");
}

GridGraph build_grid(int n_cols, int n_rows) { return GridGraph(n_cols, n_rows); }

// ---------------------------------------------------------------------------

EdgeSet::EdgeSet(int universe)
    : universe_(universe), words_((static_cast<size_t>(universe) + 63) / 64, 0) {}

EdgeSet::EdgeSet(int universe, std::span<const int> members) : EdgeSet(universe) {
  for (int e : members) insert(e);
}

EdgeSet EdgeSet::full(int universe) {
  EdgeSet s(universe);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.clear_tail();
  return s;
}

void EdgeSet::insert(int e) {
  if (e < 0 || e >= universe_) throw std::out_of_range("edge index out of range");
  words_[static_cast<size_t>(e) >> 6] |= std::uint64_t{1} << (e & 63);
}

void EdgeSet::erase(int e) {
  if (e < 0 || e >= universe_) throw std::out_of_range("edge index out of range");
  words_[static_cast<size_t>(e) >> 6] &= ~(std::uint64_t{1} << (e & 63));
}

int EdgeSet::size() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::vector<int> EdgeSet::indices() const {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(size()));
  for_each([&](int e) { out.push_back(e); });
  return out;
}

bool EdgeSet::is_subset_of(const EdgeSet& other) const {
  check_compatible(other);
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

bool EdgeSet::intersects(const EdgeSet& other) const {
  check_compatible(other);
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

EdgeSet& EdgeSet::operator|=(const EdgeSet& o) {
  check_compatible(o);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  return *this;
}

EdgeSet& EdgeSet::operator&=(const EdgeSet& o) {
  check_compatible(o);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  return *this;
}

EdgeSet& EdgeSet::operator-=(const EdgeSet& o) {
  check_compatible(o);
  for (size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  return *this;
}

EdgeSet EdgeSet::operator~() const {
  EdgeSet s = *this;
  for (auto& w : s.words_) w = ~w;
  s.clear_tail();
  return s;
}

void EdgeSet::check_compatible(const EdgeSet& o) const {
  if (o.universe_ != universe_) {
    throw std::invalid_argument("edge sets over different graphs");
  }
}

void EdgeSet::clear_tail() {
  const int rem = universe_ & 63;
  if (rem != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

// ---------------------------------------------------------------------------

CanonicalPair canonical_pair(const GridGraph& graph) {
  const int n = graph.n_rows();
  const int row = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  CanonicalPair out;
  out.pair = {{1, row}, {graph.n_cols(), row}};
  out.odd_row_adjusted = (n % 2 != 0);
  return out;
}

EdgeSet line_L(const GridGraph& graph, const TerminalPair& pair) {
  if (pair.u.y != pair.v.y || pair.u.x == pair.v.x) {
    throw GeometryError("line L needs distinct terminals on one row");
  }
  graph.vertex_index(pair.u);
  graph.vertex_index(pair.v);
  EdgeSet L(graph.num_edges());
  const int lo = std::min(pair.u.x, pair.v.x);
  const int hi = std::max(pair.u.x, pair.v.x);
  for (int x = lo; x < hi; ++x) L.insert(graph.horizontal_edge(x, pair.u.y));
  return L;
}

namespace {

// Vertices reachable from `start` using only edges for which `usable(e)`.
template <typename Usable>
std::vector<std::uint8_t> reach(const GridGraph& graph, int start, Usable&& usable) {
  std::vector<std::uint8_t> seen(static_cast<size_t>(graph.num_vertices()), 0);
  std::vector<int> stack{start};
  seen[static_cast<size_t>(start)] = 1;
  while (!stack.empty()) {
    const int w = stack.back();
    stack.pop_back();
    for (int e : graph.incident(w)) {
      if (!usable(e)) continue;
      const int z = graph.other_end(e, w);
      if (!seen[static_cast<size_t>(z)]) {
        seen[static_cast<size_t>(z)] = 1;
        stack.push_back(z);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_connecting(const GridGraph& graph, const EdgeSet& S,
                   const TerminalPair& pair) {
  const int u = graph.vertex_index(pair.u);
  const int v = graph.vertex_index(pair.v);
  if (u == v) return true;
  const auto seen = reach(graph, u, [&](int e) { return S.contains(e); });
  return seen[static_cast<size_t>(v)] != 0;
}

EdgeSet vertical_cutset(const GridGraph& graph, int x) {
  if (x < 1 || x >= graph.n_cols()) {
    throw GeometryError("vertical cutset column " + std::to_string(x) +
                        " out of range");
  }
  EdgeSet C(graph.num_edges());
  for (int y = 1; y <= graph.n_rows(); ++y) C.insert(graph.horizontal_edge(x, y));
  return C;
}

Cutset separate(const GridGraph& graph, const EdgeSet& C, const TerminalPair& pair) {
  const int u = graph.vertex_index(pair.u);
  const int v = graph.vertex_index(pair.v);
  Cutset out{C, reach(graph, u, [&](int e) { return !C.contains(e); })};
  if (out.on_u_side(v)) throw PreconditionError("edge set does not separate u and v");
  return out;
}

Cutset component_boundary_cutset(const GridGraph& graph, const EdgeSet& S,
                                 const TerminalPair& pair) {
  const int u = graph.vertex_index(pair.u);
  const int v = graph.vertex_index(pair.v);
  auto comp = reach(graph, u, [&](int e) { return S.contains(e); });
  if (comp[static_cast<size_t>(v)]) {
    throw PreconditionError("S connects u and v; no disjoint cutset exists");
  }
  EdgeSet C(graph.num_edges());
  for (int e = 0; e < graph.num_edges(); ++e) {
    const Edge& ed = graph.edge(e);
    if (comp[static_cast<size_t>(ed.a)] != comp[static_cast<size_t>(ed.b)]) C.insert(e);
  }
  return {std::move(C), std::move(comp)};
}

std::vector<std::string> describe_edges(const GridGraph& graph, const EdgeSet& S) {
  std::vector<std::string> out;
  S.for_each([&](int e) {
    const Edge& ed = graph.edge(e);
    const Vertex a = graph.vertex(ed.a);
    const Vertex b = graph.vertex(ed.b);
    std::ostringstream os;
    os << '(' << a.x << ',' << a.y << ")-(" << b.x << ',' << b.y << ')';
    out.push_back(os.str());
  });
  return out;
}

}  // namespace ea
