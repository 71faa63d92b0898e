#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ea {

class SizingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Grid vertex in 1-based (column, row) coordinates.
struct Vertex {
  int x = 1;
  int y = 1;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
  int a = 0;  // lower vertex index
  int b = 0;
  bool horizontal = true;
};

/// n_cols x n_rows nearest-neighbour grid.
///
/// Vertex (x, y) has index (y-1)*n_cols + (x-1). Edges are numbered with all
/// horizontal edges first, row-major ((x,y)-(x+1,y) for y = 1..n_rows, then
/// x = 1..n_cols-1), followed by all vertical edges, also row-major
/// ((x,y)-(x,y+1) for y = 1..n_rows-1, then x = 1..n_cols). This numbering is
/// frozen: serialized edge sets and coupling fields depend on it.
class GridGraph {
 public:
  GridGraph(int n_cols, int n_rows);

  int n_cols() const { return n_cols_; }
  int n_rows() const { return n_rows_; }
  int num_vertices() const { return n_cols_ * n_rows_; }
  int num_horizontal() const { return n_rows_ * (n_cols_ - 1); }
  int num_edges() const { return num_horizontal() + n_cols_ * (n_rows_ - 1); }

  bool contains(Vertex w) const {
    return w.x >= 1 && w.x <= n_cols_ && w.y >= 1 && w.y <= n_rows_;
  }
  int vertex_index(Vertex w) const;
  Vertex vertex(int index) const {
    return {index % n_cols_ + 1, index / n_cols_ + 1};
  }

  const Edge& edge(int e) const { return edges_.at(static_cast<size_t>(e)); }
  /// Index of ((x,y),(x+1,y)).
  int horizontal_edge(int x, int y) const;
  /// Index of ((x,y),(x,y+1)).
  int vertical_edge(int x, int y) const;
  /// Edge joining two adjacent vertices; throws GeometryError otherwise.
  int edge_between(Vertex a, Vertex b) const;

  /// Incident edge indices of vertex v (at most 4).
  std::span<const int> incident(int v) const {
    return {adj_.data() + adj_offset_[static_cast<size_t>(v)],
            static_cast<size_t>(adj_offset_[static_cast<size_t>(v) + 1] -
                                adj_offset_[static_cast<size_t>(v)])};
  }
  int other_end(int e, int v) const {
    const Edge& ed = edge(e);
    return ed.a == v ? ed.b : ed.a;
  }

  friend bool operator==(const GridGraph& a, const GridGraph& b) {
    return a.n_cols_ == b.n_cols_ && a.n_rows_ == b.n_rows_;
  }

 private:
  int n_cols_;
  int n_rows_;
  std::vector<Edge> edges_;
  std::vector<int> adj_;
  std::vector<int> adj_offset_;
};

GridGraph build_grid(int n_cols, int n_rows);

/// Subset of the edges of a grid, stored as a bit-set over edge indices.
class EdgeSet {
 public:
  EdgeSet() = default;
  explicit EdgeSet(int universe);
  EdgeSet(int universe, std::span<const int> members);

  static EdgeSet full(int universe);

  int universe() const { return universe_; }
  bool contains(int e) const {
    return (words_[static_cast<size_t>(e) >> 6] >> (e & 63)) & 1U;
  }
  void insert(int e);
  void erase(int e);
  int size() const;
  bool empty() const { return size() == 0; }

  /// Members in increasing index order.
  std::vector<int> indices() const;
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        int bit = __builtin_ctzll(bits);
        fn(static_cast<int>(w * 64) + bit);
        bits &= bits - 1;
      }
    }
  }

  bool is_subset_of(const EdgeSet& other) const;
  bool intersects(const EdgeSet& other) const;

  EdgeSet& operator|=(const EdgeSet& o);
  EdgeSet& operator&=(const EdgeSet& o);
  /// Set difference.
  EdgeSet& operator-=(const EdgeSet& o);
  EdgeSet operator~() const;

  friend EdgeSet operator|(EdgeSet a, const EdgeSet& b) { return a |= b; }
  friend EdgeSet operator&(EdgeSet a, const EdgeSet& b) { return a &= b; }
  friend EdgeSet operator-(EdgeSet a, const EdgeSet& b) { return a -= b; }
  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;

 private:
  void check_compatible(const EdgeSet& o) const;
  void clear_tail();

  int universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct TerminalPair {
  Vertex u;
  Vertex v;
};

/// u = (1, r), v = (n_cols, r) with r = n_rows/2 for even n_rows and
/// ceil(n_rows/2) for odd n_rows. `odd_row_adjusted` records the odd case.
struct CanonicalPair {
  TerminalPair pair;
  bool odd_row_adjusted = false;
};
CanonicalPair canonical_pair(const GridGraph& graph);

/// Horizontal edges between u and v along their common row.
EdgeSet line_L(const GridGraph& graph, const TerminalPair& pair);

/// True iff u and v share a connected component of the subgraph spanned by S.
bool is_connecting(const GridGraph& graph, const EdgeSet& S,
                   const TerminalPair& pair);

/// All horizontal edges between columns x and x+1.
EdgeSet vertical_cutset(const GridGraph& graph, int x);

/// A u-v cutset with its vertex bipartition. `u_side[w]` is 1 iff w is
/// reachable from u without using an edge of `edges` (the set V_u(C));
/// every other vertex belongs to V_v(C).
struct Cutset {
  EdgeSet edges;
  std::vector<std::uint8_t> u_side;

  bool on_u_side(int w) const { return u_side[static_cast<size_t>(w)] != 0; }
};

/// Computes V_u(C) for a given edge set C by search from u avoiding C.
/// Throws PreconditionError if C does not separate u from v.
Cutset separate(const GridGraph& graph, const EdgeSet& C,
                const TerminalPair& pair);

/// Boundary edges of u's component in the subgraph spanned by S. The result
/// separates u from v and is disjoint from S; requires that S does not
/// connect u and v.
Cutset component_boundary_cutset(const GridGraph& graph, const EdgeSet& S,
                                 const TerminalPair& pair);

/// Human-readable "(x1,y1)-(x2,y2)" form of each member.
std::vector<std::string> describe_edges(const GridGraph& graph,
                                        const EdgeSet& S);

}  // namespace ea
