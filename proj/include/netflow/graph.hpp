#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netflow {

/// 0/1 matrix over edge-nodes. Entry (i, j) = 1 means "edge j feeds edge i".
using Pattern = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A directed edge, vertices are 1-based.
struct Edge {
  int tail = 0;
  int head = 0;
};

/// Static network topology together with its incidence matrices.
///
/// Vertices and edges are numbered from 1 in the public API (as in
/// scenario files); the matrices are stored 0-based.
class NetworkGraph {
 public:
  NetworkGraph(int n, std::vector<Edge> edges);

  int vertex_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Outgoing incidence: (i, j) = 1 iff vertex i is the tail of edge j.
  const Pattern& phi_minus() const { return phi_minus_; }
  /// Incoming incidence: (i, j) = 1 iff vertex i is the head of edge j.
  const Pattern& phi_plus() const { return phi_plus_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  Pattern phi_minus_;
  Pattern phi_plus_;
};

struct LineGraphAdjacency {
  Pattern b;
};

NetworkGraph build_graph(const std::vector<std::pair<int, int>>& edge_list, int n);

/// b(i, j) = 1 iff head(e_j) = tail(e_i).
LineGraphAdjacency line_graph_adjacency(const NetworkGraph& g);

/// Irreducibility of a square 0/1 pattern (single strongly connected
/// component covering every node).
bool is_strongly_connected(const Pattern& b);
inline bool is_strongly_connected(const LineGraphAdjacency& b) { return is_strongly_connected(b.b); }

/// Strongly connected components (Tarjan). Returns a component id per node.
std::vector<int> strongly_connected_components(const Pattern& b);

/// gcd of all directed cycle lengths of an irreducible pattern. Throws
/// GraphError for reducible input.
int cyclic_index(const Pattern& b);
inline int cyclic_index(const LineGraphAdjacency& b) { return cyclic_index(b.b); }

/// Edge-nodes that receive inflow, i.e. have a nonzero row.
std::vector<int> active_nodes(const Pattern& b);

/// Principal submatrix on the given node indices.
Pattern restrict_pattern(const Pattern& b, const std::vector<int>& nodes);

}  // namespace netflow
