#include "netflow/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace netflow {

NetworkGraph::NetworkGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) throw GraphError("graph needs at least one vertex");
  if (edges_.empty()) throw GraphError("graph needs at least one edge");
  const auto m = static_cast<Eigen::Index>(edges_.size());
  phi_minus_ = Pattern::Zero(n_, m);
  phi_plus_ = Pattern::Zero(n_, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Edge& e = edges_[static_cast<std::size_t>(j)];
    for (int v : {e.tail, e.head}) {
      if (v < 1 || v > n_) {
        throw GraphError("edge " + std::to_string(j + 1) + " references vertex " + std::to_string(v) +
                         " outside 1.." + std::to_string(n_));
      }
    }
    phi_minus_(e.tail - 1, j) = 1;
    phi_plus_(e.head - 1, j) = 1;
  }
}

NetworkGraph build_graph(const std::vector<std::pair<int, int>>& edge_list, int n) {
  std::vector<Edge> edges;
  edges.reserve(edge_list.size());
  for (auto [tail, head] : edge_list) edges.push_back({tail, head});
  return NetworkGraph(n, std::move(edges));
}

LineGraphAdjacency line_graph_adjacency(const NetworkGraph& g) {
  // (Phi^-)^T Phi^+ has entry (i, j) = [tail(e_i) == head(e_j)].
  Pattern b = g.phi_minus().transpose() * g.phi_plus();
  return {b};
}

std::vector<int> strongly_connected_components(const Pattern& b) {
  const int m = static_cast<int>(b.rows());
  if (b.cols() != m) throw GraphError("pattern must be square");

  // Successors of j are the i with b(i, j) != 0.
  std::vector<std::vector<int>> succ(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (b(i, j) != 0) succ[static_cast<std::size_t>(j)].push_back(i);

  std::vector<int> index(static_cast<std::size_t>(m), -1), low(static_cast<std::size_t>(m), 0),
      comp(static_cast<std::size_t>(m), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(m), false);
  std::vector<int> stack;
  int counter = 0;
  int n_comp = 0;

  struct Frame {
    int node;
    std::size_t next;
  };
  for (int root = 0; root < m; ++root) {
    if (index[static_cast<std::size_t>(root)] >= 0) continue;
    std::vector<Frame> frames{{root, 0}};
    index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;

    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto v = static_cast<std::size_t>(f.node);
      if (f.next < succ[v].size()) {
        const int w = succ[v][f.next++];
        const auto wu = static_cast<std::size_t>(w);
        if (index[wu] < 0) {
          index[wu] = low[wu] = counter++;
          stack.push_back(w);
          on_stack[wu] = true;
          frames.push_back({w, 0});
        } else if (on_stack[wu]) {
          low[v] = std::min(low[v], index[wu]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w = -1;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = false;
          comp[static_cast<std::size_t>(w)] = n_comp;
        } while (w != f.node);
        ++n_comp;
      }
      const int finished = f.node;
      frames.pop_back();
      if (!frames.empty()) {
        const auto parent = static_cast<std::size_t>(frames.back().node);
        low[parent] = std::min(low[parent], low[static_cast<std::size_t>(finished)]);
      }
    }
  }
  return comp;
}

bool is_strongly_connected(const Pattern& b) {
  if (b.rows() == 0) return false;
  if (b.rows() == 1) return b(0, 0) != 0;
  const auto comp = strongly_connected_components(b);
  return std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
}

int cyclic_index(const Pattern& b) {
  if (!is_strongly_connected(b)) {
    throw GraphError("cyclic index is only defined for irreducible patterns");
  }
  const int m = static_cast<int>(b.rows());
  std::vector<int> level(static_cast<std::size_t>(m), -1);
  std::queue<int> queue;
  level[0] = 0;
  queue.push(0);
  while (!queue.empty()) {
    const int j = queue.front();
    queue.pop();
    for (int i = 0; i < m; ++i) {
      if (b(i, j) != 0 && level[static_cast<std::size_t>(i)] < 0) {
        level[static_cast<std::size_t>(i)] = level[static_cast<std::size_t>(j)] + 1;
        queue.push(i);
      }
    }
  }
  int h = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i)
      if (b(i, j) != 0)
        h = std::gcd(h, std::abs(level[static_cast<std::size_t>(j)] + 1 - level[static_cast<std::size_t>(i)]));
  return h;
}

std::vector<int> active_nodes(const Pattern& b) {
  std::vector<int> nodes;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    if ((b.row(i).array() != 0).any()) nodes.push_back(static_cast<int>(i));
  return nodes;
}

Pattern restrict_pattern(const Pattern& b, const std::vector<int>& nodes) {
  const auto k = static_cast<Eigen::Index>(nodes.size());
  Pattern sub(k, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < k; ++c)
      sub(r, c) = b(nodes[static_cast<std::size_t>(r)], nodes[static_cast<std::size_t>(c)]);
  return sub;
}

}  // namespace netflow
