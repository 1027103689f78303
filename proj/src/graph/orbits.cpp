#include <algorithm>
#include <array>
#include <vector>

#include "sfmg/graph.hpp"

namespace sfmg {

namespace {

// Orbit of each node inside a connected induced subgraph, from its degree
// within the subgraph and the subgraph's edge count.
int orbit_of_triple_node(int edges, int inner_degree) {
  if (edges == 3) return 3;                // triangle
  return inner_degree == 2 ? 2 : 1;        // path: middle / end
}

int orbit_of_quad_node(int edges, int max_inner_degree, int inner_degree) {
  switch (edges) {
    case 3:
      if (max_inner_degree == 3) return inner_degree == 3 ? 7 : 6;  // star
      return inner_degree == 1 ? 4 : 5;                             // path
    case 4:
      if (max_inner_degree == 2) return 8;                          // cycle
      return inner_degree == 1 ? 9 : (inner_degree == 2 ? 10 : 11);  // paw
    case 5:
      return inner_degree == 2 ? 12 : 13;                           // diamond
    default:
      return 14;                                                    // clique
  }
}

// Enumerates every connected induced subgraph of `size` nodes exactly once
// (Wernicke's ESU scheme) and hands it to `visit`.
template <typename Visit>
class SubgraphEnumerator {
 public:
  SubgraphEnumerator(const std::vector<std::vector<int>>& adj, int size, Visit visit)
      : adj_(adj), size_(size), visit_(visit), near_sub_(adj.size(), 0) {}

  void run() {
    for (int v = 0; v < static_cast<int>(adj_.size()); ++v) {
      std::vector<int> ext;
      for (int u : adj_[static_cast<std::size_t>(v)])
        if (u > v) ext.push_back(u);
      sub_.assign(1, v);
      mark(v, +1);
      extend(std::move(ext), v);
      mark(v, -1);
    }
  }

 private:
  void mark(int v, int delta) {
    near_sub_[static_cast<std::size_t>(v)] += delta;
    for (int u : adj_[static_cast<std::size_t>(v)]) near_sub_[static_cast<std::size_t>(u)] += delta;
  }

  void extend(std::vector<int> ext, int root) {
    if (static_cast<int>(sub_.size()) == size_) {
      visit_(sub_);
      return;
    }
    while (!ext.empty()) {
      const int w = ext.back();
      ext.pop_back();
      std::vector<int> next = ext;
      // Exclusive neighbors of w: not in the subgraph nor adjacent to it.
      for (int u : adj_[static_cast<std::size_t>(w)]) {
        if (u > root && near_sub_[static_cast<std::size_t>(u)] == 0 &&
            std::find(next.begin(), next.end(), u) == next.end()) {
          next.push_back(u);
        }
      }
      sub_.push_back(w);
      mark(w, +1);
      extend(std::move(next), root);
      mark(w, -1);
      sub_.pop_back();
    }
  }

  const std::vector<std::vector<int>>& adj_;
  int size_;
  Visit visit_;
  std::vector<int> near_sub_;
  std::vector<int> sub_;
};

template <typename Visit>
void enumerate_connected(const std::vector<std::vector<int>>& adj, int size, Visit visit) {
  SubgraphEnumerator<Visit> e(adj, size, visit);
  e.run();
}

}  // namespace

Matrix orbit_counts(const Graph& g) {
  const int n = g.n();
  Matrix counts = Matrix::Zero(n, kNumOrbits);
  const auto adj = g.neighbors();
  for (int v = 0; v < n; ++v) counts(v, 0) = static_cast<double>(adj[static_cast<std::size_t>(v)].size());

  auto inner = [&](const std::vector<int>& nodes, std::array<int, 4>& deg) {
    int edges = 0;
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      deg[a] = 0;
      for (std::size_t b = 0; b < nodes.size(); ++b) {
        if (a != b && g.has_edge(nodes[a], nodes[b])) ++deg[a];
      }
      edges += deg[a];
    }
    return edges / 2;
  };

  enumerate_connected(adj, 3, [&](const std::vector<int>& nodes) {
    std::array<int, 4> deg{};
    const int edges = inner(nodes, deg);
    for (std::size_t a = 0; a < 3; ++a) counts(nodes[a], orbit_of_triple_node(edges, deg[a])) += 1.0;
  });
  enumerate_connected(adj, 4, [&](const std::vector<int>& nodes) {
    std::array<int, 4> deg{};
    const int edges = inner(nodes, deg);
    const int max_deg = *std::max_element(deg.begin(), deg.end());
    for (std::size_t a = 0; a < 4; ++a) {
      counts(nodes[a], orbit_of_quad_node(edges, max_deg, deg[a])) += 1.0;
    }
  });
  return counts;
}

}  // namespace sfmg
