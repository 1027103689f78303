#include "sfmg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "sfmg/errors.hpp"

namespace sfmg {

Graph::Graph(Matrix adj, std::optional<Matrix> feats)
    : adjacency(std::move(adj)), features(std::move(feats)) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("Graph: adjacency must be square");
  if (features && features->rows() != adjacency.rows()) {
    throw ShapeError("Graph: feature rows must match node count");
  }
}

Graph Graph::from_edges(int n, const std::vector<Edge>& edges, const std::vector<int>& weights) {
  if (!weights.empty() && weights.size() != edges.size()) {
    throw ShapeError("Graph: weights must have one entry per edge");
  }
  Graph g(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [i, j] = edges[e];
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw RangeError("Graph: edge (" + std::to_string(i) + "," + std::to_string(j) +
                       ") out of range for n=" + std::to_string(n));
    }
    if (i == j) throw RangeError("Graph: self-loop at node " + std::to_string(i));
    g.add_edge(i, j, weights.empty() ? 1.0 : weights[e]);
  }
  return g;
}

int Graph::num_edges() const {
  int count = 0;
  for (int j = 0; j < n(); ++j)
    for (int i = 0; i < j; ++i) count += adjacency(i, j) != 0.0;
  return count;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (adjacency(i, j) != 0.0) out.emplace_back(i, j);
  return out;
}

std::vector<int> Graph::edge_weights() const {
  std::vector<int> out;
  for (int i = 0; i < n(); ++i)
    for (int j = i + 1; j < n(); ++j)
      if (adjacency(i, j) != 0.0) out.push_back(static_cast<int>(adjacency(i, j)));
  return out;
}

std::vector<std::vector<int>> Graph::neighbors() const {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n()));
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j)
      if (i != j && adjacency(i, j) != 0.0) adj[static_cast<std::size_t>(i)].push_back(j);
  return adj;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n()), 0);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j)
      if (i != j && adjacency(i, j) != 0.0) ++deg[static_cast<std::size_t>(i)];
  return deg;
}

bool Graph::is_binary() const {
  return (adjacency.array() == 0.0 || adjacency.array() == 1.0).all();
}

void Graph::validate(int max_weight) const {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("Graph: adjacency must be square");
  for (int i = 0; i < n(); ++i) {
    if (adjacency(i, i) != 0.0) throw RangeError("Graph: nonzero diagonal at " + std::to_string(i));
    for (int j = 0; j < n(); ++j) {
      const double a = adjacency(i, j);
      if (a != adjacency(j, i)) throw ShapeError("Graph: adjacency is not symmetric");
      if (a < 0 || a > max_weight || a != std::floor(a)) {
        throw RangeError("Graph: adjacency entry outside the edge alphabet");
      }
    }
  }
}

bool operator==(const Graph& a, const Graph& b) {
  if (a.adjacency.rows() != b.adjacency.rows() || a.adjacency != b.adjacency) return false;
  if (a.features.has_value() != b.features.has_value()) return false;
  if (a.features) {
    return a.features->rows() == b.features->rows() &&
           a.features->cols() == b.features->cols() && *a.features == *b.features;
  }
  return true;
}

Matrix normalized_laplacian(const Graph& g) {
  const int n = g.n();
  Vector inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    const double d = g.adjacency.row(i).sum();
    inv_sqrt_deg(i) = d > 0 ? 1.0 / std::sqrt(d) : 0.0;
  }
  Matrix l = Matrix::Identity(n, n);
  l.noalias() -= inv_sqrt_deg.asDiagonal() * g.adjacency * inv_sqrt_deg.asDiagonal();
  return sym_part(l);
}

SpectralData truncated_spectrum(const Matrix& laplacian, int k) {
  if (k < 1 || k > laplacian.rows()) {
    throw RangeError("truncated_spectrum: k=" + std::to_string(k) + " outside [1, " +
                     std::to_string(laplacian.rows()) + "]");
  }
  SymEig eig = sym_eig(laplacian);
  return {eig.values.head(k), eig.vectors.leftCols(k)};
}

Matrix reconstruct_laplacian(const SpectralData& s) {
  Matrix l = s.frame * s.lambdas.asDiagonal() * s.frame.transpose();
  return sym_part(l);
}

Graph pad_graph(const Graph& g, int n_max) {
  if (g.n() > n_max) {
    throw RangeError("pad_graph: graph has " + std::to_string(g.n()) + " nodes, more than n_max=" +
                     std::to_string(n_max));
  }
  Graph out(n_max);
  out.adjacency.topLeftCorner(g.n(), g.n()) = g.adjacency;
  if (g.features) {
    Matrix f = Matrix::Zero(n_max, g.features->cols());
    f.topRows(g.n()) = *g.features;
    out.features = std::move(f);
  }
  return out;
}

namespace {

template <typename Quantize>
Graph finalize(const Matrix& m, Quantize quantize) {
  if (m.rows() != m.cols()) throw ShapeError("finalize: matrix must be square");
  const int n = static_cast<int>(m.rows());
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = quantize(0.5 * (m(i, j) + m(j, i)));
      g.adjacency(i, j) = v;
      g.adjacency(j, i) = v;
    }
  }
  return g;
}

}  // namespace

Graph finalize_binary(const Matrix& m) {
  return finalize(m, [](double v) { return v >= 0.5 ? 1.0 : 0.0; });
}

int quantize_bond(double value) {
  if (value < 0.5) return 0;
  if (value < 1.5) return 1;
  if (value < 2.5) return 2;
  return 3;
}

Graph finalize_bonds(const Matrix& m) {
  return finalize(m, [](double v) { return static_cast<double>(quantize_bond(v)); });
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes) {
  const int m = static_cast<int>(nodes.size());
  Graph out(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      out.adjacency(a, b) = g.adjacency(nodes[static_cast<std::size_t>(a)],
                                        nodes[static_cast<std::size_t>(b)]);
  if (g.features) {
    Matrix f(m, g.features->cols());
    for (int a = 0; a < m; ++a) f.row(a) = g.features->row(nodes[static_cast<std::size_t>(a)]);
    out.features = std::move(f);
  }
  return out;
}

Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
  // Node i of the input becomes node perm[i] of the output.
  const int n = g.n();
  std::vector<int> inverse(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
  return induced_subgraph(g, inverse);
}

Graph strip_isolated(const Graph& g) {
  std::vector<int> keep;
  const auto deg = g.degrees();
  for (int i = 0; i < g.n(); ++i)
    if (deg[static_cast<std::size_t>(i)] > 0) keep.push_back(i);
  return induced_subgraph(g, keep);
}

std::vector<int> connected_components(const Graph& g) {
  const int n = g.n();
  const auto adj = g.neighbors();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(s);
    comp[static_cast<std::size_t>(s)] = next;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = next;
          frontier.push(w);
        }
      }
    }
    ++next;
  }
  return comp;
}

bool is_connected(const Graph& g) {
  if (g.n() == 0) return true;
  const auto comp = connected_components(g);
  return *std::max_element(comp.begin(), comp.end()) == 0;
}

std::vector<double> clustering_coefficients(const Graph& g) {
  const auto adj = g.neighbors();
  std::vector<double> out(static_cast<std::size_t>(g.n()), 0.0);
  for (int v = 0; v < g.n(); ++v) {
    const auto& nb = adj[static_cast<std::size_t>(v)];
    const auto d = static_cast<double>(nb.size());
    if (nb.size() < 2) continue;
    int links = 0;
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b) links += g.has_edge(nb[a], nb[b]);
    out[static_cast<std::size_t>(v)] = 2.0 * links / (d * (d - 1.0));
  }
  return out;
}

std::vector<double> histogram(const std::vector<double>& values, int bins, double lo, double hi) {
  std::vector<double> h(static_cast<std::size_t>(bins), 0.0);
  const double width = (hi - lo) / bins;
  for (double v : values) {
    auto b = static_cast<long>(std::floor((v - lo) / width));
    b = std::clamp<long>(b, 0, bins - 1);
    h[static_cast<std::size_t>(b)] += 1.0;
  }
  return h;
}

GraphStatistics graph_statistics(const Graph& g, const StatisticsOptions& opts) {
  GraphStatistics s;
  const auto deg = g.degrees();
  const int max_deg = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  s.degree_histogram.assign(static_cast<std::size_t>(max_deg + 1), 0.0);
  for (int d : deg) s.degree_histogram[static_cast<std::size_t>(d)] += 1.0;

  s.clustering_histogram = histogram(clustering_coefficients(g), opts.clustering_bins, 0.0, 1.0);

  s.node_orbits = orbit_counts(g);
  for (int o = 0; o < kNumOrbits; ++o) {
    s.orbit_totals[static_cast<std::size_t>(o)] = s.node_orbits.col(o).sum();
    s.orbit_means[static_cast<std::size_t>(o)] =
        g.n() > 0 ? s.orbit_totals[static_cast<std::size_t>(o)] / g.n() : 0.0;
  }

  std::vector<double> eigs;
  if (g.n() > 0) {
    const Vector ev = sym_eig(normalized_laplacian(g)).values;
    // Snap so eigenvalues sitting on a bin edge (1.0 is common) bin the same
    // way regardless of rounding noise from the node order.
    for (Eigen::Index i = 0; i < ev.size(); ++i) eigs.push_back(std::round(ev(i) * 1e9) / 1e9);
  }
  s.spectrum_histogram = histogram(eigs, opts.spectrum_bins, 0.0, 2.0);
  return s;
}

}  // namespace sfmg
