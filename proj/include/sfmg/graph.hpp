#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "sfmg/numerics.hpp"

namespace sfmg {

using Edge = std::pair<int, int>;

/// Undirected simple graph stored as a dense symmetric adjacency matrix.
/// Entries are 0/1 for topology graphs or 0..3 for bond-typed graphs.
struct Graph {
  Matrix adjacency;
  std::optional<Matrix> features;  // n x m node features

  Graph() = default;
  explicit Graph(int n) : adjacency(Matrix::Zero(n, n)) {}
  explicit Graph(Matrix adj, std::optional<Matrix> feats = std::nullopt);

  static Graph from_edges(int n, const std::vector<Edge>& edges,
                          const std::vector<int>& weights = {});

  int n() const { return static_cast<int>(adjacency.rows()); }
  int num_edges() const;
  bool has_edge(int i, int j) const { return adjacency(i, j) != 0.0; }
  void add_edge(int i, int j, double w = 1.0) {
    adjacency(i, j) = w;
    adjacency(j, i) = w;
  }
  /// Edges (i, j) with i < j in row-major order.
  std::vector<Edge> edges() const;
  std::vector<int> edge_weights() const;
  std::vector<std::vector<int>> neighbors() const;
  /// Number of neighbors (not the weighted degree).
  std::vector<int> degrees() const;
  bool is_binary() const;

  /// Throws ShapeError / RangeError if the adjacency is not symmetric,
  /// has a nonzero diagonal, or leaves the {0..max_weight} alphabet.
  void validate(int max_weight = 3) const;
};

bool operator==(const Graph& a, const Graph& b);

/// Truncated spectrum of a normalized Laplacian.
struct SpectralData {
  Vector lambdas;  // ascending, length k
  Matrix frame;    // n x k, orthonormal columns

  int k() const { return static_cast<int>(lambdas.size()); }
  int n() const { return static_cast<int>(frame.rows()); }
};

/// L = I - D^{-1/2} A D^{-1/2}. Zero-degree nodes get a zero entry in
/// D^{-1/2}, so their row and column equal the identity row.
Matrix normalized_laplacian(const Graph& g);

/// The k smallest eigenpairs of a symmetric matrix, sign-fixed as sym_eig.
SpectralData truncated_spectrum(const Matrix& laplacian, int k);

/// U diag(lambda) U^T.
Matrix reconstruct_laplacian(const SpectralData& s);

/// Embeds g in the top-left block of an n_max-node graph; the extra nodes
/// are isolated and carry zero feature rows.
Graph pad_graph(const Graph& g, int n_max);

/// Symmetrize, zero the diagonal and threshold at 0.5.
Graph finalize_binary(const Matrix& m);

/// Symmetrize, zero the diagonal and quantize into bond types 0..3 with bin
/// edges 0.5, 1.5, 2.5.
Graph finalize_bonds(const Matrix& m);

int quantize_bond(double value);

/// Drops zero-degree nodes (feature rows follow their nodes).
Graph strip_isolated(const Graph& g);

Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes);
Graph permute_graph(const Graph& g, const std::vector<int>& perm);

bool is_connected(const Graph& g);
/// Component id per node, ids assigned in order of first node.
std::vector<int> connected_components(const Graph& g);

/// Exact planarity test (left-right criterion).
bool is_planar(const Graph& g);

inline constexpr int kNumOrbits = 15;

/// Per-node counts of the 15 automorphism orbits of connected graphlets on
/// 2, 3 and 4 nodes (orbit 0: edge; 1-3: path and triangle; 4-14: the six
/// connected 4-node graphlets). Returns an n x 15 matrix.
Matrix orbit_counts(const Graph& g);

/// Local clustering coefficient per node (0 for degree < 2).
std::vector<double> clustering_coefficients(const Graph& g);

struct StatisticsOptions {
  int clustering_bins = 100;
  int spectrum_bins = 200;
};

struct GraphStatistics {
  std::vector<double> degree_histogram;      // counts for degree 0..max
  std::vector<double> clustering_histogram;  // counts over [0, 1]
  Matrix node_orbits;                        // n x 15
  std::array<double, kNumOrbits> orbit_totals{};
  std::array<double, kNumOrbits> orbit_means{};  // totals / n
  std::vector<double> spectrum_histogram;    // counts over [0, 2]
};

GraphStatistics graph_statistics(const Graph& g, const StatisticsOptions& opts = {});

/// numpy-style fixed-width histogram on [lo, hi]; the upper edge is
/// included in the last bin and out-of-range values are clamped.
std::vector<double> histogram(const std::vector<double>& values, int bins, double lo, double hi);

}  // namespace sfmg
