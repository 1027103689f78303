#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles/oracles.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/graph.hpp"

using namespace sfmg;

namespace {

Graph complete(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph cycle(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph lattice(int w, int h) {
  Graph g(w * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) g.add_edge(r * w + c, r * w + c + 1);
      if (r + 1 < h) g.add_edge(r * w + c, (r + 1) * w + c);
    }
  return g;
}

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(p[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(rng.uniform_int(0, i))]);
  return p;
}

}  // namespace

TEST_CASE("normalized_laplacian examples") {
  const Matrix k2 = normalized_laplacian(complete(2));
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((k2 - expected).norm() < 1e-15);

  CHECK(normalized_laplacian(Graph(3)) == Matrix::Identity(3, 3));

  const Matrix k3 = normalized_laplacian(complete(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(k3(i, j) == doctest::Approx(i == j ? 1.0 : -0.5));
  const Vector ev = sym_eig(k3).values;
  CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev(1) == doctest::Approx(1.5));
  CHECK(ev(2) == doctest::Approx(1.5));
}

TEST_CASE("normalized Laplacian spectrum stays in [0, 2]") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(1, 25));
    const Graph g = oracle::erdos_renyi(n, rng.uniform(), rng);
    const Vector ev = sym_eig(normalized_laplacian(g)).values;
    CHECK(ev.minCoeff() >= -1e-9);
    CHECK(ev.maxCoeff() <= 2.0 + 1e-9);
  }
}

TEST_CASE("truncated_spectrum examples") {
  const SpectralData s = truncated_spectrum(normalized_laplacian(complete(2)), 1);
  CHECK(s.k() == 1);
  CHECK(std::abs(s.lambdas(0)) < 1e-14);
  CHECK((s.frame - Matrix::Constant(2, 1, 1.0 / std::sqrt(2.0))).norm() < 1e-12);

  Rng rng(22);
  const Graph g = oracle::erdos_renyi(9, 0.4, rng);
  const Matrix l = normalized_laplacian(g);
  const SpectralData full = truncated_spectrum(l, 9);
  CHECK((reconstruct_laplacian(full) - l).norm() < 1e-8);
  CHECK((l * full.frame - full.frame * full.lambdas.asDiagonal()).norm() < 1e-8);

  Graph two(4);
  two.add_edge(0, 1);
  two.add_edge(2, 3);
  const SpectralData d = truncated_spectrum(normalized_laplacian(two), 2);
  CHECK(std::abs(d.lambdas(0)) < 1e-12);
  CHECK(std::abs(d.lambdas(1)) < 1e-12);
  CHECK((d.frame.transpose() * d.frame - Matrix::Identity(2, 2)).norm() < 1e-8);

  CHECK_THROWS_AS(truncated_spectrum(l, 10), RangeError);
  CHECK_THROWS_AS(truncated_spectrum(l, 0), RangeError);
}

TEST_CASE("pad_graph") {
  const Graph k2 = complete(2);
  CHECK(pad_graph(k2, 2) == k2);
  const Graph p = pad_graph(k2, 4);
  CHECK(p.n() == 4);
  CHECK(p.edges() == std::vector<Edge>{{0, 1}});
  CHECK_THROWS_AS(pad_graph(p, 3), RangeError);

  Rng rng(23);
  const Graph g = oracle::erdos_renyi(7, 0.5, rng);
  const Vector orig = sym_eig(normalized_laplacian(g)).values;
  const Vector padded = sym_eig(normalized_laplacian(pad_graph(g, 11))).values;
  std::vector<double> expected(orig.data(), orig.data() + orig.size());
  for (int i = 0; i < 4; ++i) expected.push_back(1.0);
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 11; ++i) CHECK(padded(i) == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("reconstruct_laplacian examples") {
  Rng rng(1);
  SpectralData zero{Vector::Zero(2), oracle::random_orthonormal(5, 2, rng)};
  CHECK(reconstruct_laplacian(zero).norm() == 0.0);

  const double r = 1.0 / std::sqrt(2.0);
  SpectralData one{Vector::Constant(1, 2.0), (Matrix(2, 1) << r, -r).finished()};
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((reconstruct_laplacian(one) - expected).norm() < 1e-15);
}

TEST_CASE("finalize_binary") {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 0.6;
  m(1, 0) = 0.7;
  m(0, 2) = 0.9;
  m(2, 0) = 0.05;  // mean 0.475
  m(1, 1) = 5.0;
  const Graph g = finalize_binary(m);
  CHECK(g.has_edge(0, 1));
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.adjacency(1, 1) == 0.0);
  CHECK(finalize_binary(Matrix::Constant(4, 4, 0.49)).num_edges() == 0);

  Rng rng(24);
  const Matrix a = gaussian_matrix(6, 6, rng);
  CHECK(finalize_binary(a) == finalize_binary(a.transpose()));

  const Graph h = oracle::erdos_renyi(8, 0.5, rng);
  CHECK(finalize_binary(h.adjacency) == h);
}

TEST_CASE("finalize_bonds bins") {
  CHECK(quantize_bond(1.4) == 1);
  CHECK(quantize_bond(1.5) == 2);
  CHECK(quantize_bond(2.5) == 3);
  CHECK(quantize_bond(0.0) == 0);
  CHECK(quantize_bond(0.49) == 0);
  Matrix m = Matrix::Constant(4, 4, 0.75);
  const Graph g = finalize_bonds(m);
  CHECK(g.num_edges() == 6);
  CHECK(g.is_binary());
  CHECK(g.adjacency.diagonal().isZero());
}

TEST_CASE("graph_statistics on small graphs") {
  SUBCASE("4-cycle") {
    const GraphStatistics s = graph_statistics(cycle(4));
    CHECK(s.degree_histogram == std::vector<double>{0, 0, 4});
    CHECK(s.clustering_histogram[0] == 4.0);
    CHECK(s.orbit_totals[8] == 4.0);  // one C4, each node in orbit 8
    CHECK(s.orbit_totals[14] == 0.0);
    CHECK(s.spectrum_histogram.size() == 200u);
  }
  SUBCASE("K4") {
    const Graph k4 = complete(4);
    for (double c : clustering_coefficients(k4)) CHECK(c == 1.0);
    const GraphStatistics s = graph_statistics(k4);
    CHECK(s.clustering_histogram[99] == 4.0);
    CHECK(s.orbit_totals[14] == 4.0);
    CHECK(s.orbit_totals[3] == 12.0);  // 4 triangles x 3 nodes
  }
  SUBCASE("empty graph") {
    const GraphStatistics s = graph_statistics(Graph(5));
    CHECK(s.degree_histogram == std::vector<double>{5});
    CHECK(s.node_orbits.isZero());
  }
}

TEST_CASE("orbit counts agree with exhaustive enumeration") {
  Rng rng(25);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(4, 12));
    const Graph g = oracle::erdos_renyi(n, rng.uniform(0.1, 0.9), rng);
    CHECK((orbit_counts(g) - oracle::brute_force_orbits(g)).norm() == 0.0);
  }
}

TEST_CASE("graph statistics are permutation invariant") {
  Rng rng(26);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = oracle::erdos_renyi(10, 0.4, rng);
    const Graph h = permute_graph(g, random_permutation(10, rng));
    const GraphStatistics a = graph_statistics(g);
    const GraphStatistics b = graph_statistics(h);
    CHECK(a.degree_histogram == b.degree_histogram);
    CHECK(a.clustering_histogram == b.clustering_histogram);
    CHECK(a.orbit_totals == b.orbit_totals);
    CHECK(a.spectrum_histogram == b.spectrum_histogram);
  }
}

TEST_CASE("connectivity and planarity") {
  const Graph k4 = complete(4);
  CHECK(is_planar(k4));
  CHECK(is_connected(k4));
  CHECK_FALSE(is_planar(complete(5)));

  Graph two(4);
  two.add_edge(0, 1);
  two.add_edge(2, 3);
  CHECK(is_planar(two));
  CHECK_FALSE(is_connected(two));

  Graph k33(6);
  for (int a = 0; a < 3; ++a)
    for (int b = 3; b < 6; ++b) k33.add_edge(a, b);
  CHECK_FALSE(is_planar(k33));

  Graph petersen(10);
  for (int i = 0; i < 5; ++i) {
    petersen.add_edge(i, (i + 1) % 5);
    petersen.add_edge(i, i + 5);
    petersen.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  CHECK_FALSE(is_planar(petersen));

  CHECK(is_planar(lattice(12, 9)));
  CHECK(is_planar(cycle(30)));

  // Wheel graphs and their planar augmentations.
  Graph wheel(11);
  for (int i = 1; i <= 10; ++i) {
    wheel.add_edge(0, i);
    wheel.add_edge(i, i % 10 + 1);
  }
  CHECK(is_planar(wheel));

  // A subdivided K5 hidden in a lattice is not planar.
  Graph hidden = pad_graph(lattice(5, 5), 30);
  const int hub[5] = {25, 26, 27, 28, 29};
  int next_path = 0;
  for (int a = 0; a < 5; ++a)
    for (int b = a + 1; b < 5; ++b) {
      // Route every K5 edge through a distinct lattice node.
      const int mid = next_path++;
      hidden.add_edge(hub[a], mid);
      hidden.add_edge(mid, hub[b]);
    }
  CHECK_FALSE(is_planar(hidden));
}

TEST_CASE("planarity is stable under relabeling") {
  Rng rng(27);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(rng.uniform_int(5, 14));
    const Graph g = oracle::erdos_renyi(n, rng.uniform(0.1, 0.5), rng);
    const bool planar = is_planar(g);
    for (int r = 0; r < 3; ++r) CHECK(is_planar(permute_graph(g, random_permutation(n, rng))) == planar);
  }
}

TEST_CASE("strip_isolated and components") {
  Graph g(5);
  g.add_edge(1, 3);
  const Graph s = strip_isolated(g);
  CHECK(s.n() == 2);
  CHECK(s.has_edge(0, 1));
  const auto comp = connected_components(g);
  CHECK(comp == std::vector<int>{0, 1, 2, 1, 3});
}
