#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles/oracles.hpp"
#include "sfmg/datasets.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/eval.hpp"

using namespace sfmg;

namespace {

Graph complete_graph(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph grid_graph(int w, int h) {
  Graph g(w * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) g.add_edge(r * w + c, r * w + c + 1);
      if (r + 1 < h) g.add_edge(r * w + c, (r + 1) * w + c);
    }
  return g;
}

Graph cycle(int n) {
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

std::vector<int> random_perm(int n, Rng& rng) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.uniform_int(0, i)]);
  return p;
}

std::vector<std::vector<double>> random_vectors(int count, int dim, Rng& rng) {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(count));
  for (auto& v : out) {
    v.resize(static_cast<std::size_t>(dim));
    for (double& x : v) x = rng.uniform(0, 3);
  }
  return out;
}

}  // namespace

TEST_CASE("mmd of a set with itself is zero") {
  Rng rng(1);
  for (BaseDistance base :
       {BaseDistance::Euclidean, BaseDistance::TotalVariation, BaseDistance::EarthMover}) {
    auto s = random_vectors(15, 6, rng);
    CHECK(std::abs(mmd(s, s, {base, 1.0, 1.0})) <= 1e-12);
    auto shuffled = s;
    std::reverse(shuffled.begin(), shuffled.end());
    auto t = random_vectors(9, 6, rng);
    CHECK(mmd(shuffled, t, {base, 1.0, 1.0}) == doctest::Approx(mmd(s, t, {base, 1.0, 1.0})).epsilon(1e-12));
    CHECK(mmd(s, t, {base, 1.0, 1.0}) >= -1e-12);
  }
  CHECK_THROWS_AS(mmd({}, {{1.0}}, {}), PreconditionError);
}

TEST_CASE("singleton sets") {
  const std::vector<double> x{0.3, -1.0}, y{1.2, 0.4};
  const KernelSpec rbf{BaseDistance::Euclidean, 0.7};
  const double d2 = 0.9 * 0.9 + 1.4 * 1.4;
  CHECK(mmd({x}, {y}, rbf) == doctest::Approx(2 * (1 - std::exp(-d2 / (2 * 0.49)))).epsilon(1e-12));
}

TEST_CASE("earth mover and total variation kernels") {
  const KernelSpec emd{BaseDistance::EarthMover, 1.0, 1.0};
  CHECK(kernel_distance({1, 0}, {0, 1}, emd) == doctest::Approx(oracle::emd_by_cdf({1, 0}, {0, 1}, 1.0)));
  CHECK(kernel_value({1, 0}, {0, 1}, emd) == doctest::Approx(std::exp(-0.5)));
  // Moving a quarter of the mass three bins and the rest one bin.
  CHECK(kernel_distance({4, 0, 0, 0}, {0, 3, 0, 1}, {BaseDistance::EarthMover, 1.0, 0.5}) ==
        doctest::Approx(0.5 * (0.75 * 1 + 0.25 * 3)));
  // Unnormalized inputs of different length are padded and normalized.
  CHECK(kernel_distance({2, 2}, {1, 1, 0}, emd) == doctest::Approx(0.0));
  CHECK(kernel_distance({1, 0}, {0, 1}, {BaseDistance::TotalVariation, 1.0}) == doctest::Approx(1.0));
  CHECK(kernel_distance({1, 1}, {1, 0, 1}, {BaseDistance::TotalVariation, 1.0}) == doctest::Approx(0.5));

  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    auto v = random_vectors(2, 30, rng);
    CHECK(kernel_distance(v[0], v[1], {BaseDistance::EarthMover, 1.0, 0.1}) ==
          doctest::Approx(oracle::emd_by_cdf(v[0], v[1], 0.1)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(kernel_value({1}, {1}, {BaseDistance::Euclidean, 0.0}), PreconditionError);
}

TEST_CASE("block kernel averages per-block distances") {
  const KernelSpec spec{BaseDistance::EarthMover, 1.0, 1.0, 2};
  CHECK(kernel_distance({1, 0, 1, 0}, {0, 1, 1, 0}, spec) == doctest::Approx(0.5));
  CHECK_THROWS_AS(kernel_distance({1, 0, 1}, {0, 1, 1}, spec), ShapeError);
}

TEST_CASE("benchmark metrics: self, separation and relabeling") {
  DatasetSpec ds;
  ds.family = Family::CommunitySmall;
  ds.count = 20;
  ds.seed = 4;
  auto graphs = generate(ds);
  auto self = benchmark_metrics(graphs, graphs);
  CHECK(std::abs(self.degree) <= 1e-12);
  CHECK(std::abs(self.clustering) <= 1e-12);
  CHECK(std::abs(self.orbit) <= 1e-12);
  CHECK(std::abs(self.spectral) <= 1e-12);

  std::vector<Graph> grids, cliques;
  for (int i = 0; i < 10; ++i) {
    grids.push_back(grid_graph(3 + i % 4, 3 + i / 4));
    cliques.push_back(complete_graph(6 + i));
  }
  auto sep = benchmark_metrics(grids, cliques);
  CHECK(sep.degree > 0.1);
  CHECK(sep.clustering > 0.1);
  CHECK(sep.orbit > 0.1);
  CHECK(sep.spectral > 0.1);

  Rng rng(5);
  std::vector<Graph> permuted;
  for (const Graph& g : graphs) permuted.push_back(permute_graph(g, random_perm(g.n(), rng)));
  std::vector<Graph> other(graphs.begin(), graphs.begin() + 7);
  auto a = benchmark_metrics(other, graphs);
  MetricOptions threaded;
  threaded.jobs = 3;
  auto b = benchmark_metrics(other, permuted, threaded);
  CHECK(a.degree == doctest::Approx(b.degree).epsilon(1e-12));
  CHECK(a.clustering == doctest::Approx(b.clustering).epsilon(1e-12));
  CHECK(a.orbit == doctest::Approx(b.orbit).epsilon(1e-12));
  CHECK(a.spectral == doctest::Approx(b.spectral).epsilon(1e-12));
}

TEST_CASE("orbit MMD matches the brute-force orbit oracle") {
  Rng rng(6);
  std::vector<Graph> gs, rs;
  for (int i = 0; i < 8; ++i) gs.push_back(oracle::erdos_renyi(5 + i % 8, 0.4, rng));
  for (int i = 0; i < 8; ++i) rs.push_back(oracle::erdos_renyi(6 + i % 7, 0.3, rng));
  auto features = [](const std::vector<Graph>& set) {
    std::vector<std::vector<double>> out;
    for (const Graph& g : set) {
      const Matrix o = oracle::brute_force_orbits(g);
      std::vector<double> f;
      for (int c = 0; c < kNumOrbits; ++c) f.push_back(o.col(c).sum() / g.n());
      out.push_back(f);
    }
    return out;
  };
  const MetricOptions opts;
  const double expected = mmd(features(gs), features(rs), opts.orbit);
  CHECK(std::abs(benchmark_metrics(gs, rs).orbit - expected) <= 1e-12);
}

TEST_CASE("ratio") {
  BenchmarkMmds base{0.1, 0.2, 0.0, 0.4};
  CHECK(mmd_ratio(base, base) == doctest::Approx(1.0));
  BenchmarkMmds model{0.2, 0.2, 5.0, 0.8};
  CHECK(mmd_ratio(model, base) == doctest::Approx((2.0 + 1.0 + 2.0) / 3));
  CHECK(mmd_ratio({}, base) == 0.0);
}

TEST_CASE("evaluate: baseline ratio and self comparison") {
  DatasetSpec ds;
  ds.count = 30;
  ds.seed = 8;
  auto [train, test] = split(generate(ds), 0.8, 8);
  auto base = evaluate(train, test, train, std::nullopt);
  CHECK(base.ratio == doctest::Approx(1.0));
  auto self = evaluate(test, test, train, Family::CommunitySmall);
  CHECK(self.ratio <= 1e-9);
  CHECK_FALSE(self.validity.has_value());

  auto j = to_json(base);
  CHECK(j.contains("mmd"));
  CHECK(j["mmd"].contains("orbit"));
  CHECK(j["uniqueness"].get<double>() >= 0);
  CHECK(j["novelty"].get<double>() <= 100);
  const std::string text = format_report(base);
  CHECK(text.find("Deg.") != std::string::npos);
  CHECK(text.find("Uniq.") != std::string::npos);
}

TEST_CASE("isomorphism") {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    Graph g = oracle::erdos_renyi(12, 0.3, rng);
    Graph h = permute_graph(g, random_perm(12, rng));
    CHECK(isomorphic(g, h));
    CHECK(wl_hash(g) == wl_hash(h));
  }
  // Same degree sequence and same color-refinement hash, not isomorphic.
  Graph two_triangles = Graph::from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  CHECK(wl_hash(cycle(6)) == wl_hash(two_triangles));
  CHECK_FALSE(isomorphic(cycle(6), two_triangles));

  Graph grid = grid_graph(20, 20);
  CHECK(isomorphic(grid, permute_graph(grid, random_perm(400, rng))));
  CHECK_FALSE(isomorphic(grid, grid_graph(16, 25)));

  Graph a = Graph::from_edges(3, {{0, 1}, {1, 2}}, {1, 2});
  Graph b = Graph::from_edges(3, {{0, 1}, {1, 2}}, {2, 1});
  Graph c = Graph::from_edges(3, {{0, 1}, {1, 2}}, {2, 2});
  CHECK(isomorphic(a, b));
  CHECK_FALSE(isomorphic(a, c));
  CHECK(isomorphic(Graph(0), Graph(0)));
}

TEST_CASE("uniqueness and novelty") {
  Rng rng(10);
  std::vector<Graph> train;
  for (int i = 0; i < 10; ++i) train.push_back(cycle(4 + i));

  std::vector<Graph> same(5, complete_graph(4));
  auto d = uniqueness_novelty(same, train);
  CHECK(d.uniqueness == doctest::Approx(100.0 / 5));
  CHECK(d.novelty == doctest::Approx(100.0));

  std::vector<Graph> copies;
  for (const Graph& g : train) copies.push_back(permute_graph(g, random_perm(g.n(), rng)));
  d = uniqueness_novelty(copies, train);
  CHECK(d.uniqueness == doctest::Approx(100.0));
  CHECK(d.novelty == doctest::Approx(0.0));

  std::vector<Graph> fresh;
  for (int i = 0; i < 6; ++i) fresh.push_back(complete_graph(3 + i));
  d = uniqueness_novelty(fresh, train);
  CHECK(d.uniqueness == doctest::Approx(100.0));
  CHECK(d.novelty == doctest::Approx(100.0));
  fresh.push_back(cycle(5));
  d = uniqueness_novelty(fresh, train);
  CHECK(d.novelty == doctest::Approx(600.0 / 7));
}

TEST_CASE("planar validity") {
  DatasetSpec ds;
  ds.family = Family::Planar;
  ds.count = 10;
  CHECK(validity(generate(ds), Family::Planar) == doctest::Approx(100.0));

  Graph k5_path = complete_graph(5);
  Graph g(8);
  for (auto [i, j] : k5_path.edges()) g.add_edge(i, j);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(6, 7);
  CHECK_FALSE(planar_valid(g));
  CHECK_FALSE(planar_valid(Graph::from_edges(4, {{0, 1}, {2, 3}})));
  CHECK(validity({g, grid_graph(4, 4)}, Family::Planar) == doctest::Approx(50.0));
  CHECK_THROWS_AS(validity({g}, Family::Grid), PreconditionError);
}

TEST_CASE("sbm validity") {
  DatasetSpec ds;
  ds.family = Family::Sbm;
  ds.count = 20;
  ds.seed = 11;
  CHECK(validity(generate(ds), Family::Sbm) >= 90.0);

  Rng rng(12);
  Graph g(75);
  for (int i = 0; i < 75; ++i)
    for (int j = i + 1; j < 75; ++j)
      if (rng.bernoulli(i / 25 == j / 25 ? 0.3 : 0.005)) g.add_edge(i, j);
  CHECK(sbm_valid(g));
  CHECK(sbm_valid(permute_graph(g, random_perm(75, rng))));

  CHECK_FALSE(sbm_valid(complete_graph(30)));
  // One dense block of 60: no split into 20..40 communities is supported.
  CHECK_FALSE(sbm_valid(complete_graph(60)));
}

TEST_CASE("wavelet signatures and spectral fidelity") {
  Rng rng(13);
  DatasetSpec ds;
  ds.count = 20;
  auto spectra = [&](std::uint64_t seed) {
    ds.seed = seed;
    std::vector<SpectralData> out;
    for (const Graph& g : generate(ds)) out.push_back(truncated_spectrum(normalized_laplacian(pad_graph(g, 20)), 2));
    return out;
  };
  auto ref = spectra(1), train = spectra(2), gen = spectra(3);

  const auto sig = wavelet_signature(ref[0]);
  CHECK(sig.size() == 200);
  for (int b = 0; b < 4; ++b) {
    double mass = 0;
    for (int i = 0; i < 50; ++i) mass += sig[static_cast<std::size_t>(b * 50 + i)];
    CHECK(mass == doctest::Approx(1.0));
  }

  auto self = spectral_fidelity(ref, ref, train);
  CHECK(std::abs(self.eigenvalue_mmd) <= 1e-12);
  CHECK(std::abs(self.eigenvector_mmd) <= 1e-12);
  CHECK(self.eigenvalue_baseline > 0);

  auto f = spectral_fidelity(gen, ref, train);
  CHECK(f.eigenvalue_ratio > 0);
  CHECK(f.eigenvector_ratio > 0);
  auto random = spectral_fidelity(random_spectra(20, 2, rng), ref, train);
  CHECK(random.eigenvalue_ratio > f.eigenvalue_ratio);
  CHECK(random.eigenvector_ratio == 0.0);  // no frames to compare

  std::vector<SpectralData> constant(5);
  for (SpectralData& s : constant) {
    s.lambdas = Vector::Constant(2, 0.5);
    s.frame = Matrix::Identity(4, 2);
  }
  CHECK(std::abs(spectral_fidelity(constant, constant, train).eigenvalue_mmd) <= 1e-12);
  CHECK(std::abs(spectral_fidelity(constant, constant, train).eigenvector_mmd) <= 1e-12);

  std::vector<SpectralData> k3(1);
  k3[0].lambdas = Vector::Zero(3);
  k3[0].frame = Matrix::Identity(4, 3);
  CHECK_THROWS_AS(spectral_fidelity(k3, ref, train), ShapeError);

  for (const SpectralData& s : random_spectra(50, 3, rng)) {
    CHECK(s.lambdas.minCoeff() >= 0);
    CHECK(s.lambdas.maxCoeff() <= 2);
    CHECK(std::is_sorted(s.lambdas.data(), s.lambdas.data() + 3));
  }
}

TEST_CASE("median heuristic") {
  CHECK(median_heuristic({{0.0}, {3.0}, {4.0}}) == doctest::Approx(3.0));
  CHECK(median_heuristic({{1.0}, {1.0}}) == 1.0);
  CHECK(median_heuristic({{1.0}}) == 1.0);
}
