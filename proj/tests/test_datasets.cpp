#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "sfmg/datasets.hpp"
#include "sfmg/errors.hpp"

using namespace sfmg;

namespace {

DatasetSpec spec_for(Family f, int count, std::uint64_t seed = 1) {
  DatasetSpec s;
  s.family = f;
  s.count = count;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("family names round trip") {
  for (Family f : {Family::EgoSmall, Family::CommunitySmall, Family::Planar, Family::Sbm,
                   Family::Grid}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("enzymes"), ConfigError);
}

TEST_CASE("community-small") {
  auto graphs = generate(spec_for(Family::CommunitySmall, 100));
  CHECK(graphs.size() == 100);
  for (const Graph& g : graphs) {
    CHECK(g.n() % 2 == 0);
    CHECK(g.n() >= 12);
    CHECK(g.n() <= 20);
    CHECK(is_connected(g));
    const int half = g.n() / 2;
    int inter = 0;
    for (auto [i, j] : g.edges()) inter += (i < half) != (j < half);
    CHECK(inter == static_cast<int>(std::ceil(0.05 * g.n())));
  }
}

TEST_CASE("ego-small") {
  auto graphs = generate(spec_for(Family::EgoSmall, 60));
  for (const Graph& g : graphs) {
    CHECK(g.n() >= 4);
    CHECK(g.n() <= 18);
    CHECK(is_connected(g));
    // Node 0 is the ego and touches everyone.
    CHECK(g.degrees()[0] == g.n() - 1);
  }
}

TEST_CASE("planar") {
  auto graphs = generate(spec_for(Family::Planar, 20));
  for (const Graph& g : graphs) {
    CHECK(g.n() == 64);
    CHECK(is_connected(g));
    CHECK(is_planar(g));
    // A triangulation of 64 points has between 2n-3 and 3n-6 edges.
    CHECK(g.num_edges() >= 2 * 64 - 3);
    CHECK(g.num_edges() <= 3 * 64 - 6);
  }
}

TEST_CASE("delaunay of a square plus centre") {
  std::vector<std::array<double, 2>> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}};
  Rng rng(1);
  auto edges = delaunay_edges(pts, 0.0, rng);
  CHECK(edges.size() == 8);  // 4 hull edges and 4 spokes
  for (int i = 0; i < 4; ++i) {
    CHECK(std::find(edges.begin(), edges.end(), Edge{i, 4}) != edges.end());
  }
}

TEST_CASE("delaunay edges satisfy the empty-circle property") {
  Rng rng(2);
  std::vector<std::array<double, 2>> pts(40);
  for (auto& p : pts) p = {rng.uniform(), rng.uniform()};
  Rng jitter(3);
  auto edges = delaunay_edges(pts, 0.0, jitter);
  std::set<Edge> set(edges.begin(), edges.end());
  // Every triangle of the output must have an empty circumcircle.
  int triangles = 0;
  for (auto [a, b] : edges)
    for (int c = b + 1; c < 40; ++c) {
      if (!set.count({a, c}) || !set.count({b, c})) continue;
      auto [ax, ay] = pts[a];
      auto [bx, by] = pts[b];
      auto [cx, cy] = pts[c];
      const double d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
      const double ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) +
                         (cx * cx + cy * cy) * (ay - by)) / d;
      const double uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) +
                         (cx * cx + cy * cy) * (bx - ax)) / d;
      const double r2 = (ax - ux) * (ax - ux) + (ay - uy) * (ay - uy);
      bool empty = true;
      for (int p = 0; p < 40; ++p) {
        if (p == a || p == b || p == c) continue;
        const double q = (pts[p][0] - ux) * (pts[p][0] - ux) + (pts[p][1] - uy) * (pts[p][1] - uy);
        if (q < r2 * (1 - 1e-9)) empty = false;
      }
      // Separating triangles (3-cycles that are not faces) may enclose points;
      // only faces are required to be empty, and faces contain no other point.
      bool has_inside = false;
      for (int p = 0; p < 40 && empty == false && !has_inside; ++p) {
        if (p == a || p == b || p == c) continue;
        auto side = [&](std::array<double, 2> u, std::array<double, 2> v) {
          return (v[0] - u[0]) * (pts[p][1] - u[1]) - (v[1] - u[1]) * (pts[p][0] - u[0]);
        };
        const double s1 = side(pts[a], pts[b]), s2 = side(pts[b], pts[c]),
                     s3 = side(pts[c], pts[a]);
        has_inside = (s1 > 0 && s2 > 0 && s3 > 0) || (s1 < 0 && s2 < 0 && s3 < 0);
      }
      if (!has_inside) {
        CHECK(empty);
        ++triangles;
      }
    }
  CHECK(triangles > 40);
}

TEST_CASE("sbm") {
  auto graphs = generate(spec_for(Family::Sbm, 20));
  for (const Graph& g : graphs) {
    CHECK(g.n() >= 44);
    CHECK(g.n() <= 192);
    CHECK(is_connected(g));
  }
}

TEST_CASE("grid") {
  auto graphs = generate(spec_for(Family::Grid, 20));
  for (const Graph& g : graphs) {
    CHECK(g.n() >= 100);
    CHECK(g.n() <= 400);
    for (int d : g.degrees()) {
      CHECK(d >= 2);
      CHECK(d <= 4);
    }
    for (double c : clustering_coefficients(g)) CHECK(c == 0.0);
    CHECK(g.num_edges() > 0);
  }
}

TEST_CASE("generation is deterministic and thread-count independent") {
  for (Family f : {Family::CommunitySmall, Family::Planar, Family::EgoSmall}) {
    auto a = generate(spec_for(f, 12, 5));
    auto b = generate(spec_for(f, 12, 5), 3);
    CHECK(a == b);
    CHECK(generate_one(spec_for(f, 12, 5), 7) == a[7]);
    CHECK(a != generate(spec_for(f, 12, 6)));
  }
  // Byte-level determinism of the serialized form.
  auto g = generate(spec_for(Family::CommunitySmall, 5, 42));
  CHECK(graphs_to_jsonl(g) == graphs_to_jsonl(generate(spec_for(Family::CommunitySmall, 5, 42))));
}

TEST_CASE("rejection cap is an error") {
  DatasetSpec s = spec_for(Family::Grid, 1);
  s.params.grid_min_n = 500;
  CHECK_THROWS_AS(generate(s), Error);
}

TEST_CASE("split") {
  auto s = split_indices(100, 0.8, 3);
  CHECK(s.train.size() == 80);
  CHECK(s.test.size() == 20);
  std::set<int> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 100);

  auto small = split_indices(5, 0.8, 3);
  CHECK(small.train.size() == 4);
  CHECK(small.test.size() == 1);

  CHECK(split_indices(100, 0.8, 3).test == s.test);
  CHECK(split_indices(100, 0.8, 4).test != s.test);
  CHECK_THROWS_AS(split_indices(0, 0.8, 1), PreconditionError);

  auto graphs = generate(spec_for(Family::CommunitySmall, 10));
  auto [train, test] = split(graphs, 0.8, 1);
  CHECK(train.size() == 8);
  CHECK(test.size() == 2);
}

TEST_CASE("jsonl round trip and errors") {
  Graph plain = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}});
  Graph bonds = Graph::from_edges(3, {{0, 1}, {1, 2}}, {2, 3});
  Graph feats = Graph::from_edges(2, {{0, 1}});
  feats.features = Matrix(2, 2);
  *feats.features << 0.1, -2.5, 1e-17, 3.0;
  Graph empty(0);
  std::vector<Graph> graphs{plain, bonds, feats, empty};

  std::string text = graphs_to_jsonl(graphs);
  CHECK(graphs_from_jsonl(text) == graphs);
  CHECK(text.find("weights") != std::string::npos);
  CHECK(graphs_from_jsonl("").empty());

  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "sfmg_graphs_test.jsonl";
  save_graphs(path.string(), graphs);
  CHECK(load_graphs(path.string()) == graphs);
  fs::remove(path);

  auto line_of = [](const std::string& t) -> long {
    try {
      graphs_from_jsonl(t);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("{\"n\":2,\"edges\":[[0,1]]}\n{\"n\":2,\"edges\":[[0,2]]}\n") == 2);
  CHECK(line_of("{\"n\":2,\"edges\":[[0,1]]}\n\nnot json\n") == 3);
  CHECK(line_of("{\"n\":3,\"edges\":[[1,1]]}") == 1);
  CHECK(line_of("{\"edges\":[]}") == 1);
  CHECK(line_of("{\"n\":2,\"edges\":[[0,1]],\"weights\":[7]}") == 1);
}
