#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sfmg/datasets.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/parallel.hpp"

namespace sfmg {

namespace {

constexpr std::uint64_t kGraphStreamBase = 1000;
constexpr std::uint64_t kEgoHostStream = 2000;

Rng graph_rng(const DatasetSpec& spec, int index) {
  return Rng(spec.seed, kGraphStreamBase + static_cast<std::uint64_t>(spec.family))
      .split(static_cast<std::uint64_t>(index));
}

[[noreturn]] void give_up(const DatasetSpec& spec, int index) {
  throw Error("generate: " + family_name(spec.family) + " graph " + std::to_string(index) +
              " rejected " + std::to_string(spec.params.max_attempts) + " times");
}

Graph community_small(const FamilyParams& p, Rng& rng) {
  const int half = static_cast<int>(rng.uniform_int(p.community_min_n / 2, p.community_max_n / 2));
  const int n = 2 * half;
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((i < half) == (j < half) && rng.bernoulli(p.community_p_intra)) g.add_edge(i, j);
  const int inter = static_cast<int>(std::ceil(p.community_inter_fraction * n - 1e-12));
  int placed = 0;
  while (placed < inter) {
    const int i = static_cast<int>(rng.uniform_int(0, half - 1));
    const int j = static_cast<int>(rng.uniform_int(half, n - 1));
    if (!g.has_edge(i, j)) {
      g.add_edge(i, j);
      ++placed;
    }
  }
  return g;
}

// Preferential attachment: each new node links to `m` distinct existing nodes
// drawn with probability proportional to degree.
Graph barabasi_albert(int n, int m, Rng& rng) {
  Graph g(n);
  std::vector<int> ends;
  for (int i = 0; i <= m; ++i)
    for (int j = i + 1; j <= m; ++j) {
      g.add_edge(i, j);
      ends.push_back(i);
      ends.push_back(j);
    }
  for (int v = m + 1; v < n; ++v) {
    std::set<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      targets.insert(ends[rng.uniform_int(0, static_cast<std::int64_t>(ends.size()) - 1)]);
    }
    for (int u : targets) {
      g.add_edge(u, v);
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return g;
}

Graph ego_small(const DatasetSpec& spec, const Graph& host, Rng& rng) {
  const FamilyParams& p = spec.params;
  const auto nbrs = host.neighbors();
  for (int attempt = 0; attempt < p.max_attempts; ++attempt) {
    const int c = static_cast<int>(rng.uniform_int(0, host.n() - 1));
    const int size = static_cast<int>(nbrs[c].size()) + 1;
    if (size < p.ego_min_n || size > p.ego_max_n) continue;
    std::vector<int> nodes{c};
    nodes.insert(nodes.end(), nbrs[c].begin(), nbrs[c].end());
    return induced_subgraph(host, nodes);
  }
  return Graph();
}

Graph planar(const FamilyParams& p, Rng& rng) {
  std::vector<std::array<double, 2>> pts(p.planar_n);
  for (auto& q : pts) q = {rng.uniform(), rng.uniform()};
  return Graph::from_edges(p.planar_n, delaunay_edges(pts, p.planar_jitter, rng));
}

Graph sbm(const FamilyParams& p, Rng& rng) {
  const int blocks = static_cast<int>(rng.uniform_int(p.sbm_min_blocks, p.sbm_max_blocks));
  std::vector<int> block_of;
  for (int b = 0; b < blocks; ++b) {
    const int size = static_cast<int>(rng.uniform_int(p.sbm_min_size, p.sbm_max_size));
    block_of.insert(block_of.end(), size, b);
  }
  const int n = static_cast<int>(block_of.size());
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.bernoulli(block_of[i] == block_of[j] ? p.sbm_p_intra : p.sbm_p_inter))
        g.add_edge(i, j);
  return g;
}

Graph grid(int w, int h) {
  Graph g(w * h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      const int v = r * w + c;
      if (c + 1 < w) g.add_edge(v, v + 1);
      if (r + 1 < h) g.add_edge(v, v + w);
    }
  return g;
}

}  // namespace

Family parse_family(const std::string& name) {
  if (name == "ego-small") return Family::EgoSmall;
  if (name == "community-small") return Family::CommunitySmall;
  if (name == "planar") return Family::Planar;
  if (name == "sbm") return Family::Sbm;
  if (name == "grid") return Family::Grid;
  throw ConfigError("unknown dataset family '" + name +
                    "' (expected ego-small, community-small, planar, sbm or grid)");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::EgoSmall: return "ego-small";
    case Family::CommunitySmall: return "community-small";
    case Family::Planar: return "planar";
    case Family::Sbm: return "sbm";
    case Family::Grid: return "grid";
  }
  return "unknown";
}

nlohmann::json to_json(const FamilyParams& p) {
  return {
      {"community_min_n", p.community_min_n}, {"community_max_n", p.community_max_n},
      {"community_p_intra", p.community_p_intra},
      {"community_inter_fraction", p.community_inter_fraction},
      {"ego_host_n", p.ego_host_n}, {"ego_attach", p.ego_attach},
      {"ego_min_n", p.ego_min_n}, {"ego_max_n", p.ego_max_n},
      {"planar_n", p.planar_n}, {"planar_jitter", p.planar_jitter},
      {"sbm_min_blocks", p.sbm_min_blocks}, {"sbm_max_blocks", p.sbm_max_blocks},
      {"sbm_min_size", p.sbm_min_size}, {"sbm_max_size", p.sbm_max_size},
      {"sbm_p_intra", p.sbm_p_intra}, {"sbm_p_inter", p.sbm_p_inter},
      {"sbm_min_n", p.sbm_min_n}, {"sbm_max_n", p.sbm_max_n},
      {"grid_min_side", p.grid_min_side}, {"grid_max_side", p.grid_max_side},
      {"grid_min_n", p.grid_min_n}, {"grid_max_n", p.grid_max_n},
      {"max_attempts", p.max_attempts},
  };
}

Graph generate_one(const DatasetSpec& spec, int index) {
  const FamilyParams& p = spec.params;
  Rng rng = graph_rng(spec, index);
  switch (spec.family) {
    case Family::CommunitySmall:
      for (int a = 0; a < p.max_attempts; ++a) {
        Graph g = community_small(p, rng);
        if (is_connected(g)) return g;
      }
      break;
    case Family::EgoSmall: {
      Rng host_rng(spec.seed, kEgoHostStream);
      Graph g = ego_small(spec, barabasi_albert(p.ego_host_n, p.ego_attach, host_rng), rng);
      if (g.n() > 0) return g;
      break;
    }
    case Family::Planar:
      for (int a = 0; a < p.max_attempts; ++a) {
        Graph g = planar(p, rng);
        if (is_connected(g)) return g;
      }
      break;
    case Family::Sbm:
      for (int a = 0; a < p.max_attempts; ++a) {
        Graph g = sbm(p, rng);
        if (g.n() >= p.sbm_min_n && g.n() <= p.sbm_max_n && is_connected(g)) return g;
      }
      break;
    case Family::Grid:
      for (int a = 0; a < p.max_attempts; ++a) {
        const int w = static_cast<int>(rng.uniform_int(p.grid_min_side, p.grid_max_side));
        const int h = static_cast<int>(rng.uniform_int(p.grid_min_side, p.grid_max_side));
        if (w * h >= p.grid_min_n && w * h <= p.grid_max_n) return grid(w, h);
      }
      break;
  }
  give_up(spec, index);
}

std::vector<Graph> generate(const DatasetSpec& spec, int jobs) {
  if (spec.count < 0) throw ConfigError("generate: negative graph count");
  std::vector<Graph> out(spec.count);
  if (spec.family == Family::EgoSmall) {
    // Every ego graph shares one host; build it once.
    Rng host_rng(spec.seed, kEgoHostStream);
    Graph host = barabasi_albert(spec.params.ego_host_n, spec.params.ego_attach, host_rng);
    for (int i = 0; i < spec.count; ++i) {
      Rng rng = graph_rng(spec, i);
      out[i] = ego_small(spec, host, rng);
      if (out[i].n() == 0) give_up(spec, i);
    }
    return out;
  }
  parallel_for(spec.count, jobs, [&](int i) { out[i] = generate_one(spec, i); });
  return out;
}

std::vector<Edge> delaunay_edges(const std::vector<std::array<double, 2>>& input,
                                 double jitter, Rng& rng) {
  const int n = static_cast<int>(input.size());
  if (n < 2) return {};
  std::vector<std::array<double, 2>> pts = input;
  for (auto& q : pts) {
    q[0] += jitter * rng.uniform(-1.0, 1.0);
    q[1] += jitter * rng.uniform(-1.0, 1.0);
  }
  double lo_x = pts[0][0], hi_x = lo_x, lo_y = pts[0][1], hi_y = lo_y;
  for (const auto& q : pts) {
    lo_x = std::min(lo_x, q[0]);
    hi_x = std::max(hi_x, q[0]);
    lo_y = std::min(lo_y, q[1]);
    hi_y = std::max(hi_y, q[1]);
  }
  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
  const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
  pts.push_back({cx - 100 * span, cy - 100 * span});
  pts.push_back({cx + 100 * span, cy - 100 * span});
  pts.push_back({cx, cy + 100 * span});

  struct Tri {
    int a, b, c;
  };
  auto orient = [&](int a, int b, int c) {
    return (pts[b][0] - pts[a][0]) * (pts[c][1] - pts[a][1]) -
           (pts[b][1] - pts[a][1]) * (pts[c][0] - pts[a][0]);
  };
  // Counter-clockwise triangles, so the in-circle determinant is positive
  // exactly when p lies inside the circumcircle.
  auto in_circle = [&](const Tri& t, int p) {
    const double ax = pts[t.a][0] - pts[p][0], ay = pts[t.a][1] - pts[p][1];
    const double bx = pts[t.b][0] - pts[p][0], by = pts[t.b][1] - pts[p][1];
    const double cx2 = pts[t.c][0] - pts[p][0], cy2 = pts[t.c][1] - pts[p][1];
    return (ax * ax + ay * ay) * (bx * cy2 - cx2 * by) -
               (bx * bx + by * by) * (ax * cy2 - cx2 * ay) +
               (cx2 * cx2 + cy2 * cy2) * (ax * by - bx * ay) >
           0.0;
  };
  auto make = [&](int a, int b, int c) {
    return orient(a, b, c) > 0 ? Tri{a, b, c} : Tri{a, c, b};
  };

  std::vector<Tri> tris{make(n, n + 1, n + 2)};
  for (int p = 0; p < n; ++p) {
    std::map<std::pair<int, int>, int> boundary;
    std::vector<Tri> keep;
    for (const Tri& t : tris) {
      if (in_circle(t, p)) {
        for (auto e : {std::minmax(t.a, t.b), std::minmax(t.b, t.c), std::minmax(t.c, t.a)}) {
          ++boundary[e];
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [e, count] : boundary) {
      if (count == 1) keep.push_back(make(e.first, e.second, p));
    }
    tris = std::move(keep);
  }

  std::set<Edge> edges;
  for (const Tri& t : tris) {
    if (t.a >= n || t.b >= n || t.c >= n) continue;
    edges.insert(std::minmax(t.a, t.b));
    edges.insert(std::minmax(t.b, t.c));
    edges.insert(std::minmax(t.c, t.a));
  }
  return {edges.begin(), edges.end()};
}

SplitIndices split_indices(int size, double train_fraction, std::uint64_t seed) {
  if (size <= 0) throw PreconditionError("split: empty dataset");
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw ConfigError("split: train fraction must lie in [0, 1]");
  }
  std::vector<int> order(size);
  for (int i = 0; i < size; ++i) order[i] = i;
  Rng rng(seed, 3000);
  for (int i = size - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_int(0, i)]);
  }
  int n_train = static_cast<int>(std::floor(train_fraction * size + 1e-9));
  n_train = std::min(n_train, size - 1);
  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.test.assign(order.begin() + n_train, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::pair<std::vector<Graph>, std::vector<Graph>> split(const std::vector<Graph>& dataset,
                                                        double train_fraction,
                                                        std::uint64_t seed) {
  SplitIndices idx = split_indices(static_cast<int>(dataset.size()), train_fraction, seed);
  std::pair<std::vector<Graph>, std::vector<Graph>> out;
  for (int i : idx.train) out.first.push_back(dataset[i]);
  for (int i : idx.test) out.second.push_back(dataset[i]);
  return out;
}

}  // namespace sfmg
