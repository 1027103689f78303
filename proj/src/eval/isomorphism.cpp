#include <algorithm>
#include <map>
#include <numeric>

#include "sfmg/eval.hpp"
#include "sfmg/rng.hpp"

namespace sfmg {

namespace {

std::uint64_t combine(std::uint64_t h, std::uint64_t v) { return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL)); }

std::uint64_t weight_code(double w) { return static_cast<std::uint64_t>(std::llround(w * 16)); }

/// One refinement round: new color from the old color and the sorted
/// multiset of (edge weight, neighbor color).
std::vector<std::uint64_t> refine(const Graph& g, const std::vector<std::vector<int>>& nbrs,
                                  const std::vector<std::uint64_t>& colors) {
  std::vector<std::uint64_t> next(colors.size());
  std::vector<std::uint64_t> items;
  for (int i = 0; i < g.n(); ++i) {
    items.clear();
    for (int j : nbrs[static_cast<std::size_t>(i)])
      items.push_back(combine(weight_code(g.adjacency(i, j)), colors[static_cast<std::size_t>(j)]));
    std::sort(items.begin(), items.end());
    std::uint64_t h = combine(0x5f3759df, colors[static_cast<std::size_t>(i)]);
    for (std::uint64_t v : items) h = combine(h, v);
    next[static_cast<std::size_t>(i)] = h;
  }
  return next;
}

std::size_t class_count(std::vector<std::uint64_t> c) {
  std::sort(c.begin(), c.end());
  return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

/// Refines both graphs in lockstep until neither partition splits further,
/// so equal colors mean the same thing in both.
std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>> stable_colors(const Graph& a,
                                                                                const Graph& b) {
  const auto na = a.neighbors(), nb = b.neighbors();
  std::vector<std::uint64_t> ca(static_cast<std::size_t>(a.n()), 1), cb(static_cast<std::size_t>(b.n()), 1);
  std::size_t classes_a = 1, classes_b = 1;
  for (int round = 0; round <= std::max(a.n(), b.n()); ++round) {
    ca = refine(a, na, ca);
    cb = refine(b, nb, cb);
    const std::size_t xa = class_count(ca), xb = class_count(cb);
    if (round > 0 && xa == classes_a && xb == classes_b) break;
    classes_a = xa;
    classes_b = xb;
  }
  return {std::move(ca), std::move(cb)};
}

struct Matcher {
  const Graph& a;
  const Graph& b;
  const std::vector<std::uint64_t>& ca;
  const std::vector<std::uint64_t>& cb;
  std::vector<int> order;
  std::vector<int> map_ab, used_b;

  bool extend(std::size_t depth) {
    if (depth == order.size()) return true;
    const int u = order[depth];
    for (int v = 0; v < b.n(); ++v) {
      if (used_b[static_cast<std::size_t>(v)] || cb[static_cast<std::size_t>(v)] != ca[static_cast<std::size_t>(u)]) continue;
      bool ok = true;
      for (std::size_t d = 0; d < depth && ok; ++d) {
        const int w = order[d];
        ok = a.adjacency(u, w) == b.adjacency(v, map_ab[static_cast<std::size_t>(w)]);
      }
      if (!ok) continue;
      map_ab[static_cast<std::size_t>(u)] = v;
      used_b[static_cast<std::size_t>(v)] = 1;
      if (extend(depth + 1)) return true;
      used_b[static_cast<std::size_t>(v)] = 0;
    }
    return false;
  }
};

/// BFS order starting from the rarest colors so each new node is adjacent to
/// already-placed ones whenever possible.
std::vector<int> search_order(const Graph& g, const std::vector<std::uint64_t>& colors) {
  std::map<std::uint64_t, int> freq;
  for (auto c : colors) ++freq[c];
  std::vector<int> by_rarity(static_cast<std::size_t>(g.n()));
  std::iota(by_rarity.begin(), by_rarity.end(), 0);
  std::stable_sort(by_rarity.begin(), by_rarity.end(), [&](int x, int y) {
    return freq[colors[static_cast<std::size_t>(x)]] < freq[colors[static_cast<std::size_t>(y)]];
  });
  const auto nbrs = g.neighbors();
  std::vector<int> order;
  std::vector<char> seen(static_cast<std::size_t>(g.n()), 0);
  for (int root : by_rarity) {
    if (seen[static_cast<std::size_t>(root)]) continue;
    seen[static_cast<std::size_t>(root)] = 1;
    std::size_t head = order.size();
    order.push_back(root);
    while (head < order.size()) {
      const int u = order[head++];
      for (int w : nbrs[static_cast<std::size_t>(u)]) {
        if (seen[static_cast<std::size_t>(w)]) continue;
        seen[static_cast<std::size_t>(w)] = 1;
        order.push_back(w);
      }
    }
  }
  return order;
}

}  // namespace

std::uint64_t wl_hash(const Graph& g) {
  const auto nbrs = g.neighbors();
  std::vector<std::uint64_t> colors(static_cast<std::size_t>(g.n()), 1);
  for (int round = 0; round < 3; ++round) colors = refine(g, nbrs, colors);
  std::sort(colors.begin(), colors.end());
  std::uint64_t h = combine(static_cast<std::uint64_t>(g.n()), static_cast<std::uint64_t>(g.num_edges()));
  for (auto c : colors) h = combine(h, c);
  return h;
}

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.n() != b.n() || a.num_edges() != b.num_edges()) return false;
  const auto [ca, cb] = stable_colors(a, b);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  Matcher m{a, b, ca, cb, search_order(a, ca), std::vector<int>(static_cast<std::size_t>(a.n()), -1),
            std::vector<int>(static_cast<std::size_t>(b.n()), 0)};
  return m.extend(0);
}

Diversity uniqueness_novelty(const std::vector<Graph>& generated,
                             const std::vector<Graph>& training) {
  Diversity d;
  if (generated.empty()) return d;
  std::multimap<std::uint64_t, std::size_t> train_by_hash;
  for (std::size_t i = 0; i < training.size(); ++i) train_by_hash.emplace(wl_hash(training[i]), i);

  std::multimap<std::uint64_t, std::size_t> reps;
  int classes = 0, novel = 0;
  for (std::size_t i = 0; i < generated.size(); ++i) {
    const std::uint64_t h = wl_hash(generated[i]);
    bool seen = false;
    for (auto [it, end] = reps.equal_range(h); it != end && !seen; ++it)
      seen = isomorphic(generated[i], generated[it->second]);
    if (!seen) {
      reps.emplace(h, i);
      ++classes;
    }
    bool in_train = false;
    for (auto [it, end] = train_by_hash.equal_range(h); it != end && !in_train; ++it)
      in_train = isomorphic(generated[i], training[it->second]);
    novel += !in_train;
  }
  const double n = static_cast<double>(generated.size());
  d.uniqueness = 100.0 * classes / n;
  d.novelty = 100.0 * novel / n;
  return d;
}

}  // namespace sfmg
