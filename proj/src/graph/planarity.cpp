// Left-right planarity test (de Fraysseix-Rosenstiehl criterion in the
// formulation of Brandes). Only the testing phase is implemented; no
// embedding is produced.

#include <algorithm>
#include <vector>

#include "sfmg/graph.hpp"

namespace sfmg {

namespace {

struct Interval {
  int low = -1;
  int high = -1;
  bool empty() const { return low < 0 && high < 0; }
};

struct ConflictPair {
  Interval left;
  Interval right;
  int id = -1;
  void swap_sides() { std::swap(left, right); }
};

class LeftRightTester {
 public:
  explicit LeftRightTester(const Graph& g) : n_(g.n()), adj_(g.neighbors()) {
    edge_id_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_), -1);
    height_.assign(static_cast<std::size_t>(n_), -1);
    parent_edge_.assign(static_cast<std::size_t>(n_), -1);
  }

  bool run() {
    std::vector<int> roots;
    for (int v = 0; v < n_; ++v) {
      if (height_[idx(v)] < 0) {
        height_[idx(v)] = 0;
        roots.push_back(v);
        orient(v);
      }
    }
    const std::size_t m = from_.size();
    ref_.assign(m, -1);
    lowpt_edge_.assign(m, -1);
    stack_bottom_.assign(m, -1);

    ordered_.assign(static_cast<std::size_t>(n_), {});
    for (int v = 0; v < n_; ++v) {
      auto& out = ordered_[idx(v)];
      out = out_edges_of(v);
      std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
        return nesting_depth_[idx(a)] < nesting_depth_[idx(b)];
      });
    }
    for (int r : roots) {
      if (!test(r)) return false;
    }
    return true;
  }

 private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }
  int& edge_at(int v, int w) { return edge_id_[idx(v) * idx(n_) + idx(w)]; }

  std::vector<int> out_edges_of(int v) {
    std::vector<int> out;
    for (int w : adj_[idx(v)]) {
      const int e = edge_at(v, w);
      if (e >= 0) out.push_back(e);
    }
    return out;
  }

  int new_edge(int v, int w) {
    const int e = static_cast<int>(from_.size());
    from_.push_back(v);
    to_.push_back(w);
    lowpt_.push_back(0);
    lowpt2_.push_back(0);
    nesting_depth_.push_back(0);
    edge_at(v, w) = e;
    return e;
  }

  void orient(int v) {
    const int e = parent_edge_[idx(v)];
    for (int w : adj_[idx(v)]) {
      if (edge_at(v, w) >= 0 || edge_at(w, v) >= 0) continue;
      const int vw = new_edge(v, w);
      lowpt_[idx(vw)] = height_[idx(v)];
      lowpt2_[idx(vw)] = height_[idx(v)];
      if (height_[idx(w)] < 0) {  // tree edge
        parent_edge_[idx(w)] = vw;
        height_[idx(w)] = height_[idx(v)] + 1;
        orient(w);
      } else {  // back edge
        lowpt_[idx(vw)] = height_[idx(w)];
      }
      nesting_depth_[idx(vw)] = 2 * lowpt_[idx(vw)];
      if (lowpt2_[idx(vw)] < height_[idx(v)]) nesting_depth_[idx(vw)] += 1;  // chordal

      if (e >= 0) {
        if (lowpt_[idx(vw)] < lowpt_[idx(e)]) {
          lowpt2_[idx(e)] = std::min(lowpt_[idx(e)], lowpt2_[idx(vw)]);
          lowpt_[idx(e)] = lowpt_[idx(vw)];
        } else if (lowpt_[idx(vw)] > lowpt_[idx(e)]) {
          lowpt2_[idx(e)] = std::min(lowpt2_[idx(e)], lowpt_[idx(vw)]);
        } else {
          lowpt2_[idx(e)] = std::min(lowpt2_[idx(e)], lowpt2_[idx(vw)]);
        }
      }
    }
  }

  int top_id() const { return stack_.empty() ? -1 : stack_.back().id; }

  bool conflicting(const Interval& iv, int b) const {
    return !iv.empty() && lowpt_[idx(iv.high)] > lowpt_[idx(b)];
  }

  int lowest(const ConflictPair& p) const {
    if (p.left.empty()) return lowpt_[idx(p.right.low)];
    if (p.right.empty()) return lowpt_[idx(p.left.low)];
    return std::min(lowpt_[idx(p.left.low)], lowpt_[idx(p.right.low)]);
  }

  ConflictPair fresh_pair() { return ConflictPair{{}, {}, next_pair_id_++}; }

  bool test(int v) {
    const int e = parent_edge_[idx(v)];
    const auto& out = ordered_[idx(v)];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const int ei = out[i];
      const int w = to_[idx(ei)];
      stack_bottom_[idx(ei)] = top_id();
      if (ei == parent_edge_[idx(w)]) {
        if (!test(w)) return false;
      } else {
        lowpt_edge_[idx(ei)] = ei;
        ConflictPair p = fresh_pair();
        p.right = Interval{ei, ei};
        stack_.push_back(p);
      }
      if (lowpt_[idx(ei)] < height_[idx(v)]) {
        if (i == 0) {
          lowpt_edge_[idx(e)] = lowpt_edge_[idx(ei)];
        } else if (!add_constraints(ei, e)) {
          return false;
        }
      }
    }
    if (e >= 0) {
      const int u = from_[idx(e)];
      trim_back_edges(u);
      if (lowpt_[idx(e)] < height_[idx(u)] && !stack_.empty()) {
        const int hl = stack_.back().left.high;
        const int hr = stack_.back().right.high;
        if (hl >= 0 && (hr < 0 || lowpt_[idx(hl)] > lowpt_[idx(hr)])) {
          ref_[idx(e)] = hl;
        } else {
          ref_[idx(e)] = hr;
        }
      }
    }
    return true;
  }

  bool add_constraints(int ei, int e) {
    ConflictPair p = fresh_pair();
    // Merge return edges of ei into p.right.
    do {
      ConflictPair q = stack_.back();
      stack_.pop_back();
      if (!q.left.empty()) q.swap_sides();
      if (!q.left.empty()) return false;
      if (lowpt_[idx(q.right.low)] > lowpt_[idx(e)]) {
        if (p.right.empty()) {
          p.right = q.right;
        } else {
          ref_[idx(p.right.low)] = q.right.high;
        }
        p.right.low = q.right.low;
      } else {
        ref_[idx(q.right.low)] = lowpt_edge_[idx(e)];
      }
    } while (top_id() != stack_bottom_[idx(ei)]);

    // Merge conflicting return edges of earlier siblings into p.left.
    while (!stack_.empty() &&
           (conflicting(stack_.back().left, ei) || conflicting(stack_.back().right, ei))) {
      ConflictPair q = stack_.back();
      stack_.pop_back();
      if (conflicting(q.right, ei)) q.swap_sides();
      if (conflicting(q.right, ei)) return false;
      if (p.right.low >= 0) ref_[idx(p.right.low)] = q.right.high;
      if (q.right.low >= 0) p.right.low = q.right.low;
      if (p.left.empty()) {
        p.left = q.left;
      } else if (p.left.low >= 0) {
        ref_[idx(p.left.low)] = q.left.high;
      }
      p.left.low = q.left.low;
    }
    if (!(p.left.empty() && p.right.empty())) stack_.push_back(p);
    return true;
  }

  void trim_back_edges(int u) {
    while (!stack_.empty() && lowest(stack_.back()) == height_[idx(u)]) {
      stack_.pop_back();
    }
    if (stack_.empty()) return;
    ConflictPair p = stack_.back();
    stack_.pop_back();
    while (p.left.high >= 0 && to_[idx(p.left.high)] == u) p.left.high = ref_[idx(p.left.high)];
    if (p.left.high < 0 && p.left.low >= 0) {
      ref_[idx(p.left.low)] = p.right.low;
      p.left.low = -1;
    }
    while (p.right.high >= 0 && to_[idx(p.right.high)] == u) p.right.high = ref_[idx(p.right.high)];
    if (p.right.high < 0 && p.right.low >= 0) {
      ref_[idx(p.right.low)] = p.left.low;
      p.right.low = -1;
    }
    stack_.push_back(p);
  }

  int n_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> edge_id_;
  std::vector<int> height_;
  std::vector<int> parent_edge_;
  std::vector<int> from_, to_;
  std::vector<int> lowpt_, lowpt2_, nesting_depth_;
  std::vector<int> ref_, lowpt_edge_, stack_bottom_;
  std::vector<std::vector<int>> ordered_;
  std::vector<ConflictPair> stack_;
  int next_pair_id_ = 0;
};

}  // namespace

bool is_planar(const Graph& g) {
  const int n = g.n();
  if (n > 2 && g.num_edges() > 3 * n - 6) return false;
  LeftRightTester tester(g);
  return tester.run();
}

}  // namespace sfmg
