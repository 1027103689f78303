#include <algorithm>
#include <limits>

#include "sfmg/errors.hpp"
#include "sfmg/eval.hpp"

namespace sfmg {

bool planar_valid(const Graph& g) { return g.n() > 0 && is_connected(g) && is_planar(g); }

namespace {

constexpr int kMinBlocks = 2, kMaxBlocks = 5;
constexpr int kMinBlockSize = 20, kMaxBlockSize = 40;

/// Lloyd iterations from k-means++ seeds; returns labels of the best of
/// `restarts` runs by inertia.
std::vector<int> kmeans(const Matrix& x, int k, Rng& rng, int restarts = 10, int iters = 100) {
  const Eigen::Index n = x.rows();
  std::vector<int> best_labels;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Matrix centers(k, x.cols());
    centers.row(0) = x.row(rng.uniform_int(0, n - 1));
    Vector d2(n);
    for (int c = 1; c < k; ++c) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < c; ++j) m = std::min(m, (x.row(i) - centers.row(j)).squaredNorm());
        d2(i) = m;
      }
      const double total = d2.sum();
      Eigen::Index pick = 0;
      if (total > 0) {
        double target = rng.uniform() * total;
        while (pick < n - 1 && target >= d2(pick)) target -= d2(pick++);
      } else {
        pick = rng.uniform_int(0, n - 1);
      }
      centers.row(c) = x.row(pick);
    }
    std::vector<int> labels(static_cast<std::size_t>(n), -1);
    double inertia = 0;
    for (int it = 0; it < iters; ++it) {
      bool changed = false;
      inertia = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        int arg = 0;
        double m = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          const double d = (x.row(i) - centers.row(j)).squaredNorm();
          if (d < m) {
            m = d;
            arg = j;
          }
        }
        inertia += m;
        if (labels[static_cast<std::size_t>(i)] != arg) {
          labels[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      Matrix sums = Matrix::Zero(k, x.cols());
      std::vector<int> counts(static_cast<std::size_t>(k), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
        ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
      }
      for (int j = 0; j < k; ++j)
        if (counts[static_cast<std::size_t>(j)] > 0) centers.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

}  // namespace

bool sbm_valid(const Graph& g) {
  if (g.n() < kMinBlocks * kMinBlockSize || g.n() > kMaxBlocks * kMaxBlockSize) return false;
  const SymEig eig = sym_eig(normalized_laplacian(g));
  int k = kMinBlocks;
  double gap = -1;
  for (int c = kMinBlocks; c <= kMaxBlocks; ++c) {
    const double d = eig.values(c) - eig.values(c - 1);
    if (d > gap) {
      gap = d;
      k = c;
    }
  }
  Matrix emb = eig.vectors.leftCols(k);
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    const double norm = emb.row(i).norm();
    if (norm > 1e-12) emb.row(i) /= norm;
  }
  Rng rng(0);
  const std::vector<int> labels = kmeans(emb, k, rng);
  std::vector<int> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  return std::all_of(sizes.begin(), sizes.end(),
                     [](int s) { return s >= kMinBlockSize && s <= kMaxBlockSize; });
}

double validity(const std::vector<Graph>& generated, Family family) {
  if (family != Family::Planar && family != Family::Sbm) {
    throw PreconditionError("validity is defined for planar and sbm only");
  }
  if (generated.empty()) return 0.0;
  int ok = 0;
  for (const Graph& g : generated) ok += family == Family::Planar ? planar_valid(g) : sbm_valid(g);
  return 100.0 * ok / static_cast<double>(generated.size());
}

}  // namespace sfmg
