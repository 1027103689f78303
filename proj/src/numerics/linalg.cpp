#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "sfmg/errors.hpp"
#include "sfmg/numerics.hpp"

namespace sfmg {

namespace {

void require_square(const Matrix& m, const char* op) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(op) + ": expected a square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

// Largest-magnitude entry positive; on near-ties the first index wins.
void normalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - 1e-10 * std::max(1.0, peak)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace

SymEig sym_eig(const Matrix& m) {
  require_square(m, "sym_eig");
  const Eigen::Index n = m.rows();
  const double fro = m.norm();
  if ((m - m.transpose()).norm() > 1e-10 * fro) {
    throw ShapeError("sym_eig: matrix is not symmetric");
  }

  Matrix a = sym_part(m);
  Matrix v = Matrix::Identity(n, n);
  const double tol = 1e-12 * fro;
  constexpr int kMaxSweeps = 100;

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_norm() <= tol) break;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        // A <- J^T A J with J = [[c, s], [-s, c]] acting on (p, q).
        auto col_p = a.col(p);
        auto col_q = a.col(q);
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = col_p(k);
          const double akq = col_q(k);
          col_p(k) = c * akp - s * akq;
          col_q(k) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        auto vp = v.col(p);
        auto vq = v.col(q);
        for (Eigen::Index k = 0; k < n; ++k) {
          const double x = vp(k);
          const double y = vq(k);
          vp(k) = c * x - s * y;
          vq(k) = s * x + c * y;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) {
    throw NonConvergenceError("sym_eig: Jacobi sweeps did not converge", off_norm());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  SymEig out{Vector(n), Matrix(n, n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    out.vectors.col(j) = v.col(src);
    normalize_sign(out.vectors.col(j));
  }
  return out;
}

ThinQr thin_qr(const Matrix& m) {
  const Eigen::Index n = m.rows();
  const Eigen::Index k = m.cols();
  if (n < k) {
    throw ShapeError("thin_qr: need rows >= cols, got " + std::to_string(n) + "x" +
                     std::to_string(k));
  }
  const double scale = m.norm();
  ThinQr out{Matrix::Zero(n, k), Matrix::Zero(k, k)};
  for (Eigen::Index j = 0; j < k; ++j) {
    Vector col = m.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      if (j == 0) break;
      const Vector proj = out.q.leftCols(j).transpose() * col;
      col.noalias() -= out.q.leftCols(j) * proj;
      out.r.col(j).head(j) += proj;
    }
    const double norm = col.norm();
    if (!(norm > 1e-12 * scale)) {
      throw DegenerateInputError(
          "thin_qr: column " + std::to_string(j) + " is linearly dependent on earlier columns",
          static_cast<long>(j));
    }
    out.r(j, j) = norm;
    out.q.col(j) = col / norm;
  }
  return out;
}

Matrix orthonormal_completion(const Matrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index k = basis.cols();
  if (k > n) throw ShapeError("orthonormal_completion: more columns than rows");
  Matrix q(n, n);
  q.leftCols(k) = basis;
  Eigen::Index filled = k;
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  while (filled < n) {
    // Pick the unused standard basis vector with the largest residual.
    Eigen::Index best = -1;
    double best_norm = -1.0;
    Vector best_vec;
    for (Eigen::Index e = 0; e < n; ++e) {
      if (used[static_cast<std::size_t>(e)]) continue;
      Vector v = Vector::Unit(n, e);
      for (int pass = 0; pass < 2; ++pass) {
        v.noalias() -= q.leftCols(filled) * (q.leftCols(filled).transpose() * v);
      }
      const double nv = v.norm();
      if (nv > best_norm + 1e-12) {
        best_norm = nv;
        best = e;
        best_vec = std::move(v);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    q.col(filled++) = best_vec / best_norm;
  }
  return q.rightCols(n - k);
}

Matrix matrix_exp(const Matrix& m) {
  require_square(m, "matrix_exp");
  const Eigen::Index n = m.rows();
  if (n == 0) return m;
  if (m.isZero(0.0)) return Matrix::Identity(n, n);

  static constexpr double b[] = {64764752532480000.0,
                                 32382376266240000.0,
                                 7771770303897600.0,
                                 1187353796428800.0,
                                 129060195264000.0,
                                 10559470521600.0,
                                 670442572800.0,
                                 33522128640.0,
                                 1323241920.0,
                                 40840800.0,
                                 960960.0,
                                 16380.0,
                                 182.0,
                                 1.0};
  constexpr double kTheta13 = 5.371920351148152;

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kTheta13) {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / kTheta13))));
  }
  const Matrix a = m / std::ldexp(1.0, squarings);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;

  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;
  const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
                   b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

Matrix sqrtm_denman_beavers(const Matrix& m) {
  require_square(m, "sqrtm");
  const Eigen::Index n = m.rows();
  Matrix y = m;
  Matrix z = Matrix::Identity(n, n);
  constexpr int kMaxIter = 100;
  for (int it = 0; it < kMaxIter; ++it) {
    const Matrix y_inv = y.partialPivLu().inverse();
    const Matrix z_inv = z.partialPivLu().inverse();
    Matrix y_next = 0.5 * (y + z_inv);
    z = 0.5 * (z + y_inv);
    const double change = (y_next - y).norm();
    y = std::move(y_next);
    if (change <= 1e-15 * std::max(1.0, y.norm())) return y;
  }
  throw NonConvergenceError("sqrtm: Denman-Beavers iteration did not converge", 0.0);
}

Matrix orthogonal_log(const Matrix& v) {
  require_square(v, "orthogonal_log");
  const Eigen::Index n = v.rows();
  const Matrix id = Matrix::Identity(n, n);
  const double orth_err = (v.transpose() * v - id).norm();
  if (orth_err > 1e-8) {
    throw PreconditionError("orthogonal_log: input is not orthogonal (residual " +
                            std::to_string(orth_err) + ")");
  }
  if (n == 0) return v;

  // For orthogonal V the singular values of V + I are |lambda + 1|, i.e. the
  // square roots of the eigenvalues of 2I + V + V^T.
  const Matrix gram = 2.0 * id + v + v.transpose();
  const double min_gap_sq = sym_eig(sym_part(gram)).values(0);
  constexpr double kGap = 1e-6;
  if (min_gap_sq <= kGap * kGap) {
    throw BranchCutError("orthogonal_log: eigenvalue at -1, principal logarithm undefined");
  }

  Matrix y = v;
  int roots = 0;
  while ((y - id).norm() >= 0.5) {
    y = sqrtm_denman_beavers(y);
    if (++roots > 60) {
      throw NonConvergenceError("orthogonal_log: square-root reduction stalled",
                                (y - id).norm());
    }
  }

  // log(I + X) = X - X^2/2 + X^3/3 - ...
  const Matrix x = y - id;
  Matrix power = x;
  Matrix log = x;
  for (int j = 2; j < 200; ++j) {
    power = power * x;
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    log += (sign / j) * power;
    if (power.norm() / j < 1e-18) break;
  }
  return skew_part(std::ldexp(1.0, roots) * log);
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = rng.normal();
  return out;
}

}  // namespace sfmg
