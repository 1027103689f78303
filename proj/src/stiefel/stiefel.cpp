#include "sfmg/stiefel.hpp"

#include <cmath>
#include <string>

#include "sfmg/errors.hpp"

namespace sfmg {

namespace {

void require_same_shape(const Matrix& z, const Matrix& y, const char* who) {
  if (z.rows() != y.rows() || z.cols() != y.cols()) {
    throw ShapeError(std::string(who) + ": expected " + std::to_string(y.rows()) + "x" +
                     std::to_string(y.cols()) + ", got " + std::to_string(z.rows()) + "x" +
                     std::to_string(z.cols()));
  }
}

// Orthonormal Q (n x r, r = min(k, n - k)) spanning the part of col(x)
// orthogonal to u, padded with standard-basis directions when x is rank
// deficient. x must already be orthogonal to u.
Matrix complement_basis(const Matrix& u, const Matrix& x) {
  const Eigen::Index n = u.rows();
  const Eigen::Index k = u.cols();
  const Eigen::Index r = std::min(k, n - k);
  if (r == 0) return Matrix(n, 0);
  if (n - k <= k) return orthonormal_completion(u);

  Matrix basis(n, k + r);
  basis.leftCols(k) = u;
  Eigen::Index filled = k;
  const double scale = std::max(1.0, x.norm());

  auto orthogonalize = [&](Vector v) {
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
    }
    return v;
  };

  for (Eigen::Index j = 0; j < x.cols() && filled < k + r; ++j) {
    Vector v = orthogonalize(x.col(j));
    double norm = v.norm();
    if (norm > 1e-12 * scale) basis.col(filled++) = v / norm;
  }
  while (filled < k + r) {
    double best_norm = -1.0;
    Vector best_v;
    for (Eigen::Index i = 0; i < n; ++i) {
      Vector v = orthogonalize(Vector::Unit(n, i));
      double norm = v.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best_v = v;
      }
    }
    basis.col(filled++) = best_v / best_norm;
  }
  return basis.rightCols(r);
}

}  // namespace

StiefelPoint::StiefelPoint(Matrix frame, double tol) : frame_(std::move(frame)) {
  if (frame_.cols() == 0 || frame_.cols() > frame_.rows()) {
    throw ShapeError("StiefelPoint: need 1 <= k <= n, got n=" + std::to_string(frame_.rows()) +
                     " k=" + std::to_string(frame_.cols()));
  }
  double res = orthonormality_residual(frame_);
  if (!(res <= tol)) {
    throw PreconditionError("StiefelPoint: columns not orthonormal (residual " +
                            std::to_string(res) + ")");
  }
}

StiefelPoint StiefelPoint::trusted(Matrix frame) {
  StiefelPoint p;
  p.frame_ = std::move(frame);
  return p;
}

double orthonormality_residual(const Matrix& frame) {
  return (frame.transpose() * frame - Matrix::Identity(frame.cols(), frame.cols())).norm();
}

double tangency_residual(const Matrix& y, const Matrix& v) {
  Matrix a = y.transpose() * v;
  return (a + a.transpose()).norm();
}

TangentVector project_tangent(const Matrix& z, const StiefelPoint& y) {
  const Matrix& f = y.frame();
  require_same_shape(z, f, "project_tangent");
  Matrix ytz = f.transpose() * z;
  Matrix value = f * skew_part(ytz) + (z - f * ytz);
  return {y, std::move(value)};
}

Matrix project_normal(const Matrix& z, const StiefelPoint& y) {
  const Matrix& f = y.frame();
  require_same_shape(z, f, "project_normal");
  return f * sym_part(f.transpose() * z);
}

StiefelPoint stiefel_exp(const StiefelPoint& u, const TangentVector& v) {
  return stiefel_exp(u, v.value);
}

StiefelPoint stiefel_exp(const StiefelPoint& u, const Matrix& v) {
  const Matrix& f = u.frame();
  require_same_shape(v, f, "stiefel_exp");
  double res = tangency_residual(f, v);
  if (res > 1e-6 * std::max(1.0, v.norm())) {
    throw PreconditionError("stiefel_exp: v is not tangent at U (residual " +
                            std::to_string(res) + ")");
  }
  if (v.isZero(0.0)) return u;

  const Eigen::Index k = f.cols();
  Matrix a = skew_part(f.transpose() * v);
  Matrix x = v - f * (f.transpose() * v);
  Matrix q = complement_basis(f, x);
  const Eigen::Index r = q.cols();
  Matrix b = q.transpose() * x;

  Matrix block = Matrix::Zero(k + r, k + r);
  block.topLeftCorner(k, k) = a;
  block.bottomLeftCorner(r, k) = b;
  block.topRightCorner(k, r) = -b.transpose();
  Matrix mn = matrix_exp(block).leftCols(k);
  return StiefelPoint::trusted(f * mn.topRows(k) + q * mn.bottomRows(r));
}

TangentVector stiefel_log(const StiefelPoint& u0, const StiefelPoint& u1,
                          const LogOptions& opts) {
  const Matrix& f0 = u0.frame();
  const Matrix& f1 = u1.frame();
  require_same_shape(f1, f0, "stiefel_log");
  const Eigen::Index k = f0.cols();

  Matrix m = f0.transpose() * f1;
  Matrix x = f1 - f0 * m;
  Matrix q = complement_basis(f0, x);
  const Eigen::Index r = q.cols();
  Matrix nblk = q.transpose() * x;

  Matrix v(k + r, k + r);
  v.leftCols(k) << m, nblk;
  if (r > 0) {
    v.rightCols(r) = orthonormal_completion(v.leftCols(k));
    // Rotate the completion so its lower block is symmetric positive
    // semidefinite, keeping det(V) = +1.
    Eigen::JacobiSVD<Matrix> svd(v.bottomRightCorner(r, r),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix d = svd.matrixU();
    Matrix rot = svd.matrixV() * d.transpose();
    Matrix candidate = v;
    candidate.rightCols(r) = v.rightCols(r) * rot;
    if (candidate.determinant() < 0) {
      d.col(r - 1) *= -1.0;
      candidate.rightCols(r) = v.rightCols(r) * (svd.matrixV() * d.transpose());
    }
    v = candidate;
  }

  Matrix l;
  double c_norm = 0.0;
  int it = 0;
  for (;; ++it) {
    l = orthogonal_log(v);
    if (r == 0) break;
    Matrix c = l.bottomRightCorner(r, r);
    c_norm = c.norm();
    if (c_norm <= opts.tol) break;
    if (it >= opts.max_iter) {
      throw NonConvergenceError("stiefel_log: no convergence after " +
                                    std::to_string(opts.max_iter) + " iterations (||C|| = " +
                                    std::to_string(c_norm) + ")",
                                c_norm);
    }
    v.rightCols(r) = v.rightCols(r) * matrix_exp(-c);
  }

  Matrix value = f0 * l.topLeftCorner(k, k);
  if (r > 0) value += q * l.bottomLeftCorner(r, k);
  return {u0, std::move(value)};
}

StiefelPoint geodesic_interpolate(const StiefelPoint& u0, const StiefelPoint& u1, double t,
                                  const LogOptions& opts) {
  if (t == 0.0) return u0;
  TangentVector v = stiefel_log(u0, u1, opts);
  return stiefel_exp(u0, Matrix(t * v.value));
}

TangentVector conditional_vector_field(const StiefelPoint& ut, const StiefelPoint& u0,
                                       const StiefelPoint& u1, const LogOptions& opts) {
  if ((ut.frame() - u1.frame()).norm() <= 1e-10) {
    return {ut, Matrix::Zero(ut.n(), ut.k())};
  }
  double speed = stiefel_log(u0, u1, opts).value.norm();
  return conditional_vector_field(ut, u1, speed, opts);
}

TangentVector conditional_vector_field(const StiefelPoint& ut, const StiefelPoint& u1,
                                       double speed, const LogOptions& opts) {
  if ((ut.frame() - u1.frame()).norm() <= 1e-10) {
    return {ut, Matrix::Zero(ut.n(), ut.k())};
  }
  TangentVector lt = stiefel_log(ut, u1, opts);
  double norm = lt.value.norm();
  if (norm == 0.0) return {ut, Matrix::Zero(ut.n(), ut.k())};
  lt.value *= speed / norm;
  return lt;
}

StiefelPoint haar_sample(int n, int k, Rng& rng) {
  if (k < 1 || k > n) {
    throw ShapeError("haar_sample: need 1 <= k <= n, got n=" + std::to_string(n) +
                     " k=" + std::to_string(k));
  }
  for (;;) {
    Matrix g = gaussian_matrix(n, k, rng);
    try {
      return StiefelPoint::trusted(thin_qr(g).q);
    } catch (const DegenerateInputError&) {
      // Probability zero; draw again.
    }
  }
}

}  // namespace sfmg
