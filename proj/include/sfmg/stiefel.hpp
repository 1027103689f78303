#pragma once

#include "sfmg/numerics.hpp"
#include "sfmg/rng.hpp"

namespace sfmg {

/// A point of V_k(R^n): an n x k matrix with orthonormal columns.
class StiefelPoint {
 public:
  StiefelPoint() = default;
  /// Throws ShapeError if k > n or k == 0, PreconditionError if
  /// ||F^T F - I||_F exceeds `tol`.
  explicit StiefelPoint(Matrix frame, double tol = 1e-8);

  /// Skips the orthonormality check; for frames produced by this module.
  static StiefelPoint trusted(Matrix frame);

  const Matrix& frame() const { return frame_; }
  int n() const { return static_cast<int>(frame_.rows()); }
  int k() const { return static_cast<int>(frame_.cols()); }

 private:
  Matrix frame_;
};

struct TangentVector {
  StiefelPoint base;
  Matrix value;
};

/// ||F^T F - I||_F.
double orthonormality_residual(const Matrix& frame);
/// ||Y^T v + v^T Y||_F.
double tangency_residual(const Matrix& y, const Matrix& v);

TangentVector project_tangent(const Matrix& z, const StiefelPoint& y);
Matrix project_normal(const Matrix& z, const StiefelPoint& y);

/// Canonical-metric geodesic at t = 1.
StiefelPoint stiefel_exp(const StiefelPoint& u, const TangentVector& v);
StiefelPoint stiefel_exp(const StiefelPoint& u, const Matrix& v);

struct LogOptions {
  double tol = 1e-9;
  int max_iter = 100;
};

/// Riemannian logarithm by Zimmermann's algebraic iteration. Throws
/// NonConvergenceError (carrying ||C||_F) after max_iter sweeps and lets
/// BranchCutError from orthogonal_log propagate.
TangentVector stiefel_log(const StiefelPoint& u0, const StiefelPoint& u1,
                          const LogOptions& opts = {});

StiefelPoint geodesic_interpolate(const StiefelPoint& u0, const StiefelPoint& u1,
                                  double t, const LogOptions& opts = {});

/// Log(Ut, U1) rescaled to the speed ||Log(U0, U1)||; zero when Ut == U1.
TangentVector conditional_vector_field(const StiefelPoint& ut, const StiefelPoint& u0,
                                       const StiefelPoint& u1,
                                       const LogOptions& opts = {});
/// Same field with the speed supplied by the caller.
TangentVector conditional_vector_field(const StiefelPoint& ut, const StiefelPoint& u1,
                                       double speed, const LogOptions& opts = {});

StiefelPoint haar_sample(int n, int k, Rng& rng);

}  // namespace sfmg
