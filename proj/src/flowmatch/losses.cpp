#include <cmath>

#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"

namespace sfmg {

void adamw_step(Vector& params, const GradientSet& grads, AdamWState& state, double lr,
                double weight_decay, double beta1, double beta2, double eps) {
  if (grads.size() != params.size()) {
    throw ShapeError("adamw_step: gradient size does not match parameters");
  }
  if (state.m.size() != params.size()) {
    state.m = Vector::Zero(params.size());
    state.v = Vector::Zero(params.size());
    state.step = 0;
  }
  ++state.step;
  state.m = beta1 * state.m + (1.0 - beta1) * grads;
  state.v = beta2 * state.v + (1.0 - beta2) * grads.cwiseProduct(grads);
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  params.array() -= lr * ((state.m.array() / c1) / ((state.v.array() / c2).sqrt() + eps) +
                          weight_decay * params.array());
}

Vector flatten_rows(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

Matrix unflatten_rows(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw ShapeError("unflatten_rows: size mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v[i * cols + j];
  return m;
}

Vector euclidean_cfm_target(const Vector& x0, const Vector& x1, double t) {
  if (x0.size() != x1.size()) throw ShapeError("euclidean_cfm_target: dimension mismatch");
  Vector xt = x0 + t * (x1 - x0);
  Vector rest = x1 - xt;
  const double rest_norm = rest.norm();
  if (rest_norm <= 1e-12) return x1 - x0;
  return ((x1 - x0).norm() / rest_norm) * rest;
}

LossResult cfm_loss_euclidean(const VectorFieldNet& net, const Vector& x0, const Vector& x1,
                              double t, const Vector& cond) {
  Vector xt = x0 + t * (x1 - x0);
  Vector target = euclidean_cfm_target(x0, x1, t);
  ForwardCache cache;
  Vector tv = Vector::Constant(1, t);
  Vector pred = net.forward(xt, tv, cond.size() ? Matrix(cond) : Matrix(), &cache).col(0);
  Vector diff = pred - target;
  return {diff.squaredNorm(), net.backward(cache, 2.0 * diff)};
}

LossResult cfm_loss_stiefel(const VectorFieldNet& net, const StiefelPoint& u0,
                            const StiefelPoint& u1, double t, const Vector& cond,
                            const LogOptions& opts) {
  const int n = u0.n(), k = u0.k();
  TangentVector l0 = stiefel_log(u0, u1, opts);
  StiefelPoint ut = stiefel_exp(u0, Matrix(t * l0.value));
  TangentVector target = conditional_vector_field(ut, u1, l0.value.norm(), opts);

  ForwardCache cache;
  Vector tv = Vector::Constant(1, t);
  Vector z = net.forward(flatten_rows(ut.frame()), tv, cond.size() ? Matrix(cond) : Matrix(),
                         &cache)
                 .col(0);
  Matrix pred = project_tangent(unflatten_rows(z, n, k), ut).value;
  Matrix diff = pred - target.value;
  // The tangent projection is self-adjoint, so it maps the residual back
  // onto the raw output unchanged in form.
  Matrix dz = project_tangent(2.0 * diff, ut).value;
  return {diff.squaredNorm(), net.backward(cache, flatten_rows(dz))};
}

}  // namespace sfmg
