#include <cmath>
#include <string>

#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"

namespace sfmg {

int euler_steps(double step_size) {
  if (!(step_size > 0.0 && step_size <= 1.0)) {
    throw RangeError("Euler step size must lie in (0, 1], got " + std::to_string(step_size));
  }
  return static_cast<int>(std::ceil(1.0 / step_size - 1e-9));
}

Matrix euler_sample_euclidean(const VectorFieldNet& net, const Matrix& x0, double step_size,
                              const Matrix& cond) {
  const int steps = euler_steps(step_size);
  Matrix x = x0;
  for (int i = 0; i < steps; ++i) {
    Vector t = Vector::Constant(x.cols(), i * step_size);
    x += step_size * net.forward(x, t, cond);
  }
  return x;
}

Vector euler_sample_euclidean(const VectorFieldNet& net, const Vector& x0, double step_size,
                              const Vector& cond) {
  return euler_sample_euclidean(net, Matrix(x0), step_size,
                                cond.size() ? Matrix(cond) : Matrix())
      .col(0);
}

StiefelPoint euler_sample_stiefel(const VectorFieldNet& net, const StiefelPoint& u0,
                                  double step_size, const Vector& cond,
                                  const StiefelObserver& observer) {
  const int steps = euler_steps(step_size);
  const int n = u0.n(), k = u0.k();
  const Matrix c = cond.size() ? Matrix(cond) : Matrix();
  StiefelPoint u = u0;
  if (observer) observer(0, u);
  for (int i = 0; i < steps; ++i) {
    Vector t = Vector::Constant(1, i * step_size);
    Matrix z = unflatten_rows(net.forward(flatten_rows(u.frame()), t, c).col(0), n, k);
    u = stiefel_exp(u, Matrix(step_size * project_tangent(z, u).value));
    if (observer) observer(i + 1, u);
  }
  return u;
}

std::vector<StiefelPoint> euler_sample_stiefel(const VectorFieldNet& net,
                                               std::vector<StiefelPoint> u, double step_size,
                                               const Matrix& cond) {
  if (u.empty()) return u;
  const int steps = euler_steps(step_size);
  const int n = u.front().n(), k = u.front().k();
  const Eigen::Index batch = static_cast<Eigen::Index>(u.size());
  Matrix x(n * k, batch);
  for (int i = 0; i < steps; ++i) {
    for (Eigen::Index b = 0; b < batch; ++b) x.col(b) = flatten_rows(u[b].frame());
    Vector t = Vector::Constant(batch, i * step_size);
    Matrix z = net.forward(x, t, cond);
    for (Eigen::Index b = 0; b < batch; ++b) {
      Matrix v = step_size * project_tangent(unflatten_rows(z.col(b), n, k), u[b]).value;
      u[b] = stiefel_exp(u[b], v);
    }
  }
  return u;
}

Matrix sample_reconstructed_laplacians(const VectorFieldNet& eigval_net,
                                       const VectorFieldNet& eigvec_net, int n, int count,
                                       double step_size, Rng& rng) {
  const int k = eigval_net.config().input_dim;
  Matrix lam0(k, count);
  for (int b = 0; b < count; ++b)
    for (int i = 0; i < k; ++i) lam0(i, b) = rng.normal();
  std::vector<StiefelPoint> u0;
  u0.reserve(count);
  for (int b = 0; b < count; ++b) u0.push_back(haar_sample(n, k, rng));

  Matrix lam = euler_sample_euclidean(eigval_net, lam0, step_size);
  std::vector<StiefelPoint> u = euler_sample_stiefel(eigvec_net, std::move(u0), step_size, lam);

  Matrix out(static_cast<Eigen::Index>(n) * n, count);
  for (int b = 0; b < count; ++b) {
    const Matrix& f = u[b].frame();
    out.col(b) = flatten_rows(f * lam.col(b).asDiagonal() * f.transpose());
  }
  return out;
}

namespace {

std::vector<Graph> finish(const SfmgModel& model, const Matrix& x1) {
  const int n = model.n;
  const Eigen::Index adj = static_cast<Eigen::Index>(n) * n;
  std::vector<Graph> out;
  out.reserve(x1.cols());
  for (Eigen::Index b = 0; b < x1.cols(); ++b) {
    Matrix a = unflatten_rows(x1.col(b).head(adj), n, n);
    Graph g = model.bonds ? finalize_bonds(a) : finalize_binary(a);
    if (model.feature_dim > 0) {
      g.features = unflatten_rows(x1.col(b).tail(static_cast<Eigen::Index>(n) *
                                                  model.feature_dim),
                                  n, model.feature_dim);
    }
    out.push_back(std::move(g));
  }
  return out;
}

void check_model(const SfmgModel& model) {
  const int dim = model.n * model.n + model.n * model.feature_dim;
  if (model.post.config().input_dim != dim) {
    throw ShapeError("SfmgModel: postprocess net expects dimension " +
                     std::to_string(model.post.config().input_dim) + ", model implies " +
                     std::to_string(dim));
  }
}

}  // namespace

std::vector<Graph> sfmg_sample(const SfmgModel& model, int count, Rng& rng) {
  check_model(model);
  if (count <= 0) return {};
  const int n = model.n;
  const Eigen::Index adj = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index dim = model.post.config().input_dim;
  Matrix l0 = sample_reconstructed_laplacians(model.eigval, model.eigvec, n, count,
                                              model.step_size, rng);
  Matrix x0(dim, count);
  x0.topRows(adj) = l0;
  for (int b = 0; b < count; ++b)
    for (Eigen::Index i = adj; i < dim; ++i) x0(i, b) = rng.normal();
  return finish(model, euler_sample_euclidean(model.post, x0, model.step_size));
}

Graph sfmg_sample(const SfmgModel& model, Rng& rng) { return sfmg_sample(model, 1, rng)[0]; }

std::vector<Graph> noise_fm_sample(const SfmgModel& model, int count, Rng& rng) {
  check_model(model);
  if (count <= 0) return {};
  const Eigen::Index dim = model.post.config().input_dim;
  Matrix x0(dim, count);
  for (int b = 0; b < count; ++b)
    for (Eigen::Index i = 0; i < dim; ++i) x0(i, b) = rng.normal();
  return finish(model, euler_sample_euclidean(model.post, x0, model.step_size));
}

}  // namespace sfmg
