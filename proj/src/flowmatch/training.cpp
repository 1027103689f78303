#include <algorithm>
#include <cmath>
#include <string>

#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"

namespace sfmg {

namespace {

// Fixed RNG stream ids so that each stage draws from its own sequence.
enum Stream : std::uint64_t {
  kEigvalStream = 101,
  kEigvecStream = 102,
  kPostStream = 103,
  kNoiseFmStream = 104,
};
constexpr int kMaxLogResamples = 5;

void check_config(const TrainConfig& cfg) {
  if (cfg.steps < 1 || cfg.batch_size < 1 || cfg.hidden_dim < 1 || cfg.num_blocks < 0 ||
      !(cfg.learning_rate > 0) || !(cfg.step_size > 0 && cfg.step_size <= 1)) {
    throw ConfigError("TrainConfig: steps, batch size and hidden size must be positive and "
                      "the step size in (0, 1]");
  }
}

// One optimization step on a batch of Euclidean regression pairs.
double regression_step(VectorFieldNet& net, AdamWState& opt, const TrainConfig& cfg,
                       const Matrix& xt, const Vector& t, const Matrix& cond,
                       const Matrix& target) {
  ForwardCache cache;
  Matrix diff = net.forward(xt, t, cond, &cache) - target;
  const double batch = static_cast<double>(xt.cols());
  const double loss = diff.squaredNorm() / batch;
  GradientSet grad = net.backward(cache, (2.0 / batch) * diff);
  adamw_step(net.parameters(), grad, opt, cfg.learning_rate, cfg.weight_decay);
  return loss;
}

// Straight-line CFM training of a Euclidean field on flattened states. `draw`
// fills one (x0, x1) pair.
template <typename Draw>
TrainResult train_straight(int dim, const TrainConfig& cfg, Stream stream, Draw draw,
                           const StepCallback& on_step) {
  Rng root(cfg.seed, stream);
  Rng init = root.split(0);
  Rng rng = root.split(1);
  TrainResult result{VectorFieldNet(NetConfig{dim, 0, cfg.hidden_dim, cfg.num_blocks}, init),
                     {}};
  AdamWState opt;
  Matrix xt(dim, cfg.batch_size), target(dim, cfg.batch_size);
  Vector t(cfg.batch_size);
  Vector x0(dim), x1(dim);
  for (int step = 0; step < cfg.steps; ++step) {
    for (int b = 0; b < cfg.batch_size; ++b) {
      t[b] = rng.uniform();
      draw(rng, x0, x1);
      xt.col(b) = x0 + t[b] * (x1 - x0);
      target.col(b) = euclidean_cfm_target(x0, x1, t[b]);
    }
    double loss = regression_step(result.net, opt, cfg, xt, t, Matrix(), target);
    result.log.losses.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return result;
}

Vector graph_state(const Graph& g) {
  Vector adj = flatten_rows(g.adjacency);
  if (!g.features) return adj;
  Vector f = flatten_rows(*g.features);
  Vector out(adj.size() + f.size());
  out << adj, f;
  return out;
}

int check_graph_set(const std::vector<Graph>& graphs, const char* who) {
  if (graphs.empty()) throw PreconditionError(std::string(who) + ": empty dataset");
  const int n = graphs.front().n();
  const Eigen::Index fdim = graphs.front().features ? graphs.front().features->cols() : 0;
  for (const Graph& g : graphs) {
    const Eigen::Index gf = g.features ? g.features->cols() : 0;
    if (g.n() != n || gf != fdim) {
      throw ShapeError(std::string(who) + ": graphs must be padded to a common size");
    }
  }
  return n;
}

}  // namespace

std::vector<SpectralData> prepare_spectra(const std::vector<Graph>& graphs, int n_max, int k) {
  std::vector<SpectralData> out;
  out.reserve(graphs.size());
  for (const Graph& g : graphs) {
    out.push_back(truncated_spectrum(normalized_laplacian(pad_graph(g, n_max)), k));
  }
  return out;
}

TrainResult train_eigenvalues(const std::vector<SpectralData>& data, const TrainConfig& cfg,
                              const StepCallback& on_step) {
  check_config(cfg);
  if (data.empty()) throw PreconditionError("train_eigenvalues: empty dataset");
  const int k = data.front().k();
  for (const SpectralData& s : data) {
    if (s.k() != k) throw ShapeError("train_eigenvalues: eigenvalue vectors differ in length");
  }
  auto draw = [&](Rng& rng, Vector& x0, Vector& x1) {
    x1 = data[rng.uniform_int(0, static_cast<std::int64_t>(data.size()) - 1)].lambdas;
    for (int i = 0; i < k; ++i) x0[i] = rng.normal();
  };
  return train_straight(k, cfg, kEigvalStream, draw, on_step);
}

TrainResult train_eigenvectors(const std::vector<SpectralData>& data, const TrainConfig& cfg,
                               const StepCallback& on_step) {
  check_config(cfg);
  if (data.empty()) throw PreconditionError("train_eigenvectors: empty dataset");
  const int n = data.front().n(), k = data.front().k();
  for (const SpectralData& s : data) {
    if (s.n() != n || s.k() != k) throw ShapeError("train_eigenvectors: frames differ in shape");
  }
  std::vector<StiefelPoint> targets;
  for (const SpectralData& s : data) targets.emplace_back(s.frame, 1e-6);

  Rng root(cfg.seed, kEigvecStream);
  Rng init = root.split(0);
  Rng rng = root.split(1);
  TrainResult result{
      VectorFieldNet(NetConfig{n * k, k, cfg.hidden_dim, cfg.num_blocks}, init), {}};
  AdamWState opt;

  for (int step = 0; step < cfg.steps; ++step) {
    Matrix xt(n * k, cfg.batch_size), cond(k, cfg.batch_size);
    Vector t(cfg.batch_size);
    std::vector<StiefelPoint> bases;
    std::vector<Matrix> goals;
    for (int b = 0; b < cfg.batch_size; ++b) {
      const auto idx = rng.uniform_int(0, static_cast<std::int64_t>(data.size()) - 1);
      const double tb = rng.uniform();
      bool ok = false;
      for (int attempt = 0; attempt <= kMaxLogResamples && !ok; ++attempt) {
        StiefelPoint u0 = haar_sample(n, k, rng);
        try {
          TangentVector l0 = stiefel_log(u0, targets[idx]);
          StiefelPoint ut = stiefel_exp(u0, Matrix(tb * l0.value));
          TangentVector goal = conditional_vector_field(ut, targets[idx], l0.value.norm());
          const Eigen::Index col = static_cast<Eigen::Index>(bases.size());
          xt.col(col) = flatten_rows(ut.frame());
          cond.col(col) = data[idx].lambdas;
          t[col] = tb;
          bases.push_back(std::move(ut));
          goals.push_back(std::move(goal.value));
          ok = true;
        } catch (const NonConvergenceError&) {
          ++result.log.log_resamples;
        } catch (const BranchCutError&) {
          ++result.log.log_resamples;
        }
      }
      if (!ok) ++result.log.skipped;
    }
    const Eigen::Index used = static_cast<Eigen::Index>(bases.size());
    if (used == 0) {
      result.log.losses.push_back(result.log.losses.empty() ? 0.0 : result.log.losses.back());
      continue;
    }

    ForwardCache cache;
    Matrix z = result.net.forward(xt.leftCols(used), t.head(used), cond.leftCols(used), &cache);
    Matrix upstream(n * k, used);
    double loss = 0.0;
    for (Eigen::Index b = 0; b < used; ++b) {
      const StiefelPoint& ut = bases[b];
      Matrix pred = project_tangent(unflatten_rows(z.col(b), n, k), ut).value;
      Matrix diff = pred - goals[b];
      result.log.max_tangency_residual =
          std::max({result.log.max_tangency_residual, tangency_residual(ut.frame(), pred),
                    tangency_residual(ut.frame(), goals[b])});
      loss += diff.squaredNorm();
      upstream.col(b) = flatten_rows(project_tangent((2.0 / used) * diff, ut).value);
    }
    loss /= static_cast<double>(used);
    GradientSet grad = result.net.backward(cache, upstream);
    adamw_step(result.net.parameters(), grad, opt, cfg.learning_rate, cfg.weight_decay);
    result.log.losses.push_back(loss);
    if (on_step) on_step(step, loss);
  }
  return result;
}

TrainResult train_postprocess(const std::vector<Graph>& graphs, const VectorFieldNet& eigval_net,
                              const VectorFieldNet& eigvec_net, const TrainConfig& cfg,
                              const StepCallback& on_step) {
  check_config(cfg);
  const int n = check_graph_set(graphs, "train_postprocess");
  const int k = eigval_net.config().input_dim;
  if (eigvec_net.config().input_dim != n * k || eigvec_net.config().cond_dim != k) {
    throw ShapeError("train_postprocess: upstream generators do not match n=" +
                     std::to_string(n) + ", k=" + std::to_string(k));
  }
  std::vector<Vector> states;
  for (const Graph& g : graphs) states.push_back(graph_state(g));
  const int dim = static_cast<int>(states.front().size());
  const int adj_dim = n * n;

  Rng upstream_rng = Rng(cfg.seed, kPostStream).split(2);
  Matrix pool;
  if (cfg.upstream_pool > 0) {
    pool = sample_reconstructed_laplacians(eigval_net, eigvec_net, n, cfg.upstream_pool,
                                           cfg.step_size, upstream_rng);
  }
  Matrix fresh;
  int fresh_used = 0;

  auto draw = [&](Rng& rng, Vector& x0, Vector& x1) {
    x1 = states[rng.uniform_int(0, static_cast<std::int64_t>(states.size()) - 1)];
    if (cfg.upstream_pool > 0) {
      x0.head(adj_dim) = pool.col(rng.uniform_int(0, cfg.upstream_pool - 1));
    } else {
      // Upstream samples are drawn a batch at a time; the batched sampler is
      // much cheaper than one Euler run per pair.
      if (fresh_used == fresh.cols()) {
        fresh = sample_reconstructed_laplacians(eigval_net, eigvec_net, n, cfg.batch_size,
                                                cfg.step_size, upstream_rng);
        fresh_used = 0;
      }
      x0.head(adj_dim) = fresh.col(fresh_used++);
    }
    for (int i = adj_dim; i < dim; ++i) x0[i] = rng.normal();
  };
  return train_straight(dim, cfg, kPostStream, draw, on_step);
}

TrainResult noise_fm_baseline(const std::vector<Graph>& graphs, const TrainConfig& cfg,
                              const StepCallback& on_step) {
  check_config(cfg);
  check_graph_set(graphs, "noise_fm_baseline");
  std::vector<Vector> states;
  for (const Graph& g : graphs) states.push_back(graph_state(g));
  const int dim = static_cast<int>(states.front().size());
  auto draw = [&](Rng& rng, Vector& x0, Vector& x1) {
    x1 = states[rng.uniform_int(0, static_cast<std::int64_t>(states.size()) - 1)];
    for (int i = 0; i < dim; ++i) x0[i] = rng.normal();
  };
  return train_straight(dim, cfg, kNoiseFmStream, draw, on_step);
}

}  // namespace sfmg
