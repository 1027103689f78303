#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfmg/graph.hpp"
#include "sfmg/numerics.hpp"
#include "sfmg/rng.hpp"
#include "sfmg/stiefel.hpp"

namespace sfmg {

// ---------------------------------------------------------------------------
// Network

struct NetConfig {
  int input_dim = 0;  // state dimension (also the output dimension)
  int cond_dim = 0;
  int hidden_dim = 128;
  int num_blocks = 2;
};

struct TensorInfo {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;  // into the flat parameter vector
};

/// Flat parameter-vector layout; gradients share it.
using GradientSet = Vector;

struct ForwardCache;

/// Residual MLP  [x, t, cond] -> input map -> blocks -> output map.
/// Each block is  h -> ReLU(LN1(W2 ReLU(LN2(W1 h + b1)) + b2) + h).
/// Batched calls take one sample per column.
class VectorFieldNet {
 public:
  VectorFieldNet() = default;
  /// Correct layout, all parameters zero.
  explicit VectorFieldNet(const NetConfig& cfg);
  /// Fan-in uniform weights, zero biases, unit LayerNorm gains and a zero
  /// output map, so a fresh net is the zero field.
  VectorFieldNet(const NetConfig& cfg, Rng& rng);

  const NetConfig& config() const { return cfg_; }
  int output_dim() const { return cfg_.input_dim; }
  Eigen::Index num_parameters() const { return params_.size(); }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }
  const std::vector<TensorInfo>& tensors() const { return tensors_; }
  Eigen::Map<Matrix> tensor(const std::string& name);
  Eigen::Map<const Matrix> tensor(const std::string& name) const;

  Matrix forward(const Matrix& x, const Vector& t, const Matrix& cond,
                 ForwardCache* cache = nullptr) const;
  /// Reverse pass of <upstream, forward(...)> summed over the batch.
  GradientSet backward(const ForwardCache& cache, const Matrix& upstream) const;

 private:
  struct BlockIndex {
    int w1, b1, ln2_gain, ln2_shift, w2, b2, ln1_gain, ln1_shift;
  };

  void build_layout();
  Eigen::Map<const Matrix> view(int tensor) const;

  NetConfig cfg_;
  Vector params_;
  std::vector<TensorInfo> tensors_;
  int in_w_ = 0, in_b_ = 0, out_w_ = 0, out_b_ = 0;
  std::vector<BlockIndex> blocks_;
};

struct ForwardCache {
  struct Block {
    Matrix h_in, z1_hat, a1, z2_hat, s;
    Vector inv_std1, inv_std2;
  };
  Matrix input;
  std::vector<Block> blocks;
  Matrix h_out;
};

Vector net_forward(const VectorFieldNet& net, const Vector& x, double t,
                   const Vector& cond = Vector());
GradientSet net_gradients(const VectorFieldNet& net, const Vector& x, double t,
                          const Vector& cond, const Vector& upstream);

// ---------------------------------------------------------------------------
// Optimizer

struct AdamWState {
  Vector m, v;
  long step = 0;
};

/// Decoupled weight decay: p <- p - lr (m_hat / (sqrt(v_hat) + eps) + wd p).
void adamw_step(Vector& params, const GradientSet& grads, AdamWState& state, double lr,
                double weight_decay, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

// ---------------------------------------------------------------------------
// Conditional flow-matching losses

struct LossResult {
  double loss = 0.0;
  GradientSet grad;
};

/// (||x1 - x0|| / ||x1 - xt||) (x1 - xt) at xt = x0 + t (x1 - x0); falls back
/// to x1 - x0 when xt is within 1e-12 of x1.
Vector euclidean_cfm_target(const Vector& x0, const Vector& x1, double t);

LossResult cfm_loss_euclidean(const VectorFieldNet& net, const Vector& x0, const Vector& x1,
                              double t, const Vector& cond = Vector());

LossResult cfm_loss_stiefel(const VectorFieldNet& net, const StiefelPoint& u0,
                            const StiefelPoint& u1, double t, const Vector& cond,
                            const LogOptions& opts = {});

/// Row-major flattening of an n x k frame, the network's Stiefel state layout.
Vector flatten_rows(const Matrix& m);
Matrix unflatten_rows(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  int steps = 2000;
  int batch_size = 32;
  double learning_rate = 1e-4;
  double weight_decay = 1e-2;
  int hidden_dim = 128;
  int num_blocks = 2;
  double step_size = 0.01;  // Euler step for any sampling the stage needs
  std::uint64_t seed = 0;
  // Postprocess only: draw L0 from a fixed pool of this many upstream samples
  // instead of sampling the upstream generators afresh each step (0).
  int upstream_pool = 0;
};

struct TrainLog {
  std::vector<double> losses;  // per step, mean over the batch
  long log_resamples = 0;      // Stiefel log failures that triggered a resample
  long skipped = 0;            // samples dropped after 5 failed resamples
  // Stiefel stage: worst ||Y^T v + v^T Y||_F over every target and prediction.
  double max_tangency_residual = 0.0;
};

struct TrainResult {
  VectorFieldNet net;
  TrainLog log;
};

/// Pads each graph to n_max and takes the k smallest normalized-Laplacian
/// eigenpairs.
std::vector<SpectralData> prepare_spectra(const std::vector<Graph>& graphs, int n_max, int k);

using StepCallback = std::function<void(int step, double loss)>;

TrainResult train_eigenvalues(const std::vector<SpectralData>& data, const TrainConfig& cfg,
                              const StepCallback& on_step = {});
TrainResult train_eigenvectors(const std::vector<SpectralData>& data, const TrainConfig& cfg,
                               const StepCallback& on_step = {});
/// `graphs` must already be padded to a common size.
TrainResult train_postprocess(const std::vector<Graph>& graphs, const VectorFieldNet& eigval_net,
                              const VectorFieldNet& eigvec_net, const TrainConfig& cfg,
                              const StepCallback& on_step = {});
TrainResult noise_fm_baseline(const std::vector<Graph>& graphs, const TrainConfig& cfg,
                              const StepCallback& on_step = {});

// ---------------------------------------------------------------------------
// Sampling

int euler_steps(double step_size);

/// Batched Euler integration from t = 0 to 1; one sample per column.
Matrix euler_sample_euclidean(const VectorFieldNet& net, const Matrix& x0, double step_size,
                              const Matrix& cond = Matrix());
Vector euler_sample_euclidean(const VectorFieldNet& net, const Vector& x0, double step_size,
                              const Vector& cond = Vector());

using StiefelObserver = std::function<void(int step, const StiefelPoint& u)>;

StiefelPoint euler_sample_stiefel(const VectorFieldNet& net, const StiefelPoint& u0,
                                  double step_size, const Vector& cond,
                                  const StiefelObserver& observer = {});
std::vector<StiefelPoint> euler_sample_stiefel(const VectorFieldNet& net,
                                               std::vector<StiefelPoint> u0, double step_size,
                                               const Matrix& cond);

struct SfmgModel {
  VectorFieldNet eigval, eigvec, post;
  int n = 0;
  int k = 0;
  int feature_dim = 0;
  bool bonds = false;  // finalize into bond types instead of 0/1
  double step_size = 0.01;
};

/// Reconstructed Laplacians U diag(lambda) U^T of `count` fresh spectral
/// samples, one flattened matrix per column.
Matrix sample_reconstructed_laplacians(const VectorFieldNet& eigval_net,
                                       const VectorFieldNet& eigvec_net, int n, int count,
                                       double step_size, Rng& rng);

std::vector<Graph> sfmg_sample(const SfmgModel& model, int count, Rng& rng);
Graph sfmg_sample(const SfmgModel& model, Rng& rng);
std::vector<Graph> noise_fm_sample(const SfmgModel& model, int count, Rng& rng);

// ---------------------------------------------------------------------------
// Checkpoints: <path>.json manifest plus <path>.bin little-endian f64 blob.

void save_checkpoint(const std::string& path, const VectorFieldNet& net,
                     const nlohmann::json& metadata = nlohmann::json::object());
VectorFieldNet load_checkpoint(const std::string& path, nlohmann::json* metadata = nullptr);

}  // namespace sfmg
