#include <cmath>
#include <string>

#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"

namespace sfmg {

namespace {

constexpr double kLayerNormEps = 1e-5;

// Column-wise LayerNorm; returns the normalized values and 1/std per column.
void layer_norm(const Matrix& z, Matrix& z_hat, Vector& inv_std) {
  const double d = static_cast<double>(z.rows());
  Eigen::RowVectorXd mean = z.colwise().sum() / d;
  z_hat = z.rowwise() - mean;
  Eigen::RowVectorXd var = z_hat.colwise().squaredNorm() / d;
  inv_std = (var.array() + kLayerNormEps).rsqrt().transpose();
  z_hat = z_hat * inv_std.asDiagonal();
}

Matrix layer_norm_backward(const Matrix& dz_hat, const Matrix& z_hat, const Vector& inv_std) {
  const double d = static_cast<double>(z_hat.rows());
  Eigen::RowVectorXd mean_d = dz_hat.colwise().sum() / d;
  Eigen::RowVectorXd mean_dx = (dz_hat.cwiseProduct(z_hat)).colwise().sum() / d;
  Matrix dz = dz_hat.rowwise() - mean_d;
  dz -= z_hat * mean_dx.asDiagonal();
  return dz * inv_std.asDiagonal();
}

}  // namespace

VectorFieldNet::VectorFieldNet(const NetConfig& cfg) : cfg_(cfg) {
  if (cfg.input_dim < 1 || cfg.hidden_dim < 1 || cfg.num_blocks < 0 || cfg.cond_dim < 0) {
    throw ShapeError("VectorFieldNet: invalid dimensions");
  }
  build_layout();
  params_.setZero();
}

VectorFieldNet::VectorFieldNet(const NetConfig& cfg, Rng& rng) : VectorFieldNet(cfg) {

  auto init_uniform = [&](int idx) {
    const TensorInfo& t = tensors_[idx];
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.cols));
    for (Eigen::Index i = 0; i < t.rows * t.cols; ++i) {
      params_[t.offset + i] = rng.uniform(-bound, bound);
    }
  };
  auto fill = [&](int idx, double value) {
    const TensorInfo& t = tensors_[idx];
    params_.segment(t.offset, t.rows * t.cols).setConstant(value);
  };
  init_uniform(in_w_);
  for (const BlockIndex& b : blocks_) {
    init_uniform(b.w1);
    init_uniform(b.w2);
    fill(b.ln2_gain, 1.0);
    fill(b.ln1_gain, 1.0);
  }
}

void VectorFieldNet::build_layout() {
  tensors_.clear();
  blocks_.clear();
  Eigen::Index offset = 0;
  auto add = [&](std::string name, Eigen::Index rows, Eigen::Index cols) {
    tensors_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
    return static_cast<int>(tensors_.size() - 1);
  };
  const int h = cfg_.hidden_dim;
  in_w_ = add("input.weight", h, cfg_.input_dim + 1 + cfg_.cond_dim);
  in_b_ = add("input.bias", h, 1);
  for (int i = 0; i < cfg_.num_blocks; ++i) {
    const std::string p = "blocks." + std::to_string(i) + ".";
    BlockIndex b;
    b.w1 = add(p + "w1", h, h);
    b.b1 = add(p + "b1", h, 1);
    b.ln2_gain = add(p + "ln2.gain", h, 1);
    b.ln2_shift = add(p + "ln2.shift", h, 1);
    b.w2 = add(p + "w2", h, h);
    b.b2 = add(p + "b2", h, 1);
    b.ln1_gain = add(p + "ln1.gain", h, 1);
    b.ln1_shift = add(p + "ln1.shift", h, 1);
    blocks_.push_back(b);
  }
  out_w_ = add("output.weight", cfg_.input_dim, h);
  out_b_ = add("output.bias", cfg_.input_dim, 1);
  params_.resize(offset);
}

Eigen::Map<const Matrix> VectorFieldNet::view(int idx) const {
  const TensorInfo& t = tensors_[idx];
  return Eigen::Map<const Matrix>(params_.data() + t.offset, t.rows, t.cols);
}

Eigen::Map<Matrix> VectorFieldNet::tensor(const std::string& name) {
  for (const TensorInfo& t : tensors_) {
    if (t.name == name) return Eigen::Map<Matrix>(params_.data() + t.offset, t.rows, t.cols);
  }
  throw RangeError("VectorFieldNet: no tensor named '" + name + "'");
}

Eigen::Map<const Matrix> VectorFieldNet::tensor(const std::string& name) const {
  for (const TensorInfo& t : tensors_) {
    if (t.name == name) {
      return Eigen::Map<const Matrix>(params_.data() + t.offset, t.rows, t.cols);
    }
  }
  throw RangeError("VectorFieldNet: no tensor named '" + name + "'");
}

Matrix VectorFieldNet::forward(const Matrix& x, const Vector& t, const Matrix& cond,
                               ForwardCache* cache) const {
  const Eigen::Index batch = x.cols();
  if (x.rows() != cfg_.input_dim || t.size() != batch ||
      (cfg_.cond_dim > 0 && (cond.rows() != cfg_.cond_dim || cond.cols() != batch)) ||
      (cfg_.cond_dim == 0 && cond.size() != 0)) {
    throw ShapeError("VectorFieldNet::forward: input shapes do not match the network");
  }
  Matrix input(cfg_.input_dim + 1 + cfg_.cond_dim, batch);
  input.topRows(cfg_.input_dim) = x;
  input.row(cfg_.input_dim) = t.transpose();
  if (cfg_.cond_dim > 0) input.bottomRows(cfg_.cond_dim) = cond;

  Matrix h = (view(in_w_) * input).colwise() + view(in_b_).col(0);
  if (cache) {
    cache->input = input;
    cache->blocks.resize(blocks_.size());
  }
  for (size_t i = 0; i < blocks_.size(); ++i) {
    const BlockIndex& b = blocks_[i];
    Matrix z1 = (view(b.w1) * h).colwise() + view(b.b1).col(0);
    Matrix z1_hat;
    Vector inv1;
    layer_norm(z1, z1_hat, inv1);
    Matrix a1 = (view(b.ln2_gain).col(0).asDiagonal() * z1_hat).colwise() +
                view(b.ln2_shift).col(0);
    Matrix r1 = a1.cwiseMax(0.0);
    Matrix z2 = (view(b.w2) * r1).colwise() + view(b.b2).col(0);
    Matrix z2_hat;
    Vector inv2;
    layer_norm(z2, z2_hat, inv2);
    Matrix s = (view(b.ln1_gain).col(0).asDiagonal() * z2_hat).colwise() +
               view(b.ln1_shift).col(0);
    s += h;
    if (cache) {
      ForwardCache::Block& c = cache->blocks[i];
      c.h_in = std::move(h);
      c.z1_hat = std::move(z1_hat);
      c.a1 = std::move(a1);
      c.z2_hat = std::move(z2_hat);
      c.inv_std1 = std::move(inv1);
      c.inv_std2 = std::move(inv2);
      c.s = s;
    }
    h = s.cwiseMax(0.0);
  }
  Matrix out = (view(out_w_) * h).colwise() + view(out_b_).col(0);
  if (cache) cache->h_out = std::move(h);
  return out;
}

GradientSet VectorFieldNet::backward(const ForwardCache& cache, const Matrix& upstream) const {
  if (upstream.rows() != cfg_.input_dim || upstream.cols() != cache.h_out.cols()) {
    throw ShapeError("VectorFieldNet::backward: upstream shape does not match the output");
  }
  GradientSet grad = GradientSet::Zero(params_.size());
  auto g = [&](int idx) {
    const TensorInfo& t = tensors_[idx];
    return Eigen::Map<Matrix>(grad.data() + t.offset, t.rows, t.cols);
  };

  g(out_w_) = upstream * cache.h_out.transpose();
  g(out_b_) = upstream.rowwise().sum();
  Matrix dh = view(out_w_).transpose() * upstream;

  for (size_t i = blocks_.size(); i-- > 0;) {
    const BlockIndex& b = blocks_[i];
    const ForwardCache::Block& c = cache.blocks[i];
    Matrix ds = dh.cwiseProduct((c.s.array() > 0.0).cast<double>().matrix());

    g(b.ln1_gain) = ds.cwiseProduct(c.z2_hat).rowwise().sum();
    g(b.ln1_shift) = ds.rowwise().sum();
    Matrix dz2 = layer_norm_backward(view(b.ln1_gain).col(0).asDiagonal() * ds, c.z2_hat,
                                     c.inv_std2);
    Matrix r1 = c.a1.cwiseMax(0.0);
    g(b.w2) = dz2 * r1.transpose();
    g(b.b2) = dz2.rowwise().sum();
    Matrix da1 = (view(b.w2).transpose() * dz2)
                     .cwiseProduct((c.a1.array() > 0.0).cast<double>().matrix());

    g(b.ln2_gain) = da1.cwiseProduct(c.z1_hat).rowwise().sum();
    g(b.ln2_shift) = da1.rowwise().sum();
    Matrix dz1 = layer_norm_backward(view(b.ln2_gain).col(0).asDiagonal() * da1, c.z1_hat,
                                     c.inv_std1);
    g(b.w1) = dz1 * c.h_in.transpose();
    g(b.b1) = dz1.rowwise().sum();
    dh = ds + view(b.w1).transpose() * dz1;
  }
  g(in_w_) = dh * cache.input.transpose();
  g(in_b_) = dh.rowwise().sum();
  return grad;
}

Vector net_forward(const VectorFieldNet& net, const Vector& x, double t, const Vector& cond) {
  Vector tv = Vector::Constant(1, t);
  return net.forward(x, tv, cond.size() ? Matrix(cond) : Matrix()).col(0);
}

GradientSet net_gradients(const VectorFieldNet& net, const Vector& x, double t,
                          const Vector& cond, const Vector& upstream) {
  ForwardCache cache;
  Vector tv = Vector::Constant(1, t);
  net.forward(x, tv, cond.size() ? Matrix(cond) : Matrix(), &cache);
  return net.backward(cache, upstream);
}

}  // namespace sfmg
