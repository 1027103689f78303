#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "oracles/oracles.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"

using namespace sfmg;

namespace {

// Every parameter drawn from N(0, scale^2), so no gradient is trivially zero.
VectorFieldNet random_net(const NetConfig& cfg, std::uint64_t seed, double scale = 0.5) {
  VectorFieldNet net(cfg);
  Rng rng(seed);
  for (Eigen::Index i = 0; i < net.num_parameters(); ++i) {
    net.parameters()[i] = scale * rng.normal();
  }
  return net;
}

struct GradCheck {
  double worst = 0.0;
  int compared = 0;
};

GradCheck compare(const Vector& analytic, const Vector& numeric) {
  GradCheck out;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    if (std::abs(analytic[i]) <= 1e-8) continue;
    const double rel = std::abs(analytic[i] - numeric[i]) /
                       std::max(std::abs(analytic[i]), std::abs(numeric[i]));
    out.worst = std::max(out.worst, rel);
    ++out.compared;
  }
  return out;
}

Matrix random_frame(int n, int k, Rng& rng) { return oracle::random_orthonormal(n, k, rng); }

}  // namespace

TEST_CASE("fresh network is the zero field") {
  Rng rng(1);
  VectorFieldNet net(NetConfig{5, 2, 16, 2}, rng);
  Vector out = net_forward(net, Vector::Random(5), 0.4, Vector::Random(2));
  CHECK(out.size() == 5);
  CHECK(out.isZero(0.0));
  CHECK(net.tensor("blocks.1.ln1.gain").isOnes());
  CHECK(net.tensor("input.weight").cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
}

TEST_CASE("single block with zero weights is a ReLU") {
  VectorFieldNet net(NetConfig{3, 0, 3, 1});
  net.tensor("input.weight").leftCols(3).setIdentity();
  net.tensor("blocks.0.ln2.gain").setOnes();
  net.tensor("blocks.0.ln1.gain").setOnes();
  net.tensor("output.weight").setIdentity();
  Vector x(3);
  x << 1.5, -0.5, 0.25;
  Vector out = net_forward(net, x, 0.7);
  CHECK(out[0] == doctest::Approx(1.5));
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(0.25));
}

TEST_CASE("forward is deterministic and batch-consistent") {
  VectorFieldNet net = random_net(NetConfig{4, 2, 8, 2}, 3);
  Rng rng(4);
  Matrix x = gaussian_matrix(4, 5, rng);
  Matrix c = gaussian_matrix(2, 5, rng);
  Vector t = Vector::LinSpaced(5, 0.0, 1.0);
  Matrix a = net.forward(x, t, c);
  Matrix b = net.forward(x, t, c);
  CHECK((a - b).norm() == 0.0);
  for (int j = 0; j < 5; ++j) {
    CHECK((net_forward(net, x.col(j), t[j], c.col(j)) - a.col(j)).norm() <= 1e-13);
  }
  CHECK_THROWS_AS(net.forward(x, t, Matrix()), ShapeError);
}

TEST_CASE("net_gradients terminal cases") {
  VectorFieldNet net = random_net(NetConfig{3, 1, 8, 2}, 5);
  Vector x = Vector::Random(3), c = Vector::Random(1);
  CHECK(net_gradients(net, x, 0.3, c, Vector::Zero(3)).isZero(0.0));
  Vector up(3);
  up << 0.5, -2.0, 1.25;
  GradientSet g = net_gradients(net, x, 0.3, c, up);
  const TensorInfo& bias = net.tensors().back();
  CHECK(bias.name == "output.bias");
  CHECK((g.segment(bias.offset, 3) - up).norm() == 0.0);
}

TEST_CASE("net_gradients match finite differences") {
  VectorFieldNet net = random_net(NetConfig{6, 2, 32, 2}, 6);
  Rng rng(7);
  Vector x = gaussian_matrix(6, 1, rng).col(0);
  Vector c = gaussian_matrix(2, 1, rng).col(0);
  Vector up = gaussian_matrix(6, 1, rng).col(0);
  GradientSet g = net_gradients(net, x, 0.35, c, up);
  auto f = [&](const Vector& p) {
    VectorFieldNet probe = net;
    probe.parameters() = p;
    return up.dot(net_forward(probe, x, 0.35, c));
  };
  GradCheck r = compare(g, oracle::finite_difference_gradient(f, net.parameters(), 1e-5));
  CHECK(r.compared > 1000);
  CHECK(r.worst <= 1e-4);
}

TEST_CASE("euclidean CFM target equals x1 - x0") {
  Rng rng(8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + i % 7;
    Vector x0 = gaussian_matrix(d, 1, rng).col(0);
    Vector x1 = gaussian_matrix(d, 1, rng).col(0);
    const double t = rng.uniform();
    worst = std::max(worst, (euclidean_cfm_target(x0, x1, t) - (x1 - x0)).norm());
  }
  CHECK(worst <= 1e-10);
  Vector same = Vector::Ones(3);
  CHECK(euclidean_cfm_target(same, same, 0.5).isZero(0.0));
}

TEST_CASE("cfm_loss_euclidean") {
  Rng rng(9);
  Vector x0 = Vector::Random(3), x1 = Vector::Random(3);

  // A net whose output is the constant x1 - x0.
  VectorFieldNet perfect(NetConfig{3, 0, 4, 1}, rng);
  perfect.tensor("output.bias") = x1 - x0;
  CHECK(cfm_loss_euclidean(perfect, x0, x1, 0.6).loss <= 1e-24);

  VectorFieldNet net = random_net(NetConfig{3, 0, 8, 2}, 10);
  Vector pred = net_forward(net, x0, 0.2);
  CHECK(cfm_loss_euclidean(net, x0, x0, 0.2).loss == doctest::Approx(pred.squaredNorm()));
}

TEST_CASE("cfm_loss_euclidean gradient matches finite differences") {
  VectorFieldNet net = random_net(NetConfig{4, 0, 32, 2}, 11);
  Rng rng(12);
  Vector x0 = gaussian_matrix(4, 1, rng).col(0);
  Vector x1 = gaussian_matrix(4, 1, rng).col(0);
  LossResult r = cfm_loss_euclidean(net, x0, x1, 0.45);
  auto f = [&](const Vector& p) {
    VectorFieldNet probe = net;
    probe.parameters() = p;
    return cfm_loss_euclidean(probe, x0, x1, 0.45).loss;
  };
  GradCheck c = compare(r.grad, oracle::finite_difference_gradient(f, net.parameters(), 1e-5));
  CHECK(c.compared > 1000);
  CHECK(c.worst <= 1e-4);
}

TEST_CASE("cfm_loss_stiefel") {
  Rng rng(13);
  StiefelPoint u0(random_frame(8, 2, rng));
  StiefelPoint u1(random_frame(8, 2, rng));
  Vector cond(2);
  cond << 0.0, 0.4;
  VectorFieldNet net = random_net(NetConfig{16, 2, 32, 2}, 14);

  SUBCASE("gradient matches finite differences") {
    LossResult r = cfm_loss_stiefel(net, u0, u1, 0.3, cond);
    auto f = [&](const Vector& p) {
      VectorFieldNet probe = net;
      probe.parameters() = p;
      return cfm_loss_stiefel(probe, u0, u1, 0.3, cond).loss;
    };
    GradCheck c = compare(r.grad, oracle::finite_difference_gradient(f, net.parameters(), 1e-5));
    CHECK(c.compared > 1000);
    CHECK(c.worst <= 1e-4);
  }

  SUBCASE("normal components of the raw output do not change the loss") {
    StiefelPoint ut = geodesic_interpolate(u0, u1, 0.3);
    Matrix w = gaussian_matrix(8, 2, rng);
    VectorFieldNet shifted = net;
    shifted.tensor("output.bias") += flatten_rows(project_normal(w, ut));
    CHECK(std::abs(cfm_loss_stiefel(shifted, u0, u1, 0.3, cond).loss -
                   cfm_loss_stiefel(net, u0, u1, 0.3, cond).loss) <= 1e-10);
  }

  SUBCASE("t = 0 regresses onto Log(U0, U1)") {
    Matrix l = stiefel_log(u0, u1).value;
    VectorFieldNet perfect(NetConfig{16, 2, 4, 1});
    perfect.tensor("output.bias") = flatten_rows(l);
    CHECK(cfm_loss_stiefel(perfect, u0, u1, 0.0, cond).loss <= 1e-20);
    VectorFieldNet zero(NetConfig{16, 2, 4, 1});
    CHECK(cfm_loss_stiefel(zero, u0, u1, 0.0, cond).loss ==
          doctest::Approx(l.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("adamw_step") {
  Vector p(2);
  p << 1.0, -3.0;
  AdamWState s;
  Vector p0 = p;
  adamw_step(p, Vector::Zero(2), s, 0.1, 0.0);
  CHECK((p - p0).norm() == 0.0);

  Vector q(1);
  q << 1.0;
  AdamWState sq;
  adamw_step(q, Vector::Constant(1, 0.5), sq, 0.1, 0.0);
  CHECK(q[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-15));
  adamw_step(q, Vector::Constant(1, -0.25), sq, 0.1, 0.0);
  // Second step by hand: m = 0.9*0.05 - 0.025, v = 0.999*0.00025 + 0.001*0.0625.
  const double m = 0.9 * 0.05 + 0.1 * -0.25;
  const double v = 0.999 * 0.00025 + 0.001 * 0.0625;
  const double mh = m / (1 - 0.81), vh = v / (1 - 0.998001);
  CHECK(q[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8) - 0.1 * mh / (std::sqrt(vh) + 1e-8))
                    .epsilon(1e-14));

  Vector w(3);
  w << 2.0, -1.0, 0.5;
  AdamWState sw;
  Vector w0 = w;
  adamw_step(w, Vector::Zero(3), sw, 0.01, 0.1);
  CHECK((w - (1 - 0.01 * 0.1) * w0).norm() <= 1e-15);
}

TEST_CASE("euclidean Euler sampler") {
  CHECK(euler_steps(0.01) == 100);
  CHECK(euler_steps(0.3) == 4);
  CHECK(euler_steps(1.0) == 1);
  CHECK_THROWS_AS(euler_steps(0.0), RangeError);

  VectorFieldNet net(NetConfig{2, 0, 4, 1});
  Vector x0(2);
  x0 << 0.3, -1.0;
  CHECK((euler_sample_euclidean(net, x0, 0.01) - x0).norm() == 0.0);
  Vector c(2);
  c << 1.5, -0.25;
  net.tensor("output.bias") = c;
  CHECK((euler_sample_euclidean(net, x0, 0.01) - (x0 + c)).norm() <= 1e-12);
}

TEST_CASE("Stiefel Euler sampler stays on the manifold") {
  VectorFieldNet net = random_net(NetConfig{16, 2, 16, 2}, 15, 0.8);
  Rng rng(16);
  StiefelPoint u0 = haar_sample(8, 2, rng);
  Vector cond = Vector::Ones(2);
  double worst = 0.0;
  int seen = 0;
  StiefelPoint u1 = euler_sample_stiefel(net, u0, 0.01, cond, [&](int, const StiefelPoint& u) {
    worst = std::max(worst, orthonormality_residual(u.frame()));
    ++seen;
  });
  CHECK(seen == 101);
  CHECK(worst <= 1e-6);
  CHECK((u1.frame() - u0.frame()).norm() > 1e-3);

  // The batched sampler agrees with the single-sample one.
  std::vector<StiefelPoint> batch{u0, haar_sample(8, 2, rng)};
  Matrix conds(2, 2);
  conds << 1, 0, 1, 2;
  auto out = euler_sample_stiefel(net, batch, 0.01, conds);
  CHECK((out[0].frame() - u1.frame()).norm() <= 1e-12);
}

TEST_CASE("true conditional field integrates to the target") {
  Rng rng(17);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    StiefelPoint u0 = haar_sample(8, 2, rng);
    StiefelPoint u1 = haar_sample(8, 2, rng);
    StiefelPoint u = u0;
    const double eps = 0.01;
    for (int i = 0; i < euler_steps(eps); ++i) {
      u = stiefel_exp(u, Matrix(eps * conditional_vector_field(u, u0, u1).value));
    }
    worst = std::max(worst, (u.frame() - u1.frame()).norm());
  }
  CHECK(worst <= 0.05);
}

TEST_CASE("checkpoint round trip") {
  namespace fs = std::filesystem;
  VectorFieldNet net = random_net(NetConfig{5, 3, 12, 3}, 18);
  fs::path dir = fs::temp_directory_path() / "sfmg_ckpt_test";
  fs::create_directories(dir);
  const std::string path = (dir / "net").string();
  nlohmann::json meta = {{"stage", "eigvec"}, {"n", 7}};
  save_checkpoint(path, net, meta);
  nlohmann::json back;
  VectorFieldNet loaded = load_checkpoint(path, &back);
  CHECK(loaded.config().hidden_dim == 12);
  CHECK(loaded.config().num_blocks == 3);
  CHECK(loaded.config().cond_dim == 3);
  CHECK(std::memcmp(loaded.parameters().data(), net.parameters().data(),
                    sizeof(double) * net.num_parameters()) == 0);
  CHECK(back == meta);

  nlohmann::json manifest = nlohmann::json::parse(std::ifstream(path + ".json"));
  CHECK(manifest["tensors"][0]["dtype"] == "f64");
  CHECK(manifest["tensors"][1]["offset"] ==
        manifest["tensors"][0]["shape"][0].get<int>() *
            manifest["tensors"][0]["shape"][1].get<int>() * 8);

  std::ofstream(path + ".bin", std::ios::trunc) << "short";
  CHECK_THROWS_AS(load_checkpoint(path), ParseError);
  fs::remove_all(dir);
}
