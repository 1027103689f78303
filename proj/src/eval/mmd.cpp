#include <algorithm>
#include <cmath>

#include "sfmg/errors.hpp"
#include "sfmg/eval.hpp"
#include "sfmg/parallel.hpp"

namespace sfmg {

namespace {

void normalize(std::vector<double>& h) {
  double total = 0;
  for (double v : h) total += v;
  if (total > 0)
    for (double& v : h) v /= total;
}

double block_distance(std::vector<double> a, std::vector<double> b, const KernelSpec& spec) {
  const std::size_t len = std::max(a.size(), b.size());
  a.resize(len, 0.0);
  b.resize(len, 0.0);
  switch (spec.base) {
    case BaseDistance::Euclidean: {
      double s = 0;
      for (std::size_t i = 0; i < len; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
      return std::sqrt(s);
    }
    case BaseDistance::TotalVariation: {
      normalize(a);
      normalize(b);
      double s = 0;
      for (std::size_t i = 0; i < len; ++i) s += std::abs(a[i] - b[i]);
      return 0.5 * s;
    }
    case BaseDistance::EarthMover: {
      normalize(a);
      normalize(b);
      double cdf = 0, s = 0;
      for (std::size_t i = 0; i < len; ++i) {
        cdf += a[i] - b[i];
        s += std::abs(cdf);
      }
      return s * spec.bin_width;
    }
  }
  return 0;
}

}  // namespace

double kernel_distance(const std::vector<double>& a, const std::vector<double>& b,
                       const KernelSpec& spec) {
  if (spec.blocks <= 1) return block_distance(a, b, spec);
  if (a.size() != b.size() || a.size() % static_cast<std::size_t>(spec.blocks) != 0) {
    throw ShapeError("block kernel needs equal-length inputs divisible into blocks");
  }
  const std::size_t w = a.size() / static_cast<std::size_t>(spec.blocks);
  double total = 0;
  for (int blk = 0; blk < spec.blocks; ++blk) {
    const auto off = static_cast<std::ptrdiff_t>(w * static_cast<std::size_t>(blk));
    total += block_distance({a.begin() + off, a.begin() + off + static_cast<std::ptrdiff_t>(w)},
                            {b.begin() + off, b.begin() + off + static_cast<std::ptrdiff_t>(w)},
                            spec);
  }
  return total / spec.blocks;
}

double kernel_value(const std::vector<double>& a, const std::vector<double>& b,
                    const KernelSpec& spec) {
  if (!(spec.sigma > 0)) throw PreconditionError("kernel bandwidth must be positive");
  const double d = kernel_distance(a, b, spec);
  return std::exp(-d * d / (2 * spec.sigma * spec.sigma));
}

double mmd(const std::vector<std::vector<double>>& generated,
           const std::vector<std::vector<double>>& reference, const KernelSpec& spec) {
  if (generated.empty() || reference.empty()) throw PreconditionError("mmd of an empty set");
  auto mean_kernel = [&](const auto& xs, const auto& ys) {
    double s = 0;
    for (const auto& x : xs)
      for (const auto& y : ys) s += kernel_value(x, y, spec);
    return s / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
  };
  return mean_kernel(generated, generated) + mean_kernel(reference, reference) -
         2 * mean_kernel(generated, reference);
}

namespace {

struct Features {
  std::vector<std::vector<double>> degree, clustering, orbit, spectral;
};

Features features_of(const std::vector<Graph>& graphs, const MetricOptions& opts) {
  std::vector<GraphStatistics> stats(graphs.size());
  parallel_for(static_cast<int>(graphs.size()), opts.jobs,
               [&](int i) { stats[i] = graph_statistics(graphs[i], opts.stats); });
  Features f;
  for (const GraphStatistics& s : stats) {
    f.degree.push_back(s.degree_histogram);
    f.clustering.push_back(s.clustering_histogram);
    f.orbit.emplace_back(s.orbit_means.begin(), s.orbit_means.end());
    f.spectral.push_back(s.spectrum_histogram);
  }
  return f;
}

}  // namespace

BenchmarkMmds benchmark_metrics(const std::vector<Graph>& generated,
                                const std::vector<Graph>& reference, const MetricOptions& opts) {
  if (generated.empty() || reference.empty()) throw PreconditionError("empty graph set");
  const Features g = features_of(generated, opts);
  const Features r = features_of(reference, opts);
  BenchmarkMmds out;
  out.degree = mmd(g.degree, r.degree, opts.degree);
  out.clustering = mmd(g.clustering, r.clustering, opts.clustering);
  out.orbit = mmd(g.orbit, r.orbit, opts.orbit);
  out.spectral = mmd(g.spectral, r.spectral, opts.spectral);
  return out;
}

double mmd_ratio(const BenchmarkMmds& model, const BenchmarkMmds& baseline) {
  const double m[] = {model.degree, model.clustering, model.orbit, model.spectral};
  const double b[] = {baseline.degree, baseline.clustering, baseline.orbit, baseline.spectral};
  double total = 0;
  int used = 0;
  for (int i = 0; i < 4; ++i) {
    if (b[i] <= 1e-12) continue;
    total += m[i] / b[i];
    ++used;
  }
  return used > 0 ? total / used : 0.0;
}

double median_heuristic(const std::vector<std::vector<double>>& samples) {
  std::vector<double> d;
  const KernelSpec euclid{};
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j)
      d.push_back(kernel_distance(samples[i], samples[j], euclid));
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 1e-12 ? *mid : 1.0;
}

std::vector<double> wavelet_signature(const SpectralData& s, const WaveletOptions& opts) {
  std::vector<double> out;
  out.reserve(opts.scales.size() * static_cast<std::size_t>(opts.bins));
  const Matrix sq = s.frame.array().square().matrix();
  for (double tau : opts.scales) {
    Vector psi(s.k());
    for (int j = 0; j < s.k(); ++j) psi(j) = s.lambdas(j) * std::exp(-tau * s.lambdas(j));
    const Vector sig = sq * psi;
    std::vector<double> h =
        histogram({sig.data(), sig.data() + sig.size()}, opts.bins, 0.0, 1.0 / (tau * std::exp(1.0)));
    normalize(h);
    out.insert(out.end(), h.begin(), h.end());
  }
  return out;
}

std::vector<SpectralData> random_spectra(int count, int k, Rng& rng) {
  std::vector<SpectralData> out(static_cast<std::size_t>(count));
  for (SpectralData& s : out) {
    s.lambdas.resize(k);
    for (int j = 0; j < k; ++j) s.lambdas(j) = rng.uniform(0.0, 2.0);
    std::sort(s.lambdas.data(), s.lambdas.data() + k);
    s.frame = Matrix(0, k);
  }
  return out;
}

SpectralFidelity spectral_fidelity(const std::vector<SpectralData>& generated,
                                   const std::vector<SpectralData>& reference,
                                   const std::vector<SpectralData>& baseline,
                                   const WaveletOptions& wavelet) {
  if (generated.empty() || reference.empty() || baseline.empty()) {
    throw PreconditionError("spectral fidelity needs three nonempty sets");
  }
  const int k = reference.front().k();
  auto lambdas = [k](const std::vector<SpectralData>& set) {
    std::vector<std::vector<double>> out;
    for (const SpectralData& s : set) {
      if (s.k() != k) throw ShapeError("spectra truncated to different k");
      out.emplace_back(s.lambdas.data(), s.lambdas.data() + s.k());
    }
    return out;
  };
  auto signatures = [&](const std::vector<SpectralData>& set) {
    std::vector<std::vector<double>> out;
    for (const SpectralData& s : set) out.push_back(wavelet_signature(s, wavelet));
    return out;
  };
  auto ratio = [](double m, double b) { return m / std::max(b, 1e-12); };

  SpectralFidelity f;
  const auto ref_l = lambdas(reference);
  f.eigenvalue_sigma = median_heuristic(ref_l);
  const KernelSpec ev{BaseDistance::Euclidean, f.eigenvalue_sigma};
  f.eigenvalue_mmd = mmd(lambdas(generated), ref_l, ev);
  f.eigenvalue_baseline = mmd(lambdas(baseline), ref_l, ev);
  f.eigenvalue_ratio = ratio(f.eigenvalue_mmd, f.eigenvalue_baseline);

  const bool have_frames = std::all_of(generated.begin(), generated.end(),
                                       [](const SpectralData& s) { return s.n() > 0; });
  if (have_frames) {
    const KernelSpec wk{BaseDistance::EarthMover, wavelet.sigma, 1.0 / wavelet.bins,
                        static_cast<int>(wavelet.scales.size())};
    const auto ref_w = signatures(reference);
    f.eigenvector_mmd = mmd(signatures(generated), ref_w, wk);
    f.eigenvector_baseline = mmd(signatures(baseline), ref_w, wk);
    f.eigenvector_ratio = ratio(f.eigenvector_mmd, f.eigenvector_baseline);
  }
  return f;
}

}  // namespace sfmg
