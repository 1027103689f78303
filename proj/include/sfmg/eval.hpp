#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sfmg/datasets.hpp"
#include "sfmg/graph.hpp"

namespace sfmg {

enum class BaseDistance { EarthMover, TotalVariation, Euclidean };

/// k(a, b) = exp(-d(a, b)^2 / (2 sigma^2)). EarthMover and TotalVariation
/// normalize both histograms to unit mass first; EMD is measured in units of
/// `bin_width` per bin. With blocks > 1 the vectors are equal-length
/// concatenations of histograms and d is the mean per-block distance.
struct KernelSpec {
  BaseDistance base = BaseDistance::Euclidean;
  double sigma = 1.0;
  double bin_width = 1.0;
  int blocks = 1;
};

double kernel_distance(const std::vector<double>& a, const std::vector<double>& b,
                       const KernelSpec& spec);
double kernel_value(const std::vector<double>& a, const std::vector<double>& b,
                    const KernelSpec& spec);

/// Biased V-statistic  mean k(g, g') + mean k(r, r') - 2 mean k(g, r).
double mmd(const std::vector<std::vector<double>>& generated,
           const std::vector<std::vector<double>>& reference, const KernelSpec& spec);

struct MetricOptions {
  KernelSpec degree{BaseDistance::TotalVariation, 1.0, 1.0};
  KernelSpec clustering{BaseDistance::EarthMover, 0.1, 0.01};
  KernelSpec orbit{BaseDistance::Euclidean, 30.0, 1.0};
  KernelSpec spectral{BaseDistance::EarthMover, 1.0, 0.01};
  StatisticsOptions stats;
  int jobs = 1;
};

struct BenchmarkMmds {
  double degree = 0, clustering = 0, orbit = 0, spectral = 0;
};

BenchmarkMmds benchmark_metrics(const std::vector<Graph>& generated,
                                const std::vector<Graph>& reference,
                                const MetricOptions& opts = {});

/// Mean of model / baseline over the metrics whose baseline exceeds 1e-12.
double mmd_ratio(const BenchmarkMmds& model, const BenchmarkMmds& baseline);

/// Exact isomorphism test (weights and sizes must agree).
bool isomorphic(const Graph& a, const Graph& b);
/// Three rounds of color refinement, as an isomorphism-invariant hash.
std::uint64_t wl_hash(const Graph& g);

struct Diversity {
  double uniqueness = 0;  // percent
  double novelty = 0;     // percent
};
Diversity uniqueness_novelty(const std::vector<Graph>& generated,
                             const std::vector<Graph>& training);

bool planar_valid(const Graph& g);
/// Spectral community recovery: eigengap over 2..5 clusters, k-means on the
/// row-normalized eigenvectors, every cluster of 20..40 nodes.
bool sbm_valid(const Graph& g);
/// Percentage of valid graphs; family must be planar or sbm.
double validity(const std::vector<Graph>& generated, Family family);

struct WaveletOptions {
  std::vector<double> scales{0.5, 1.0, 2.0, 4.0};
  int bins = 50;
  double sigma = 0.1;
};

/// Per-scale histograms of heat-wavelet node signatures, concatenated.
std::vector<double> wavelet_signature(const SpectralData& s, const WaveletOptions& opts = {});

struct SpectralFidelity {
  double eigenvalue_mmd = 0, eigenvalue_baseline = 0, eigenvalue_ratio = 0;
  double eigenvector_mmd = 0, eigenvector_baseline = 0, eigenvector_ratio = 0;
  double eigenvalue_sigma = 0;
};

/// Eigenvalue and wavelet MMDs of `generated` against `reference`, as ratios
/// to the `baseline` set (the training spectra).
SpectralFidelity spectral_fidelity(const std::vector<SpectralData>& generated,
                                   const std::vector<SpectralData>& reference,
                                   const std::vector<SpectralData>& baseline,
                                   const WaveletOptions& wavelet = {});

/// Median pairwise Euclidean distance; 1 when the set has no spread.
double median_heuristic(const std::vector<std::vector<double>>& samples);

/// `count` eigenvalue vectors drawn uniformly from [0, 2]^k, sorted ascending.
std::vector<SpectralData> random_spectra(int count, int k, Rng& rng);

struct EvalReport {
  BenchmarkMmds mmd;
  BenchmarkMmds baseline;
  double ratio = 0;
  Diversity diversity;
  std::optional<double> validity;
  std::optional<SpectralFidelity> spectral;
  int generated_count = 0, reference_count = 0, train_count = 0;
};

/// MMDs of generated vs reference, the train-vs-reference baseline, Ratio,
/// uniqueness/novelty against train, and validity when `family` has a check.
EvalReport evaluate(const std::vector<Graph>& generated, const std::vector<Graph>& reference,
                    const std::vector<Graph>& train, std::optional<Family> family,
                    const MetricOptions& opts = {});

nlohmann::json to_json(const EvalReport& r);
std::string format_report(const EvalReport& r);

}  // namespace sfmg
