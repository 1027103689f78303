#include <cstdio>

#include "sfmg/eval.hpp"

namespace sfmg {

using nlohmann::json;

EvalReport evaluate(const std::vector<Graph>& generated, const std::vector<Graph>& reference,
                    const std::vector<Graph>& train, std::optional<Family> family,
                    const MetricOptions& opts) {
  EvalReport r;
  r.generated_count = static_cast<int>(generated.size());
  r.reference_count = static_cast<int>(reference.size());
  r.train_count = static_cast<int>(train.size());
  r.mmd = benchmark_metrics(generated, reference, opts);
  r.baseline = benchmark_metrics(train, reference, opts);
  r.ratio = mmd_ratio(r.mmd, r.baseline);
  r.diversity = uniqueness_novelty(generated, train);
  if (family && (*family == Family::Planar || *family == Family::Sbm)) {
    r.validity = validity(generated, *family);
  }
  return r;
}

namespace {

json mmds_json(const BenchmarkMmds& m) {
  return {{"degree", m.degree}, {"clustering", m.clustering}, {"orbit", m.orbit}, {"spectral", m.spectral}};
}

}  // namespace

json to_json(const EvalReport& r) {
  json j;
  j["counts"] = {{"generated", r.generated_count}, {"reference", r.reference_count},
                 {"train", r.train_count}};
  j["mmd"] = mmds_json(r.mmd);
  j["baseline_mmd"] = mmds_json(r.baseline);
  j["ratio"] = r.ratio;
  j["uniqueness"] = r.diversity.uniqueness;
  j["novelty"] = r.diversity.novelty;
  if (r.validity) j["validity"] = *r.validity;
  if (r.spectral) {
    const SpectralFidelity& s = *r.spectral;
    j["spectral_fidelity"] = {{"eigenvalue_mmd", s.eigenvalue_mmd},
                              {"eigenvalue_baseline", s.eigenvalue_baseline},
                              {"eigenvalue_ratio", s.eigenvalue_ratio},
                              {"eigenvalue_sigma", s.eigenvalue_sigma},
                              {"eigenvector_mmd", s.eigenvector_mmd},
                              {"eigenvector_baseline", s.eigenvector_baseline},
                              {"eigenvector_ratio", s.eigenvector_ratio}};
  }
  return j;
}

std::string format_report(const EvalReport& r) {
  std::string out;
  char buf[256];
  auto row = [&](const char* label, const BenchmarkMmds& m, double ratio) {
    std::snprintf(buf, sizeof buf, "%-12s %10.6f %10.6f %10.6f %10.6f %8.3f\n", label, m.degree,
                  m.clustering, m.orbit, m.spectral, ratio);
    out += buf;
  };
  std::snprintf(buf, sizeof buf, "%-12s %10s %10s %10s %10s %8s\n", "", "Deg.", "Clus.", "Orbit",
                "Spec.", "Ratio");
  out += buf;
  row("generated", r.mmd, r.ratio);
  row("train/test", r.baseline, mmd_ratio(r.baseline, r.baseline));
  std::snprintf(buf, sizeof buf, "\nUniq. %.1f%%  Nov. %.1f%%", r.diversity.uniqueness,
                r.diversity.novelty);
  out += buf;
  if (r.validity) {
    std::snprintf(buf, sizeof buf, "  Valid. %.1f%%", *r.validity);
    out += buf;
  }
  out += "\n";
  if (r.spectral) {
    std::snprintf(buf, sizeof buf, "Spectral fidelity: eigenvalue ratio %.3f, eigenvector ratio %.3f\n",
                  r.spectral->eigenvalue_ratio, r.spectral->eigenvector_ratio);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "(%d generated, %d reference, %d train)\n", r.generated_count,
                r.reference_count, r.train_count);
  out += buf;
  return out;
}

}  // namespace sfmg
