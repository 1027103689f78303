#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "sfmg/datasets.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/eval.hpp"
#include "sfmg/flowmatch.hpp"

namespace sfmg {

/// A training stage needs a checkpoint that is not there.
class MissingCheckpointError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string data;  // dataset directory written by gen-data
  Family family = Family::CommunitySmall;
  std::string profile = "desk";  // "desk" or "paper"
  int k = 2;
  double step_size = 0.01;
  std::uint64_t seed = 0;
  TrainConfig eigval, eigvec, post, noise_fm;
};

/// Default k per family: 2, except sbm 4 and grid 16.
int default_k(Family family);

/// "desk": every stage hidden 128, 2 blocks, 2000 steps, batch 32, lr 1e-4.
/// "paper": the per-family architecture tables (epochs read as steps).
RunConfig default_run_config(Family family, const std::string& profile = "desk");

/// Flat JSON: top-level keys data, family, profile, k, step_size, seed and
/// "<stage>.<field>" overrides for stage in {eigval, eigvec, post, noise_fm}.
/// Relative `data` paths resolve against the config file's directory. The
/// family falls back to the dataset's meta.json. Unknown keys are errors.
RunConfig parse_run_config(const nlohmann::json& j, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

struct GenDataOptions {
  Family family = Family::CommunitySmall;
  int count = 100;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  int jobs = 1;
  std::string out_dir;
};

/// Writes graphs.jsonl, train.jsonl, test.jsonl and meta.json into out_dir.
void cmd_gen_data(const GenDataOptions& opts);

enum class Stage { Eigenvalues, Eigenvectors, Postprocess, NoiseFm, All };
Stage parse_stage(const std::string& name);

/// Trains the requested stage(s) into out_dir: <stage>.json/.bin checkpoints
/// and <stage>_log.csv, where stage is eigval, eigvec, post or noise_fm.
/// `all` runs eigval, eigvec, post in order.
void cmd_train(const RunConfig& cfg, Stage stage, const std::string& out_dir,
               std::ostream* progress = nullptr);

struct SampleOptions {
  std::string checkpoint_dir;
  int count = 100;
  std::uint64_t seed = 0;
  std::string out_path;
  bool strip_isolated = true;
  bool noise_fm = false;  // sample the Noise FM ablation instead
  int jobs = 1;
};

std::vector<Graph> sample_graphs(const SampleOptions& opts);
void cmd_sample(const SampleOptions& opts);

struct EvaluateOptions {
  std::string generated_path, reference_path, train_path;
  std::optional<Family> family;
  int spectral_k = 0;  // > 0 adds spectral fidelity over graph spectra
  int jobs = 1;
  std::string out_prefix;  // writes <prefix>.json and <prefix>.txt if set
};

EvalReport cmd_evaluate(const EvaluateOptions& opts);

/// JSONL of {"lambdas": [...], "frame": [[...], ...]} per graph, each padded
/// to n_max (0 = largest graph in the file).
void cmd_spectra(const std::string& data_path, int k, int n_max, const std::string& out_path);

/// Exit codes: 0 success, 2 usage or config, 3 data or I/O, 4 non-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfmg
