#include <ostream>

#include <CLI11.hpp>

#include "sfmg/app.hpp"

namespace sfmg {

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNonConvergence = 4;

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral geodesic flow matching for graph generation", "sfmg"};
  app.require_subcommand(1);

  std::string family_text, stage_text = "all", config_path, out_path, model_text = "sfmg";
  std::string generated, reference, train_path, data_path, eval_family;
  int count = 100, jobs = 1, k = 0, n_max = 0, spectral_k = 0;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  bool strip = true;

  auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset and its train/test split");
  gen->add_option("family", family_text, "ego-small, community-small, planar, sbm or grid")->required();
  gen->add_option("--count", count, "Number of graphs")->capture_default_str();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--train-fraction", train_fraction)->capture_default_str();
  gen->add_option("--jobs", jobs, "Worker threads")->capture_default_str();
  gen->add_option("--out", out_path, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train one stage or the whole pipeline");
  train->add_option("--config", config_path, "Flat JSON run configuration")->required();
  train->add_option("--stage", stage_text,
                    "eigenvalues, eigenvectors, postprocess, noise-fm or all")->capture_default_str();
  auto* train_seed = train->add_option("--seed", seed, "Overrides the config seed");
  train->add_option("--out", out_path, "Checkpoint directory")->required();

  auto* sample = app.add_subcommand("sample", "Sample graphs from trained checkpoints");
  sample->add_option("checkpoints", data_path, "Checkpoint directory")->required();
  sample->add_option("--count", count)->capture_default_str();
  sample->add_option("--seed", seed)->capture_default_str();
  sample->add_option("--jobs", jobs)->capture_default_str();
  sample->add_option("--model", model_text, "sfmg or noise-fm")->capture_default_str();
  sample->add_flag("--strip-isolated,!--no-strip-isolated", strip,
                   "Drop degree-0 nodes (default on)");
  sample->add_option("--out", out_path, "Output JSONL file")->required();

  auto* eval = app.add_subcommand("evaluate", "MMD report of generated graphs");
  eval->add_option("generated", generated, "Generated graphs (JSONL)")->required();
  eval->add_option("--reference", reference, "Reference (test) graphs")->required();
  eval->add_option("--train", train_path, "Training graphs (baseline and novelty)")->required();
  eval->add_option("--family", eval_family, "Adds validity for planar or sbm");
  eval->add_option("--spectral-k", spectral_k, "Adds spectral fidelity with k eigenpairs");
  eval->add_option("--jobs", jobs)->capture_default_str();
  eval->add_option("--out", out_path, "Writes <out>.json and <out>.txt");

  auto* spectra = app.add_subcommand("spectra", "Dump truncated spectra of a dataset");
  spectra->add_option("data", data_path, "Graphs (JSONL)")->required();
  spectra->add_option("--k", k, "Number of eigenpairs")->required();
  spectra->add_option("--n-max", n_max, "Padded size (default: largest graph)");
  spectra->add_option("--out", out_path, "Output JSONL file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }
  if (jobs < 1) {
    err << "error: --jobs must be at least 1\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      GenDataOptions o;
      o.family = parse_family(family_text);
      o.count = count;
      o.seed = seed;
      o.train_fraction = train_fraction;
      o.jobs = jobs;
      o.out_dir = out_path;
      cmd_gen_data(o);
      out << "wrote " << count << " graphs to " << out_path << "\n";
    } else if (*train) {
      RunConfig cfg = load_run_config(config_path);
      if (*train_seed) {
        cfg.seed = seed;
        for (TrainConfig* t : {&cfg.eigval, &cfg.eigvec, &cfg.post, &cfg.noise_fm}) t->seed = seed;
      }
      cmd_train(cfg, parse_stage(stage_text), out_path, &out);
    } else if (*sample) {
      if (model_text != "sfmg" && model_text != "noise-fm") {
        throw ConfigError("--model must be sfmg or noise-fm");
      }
      SampleOptions o;
      o.checkpoint_dir = data_path;
      o.count = count;
      o.seed = seed;
      o.jobs = jobs;
      o.noise_fm = model_text == "noise-fm";
      o.strip_isolated = strip;
      o.out_path = out_path;
      cmd_sample(o);
      out << "wrote " << count << " graphs to " << out_path << "\n";
    } else if (*eval) {
      EvaluateOptions o;
      o.generated_path = generated;
      o.reference_path = reference;
      o.train_path = train_path;
      if (!eval_family.empty()) o.family = parse_family(eval_family);
      o.spectral_k = spectral_k;
      o.jobs = jobs;
      o.out_prefix = out_path;
      out << format_report(cmd_evaluate(o));
    } else if (*spectra) {
      cmd_spectra(data_path, k, n_max, out_path);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\nrun 'sfmg " << app.get_subcommands().front()->get_name()
        << " --help' for usage\n";
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << e.residual() << ")\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

}  // namespace sfmg
