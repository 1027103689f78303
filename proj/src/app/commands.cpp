#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>

#include "sfmg/app.hpp"
#include "sfmg/io.hpp"
#include "sfmg/parallel.hpp"

namespace sfmg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSampleStream = 5000;
constexpr int kSampleChunk = 25;

std::string in_dir(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory " + dir + ": " + ec.message());
}

int max_nodes(const std::vector<Graph>& graphs) {
  int n = 0;
  for (const Graph& g : graphs) n = std::max(n, g.n());
  return n;
}

std::string csv_log(const std::vector<double>& losses) {
  std::string out = "step,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.10g\n", i, losses[i]);
    out += buf;
  }
  return out;
}

bool checkpoint_exists(const std::string& base) {
  return fs::exists(base + ".json") && fs::exists(base + ".bin");
}

VectorFieldNet require_checkpoint(const std::string& dir, const std::string& stage,
                                  const std::string& needed_by, json* meta) {
  const std::string base = in_dir(dir, stage);
  if (!checkpoint_exists(base)) {
    throw MissingCheckpointError(needed_by + " needs the " + stage + " checkpoint (" + base +
                                 ".json); train that stage first");
  }
  return load_checkpoint(base, meta);
}

}  // namespace

void cmd_gen_data(const GenDataOptions& opts) {
  if (opts.count < 2) throw ConfigError("gen-data needs --count of at least 2");
  if (opts.out_dir.empty()) throw ConfigError("gen-data needs --out");
  DatasetSpec spec;
  spec.family = opts.family;
  spec.count = opts.count;
  spec.seed = opts.seed;
  const std::vector<Graph> graphs = generate(spec, opts.jobs);
  const SplitIndices idx = split_indices(opts.count, opts.train_fraction, opts.seed);
  std::vector<Graph> train, test;
  for (int i : idx.train) train.push_back(graphs[static_cast<std::size_t>(i)]);
  for (int i : idx.test) test.push_back(graphs[static_cast<std::size_t>(i)]);

  ensure_dir(opts.out_dir);
  save_graphs(in_dir(opts.out_dir, "graphs.jsonl"), graphs);
  save_graphs(in_dir(opts.out_dir, "train.jsonl"), train);
  save_graphs(in_dir(opts.out_dir, "test.jsonl"), test);
  json meta = {{"family", family_name(opts.family)},
               {"count", opts.count},
               {"seed", opts.seed},
               {"train_fraction", opts.train_fraction},
               {"n_max", max_nodes(graphs)},
               {"params", to_json(spec.params)},
               {"train_indices", idx.train},
               {"test_indices", idx.test}};
  write_file_atomic(in_dir(opts.out_dir, "meta.json"), meta.dump(2) + "\n");
}

Stage parse_stage(const std::string& name) {
  if (name == "eigenvalues") return Stage::Eigenvalues;
  if (name == "eigenvectors") return Stage::Eigenvectors;
  if (name == "postprocess") return Stage::Postprocess;
  if (name == "noise-fm") return Stage::NoiseFm;
  if (name == "all") return Stage::All;
  throw ConfigError("unknown stage '" + name +
                    "' (expected eigenvalues, eigenvectors, postprocess, noise-fm or all)");
}

void cmd_train(const RunConfig& cfg, Stage stage, const std::string& out_dir,
               std::ostream* progress) {
  if (cfg.data.empty()) throw ConfigError("config has no 'data' directory");
  const std::vector<Graph> train = load_graphs(in_dir(cfg.data, "train.jsonl"));
  if (train.empty()) throw PreconditionError("training split is empty");
  int n_max = max_nodes(train);
  if (fs::exists(in_dir(cfg.data, "meta.json"))) {
    json meta = json::parse(read_file(in_dir(cfg.data, "meta.json")));
    n_max = std::max(n_max, meta.value("n_max", 0));
  }
  if (cfg.k > n_max) {
    throw ConfigError("k = " + std::to_string(cfg.k) + " exceeds the padded size " +
                      std::to_string(n_max));
  }
  const int feature_dim = train.front().features ? static_cast<int>(train.front().features->cols()) : 0;
  bool bonds = false;
  for (const Graph& g : train) bonds = bonds || !g.is_binary();

  ensure_dir(out_dir);
  write_file_atomic(in_dir(out_dir, "run.json"), to_json(cfg).dump(2) + "\n");

  auto meta_for = [&](const std::string& name, const TrainConfig& tc, const TrainLog& log) {
    return json{{"stage", name},
                {"family", family_name(cfg.family)},
                {"n", n_max},
                {"k", cfg.k},
                {"feature_dim", feature_dim},
                {"bonds", bonds},
                {"step_size", cfg.step_size},
                {"train", {{"steps", tc.steps},
                           {"batch_size", tc.batch_size},
                           {"learning_rate", tc.learning_rate},
                           {"seed", tc.seed},
                           {"log_resamples", log.log_resamples},
                           {"skipped", log.skipped}}}};
  };
  auto finish = [&](const std::string& name, const TrainConfig& tc, const TrainResult& r,
                    std::chrono::steady_clock::time_point start) {
    save_checkpoint(in_dir(out_dir, name), r.net, meta_for(name, tc, r.log));
    write_file_atomic(in_dir(out_dir, name + "_log.csv"), csv_log(r.log.losses));
    if (progress) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      char buf[160];
      std::snprintf(buf, sizeof buf, "%s: %zu steps, final loss %.6g (%.1f s)\n", name.c_str(),
                    r.log.losses.size(), r.log.losses.empty() ? 0.0 : r.log.losses.back(), secs);
      *progress << buf << std::flush;
    }
  };

  std::vector<SpectralData> spectra;
  auto need_spectra = [&] {
    if (spectra.empty()) spectra = prepare_spectra(train, n_max, cfg.k);
  };
  std::vector<Graph> padded;
  auto need_padded = [&] {
    if (padded.empty())
      for (const Graph& g : train) padded.push_back(pad_graph(g, n_max));
  };
  using clock = std::chrono::steady_clock;

  if (stage == Stage::Eigenvalues || stage == Stage::All) {
    const auto start = clock::now();
    need_spectra();
    finish("eigval", cfg.eigval, train_eigenvalues(spectra, cfg.eigval), start);
  }
  if (stage == Stage::Eigenvectors || stage == Stage::All) {
    const auto start = clock::now();
    need_spectra();
    finish("eigvec", cfg.eigvec, train_eigenvectors(spectra, cfg.eigvec), start);
  }
  if (stage == Stage::Postprocess || stage == Stage::All) {
    const auto start = clock::now();
    json ev_meta, evec_meta;
    VectorFieldNet ev = require_checkpoint(out_dir, "eigval", "stage postprocess", &ev_meta);
    VectorFieldNet evec = require_checkpoint(out_dir, "eigvec", "stage postprocess", &evec_meta);
    if (ev_meta.value("n", -1) != n_max || ev_meta.value("k", -1) != cfg.k ||
        evec_meta.value("n", -1) != n_max || evec_meta.value("k", -1) != cfg.k) {
      throw ShapeError("upstream checkpoints in " + out_dir +
                       " were trained for a different n or k; retrain them");
    }
    need_padded();
    finish("post", cfg.post, train_postprocess(padded, ev, evec, cfg.post), start);
  }
  if (stage == Stage::NoiseFm) {
    const auto start = clock::now();
    need_padded();
    finish("noise_fm", cfg.noise_fm, noise_fm_baseline(padded, cfg.noise_fm), start);
  }
}

std::vector<Graph> sample_graphs(const SampleOptions& opts) {
  if (opts.count < 1) throw ConfigError("sample needs --count of at least 1");
  json meta;
  const std::string head = opts.noise_fm ? "noise_fm" : "post";
  VectorFieldNet post = require_checkpoint(opts.checkpoint_dir, head, "sample", &meta);
  SfmgModel model{VectorFieldNet(NetConfig{1, 0, 1, 0}), VectorFieldNet(NetConfig{1, 0, 1, 0}),
                  std::move(post),
                  meta.at("n").get<int>(),
                  meta.at("k").get<int>(),
                  meta.at("feature_dim").get<int>(),
                  meta.at("bonds").get<bool>(),
                  meta.at("step_size").get<double>()};
  if (!opts.noise_fm) {
    model.eigval = require_checkpoint(opts.checkpoint_dir, "eigval", "sample", nullptr);
    model.eigvec = require_checkpoint(opts.checkpoint_dir, "eigvec", "sample", nullptr);
  }

  // Fixed-size chunks with their own streams: output independent of --jobs.
  const int chunks = (opts.count + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::vector<Graph>> parts(static_cast<std::size_t>(chunks));
  const Rng root(opts.seed, kSampleStream);
  parallel_for(chunks, opts.jobs, [&](int c) {
    Rng rng = root.split(static_cast<std::uint64_t>(c));
    const int size = std::min(kSampleChunk, opts.count - c * kSampleChunk);
    parts[static_cast<std::size_t>(c)] =
        opts.noise_fm ? noise_fm_sample(model, size, rng) : sfmg_sample(model, size, rng);
  });
  std::vector<Graph> out;
  for (auto& part : parts)
    for (Graph& g : part) out.push_back(opts.strip_isolated ? strip_isolated(g) : std::move(g));
  return out;
}

void cmd_sample(const SampleOptions& opts) {
  if (opts.out_path.empty()) throw ConfigError("sample needs --out");
  std::vector<Graph> graphs = sample_graphs(opts);
  const fs::path parent = fs::path(opts.out_path).parent_path();
  if (!parent.empty()) ensure_dir(parent.string());
  save_graphs(opts.out_path, graphs);
}

EvalReport cmd_evaluate(const EvaluateOptions& opts) {
  const std::vector<Graph> generated = load_graphs(opts.generated_path);
  const std::vector<Graph> reference = load_graphs(opts.reference_path);
  const std::vector<Graph> train = load_graphs(opts.train_path);
  MetricOptions metric;
  metric.jobs = opts.jobs;
  EvalReport report = evaluate(generated, reference, train, opts.family, metric);
  if (opts.spectral_k > 0) {
    const int n_max = std::max({max_nodes(generated), max_nodes(reference), max_nodes(train)});
    if (opts.spectral_k > n_max) throw ConfigError("--spectral-k exceeds the largest graph");
    report.spectral = spectral_fidelity(prepare_spectra(generated, n_max, opts.spectral_k),
                                        prepare_spectra(reference, n_max, opts.spectral_k),
                                        prepare_spectra(train, n_max, opts.spectral_k));
  }
  if (!opts.out_prefix.empty()) {
    const fs::path parent = fs::path(opts.out_prefix).parent_path();
    if (!parent.empty()) ensure_dir(parent.string());
    write_file_atomic(opts.out_prefix + ".json", to_json(report).dump(2) + "\n");
    write_file_atomic(opts.out_prefix + ".txt", format_report(report));
  }
  return report;
}

void cmd_spectra(const std::string& data_path, int k, int n_max, const std::string& out_path) {
  const std::vector<Graph> graphs = load_graphs(data_path);
  if (n_max <= 0) n_max = max_nodes(graphs);
  if (k < 1 || k > n_max) throw ConfigError("--k must lie in [1, n_max]");
  std::string out;
  for (const SpectralData& s : prepare_spectra(graphs, n_max, k)) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < s.frame.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < s.frame.cols(); ++j) row.push_back(s.frame(i, j));
      rows.push_back(std::move(row));
    }
    json line = {{"n", n_max},
                 {"lambdas", std::vector<double>(s.lambdas.data(), s.lambdas.data() + s.k())},
                 {"frame", std::move(rows)}};
    out += line.dump() + "\n";
  }
  write_file_atomic(out_path, out);
}

}  // namespace sfmg
