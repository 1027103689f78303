#include <filesystem>

#include "sfmg/app.hpp"
#include "sfmg/io.hpp"

namespace sfmg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Row {
  int hidden, blocks, steps, batch;
  double lr;
};

// Architecture tables, one row per family in enum order:
// ego-small, community-small, planar, sbm, grid.
constexpr Row kEigval[] = {{128, 2, 1000000, 32, 5e-4}, {32, 2, 100000, 32, 1e-4},
                           {32, 2, 10000, 32, 1e-4},    {32, 2, 100000, 32, 1e-4},
                           {128, 4, 200000, 32, 1e-4}};
constexpr Row kEigvec[] = {{512, 4, 100000, 32, 1e-4}, {512, 4, 20000, 32, 1e-4},
                           {256, 4, 20000, 32, 5e-4},  {256, 4, 10000, 32, 1e-4},
                           {512, 4, 20000, 40, 1e-3}};
constexpr Row kPost[] = {{64, 2, 6000, 80, 1e-4}, {128, 4, 6000, 20, 1e-4}, {512, 4, 8000, 8, 1e-3},
                         {512, 4, 2000, 20, 5e-4}, {512, 4, 10000, 32, 1e-4}};

TrainConfig from_row(const Row& r) {
  TrainConfig c;
  c.hidden_dim = r.hidden;
  c.num_blocks = r.blocks;
  c.steps = r.steps;
  c.batch_size = r.batch;
  c.learning_rate = r.lr;
  return c;
}

TrainConfig* stage_config(RunConfig& c, const std::string& stage) {
  if (stage == "eigval") return &c.eigval;
  if (stage == "eigvec") return &c.eigvec;
  if (stage == "post") return &c.post;
  if (stage == "noise_fm") return &c.noise_fm;
  return nullptr;
}

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void apply_stage_key(TrainConfig& t, const std::string& field, const json& v,
                     const std::string& key) {
  if (field == "hidden_dim") t.hidden_dim = get_as<int>(v, key);
  else if (field == "num_blocks") t.num_blocks = get_as<int>(v, key);
  else if (field == "steps") t.steps = get_as<int>(v, key);
  else if (field == "batch_size") t.batch_size = get_as<int>(v, key);
  else if (field == "learning_rate") t.learning_rate = get_as<double>(v, key);
  else if (field == "weight_decay") t.weight_decay = get_as<double>(v, key);
  else if (field == "upstream_pool") t.upstream_pool = get_as<int>(v, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

json stage_json(const TrainConfig& t) {
  return {{"hidden_dim", t.hidden_dim},       {"num_blocks", t.num_blocks},
          {"steps", t.steps},                 {"batch_size", t.batch_size},
          {"learning_rate", t.learning_rate}, {"weight_decay", t.weight_decay},
          {"upstream_pool", t.upstream_pool}};
}

}  // namespace

int default_k(Family family) {
  switch (family) {
    case Family::Sbm: return 4;
    case Family::Grid: return 16;
    default: return 2;
  }
}

RunConfig default_run_config(Family family, const std::string& profile) {
  RunConfig c;
  c.family = family;
  c.profile = profile;
  c.k = default_k(family);
  if (profile == "desk") {
    c.eigval = c.eigvec = c.post = TrainConfig{};
  } else if (profile == "paper") {
    const auto f = static_cast<std::size_t>(family);
    c.eigval = from_row(kEigval[f]);
    c.eigvec = from_row(kEigvec[f]);
    c.post = from_row(kPost[f]);
  } else {
    throw ConfigError("unknown profile '" + profile + "' (expected desk or paper)");
  }
  c.noise_fm = c.post;
  return c;
}

RunConfig parse_run_config(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::string data;
  if (j.contains("data")) {
    fs::path p = get_as<std::string>(j["data"], "data");
    data = (p.is_absolute() ? p : fs::path(base_dir) / p).lexically_normal().string();
  }
  Family family;
  if (j.contains("family")) {
    family = parse_family(get_as<std::string>(j["family"], "family"));
  } else if (!data.empty() && fs::exists(fs::path(data) / "meta.json")) {
    json meta = json::parse(read_file((fs::path(data) / "meta.json").string()));
    family = parse_family(meta.at("family").get<std::string>());
  } else {
    throw ConfigError("config needs a 'family' or a 'data' directory with meta.json");
  }
  RunConfig c = default_run_config(
      family, j.contains("profile") ? get_as<std::string>(j["profile"], "profile") : "desk");
  c.data = data;

  for (const auto& [key, v] : j.items()) {
    if (key == "data" || key == "family" || key == "profile") continue;
    if (key == "k") c.k = get_as<int>(v, key);
    else if (key == "step_size") c.step_size = get_as<double>(v, key);
    else if (key == "seed") c.seed = get_as<std::uint64_t>(v, key);
    else {
      const auto dot = key.find('.');
      TrainConfig* t = dot == std::string::npos ? nullptr : stage_config(c, key.substr(0, dot));
      if (!t) throw ConfigError("unknown config key '" + key + "'");
      apply_stage_key(*t, key.substr(dot + 1), v, key);
    }
  }
  if (c.k < 1) throw ConfigError("k must be at least 1");
  if (!(c.step_size > 0 && c.step_size <= 1)) throw ConfigError("step_size must lie in (0, 1]");
  for (TrainConfig* t : {&c.eigval, &c.eigvec, &c.post, &c.noise_fm}) {
    t->step_size = c.step_size;
    t->seed = c.seed;
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_run_config(j, fs::path(path).parent_path().string().empty()
                                 ? "."
                                 : fs::path(path).parent_path().string());
}

json to_json(const RunConfig& c) {
  json j = {{"family", family_name(c.family)}, {"profile", c.profile}, {"k", c.k},
            {"step_size", c.step_size},          {"seed", c.seed}};
  if (!c.data.empty()) j["data"] = c.data;
  const std::pair<const char*, const TrainConfig*> stages[] = {
      {"eigval", &c.eigval}, {"eigvec", &c.eigvec}, {"post", &c.post}, {"noise_fm", &c.noise_fm}};
  for (const auto& [name, t] : stages) {
    const json fields = stage_json(*t);
    for (const auto& [field, v] : fields.items()) j[std::string(name) + "." + field] = v;
  }
  return j;
}

}  // namespace sfmg
