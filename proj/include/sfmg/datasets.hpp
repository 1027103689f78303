#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sfmg/graph.hpp"
#include "sfmg/rng.hpp"

namespace sfmg {

enum class Family { EgoSmall, CommunitySmall, Planar, Sbm, Grid };

/// Accepts the kebab-case names ("ego-small", "community-small", "planar",
/// "sbm", "grid"); throws ConfigError otherwise.
Family parse_family(const std::string& name);
std::string family_name(Family f);

struct FamilyParams {
  int community_min_n = 12, community_max_n = 20;
  double community_p_intra = 0.7;
  double community_inter_fraction = 0.05;

  int ego_host_n = 400;
  int ego_attach = 2;
  int ego_min_n = 4, ego_max_n = 18;

  int planar_n = 64;
  double planar_jitter = 1e-9;

  int sbm_min_blocks = 2, sbm_max_blocks = 5;
  int sbm_min_size = 20, sbm_max_size = 40;
  double sbm_p_intra = 0.3, sbm_p_inter = 0.005;
  int sbm_min_n = 44, sbm_max_n = 192;

  int grid_min_side = 10, grid_max_side = 20;
  int grid_min_n = 100, grid_max_n = 400;

  int max_attempts = 1000;
};

nlohmann::json to_json(const FamilyParams& p);

struct DatasetSpec {
  Family family = Family::CommunitySmall;
  int count = 100;
  std::uint64_t seed = 0;
  FamilyParams params;
};

/// Graph `index` of the dataset; depends only on (spec, index).
Graph generate_one(const DatasetSpec& spec, int index);
/// All graphs, generated on up to `jobs` threads with identical results.
std::vector<Graph> generate(const DatasetSpec& spec, int jobs = 1);

/// Delaunay triangulation edges (i < j, sorted) by Bowyer-Watson insertion.
/// Points are jittered by up to `jitter` to break degeneracies.
std::vector<Edge> delaunay_edges(const std::vector<std::array<double, 2>>& points,
                                 double jitter, Rng& rng);

struct SplitIndices {
  std::vector<int> train, test;
};

/// Seeded shuffle; |train| = floor(fraction * size), |test| >= 1.
SplitIndices split_indices(int size, double train_fraction, std::uint64_t seed);
std::pair<std::vector<Graph>, std::vector<Graph>> split(const std::vector<Graph>& dataset,
                                                        double train_fraction,
                                                        std::uint64_t seed);

nlohmann::json graph_to_json(const Graph& g);
/// `line` is used for error messages only.
Graph graph_from_json(const nlohmann::json& j, long line);

std::string graphs_to_jsonl(const std::vector<Graph>& graphs);
std::vector<Graph> graphs_from_jsonl(const std::string& text);

std::vector<Graph> load_graphs(const std::string& path);
/// Atomic write.
void save_graphs(const std::string& path, const std::vector<Graph>& graphs);

}  // namespace sfmg
