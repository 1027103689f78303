#include <sstream>

#include "sfmg/datasets.hpp"
#include "sfmg/errors.hpp"
#include "sfmg/io.hpp"

namespace sfmg {

using nlohmann::json;

json graph_to_json(const Graph& g) {
  json j;
  j["n"] = g.n();
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.first, e.second});
  j["edges"] = std::move(edges);
  if (!g.is_binary()) j["weights"] = g.edge_weights();
  if (g.features) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < g.features->rows(); ++i) {
      json row = json::array();
      for (Eigen::Index c = 0; c < g.features->cols(); ++c) row.push_back((*g.features)(i, c));
      rows.push_back(std::move(row));
    }
    j["features"] = std::move(rows);
  }
  return j;
}

Graph graph_from_json(const json& j, long line) {
  auto fail = [line](const std::string& msg) -> ParseError {
    return ParseError("line " + std::to_string(line) + ": " + msg, line);
  };
  if (!j.is_object()) throw fail("expected a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw fail("missing integer field 'n'");
  const long n = j["n"].get<long>();
  if (n < 0) throw fail("negative node count");
  if (!j.contains("edges") || !j["edges"].is_array()) throw fail("missing array field 'edges'");
  const json& edges = j["edges"];

  std::vector<int> weights;
  if (j.contains("weights")) {
    if (!j["weights"].is_array() || j["weights"].size() != edges.size()) {
      throw fail("'weights' must be an array with one entry per edge");
    }
    for (const json& w : j["weights"]) {
      if (!w.is_number_integer() || w.get<long>() < 1 || w.get<long>() > 3) {
        throw fail("edge weights must be integers in 1..3");
      }
      weights.push_back(w.get<int>());
    }
  }

  Graph g(static_cast<int>(n));
  for (size_t e = 0; e < edges.size(); ++e) {
    const json& pair = edges[e];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() ||
        !pair[1].is_number_integer()) {
      throw fail("edge " + std::to_string(e) + " is not a pair of integers");
    }
    const long a = pair[0].get<long>(), b = pair[1].get<long>();
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw fail("edge " + std::to_string(e) + " has a node index outside [0, " +
                 std::to_string(n) + ")");
    }
    if (a == b) throw fail("self-loop at node " + std::to_string(a));
    if (g.has_edge(static_cast<int>(a), static_cast<int>(b))) {
      throw fail("duplicate edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    g.add_edge(static_cast<int>(a), static_cast<int>(b), weights.empty() ? 1.0 : weights[e]);
  }

  if (j.contains("features")) {
    const json& rows = j["features"];
    if (!rows.is_array() || static_cast<long>(rows.size()) != n) {
      throw fail("'features' must have one row per node");
    }
    const size_t m = n > 0 ? rows[0].size() : 0;
    Matrix f(n, static_cast<Eigen::Index>(m));
    for (long i = 0; i < n; ++i) {
      if (!rows[i].is_array() || rows[i].size() != m) throw fail("ragged 'features' rows");
      for (size_t c = 0; c < m; ++c) {
        if (!rows[i][c].is_number()) throw fail("non-numeric feature value");
        f(i, static_cast<Eigen::Index>(c)) = rows[i][c].get<double>();
      }
    }
    g.features = std::move(f);
  }
  return g;
}

std::string graphs_to_jsonl(const std::vector<Graph>& graphs) {
  std::string out;
  for (const Graph& g : graphs) {
    out += graph_to_json(g).dump();
    out += '\n';
  }
  return out;
}

std::vector<Graph> graphs_from_jsonl(const std::string& text) {
  std::vector<Graph> out;
  std::istringstream in(text);
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("line " + std::to_string(number) + ": " + e.what(), number);
    }
    out.push_back(graph_from_json(j, number));
  }
  return out;
}

std::vector<Graph> load_graphs(const std::string& path) {
  try {
    return graphs_from_jsonl(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line());
  }
}

void save_graphs(const std::string& path, const std::vector<Graph>& graphs) {
  write_file_atomic(path, graphs_to_jsonl(graphs));
}

}  // namespace sfmg
