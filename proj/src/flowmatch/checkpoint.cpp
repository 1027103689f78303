#include <bit>
#include <cstring>

#include "sfmg/errors.hpp"
#include "sfmg/flowmatch.hpp"
#include "sfmg/io.hpp"

namespace sfmg {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are written in native byte order");

void save_checkpoint(const std::string& path, const VectorFieldNet& net,
                     const nlohmann::json& metadata) {
  using nlohmann::json;
  const NetConfig& cfg = net.config();
  json manifest;
  manifest["format"] = "sfmg-checkpoint";
  manifest["version"] = 1;
  manifest["config"] = {{"input_dim", cfg.input_dim},
                        {"cond_dim", cfg.cond_dim},
                        {"hidden_dim", cfg.hidden_dim},
                        {"num_blocks", cfg.num_blocks}};
  json tensors = json::array();
  for (const TensorInfo& t : net.tensors()) {
    tensors.push_back({{"name", t.name},
                       {"shape", {t.rows, t.cols}},
                       {"dtype", "f64"},
                       {"offset", t.offset * static_cast<Eigen::Index>(sizeof(double))}});
  }
  manifest["tensors"] = std::move(tensors);
  manifest["metadata"] = metadata;

  std::string blob(static_cast<size_t>(net.num_parameters()) * sizeof(double), '\0');
  std::memcpy(blob.data(), net.parameters().data(), blob.size());
  write_file_atomic(path + ".bin", blob);
  write_file_atomic(path + ".json", manifest.dump(2) + "\n");
}

VectorFieldNet load_checkpoint(const std::string& path, nlohmann::json* metadata) {
  using nlohmann::json;
  json manifest;
  try {
    manifest = json::parse(read_file(path + ".json"));
    const json& c = manifest.at("config");
    NetConfig cfg{c.at("input_dim").get<int>(), c.at("cond_dim").get<int>(),
                  c.at("hidden_dim").get<int>(), c.at("num_blocks").get<int>()};
    VectorFieldNet net(cfg);
    const std::string blob = read_file(path + ".bin");
    if (blob.size() != static_cast<size_t>(net.num_parameters()) * sizeof(double)) {
      throw ParseError("checkpoint '" + path + "': blob size does not match the manifest", 0);
    }
    const json& tensors = manifest.at("tensors");
    if (tensors.size() != net.tensors().size()) {
      throw ParseError("checkpoint '" + path + "': tensor list does not match the layout", 0);
    }
    for (size_t i = 0; i < tensors.size(); ++i) {
      const TensorInfo& t = net.tensors()[i];
      const json& m = tensors[i];
      if (m.at("name").get<std::string>() != t.name || m.at("dtype").get<std::string>() != "f64" ||
          m.at("shape").at(0).get<Eigen::Index>() != t.rows ||
          m.at("shape").at(1).get<Eigen::Index>() != t.cols ||
          m.at("offset").get<Eigen::Index>() !=
              t.offset * static_cast<Eigen::Index>(sizeof(double))) {
        throw ParseError("checkpoint '" + path + "': tensor '" + t.name + "' mismatched", 0);
      }
    }
    std::memcpy(net.parameters().data(), blob.data(), blob.size());
    if (metadata) *metadata = manifest.value("metadata", json::object());
    return net;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint '" + path + "': " + e.what(), 0);
  }
}

}  // namespace sfmg
