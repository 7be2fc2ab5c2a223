#include "tritz/cp_function.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace tritz {

namespace {
constexpr int kCheckpointVersion = 1;
}

void save_checkpoint(const CPFunction& u, const std::string& path) {
  nlohmann::json doc;
  doc["version"] = kCheckpointVersion;
  doc["dim"] = u.dim();
  doc["rank"] = u.rank();
  doc["meshes"] = nlohmann::json::array();
  for (int i = 0; i < u.dim(); ++i) {
    const Mesh1D& mesh = u.mesh(i);
    doc["meshes"].push_back({{"a", mesh.a}, {"b", mesh.b}, {"n_elems", mesh.n_elems}});
  }
  doc["factors"] = nlohmann::json::array();
  for (int i = 0; i < u.dim(); ++i) {
    const Eigen::MatrixXd& block = u.block(i);
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(block.size()));
    for (Eigen::Index k = 0; k < block.rows(); ++k)
      for (Eigen::Index j = 0; j < block.cols(); ++j) flat.push_back(block(k, j));
    doc["factors"].push_back(flat);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << doc.dump(2) << '\n';
  if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

CPFunction load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  if (doc.at("version").get<int>() != kCheckpointVersion)
    throw std::runtime_error("load_checkpoint: unsupported version");
  const int dim = doc.at("dim").get<int>();
  const int rank = doc.at("rank").get<int>();
  const auto& mesh_list = doc.at("meshes");
  if (static_cast<int>(mesh_list.size()) != dim)
    throw std::runtime_error("load_checkpoint: mesh count does not match dim");
  std::vector<Mesh1D> meshes;
  meshes.reserve(static_cast<std::size_t>(dim));
  for (const auto& entry : mesh_list)
    meshes.push_back(build_mesh(entry.at("a").get<double>(), entry.at("b").get<double>(),
                                entry.at("n_elems").get<int>()));
  CPFunction u(std::move(meshes), rank);
  const auto& factor_list = doc.at("factors");
  if (static_cast<int>(factor_list.size()) != dim)
    throw std::runtime_error("load_checkpoint: factor count does not match dim");
  for (int i = 0; i < dim; ++i) {
    const auto flat = factor_list[static_cast<std::size_t>(i)].get<std::vector<double>>();
    const int n = u.mesh(i).n_nodes;
    if (static_cast<int>(flat.size()) != rank * n)
      throw std::runtime_error("load_checkpoint: factor block has wrong size");
    Eigen::MatrixXd block(rank, n);
    for (int k = 0; k < rank; ++k)
      for (int j = 0; j < n; ++j)
        block(k, j) = flat[static_cast<std::size_t>(k * n + j)];
    u.set_block(i, std::move(block));
  }
  return u;
}

}  // namespace tritz
