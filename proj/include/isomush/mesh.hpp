#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace isomush {

using Vertices = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Colors = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, 3, Eigen::RowMajor>;

struct Edge {
  int u;
  int v;  // u < v
};

// Immutable triangle mesh. Construction validates face indices, rejects
// degenerate faces, zero-length edges and edges shared by more than two
// faces, and derives the edge graph and barycentric vertex areas.
class Shape {
 public:
  Shape(Vertices vertices, Faces faces);

  int num_vertices() const { return static_cast<int>(vertices_.rows()); }
  int num_faces() const { return static_cast<int>(faces_.rows()); }
  const Vertices& vertices() const { return vertices_; }
  const Faces& faces() const { return faces_; }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& edge_lengths() const { return edge_lengths_; }
  const Eigen::VectorXd& vertex_areas() const { return vertex_areas_; }
  double total_area() const { return vertex_areas_.sum(); }

  // CSR adjacency over the undirected edge graph; neighbor(k) pairs with
  // neighbor_length(k).
  std::pair<int, int> neighbor_range(int vertex) const {
    return {adj_offsets_[vertex], adj_offsets_[vertex + 1]};
  }
  int neighbor(int k) const { return adj_targets_[k]; }
  double neighbor_length(int k) const { return adj_lengths_[k]; }

  // Component label per vertex; labels are dense in [0, count).
  std::vector<int> component_labels(int* count = nullptr) const;
  bool is_connected() const;
  // Throws if the edge graph has more than one component.
  void require_connected() const;

  // Stable 64-bit content hash of vertices and faces (FNV-1a over the raw bytes).
  std::uint64_t content_hash() const;

 private:
  Vertices vertices_;
  Faces faces_;
  std::vector<Edge> edges_;
  std::vector<double> edge_lengths_;
  Eigen::VectorXd vertex_areas_;
  std::vector<int> adj_offsets_;
  std::vector<int> adj_targets_;
  std::vector<double> adj_lengths_;
};

enum class MeshFormat { kOff, kPlyAscii };

// Picks the format from the file extension (.off / .ply).
MeshFormat format_from_path(const std::filesystem::path& path);

Shape load_mesh(const std::filesystem::path& path, MeshFormat format);
Shape load_mesh(const std::filesystem::path& path);

// Writes with round-trip precision; colors (one row per vertex) are optional.
void save_mesh(const std::filesystem::path& path, const Shape& shape, MeshFormat format,
               const Colors* colors = nullptr);

Shape parse_off(std::istream& in, const std::string& origin = "<stream>");
Shape parse_ply_ascii(std::istream& in, const std::string& origin = "<stream>");

struct GeodesicField {
  int source = 0;
  Eigen::VectorXd dist;
};

// Dijkstra over the edge graph with Euclidean edge lengths.
GeodesicField geodesic_distances(const Shape& shape, int source);

// Max geodesic distance over farthest-point-sampled sources. The first source
// is drawn from `seed`; n_sources >= num_vertices() evaluates every vertex.
double diameter(const Shape& shape, int n_sources = 20, std::uint64_t seed = 0);
double exact_diameter(const Shape& shape);

}  // namespace isomush
