#include "isomush/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <sstream>

#include <Eigen/Geometry>

#include "isomush/error.hpp"

namespace isomush {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Shape::Shape(Vertices vertices, Faces faces) : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const int n = num_vertices();
  if (n == 0) throw io_error("mesh has no vertices");
  if (!vertices_.allFinite()) throw io_error("mesh has non-finite vertex coordinates");

  std::map<std::pair<int, int>, int> edge_faces;
  for (int f = 0; f < num_faces(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int idx = faces_(f, c);
      if (idx < 0 || idx >= n) {
        std::ostringstream msg;
        msg << "face " << f << " references vertex " << idx << " outside [0, " << n << ")";
        throw io_error(msg.str());
      }
    }
    const int a = faces_(f, 0), b = faces_(f, 1), c = faces_(f, 2);
    if (a == b || b == c || a == c) {
      std::ostringstream msg;
      msg << "face " << f << " is degenerate (" << a << ", " << b << ", " << c << ")";
      throw io_error(msg.str());
    }
    for (int e = 0; e < 3; ++e) {
      int u = faces_(f, e), v = faces_(f, (e + 1) % 3);
      if (u > v) std::swap(u, v);
      if (++edge_faces[{u, v}] > 2) {
        std::ostringstream msg;
        msg << "edge (" << u << ", " << v << ") is shared by more than two faces (non-manifold at face " << f
            << ")";
        throw io_error(msg.str());
      }
    }
  }

  edges_.reserve(edge_faces.size());
  edge_lengths_.reserve(edge_faces.size());
  std::vector<int> degree(n, 0);
  for (const auto& [key, count] : edge_faces) {
    (void)count;
    const double len = (vertices_.row(key.first) - vertices_.row(key.second)).norm();
    if (!(len > 0.0)) {
      std::ostringstream msg;
      msg << "edge (" << key.first << ", " << key.second << ") has zero length";
      throw io_error(msg.str());
    }
    edges_.push_back({key.first, key.second});
    edge_lengths_.push_back(len);
    ++degree[key.first];
    ++degree[key.second];
  }

  adj_offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) adj_offsets_[v + 1] = adj_offsets_[v] + degree[v];
  adj_targets_.resize(adj_offsets_[n]);
  adj_lengths_.resize(adj_offsets_[n]);
  std::vector<int> fill(adj_offsets_.begin(), adj_offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    adj_targets_[fill[u]] = v;
    adj_lengths_[fill[u]++] = edge_lengths_[e];
    adj_targets_[fill[v]] = u;
    adj_lengths_[fill[v]++] = edge_lengths_[e];
  }

  vertex_areas_ = Eigen::VectorXd::Zero(n);
  for (int f = 0; f < num_faces(); ++f) {
    const Eigen::Vector3d p0 = vertices_.row(faces_(f, 0));
    const Eigen::Vector3d p1 = vertices_.row(faces_(f, 1));
    const Eigen::Vector3d p2 = vertices_.row(faces_(f, 2));
    const double third = 0.5 * (p1 - p0).cross(p2 - p0).norm() / 3.0;
    for (int c = 0; c < 3; ++c) vertex_areas_[faces_(f, c)] += third;
  }
}

std::vector<int> Shape::component_labels(int* count) const {
  const int n = num_vertices();
  std::vector<int> label(n, -1);
  int next = 0;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int k = adj_offsets_[v]; k < adj_offsets_[v + 1]; ++k) {
        if (label[adj_targets_[k]] < 0) {
          label[adj_targets_[k]] = next;
          stack.push_back(adj_targets_[k]);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

bool Shape::is_connected() const {
  int count = 0;
  component_labels(&count);
  return count == 1;
}

void Shape::require_connected() const {
  int count = 0;
  const auto labels = component_labels(&count);
  if (count == 1) return;
  std::vector<int> sizes(count, 0);
  for (int l : labels) ++sizes[l];
  std::ostringstream msg;
  msg << "mesh edge graph is disconnected: " << count << " components, vertex 0 component has " << sizes[0]
      << " of " << num_vertices() << " vertices";
  throw io_error(msg.str());
}

std::uint64_t Shape::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  const std::int64_t dims[2] = {vertices_.rows(), faces_.rows()};
  h = fnv1a(dims, sizeof(dims), h);
  h = fnv1a(vertices_.data(), sizeof(double) * vertices_.size(), h);
  h = fnv1a(faces_.data(), sizeof(int) * faces_.size(), h);
  return h;
}

GeodesicField geodesic_distances(const Shape& shape, int source) {
  const int n = shape.num_vertices();
  if (source < 0 || source >= n) {
    std::ostringstream msg;
    msg << "geodesic source " << source << " outside [0, " << n << ")";
    throw usage_error(msg.str());
  }
  GeodesicField field;
  field.source = source;
  field.dist = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  field.dist[source] = 0.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (d > field.dist[v]) continue;
    const auto [begin, end] = shape.neighbor_range(v);
    for (int k = begin; k < end; ++k) {
      const int w = shape.neighbor(k);
      const double nd = d + shape.neighbor_length(k);
      if (nd < field.dist[w]) {
        field.dist[w] = nd;
        heap.push({nd, w});
      }
    }
  }

  int unreachable = 0;
  for (int v = 0; v < n; ++v) unreachable += std::isinf(field.dist[v]) ? 1 : 0;
  if (unreachable > 0) {
    std::ostringstream msg;
    msg << "mesh is disconnected: " << unreachable << " of " << n << " vertices unreachable from vertex "
        << source;
    throw numerical_error(msg.str());
  }
  return field;
}

double exact_diameter(const Shape& shape) {
  shape.require_connected();
  const int n = shape.num_vertices();
  std::vector<double> per_source(n, 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (int s = 0; s < n; ++s) per_source[s] = geodesic_distances(shape, s).dist.maxCoeff();
  return *std::max_element(per_source.begin(), per_source.end());
}

double diameter(const Shape& shape, int n_sources, std::uint64_t seed) {
  if (n_sources < 1) throw usage_error("diameter needs at least one source");
  const int n = shape.num_vertices();
  if (n_sources >= n) return exact_diameter(shape);

  std::mt19937_64 rng(seed);
  int source = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  double best = 0.0;
  for (int s = 0; s < n_sources; ++s) {
    const auto field = geodesic_distances(shape, source);
    best = std::max(best, field.dist.maxCoeff());
    nearest = nearest.cwiseMin(field.dist);
    nearest.maxCoeff(&source);
  }
  return best;
}

}  // namespace isomush
