#include "artic/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

#include "artic/error.hpp"

namespace artic {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

// Undirected edge -> incident faces, in face order.
std::unordered_map<std::uint64_t, std::vector<int>> edge_faces(const TriMesh& mesh) {
  std::unordered_map<std::uint64_t, std::vector<int>> out;
  out.reserve(mesh.faces.size() * 2);
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
    const Face& tri = mesh.faces[f];
    for (int e = 0; e < 3; ++e) out[edge_key(tri[e], tri[(e + 1) % 3])].push_back(f);
  }
  return out;
}

bool has_directed_edge(const Face& f, int a, int b) {
  for (int e = 0; e < 3; ++e)
    if (f[e] == a && f[(e + 1) % 3] == b) return true;
  return false;
}

}  // namespace

double aabb_gap(const Aabb& a, const Aabb& b) {
  Vec3 d;
  for (int i = 0; i < 3; ++i)
    d[i] = std::max({0.0, a.min[i] - b.max[i], b.min[i] - a.max[i]});
  return d.norm();
}

bool RigidTransform::is_rigid(double tol) const {
  return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(rotation.determinant() - 1.0) <= tol;
}

TriMesh transform_mesh(const TriMesh& mesh, const RigidTransform& t) {
  TriMesh out = mesh;
  for (Vec3& v : out.vertices) v = t.apply(v);
  return out;
}

void validate_mesh(const TriMesh& mesh) {
  const auto n = static_cast<long long>(mesh.vertices.size());
  if (!mesh.vertex_colors.empty() && mesh.vertex_colors.size() != mesh.vertices.size())
    throw Error("mesh has " + std::to_string(mesh.vertex_colors.size()) + " colors for " +
                std::to_string(n) + " vertices");
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
    if (!mesh.vertices[i].allFinite())
      throw Error("vertex " + std::to_string(i) + " has a non-finite coordinate");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& tri = mesh.faces[f];
    for (int idx : tri)
      if (idx < 0 || idx >= n)
        throw Error("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                    " of " + std::to_string(n));
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
      throw Error("face " + std::to_string(f) + " is degenerate (repeated vertex index)");
  }
}

std::size_t orient_consistently(TriMesh& mesh) {
  const auto adjacency = edge_faces(mesh);
  std::vector<bool> visited(mesh.faces.size(), false);
  std::size_t flipped = 0;
  std::deque<int> queue;
  for (int seed = 0; seed < static_cast<int>(mesh.faces.size()); ++seed) {
    if (visited[seed]) continue;
    visited[seed] = true;
    queue.push_back(seed);
    while (!queue.empty()) {
      const int f = queue.front();
      queue.pop_front();
      const Face tri = mesh.faces[f];
      for (int e = 0; e < 3; ++e) {
        const int a = tri[e];
        const int b = tri[(e + 1) % 3];
        const auto& incident = adjacency.at(edge_key(a, b));
        if (incident.size() != 2) continue;  // boundary or non-manifold
        const int g = incident[0] == f ? incident[1] : incident[0];
        if (visited[g]) continue;
        visited[g] = true;
        if (has_directed_edge(mesh.faces[g], a, b)) {
          std::swap(mesh.faces[g][1], mesh.faces[g][2]);
          ++flipped;
        }
        queue.push_back(g);
      }
    }
  }
  return flipped;
}

bool winding_consistent(const TriMesh& mesh) {
  for (const auto& [key, incident] : edge_faces(mesh)) {
    if (incident.size() != 2) continue;
    const int a = static_cast<int>(key >> 32);
    const int b = static_cast<int>(key & 0xffffffffu);
    const Face& f = mesh.faces[incident[0]];
    const Face& g = mesh.faces[incident[1]];
    const bool f_ab = has_directed_edge(f, a, b);
    const bool g_ab = has_directed_edge(g, a, b);
    if (f_ab == g_ab) return false;
  }
  return true;
}

Aabb compute_aabb(std::span<const Vec3> points) {
  if (points.empty()) throw Error("compute_aabb: empty point set");
  Aabb box{points.front(), points.front()};
  for (const Vec3& p : points) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

std::vector<Vec3> face_normals(const TriMesh& mesh) {
  std::vector<Vec3> normals;
  normals.reserve(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& tri = mesh.faces[f];
    const Vec3 n = (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                       .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]]);
    const double len = n.norm();
    if (!(len > 0.0)) throw Error("face_normals: face " + std::to_string(f) + " has zero area");
    normals.push_back(n / len);
  }
  return normals;
}

std::vector<double> face_areas(const TriMesh& mesh) {
  std::vector<double> areas;
  areas.reserve(mesh.faces.size());
  for (const Face& tri : mesh.faces)
    areas.push_back(0.5 * (mesh.vertices[tri[1]] - mesh.vertices[tri[0]])
                              .cross(mesh.vertices[tri[2]] - mesh.vertices[tri[0]])
                              .norm());
  return areas;
}

TriMesh extract_faces(const TriMesh& mesh, std::span<const int> faces) {
  TriMesh out;
  std::unordered_map<int, int> remap;
  for (int f : faces) {
    if (f < 0 || f >= static_cast<int>(mesh.faces.size()))
      throw Error("face index " + std::to_string(f) + " out of range");
    Face tri{};
    for (int i = 0; i < 3; ++i) {
      const int v = mesh.faces[f][i];
      auto [it, inserted] = remap.emplace(v, static_cast<int>(out.vertices.size()));
      if (inserted) {
        out.vertices.push_back(mesh.vertices[v]);
        if (mesh.has_colors()) out.vertex_colors.push_back(mesh.vertex_colors[v]);
      }
      tri[i] = it->second;
    }
    out.faces.push_back(tri);
  }
  return out;
}

std::vector<Vec3> face_vertices(const TriMesh& mesh, std::span<const int> faces) {
  return extract_faces(mesh, faces).vertices;
}

VoxelGrid voxel_grid(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw Error("voxel size must be positive");
  using Cell = std::array<long long, 3>;
  std::map<Cell, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    const Cell c{static_cast<long long>(std::floor(p.x() / voxel)),
                 static_cast<long long>(std::floor(p.y() / voxel)),
                 static_cast<long long>(std::floor(p.z() / voxel))};
    cells[c].push_back(i);
  }
  VoxelGrid grid;
  grid.cloud.points.reserve(cells.size());
  for (auto& [cell, members] : cells) {
    Vec3 sum = Vec3::Zero();
    Color color = Color::Zero();
    for (std::size_t i : members) {
      sum += cloud.points[i];
      if (cloud.has_colors()) color += cloud.colors[i];
    }
    const double count = static_cast<double>(members.size());
    grid.cloud.points.push_back(sum / count);
    if (cloud.has_colors()) grid.cloud.colors.push_back(color / count);
    grid.members.push_back(std::move(members));
  }
  return grid;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  return voxel_grid(cloud, voxel).cloud;
}

PointCloud crop_cuboid(const PointCloud& cloud, const Eigen::Vector2d& center_xy, double side) {
  if (!(side > 0.0)) throw Error("crop side must be positive");
  const double half = side / 2.0;
  PointCloud out;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if (std::abs(p.x() - center_xy.x()) <= half && std::abs(p.y() - center_xy.y()) <= half) {
      out.points.push_back(p);
      if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
    }
  }
  return out;
}

}  // namespace artic
