#include "artic/shapes.hpp"

#include <map>
#include <numeric>

#include "artic/error.hpp"

namespace artic::shapes {

namespace {

class Welder {
 public:
  explicit Welder(TriMesh& mesh) : mesh_(mesh) {}

  int vertex(const Vec3& p) {
    const std::array<double, 3> k{p.x(), p.y(), p.z()};
    auto [it, inserted] = index_.emplace(k, static_cast<int>(mesh_.vertices.size()));
    if (inserted) mesh_.vertices.push_back(p);
    return it->second;
  }

 private:
  TriMesh& mesh_;
  std::map<std::array<double, 3>, int> index_;
};

}  // namespace

TriMesh box(const Vec3& min, const Vec3& max, int subdivisions) {
  if (subdivisions < 1) throw Error("box: subdivisions must be >= 1");
  TriMesh mesh;
  Welder weld(mesh);
  const int n = subdivisions;
  auto coord = [&](int axis, int i) {
    if (i == 0) return min[axis];
    if (i == n) return max[axis];
    return min[axis] + (max[axis] - min[axis]) * static_cast<double>(i) / n;
  };
  // Each face: fixed axis and side, plus (u, v) axes ordered so u x v points outward.
  struct Side {
    int fixed, u, v;
    bool at_max;
  };
  const Side sides[6] = {{2, 1, 0, false}, {2, 0, 1, true}, {1, 0, 2, false},
                         {1, 2, 0, true},  {0, 2, 1, false}, {0, 1, 2, true}};
  for (const Side& s : sides) {
    auto point = [&](int i, int j) {
      Vec3 p;
      p[s.fixed] = s.at_max ? max[s.fixed] : min[s.fixed];
      p[s.u] = coord(s.u, i);
      p[s.v] = coord(s.v, j);
      return weld.vertex(p);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int a = point(i, j), b = point(i + 1, j), c = point(i + 1, j + 1), d = point(i, j + 1);
        mesh.faces.push_back({a, b, c});
        mesh.faces.push_back({a, c, d});
      }
  }
  return mesh;
}

TriMesh grid(int nx, int ny, double cell, double height) {
  TriMesh mesh;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.vertices.emplace_back(i * cell, j * cell, height);
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return mesh;
}

TriMesh icosphere(int levels, double radius) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  mesh.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (Vec3& v : mesh.vertices) v.normalize();
  for (int level = 0; level < levels; ++level) {
    std::map<std::pair<int, int>, int> midpoints;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      mesh.vertices.push_back((mesh.vertices[a] + mesh.vertices[b]).normalized());
      const int id = static_cast<int>(mesh.vertices.size()) - 1;
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> refined;
    refined.reserve(mesh.faces.size() * 4);
    for (const Face& f : mesh.faces) {
      const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      refined.push_back({f[0], ab, ca});
      refined.push_back({f[1], bc, ab});
      refined.push_back({f[2], ca, bc});
      refined.push_back({ab, bc, ca});
    }
    mesh.faces = std::move(refined);
  }
  for (Vec3& v : mesh.vertices) v *= radius;
  return mesh;
}

std::vector<int> append(TriMesh& mesh, const TriMesh& part) {
  const int offset = static_cast<int>(mesh.vertices.size());
  const int first_face = static_cast<int>(mesh.faces.size());
  if (mesh.has_colors() != part.has_colors() && !mesh.vertices.empty())
    throw Error("append: color presence mismatch");
  mesh.vertices.insert(mesh.vertices.end(), part.vertices.begin(), part.vertices.end());
  mesh.vertex_colors.insert(mesh.vertex_colors.end(), part.vertex_colors.begin(),
                            part.vertex_colors.end());
  for (const Face& f : part.faces) mesh.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  std::vector<int> ids(part.faces.size());
  std::iota(ids.begin(), ids.end(), first_face);
  return ids;
}

}  // namespace artic::shapes
