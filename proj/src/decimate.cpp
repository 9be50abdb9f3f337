#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

#include <Eigen/LU>

#include "artic/error.hpp"
#include "artic/geometry.hpp"

namespace artic {

namespace {

using Quadric = Eigen::Matrix4d;

// Boundary edges are pinned with perpendicular planes at this relative weight.
constexpr double kBoundaryWeight = 1e3;

Quadric plane_quadric(const Vec3& n, const Vec3& p, double weight) {
  Eigen::Vector4d plane;
  plane << n, -n.dot(p);
  return weight * plane * plane.transpose();
}

double quadric_error(const Quadric& q, const Vec3& p) {
  Eigen::Vector4d h;
  h << p, 1.0;
  return h.dot(q * h);
}

struct Candidate {
  double cost;
  int u;
  int v;
  unsigned stamp_u;
  unsigned stamp_v;
  bool operator>(const Candidate& o) const {
    return std::tie(cost, u, v) > std::tie(o.cost, o.u, o.v);
  }
};

class Decimator {
 public:
  explicit Decimator(const TriMesh& mesh)
      : pos_(mesh.vertices),
        colors_(mesh.vertex_colors),
        faces_(mesh.faces),
        face_alive_(mesh.faces.size(), true),
        vertex_alive_(mesh.vertices.size(), true),
        stamps_(mesh.vertices.size(), 0),
        incident_(mesh.vertices.size()),
        quadrics_(mesh.vertices.size(), Quadric::Zero()),
        alive_faces_(mesh.faces.size()) {
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      for (int v : faces_[f]) incident_[v].push_back(f);

    const auto normals = face_normals(mesh);
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f) {
      const Quadric k = plane_quadric(normals[f], pos_[faces_[f][0]], 1.0);
      for (int v : faces_[f]) quadrics_[v] += k;
    }

    std::unordered_map<std::uint64_t, std::vector<int>> edges;
    for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
      for (int e = 0; e < 3; ++e) edges[key(faces_[f][e], faces_[f][(e + 1) % 3])].push_back(f);
    for (const auto& [k, fs] : edges) {
      const int a = static_cast<int>(k >> 32);
      const int b = static_cast<int>(k & 0xffffffffu);
      if (fs.size() == 1) {
        const Vec3 dir = pos_[b] - pos_[a];
        const Vec3 m = dir.cross(normals[fs[0]]);
        if (m.norm() > 0.0) {
          const Quadric c = plane_quadric(m.normalized(), pos_[a], kBoundaryWeight * dir.squaredNorm());
          quadrics_[a] += c;
          quadrics_[b] += c;
        }
      }
      push(a, b);
    }
  }

  bool run(std::size_t target) {
    while (alive_faces_ > target && !queue_.empty()) {
      const Candidate c = queue_.top();
      queue_.pop();
      if (!vertex_alive_[c.u] || !vertex_alive_[c.v]) continue;
      if (stamps_[c.u] != c.stamp_u || stamps_[c.v] != c.stamp_v) continue;
      collapse_if_valid(c.u, c.v);
    }
    return alive_faces_ <= target;
  }

  TriMesh result() const {
    TriMesh out;
    std::vector<int> remap(pos_.size(), -1);
    std::vector<bool> used(pos_.size(), false);
    for (std::size_t f = 0; f < faces_.size(); ++f)
      if (face_alive_[f])
        for (int v : faces_[f]) used[v] = true;
    for (std::size_t v = 0; v < pos_.size(); ++v) {
      if (!used[v]) continue;
      remap[v] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(pos_[v]);
      if (!colors_.empty()) out.vertex_colors.push_back(colors_[v]);
    }
    for (std::size_t f = 0; f < faces_.size(); ++f)
      if (face_alive_[f])
        out.faces.push_back({remap[faces_[f][0]], remap[faces_[f][1]], remap[faces_[f][2]]});
    return out;
  }

 private:
  static std::uint64_t key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  }

  Vec3 placement(int u, int v, double& cost) const {
    const Quadric q = quadrics_[u] + quadrics_[v];
    // Endpoints first so zero-cost ties keep existing vertices.
    Vec3 best = pos_[u];
    cost = quadric_error(q, best);
    auto consider = [&](const Vec3& p) {
      const double e = quadric_error(q, p);
      if (e < cost) {
        cost = e;
        best = p;
      }
    };
    consider(pos_[v]);
    consider(0.5 * (pos_[u] + pos_[v]));
    Eigen::FullPivLU<Mat3> lu(q.topLeftCorner<3, 3>());
    lu.setThreshold(1e-10);
    if (lu.isInvertible()) {
      const Vec3 opt = lu.solve(Vec3(-q.topRightCorner<3, 1>()));
      if (opt.allFinite()) consider(opt);
    }
    return best;
  }

  void push(int u, int v) {
    double cost = 0.0;
    placement(u, v, cost);
    queue_.push({cost, std::min(u, v), std::max(u, v), stamps_[std::min(u, v)],
                 stamps_[std::max(u, v)]});
  }

  std::vector<int> alive_incident(int v) const {
    std::vector<int> out;
    for (int f : incident_[v])
      if (face_alive_[f]) out.push_back(f);
    return out;
  }

  // Neighbor -> number of alive faces containing both v and the neighbor.
  std::unordered_map<int, int> neighbor_counts(int v) const {
    std::unordered_map<int, int> out;
    for (int f : alive_incident(v))
      for (int w : faces_[f])
        if (w != v) ++out[w];
    return out;
  }

  static bool on_boundary(const std::unordered_map<int, int>& counts) {
    for (const auto& [w, c] : counts)
      if (c == 1) return true;
    return false;
  }

  Vec3 normal_of(const Face& f, int moved, const Vec3& moved_pos, double& area) const {
    auto p = [&](int i) { return f[i] == moved ? moved_pos : pos_[f[i]]; };
    const Vec3 n = (p(1) - p(0)).cross(p(2) - p(0));
    area = n.norm();
    return area > 0.0 ? Vec3(n / area) : Vec3::Zero();
  }

  void collapse_if_valid(int u, int v) {
    const auto nu = neighbor_counts(u);
    const auto nv = neighbor_counts(v);
    const auto shared = nu.find(v);
    if (shared == nu.end()) return;
    const int edge_faces = shared->second;
    if (edge_faces > 2) return;  // non-manifold edge

    const bool boundary_edge = edge_faces == 1;
    if (!boundary_edge && on_boundary(nu) && on_boundary(nv)) return;  // would pinch

    // Link condition: common neighbours are exactly the opposite vertices of the edge faces.
    std::set<int> opposite;
    for (int f : alive_incident(u)) {
      const Face& tri = faces_[f];
      if (std::find(tri.begin(), tri.end(), v) == tri.end()) continue;
      for (int w : tri)
        if (w != u && w != v) opposite.insert(w);
    }
    std::set<int> common;
    std::set<int> merged;
    for (const auto& [w, c] : nu)
      if (w != v) {
        merged.insert(w);
        if (nv.count(w)) common.insert(w);
      }
    for (const auto& [w, c] : nv)
      if (w != u) merged.insert(w);
    if (common != opposite) return;
    if (merged.size() < (boundary_edge ? 2u : 3u)) return;

    double cost = 0.0;
    const Vec3 target = placement(u, v, cost);

    // Reject collapses that flip or flatten surviving faces.
    for (int w : {u, v}) {
      for (int f : alive_incident(w)) {
        const Face& tri = faces_[f];
        const bool has_u = std::find(tri.begin(), tri.end(), u) != tri.end();
        const bool has_v = std::find(tri.begin(), tri.end(), v) != tri.end();
        if (has_u && has_v) continue;
        double a0 = 0.0, a1 = 0.0;
        const Vec3 before = normal_of(tri, w, pos_[w], a0);
        const Vec3 after = normal_of(tri, w, target, a1);
        if (a1 <= 1e-12 * std::max(a0, 1e-300) || before.dot(after) < 1e-3) return;
      }
    }

    // Surviving faces of v must not duplicate faces of u.
    std::set<std::array<int, 3>> u_faces;
    for (int f : alive_incident(u)) {
      auto tri = faces_[f];
      std::sort(tri.begin(), tri.end());
      u_faces.insert(tri);
    }
    for (int f : alive_incident(v)) {
      auto tri = faces_[f];
      if (std::find(tri.begin(), tri.end(), u) != tri.end()) continue;
      std::replace(tri.begin(), tri.end(), v, u);
      std::sort(tri.begin(), tri.end());
      if (u_faces.count(tri)) return;
    }

    for (int f : alive_incident(v)) {
      Face& tri = faces_[f];
      if (std::find(tri.begin(), tri.end(), u) != tri.end()) {
        face_alive_[f] = false;
        --alive_faces_;
      } else {
        std::replace(tri.begin(), tri.end(), v, u);
        incident_[u].push_back(f);
      }
    }
    if (!colors_.empty()) colors_[u] = 0.5 * (colors_[u] + colors_[v]);
    pos_[u] = target;
    quadrics_[u] += quadrics_[v];
    vertex_alive_[v] = false;
    incident_[v].clear();
    ++stamps_[u];
    ++stamps_[v];
    std::vector<int> live;
    for (int f : incident_[u])
      if (face_alive_[f]) live.push_back(f);
    incident_[u] = std::move(live);
    for (const auto& [w, c] : neighbor_counts(u)) {
      ++stamps_[w];
      for (const auto& [x, cx] : neighbor_counts(w)) push(w, x);
    }
  }

  std::vector<Vec3> pos_;
  std::vector<Color> colors_;
  std::vector<Face> faces_;
  std::vector<bool> face_alive_;
  std::vector<bool> vertex_alive_;
  std::vector<unsigned> stamps_;
  std::vector<std::vector<int>> incident_;
  std::vector<Quadric> quadrics_;
  std::size_t alive_faces_;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> queue_;
};

}  // namespace

DecimationResult quadric_decimate(const TriMesh& mesh, std::size_t target_faces) {
  if (target_faces < 4) throw Error("quadric_decimate: target_faces must be at least 4");
  validate_mesh(mesh);
  if (mesh.faces.size() <= target_faces) return {mesh, true};
  Decimator decimator(mesh);
  const bool reached = decimator.run(target_faces);
  return {decimator.result(), reached};
}

}  // namespace artic
