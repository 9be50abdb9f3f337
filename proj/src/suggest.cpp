#include "artic/suggest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "artic/error.hpp"

namespace artic {

namespace {

constexpr std::size_t kMaxProbeVertices = 2000;

std::vector<Vec3> strided(const std::vector<Vec3>& v) {
  const std::size_t stride = (v.size() + kMaxProbeVertices - 1) / kMaxProbeVertices;
  if (stride <= 1) return v;
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < v.size(); i += stride) out.push_back(v[i]);
  return out;
}

// Midpoint of the closest point pair between two boxes (overlap centers on overlapping axes).
Vec3 closest_between_boxes(const Aabb& a, const Aabb& b) {
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (a.max[i] < b.min[i])
      out[i] = 0.5 * (a.max[i] + b.min[i]);
    else if (b.max[i] < a.min[i])
      out[i] = 0.5 * (b.max[i] + a.min[i]);
    else
      out[i] = 0.5 * (std::max(a.min[i], b.min[i]) + std::min(a.max[i], b.max[i]));
  }
  return out;
}

}  // namespace

HingeSuggestion suggest_hinge_axis(const TriMesh& mesh, std::span<const int> part_faces,
                                   std::span<const int> base_faces) {
  if (part_faces.empty() || base_faces.empty())
    throw Error("suggest_hinge_axis: part and base face sets must be non-empty");
  const Aabb part = compute_aabb(face_vertices(mesh, part_faces));
  const Vec3 base_center = compute_aabb(face_vertices(mesh, base_faces)).center();

  // Corners in (x, then y) ascending order, so the first minimum wins ties.
  const Eigen::Vector2d corners[4] = {{part.min.x(), part.min.y()},
                                      {part.min.x(), part.max.y()},
                                      {part.max.x(), part.min.y()},
                                      {part.max.x(), part.max.y()}};
  const Eigen::Vector2d target = base_center.head<2>();
  Eigen::Vector2d best = corners[0];
  double best_dist = (corners[0] - target).norm();
  for (int i = 1; i < 4; ++i) {
    const double d = (corners[i] - target).norm();
    if (d < best_dist - 1e-12 * std::max(1.0, best_dist)) {
      best = corners[i];
      best_dist = d;
    }
  }
  HingeSuggestion s;
  s.axis = kUp;
  s.origin = Vec3(best.x(), best.y(), 0.5 * (part.min.z() + part.max.z()));
  const Vec3 e = part.extent();
  s.low_confidence = std::max(e.x(), e.y()) > e.z();
  return s;
}

Vec3 suggest_slide_axis(const TriMesh& mesh, std::span<const int> part_faces,
                        const SlideHeuristicParams& params) {
  if (part_faces.empty()) throw Error("suggest_slide_axis: empty face set");
  const TriMesh part = extract_faces(mesh, part_faces);
  const auto normals = face_normals(part);
  const auto areas = face_areas(part);

  std::vector<std::size_t> order(normals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return areas[a] > areas[b]; });

  struct Cluster {
    Vec3 weighted = Vec3::Zero();
    double area = 0.0;
  };
  std::vector<Cluster> clusters;
  const double cos_join = std::cos(params.cluster_angle_deg * M_PI / 180.0);
  for (std::size_t f : order) {
    Cluster* home = nullptr;
    for (Cluster& c : clusters)
      if (c.weighted.norm() > 0.0 && c.weighted.normalized().dot(normals[f]) >= cos_join) {
        home = &c;
        break;
      }
    if (!home) home = &clusters.emplace_back();
    home->weighted += areas[f] * normals[f];
    home->area += areas[f];
  }

  const double max_vertical = std::sin(params.max_tilt_from_horizontal_deg * M_PI / 180.0);
  const Cluster* best = nullptr;
  for (const Cluster& c : clusters) {
    if (c.weighted.norm() == 0.0) continue;
    const Vec3 n = c.weighted.normalized();
    if (std::abs(n.z()) > max_vertical + 1e-12) continue;
    if (!best || c.area > best->area) best = &c;
  }
  if (!best) throw Error("suggest_slide_axis: no front face found");
  return best->weighted.normalized();
}

std::vector<FixtureProposal> propose_fixtures(const TriMesh& mesh, const SceneAnnotation& scene,
                                              const std::set<std::string, std::less<>>& eligible_labels,
                                              double threshold) {
  if (!(threshold > 0.0)) throw Error("propose_fixtures: threshold must be positive");
  struct Item {
    std::string id;
    std::size_t object;
    bool eligible;
    Aabb box;
    std::vector<Vec3> probe;
  };
  std::vector<Item> items;
  auto add_item = [&](const std::string& id, std::size_t object, const std::vector<int>& faces, bool eligible) {
    if (faces.empty()) return;
    const auto verts = face_vertices(mesh, faces);
    items.push_back({id, object, eligible, compute_aabb(verts), strided(verts)});
  };
  for (std::size_t o = 0; o < scene.objects.size(); ++o) {
    const ObjectInstance& object = scene.objects[o];
    const bool object_eligible = eligible_labels.count(object.label) > 0;
    if (object_eligible || kStructuralLabels.count(object.label))
      add_item(object.id, o, object.face_indices(), object_eligible);
    for (const PartSegment& part : object.parts)
      if (eligible_labels.count(part.label) && part.id != object.id) add_item(part.id, o, part.face_indices, true);
  }

  std::vector<FixtureProposal> proposals;
  for (const Item& item : items) {
    if (!item.eligible) continue;
    const Item* anchor = nullptr;
    double best_gap = 0.0;
    for (const Item& other : items) {
      if (other.object == item.object) continue;
      const double gap = aabb_gap(item.box, other.box);
      if (!anchor || gap < best_gap) {
        anchor = &other;
        best_gap = gap;
      }
    }
    if (!anchor || best_gap > threshold) continue;
    double best = INFINITY;
    Vec3 point = Vec3::Zero();
    for (const Vec3& a : item.probe)
      for (const Vec3& b : anchor->probe) {
        const double d = (a - b).squaredNorm();
        if (d < best) {
          best = d;
          point = 0.5 * (a + b);
        }
      }
    const double limit = 2.0 * threshold;
    if (aabb_gap({point, point}, item.box) > limit || aabb_gap({point, point}, anchor->box) > limit)
      point = closest_between_boxes(item.box, anchor->box);
    proposals.push_back({{item.id, anchor->id, point}, best_gap});
  }
  return proposals;
}

std::vector<Vec3> center_shift_field(std::span<const Vec3> points) {
  if (points.empty()) throw Error("center_shift_field: empty point set");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  std::vector<Vec3> out;
  out.reserve(points.size());
  for (const Vec3& p : points) out.push_back(centroid - p);
  return out;
}

}  // namespace artic
