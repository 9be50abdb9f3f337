#include "artic/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "artic/error.hpp"
#include "artic/shapes.hpp"
#include "artic/text_format.hpp"

namespace artic {

namespace {

Mat3 rodrigues(const Vec3& axis, double radians) {
  Mat3 k;
  k << 0, -axis.z(), axis.y(),
       axis.z(), 0, -axis.x(),
       -axis.y(), axis.x(), 0;
  return Mat3::Identity() + std::sin(radians) * k + (1.0 - std::cos(radians)) * (k * k);
}

struct MovableJoint {
  std::string path;
  Articulation articulation;
};

void pose_prim(const Prim& prim, const std::string& parent, const RigidTransform& parent_motion,
               const std::map<std::string, MovableJoint>& by_body1, const JointState& state,
               PosedScene& out) {
  const std::string path = parent + "/" + prim.name;
  RigidTransform motion = parent_motion;
  if (auto it = by_body1.find(path); it != by_body1.end()) {
    const MovableJoint& joint = it->second;
    if (auto s = state.find(joint.path); s != state.end()) {
      const double applied = check_range(joint.articulation, s->second, RangeMode::kClamp);
      if (applied != s->second) out.clamps.push_back({joint.path, s->second, applied});
      motion = motion * joint_transform(joint.articulation, applied);
    }
  }
  if (prim.schema == PrimSchema::kMesh) out.meshes[path] = transform_mesh(prim_mesh(prim), motion);
  for (const Prim& c : prim.children) pose_prim(c, path, motion, by_body1, state, out);
}

Vec3 triangle_normal(const TriMesh& mesh, const Face& f, double& area2) {
  const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
  area2 = n.norm();
  return area2 > 0 ? Vec3(n / area2) : Vec3::Zero();
}

std::string unused_id(const SceneAnnotation& scene, std::string_view label) {
  std::set<std::string, std::less<>> taken;
  for (const ObjectInstance& o : scene.objects) {
    taken.insert(o.id);
    for (const PartSegment& p : o.parts) taken.insert(p.id);
  }
  for (int k = 1;; ++k) {
    std::string id = std::string(label) + "_" + std::to_string(k);
    if (!taken.count(id) && !taken.count(id + "_body")) return id;
  }
}

}  // namespace

RigidTransform joint_transform(const Articulation& a, double s) {
  RigidTransform t;
  if (a.type == MotionType::kTranslation) {
    t.translation = s * a.axis;
    return t;
  }
  if (!a.origin) throw ValidationError("rotation articulation has no origin");
  t.rotation = rodrigues(a.axis, s * std::numbers::pi / 180.0);
  t.translation = *a.origin - t.rotation * *a.origin;
  return t;
}

double check_range(const Articulation& a, double s, RangeMode mode) {
  if (!std::isfinite(s)) throw RangeError("joint value is not finite", s, a.lower, a.upper);
  if (mode == RangeMode::kClamp) return std::min(std::max(s, a.lower), a.upper);
  if (!(s >= a.lower && s <= a.upper))
    throw RangeError("joint value " + format_real(s) + " outside range [" + format_real(a.lower) + ", " +
                         format_real(a.upper) + "]",
                     s, a.lower, a.upper);
  return s;
}

Articulation joint_articulation(const JointSpec& joint) {
  if (joint.kind == JointKind::kFixed) throw Error("fixed joints have no articulation");
  Articulation a;
  a.type = joint.kind == JointKind::kRevolute ? MotionType::kRotation : MotionType::kTranslation;
  a.axis = joint.axis.value_or(kUp);
  a.origin = joint.origin;
  a.lower = joint.lower.value_or(0.0);
  a.upper = joint.upper.value_or(0.0);
  return a;
}

TriMesh prim_mesh(const Prim& prim) {
  TriMesh mesh;
  const PrimAttribute* points = prim.attribute("points");
  const PrimAttribute* counts = prim.attribute("faceVertexCounts");
  const PrimAttribute* indices = prim.attribute("faceVertexIndices");
  if (!points || !counts || !indices) return mesh;
  mesh.vertices = std::get<std::vector<Vec3>>(points->value);
  const auto& cnt = std::get<std::vector<int>>(counts->value);
  const auto& idx = std::get<std::vector<int>>(indices->value);
  std::size_t at = 0;
  for (int c : cnt) {
    for (int k = 1; k + 1 < c; ++k) mesh.faces.push_back({idx[at], idx[at + k], idx[at + k + 1]});
    at += static_cast<std::size_t>(c);
  }
  return mesh;
}

PosedScene pose_scene(const UsdStage& stage, const JointState& state) {
  std::map<std::string, MovableJoint> by_body1;
  std::set<std::string, std::less<>> movable_paths;
  for (const auto& [path, spec] : stage_joints(stage)) {
    if (spec.kind == JointKind::kFixed) continue;
    movable_paths.insert(path);
    by_body1[spec.body1] = {path, joint_articulation(spec)};
  }
  for (const auto& [path, value] : state)
    if (!movable_paths.count(path)) throw Error("unknown joint path: " + path);

  PosedScene out;
  for (const Prim& p : stage.root_prims) pose_prim(p, "", RigidTransform::identity(), by_body1, state, out);
  return out;
}

std::string_view to_string(Surface surface) {
  return surface == Surface::kHorizontal ? "horizontal" : "vertical";
}

Surface surface_from_string(std::string_view text) {
  if (text == "horizontal") return Surface::kHorizontal;
  if (text == "vertical") return Surface::kVertical;
  throw Error("unknown surface '" + std::string(text) + "' (expected horizontal or vertical)");
}

InsertionResult insert_object(const TriMesh& scene_mesh, const SceneAnnotation& annotation,
                              const TriMesh& object, std::string_view object_label,
                              const PlacementAdvice& advice, std::uint64_t seed,
                              const InsertionParams& params) {
  if (object.vertices.empty() || object.faces.empty()) throw PlacementError("object mesh is empty");
  auto target = std::find_if(annotation.objects.begin(), annotation.objects.end(),
                             [&](const ObjectInstance& o) { return o.label == advice.target_label; });
  if (target == annotation.objects.end())
    throw PlacementError("target '" + advice.target_label + "' is not in the scene");

  const double cos_tilt = std::cos(params.max_tilt_deg * std::numbers::pi / 180.0);
  const double sin_tilt = std::sin(params.max_tilt_deg * std::numbers::pi / 180.0);
  const bool horizontal = advice.surface == Surface::kHorizontal;
  const Vec3 scene_center = compute_aabb(scene_mesh.vertices).center();

  // Faces of the target that face the required way.
  std::vector<int> facing;
  for (int f : target->face_indices()) {
    const Face& face = scene_mesh.faces[f];
    double area2 = 0.0;
    const Vec3 n = triangle_normal(scene_mesh, face, area2);
    if (area2 <= 0.0) continue;
    if (horizontal) {
      if (n.z() >= cos_tilt) facing.push_back(f);
    } else {
      const Vec3 centroid =
          (scene_mesh.vertices[face[0]] + scene_mesh.vertices[face[1]] + scene_mesh.vertices[face[2]]) / 3.0;
      if (std::abs(n.z()) <= sin_tilt && n.dot(scene_center - centroid) > 0.0) facing.push_back(f);
    }
  }
  const std::string no_plane =
      "no " + std::string(to_string(advice.surface)) + " plane on '" + advice.target_label + "'";
  const std::vector<Vec3> points = face_vertices(scene_mesh, facing);
  if (points.size() < 3) throw PlacementError(no_plane);

  PlaneFit fit;
  try {
    fit = ransac_plane(points, params.iterations, params.inlier_distance, seed);
  } catch (const Error& e) {
    throw PlacementError(no_plane + ": " + e.what());
  }
  Vec3 inlier_centroid = Vec3::Zero();
  for (std::size_t i : fit.inliers) inlier_centroid += points[i];
  inlier_centroid /= static_cast<double>(fit.inliers.size());

  Vec3 n = fit.plane.normal;
  if (horizontal ? n.z() < 0 : n.dot(scene_center - inlier_centroid) < 0) n = -n;
  if (horizontal ? n.z() < cos_tilt : std::abs(n.z()) > sin_tilt) throw PlacementError(no_plane);
  const Plane plane{n, n.dot(inlier_centroid)};
  const Vec3 anchor = plane.project(inlier_centroid);

  const Aabb box = compute_aabb(object.vertices);
  RigidTransform placement;
  if (horizontal) {
    const Vec3 bottom(box.center().x(), box.center().y(), box.min.z());
    placement.translation = anchor - bottom;
  } else {
    // Turn about z so the object's +y (its front) points along the wall normal.
    const Vec3 h = Vec3(n.x(), n.y(), 0.0).normalized();
    const double phi = std::atan2(-h.x(), h.y());
    placement.rotation = rodrigues(kUp, phi);
    const Vec3 back(box.center().x(), box.min.y(), box.center().z());
    placement.translation = anchor - placement.rotation * back;
  }

  InsertionResult result{scene_mesh, annotation, unused_id(annotation, object_label), plane, placement};
  TriMesh placed = transform_mesh(object, placement);
  if (result.mesh.has_colors() && !placed.has_colors())
    placed.vertex_colors.assign(placed.vertices.size(), Color(0.5, 0.5, 0.5));
  if (!result.mesh.has_colors() && !result.mesh.vertices.empty()) placed.vertex_colors.clear();
  std::vector<int> faces = shapes::append(result.mesh, placed);
  result.annotation.objects.push_back(
      {result.object_id, std::string(object_label),
       {{result.object_id + "_body", std::string(object_label), std::move(faces), {}, PartRole::kNone, {}, {}}},
       {}});
  return result;
}

}  // namespace artic
