#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artic/annotation.hpp"
#include "artic/geometry.hpp"
#include "artic/usd.hpp"

namespace artic {

/// Rotation by s degrees about the line origin + t * axis, or translation by s * axis.
/// Throws ValidationError for a rotation without an origin.
RigidTransform joint_transform(const Articulation& articulation, double s);

enum class RangeMode { kClamp, kStrict };

/// Clamp mode returns s clamped to [lower, upper]; strict mode throws RangeError
/// when s lies outside the range. Non-finite values throw RangeError in both modes.
double check_range(const Articulation& articulation, double s, RangeMode mode);

/// Articulation described by a revolute or prismatic joint prim.
Articulation joint_articulation(const JointSpec& joint);

/// Joint prim path -> joint parameter (degrees for revolute, meters for prismatic).
using JointState = std::map<std::string, double, std::less<>>;

struct ClampEvent {
  std::string joint;
  double requested = 0.0;
  double applied = 0.0;
};

struct PosedScene {
  std::map<std::string, TriMesh> meshes;  // Mesh prim path -> posed geometry
  std::vector<ClampEvent> clamps;
};

/// Triangles of a Mesh prim (polygons are fan-triangulated).
TriMesh prim_mesh(const Prim& prim);

/// Poses every Mesh prim of the stage. A movable part and all prims nested under it
/// move with its joint; nested joints compose parent-first. Values outside a joint's
/// range are clamped and reported. Throws Error for state keys that name no
/// revolute or prismatic joint.
PosedScene pose_scene(const UsdStage& stage, const JointState& state);

enum class Surface { kHorizontal, kVertical };

std::string_view to_string(Surface surface);
Surface surface_from_string(std::string_view text);

struct PlacementAdvice {
  std::string target_label;
  Surface surface = Surface::kHorizontal;

  bool operator==(const PlacementAdvice&) const = default;
};

/// Chooses where an object goes. Implementations return a target label present in
/// scene_labels or throw PlacementError; they are safe to call concurrently.
class PlacementAdvisor {
 public:
  virtual ~PlacementAdvisor() = default;
  virtual PlacementAdvice advise(std::string_view object_label,
                                 const std::vector<std::string>& scene_labels) const = 0;
};

struct PlacementRule {
  std::string object_label;
  std::vector<std::string> target_labels;  // in preference order
  Surface surface = Surface::kHorizontal;
};

/// Parses a rules document: a JSON list of {object_label, target_labels, surface}.
std::vector<PlacementRule> parse_placement_rules(std::string_view json_text);
/// The rules shipped in data/placement_rules.json.
const std::vector<PlacementRule>& default_placement_rules();

/// Table lookup: the first rule for the object label whose target (in preference
/// order) is present in the scene wins.
class RuleBasedAdvisor final : public PlacementAdvisor {
 public:
  RuleBasedAdvisor() : rules_(default_placement_rules()) {}
  explicit RuleBasedAdvisor(std::vector<PlacementRule> rules) : rules_(std::move(rules)) {}

  PlacementAdvice advise(std::string_view object_label,
                         const std::vector<std::string>& scene_labels) const override;

 private:
  std::vector<PlacementRule> rules_;
};

PlacementAdvice rule_based_advisor(std::string_view object_label,
                                   const std::vector<std::string>& scene_labels);

/// Client for an external advisor service: POSTs {"object_label", "scene_labels"}
/// as JSON to `url` and expects {"target_label", "surface"} back. Transport errors,
/// timeouts and non-conforming answers fall back to `fallback` when one is given and
/// throw PlacementError otherwise.
class HttpPlacementAdvisor final : public PlacementAdvisor {
 public:
  struct Options {
    std::string url;  // http://host[:port]/path
    std::chrono::milliseconds timeout{10000};
    std::shared_ptr<const PlacementAdvisor> fallback;
  };

  explicit HttpPlacementAdvisor(Options options);

  PlacementAdvice advise(std::string_view object_label,
                         const std::vector<std::string>& scene_labels) const override;

 private:
  Options options_;
  std::string host_;
  int port_ = 80;
  std::string path_;
};

struct InsertionParams {
  int iterations = 500;
  double inlier_distance = 0.01;  // meters
  double max_tilt_deg = 15.0;
};

struct InsertionResult {
  TriMesh mesh;
  SceneAnnotation annotation;
  std::string object_id;
  Plane plane;               // normal points away from the surface (up, or into the room)
  RigidTransform placement;  // applied to the object mesh
};

/// Places `object` on the first object labelled advice.target_label. RANSAC runs over
/// the vertices of the target's faces that face the required way (up for horizontal,
/// towards the scene centroid for vertical); the plane is kept only within
/// max_tilt_deg of the required orientation. A horizontal placement puts the object's
/// box bottom-centre on the projected inlier centroid; a vertical one turns the object
/// so its -y side faces the wall and puts its box back-centre there. The object is
/// appended as a new single-part object; existing geometry and annotations are kept.
InsertionResult insert_object(const TriMesh& scene_mesh, const SceneAnnotation& annotation,
                              const TriMesh& object, std::string_view object_label,
                              const PlacementAdvice& advice, std::uint64_t seed,
                              const InsertionParams& params = {});

}  // namespace artic
