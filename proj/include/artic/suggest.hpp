#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "artic/annotation.hpp"
#include "artic/geometry.hpp"

namespace artic {

struct HingeSuggestion {
  Vec3 axis = kUp;
  Vec3 origin = Vec3::Zero();
  /// Set when the part's box is wider than tall (flaps, lids), where a vertical
  /// hinge is unlikely to be right.
  bool low_confidence = false;
};

/// Vertical hinge along the part-box edge whose (x, y) corner is nearest the
/// base-box center; ties go to the lowest x, then lowest y. The origin is the
/// midpoint of that edge.
HingeSuggestion suggest_hinge_axis(const TriMesh& mesh, std::span<const int> part_faces,
                                   std::span<const int> base_faces);

struct SlideHeuristicParams {
  double cluster_angle_deg = 10.0;
  double max_tilt_from_horizontal_deg = 30.0;
};

/// Area-weighted mean normal of the largest near-horizontal normal cluster of
/// the part (its front face). Throws Error("no front face found") when none qualifies.
Vec3 suggest_slide_axis(const TriMesh& mesh, std::span<const int> part_faces,
                        const SlideHeuristicParams& params = {});

inline const std::set<std::string, std::less<>> kDefaultFixtureLabels = {
    "ceiling light", "door frame", "window frame", "radiator"};
inline const std::set<std::string, std::less<>> kStructuralLabels = {"wall", "ceiling", "floor"};

struct FixtureProposal {
  Fixture fixture;
  double gap = 0.0;  // box-to-box distance to the anchor, meters
};

/// For each object or part whose label is eligible, proposes the nearest anchor
/// (a structural object or another eligible item) within `threshold` box gap.
/// The attachment point is the midpoint of the closest vertex pair, each side
/// subsampled to at most 2000 vertices by a fixed stride. When sparse vertices put
/// that midpoint farther than 2 * threshold from either box, the midpoint of the
/// closest points between the two boxes is used instead.
std::vector<FixtureProposal> propose_fixtures(
    const TriMesh& mesh, const SceneAnnotation& scene,
    const std::set<std::string, std::less<>>& eligible_labels = kDefaultFixtureLabels,
    double threshold = 0.05);

/// Vectors from each point to the centroid of the set.
std::vector<Vec3> center_shift_field(std::span<const Vec3> points);

}  // namespace artic
