#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace artic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
/// RGB triple with channels in [0, 1].
using Color = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// World frame convention: +Z is up (against gravity).
inline const Vec3 kUp{0.0, 0.0, 1.0};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Color> vertex_colors;  // empty or one per vertex
  std::vector<Face> faces;

  bool has_colors() const { return !vertex_colors.empty(); }
  bool operator==(const TriMesh&) const = default;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Color> colors;  // empty or one per point

  bool has_colors() const { return !colors.empty(); }
  bool operator==(const PointCloud&) const = default;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  double volume() const {
    const Vec3 e = extent();
    return e.x() * e.y() * e.z();
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// Euclidean gap between two boxes; 0 when they touch or overlap.
double aabb_gap(const Aabb& a, const Aabb& b);

/// Plane {p : normal . p = offset}.
struct Plane {
  Vec3 normal = kUp;
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal; }
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  /// (this * other)(p) == this(other(p))
  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
  bool is_rigid(double tol = 1e-9) const;
};

TriMesh transform_mesh(const TriMesh& mesh, const RigidTransform& t);

// --- validation -------------------------------------------------------------

/// Throws artic::Error when a face index is out of range, a face is degenerate,
/// colors are mis-sized, or a coordinate is non-finite.
void validate_mesh(const TriMesh& mesh);

/// Flips faces so that winding is consistent across manifold edges inside each
/// connected component. The lowest-index face of a component keeps its winding.
/// Returns the number of flipped faces.
std::size_t orient_consistently(TriMesh& mesh);

bool winding_consistent(const TriMesh& mesh);

// --- PLY --------------------------------------------------------------------

/// ASCII PLY reader. The `face` element may be absent (point-only files).
TriMesh load_ply(std::string_view text);
std::string save_ply(const TriMesh& mesh);
std::string save_ply(const PointCloud& cloud);

// --- primitives ---------------------------------------------------------------

Aabb compute_aabb(std::span<const Vec3> points);
std::vector<Vec3> face_normals(const TriMesh& mesh);
std::vector<double> face_areas(const TriMesh& mesh);

/// Compact sub-mesh holding `faces` of `mesh`; vertices re-indexed in first-use order.
TriMesh extract_faces(const TriMesh& mesh, std::span<const int> faces);
/// Distinct vertex positions referenced by `faces`, in first-use order.
std::vector<Vec3> face_vertices(const TriMesh& mesh, std::span<const int> faces);

struct VoxelGrid {
  PointCloud cloud;
  /// members[i] lists the input indices averaged into output point i.
  std::vector<std::vector<std::size_t>> members;
};

/// Centroid-per-cell downsampling; cell = floor(coordinate / voxel) per axis.
/// Output is ordered by cell index (lexicographic x, y, z).
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);
VoxelGrid voxel_grid(const PointCloud& cloud, double voxel);

PointCloud crop_cuboid(const PointCloud& cloud, const Eigen::Vector2d& center_xy, double side);

// --- decimation ---------------------------------------------------------------

struct DecimationResult {
  TriMesh mesh;
  /// False when topology constraints stopped collapses above the target.
  bool reached_target = true;
};

/// Garland-Heckbert edge-collapse decimation. Non-manifold edges and
/// boundary-pinching collapses are skipped; boundaries are held by constraint planes.
DecimationResult quadric_decimate(const TriMesh& mesh, std::size_t target_faces);

// --- plane fitting --------------------------------------------------------------

struct PlaneFit {
  Plane plane;
  std::vector<std::size_t> inliers;
};

/// Least-squares plane through `points` (smallest-eigenvalue direction of the covariance).
Plane fit_plane(std::span<const Vec3> points);

/// RANSAC over 3-point samples, followed by a least-squares refit on the best
/// sample's inliers. Deterministic for a fixed seed. The returned normal is
/// oriented so its first non-zero component in (z, y, x) order is positive.
PlaneFit ransac_plane(std::span<const Vec3> points, int iterations, double inlier_dist,
                      std::uint64_t seed);

}  // namespace artic
