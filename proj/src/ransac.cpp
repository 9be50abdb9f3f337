#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "artic/error.hpp"
#include "artic/geometry.hpp"

namespace artic {

namespace {

Plane canonical(Vec3 normal, double offset) {
  for (int axis : {2, 1, 0}) {
    if (std::abs(normal[axis]) > 1e-12) {
      if (normal[axis] < 0.0) {
        normal = -normal;
        offset = -offset;
      }
      break;
    }
  }
  return {normal, offset};
}

}  // namespace

Plane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw Error("fit_plane: need at least 3 points");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  // Eigenvalues come sorted ascending.
  const Vec3 normal = solver.eigenvectors().col(0).normalized();
  return canonical(normal, normal.dot(centroid));
}

PlaneFit ransac_plane(std::span<const Vec3> points, int iterations, double inlier_dist,
                      std::uint64_t seed) {
  if (points.size() < 3) throw Error("ransac_plane: need at least 3 points");
  if (iterations < 1) throw Error("ransac_plane: iterations must be >= 1");
  if (!(inlier_dist > 0.0)) throw Error("ransac_plane: inlier_dist must be positive");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);

  std::size_t best_count = 0;
  Plane best;
  bool found = false;
  for (int it = 0; it < iterations; ++it) {
    std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
    while (j == i) j = pick(rng);
    while (k == i || k == j) k = pick(rng);
    const Vec3 e1 = points[j] - points[i];
    const Vec3 e2 = points[k] - points[i];
    const Vec3 n = e1.cross(e2);
    const double scale = e1.squaredNorm() * e2.squaredNorm();
    if (!(n.squaredNorm() > 1e-24 * scale) || scale == 0.0) continue;
    const Vec3 normal = n.normalized();
    const double offset = normal.dot(points[i]);
    std::size_t count = 0;
    for (const Vec3& p : points)
      if (std::abs(normal.dot(p) - offset) <= inlier_dist) ++count;
    if (!found || count > best_count) {
      found = true;
      best_count = count;
      best = {normal, offset};
    }
  }
  if (!found) throw Error("ransac_plane: all samples degenerate (collinear points)");

  PlaneFit fit;
  std::vector<Vec3> inlier_points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(best.signed_distance(points[i])) <= inlier_dist) {
      fit.inliers.push_back(i);
      inlier_points.push_back(points[i]);
    }
  }
  fit.plane = fit_plane(inlier_points);
  return fit;
}

}  // namespace artic
