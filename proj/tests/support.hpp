#pragma once

// Test-only helpers and independent oracles. Nothing here calls into the
// implementation paths the tests check.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "artic/geometry.hpp"

namespace artic::testing {

inline double deg(double degrees) { return degrees * M_PI / 180.0; }

/// Closest distance from p to triangle abc (Ericson, Real-Time Collision Detection 5.1.5).
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) return (p - (a + d1 / (d1 - d3) * ab)).norm();
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) return (p - (a + d2 / (d2 - d6) * ac)).norm();
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0)
    return (p - (b + (d4 - d3) / ((d4 - d3) + (d5 - d6)) * (c - b))).norm();
  const double denom = 1.0 / (va + vb + vc);
  return (p - (a + ab * (vb * denom) + ac * (vc * denom))).norm();
}

inline double point_mesh_distance(const Vec3& p, const TriMesh& mesh) {
  double best = INFINITY;
  for (const Face& f : mesh.faces)
    best = std::min(best, point_triangle_distance(p, mesh.vertices[f[0]], mesh.vertices[f[1]],
                                                  mesh.vertices[f[2]]));
  return best;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

inline Vec3 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

/// Consistently wound random mesh: a jittered grid with a random subset of quads.
inline TriMesh random_mesh(std::mt19937_64& rng, int quads_x, int quads_y, bool colored) {
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::uniform_int_distribution<int> byte(0, 255);
  std::bernoulli_distribution keep(0.8);
  TriMesh m;
  for (int j = 0; j <= quads_y; ++j)
    for (int i = 0; i <= quads_x; ++i) {
      m.vertices.emplace_back(i + jitter(rng), j + jitter(rng), jitter(rng) * 1e-3 * i * j);
      if (colored) m.vertex_colors.emplace_back(byte(rng) / 255.0, byte(rng) / 255.0, byte(rng) / 255.0);
    }
  auto id = [&](int i, int j) { return j * (quads_x + 1) + i; };
  for (int j = 0; j < quads_y; ++j)
    for (int i = 0; i < quads_x; ++i) {
      if (!keep(rng)) continue;
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

}  // namespace artic::testing
