#pragma once

#include "artic/geometry.hpp"

namespace artic::shapes {

/// Axis-aligned box with outward winding. `subdivisions` splits every face
/// into an n x n grid of quads; shared edge vertices are welded.
TriMesh box(const Vec3& min, const Vec3& max, int subdivisions = 1);

/// Flat nx x ny grid of quads (two triangles each) in the z = height plane.
TriMesh grid(int nx, int ny, double cell, double height = 0.0);

/// Icosahedron refined `levels` times, vertices projected to `radius`.
TriMesh icosphere(int levels, double radius = 1.0);

/// Appends `part` to `mesh`; returns the indices of the appended faces.
std::vector<int> append(TriMesh& mesh, const TriMesh& part);

}  // namespace artic::shapes
