#pragma once

#include <cstdint>

#include "artic/annotation.hpp"
#include "artic/geometry.hpp"

namespace artic {

/// A colored scene mesh with its ground-truth annotation.
struct SyntheticScene {
  TriMesh mesh;
  SceneAnnotation annotation;
};

/// Deterministic room for a seed: floor, ceiling and four walls; one to three
/// cabinets along the back wall, each with a hinged door or a drawer (both with a
/// handle); a ceiling light attached to the ceiling by a fixture; and a bed with a
/// finely subdivided top. Every annotation passes check_annotation.
SyntheticScene synthetic_scene(std::uint64_t seed);

/// One cabinet with a door (rotation about +z through the hinge edge, range [0, 90]
/// degrees) carrying a handle, and a drawer (translation along +y, range [0, 0.4] m).
SyntheticScene door_cabinet();

}  // namespace artic
