#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "artic/geometry.hpp"

namespace artic {

enum class MotionType { kRotation, kTranslation };

std::string_view to_string(MotionType type);
MotionType motion_type_from_string(std::string_view text);

/// Motion of a movable part. Range is in degrees for rotation, meters for translation.
/// Origin is present for rotation only.
struct Articulation {
  MotionType type = MotionType::kRotation;
  Vec3 axis = kUp;
  std::optional<Vec3> origin;
  double lower = 0.0;
  double upper = 0.0;

  bool operator==(const Articulation&) const = default;
};

/// Throws ValidationError if the axis is not unit, the range is inverted, or the
/// origin presence does not match the motion type.
void check_articulation(const Articulation& a, const std::string& path = "articulation");

enum class PartRole { kNone, kMovable, kInteractable, kFixed };

std::string_view to_string(PartRole role);
PartRole part_role_from_string(std::string_view text);

struct PartSegment {
  std::string id;
  std::string label;
  std::vector<int> face_indices;  // sorted, unique
  std::optional<std::string> parent_part;
  PartRole role = PartRole::kNone;
  std::optional<Articulation> articulation;  // iff role == kMovable
  std::optional<std::string> interactable_for;

  bool operator==(const PartSegment&) const = default;
};

struct ObjectInstance {
  std::string id;
  std::string label;
  std::vector<PartSegment> parts;
  std::optional<double> mass;  // kg

  std::vector<int> face_indices() const;  // union of part faces, sorted
  const PartSegment* find_part(std::string_view part_id) const;
  bool operator==(const ObjectInstance&) const = default;
};

struct Fixture {
  std::string id;           // fixed part or object
  std::string attached_to;  // anchor part or object
  Vec3 attachment_point = Vec3::Zero();

  bool operator==(const Fixture&) const = default;
};

struct SceneAnnotation {
  std::string scene_id;
  std::vector<ObjectInstance> objects;
  std::vector<Fixture> fixtures;

  const ObjectInstance* find_object(std::string_view object_id) const;
  /// Faces of the object or part with this id; empty optional if unknown.
  std::optional<std::vector<int>> faces_of(std::string_view id) const;
  bool operator==(const SceneAnnotation&) const = default;
};

// --- sidecar I/O ------------------------------------------------------------------

/// Schema-level parse: types, required and unknown keys, enum values. Throws
/// ParseError on malformed JSON, ValidationError on schema violations. Hierarchy
/// faults (cycles, gaps, repeated part declarations) are kept so that
/// validate_connectivity can report them.
SceneAnnotation parse_annotation(std::string_view json_text);

/// parse_annotation followed by check_annotation. Throws ParseError on malformed
/// JSON and ValidationError (message prefixed by the offending path) otherwise.
SceneAnnotation load_annotation(std::string_view json_text,
                                std::optional<std::size_t> mesh_face_count = std::nullopt);

/// Throws ValidationError naming the offending path when any scene invariant fails.
void check_annotation(const SceneAnnotation& scene,
                      std::optional<std::size_t> mesh_face_count = std::nullopt);

std::string save_annotation(const SceneAnnotation& scene);

// --- mass -------------------------------------------------------------------------

struct MassClass {
  double class_mass = 0.0;        // kg
  double reference_volume = 0.0;  // m^3, the class-average bounding-box volume

  bool operator==(const MassClass&) const = default;
};

using MassTable = std::map<std::string, MassClass, std::less<>>;

MassTable load_mass_table(std::string_view json_text);
std::string save_mass_table(const MassTable& table);
/// The table shipped in data/mass_table.json.
const MassTable& default_mass_table();

/// class_mass * bbox_volume / reference_volume.
double estimate_mass(std::string_view label, double bbox_volume, const MassTable& table);

}  // namespace artic
