#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "artic/annotation.hpp"
#include "artic/geometry.hpp"

namespace artic {

enum class PrimSchema { kXform, kMesh, kRevoluteJoint, kPrismaticJoint, kFixedJoint };

std::string_view to_string(PrimSchema schema);
/// Throws Error for names outside the supported schema set.
PrimSchema prim_schema_from_string(std::string_view text);
bool is_joint(PrimSchema schema);

enum class AttrType { kPoint3fArray, kIntArray, kVector3f, kPoint3f, kFloat, kString, kRel };

std::string_view to_string(AttrType type);
std::optional<AttrType> attr_type_from_string(std::string_view text);

/// Point arrays, int arrays, 3-tuples, reals, and strings (string and rel values).
/// Reals are held in binary64 and emitted with round-trip precision.
using AttrValue = std::variant<std::vector<Vec3>, std::vector<int>, Vec3, double, std::string>;

struct PrimAttribute {
  AttrType type = AttrType::kFloat;
  bool custom = false;
  AttrValue value = 0.0;

  /// True when the value alternative matches the declared type.
  bool well_typed() const;
  bool operator==(const PrimAttribute&) const = default;
};

struct Prim {
  std::string name;
  PrimSchema schema = PrimSchema::kXform;
  std::vector<std::pair<std::string, PrimAttribute>> attributes;  // declaration order
  std::vector<Prim> children;

  const PrimAttribute* attribute(std::string_view attr_name) const;
  /// Replaces an existing attribute in place or appends a new one.
  void set(std::string attr_name, PrimAttribute attr);
  const Prim* child(std::string_view child_name) const;
  Prim* child(std::string_view child_name);
  bool operator==(const Prim&) const = default;
};

/// The prim tree under the pseudo-root plus layer metadata. metersPerUnit = 1 and
/// upAxis = "Z" are fixed by the format.
struct UsdStage {
  std::optional<std::string> default_prim;
  std::vector<Prim> root_prims;

  bool operator==(const UsdStage&) const = default;
};

enum class JointKind { kRevolute, kPrismatic, kFixed };

/// Joint in world coordinates. Revolute limits are degrees, prismatic limits meters.
struct JointSpec {
  JointKind kind = JointKind::kFixed;
  std::string body0;  // base prim path
  std::string body1;  // moving prim path
  std::optional<Vec3> axis;              // revolute and prismatic
  std::optional<Vec3> origin;            // revolute only
  std::optional<double> lower, upper;    // revolute and prismatic
  std::optional<std::string> interactable;  // revolute and prismatic, optional
  std::optional<Vec3> attachment_point;  // fixed only

  bool operator==(const JointSpec&) const = default;
};

PrimSchema joint_schema(JointKind kind);

/// Builds the joint prim carrying exactly the attribute set of `spec`.
Prim make_joint_prim(std::string name, const JointSpec& spec);
/// Reads a joint prim back; throws ValidationError when the attribute set does not
/// match the schema exactly.
JointSpec read_joint(const Prim& prim);

bool is_identifier(std::string_view name);
/// Maps arbitrary ids onto [A-Za-z_][A-Za-z0-9_]*.
std::string sanitize_identifier(std::string_view id);

const Prim* find_prim(const UsdStage& stage, std::string_view path);

/// Joint prims of the stage in depth-first order, with their paths.
std::vector<std::pair<std::string, JointSpec>> stage_joints(const UsdStage& stage);

/// Checks every stage invariant (identifiers, unique sibling names, value types,
/// joint attribute sets, resolvable rels, defaultPrim). Throws ValidationError.
void check_stage(const UsdStage& stage);

/// Converts an annotated scene into a stage rooted at /World. Parts nest as Mesh
/// prims following the connectivity tree; every movable part gets a joint prim next
/// to its Mesh prim and every fixture a fixed joint in its object's Xform. Prim names
/// are sanitized ids, suffixed _1, _2, ... on collision.
UsdStage assemble_stage(const TriMesh& mesh, const SceneAnnotation& annotation);

std::string emit_usda(const UsdStage& stage);

/// Throws ParseError (with line and column) for anything outside the grammar or any
/// violated stage invariant.
UsdStage parse_usda(std::string_view text);

struct ExtractedObject {
  UsdStage stage;
  std::vector<std::string> warnings;
};

/// Copies the subtree at `object_path` into a new stage whose only root is that prim.
/// Rels are re-rooted; joints whose bodies leave the subtree are dropped with a warning.
ExtractedObject extract_object(const UsdStage& stage, std::string_view object_path);

}  // namespace artic
