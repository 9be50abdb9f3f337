#include "artic/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "artic/error.hpp"
#include "artic/validation.hpp"
#include "json_util.hpp"

namespace artic {

extern const char kMassTableJson[];  // generated from data/mass_table.json

using detail::json;

std::string_view to_string(MotionType type) {
  return type == MotionType::kRotation ? "rotation" : "translation";
}

MotionType motion_type_from_string(std::string_view text) {
  if (text == "rotation") return MotionType::kRotation;
  if (text == "translation") return MotionType::kTranslation;
  throw ValidationError("unknown motion type '" + std::string(text) + "'");
}

std::string_view to_string(PartRole role) {
  switch (role) {
    case PartRole::kNone: return "none";
    case PartRole::kMovable: return "movable";
    case PartRole::kInteractable: return "interactable";
    case PartRole::kFixed: return "fixed";
  }
  return "none";
}

PartRole part_role_from_string(std::string_view text) {
  if (text == "none") return PartRole::kNone;
  if (text == "movable") return PartRole::kMovable;
  if (text == "interactable") return PartRole::kInteractable;
  if (text == "fixed") return PartRole::kFixed;
  throw ValidationError("unknown role '" + std::string(text) + "'");
}

void check_articulation(const Articulation& a, const std::string& path) {
  if (!a.axis.allFinite() || std::abs(a.axis.norm() - 1.0) > 1e-9)
    throw ValidationError(path + ".axis: must be a unit vector");
  if (!std::isfinite(a.lower) || !std::isfinite(a.upper) || a.lower > a.upper)
    throw ValidationError(path + ".range: must satisfy min <= max");
  if (a.type == MotionType::kRotation && !a.origin)
    throw ValidationError(path + ".origin: required for rotation");
  if (a.type == MotionType::kTranslation && a.origin)
    throw ValidationError(path + ".origin: not allowed for translation");
  if (a.origin && !a.origin->allFinite()) throw ValidationError(path + ".origin: must be finite");
}

std::vector<int> ObjectInstance::face_indices() const {
  std::vector<int> out;
  for (const PartSegment& p : parts) out.insert(out.end(), p.face_indices.begin(), p.face_indices.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const PartSegment* ObjectInstance::find_part(std::string_view part_id) const {
  for (const PartSegment& p : parts)
    if (p.id == part_id) return &p;
  return nullptr;
}

const ObjectInstance* SceneAnnotation::find_object(std::string_view object_id) const {
  for (const ObjectInstance& o : objects)
    if (o.id == object_id) return &o;
  return nullptr;
}

std::optional<std::vector<int>> SceneAnnotation::faces_of(std::string_view id) const {
  for (const ObjectInstance& o : objects) {
    if (o.id == id) return o.face_indices();
    if (const PartSegment* p = o.find_part(id)) return p->face_indices;
  }
  return std::nullopt;
}

namespace {

Articulation parse_articulation(const json& j, const std::string& path) {
  using namespace detail;
  check_keys(j, path, {"type", "axis", "origin", "range"});
  Articulation a;
  try {
    a.type = motion_type_from_string(as_string(require(j, path, "type"), path + ".type"));
  } catch (const ValidationError& e) {
    schema_error(path + ".type", e.what());
  }
  a.axis = as_vec3(require(j, path, "axis"), path + ".axis");
  if (j.contains("origin")) a.origin = as_vec3(j["origin"], path + ".origin");
  const json& range = require(j, path, "range");
  if (!range.is_array() || range.size() != 2) schema_error(path + ".range", "expected [min, max]");
  a.lower = as_number(range[0], path + ".range[0]");
  a.upper = as_number(range[1], path + ".range[1]");
  return a;
}

PartSegment parse_part(const json& j, const std::string& path) {
  using namespace detail;
  check_keys(j, path,
             {"id", "label", "face_indices", "parent_part", "role", "articulation", "interactable_for"});
  PartSegment p;
  p.id = as_string(require(j, path, "id"), path + ".id");
  p.label = as_string(require(j, path, "label"), path + ".label");
  const json& faces = require(j, path, "face_indices");
  if (!faces.is_array()) schema_error(path + ".face_indices", "expected an array");
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const long long f = as_integer(faces[i], path + ".face_indices[" + std::to_string(i) + "]");
    if (f < 0) schema_error(path + ".face_indices[" + std::to_string(i) + "]", "negative face index");
    p.face_indices.push_back(static_cast<int>(f));
  }
  if (j.contains("parent_part")) p.parent_part = as_string(j["parent_part"], path + ".parent_part");
  try {
    p.role = part_role_from_string(as_string(require(j, path, "role"), path + ".role"));
  } catch (const ValidationError& e) {
    schema_error(path + ".role", e.what());
  }
  if (j.contains("articulation")) p.articulation = parse_articulation(j["articulation"], path + ".articulation");
  if (j.contains("interactable_for"))
    p.interactable_for = as_string(j["interactable_for"], path + ".interactable_for");
  return p;
}

json articulation_json(const Articulation& a) {
  json j;
  j["type"] = std::string(to_string(a.type));
  j["axis"] = detail::vec3_json(a.axis);
  if (a.origin) j["origin"] = detail::vec3_json(*a.origin);
  j["range"] = json::array({a.lower, a.upper});
  return j;
}

}  // namespace

SceneAnnotation parse_annotation(std::string_view json_text) {
  using namespace detail;
  const json doc = parse_json(json_text);
  const std::string root = "$";
  check_keys(doc, root, {"scene_id", "objects", "fixtures"});
  SceneAnnotation scene;
  scene.scene_id = as_string(require(doc, root, "scene_id"), "$.scene_id");
  const json& objects = require(doc, root, "objects");
  if (!objects.is_array()) schema_error("$.objects", "expected an array");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "$.objects[" + std::to_string(i) + "]";
    const json& o = objects[i];
    check_keys(o, path, {"id", "label", "mass", "parts"});
    ObjectInstance object;
    object.id = as_string(require(o, path, "id"), path + ".id");
    object.label = as_string(require(o, path, "label"), path + ".label");
    if (o.contains("mass")) object.mass = as_number(o["mass"], path + ".mass");
    const json& parts = require(o, path, "parts");
    if (!parts.is_array()) schema_error(path + ".parts", "expected an array");
    for (std::size_t k = 0; k < parts.size(); ++k)
      object.parts.push_back(parse_part(parts[k], path + ".parts[" + std::to_string(k) + "]"));
    scene.objects.push_back(std::move(object));
  }
  if (doc.contains("fixtures")) {
    const json& fixtures = doc["fixtures"];
    if (!fixtures.is_array()) schema_error("$.fixtures", "expected an array");
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
      const std::string path = "$.fixtures[" + std::to_string(i) + "]";
      const json& f = fixtures[i];
      check_keys(f, path, {"id", "attached_to", "attachment_point"});
      scene.fixtures.push_back({as_string(require(f, path, "id"), path + ".id"),
                                as_string(require(f, path, "attached_to"), path + ".attached_to"),
                                as_vec3(require(f, path, "attachment_point"), path + ".attachment_point")});
    }
  }
  return scene;
}

void check_annotation(const SceneAnnotation& scene, std::optional<std::size_t> mesh_face_count) {
  auto fail = [](const std::string& path, const std::string& message) {
    throw ValidationError(path + ": " + message);
  };
  std::set<std::string> ids;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const ObjectInstance& object = scene.objects[i];
    const std::string opath = "$.objects[" + std::to_string(i) + "]";
    if (!ids.insert(object.id).second) fail(opath + ".id", "duplicate id '" + object.id + "'");
    if (object.mass && !(*object.mass > 0.0)) fail(opath + ".mass", "must be positive");
    for (std::size_t k = 0; k < object.parts.size(); ++k) {
      const PartSegment& part = object.parts[k];
      const std::string ppath = opath + ".parts[" + std::to_string(k) + "]";
      if (!ids.insert(part.id).second) fail(ppath + ".id", "duplicate id '" + part.id + "'");
      for (std::size_t f = 0; f < part.face_indices.size(); ++f) {
        if (part.face_indices[f] < 0) fail(ppath + ".face_indices", "negative face index");
        if (f > 0 && part.face_indices[f] <= part.face_indices[f - 1])
          fail(ppath + ".face_indices", "must be sorted and unique");
        if (mesh_face_count && static_cast<std::size_t>(part.face_indices[f]) >= *mesh_face_count)
          fail(ppath + ".face_indices", "face " + std::to_string(part.face_indices[f]) +
                                            " out of range for a mesh with " +
                                            std::to_string(*mesh_face_count) + " faces");
      }
      if (part.parent_part && !object.find_part(*part.parent_part))
        fail(ppath + ".parent_part", "dangling id '" + *part.parent_part + "'");
      if ((part.role == PartRole::kMovable) != part.articulation.has_value())
        fail(ppath + ".articulation", "required iff role is movable");
      if (part.articulation) check_articulation(*part.articulation, ppath + ".articulation");
      if (part.interactable_for) {
        const PartSegment* target = object.find_part(*part.interactable_for);
        if (!target) fail(ppath + ".interactable_for", "dangling id '" + *part.interactable_for + "'");
        if (target->role != PartRole::kMovable)
          fail(ppath + ".interactable_for", "'" + target->id + "' is not a movable part");
      }
    }
    // Sibling face sets are disjoint.
    std::map<std::string, std::map<int, std::string>> owner_by_parent;
    for (std::size_t k = 0; k < object.parts.size(); ++k) {
      const PartSegment& part = object.parts[k];
      auto& owners = owner_by_parent[part.parent_part.value_or("")];
      for (int f : part.face_indices) {
        auto [it, inserted] = owners.emplace(f, part.id);
        if (!inserted)
          fail(opath + ".parts[" + std::to_string(k) + "].face_indices",
               "face " + std::to_string(f) + " overlaps sibling part '" + it->second + "'");
      }
    }
  }
  for (std::size_t i = 0; i < scene.fixtures.size(); ++i) {
    const Fixture& fx = scene.fixtures[i];
    const std::string path = "$.fixtures[" + std::to_string(i) + "]";
    if (!scene.faces_of(fx.id)) fail(path + ".id", "dangling id '" + fx.id + "'");
    if (!scene.faces_of(fx.attached_to)) fail(path + ".attached_to", "dangling id '" + fx.attached_to + "'");
    if (fx.id == fx.attached_to) fail(path + ".attached_to", "fixture attached to itself");
    if (!fx.attachment_point.allFinite()) fail(path + ".attachment_point", "must be finite");
  }
  const ValidationReport report = validate_connectivity(scene);
  if (!report.clean()) {
    std::string message;
    for (const Violation& v : report.violations)
      message += (message.empty() ? "" : "; ") + ("$.objects[id=" + v.object_id + "]: ") +
                 std::string(to_string(v.kind)) + ": " + v.message;
    throw ValidationError(message);
  }
}

SceneAnnotation load_annotation(std::string_view json_text, std::optional<std::size_t> mesh_face_count) {
  SceneAnnotation scene = parse_annotation(json_text);
  check_annotation(scene, mesh_face_count);
  return scene;
}

std::string save_annotation(const SceneAnnotation& scene) {
  json doc;
  doc["scene_id"] = scene.scene_id;
  doc["objects"] = json::array();
  for (const ObjectInstance& o : scene.objects) {
    json jo;
    jo["id"] = o.id;
    jo["label"] = o.label;
    if (o.mass) jo["mass"] = *o.mass;
    jo["parts"] = json::array();
    for (const PartSegment& p : o.parts) {
      json jp;
      jp["id"] = p.id;
      jp["label"] = p.label;
      jp["face_indices"] = p.face_indices;
      if (p.parent_part) jp["parent_part"] = *p.parent_part;
      jp["role"] = std::string(to_string(p.role));
      if (p.articulation) jp["articulation"] = articulation_json(*p.articulation);
      if (p.interactable_for) jp["interactable_for"] = *p.interactable_for;
      jo["parts"].push_back(std::move(jp));
    }
    doc["objects"].push_back(std::move(jo));
  }
  doc["fixtures"] = json::array();
  for (const Fixture& f : scene.fixtures)
    doc["fixtures"].push_back(
        {{"id", f.id}, {"attached_to", f.attached_to}, {"attachment_point", detail::vec3_json(f.attachment_point)}});
  return doc.dump(2) + "\n";
}

MassTable load_mass_table(std::string_view json_text) {
  using namespace detail;
  const json doc = parse_json(json_text);
  expect_object(doc, "$");
  MassTable table;
  for (const auto& [label, entry] : doc.items()) {
    const std::string path = "$." + label;
    check_keys(entry, path, {"mass_kg", "reference_volume_m3"});
    MassClass c{as_number(require(entry, path, "mass_kg"), path + ".mass_kg"),
                as_number(require(entry, path, "reference_volume_m3"), path + ".reference_volume_m3")};
    if (!(c.class_mass > 0.0) || !(c.reference_volume > 0.0))
      schema_error(path, "mass and reference volume must be positive");
    table.emplace(label, c);
  }
  return table;
}

std::string save_mass_table(const MassTable& table) {
  json doc = json::object();
  for (const auto& [label, c] : table)
    doc[label] = {{"mass_kg", c.class_mass}, {"reference_volume_m3", c.reference_volume}};
  return doc.dump(2) + "\n";
}

const MassTable& default_mass_table() {
  static const MassTable table = load_mass_table(kMassTableJson);
  return table;
}

double estimate_mass(std::string_view label, double bbox_volume, const MassTable& table) {
  const auto it = table.find(label);
  if (it == table.end()) throw Error("estimate_mass: unknown label '" + std::string(label) + "'");
  if (!(bbox_volume > 0.0)) throw Error("estimate_mass: bounding-box volume must be positive");
  return it->second.class_mass * (bbox_volume / it->second.reference_volume);
}

}  // namespace artic
