#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "artic/error.hpp"
#include "artic/fixture.hpp"
#include "artic/shapes.hpp"
#include "artic/usd.hpp"
#include "stage_gen.hpp"

using namespace artic;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int count_schema(const Prim& p, PrimSchema schema) {
  int n = p.schema == schema ? 1 : 0;
  for (const Prim& c : p.children) n += count_schema(c, schema);
  return n;
}

int count_schema(const UsdStage& s, PrimSchema schema) {
  int n = 0;
  for (const Prim& p : s.root_prims) n += count_schema(p, schema);
  return n;
}

int count_joints(const UsdStage& s) {
  return count_schema(s, PrimSchema::kRevoluteJoint) + count_schema(s, PrimSchema::kPrismaticJoint) +
         count_schema(s, PrimSchema::kFixedJoint);
}

PartSegment part(std::string id, std::optional<std::string> parent, std::vector<int> faces,
                 PartRole role = PartRole::kNone, std::optional<Articulation> art = {},
                 std::optional<std::string> interactable_for = {}) {
  return {id, id, std::move(faces), std::move(parent), role, std::move(art), std::move(interactable_for)};
}

// One object with a root body and a drawer sliding along +y over [0, 0.4].
struct DrawerScene {
  TriMesh mesh;
  SceneAnnotation scene;
};

DrawerScene drawer_scene(int extra_objects = 0) {
  DrawerScene d;
  d.scene.scene_id = "drawers";
  auto body = shapes::append(d.mesh, shapes::box({0, 0, 0}, {1, 1, 1}));
  auto drawer = shapes::append(d.mesh, shapes::box({0.1, 1, 0.1}, {0.9, 1.1, 0.5}));
  Articulation slide{MotionType::kTranslation, {0, 1, 0}, std::nullopt, 0.0, 0.4};
  d.scene.objects.push_back({"dresser", "dresser",
                             {part("body", {}, body), part("drawer", "body", drawer, PartRole::kMovable, slide)},
                             {}});
  for (int i = 0; i < extra_objects; ++i) {
    const double x = 2.0 + i;
    auto faces = shapes::append(d.mesh, shapes::box({x, 0, 0}, {x + 0.5, 0.5, 0.5}));
    const std::string id = "thing_" + std::to_string(i);
    d.scene.objects.push_back({id, "thing", {part(id + "_root", {}, faces)}, {}});
  }
  return d;
}

void check_compact(const Prim& p) {
  if (p.schema == PrimSchema::kMesh && p.attribute("points")) {
    const auto& pts = std::get<std::vector<Vec3>>(p.attribute("points")->value);
    const auto& idx = std::get<std::vector<int>>(p.attribute("faceVertexIndices")->value);
    std::set<int> used(idx.begin(), idx.end());
    CHECK(used.size() == pts.size());
  }
  for (const Prim& c : p.children) check_compact(c);
}

}  // namespace

TEST_CASE("empty stage emits exactly the header block") {
  const std::string text = emit_usda(UsdStage{});
  CHECK(lines_of(text) ==
        std::vector<std::string>{"#usda 1.0", "(", "    metersPerUnit = 1", "    upAxis = \"Z\"", ")"});
  CHECK(parse_usda(text) == UsdStage{});
  CHECK(parse_usda("#usda 1.0\n(\n)\n") == UsdStage{});
}

TEST_CASE("assemble_stage maps a drawer to a prismatic joint") {
  auto d = drawer_scene();
  const UsdStage stage = assemble_stage(d.mesh, d.scene);
  check_stage(stage);
  CHECK(count_schema(stage, PrimSchema::kMesh) == 2);
  CHECK(count_schema(stage, PrimSchema::kPrismaticJoint) == 1);
  CHECK(count_joints(stage) == 1);

  const Prim* drawer = find_prim(stage, "/World/dresser/body/drawer");
  REQUIRE(drawer);
  CHECK(std::get<std::string>(drawer->attribute("artic:role")->value) == "movable");
  const Prim* joint = find_prim(stage, "/World/dresser/body/drawer_joint");
  REQUIRE(joint);
  const JointSpec spec = read_joint(*joint);
  CHECK(spec.kind == JointKind::kPrismatic);
  CHECK(spec.body0 == "/World/dresser/body");
  CHECK(spec.body1 == "/World/dresser/body/drawer");
  CHECK(*spec.lower == 0.0);
  CHECK(*spec.upper == 0.4);
  CHECK(!spec.origin);

  const std::string text = emit_usda(stage);
  CHECK(text.find("\n                float physics:upperLimit = 0.4\n") != std::string::npos);
  CHECK(text.find("defaultPrim = \"World\"") != std::string::npos);
  CHECK(parse_usda(text) == stage);
}

TEST_CASE("assemble_stage without articulations has no joints") {
  TriMesh mesh;
  SceneAnnotation s{"plain", {}, {}};
  auto faces = shapes::append(mesh, shapes::box({0, 0, 0}, {1, 1, 1}));
  s.objects.push_back({"table", "table", {part("top", {}, faces)}, 12.5});
  const UsdStage stage = assemble_stage(mesh, s);
  CHECK(count_joints(stage) == 0);
  const Prim* table = find_prim(stage, "/World/table");
  REQUIRE(table);
  CHECK(std::get<double>(table->attribute("physics:mass")->value) == 12.5);
  CHECK(!table->attribute("physics:mass")->custom);
  CHECK(table->attribute("artic:label")->custom);
}

TEST_CASE("assemble_stage emits fixed joints for fixtures") {
  TriMesh mesh;
  SceneAnnotation s{"light", {}, {}};
  auto ceiling = shapes::append(mesh, shapes::box({-2, -2, 2.5}, {2, 2, 2.6}));
  auto light = shapes::append(mesh, shapes::box({-0.2, -0.2, 2.4}, {0.2, 0.2, 2.5}));
  s.objects.push_back({"ceiling", "ceiling", {part("ceiling_root", {}, ceiling)}, {}});
  s.objects.push_back({"light", "ceiling light", {part("light_root", {}, light)}, {}});
  s.fixtures.push_back({"light", "ceiling", {0, 0, 2.5}});
  const UsdStage stage = assemble_stage(mesh, s);
  CHECK(count_schema(stage, PrimSchema::kFixedJoint) == 1);
  const Prim* joint = find_prim(stage, "/World/light/light_fixed_joint");
  REQUIRE(joint);
  const JointSpec spec = read_joint(*joint);
  CHECK(spec.body0 == "/World/ceiling");
  CHECK(spec.body1 == "/World/light");
  CHECK(*spec.attachment_point == Vec3(0, 0, 2.5));
  CHECK(emit_usda(stage).find("custom point3f artic:attachmentPoint = (0, 0, 2.5)") != std::string::npos);

  s.fixtures[0].attached_to = "nowhere";
  CHECK_THROWS_WITH_AS(assemble_stage(mesh, s), doctest::Contains("fixtures[0].attached_to"),
                       ValidationError);
}

TEST_CASE("assemble_stage rejects invalid annotations") {
  auto d = drawer_scene();
  d.scene.objects[0].parts[0].parent_part = "drawer";  // body <-> drawer cycle
  CHECK_THROWS_WITH_AS(assemble_stage(d.mesh, d.scene), doctest::Contains("cycle"), ValidationError);

  auto e = drawer_scene();
  e.scene.objects[0].parts[1].face_indices.push_back(999);
  CHECK_THROWS_AS(assemble_stage(e.mesh, e.scene), ValidationError);
}

TEST_CASE("assemble_stage sanitizes and uniquifies names") {
  TriMesh mesh;
  SceneAnnotation s{"names", {}, {}};
  auto a = shapes::append(mesh, shapes::box({0, 0, 0}, {1, 1, 1}));
  auto b = shapes::append(mesh, shapes::box({2, 0, 0}, {3, 1, 1}));
  auto c = shapes::append(mesh, shapes::box({4, 0, 0}, {5, 1, 1}));
  s.objects.push_back({"3 drawers", "chest", {part("a.b", {}, a)}, {}});
  s.objects.push_back({"3-drawers", "chest", {part("a/b", {}, b)}, {}});
  s.objects.push_back({"_3_drawers", "chest", {part("x", {}, c)}, {}});
  const UsdStage stage = assemble_stage(mesh, s);
  CHECK(find_prim(stage, "/World/_3_drawers"));
  CHECK(find_prim(stage, "/World/_3_drawers/a_b"));
  CHECK(find_prim(stage, "/World/_3_drawers_1/a_b"));
  CHECK(find_prim(stage, "/World/_3_drawers_2/x"));
  CHECK(parse_usda(emit_usda(stage)) == stage);
}

TEST_CASE("synthetic scenes: joint count, compaction and round-trip") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticScene scene = synthetic_scene(seed);
    const UsdStage stage = assemble_stage(scene.mesh, scene.annotation);
    check_stage(stage);
    int movable = 0;
    std::size_t mesh_prims = 0;
    for (const auto& o : scene.annotation.objects) {
      mesh_prims += o.parts.size();
      for (const auto& p : o.parts) movable += p.role == PartRole::kMovable;
    }
    CHECK(count_joints(stage) == movable + static_cast<int>(scene.annotation.fixtures.size()));
    CHECK(count_schema(stage, PrimSchema::kMesh) == static_cast<int>(mesh_prims));
    for (const Prim& p : stage.root_prims) check_compact(p);

    // Every interactable handle appears as the joint's interactable rel.
    for (const auto& [path, spec] : stage_joints(stage))
      if (spec.kind != JointKind::kFixed) {
        REQUIRE(spec.interactable);
        CHECK(spec.interactable->ends_with("_handle"));
      }

    const std::string text = emit_usda(stage);
    const UsdStage back = parse_usda(text);
    CHECK(back == stage);
    CHECK(emit_usda(back) == text);
  }
}

TEST_CASE("parse_usda(emit_usda(S)) == S over generated stages") {
  testing::StageGenerator gen(42);
  for (int i = 0; i < 300; ++i) {
    const UsdStage s = gen();
    check_stage(s);
    const std::string text = emit_usda(s);
    UsdStage back;
    REQUIRE_NOTHROW(back = parse_usda(text));
    REQUIRE(back == s);
    // Signed zeros compare equal, so also require identical re-emission.
    REQUIRE(emit_usda(back) == text);
  }
}

TEST_CASE("emit_usda distinguishes values one ulp apart") {
  auto d = drawer_scene();
  UsdStage a = assemble_stage(d.mesh, d.scene);
  UsdStage b = a;
  Prim* joint = const_cast<Prim*>(find_prim(b, "/World/dresser/body/drawer_joint"));
  auto upper = *joint->attribute("physics:upperLimit");
  upper.value = std::nextafter(0.4, 1.0);
  joint->set("physics:upperLimit", upper);
  CHECK(emit_usda(a) != emit_usda(b));
  CHECK(parse_usda(emit_usda(b)) == b);
}

TEST_CASE("parse_usda errors carry line and column") {
  const std::string header = "#usda 1.0\n(\n    metersPerUnit = 1\n    upAxis = \"Z\"\n)\n";

  auto expect_error = [&](const std::string& body, int line, int column, const std::string& needle) {
    try {
      parse_usda(header + body);
      FAIL("expected a parse error for: " << body);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
      CHECK(e.column() == column);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };

  expect_error("def Cube \"a\"\n{\n}\n", 6, 5, "unknown schema 'Cube'");
  expect_error("def Xform \"a\"\n{\n    custom point3f p = (1, 2)\n}\n", 8, 29, "malformed tuple");
  expect_error("def Xform \"a\"\n{\n    custom point3f p = (1, x, 3)\n}\n", 8, 28, "malformed number 'x'");
  expect_error("def Xform \"a\"\n{\n    custom rel r = </b>\n}\n", 8, 16, "unresolved rel </b>");
  expect_error("def Xform \"a\"\n{\n}\ndef Mesh \"a\"\n{\n}\n", 9, 10, "duplicate sibling name 'a'");
  expect_error("def Xform \"a\"\n{\n    custom float f = 1\n    custom float f = 2\n}\n", 9, 18,
               "duplicate attribute");
  expect_error("def Xform \"a\"\n{\n", 8, 1, "not closed");
  expect_error("def Xform \"1a\"\n{\n}\n", 6, 11, "invalid prim name");
  expect_error("def PhysicsFixedJoint \"j\"\n{\n    rel physics:body0 = </j>\n}\n", 6, 23,
               "missing attribute");
  expect_error("}\n", 6, 1, "unmatched");

  try {
    parse_usda("#usda 1.0\n(\n    defaultPrim = \"nope\"\n)\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("defaultPrim 'nope'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_usda("#usda 1.0\n(\n    upAxis = \"Y\"\n)\n"), ParseError);
  CHECK_THROWS_AS(parse_usda("#usda 1.1\n(\n)\n"), ParseError);
}

TEST_CASE("extract_object keeps the subtree and its joints") {
  auto d = drawer_scene(9);
  REQUIRE(d.scene.objects.size() == 10);
  const UsdStage stage = assemble_stage(d.mesh, d.scene);
  const ExtractedObject ex = extract_object(stage, "/World/dresser");
  CHECK(ex.warnings.empty());
  REQUIRE(ex.stage.root_prims.size() == 1);
  CHECK(ex.stage.default_prim == "dresser");
  CHECK(count_schema(ex.stage, PrimSchema::kMesh) == 2);
  CHECK(count_joints(ex.stage) == 1);
  const auto joints = stage_joints(ex.stage);
  REQUIRE(joints.size() == 1);
  CHECK(joints[0].first == "/dresser/body/drawer_joint");
  CHECK(joints[0].second.body0 == "/dresser/body");
  CHECK(joints[0].second.body1 == "/dresser/body/drawer");
  check_stage(ex.stage);
  CHECK(parse_usda(emit_usda(ex.stage)) == ex.stage);

  CHECK_THROWS_AS(extract_object(stage, "/World/missing"), Error);
}

TEST_CASE("extract_object drops fixtures that leave the subtree") {
  const SyntheticScene scene = synthetic_scene(3);
  const UsdStage stage = assemble_stage(scene.mesh, scene.annotation);
  const ExtractedObject ex = extract_object(stage, "/World/ceiling_light");
  REQUIRE(ex.warnings.size() == 1);
  CHECK(ex.warnings[0].find("ceiling_light_fixed_joint") != std::string::npos);
  CHECK(count_joints(ex.stage) == 0);
  check_stage(ex.stage);
  CHECK(parse_usda(emit_usda(ex.stage)) == ex.stage);

  // Cabinets keep both movable joints and the handle links.
  const ExtractedObject cab = extract_object(stage, "/World/cabinet_0");
  CHECK(cab.warnings.empty());
  for (const auto& [path, spec] : stage_joints(cab.stage)) {
    CHECK(spec.body1.starts_with("/cabinet_0/"));
    REQUIRE(spec.interactable);
    CHECK(spec.interactable->starts_with("/cabinet_0/"));
  }
  CHECK(parse_usda(emit_usda(cab.stage)) == cab.stage);
}

TEST_CASE("read_joint enforces the exact attribute set") {
  JointSpec spec;
  spec.kind = JointKind::kRevolute;
  spec.body0 = "/a";
  spec.body1 = "/b";
  spec.axis = Vec3(0, 0, 1);
  spec.origin = Vec3(1, 2, 3);
  spec.lower = 0;
  spec.upper = 90;
  Prim joint = make_joint_prim("j", spec);
  CHECK(read_joint(joint) == spec);

  Prim extra = joint;
  extra.set("artic:attachmentPoint", {AttrType::kPoint3f, true, Vec3(0, 0, 0)});
  CHECK_THROWS_AS(read_joint(extra), ValidationError);

  Prim wrong_custom = joint;
  wrong_custom.set("physics:lowerLimit", {AttrType::kFloat, true, 0.0});
  CHECK_THROWS_AS(read_joint(wrong_custom), ValidationError);

  Prim prismatic = joint;
  prismatic.schema = PrimSchema::kPrismaticJoint;  // origin is not allowed on prismatic joints
  CHECK_THROWS_AS(read_joint(prismatic), ValidationError);
}

TEST_CASE("check_stage invariants") {
  UsdStage s;
  s.root_prims.push_back(Prim{"a", PrimSchema::kXform, {}, {}});
  s.root_prims.push_back(Prim{"b", PrimSchema::kMesh, {}, {}});
  check_stage(s);

  UsdStage dup = s;
  dup.root_prims[1].name = "a";
  CHECK_THROWS_AS(check_stage(dup), ValidationError);

  UsdStage bad_rel = s;
  bad_rel.root_prims[0].set("r", {AttrType::kRel, true, std::string("/c")});
  CHECK_THROWS_WITH_AS(check_stage(bad_rel), doctest::Contains("unresolved rel"), ValidationError);

  UsdStage mistyped = s;
  mistyped.root_prims[0].set("f", {AttrType::kFloat, true, std::string("x")});
  CHECK_THROWS_AS(check_stage(mistyped), ValidationError);

  UsdStage same_body = s;
  JointSpec fixed{JointKind::kFixed, "/a", "/a", {}, {}, {}, {}, {}, Vec3::Zero()};
  same_body.root_prims[0].children.push_back(make_joint_prim("j", fixed));
  CHECK_THROWS_AS(check_stage(same_body), ValidationError);

  UsdStage bad_mesh = s;
  bad_mesh.root_prims[1].set("points", {AttrType::kPoint3fArray, false, std::vector<Vec3>{Vec3::Zero()}});
  bad_mesh.root_prims[1].set("faceVertexCounts", {AttrType::kIntArray, false, std::vector<int>{3}});
  bad_mesh.root_prims[1].set("faceVertexIndices", {AttrType::kIntArray, false, std::vector<int>{0, 0, 1}});
  CHECK_THROWS_WITH_AS(check_stage(bad_mesh), doctest::Contains("out of range"), ValidationError);

  UsdStage bad_default = s;
  bad_default.default_prim = "z";
  CHECK_THROWS_AS(check_stage(bad_default), ValidationError);
}
