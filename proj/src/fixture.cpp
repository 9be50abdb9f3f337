#include "artic/fixture.hpp"

#include <random>
#include <string>

#include "artic/shapes.hpp"

namespace artic {

namespace {

// Colors are multiples of 1/255 so they survive a PLY round-trip exactly.
Color rgb(int r, int g, int b) { return Color(r, g, b) / 255.0; }

class SceneBuilder {
 public:
  explicit SceneBuilder(std::string scene_id) { scene_.annotation.scene_id = std::move(scene_id); }

  std::vector<int> add(const Vec3& min, const Vec3& max, const Color& color, int subdivisions = 1) {
    TriMesh piece = shapes::box(min, max, subdivisions);
    piece.vertex_colors.assign(piece.vertices.size(), color);
    return shapes::append(scene_.mesh, piece);
  }

  ObjectInstance& object(std::string id, std::string label, std::optional<double> mass = {}) {
    scene_.annotation.objects.push_back({std::move(id), std::move(label), {}, mass});
    return scene_.annotation.objects.back();
  }

  /// Single-part object made of one box.
  void simple_object(std::string id, std::string label, const Vec3& min, const Vec3& max,
                     const Color& color, int subdivisions = 1) {
    auto faces = add(min, max, color, subdivisions);
    ObjectInstance& o = object(id, std::move(label));
    o.parts.push_back({id + "_body", o.label, std::move(faces), {}, PartRole::kNone, {}, {}});
  }

  SyntheticScene& scene() { return scene_; }

 private:
  SyntheticScene scene_;
};

struct CabinetSpec {
  std::string id;
  Vec3 min, max;  // carcass box; the front face is at y = max.y
  bool door = true;
  bool drawer = false;
  double mass = 30.0;
};

void add_cabinet(SceneBuilder& b, const CabinetSpec& spec) {
  const Color body_color = rgb(150, 110, 70);
  const Color front_color = rgb(180, 140, 90);
  const Color handle_color = rgb(40, 40, 40);
  const double front = spec.max.y();
  const double thickness = 0.02;

  auto body_faces = b.add(spec.min, spec.max, body_color);
  ObjectInstance& cab = b.object(spec.id, "cabinet", spec.mass);
  const std::string body_id = spec.id + "_body";
  cab.parts.push_back({body_id, "cabinet body", std::move(body_faces), {}, PartRole::kNone, {}, {}});

  const double mid_z = spec.drawer && spec.door ? 0.5 * (spec.min.z() + spec.max.z()) : spec.max.z();
  if (spec.door) {
    const double z0 = spec.drawer ? mid_z : spec.min.z();
    const double z1 = spec.max.z();
    const Vec3 dmin(spec.min.x(), front, z0);
    const Vec3 dmax(spec.max.x(), front + thickness, z1);
    auto door_faces = b.add(dmin, dmax, front_color);
    const std::string door_id = spec.id + "_door";
    Articulation hinge{MotionType::kRotation, kUp, Vec3(spec.min.x(), front, z0), 0.0, 90.0};
    cab.parts.push_back({door_id, "door", std::move(door_faces), body_id, PartRole::kMovable, hinge, {}});

    const double hx = spec.max.x() - 0.08;
    const double hz = 0.5 * (z0 + z1);
    auto handle_faces = b.add(Vec3(hx - 0.015, front + thickness, hz - 0.1),
                              Vec3(hx + 0.015, front + thickness + 0.03, hz + 0.1), handle_color);
    cab.parts.push_back({spec.id + "_door_handle", "handle", std::move(handle_faces), door_id,
                         PartRole::kInteractable, {}, door_id});
  }
  if (spec.drawer) {
    const double z0 = spec.min.z();
    const double z1 = spec.door ? mid_z : spec.max.z();
    // The drawer box sits inside the carcass with its front panel flush with the front.
    auto drawer_faces = b.add(Vec3(spec.min.x() + 0.02, spec.min.y() + 0.05, z0 + 0.02),
                              Vec3(spec.max.x() - 0.02, front + thickness, z1 - 0.02), front_color);
    const std::string drawer_id = spec.id + "_drawer";
    Articulation slide{MotionType::kTranslation, Vec3(0, 1, 0), std::nullopt, 0.0, 0.4};
    cab.parts.push_back({drawer_id, "drawer", std::move(drawer_faces), body_id, PartRole::kMovable, slide, {}});

    const double cx = 0.5 * (spec.min.x() + spec.max.x());
    const double hz = 0.5 * (z0 + z1);
    auto handle_faces = b.add(Vec3(cx - 0.1, front + thickness, hz - 0.015),
                              Vec3(cx + 0.1, front + thickness + 0.03, hz + 0.015), handle_color);
    cab.parts.push_back({spec.id + "_drawer_handle", "handle", std::move(handle_faces), drawer_id,
                         PartRole::kInteractable, {}, drawer_id});
  }
}

}  // namespace

SyntheticScene synthetic_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

  SceneBuilder b("synthetic_" + std::to_string(seed));
  const double hx = 0.5 * uniform(4.0, 6.0);
  const double hy = 0.5 * uniform(4.0, 6.0);
  const double height = 2.6;
  const double wall = 0.1;
  const Color structure = rgb(200, 200, 200);

  b.simple_object("floor", "floor", Vec3(-hx, -hy, -wall), Vec3(hx, hy, 0), rgb(120, 120, 120), 4);
  b.simple_object("ceiling", "ceiling", Vec3(-hx, -hy, height), Vec3(hx, hy, height + wall), structure, 4);
  b.simple_object("wall_0", "wall", Vec3(-hx, -hy - wall, 0), Vec3(hx, -hy, height), structure, 2);
  b.simple_object("wall_1", "wall", Vec3(-hx, hy, 0), Vec3(hx, hy + wall, height), structure, 2);
  b.simple_object("wall_2", "wall", Vec3(-hx - wall, -hy, 0), Vec3(-hx, hy, height), structure, 2);
  b.simple_object("wall_3", "wall", Vec3(hx, -hy, 0), Vec3(hx + wall, hy, height), structure, 2);

  // Cabinets along the back wall (y = -hy), fronts facing +y.
  const int cabinets = std::uniform_int_distribution<int>(1, 3)(rng);
  double x = -hx + 0.2;
  for (int i = 0; i < cabinets; ++i) {
    const double width = uniform(0.5, 0.9);
    const double depth = uniform(0.45, 0.6);
    const double tall = uniform(0.7, 1.2);
    const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
    CabinetSpec spec{"cabinet_" + std::to_string(i), Vec3(x, -hy, 0), Vec3(x + width, -hy + depth, tall),
                     kind != 1, kind != 0, 20.0 + 40.0 * width * depth * tall};
    add_cabinet(b, spec);
    x += width + uniform(0.1, 0.3);
  }

  // Ceiling light hanging from the ceiling centre.
  const double lx = uniform(-0.5, 0.5);
  const double ly = uniform(-0.5, 0.5);
  b.simple_object("ceiling_light", "ceiling light", Vec3(lx - 0.2, ly - 0.2, height - 0.1),
                  Vec3(lx + 0.2, ly + 0.2, height), rgb(250, 240, 200));
  b.scene().annotation.fixtures.push_back({"ceiling_light", "ceiling", Vec3(lx, ly, height)});

  // Bed against the front wall; its top is subdivided so it offers a dense placement plane.
  const double bx = uniform(-hx + 1.2, hx - 1.2);
  b.simple_object("bed", "bed", Vec3(bx - 0.9, hy - 2.1, 0), Vec3(bx + 0.9, hy - 0.1, 0.5),
                  rgb(90, 110, 160), 8);
  b.scene().annotation.objects.back().mass = 60.0;
  return std::move(b.scene());
}

SyntheticScene door_cabinet() {
  SceneBuilder b("door_cabinet");
  add_cabinet(b, CabinetSpec{"cabinet", Vec3(0, 0, 0), Vec3(0.6, 0.5, 1.0), true, true, 35.0});
  return std::move(b.scene());
}

}  // namespace artic
