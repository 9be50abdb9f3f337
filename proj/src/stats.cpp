#include "artic/stats.hpp"

#include <bit>
#include <set>

#include "artic/error.hpp"
#include "artic/validation.hpp"

namespace artic {

int log2_bin(std::size_t count) {
  if (count == 0) throw Error("log2_bin: count must be positive");
  return static_cast<int>(std::bit_width(count)) - 1;
}

StatsReport scene_stats(const SceneAnnotation& scene, const TriMesh* mesh) {
  StatsReport r;
  r.objects = scene.objects.size();
  r.fixtures = scene.fixtures.size();
  std::set<int> annotated;
  for (const ObjectInstance& o : scene.objects) {
    ++r.object_labels[o.label];
    if (o.parts.size() >= 2) ++r.connectivity_graphs;
    for (const PartSegment& p : o.parts) {
      ++r.parts;
      ++r.part_labels[p.label];
      if (p.role == PartRole::kMovable) ++r.movable;
      if (p.role == PartRole::kInteractable) ++r.interactable;
      if (p.role == PartRole::kFixed) ++r.fixed;
      if (p.articulation) {
        ++r.articulations;
        if (p.articulation->type == MotionType::kTranslation) ++r.translations;
      }
      if (!p.face_indices.empty()) ++r.face_count_bins[log2_bin(p.face_indices.size())];
      annotated.insert(p.face_indices.begin(), p.face_indices.end());
    }
  }
  if (r.objects > 0) {
    const ValidationReport v = validate_connectivity(scene);
    double total = 0.0;
    for (const auto& [id, d] : v.depth) total += d;
    r.average_depth = total / static_cast<double>(r.objects);
  }
  if (r.parts > 0) {
    r.movable_fraction = static_cast<double>(r.movable) / static_cast<double>(r.parts);
    r.interactable_fraction = static_cast<double>(r.interactable) / static_cast<double>(r.parts);
  }
  if (r.articulations > 0)
    r.translation_fraction = static_cast<double>(r.translations) / static_cast<double>(r.articulations);
  if (mesh) {
    r.mesh_faces = mesh->faces.size();
    std::size_t inside = 0;
    for (int f : annotated)
      if (f >= 0 && static_cast<std::size_t>(f) < r.mesh_faces) ++inside;
    r.unannotated_faces = r.mesh_faces - inside;
  }
  return r;
}

}  // namespace artic
