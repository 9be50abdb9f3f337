#pragma once

#include <map>
#include <string>

#include "artic/annotation.hpp"

namespace artic {

struct StatsReport {
  std::size_t objects = 0;
  std::size_t parts = 0;  // segmentations at part level
  std::size_t connectivity_graphs = 0;  // objects with at least two parts
  std::size_t movable = 0;
  std::size_t interactable = 0;
  std::size_t fixed = 0;
  std::size_t articulations = 0;
  std::size_t translations = 0;
  std::size_t fixtures = 0;
  double average_depth = 0.0;  // root counts as depth 1
  double movable_fraction = 0.0;
  double interactable_fraction = 0.0;
  double translation_fraction = 0.0;  // among articulations
  std::map<std::string, std::size_t> object_labels;
  std::map<std::string, std::size_t> part_labels;
  /// Bin i counts parts with face count in [2^i, 2^(i+1)).
  std::map<int, std::size_t> face_count_bins;
  std::size_t mesh_faces = 0;
  std::size_t unannotated_faces = 0;
};

/// Base-2 logarithmic bin of a positive count.
int log2_bin(std::size_t count);

StatsReport scene_stats(const SceneAnnotation& scene, const TriMesh* mesh = nullptr);

}  // namespace artic
