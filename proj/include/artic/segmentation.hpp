#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artic/geometry.hpp"

namespace artic {

struct GraphEdge {
  int a = 0;  // lower face index
  int b = 0;  // higher face index
  double weight = 0.0;

  bool operator==(const GraphEdge&) const = default;
};

/// Face adjacency graph; node i is face i.
struct MeshGraph {
  std::size_t node_count = 0;
  std::vector<GraphEdge> edges;
};

/// Per-face segment ids, contiguous from 0 in order of first appearance.
struct SegmentMap {
  std::vector<int> labels;

  std::size_t segment_count() const;
  bool operator==(const SegmentMap&) const = default;
};

/// One edge per pair of faces sharing a mesh edge, weighted by
/// alpha_normal * (1 - n_a.n_b) / 2 + alpha_color * |c_a - c_b| / sqrt(3).
/// The color term is dropped for uncolored meshes.
MeshGraph build_mesh_graph(const TriMesh& mesh, double alpha_normal = 1.0, double alpha_color = 0.5);

/// Felzenszwalb-Huttenlocher graph segmentation with a min_size merge pass.
SegmentMap felzenszwalb(const MeshGraph& graph, double k, std::size_t min_size);

struct SegmentationPreset {
  double k;
  std::size_t min_size;
};

inline constexpr SegmentationPreset kCoarsePreset{50.0, 20};
inline constexpr SegmentationPreset kFinePreset{2.0, 1};

struct SegmentPair {
  int a = 0;
  int b = 0;
  double iou = 0.0;
};

struct SegmentMatching {
  std::vector<SegmentPair> pairs;  // in greedy selection order
  double mean_iou = 0.0;           // over matched pairs
};

/// Greedy descending-IoU one-to-one matching of segments of `a` to segments of `b`.
SegmentMatching match_segmentations(const SegmentMap& a, const SegmentMap& b);

/// Text form: one integer segment id per line, line i = face i.
std::string save_segment_map(const SegmentMap& map);
SegmentMap load_segment_map(std::string_view text);

}  // namespace artic
