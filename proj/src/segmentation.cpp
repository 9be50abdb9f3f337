#include "artic/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "artic/error.hpp"
#include "artic/text_format.hpp"

namespace artic {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n, 0.0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Joins the sets of roots a and b; `weight` becomes the new internal difference.
  int join(int a, int b, double weight) {
    if (size_[a] < size_[b] || (size_[a] == size_[b] && b < a)) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = weight;
    return a;
  }

  std::size_t size(int root) const { return size_[root]; }
  double internal(int root) const { return internal_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<std::size_t> size_;
  std::vector<double> internal_;
};

}  // namespace

std::size_t SegmentMap::segment_count() const {
  if (labels.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end())) + 1;
}

MeshGraph build_mesh_graph(const TriMesh& mesh, double alpha_normal, double alpha_color) {
  if (alpha_normal < 0.0 || alpha_color < 0.0 || (alpha_normal == 0.0 && alpha_color == 0.0))
    throw Error("build_mesh_graph: weights must be non-negative and not both zero");
  validate_mesh(mesh);
  const auto normals = face_normals(mesh);
  std::vector<Color> face_color;
  if (mesh.has_colors()) {
    face_color.reserve(mesh.faces.size());
    for (const Face& f : mesh.faces)
      face_color.push_back(
          (mesh.vertex_colors[f[0]] + mesh.vertex_colors[f[1]] + mesh.vertex_colors[f[2]]) / 3.0);
  }

  std::map<std::pair<int, int>, std::vector<int>> by_edge;
  for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f)
    for (int e = 0; e < 3; ++e)
      by_edge[std::minmax(mesh.faces[f][e], mesh.faces[f][(e + 1) % 3])].push_back(f);

  std::map<std::pair<int, int>, double> pairs;
  for (const auto& [edge, faces] : by_edge)
    for (std::size_t i = 0; i < faces.size(); ++i)
      for (std::size_t j = i + 1; j < faces.size(); ++j) {
        const auto key = std::minmax(faces[i], faces[j]);
        if (pairs.count(key)) continue;
        double w = alpha_normal * (1.0 - normals[key.first].dot(normals[key.second])) / 2.0;
        if (mesh.has_colors())
          w += alpha_color * (face_color[key.first] - face_color[key.second]).norm() / std::sqrt(3.0);
        pairs.emplace(key, std::max(0.0, w));
      }

  MeshGraph graph;
  graph.node_count = mesh.faces.size();
  graph.edges.reserve(pairs.size());
  for (const auto& [key, w] : pairs) graph.edges.push_back({key.first, key.second, w});
  return graph;
}

SegmentMap felzenszwalb(const MeshGraph& graph, double k, std::size_t min_size) {
  if (!(k > 0.0)) throw Error("felzenszwalb: k must be positive");
  if (min_size < 1) throw Error("felzenszwalb: min_size must be >= 1");
  std::vector<GraphEdge> edges = graph.edges;
  for (GraphEdge& e : edges) {
    if (e.a == e.b) throw Error("felzenszwalb: self edge on node " + std::to_string(e.a));
    if (e.a < 0 || e.b < 0 || static_cast<std::size_t>(std::max(e.a, e.b)) >= graph.node_count)
      throw Error("felzenszwalb: edge references a missing node");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw Error("felzenszwalb: edge weights must be finite and non-negative");
    if (e.a > e.b) std::swap(e.a, e.b);
  }
  std::sort(edges.begin(), edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
  });

  DisjointSets sets(graph.node_count);
  for (const GraphEdge& e : edges) {
    const int ra = sets.find(e.a);
    const int rb = sets.find(e.b);
    if (ra == rb) continue;
    const double ta = sets.internal(ra) + k / static_cast<double>(sets.size(ra));
    const double tb = sets.internal(rb) + k / static_cast<double>(sets.size(rb));
    if (e.weight <= std::min(ta, tb)) sets.join(ra, rb, e.weight);
  }
  // Small components go to the neighbour across their lightest edge.
  for (const GraphEdge& e : edges) {
    const int ra = sets.find(e.a);
    const int rb = sets.find(e.b);
    if (ra != rb && (sets.size(ra) < min_size || sets.size(rb) < min_size))
      sets.join(ra, rb, std::max({e.weight, sets.internal(ra), sets.internal(rb)}));
  }

  SegmentMap out;
  out.labels.resize(graph.node_count);
  std::unordered_map<int, int> ids;
  for (std::size_t i = 0; i < graph.node_count; ++i) {
    const int root = sets.find(static_cast<int>(i));
    auto [it, inserted] = ids.emplace(root, static_cast<int>(ids.size()));
    out.labels[i] = it->second;
  }
  return out;
}

SegmentMatching match_segmentations(const SegmentMap& a, const SegmentMap& b) {
  if (a.labels.size() != b.labels.size())
    throw Error("match_segmentations: face count mismatch (" + std::to_string(a.labels.size()) +
                " vs " + std::to_string(b.labels.size()) + ")");
  const std::size_t na = a.segment_count(), nb = b.segment_count();
  std::vector<std::size_t> size_a(na, 0), size_b(nb, 0);
  std::map<std::pair<int, int>, std::size_t> overlap;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    ++size_a[a.labels[i]];
    ++size_b[b.labels[i]];
    ++overlap[{a.labels[i], b.labels[i]}];
  }
  std::vector<SegmentPair> candidates;
  for (const auto& [key, inter] : overlap) {
    const double uni = static_cast<double>(size_a[key.first] + size_b[key.second] - inter);
    candidates.push_back({key.first, key.second, static_cast<double>(inter) / uni});
  }
  std::sort(candidates.begin(), candidates.end(), [](const SegmentPair& x, const SegmentPair& y) {
    if (x.iou != y.iou) return x.iou > y.iou;
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  SegmentMatching result;
  std::vector<bool> used_a(na, false), used_b(nb, false);
  double sum = 0.0;
  for (const SegmentPair& c : candidates) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    result.pairs.push_back(c);
    sum += c.iou;
  }
  result.mean_iou = result.pairs.empty() ? 0.0 : sum / static_cast<double>(result.pairs.size());
  return result;
}

std::string save_segment_map(const SegmentMap& map) {
  std::string out;
  for (int label : map.labels) out += std::to_string(label) + "\n";
  return out;
}

SegmentMap load_segment_map(std::string_view text) {
  SegmentMap map;
  std::size_t pos = 0;
  int line = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view row = text.substr(pos, end - pos);
    pos = end + 1;
    ++line;
    while (!row.empty() && (row.back() == '\r' || row.back() == ' ')) row.remove_suffix(1);
    long long v = 0;
    if (!parse_int(row, v) || v < 0) throw ParseError("expected a non-negative segment id", line);
    map.labels.push_back(static_cast<int>(v));
  }
  std::vector<bool> seen(map.segment_count(), false);
  for (int l : map.labels) seen[l] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ParseError("segment ids are not contiguous from 0", line);
  return map;
}

}  // namespace artic
