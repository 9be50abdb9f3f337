#pragma once

// Random valid stages for round-trip properties: nested Xform/Mesh prims with every
// attribute type, adversarial strings and reals, and joints of all three kinds.

#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "artic/usd.hpp"

namespace artic::testing {

class StageGenerator {
 public:
  explicit StageGenerator(std::uint64_t seed) : rng_(seed) {}

  UsdStage operator()() {
    UsdStage stage;
    paths_.clear();
    const int roots = pick(0, 3);
    for (int i = 0; i < roots; ++i) {
      Prim p = prim(stage.root_prims, "", 0);
      stage.root_prims.push_back(std::move(p));
    }
    if (!stage.root_prims.empty() && coin(0.8))
      stage.default_prim = stage.root_prims[pick(0, static_cast<int>(stage.root_prims.size()) - 1)].name;
    if (paths_.size() >= 2) add_joints(stage);
    return stage;
  }

  /// Any finite double, including subnormals, signed zeros and extreme exponents.
  double real() {
    switch (pick(0, 4)) {
      case 0: return std::uniform_real_distribution<double>(-10, 10)(rng_);
      case 1: return static_cast<double>(pick(-1000, 1000)) / 8.0;
      case 2: return coin(0.5) ? 0.0 : -0.0;
      default: {
        double d;
        do d = std::bit_cast<double>(rng_());
        while (!std::isfinite(d));
        return d;
      }
    }
  }

  Vec3 tuple() { return {real(), real(), real()}; }

  Vec3 unit() {
    std::normal_distribution<double> n;
    Vec3 v;
    do v = Vec3(n(rng_), n(rng_), n(rng_));
    while (v.norm() < 1e-3);
    v.normalize();
    return v;
  }

  std::string text() {
    static const std::vector<std::string> pieces = {"a", "Z", "0", " ", "\"", "\\", "\n", "\t", "\r",
                                                    "<", ">", "[", "]", "(", ")", ", ", "=", "\x01",
                                                    "\x7f", "\xc3\xa9", "\xe2\x82\xac", "def ", "}"};
    std::string s;
    const int n = pick(0, 8);
    for (int i = 0; i < n; ++i) s += pieces[pick(0, static_cast<int>(pieces.size()) - 1)];
    return s;
  }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string identifier(const std::vector<Prim>& siblings) {
    static const std::string first = "abcXYZ_";
    static const std::string rest = "abcXYZ_019";
    while (true) {
      std::string name(1, first[pick(0, static_cast<int>(first.size()) - 1)]);
      const int n = pick(0, 6);
      for (int i = 0; i < n; ++i) name += rest[pick(0, static_cast<int>(rest.size()) - 1)];
      bool taken = false;
      for (const Prim& s : siblings) taken = taken || s.name == name;
      if (!taken) return name;
    }
  }

  PrimAttribute attribute() {
    PrimAttribute a;
    a.custom = coin(0.5);
    switch (pick(0, 5)) {
      case 0: {
        a.type = AttrType::kPoint3fArray;
        std::vector<Vec3> pts(pick(0, 4));
        for (Vec3& p : pts) p = tuple();
        a.value = pts;
        break;
      }
      case 1: {
        a.type = AttrType::kIntArray;
        std::vector<int> ints(pick(0, 5));
        for (int& i : ints) i = static_cast<int>(static_cast<std::uint32_t>(rng_()));
        a.value = ints;
        break;
      }
      case 2: a.type = coin(0.5) ? AttrType::kVector3f : AttrType::kPoint3f; a.value = tuple(); break;
      case 3: a.type = AttrType::kFloat; a.value = real(); break;
      default: a.type = AttrType::kString; a.value = text(); break;
    }
    return a;
  }

  void mesh_geometry(Prim& p) {
    const int n = pick(3, 6);
    std::vector<Vec3> pts(n);
    for (Vec3& v : pts) v = tuple();
    std::vector<int> counts, indices;
    const int faces = pick(0, 3);
    for (int f = 0; f < faces; ++f) {
      const int k = pick(3, 4);
      counts.push_back(k);
      for (int i = 0; i < k; ++i) indices.push_back(pick(0, n - 1));
    }
    p.set("points", {AttrType::kPoint3fArray, false, pts});
    p.set("faceVertexCounts", {AttrType::kIntArray, false, counts});
    p.set("faceVertexIndices", {AttrType::kIntArray, false, indices});
  }

  Prim prim(const std::vector<Prim>& siblings, const std::string& parent, int depth) {
    Prim p;
    p.name = identifier(siblings);
    p.schema = coin(0.5) ? PrimSchema::kXform : PrimSchema::kMesh;
    const std::string path = parent + "/" + p.name;
    paths_.push_back(path);
    if (p.schema == PrimSchema::kMesh && coin(0.7)) mesh_geometry(p);
    const int attrs = pick(0, 3);
    for (int i = 0; i < attrs; ++i) p.set("artic:x" + std::to_string(i), attribute());
    const int children = depth < 3 ? pick(0, 3) : 0;
    for (int i = 0; i < children; ++i) {
      Prim c = prim(p.children, path, depth + 1);
      p.children.push_back(std::move(c));
    }
    return p;
  }

  Prim* resolve(UsdStage& stage, const std::string& path) {
    return const_cast<Prim*>(find_prim(stage, path));
  }

  void add_joints(UsdStage& stage) {
    // Joints never gain children, so collected paths stay valid while joints are added.
    const std::vector<std::string> bodies = paths_;
    const int n = pick(0, 4);
    for (int i = 0; i < n; ++i) {
      const int b0 = pick(0, static_cast<int>(bodies.size()) - 1);
      int b1 = pick(0, static_cast<int>(bodies.size()) - 2);
      if (b1 >= b0) ++b1;
      JointSpec spec;
      spec.kind = static_cast<JointKind>(pick(0, 2));
      spec.body0 = bodies[b0];
      spec.body1 = bodies[b1];
      if (spec.kind == JointKind::kFixed) {
        spec.attachment_point = tuple();
      } else {
        spec.axis = unit();
        if (spec.kind == JointKind::kRevolute) spec.origin = tuple();
        double lo = real(), hi = real();
        if (lo > hi) std::swap(lo, hi);
        spec.lower = lo;
        spec.upper = hi;
        if (coin(0.5)) spec.interactable = bodies[pick(0, static_cast<int>(bodies.size()) - 1)];
      }
      Prim* host = resolve(stage, bodies[pick(0, static_cast<int>(bodies.size()) - 1)]);
      Prim joint = make_joint_prim(identifier(host->children), spec);
      host->children.push_back(std::move(joint));
    }
  }

  std::mt19937_64 rng_;
  std::vector<std::string> paths_;
};

}  // namespace artic::testing
