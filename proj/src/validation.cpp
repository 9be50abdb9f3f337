#include "artic/validation.hpp"

#include <algorithm>
#include <set>

namespace artic {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kDoubleParent: return "double_parent";
    case ViolationKind::kCycle: return "cycle";
    case ViolationKind::kGap: return "gap";
    case ViolationKind::kMultipleRoots: return "multiple_roots";
    case ViolationKind::kNoRoot: return "no_root";
    case ViolationKind::kBadInteractable: return "bad_interactable";
  }
  return "unknown";
}

bool ValidationReport::has_hard_violations() const {
  return std::any_of(violations.begin(), violations.end(),
                     [](const Violation& v) { return v.kind != ViolationKind::kBadInteractable; });
}

namespace {

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
  return out;
}

void validate_object(const ObjectInstance& object, ValidationReport& report) {
  auto add = [&](ViolationKind kind, std::vector<std::string> ids, std::string message) {
    std::sort(ids.begin(), ids.end());
    report.violations.push_back({kind, object.id, std::move(ids), std::move(message)});
  };

  // First declaration wins for traversal; repeats are reported.
  std::map<std::string, const PartSegment*> first;
  std::map<std::string, int> declarations;
  std::vector<std::string> order;
  for (const PartSegment& p : object.parts) {
    if (first.emplace(p.id, &p).second) order.push_back(p.id);
    ++declarations[p.id];
  }
  for (const auto& [id, count] : declarations)
    if (count > 1)
      add(ViolationKind::kDoubleParent, {id},
          "part '" + id + "' is declared " + std::to_string(count) + " times with parent links");

  std::vector<std::string> roots;
  std::map<std::string, std::string> parent;
  for (const auto& id : order) {
    const PartSegment& p = *first.at(id);
    if (!p.parent_part) {
      roots.push_back(id);
    } else if (!first.count(*p.parent_part)) {
      add(ViolationKind::kGap, {id},
          "part '" + id + "' has parent '" + *p.parent_part + "' which is not in the object");
    } else {
      parent[id] = *p.parent_part;
    }
  }
  if (roots.empty() && !order.empty())
    add(ViolationKind::kNoRoot, {}, "object has no root part");
  if (roots.size() > 1) add(ViolationKind::kMultipleRoots, roots, "multiple roots: " + join(roots));

  // Cycles in the functional graph part -> parent.
  enum class Mark { kNew, kActive, kDone };
  std::map<std::string, Mark> mark;
  for (const auto& id : order) mark[id] = Mark::kNew;
  for (const auto& start : order) {
    if (mark[start] != Mark::kNew) continue;
    std::vector<std::string> path;
    std::string cur = start;
    while (true) {
      mark[cur] = Mark::kActive;
      path.push_back(cur);
      const auto it = parent.find(cur);
      if (it == parent.end()) break;
      const std::string& next = it->second;
      if (mark[next] == Mark::kDone) break;
      if (mark[next] == Mark::kActive) {
        const auto pos = std::find(path.begin(), path.end(), next);
        std::vector<std::string> cycle(pos, path.end());
        std::vector<std::string> sorted = cycle;
        std::sort(sorted.begin(), sorted.end());
        add(ViolationKind::kCycle, cycle, "cycle in parent links: " + join(sorted));
        break;
      }
      cur = next;
    }
    for (const auto& id : path) mark[id] = Mark::kDone;
  }

  // Depth over the parts reachable from roots.
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& [child, par] : parent) children[par].push_back(child);
  int depth = 0;
  std::vector<std::pair<std::string, int>> stack;
  for (const auto& r : roots) stack.emplace_back(r, 1);
  std::set<std::string> seen;
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) continue;
    depth = std::max(depth, d);
    for (const auto& c : children[id]) stack.emplace_back(c, d + 1);
  }
  report.depth[object.id] = depth;

  for (const auto& id : order) {
    const PartSegment& p = *first.at(id);
    if (!p.interactable_for) continue;
    const auto target = first.find(*p.interactable_for);
    if (target == first.end())
      add(ViolationKind::kBadInteractable, {id},
          "part '" + id + "' actuates missing part '" + *p.interactable_for + "'");
    else if (target->second->role != PartRole::kMovable)
      add(ViolationKind::kBadInteractable, {id},
          "part '" + id + "' actuates non-movable part '" + *p.interactable_for + "'");
  }
}

}  // namespace

ValidationReport validate_connectivity(const SceneAnnotation& scene) {
  ValidationReport report;
  for (const ObjectInstance& object : scene.objects) validate_object(object, report);
  return report;
}

}  // namespace artic
