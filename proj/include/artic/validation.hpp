#pragma once

#include <map>
#include <string>
#include <vector>

#include "artic/annotation.hpp"

namespace artic {

enum class ViolationKind {
  kDoubleParent,     // a part id declared more than once
  kCycle,            // parent chain returns to itself (includes self-parenting)
  kGap,              // parent id missing from the object
  kMultipleRoots,
  kNoRoot,
  kBadInteractable,  // interactable_for names a missing or non-movable part
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string object_id;
  std::vector<std::string> part_ids;  // sorted
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Hierarchy depth per object id; the root counts as depth 1.
  std::map<std::string, int> depth;

  bool clean() const { return violations.empty(); }
  /// Violations other than kBadInteractable.
  bool has_hard_violations() const;
};

/// Reports hierarchy faults per object; never throws.
ValidationReport validate_connectivity(const SceneAnnotation& scene);

}  // namespace artic
