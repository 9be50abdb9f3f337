#include "artic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "artic/error.hpp"
#include "artic/text_format.hpp"
#include "json_util.hpp"

namespace artic {

namespace {

using detail::json;

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

bool uses_origin(ArticulationGate gate) {
  return gate == ArticulationGate::kOrigin || gate == ArticulationGate::kOriginAxis;
}
bool uses_axis(ArticulationGate gate) {
  return gate == ArticulationGate::kAxis || gate == ArticulationGate::kOriginAxis;
}

std::vector<int> descending_confidence(std::span<const InstancePrediction> preds) {
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return preds[a].confidence > preds[b].confidence; });
  return order;
}

std::vector<MotionType> classes_with_gt(std::span<const EvalScene> scenes) {
  std::set<MotionType> present;
  for (const EvalScene& s : scenes)
    for (const GtInstance& g : s.ground_truth) present.insert(g.motion_type);
  return {present.begin(), present.end()};
}

std::string bucket_key(const std::vector<double>& bounds, std::size_t k) {
  if (bounds.empty()) return "all";
  if (k == 0) return "<= " + format_real(bounds[0]);
  if (k == bounds.size()) return "> " + format_real(bounds.back());
  return "(" + format_real(bounds[k - 1]) + ", " + format_real(bounds[k]) + "]";
}

void finish_rows(std::vector<BreakdownRow>& rows) {
  for (BreakdownRow& r : rows) {
    if (r.count == 0) continue;
    r.segmentation /= r.count;
    r.origin /= r.count;
    r.axis /= r.count;
  }
}

void add_result(BreakdownRow& row, const RecognitionResult& r) {
  ++row.count;
  row.segmentation += r.segmentation;
  row.origin += r.origin;
  row.axis += r.axis;
}

std::vector<int> parse_mask(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) detail::schema_error(path, "expected a non-empty list of point indices");
  std::vector<int> mask;
  mask.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const long long v = detail::as_integer(j[i], path + "[" + std::to_string(i) + "]");
    if (v < 0 || v > std::numeric_limits<int>::max())
      detail::schema_error(path + "[" + std::to_string(i) + "]", "point index out of range");
    if (!mask.empty() && v <= mask.back()) detail::schema_error(path, "indices must be sorted and unique");
    mask.push_back(static_cast<int>(v));
  }
  return mask;
}

Vec3 parse_axis(const json& j, const std::string& path) {
  const Vec3 axis = detail::as_vec3(j, path);
  if (std::abs(axis.norm() - 1.0) > 1e-6) detail::schema_error(path, "axis must be unit length");
  return axis;
}

// Calls fn(scene_path, scene_id, instances_json) for one scene object or a list of them.
template <typename Fn>
void for_each_scene(const json& doc, Fn fn) {
  auto one = [&](const json& s, const std::string& path) {
    detail::check_keys(s, path, {"scene_id", "instances"});
    const std::string id = detail::as_string(detail::require(s, path, "scene_id"), path + ".scene_id");
    const json& inst = detail::require(s, path, "instances");
    if (!inst.is_array()) detail::schema_error(path + ".instances", "expected a list");
    fn(path, id, inst);
  };
  if (doc.is_array()) {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const std::string path = "$[" + std::to_string(i) + "]";
      one(doc[i], path);
      const std::string id = doc[i]["scene_id"].get<std::string>();
      if (!seen.insert(id).second) detail::schema_error(path + ".scene_id", "duplicate scene '" + id + "'");
    }
  } else {
    one(doc, "$");
  }
}

json instance_json(const std::vector<int>& mask, MotionType type, const Vec3& axis,
                   const std::optional<Vec3>& origin) {
  json j;
  j["mask"] = mask;
  j["motion_type"] = std::string(to_string(type));
  j["axis"] = detail::vec3_json(axis);
  if (origin) j["origin"] = detail::vec3_json(*origin);
  return j;
}

json per_class_json(const std::map<std::string, double>& values) {
  json j = json::object();
  for (const auto& [k, v] : values) j[k] = v;
  return j;
}

json rows_json(const std::vector<BreakdownRow>& rows) {
  json out = json::array();
  for (const BreakdownRow& r : rows)
    out.push_back({{"key", r.key}, {"count", r.count}, {"segmentation", r.segmentation},
                   {"origin", r.origin}, {"axis", r.axis}});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> EvalConfig::default_iou_thresholds() {
  std::vector<double> t;
  for (int k = 0; k < 10; ++k) t.push_back((50 + 5 * k) / 100.0);
  return t;
}

double EvalConfig::default_axis_threshold() { return 1.0 - std::cos(15.0 * std::numbers::pi / 180.0); }

void check_config(const EvalConfig& c) {
  if (c.iou_thresholds.empty()) throw ValidationError("iou_thresholds is empty");
  for (double t : std::vector<double>{c.iou_thresholds.begin(), c.iou_thresholds.end()})
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("IoU threshold outside (0, 1]: " + std::to_string(t));
  for (double t : {c.ap50_threshold, c.ap25_threshold})
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError("IoU threshold outside (0, 1]: " + std::to_string(t));
  if (!(c.origin_threshold > 0.0)) throw ValidationError("origin threshold must be positive");
  if (!(c.axis_threshold >= 0.0)) throw ValidationError("axis threshold must be non-negative");
  if (c.size_buckets < 1) throw ValidationError("size_buckets must be at least 1");
}

double mask_iou(std::span<const int> a, std::span<const int> b) {
  if (a.empty() && b.empty()) throw Error("mask_iou: both masks are empty");
  std::size_t inter = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

Matching match_instances(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                         double iou_threshold) {
  Matching m;
  m.pred_to_gt.assign(preds.size(), -1);
  m.gt_to_pred.assign(gts.size(), -1);
  m.iou.assign(preds.size(), 0.0);
  for (int p : descending_confidence(preds)) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (m.gt_to_pred[g] != -1 || gts[g].motion_type != preds[p].motion_type) continue;
      const double iou = mask_iou(preds[p].mask, gts[g].mask);
      if (iou >= iou_threshold && iou > best_iou) {
        best = static_cast<int>(g);
        best_iou = iou;
      }
    }
    if (best >= 0) {
      m.pred_to_gt[p] = best;
      m.gt_to_pred[best] = p;
      m.iou[p] = best_iou;
      ++m.true_positives;
    } else {
      ++m.false_positives;
    }
  }
  m.false_negatives = static_cast<int>(gts.size()) - m.true_positives;
  return m;
}

std::string_view to_string(ArticulationGate gate) {
  switch (gate) {
    case ArticulationGate::kNone: return "none";
    case ArticulationGate::kOrigin: return "origin";
    case ArticulationGate::kAxis: return "axis";
    case ArticulationGate::kOriginAxis: return "origin_axis";
  }
  return "?";
}

bool axis_gate(const Vec3& pred_axis, const Vec3& gt_axis, const EvalConfig& config) {
  const double denom = pred_axis.norm() * gt_axis.norm();
  if (denom == 0.0) return false;
  double cos = pred_axis.dot(gt_axis) / denom;
  if (config.axis_sign_invariant) cos = std::abs(cos);
  return 1.0 - cos <= config.axis_threshold;
}

bool origin_gate(const InstancePrediction& pred, const GtInstance& gt, const EvalConfig& config) {
  if (gt.motion_type != MotionType::kRotation) return true;
  if (!pred.origin || !gt.origin) return false;
  return gt.axis.cross(*pred.origin - *gt.origin).norm() <= config.origin_threshold;
}

double integrate_precision_recall(const std::vector<bool>& hits, int num_gt, ApIntegration integration) {
  if (num_gt <= 0) throw Error("integrate_precision_recall: no ground truth");
  const std::size_t n = hits.size();
  std::vector<long long> tp(n);
  std::vector<double> precision(n);
  long long count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    count += hits[k];
    tp[k] = count;
    precision[k] = static_cast<double>(count) / static_cast<double>(k + 1);
  }
  // Interpolated precision: best precision at this rank or any later one.
  for (std::size_t k = n; k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);

  if (integration == ApIntegration::kArea) {
    double area = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (hits[k]) area += precision[k];
    return area / num_gt;
  }
  // Recall level j/100 is reached at the first rank with tp * 100 >= j * num_gt.
  double sum = 0.0;
  std::size_t k = 0;
  for (long long j = 0; j <= 100; ++j) {
    while (k < n && tp[k] * 100 < j * num_gt) ++k;
    if (k == n) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

ApDetail ap_at_threshold(std::span<const EvalScene> scenes, double iou_threshold, ArticulationGate gate,
                         const EvalConfig& config) {
  const std::vector<MotionType> classes = classes_with_gt(scenes);
  if (classes.empty()) throw Error("nothing to evaluate: no ground-truth instances");

  struct Ranked {
    double confidence;
    std::size_t scene, pred;
    bool hit;
  };
  std::map<MotionType, std::vector<Ranked>> ranked;
  std::map<MotionType, int> num_gt;
  ApDetail out;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const EvalScene& scene = scenes[s];
    for (const GtInstance& g : scene.ground_truth) ++num_gt[g.motion_type];
    const Matching m = match_instances(scene.predictions, scene.ground_truth, iou_threshold);
    for (std::size_t p = 0; p < scene.predictions.size(); ++p) {
      const InstancePrediction& pred = scene.predictions[p];
      bool hit = m.pred_to_gt[p] >= 0;
      if (hit) {
        const GtInstance& gt = scene.ground_truth[m.pred_to_gt[p]];
        if (uses_origin(gate) && gt.motion_type == MotionType::kRotation && !pred.origin) ++out.missing_origins;
        if (uses_origin(gate)) hit = hit && origin_gate(pred, gt, config);
        if (uses_axis(gate)) hit = hit && axis_gate(pred.axis, gt.axis, config);
      }
      ranked[pred.motion_type].push_back({pred.confidence, s, p, hit});
    }
  }

  double sum = 0.0;
  for (MotionType c : classes) {
    std::vector<Ranked>& list = ranked[c];
    std::sort(list.begin(), list.end(), [](const Ranked& a, const Ranked& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      return std::tie(a.scene, a.pred) < std::tie(b.scene, b.pred);
    });
    std::vector<bool> hits;
    hits.reserve(list.size());
    for (const Ranked& r : list) hits.push_back(r.hit);
    const double ap = integrate_precision_recall(hits, num_gt[c], config.integration);
    out.per_class[c] = ap;
    sum += ap;
  }
  out.ap = sum / static_cast<double>(classes.size());
  return out;
}

ApSummary average_precision(std::span<const EvalScene> scenes, const EvalConfig& config) {
  check_config(config);
  ApSummary s;
  for (double t : config.iou_thresholds) s.ap += ap_at_threshold(scenes, t, ArticulationGate::kNone, config).ap;
  s.ap /= static_cast<double>(config.iou_thresholds.size());
  s.ap50 = ap_at_threshold(scenes, config.ap50_threshold, ArticulationGate::kNone, config).ap;
  s.ap25 = ap_at_threshold(scenes, config.ap25_threshold, ArticulationGate::kNone, config).ap;
  return s;
}

ApSummary average_precision(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                            const EvalConfig& config) {
  const EvalScene scene{"scene", {preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return average_precision(std::span<const EvalScene>(&scene, 1), config);
}

double articulated_ap(std::span<const EvalScene> scenes, ArticulationGate gate, const EvalConfig& config) {
  check_config(config);
  return ap_at_threshold(scenes, config.ap50_threshold, gate, config).ap;
}

double articulated_ap(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                      ArticulationGate gate, const EvalConfig& config) {
  const EvalScene scene{"scene", {preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return articulated_ap(std::span<const EvalScene>(&scene, 1), gate, config);
}

// --- losses -----------------------------------------------------------------

double dice_loss(std::span<const double> probs, std::span<const double> gt) {
  require_same_length(probs.size(), gt.size(), "dice_loss");
  double inter = 0.0, sum_p = 0.0, sum_g = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_probability(probs[i]);
    inter += p * gt[i];
    sum_p += p;
    sum_g += gt[i];
  }
  return 1.0 - 2.0 * inter / (sum_p + sum_g + kProbabilityEpsilon);
}

double bce_loss(std::span<const double> probs, std::span<const double> gt) {
  require_same_length(probs.size(), gt.size(), "bce_loss");
  if (probs.empty()) throw Error("bce_loss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_probability(probs[i]);
    sum -= gt[i] * std::log(p) + (1.0 - gt[i]) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

double loss_segmentation(std::span<const double> probs, std::span<const double> gt, const LossWeights& w) {
  require_same_length(probs.size(), gt.size(), "loss_segmentation");
  return w.dice * dice_loss(probs, gt) + w.ce * bce_loss(probs, gt);
}

double loss_aux(std::span<const Vec3> pred_shifts, std::span<const Vec3> gt_shifts, double lambda) {
  require_same_length(pred_shifts.size(), gt_shifts.size(), "loss_aux");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred_shifts.size(); ++i) sum += (gt_shifts[i] - pred_shifts[i]).lpNorm<1>();
  return lambda * sum;
}

ArticulationLoss loss_articulation(const Vec3& pred_axis, const std::optional<Vec3>& pred_origin,
                                   const Vec3& gt_axis, const std::optional<Vec3>& gt_origin,
                                   MotionType type, double lambda) {
  const double len = pred_axis.norm();
  if (len == 0.0) throw Error("loss_articulation: predicted axis has zero length");
  ArticulationLoss out;
  const double dot = pred_axis.dot(gt_axis);
  out.value = lambda * (1.0 - dot / len);
  // d/da of -a.a*/|a| = -(a*/|a| - (a.a*) a/|a|^3)
  out.grad_axis = -lambda * (gt_axis / len - dot * pred_axis / (len * len * len));
  if (type == MotionType::kRotation) {
    if (!pred_origin || !gt_origin) throw Error("loss_articulation: rotation needs predicted and GT origins");
    const Vec3 c = gt_axis.cross(*pred_origin - *gt_origin);
    const double dist = c.norm();
    out.value += lambda * dist;
    if (dist > 0.0) out.grad_origin = lambda * c.cross(gt_axis) / dist;
  }
  return out;
}

double loss_cls(const std::array<double, 3>& logits, MotionClass gt, double lambda) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - top);
  const double log_softmax = logits[static_cast<int>(gt)] - top - std::log(sum);
  return -lambda * log_softmax;
}

LossBreakdown instance_loss(const InstanceLossInputs& in, const LossWeights& w) {
  LossBreakdown b;
  b.seg = loss_segmentation(in.mask_probs, in.gt_mask, w);
  b.cls = loss_cls(in.logits, in.gt_class, w.cls);
  b.aux = loss_aux(in.pred_shifts, in.gt_shifts, w.aux);
  if (in.gt_class != MotionClass::kBackground) {
    const MotionType type = in.gt_class == MotionClass::kRotation ? MotionType::kRotation : MotionType::kTranslation;
    b.arti = loss_articulation(in.pred_axis, in.pred_origin, in.gt_axis, in.gt_origin, type, w.arti).value;
  }
  b.total = b.seg + b.cls + b.aux + b.arti;
  return b;
}

// --- aggregation ------------------------------------------------------------

Vec3 aggregate_axis_prediction(std::span<const Vec3> point_axes, const Vec3& query_axis) {
  if (point_axes.empty()) throw Error("aggregate_axis_prediction: no point predictions");
  Vec3 mean = Vec3::Zero();
  for (const Vec3& a : point_axes) mean += a;
  mean /= static_cast<double>(point_axes.size());
  const Vec3 combined = (mean + query_axis) / 2.0;
  const double n = combined.norm();
  if (n == 0.0) throw Error("aggregate_axis_prediction: aggregate axis has zero length");
  return combined / n;
}

Vec3 aggregate_origin_prediction(std::span<const Vec3> point_origins) {
  if (point_origins.empty()) throw Error("aggregate_origin_prediction: no point predictions");
  Vec3 mean = Vec3::Zero();
  for (const Vec3& o : point_origins) mean += o;
  return mean / static_cast<double>(point_origins.size());
}

// --- connectivity -----------------------------------------------------------

std::string_view to_string(PartRelation relation) {
  switch (relation) {
    case PartRelation::kNone: return "none";
    case PartRelation::kParentOf: return "parent_of";
    case PartRelation::kChildOf: return "child_of";
  }
  return "?";
}

PartRelation part_relation_from_string(std::string_view text) {
  for (PartRelation r : {PartRelation::kNone, PartRelation::kParentOf, PartRelation::kChildOf})
    if (to_string(r) == text) return r;
  throw Error("unknown relation '" + std::string(text) + "' (expected none, parent_of or child_of)");
}

PartRelation reverse(PartRelation relation) {
  switch (relation) {
    case PartRelation::kParentOf: return PartRelation::kChildOf;
    case PartRelation::kChildOf: return PartRelation::kParentOf;
    default: return PartRelation::kNone;
  }
}

PartRelation gt_relation(const ObjectInstance& object, std::string_view a, std::string_view b) {
  const PartSegment* pa = object.find_part(a);
  const PartSegment* pb = object.find_part(b);
  if (!pa || !pb) throw Error("gt_relation: unknown part in object '" + object.id + "'");
  if (pb->parent_part && *pb->parent_part == a) return PartRelation::kParentOf;
  if (pa->parent_part && *pa->parent_part == b) return PartRelation::kChildOf;
  return PartRelation::kNone;
}

ConnectivityAccuracy connectivity_accuracy(const EdgePredictions& predictions, const SceneAnnotation& gt) {
  ConnectivityAccuracy acc;
  int correct_pairs = 0, correct_objects = 0;
  std::vector<std::string> missing;
  for (const ObjectInstance& object : gt.objects) {
    std::vector<std::string> ids;
    for (const PartSegment& p : object.parts)
      if (std::find(ids.begin(), ids.end(), p.id) == ids.end()) ids.push_back(p.id);
    if (ids.size() < 2) continue;
    ++acc.objects;
    bool all_correct = true;
    for (std::size_t i = 0; i < ids.size(); ++i)
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        std::optional<PartRelation> predicted;
        if (auto it = predictions.find({ids[i], ids[j]}); it != predictions.end()) {
          predicted = it->second;
        } else if (auto rit = predictions.find({ids[j], ids[i]}); rit != predictions.end()) {
          predicted = reverse(rit->second);
        }
        if (!predicted) {
          missing.push_back(object.id + ":(" + ids[i] + ", " + ids[j] + ")");
          continue;
        }
        ++acc.pairs;
        const bool ok = *predicted == gt_relation(object, ids[i], ids[j]);
        correct_pairs += ok;
        all_correct = all_correct && ok;
      }
    correct_objects += all_correct;
  }
  if (!missing.empty()) {
    std::string msg = "connectivity predictions missing " + std::to_string(missing.size()) + " pair(s):";
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i];
    if (missing.size() > 20) msg += " ...";
    throw Error(msg);
  }
  if (acc.pairs > 0) acc.acc_edge = static_cast<double>(correct_pairs) / acc.pairs;
  if (acc.objects > 0) acc.acc_obj = static_cast<double>(correct_objects) / acc.objects;
  return acc;
}

// --- breakdowns -------------------------------------------------------------

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw Error("quantile level outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

BreakdownReport breakdown_report(std::span<const RecognitionResult> results, int buckets) {
  if (buckets < 1) throw Error("breakdown_report: need at least one bucket");
  BreakdownReport report;
  if (results.empty()) return report;
  std::vector<double> sizes;
  for (const RecognitionResult& r : results) sizes.push_back(r.points);
  for (int k = 1; k < buckets; ++k) report.boundaries.push_back(quantile(sizes, static_cast<double>(k) / buckets));

  report.by_size.resize(static_cast<std::size_t>(buckets));
  for (std::size_t k = 0; k < report.by_size.size(); ++k) report.by_size[k].key = bucket_key(report.boundaries, k);
  std::map<std::string, BreakdownRow> labels;
  for (const RecognitionResult& r : results) {
    std::size_t k = 0;
    while (k < report.boundaries.size() && r.points > report.boundaries[k]) ++k;
    add_result(report.by_size[k], r);
    BreakdownRow& row = labels[r.label];
    row.key = r.label;
    add_result(row, r);
  }
  for (auto& [label, row] : labels) report.by_label.push_back(row);
  finish_rows(report.by_size);
  finish_rows(report.by_label);
  return report;
}

std::vector<RecognitionResult> recognition_results(std::span<const EvalScene> scenes, const EvalConfig& config) {
  std::vector<RecognitionResult> out;
  for (const EvalScene& scene : scenes) {
    const Matching m = match_instances(scene.predictions, scene.ground_truth, config.ap50_threshold);
    for (std::size_t g = 0; g < scene.ground_truth.size(); ++g) {
      const GtInstance& gt = scene.ground_truth[g];
      RecognitionResult r;
      r.points = static_cast<int>(gt.mask.size());
      r.label = gt.label.empty() ? "unlabeled" : gt.label;
      if (m.gt_to_pred[g] >= 0) {
        const InstancePrediction& pred = scene.predictions[m.gt_to_pred[g]];
        r.segmentation = true;
        r.origin = origin_gate(pred, gt, config);
        r.axis = axis_gate(pred.axis, gt.axis, config);
      }
      out.push_back(r);
    }
  }
  return out;
}

// --- evaluation clouds -------------------------------------------------------

EvaluationCloud evaluation_cloud(const TriMesh& mesh, const SceneAnnotation& annotation, std::uint64_t seed,
                                 const CloudSamplingParams& params) {
  if (!(params.density > 0.0) || !(params.voxel > 0.0)) throw Error("evaluation_cloud: density and voxel must be positive");
  check_annotation(annotation, mesh.faces.size());

  // Face -> instance index; an instance is a movable part plus its non-movable descendants.
  EvaluationCloud out;
  std::vector<int> face_instance(mesh.faces.size(), -1);
  for (const ObjectInstance& object : annotation.objects) {
    for (const PartSegment& part : object.parts) {
      const PartSegment* owner = &part;
      while (owner->role != PartRole::kMovable && owner->parent_part) owner = object.find_part(*owner->parent_part);
      if (owner->role != PartRole::kMovable) continue;
      auto it = std::find(out.part_ids.begin(), out.part_ids.end(), owner->id);
      if (it == out.part_ids.end()) {
        out.part_ids.push_back(owner->id);
        GtInstance g;
        g.motion_type = owner->articulation->type;
        g.axis = owner->articulation->axis;
        g.origin = owner->articulation->origin;
        g.label = owner->label;
        out.ground_truth.push_back(std::move(g));
        it = out.part_ids.end() - 1;
      }
      for (int f : part.face_indices) face_instance[f] = static_cast<int>(it - out.part_ids.begin());
    }
  }

  std::mt19937_64 rng(seed);
  auto u01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  PointCloud samples;
  std::vector<int> sample_label;
  const std::vector<double> areas = face_areas(mesh);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const double expected = areas[f] * params.density;
    const auto count = static_cast<std::size_t>(expected) + (u01() < expected - std::floor(expected) ? 1 : 0);
    const Face& face = mesh.faces[f];
    for (std::size_t k = 0; k < count; ++k) {
      const double r1 = std::sqrt(u01()), r2 = u01();
      const double w0 = 1.0 - r1, w1 = r1 * (1.0 - r2), w2 = r1 * r2;
      samples.points.push_back(w0 * mesh.vertices[face[0]] + w1 * mesh.vertices[face[1]] +
                               w2 * mesh.vertices[face[2]]);
      if (mesh.has_colors())
        samples.colors.push_back(w0 * mesh.vertex_colors[face[0]] + w1 * mesh.vertex_colors[face[1]] +
                                 w2 * mesh.vertex_colors[face[2]]);
      sample_label.push_back(face_instance[f]);
    }
  }

  VoxelGrid grid = voxel_grid(samples, params.voxel);
  out.cloud = std::move(grid.cloud);
  out.labels.reserve(grid.members.size());
  std::map<int, int> votes;
  for (std::size_t v = 0; v < grid.members.size(); ++v) {
    votes.clear();
    for (std::size_t m : grid.members[v]) ++votes[sample_label[m]];
    int best = -1, best_votes = 0;
    for (const auto& [label, n] : votes)  // ascending label: ties keep the lower one
      if (n > best_votes) {
        best = label;
        best_votes = n;
      }
    out.labels.push_back(best);
    if (best >= 0) out.ground_truth[best].mask.push_back(static_cast<int>(v));
  }

  // Drop instances that own no voxel.
  std::vector<int> remap(out.ground_truth.size(), -1);
  std::vector<GtInstance> kept;
  std::vector<std::string> kept_ids;
  for (std::size_t i = 0; i < out.ground_truth.size(); ++i) {
    if (out.ground_truth[i].mask.empty()) continue;
    remap[i] = static_cast<int>(kept.size());
    kept.push_back(std::move(out.ground_truth[i]));
    kept_ids.push_back(out.part_ids[i]);
  }
  for (int& l : out.labels)
    if (l >= 0) l = remap[l];
  out.ground_truth = std::move(kept);
  out.part_ids = std::move(kept_ids);
  return out;
}

// --- files and reports ------------------------------------------------------

std::vector<std::pair<std::string, std::vector<InstancePrediction>>> parse_predictions(std::string_view text) {
  const json doc = detail::parse_json(text);
  std::vector<std::pair<std::string, std::vector<InstancePrediction>>> out;
  for_each_scene(doc, [&](const std::string& spath, const std::string& id, const json& instances) {
    std::vector<InstancePrediction> preds;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const std::string path = spath + ".instances[" + std::to_string(i) + "]";
      const json& j = instances[i];
      detail::check_keys(j, path, {"mask", "confidence", "motion_type", "axis", "origin", "label"});
      InstancePrediction p;
      p.mask = parse_mask(detail::require(j, path, "mask"), path + ".mask");
      if (j.contains("confidence")) {
        p.confidence = detail::as_number(j["confidence"], path + ".confidence");
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0))
          detail::schema_error(path + ".confidence", "confidence must lie in [0, 1]");
      }
      try {
        p.motion_type = motion_type_from_string(
            detail::as_string(detail::require(j, path, "motion_type"), path + ".motion_type"));
      } catch (const Error& e) {
        detail::schema_error(path + ".motion_type", e.what());
      }
      p.axis = parse_axis(detail::require(j, path, "axis"), path + ".axis");
      if (j.contains("origin")) p.origin = detail::as_vec3(j["origin"], path + ".origin");
      preds.push_back(std::move(p));
    }
    out.emplace_back(id, std::move(preds));
  });
  return out;
}

std::vector<std::pair<std::string, std::vector<GtInstance>>> parse_ground_truth(std::string_view text) {
  const json doc = detail::parse_json(text);
  std::vector<std::pair<std::string, std::vector<GtInstance>>> out;
  for_each_scene(doc, [&](const std::string& spath, const std::string& id, const json& instances) {
    std::vector<GtInstance> gts;
    std::set<int> used;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const std::string path = spath + ".instances[" + std::to_string(i) + "]";
      const json& j = instances[i];
      detail::check_keys(j, path, {"mask", "confidence", "motion_type", "axis", "origin", "label"});
      GtInstance g;
      g.mask = parse_mask(detail::require(j, path, "mask"), path + ".mask");
      try {
        g.motion_type = motion_type_from_string(
            detail::as_string(detail::require(j, path, "motion_type"), path + ".motion_type"));
      } catch (const Error& e) {
        detail::schema_error(path + ".motion_type", e.what());
      }
      g.axis = parse_axis(detail::require(j, path, "axis"), path + ".axis");
      if (j.contains("origin")) g.origin = detail::as_vec3(j["origin"], path + ".origin");
      if (g.motion_type == MotionType::kRotation && !g.origin)
        detail::schema_error(path + ".origin", "rotation instances need an origin");
      if (j.contains("label")) g.label = detail::as_string(j["label"], path + ".label");
      for (int v : g.mask)
        if (!used.insert(v).second)
          detail::schema_error(path + ".mask", "point " + std::to_string(v) + " belongs to an earlier instance");
      gts.push_back(std::move(g));
    }
    out.emplace_back(id, std::move(gts));
  });
  return out;
}

std::string save_predictions(const std::string& scene_id, std::span<const InstancePrediction> preds) {
  json doc{{"scene_id", scene_id}, {"instances", json::array()}};
  for (const InstancePrediction& p : preds) {
    json j = instance_json(p.mask, p.motion_type, p.axis, p.origin);
    j["confidence"] = p.confidence;
    doc["instances"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::string save_ground_truth(const std::string& scene_id, std::span<const GtInstance> gts) {
  json doc{{"scene_id", scene_id}, {"instances", json::array()}};
  for (const GtInstance& g : gts) {
    json j = instance_json(g.mask, g.motion_type, g.axis, g.origin);
    if (!g.label.empty()) j["label"] = g.label;
    doc["instances"].push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

std::vector<EvalScene> join_scenes(std::vector<std::pair<std::string, std::vector<InstancePrediction>>> preds,
                                   std::vector<std::pair<std::string, std::vector<GtInstance>>> gts) {
  std::vector<EvalScene> scenes;
  std::set<std::string> gt_ids;
  for (auto& [id, instances] : gts) {
    gt_ids.insert(id);
    EvalScene s{id, {}, std::move(instances)};
    for (auto& [pid, p] : preds)
      if (pid == id) s.predictions = std::move(p);
    scenes.push_back(std::move(s));
  }
  for (const auto& [pid, p] : preds)
    if (!gt_ids.count(pid)) throw Error("predictions for scene '" + pid + "' have no ground truth");
  return scenes;
}

EvalReport evaluate(std::span<const EvalScene> scenes, const EvalConfig& config) {
  check_config(config);
  EvalReport r;
  r.scenes = static_cast<int>(scenes.size());
  for (const EvalScene& s : scenes) {
    r.predictions += static_cast<int>(s.predictions.size());
    r.ground_truth += static_cast<int>(s.ground_truth.size());
  }

  std::map<MotionType, double> ap_sum;
  for (double t : config.iou_thresholds) {
    const ApDetail d = ap_at_threshold(scenes, t, ArticulationGate::kNone, config);
    r.summary.ap += d.ap;
    for (const auto& [c, v] : d.per_class) ap_sum[c] += v;
  }
  const double nt = static_cast<double>(config.iou_thresholds.size());
  r.summary.ap /= nt;
  for (const auto& [c, v] : ap_sum) r.per_class[c]["ap"] = v / nt;

  auto record = [&](const char* key, double threshold, ArticulationGate gate) {
    const ApDetail d = ap_at_threshold(scenes, threshold, gate, config);
    for (const auto& [c, v] : d.per_class) r.per_class[c][key] = v;
    if (gate == ArticulationGate::kOrigin) r.missing_origins = d.missing_origins;
    return d.ap;
  };
  r.summary.ap50 = record("ap50", config.ap50_threshold, ArticulationGate::kNone);
  r.summary.ap25 = record("ap25", config.ap25_threshold, ArticulationGate::kNone);
  r.ap50_origin = record("ap50_origin", config.ap50_threshold, ArticulationGate::kOrigin);
  r.ap50_axis = record("ap50_axis", config.ap50_threshold, ArticulationGate::kAxis);
  r.ap50_origin_axis = record("ap50_origin_axis", config.ap50_threshold, ArticulationGate::kOriginAxis);

  const std::vector<RecognitionResult> results = recognition_results(scenes, config);
  r.breakdown = breakdown_report(results, config.size_buckets);
  return r;
}

std::string report_json(const EvalReport& r) {
  json j;
  j["ap"] = r.summary.ap;
  j["ap50"] = r.summary.ap50;
  j["ap25"] = r.summary.ap25;
  j["ap50_origin"] = r.ap50_origin;
  j["ap50_axis"] = r.ap50_axis;
  j["ap50_origin_axis"] = r.ap50_origin_axis;
  j["missing_origins"] = r.missing_origins;
  j["scenes"] = r.scenes;
  j["predictions"] = r.predictions;
  j["ground_truth"] = r.ground_truth;
  j["per_class"] = json::object();
  for (const auto& [c, values] : r.per_class) j["per_class"][std::string(to_string(c))] = per_class_json(values);
  j["per_bucket"] = {{"boundaries", r.breakdown.boundaries}, {"rows", rows_json(r.breakdown.by_size)}};
  j["per_label"] = rows_json(r.breakdown.by_label);
  return j.dump(2) + "\n";
}

}  // namespace artic
