#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artic/annotation.hpp"
#include "artic/geometry.hpp"

namespace artic {

// --- instances ----------------------------------------------------------------

struct InstancePrediction {
  std::vector<int> mask;  // sorted, unique point indices
  double confidence = 1.0;
  MotionType motion_type = MotionType::kRotation;
  Vec3 axis = kUp;
  std::optional<Vec3> origin;

  bool operator==(const InstancePrediction&) const = default;
};

struct GtInstance {
  std::vector<int> mask;
  MotionType motion_type = MotionType::kRotation;
  Vec3 axis = kUp;
  std::optional<Vec3> origin;
  std::string label;  // optional part label, used by the breakdown tables

  bool operator==(const GtInstance&) const = default;
};

/// Predictions and ground truth of one scene. Masks index the scene's evaluation cloud.
struct EvalScene {
  std::string scene_id;
  std::vector<InstancePrediction> predictions;
  std::vector<GtInstance> ground_truth;
};

enum class ApIntegration {
  kPoint101,  // mean of interpolated precision at recall 0, 0.01, ..., 1
  kArea,      // area under the interpolated precision envelope
};

struct EvalConfig {
  std::vector<double> iou_thresholds = default_iou_thresholds();
  double ap50_threshold = 0.5;
  double ap25_threshold = 0.25;
  double axis_threshold = default_axis_threshold();  // gate on 1 - |cos|
  double origin_threshold = 0.25;                    // meters, point-to-axis-line distance
  bool axis_sign_invariant = true;
  ApIntegration integration = ApIntegration::kPoint101;
  int size_buckets = 3;

  static std::vector<double> default_iou_thresholds();  // 0.50, 0.55, ..., 0.95
  static double default_axis_threshold();               // 1 - cos 15 deg
};

/// Throws ValidationError when a value is out of its domain.
void check_config(const EvalConfig& config);

/// |a ∩ b| / |a ∪ b| over sorted unique index sets. Throws Error if both are empty.
double mask_iou(std::span<const int> a, std::span<const int> b);

struct Matching {
  std::vector<int> pred_to_gt;  // -1: false positive
  std::vector<int> gt_to_pred;  // -1: false negative
  std::vector<double> iou;      // per prediction, IoU with its match (0 if unmatched)
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
};

/// Greedy matching: predictions in descending confidence (ties by lower index) each
/// take the unmatched GT of the same motion type with the highest IoU >= threshold
/// (ties by lower GT index).
Matching match_instances(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                         double iou_threshold);

// --- average precision ------------------------------------------------------

enum class ArticulationGate { kNone, kOrigin, kAxis, kOriginAxis };

std::string_view to_string(ArticulationGate gate);

/// Axis gate: 1 - cos(angle) <= threshold, with |cos| when sign-invariant.
bool axis_gate(const Vec3& pred_axis, const Vec3& gt_axis, const EvalConfig& config);
/// Origin gate for rotation GT: |a* x (o - o*)| <= threshold. Translation GT always passes.
/// A rotation prediction without an origin fails.
bool origin_gate(const InstancePrediction& pred, const GtInstance& gt, const EvalConfig& config);

/// Interpolated-precision integral of a ranked list of hits against num_gt positives.
double integrate_precision_recall(const std::vector<bool>& ranked_hits, int num_gt, ApIntegration integration);

struct ApDetail {
  double ap = 0.0;                        // mean over classes with GT
  std::map<MotionType, double> per_class;
  int missing_origins = 0;                // matched rotation pairs lacking a predicted origin
};

/// AP at one IoU threshold, pooled over scenes, with an optional articulation gate.
/// Throws Error("nothing to evaluate") when no scene has GT.
ApDetail ap_at_threshold(std::span<const EvalScene> scenes, double iou_threshold, ArticulationGate gate,
                         const EvalConfig& config);

struct ApSummary {
  double ap = 0.0;    // mean over config.iou_thresholds
  double ap50 = 0.0;
  double ap25 = 0.0;
};

ApSummary average_precision(std::span<const EvalScene> scenes, const EvalConfig& config = {});
ApSummary average_precision(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                            const EvalConfig& config = {});

/// AP50 where a matched pair is a true positive only if it also passes the gate(s).
double articulated_ap(std::span<const EvalScene> scenes, ArticulationGate gate, const EvalConfig& config = {});
double articulated_ap(std::span<const InstancePrediction> preds, std::span<const GtInstance> gts,
                      ArticulationGate gate, const EvalConfig& config = {});

// --- losses -----------------------------------------------------------------

struct LossWeights {
  double dice = 2.0;
  double ce = 5.0;
  double cls = 2.0;
  double aux = 1.0;
  double arti = 1.0;
};

constexpr double kProbabilityEpsilon = 1e-7;

/// 1 - 2 sum(p g) / (sum p + sum g + eps), p clamped to [eps, 1 - eps].
double dice_loss(std::span<const double> probs, std::span<const double> gt);
/// Mean binary cross-entropy with p clamped to [eps, 1 - eps].
double bce_loss(std::span<const double> probs, std::span<const double> gt);
/// weights.dice * dice + weights.ce * bce. Throws Error on length mismatch.
double loss_segmentation(std::span<const double> probs, std::span<const double> gt,
                         const LossWeights& weights = {});

/// lambda * sum over points of the L1 distance between shift vectors.
double loss_aux(std::span<const Vec3> pred_shifts, std::span<const Vec3> gt_shifts, double lambda = 1.0);

struct ArticulationLoss {
  double value = 0.0;
  Vec3 grad_axis = Vec3::Zero();
  Vec3 grad_origin = Vec3::Zero();  // zero for translation
};

/// lambda (1 - cos(a, a*)) plus, for rotation, lambda |a* x (o - o*)|. The predicted
/// axis is normalized inside the cosine; a* must be unit. Gradients are with respect
/// to the raw predicted axis and origin (zero subgradient where the cross product
/// vanishes). Throws Error for a zero predicted axis or a rotation without origins.
ArticulationLoss loss_articulation(const Vec3& pred_axis, const std::optional<Vec3>& pred_origin,
                                   const Vec3& gt_axis, const std::optional<Vec3>& gt_origin,
                                   MotionType type, double lambda = 1.0);

enum class MotionClass { kBackground = 0, kRotation = 1, kTranslation = 2 };

/// lambda * -log softmax(logits)[gt].
double loss_cls(const std::array<double, 3>& logits, MotionClass gt, double lambda = 2.0);

/// Everything one matched instance contributes to the training objective.
struct InstanceLossInputs {
  std::vector<double> mask_probs;
  std::vector<double> gt_mask;
  std::array<double, 3> logits{};
  MotionClass gt_class = MotionClass::kBackground;
  std::vector<Vec3> pred_shifts;
  std::vector<Vec3> gt_shifts;
  Vec3 pred_axis = kUp;
  std::optional<Vec3> pred_origin;
  Vec3 gt_axis = kUp;
  std::optional<Vec3> gt_origin;
};

struct LossBreakdown {
  double seg = 0.0, cls = 0.0, aux = 0.0, arti = 0.0;
  double total = 0.0;  // seg + cls + aux + arti
};

/// The articulation term is included only for rotation and translation classes.
LossBreakdown instance_loss(const InstanceLossInputs& in, const LossWeights& weights = {});

// --- aggregation ------------------------------------------------------------

/// normalize((mean(point_axes) + query_axis) / 2). Throws Error if empty or zero.
Vec3 aggregate_axis_prediction(std::span<const Vec3> point_axes, const Vec3& query_axis);
/// Plain mean of per-point origin predictions. Throws Error if empty.
Vec3 aggregate_origin_prediction(std::span<const Vec3> point_origins);

// --- connectivity -----------------------------------------------------------

enum class PartRelation { kNone, kParentOf, kChildOf };

std::string_view to_string(PartRelation relation);
PartRelation part_relation_from_string(std::string_view text);
PartRelation reverse(PartRelation relation);

/// (part_a, part_b) -> relation of a to b. Either key order is accepted.
using EdgePredictions = std::map<std::pair<std::string, std::string>, PartRelation>;

/// Relation of part a to part b in the GT object (direct parent links only).
PartRelation gt_relation(const ObjectInstance& object, std::string_view a, std::string_view b);

struct ConnectivityAccuracy {
  double acc_edge = 0.0;
  double acc_obj = 0.0;
  int pairs = 0;
  int objects = 0;  // objects with at least one part pair
};

/// Scores predictions over every unordered part pair of every object with two or more
/// parts. Throws Error listing the missing pairs when any is not predicted.
ConnectivityAccuracy connectivity_accuracy(const EdgePredictions& predictions,
                                           const SceneAnnotation& ground_truth);

// --- breakdowns -------------------------------------------------------------

struct RecognitionResult {
  int points = 0;  // GT part size
  std::string label;
  bool segmentation = false;
  bool origin = false;  // segmentation and origin gate
  bool axis = false;    // segmentation and axis gate
};

struct BreakdownRow {
  std::string key;  // bucket range or label
  int count = 0;
  double segmentation = 0.0, origin = 0.0, axis = 0.0;
};

struct BreakdownReport {
  std::vector<double> boundaries;  // interior quantile boundaries of the size buckets
  std::vector<BreakdownRow> by_size;
  std::vector<BreakdownRow> by_label;  // sorted by label
};

/// Linear-interpolation quantile (type 7) of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Size buckets split at the k/buckets quantiles of the sizes; a result goes to the
/// first bucket whose upper boundary is >= its size.
BreakdownReport breakdown_report(std::span<const RecognitionResult> results, int buckets = 3);

/// Per-GT recognition at AP50 matching, with the configured gates.
std::vector<RecognitionResult> recognition_results(std::span<const EvalScene> scenes, const EvalConfig& config = {});

// --- evaluation clouds -------------------------------------------------------

struct CloudSamplingParams {
  double density = 2500.0;  // surface samples per square meter
  double voxel = 0.02;      // meters
};

struct EvaluationCloud {
  PointCloud cloud;                     // voxel centroids, ordered by cell
  std::vector<int> labels;              // per point: index into ground_truth, or -1
  std::vector<GtInstance> ground_truth;  // one per movable part that owns a voxel
  std::vector<std::string> part_ids;     // movable part of each GT instance
};

/// Samples the mesh surface uniformly (deterministic for a seed), voxelizes the
/// samples and labels each voxel by the majority of its samples (ties go to the
/// lower label, background lowest). A movable part's instance covers its own faces
/// and those of descendants that are not under another movable part.
EvaluationCloud evaluation_cloud(const TriMesh& mesh, const SceneAnnotation& annotation, std::uint64_t seed,
                                 const CloudSamplingParams& params = {});

// --- files and reports ------------------------------------------------------

/// Scene list from a prediction document: one {scene_id, instances} object or a list
/// of them. Missing confidence defaults to 1.0. Throws ParseError/ValidationError.
std::vector<std::pair<std::string, std::vector<InstancePrediction>>> parse_predictions(std::string_view json_text);
/// Same layout without confidence (a confidence key is ignored). Rotation instances
/// need an origin and masks within a scene must be disjoint.
std::vector<std::pair<std::string, std::vector<GtInstance>>> parse_ground_truth(std::string_view json_text);

std::string save_predictions(const std::string& scene_id, std::span<const InstancePrediction> preds);
std::string save_ground_truth(const std::string& scene_id, std::span<const GtInstance> gts);

/// Pairs scenes by id; GT scenes without predictions are kept (all misses) and
/// prediction scenes without GT raise an error.
std::vector<EvalScene> join_scenes(std::vector<std::pair<std::string, std::vector<InstancePrediction>>> preds,
                                   std::vector<std::pair<std::string, std::vector<GtInstance>>> gts);

struct EvalReport {
  ApSummary summary;
  double ap50_origin = 0.0, ap50_axis = 0.0, ap50_origin_axis = 0.0;
  std::map<MotionType, std::map<std::string, double>> per_class;
  int missing_origins = 0;
  int scenes = 0, predictions = 0, ground_truth = 0;
  BreakdownReport breakdown;
};

EvalReport evaluate(std::span<const EvalScene> scenes, const EvalConfig& config = {});
/// Pretty-printed JSON with sorted keys.
std::string report_json(const EvalReport& report);

}  // namespace artic
