#pragma once

#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nplb {

/// Corner-form box in pixels. Zero-area boxes are allowed.
struct Box {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double area() const noexcept { return (x_max - x_min) * (y_max - y_min); }
};

struct GroundTruth {
  std::string image_id;
  int class_index = 0;
  Box box;
};

struct Prediction {
  std::string image_id;
  int class_index = 0;
  Box box;
  double score = 0.0;
};

/// Intersection over union; 0 for disjoint or degenerate pairs.
double iou(const Box& a, const Box& b) noexcept;

struct MatchedPrediction {
  Prediction prediction;
  bool is_tp = false;
  /// Index into the ground-truth input when is_tp.
  std::optional<std::size_t> gt_index;
};

/// Greedy matching. Predictions are visited by descending score (stable on
/// ties); each takes the unmatched same-image, same-class ground truth with
/// the highest IoU >= threshold (lowest index on IoU ties). The result is in
/// visiting order.
std::vector<MatchedPrediction> match_predictions(std::span<const Prediction> preds,
                                                 std::span<const GroundTruth> gts,
                                                 double iou_threshold);

/// All-point interpolated AP over score-ordered TP/FP flags. With n_gt = 0
/// the result is 1 when there are no predictions and 0 otherwise.
double average_precision(const std::vector<bool>& flags, std::size_t n_gt);

/// Arithmetic mean of per-class APs. Throws ValidationError when empty.
double mean_ap(std::span<const double> per_class_ap);

/// 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

struct EvalOptions {
  std::vector<double> thresholds = coco_iou_thresholds();
  /// When set, classes 0..n-1 are evaluated even if absent from both files.
  std::optional<int> n_classes;
  /// Count classes with neither ground truth nor predictions (AP = 1) in mAP.
  bool include_vacuous = false;
};

struct ClassAp {
  int class_index = 0;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  bool vacuous = false;
  /// One AP per threshold.
  std::vector<double> ap;
  double ap_50 = 0.0;
};

struct EvalResult {
  std::vector<double> thresholds;
  std::vector<ClassAp> per_class;
  /// mAP at each threshold.
  std::vector<double> map_per_threshold;
  double map_50 = 0.0;
  double map_50_95 = 0.0;
};

EvalResult map_over_range(std::span<const Prediction> preds, std::span<const GroundTruth> gts,
                          const EvalOptions& options = {});

/// Line-delimited {"image_id", "class_index", "box": [x1,y1,x2,y2], "score"}.
std::vector<Prediction> read_predictions(std::istream& in);
/// Same without "score".
std::vector<GroundTruth> read_ground_truth(std::istream& in);

std::string to_json(const EvalResult& result);

}  // namespace nplb
