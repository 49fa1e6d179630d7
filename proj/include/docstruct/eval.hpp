#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "docstruct/model.hpp"

namespace docstruct {

struct MatchedPair {
  std::string pred_id;
  std::string gt_id;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchedPair> true_positives;
  std::vector<std::string> false_positive_ids;
  std::vector<std::string> false_negative_ids;
};

// Greedy per-category matching: predictions in descending confidence order
// each claim the unmatched ground-truth box with the highest overlap, and
// the claim counts when that overlap reaches the threshold.
MatchResult match_entities(std::span<const Entity> predictions,
                           std::span<const Entity> ground_truth,
                           double iou_threshold);

struct ScoredDetection {
  double confidence = 0.0;
  bool is_true_positive = false;
};

// Area-under-precision-envelope AP on a 0..100 scale. `eleven_point`
// switches to the 11-point interpolated variant.
double average_precision(std::vector<ScoredDetection> detections, int num_gt,
                         bool eleven_point = false);

struct CategoryScore {
  double ap = 0.0;
  int num_gt = 0;
  int num_pred = 0;
  int num_tp = 0;
};

struct RelationScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int tp = 0;
  int fp = 0;
  int fn = 0;
};

struct EvalReport {
  double iou_threshold = 0.5;
  double mean_ap = 0.0;
  std::map<std::string, CategoryScore> per_category;
  // Predicted categories with no ground truth at all (excluded from mAP).
  std::vector<std::string> predictions_without_gt;
  std::map<std::string, RelationScore> relation_scores;
};

// Drop predictions below the confidence floor; entities without a stored
// confidence count as fully confident.
std::vector<Entity> confidence_filter(std::span<const Entity> entities,
                                      double min_confidence);

EvalReport evaluate(const DocStructure& predicted, const DocStructure& ground_truth,
                    double iou_threshold = 0.5, bool eleven_point = false);

// Pools matches across documents before scoring. Pairs are (predicted, gt).
EvalReport evaluate_corpus(
    std::span<const std::pair<DocStructure, DocStructure>> documents,
    double iou_threshold = 0.5, bool eleven_point = false);

std::string format_report_table(const EvalReport& report);

}  // namespace docstruct
