#include "docstruct/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include "docstruct/geometry.hpp"

namespace docstruct {

std::vector<Entity> confidence_filter(std::span<const Entity> entities,
                                      double min_confidence) {
  std::vector<Entity> kept;
  kept.reserve(entities.size());
  for (const Entity& e : entities)
    if (e.confidence.value_or(1.0) >= min_confidence) kept.push_back(e);
  return kept;
}

MatchResult match_entities(std::span<const Entity> predictions,
                           std::span<const Entity> ground_truth,
                           double iou_threshold) {
  MatchResult result;

  std::vector<const Entity*> preds;
  preds.reserve(predictions.size());
  for (const Entity& p : predictions) preds.push_back(&p);
  std::sort(preds.begin(), preds.end(), [](const Entity* a, const Entity* b) {
    const double ca = a->confidence.value_or(1.0);
    const double cb = b->confidence.value_or(1.0);
    if (ca != cb) return ca > cb;
    return a->id < b->id;
  });

  std::vector<bool> claimed(ground_truth.size(), false);
  for (const Entity* p : preds) {
    int best = -1;
    double best_iou = -1.0;
    for (size_t g = 0; g < ground_truth.size(); ++g) {
      if (claimed[g]) continue;
      const Entity& gt = ground_truth[g];
      if (gt.category != p->category) continue;
      double overlap = 0.0;
      if (!(is_degenerate(p->bbox) && is_degenerate(gt.bbox)))
        overlap = iou(p->bbox, gt.bbox);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_threshold) {
      claimed[best] = true;
      result.true_positives.push_back({p->id, ground_truth[best].id, best_iou});
    } else {
      result.false_positive_ids.push_back(p->id);
    }
  }
  for (size_t g = 0; g < ground_truth.size(); ++g)
    if (!claimed[g]) result.false_negative_ids.push_back(ground_truth[g].id);
  return result;
}

double average_precision(std::vector<ScoredDetection> detections, int num_gt,
                         bool eleven_point) {
  if (num_gt <= 0) return 0.0;
  std::stable_sort(detections.begin(), detections.end(),
                   [](const ScoredDetection& a, const ScoredDetection& b) {
                     return a.confidence > b.confidence;
                   });

  const size_t n = detections.size();
  std::vector<double> precision(n), recall(n);
  int cum_tp = 0;
  for (size_t i = 0; i < n; ++i) {
    if (detections[i].is_true_positive) ++cum_tp;
    precision[i] = static_cast<double>(cum_tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(cum_tp) / static_cast<double>(num_gt);
  }
  // Precision envelope: best precision achievable at or past each rank.
  std::vector<double> envelope(n);
  double running = 0.0;
  for (size_t i = n; i-- > 0;) {
    running = std::max(running, precision[i]);
    envelope[i] = running;
  }

  if (eleven_point) {
    double total = 0.0;
    for (int level = 0; level <= 10; ++level) {
      const double target = level / 10.0;
      double best = 0.0;
      for (size_t i = 0; i < n; ++i)
        if (recall[i] >= target) {
          best = envelope[i];
          break;
        }
      total += best;
    }
    return total / 11.0 * 100.0;
  }

  // Summing the envelope only at true-positive ranks integrates the
  // precision-recall curve in steps of 1/num_gt and stays exact (100.0,
  // not 99.999...) when every ground-truth box is recovered at full
  // precision.
  double total = 0.0;
  for (size_t i = 0; i < n; ++i)
    if (detections[i].is_true_positive) total += envelope[i];
  return total / static_cast<double>(num_gt) * 100.0;
}

namespace {

struct CategoryPool {
  std::vector<ScoredDetection> detections;
  int num_gt = 0;
  int num_pred = 0;
  int num_tp = 0;
};

void accumulate_document(const DocStructure& predicted, const DocStructure& ground_truth,
                         double iou_threshold,
                         std::map<std::string, CategoryPool>& pools,
                         std::map<std::string, RelationScore>& relations) {
  std::set<std::string> categories;
  std::map<std::string, std::vector<Entity>> preds_by_cat, gt_by_cat;
  for (const Entity& e : predicted.entities) {
    const std::string cat{to_string(e.category)};
    preds_by_cat[cat].push_back(e);
    categories.insert(cat);
  }
  for (const Entity& e : ground_truth.entities) {
    const std::string cat{to_string(e.category)};
    gt_by_cat[cat].push_back(e);
    categories.insert(cat);
  }

  std::map<std::string, std::string> pred_to_gt;
  for (const std::string& cat : categories) {
    const auto& preds = preds_by_cat[cat];
    const auto& gts = gt_by_cat[cat];
    const MatchResult match = match_entities(preds, gts, iou_threshold);

    CategoryPool& pool = pools[cat];
    pool.num_gt += static_cast<int>(gts.size());
    pool.num_pred += static_cast<int>(preds.size());
    pool.num_tp += static_cast<int>(match.true_positives.size());

    std::set<std::string> tp_ids;
    for (const MatchedPair& tp : match.true_positives) {
      tp_ids.insert(tp.pred_id);
      pred_to_gt[tp.pred_id] = tp.gt_id;
    }
    for (const Entity& p : preds)
      pool.detections.push_back({p.confidence.value_or(1.0), tp_ids.count(p.id) > 0});
  }

  // Relation triples compare through the entity matching: a predicted edge
  // counts when both endpoints matched and the mapped triple exists in the
  // ground truth (each ground-truth edge claimable once).
  auto relation_key = [](const std::string& s, const std::string& o, RelationType t) {
    return std::make_tuple(s, o, static_cast<int>(t));
  };
  std::map<std::tuple<std::string, std::string, int>, int> gt_edges;
  for (const Relation& r : ground_truth.relations)
    ++gt_edges[relation_key(r.subject, r.object, r.type)];

  auto bump = [&](RelationType t, bool tp) {
    const std::string name{to_string(t)};
    if (tp) {
      ++relations[name].tp;
      ++relations["all"].tp;
    } else {
      ++relations[name].fp;
      ++relations["all"].fp;
    }
  };
  for (const Relation& r : predicted.relations) {
    const auto s = pred_to_gt.find(r.subject);
    const auto o = pred_to_gt.find(r.object);
    bool matched = false;
    if (s != pred_to_gt.end() && o != pred_to_gt.end()) {
      const auto key = relation_key(s->second, o->second, r.type);
      auto it = gt_edges.find(key);
      if (it != gt_edges.end() && it->second > 0) {
        --it->second;
        matched = true;
      }
    }
    bump(r.type, matched);
  }
  for (const auto& [key, remaining] : gt_edges) {
    if (remaining <= 0) continue;
    const std::string name{to_string(static_cast<RelationType>(std::get<2>(key)))};
    relations[name].fn += remaining;
    relations["all"].fn += remaining;
  }
}

EvalReport finish_report(double iou_threshold, bool eleven_point,
                         std::map<std::string, CategoryPool>& pools,
                         std::map<std::string, RelationScore> relations) {
  EvalReport report;
  report.iou_threshold = iou_threshold;

  double ap_sum = 0.0;
  int ap_count = 0;
  for (auto& [cat, pool] : pools) {
    CategoryScore score;
    score.num_gt = pool.num_gt;
    score.num_pred = pool.num_pred;
    score.num_tp = pool.num_tp;
    if (pool.num_gt > 0) {
      score.ap = average_precision(std::move(pool.detections), pool.num_gt, eleven_point);
      ap_sum += score.ap;
      ++ap_count;
    } else {
      report.predictions_without_gt.push_back(cat);
    }
    report.per_category[cat] = score;
  }
  report.mean_ap = ap_count > 0 ? ap_sum / ap_count : 0.0;

  // Ensure all three rows exist even when a relation type never occurs.
  relations["parent_of"];
  relations["followed_by"];
  relations["all"];
  for (auto& [name, score] : relations) {
    const int pred_total = score.tp + score.fp;
    const int gt_total = score.tp + score.fn;
    score.precision = pred_total > 0
                          ? static_cast<double>(score.tp) / static_cast<double>(pred_total)
                          : 0.0;
    score.recall = gt_total > 0
                       ? static_cast<double>(score.tp) / static_cast<double>(gt_total)
                       : 0.0;
    score.f1 = score.precision + score.recall > 0.0
                   ? 2.0 * score.precision * score.recall /
                         (score.precision + score.recall)
                   : 0.0;
  }
  report.relation_scores = std::move(relations);
  return report;
}

}  // namespace

EvalReport evaluate(const DocStructure& predicted, const DocStructure& ground_truth,
                    double iou_threshold, bool eleven_point) {
  std::map<std::string, CategoryPool> pools;
  std::map<std::string, RelationScore> relations;
  accumulate_document(predicted, ground_truth, iou_threshold, pools, relations);
  return finish_report(iou_threshold, eleven_point, pools, std::move(relations));
}

EvalReport evaluate_corpus(
    std::span<const std::pair<DocStructure, DocStructure>> documents,
    double iou_threshold, bool eleven_point) {
  std::map<std::string, CategoryPool> pools;
  std::map<std::string, RelationScore> relations;
  for (const auto& [predicted, ground_truth] : documents)
    accumulate_document(predicted, ground_truth, iou_threshold, pools, relations);
  return finish_report(iou_threshold, eleven_point, pools, std::move(relations));
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "mAP@%.2f: %.2f\n", report.iou_threshold,
                report.mean_ap);
  out += line;

  std::snprintf(line, sizeof(line), "%-20s %8s %6s %6s %6s\n", "category", "AP", "gt",
                "pred", "tp");
  out += line;
  for (const auto& [cat, score] : report.per_category) {
    if (score.num_gt == 0) continue;
    std::snprintf(line, sizeof(line), "%-20s %8.2f %6d %6d %6d\n", cat.c_str(),
                  score.ap, score.num_gt, score.num_pred, score.num_tp);
    out += line;
  }
  if (!report.predictions_without_gt.empty()) {
    out += "predicted without ground truth:";
    for (const std::string& cat : report.predictions_without_gt) out += " " + cat;
    out += "\n";
  }

  std::snprintf(line, sizeof(line), "%-20s %8s %8s %8s %6s %6s %6s\n", "relations",
                "P", "R", "F1", "tp", "fp", "fn");
  out += line;
  for (const char* name : {"parent_of", "followed_by", "all"}) {
    const auto it = report.relation_scores.find(name);
    if (it == report.relation_scores.end()) continue;
    const RelationScore& s = it->second;
    std::snprintf(line, sizeof(line), "%-20s %8.3f %8.3f %8.3f %6d %6d %6d\n", name,
                  s.precision, s.recall, s.f1, s.tp, s.fp, s.fn);
    out += line;
  }
  return out;
}

}  // namespace docstruct
