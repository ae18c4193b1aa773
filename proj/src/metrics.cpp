/* Copyright 2026 The osdet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "osdet/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "osdet/geometry.hpp"

namespace osdet {

ConfusionCounts confusion_counts(std::span<const Detection> detections,
                                 std::span<const GroundTruthObject> truths,
                                 const LabelSpace& space, double iou_threshold) {
  check_iou_threshold(iou_threshold);
  const ClassId unknown = space.unknown_id();
  for (const auto& d : detections) check_detection(d, space);

  std::vector<GroundTruthObject> unknown_truths;
  for (const auto& t : truths) {
    if (t.class_id == unknown) unknown_truths.push_back(t);
  }

  ConfusionCounts counts;
  for (ClassId cls = 0; cls < space.num_known(); ++cls) {
    std::vector<Detection> dets;
    std::vector<GroundTruthObject> gts;
    for (const auto& d : detections) {
      if (d.predicted_class == cls) dets.push_back(d);
    }
    if (dets.empty()) continue;
    for (const auto& t : truths) {
      if (t.class_id == cls) gts.push_back(t);
    }
    const MatchResult m = match_greedy(dets, gts, iou_threshold);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (m.detection_to_truth[i]) {
        ++counts.tp_c;
      } else if (max_iou(dets[i].box, unknown_truths) >= iou_threshold) {
        ++counts.fp_o;
      } else {
        ++counts.fp_c;
      }
    }
  }

  std::vector<Detection> unknown_dets;
  for (const auto& d : detections) {
    if (d.predicted_class == unknown) unknown_dets.push_back(d);
  }
  const MatchResult m = match_greedy(unknown_dets, unknown_truths, iou_threshold);
  for (const auto& assigned : m.detection_to_truth) {
    if (assigned) {
      ++counts.tp_o;
    } else {
      ++counts.fp_o;
    }
  }
  for (bool matched : m.truth_matched) {
    if (!matched) ++counts.fn_o;
  }
  return counts;
}

std::optional<double> wilderness_impact(const ConfusionCounts& c) {
  const double tp_c = static_cast<double>(c.tp_c);
  const double fp_c = static_cast<double>(c.fp_c);
  const double tp_o = static_cast<double>(c.tp_o);
  const double fp_o = static_cast<double>(c.fp_o);
  if (tp_c + fp_c == 0.0 || tp_c + tp_o == 0.0) return std::nullopt;
  return tp_c / (tp_c + fp_c) * ((tp_c + fp_c + tp_o + fp_o) / (tp_c + tp_o)) - 1.0;
}

std::optional<double> wi_no_rejection(const ConfusionCounts& c) {
  const double denom = static_cast<double>(c.tp_c + c.fp_c);
  if (denom == 0.0) return std::nullopt;
  return static_cast<double>(c.fp_o) / denom;
}

UnknownPrf unknown_prf(const ConfusionCounts& c) {
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  UnknownPrf out;
  out.recall = ratio(c.tp_o, c.tp_o + c.fn_o);
  out.precision = ratio(c.tp_o, c.tp_o + c.fp_o);
  const double sum = out.recall + out.precision;
  out.f1 = sum == 0.0 ? 0.0 : 2.0 * out.recall * out.precision / sum;
  return out;
}

namespace {

std::vector<std::size_t> rank(std::span<const RankedOutcome> outcomes) {
  std::vector<double> conf;
  conf.reserve(outcomes.size());
  for (const auto& o : outcomes) conf.push_back(o.confidence);
  return confidence_order(conf);
}

}  // namespace

std::vector<PrPoint> pr_curve(std::span<const RankedOutcome> outcomes,
                              std::size_t num_truths) {
  std::vector<PrPoint> points;
  points.reserve(outcomes.size());
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t i : rank(outcomes)) {
    ++seen;
    if (outcomes[i].true_positive) ++tp;
    points.push_back({num_truths == 0 ? 0.0 : static_cast<double>(tp) / num_truths,
                      static_cast<double>(tp) / static_cast<double>(seen)});
  }
  return points;
}

std::optional<double> average_precision(std::span<const RankedOutcome> outcomes,
                                        std::size_t num_truths) {
  if (num_truths == 0) return std::nullopt;
  const auto order = rank(outcomes);
  // Precision at each rank, then a backward running max gives the
  // interpolated envelope; each true positive adds 1/num_truths of recall.
  std::vector<double> precision(order.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (outcomes[order[k]].true_positive) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
  }
  double envelope = 0.0;
  double area = 0.0;
  for (std::size_t k = order.size(); k-- > 0;) {
    envelope = std::max(envelope, precision[k]);
    if (outcomes[order[k]].true_positive) area += envelope;
  }
  return area / static_cast<double>(num_truths);
}

std::vector<RankedOutcome> class_outcomes(std::span<const ImageEval> images,
                                          ClassId cls, double iou_threshold,
                                          std::size_t* num_truths) {
  std::vector<RankedOutcome> outcomes;
  std::size_t truths_total = 0;
  for (const auto& image : images) {
    std::vector<Detection> dets;
    std::vector<GroundTruthObject> gts;
    for (const auto& d : image.detections) {
      if (d.predicted_class == cls) dets.push_back(d);
    }
    for (const auto& t : image.truths) {
      if (t.class_id == cls) gts.push_back(t);
    }
    truths_total += gts.size();
    if (dets.empty()) continue;
    const MatchResult m = match_greedy(dets, gts, iou_threshold);
    for (std::size_t i = 0; i < dets.size(); ++i) {
      outcomes.push_back({dets[i].confidence, m.detection_to_truth[i].has_value()});
    }
  }
  if (num_truths) *num_truths = truths_total;
  return outcomes;
}

std::optional<double> average_precision(std::span<const ImageEval> images,
                                        ClassId cls, double iou_threshold) {
  std::size_t num_truths = 0;
  const auto outcomes = class_outcomes(images, cls, iou_threshold, &num_truths);
  return average_precision(outcomes, num_truths);
}

double avg_obj(std::span<const double> fg_probabilities) {
  if (fg_probabilities.empty()) {
    throw Error(ErrorCode::kEmptySet, "no foreground proposals to average");
  }
  double sum = 0.0;
  for (double p : fg_probabilities) sum += p;
  return sum / static_cast<double>(fg_probabilities.size());
}

std::optional<double> mean_average_precision(std::span<const ClassAp> per_class) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& c : per_class) {
    if (c.ap) {
      sum += *c.ap;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

EvaluationReport build_report(const ConfusionCounts& counts,
                              std::vector<ClassAp> per_class_ap,
                              std::optional<double> avg_obj_known,
                              std::optional<double> avg_obj_unknown,
                              const ReportContext& context) {
  EvaluationReport r;
  r.training_mode = context.training_mode;
  r.rejection = context.rejection;
  r.scenario_hash = context.scenario_hash;
  r.iou_threshold = context.iou_threshold;
  r.config = context.config;

  if (auto m = mean_average_precision(per_class_ap)) r.map_percent = 100.0 * *m;
  r.wi_no_rej = wi_no_rejection(counts);
  r.wi = wilderness_impact(counts);
  const UnknownPrf prf = unknown_prf(counts);
  r.u_recall_percent = 100.0 * prf.recall;
  r.u_precision_percent = 100.0 * prf.precision;
  r.u_f1_percent = 100.0 * prf.f1;
  r.per_class_ap = std::move(per_class_ap);
  r.avg_obj_known = avg_obj_known;
  r.avg_obj_unknown = avg_obj_unknown;
  r.counts = counts;
  return r;
}

namespace {

std::string cell(std::optional<double> v, double scale) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *v * scale);
  return buf;
}

}  // namespace

std::string render_table(std::span<const EvaluationReport> reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-10s %8s %10s %8s %9s %12s %7s\n",
                "Training", "Rejection", "mAP%", "WI_no_rej", "WI", "U_Recall",
                "U_Precision", "U_F1");
  os << line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof(line), "%-10s %-10s %8s %10s %8s %9s %12s %7s\n",
                  r.training_mode.c_str(), r.rejection.c_str(),
                  cell(r.map_percent, 1.0).c_str(), cell(r.wi_no_rej, 100.0).c_str(),
                  cell(r.wi, 100.0).c_str(), cell(r.u_recall_percent, 1.0).c_str(),
                  cell(r.u_precision_percent, 1.0).c_str(),
                  cell(r.u_f1_percent, 1.0).c_str());
    os << line;
  }
  return os.str();
}

}  // namespace osdet
