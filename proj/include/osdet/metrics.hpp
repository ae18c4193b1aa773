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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "osdet/types.hpp"

namespace osdet {

inline constexpr double kDefaultMatchIou = 0.5;

/// Open-set confusion counts. TP_c/FP_c are known-class outcomes, TP_o/FP_o
/// the unknown side, FN_o the unknown truths nobody found.
struct ConfusionCounts {
  std::size_t tp_c = 0;
  std::size_t fp_c = 0;
  std::size_t tp_o = 0;
  std::size_t fp_o = 0;
  std::size_t fn_o = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other) {
    tp_c += other.tp_c;
    fp_c += other.fp_c;
    tp_o += other.tp_o;
    fp_o += other.fp_o;
    fn_o += other.fn_o;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) {
    return a += b;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// One image worth of predictions and (all) ground truth.
struct ImageEval {
  std::vector<Detection> detections;
  std::vector<GroundTruthObject> truths;
};

/// Per-image counting. Known-class detections are matched greedily against
/// truths of their own class; leftovers overlapping an unknown truth by at
/// least the threshold are FP_o, the rest FP_c. Unknown-class detections are
/// matched against unknown truths; leftovers also count as FP_o.
ConfusionCounts confusion_counts(std::span<const Detection> detections,
                                 std::span<const GroundTruthObject> truths,
                                 const LabelSpace& space,
                                 double iou_threshold = kDefaultMatchIou);

/// Closed-set over open-set precision, minus one. Empty when either
/// precision is undefined.
std::optional<double> wilderness_impact(const ConfusionCounts& c);

/// FP_o / (TP_c + FP_c); empty on a zero denominator.
std::optional<double> wi_no_rejection(const ConfusionCounts& c);

struct UnknownPrf {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// Ratios in [0, 1]; every 0/0 is reported as 0.
UnknownPrf unknown_prf(const ConfusionCounts& c);

struct RankedOutcome {
  double confidence = 0.0;
  bool true_positive = false;
};

/// All-point interpolated AP over confidence-ranked outcomes (ties keep
/// input order). Empty when there are no truths.
std::optional<double> average_precision(std::span<const RankedOutcome> outcomes,
                                        std::size_t num_truths);

/// Ranked outcomes of class `cls` over all images after per-image greedy
/// matching; writes the number of truths of that class.
std::vector<RankedOutcome> class_outcomes(std::span<const ImageEval> images,
                                          ClassId cls, double iou_threshold,
                                          std::size_t* num_truths);

std::optional<double> average_precision(std::span<const ImageEval> images,
                                        ClassId cls,
                                        double iou_threshold = kDefaultMatchIou);

/// Precision/recall after each ranked detection.
struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};
std::vector<PrPoint> pr_curve(std::span<const RankedOutcome> outcomes,
                              std::size_t num_truths);

/// Mean foreground probability. Throws kEmptySet on an empty list.
double avg_obj(std::span<const double> fg_probabilities);

struct ClassAp {
  ClassId class_id = 0;
  std::string name;
  std::size_t num_truths = 0;
  std::optional<double> ap;

  friend bool operator==(const ClassAp&, const ClassAp&) = default;
};

/// Mean over classes that have truths.
std::optional<double> mean_average_precision(std::span<const ClassAp> per_class);

struct EvaluationReport {
  std::string training_mode;
  std::string rejection;
  std::string scenario_hash;
  double iou_threshold = kDefaultMatchIou;

  std::optional<double> map_percent;
  std::optional<double> wi_no_rej;
  std::optional<double> wi;
  double u_recall_percent = 0.0;
  double u_precision_percent = 0.0;
  double u_f1_percent = 0.0;

  std::vector<ClassAp> per_class_ap;
  std::optional<double> avg_obj_known;
  std::optional<double> avg_obj_unknown;
  ConfusionCounts counts;
  nlohmann::ordered_json config;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

struct ReportContext {
  std::string training_mode;
  std::string rejection;
  std::string scenario_hash;
  double iou_threshold = kDefaultMatchIou;
  nlohmann::ordered_json config;
};

EvaluationReport build_report(const ConfusionCounts& counts,
                              std::vector<ClassAp> per_class_ap,
                              std::optional<double> avg_obj_known,
                              std::optional<double> avg_obj_unknown,
                              const ReportContext& context);

/// Fixed-width table, one row per report, columns
/// Training | Rejection | mAP% | WI_no_rej | WI | U_Recall | U_Precision | U_F1.
/// WI columns are scaled by 100 like the percentage columns.
std::string render_table(std::span<const EvaluationReport> reports);

}  // namespace osdet
