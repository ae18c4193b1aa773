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
#include <vector>

#include "osdet/types.hpp"

namespace osdet {

/// Intersection over union with continuous (w*h) areas. Symmetric, 0 when
/// the boxes are disjoint.
template <typename Scalar>
Scalar iou(const BasicBox<Scalar>& a, const BasicBox<Scalar>& b) {
  using std::max;
  using std::min;
  const Scalar iw = max(Scalar(0), min(a.x_max, b.x_max) - max(a.x_min, b.x_min));
  const Scalar ih = max(Scalar(0), min(a.y_max, b.y_max) - max(a.y_min, b.y_min));
  const Scalar inter = iw * ih;
  if (inter <= Scalar(0)) return Scalar(0);
  return inter / (a.area() + b.area() - inter);
}

/// Largest IoU between `box` and any of `truths`; 0 for an empty list.
double max_iou(const Box& box, std::span<const GroundTruthObject> truths);

struct MatchResult {
  /// Index of the matched truth for each detection, in input order.
  std::vector<std::optional<std::size_t>> detection_to_truth;
  std::vector<bool> truth_matched;
};

/// One-to-one greedy matching. Detections are visited by descending
/// confidence (ties by ascending index); each takes the highest-IoU truth
/// that is still free and overlaps by at least `iou_threshold` (ties by
/// lowest truth index).
MatchResult match_greedy(std::span<const Box> detection_boxes,
                         std::span<const double> confidences,
                         std::span<const Box> truth_boxes,
                         double iou_threshold);

MatchResult match_greedy(std::span<const Detection> detections,
                         std::span<const GroundTruthObject> truths,
                         double iou_threshold);

/// Per-class greedy suppression: a detection is dropped when it overlaps a
/// kept, higher-ranked detection of the same class by more than the
/// threshold. Survivors keep their relative input order.
std::vector<Detection> nms(std::span<const Detection> detections,
                           double iou_threshold);

/// Descending confidence, ties by ascending index.
std::vector<std::size_t> confidence_order(std::span<const double> confidences);

void check_iou_threshold(double iou_threshold);

}  // namespace osdet
