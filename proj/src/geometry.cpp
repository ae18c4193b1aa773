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

#include "osdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace osdet {

void check_iou_threshold(double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "IoU threshold must lie in (0, 1), got " +
                    std::to_string(iou_threshold));
  }
}

double max_iou(const Box& box, std::span<const GroundTruthObject> truths) {
  double best = 0.0;
  for (const auto& t : truths) best = std::max(best, iou(box, t.box));
  return best;
}

std::vector<std::size_t> confidence_order(std::span<const double> confidences) {
  std::vector<std::size_t> order(confidences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidences[a] > confidences[b];
  });
  return order;
}

MatchResult match_greedy(std::span<const Box> detection_boxes,
                         std::span<const double> confidences,
                         std::span<const Box> truth_boxes,
                         double iou_threshold) {
  check_iou_threshold(iou_threshold);
  if (detection_boxes.size() != confidences.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "detection boxes and confidences differ in length");
  }
  MatchResult result;
  result.detection_to_truth.assign(detection_boxes.size(), std::nullopt);
  result.truth_matched.assign(truth_boxes.size(), false);

  for (std::size_t d : confidence_order(confidences)) {
    std::optional<std::size_t> best;
    double best_iou = iou_threshold;
    for (std::size_t t = 0; t < truth_boxes.size(); ++t) {
      if (result.truth_matched[t]) continue;
      const double overlap = iou(detection_boxes[d], truth_boxes[t]);
      // Strict '>' keeps the lowest index on equal IoU.
      if (overlap >= iou_threshold && (!best || overlap > best_iou)) {
        best = t;
        best_iou = overlap;
      }
    }
    if (best) {
      result.detection_to_truth[d] = best;
      result.truth_matched[*best] = true;
    }
  }
  return result;
}

MatchResult match_greedy(std::span<const Detection> detections,
                         std::span<const GroundTruthObject> truths,
                         double iou_threshold) {
  std::vector<Box> det_boxes;
  std::vector<double> confidences;
  det_boxes.reserve(detections.size());
  confidences.reserve(detections.size());
  for (const auto& d : detections) {
    det_boxes.push_back(d.box);
    confidences.push_back(d.confidence);
  }
  std::vector<Box> truth_boxes;
  truth_boxes.reserve(truths.size());
  for (const auto& t : truths) truth_boxes.push_back(t.box);
  return match_greedy(det_boxes, confidences, truth_boxes, iou_threshold);
}

std::vector<Detection> nms(std::span<const Detection> detections,
                           double iou_threshold) {
  check_iou_threshold(iou_threshold);
  std::vector<double> confidences;
  confidences.reserve(detections.size());
  for (const auto& d : detections) confidences.push_back(d.confidence);

  std::vector<bool> keep(detections.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t i : confidence_order(confidences)) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (detections[k].predicted_class == detections[i].predicted_class &&
          iou(detections[k].box, detections[i].box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      kept.push_back(i);
      keep[i] = true;
    }
  }
  std::vector<Detection> out;
  out.reserve(kept.size());
  for (std::size_t i = 0; i < detections.size(); ++i) {
    if (keep[i]) out.push_back(detections[i]);
  }
  return out;
}

}  // namespace osdet
