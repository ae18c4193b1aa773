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
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "osdet/pseudolabel.hpp"
#include "osdet/rejection.hpp"
#include "osdet/scenario.hpp"
#include "osdet/types.hpp"

namespace osdet {

struct TracePoint {
  int step = 0;
  std::size_t iteration = 0;
  double loss = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

/// Logistic objectness scorer plus a linear-softmax classification head,
/// both reading the region features directly.
struct ToyDetector {
  LabelSpace labels;
  Eigen::VectorXd objectness_weights;
  double objectness_bias = 0.0;
  Eigen::MatrixXd classifier_weights;  // logit_width x feature_dim
  Eigen::VectorXd classifier_bias;
  std::optional<TauObj> tau;
  std::vector<TracePoint> trace;

  static ToyDetector zeros(LabelSpace labels, int feature_dim);

  int feature_dim() const { return static_cast<int>(objectness_weights.size()); }

  friend bool operator==(const ToyDetector& a, const ToyDetector& b);
};

/// sigmoid(w.x + b).
double objectness_forward(const ToyDetector& detector, const Eigen::VectorXd& features);

/// Affine logits over the head's label space.
Eigen::VectorXd classifier_forward(const ToyDetector& detector,
                                   const Eigen::VectorXd& features);

/// Analytic input gradient of log max softmax over known classes and
/// background (unknown slot masked): W_top - sum_j p_j W_j.
GradientOracle gradient_oracle(const ToyDetector& detector);

PerturbableModel perturbable_model(const ToyDetector& detector);

/// Scores every region of an image: objectness always, logits when
/// `classify` is set.
std::vector<RegionProposal> infer_image(const ToyDetector& detector,
                                        const SceneImage& image, bool classify = true);

/// Mean objectness over proposals overlapping a known truth (first) and an
/// unknown truth (second) by at least `iou_threshold`, regardless of
/// visibility. Empty when a group has no proposals.
std::pair<std::optional<double>, std::optional<double>> avg_obj_by_group(
    const ToyDetector& detector, std::span<const SceneImage> images,
    double iou_threshold = 0.5);

}  // namespace osdet
