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
#include <span>
#include <vector>

#include "osdet/types.hpp"

namespace osdet {

inline constexpr double kForegroundIou = 0.7;
inline constexpr double kPseudoLabelMaxIou = 0.3;
inline constexpr double kDefaultLambda = 1.0;

/// Data-derived objectness threshold: value = mu + lambda * sigma, with mu
/// and sigma the mean and population standard deviation of foreground-RoI
/// objectness.
struct TauObj {
  double value = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = kDefaultLambda;
  std::size_t sample_count = 0;

  friend bool operator==(const TauObj&, const TauObj&) = default;
};

struct PseudoLabel {
  RegionProposal region;
  std::size_t proposal_index = 0;
  ClassId assigned_class = 0;
  double max_gt_iou = 0.0;
  double objectness = 0.0;
};

/// Indices (ascending) of the foreground RoIs: for each truth the proposal
/// with the highest positive IoU, plus every proposal overlapping some truth
/// by more than 0.7. Throws kEmptyTruths for an empty truth list.
std::vector<std::size_t> select_foreground_rois(
    std::span<const RegionProposal> proposals,
    std::span<const GroundTruthObject> truths);

/// Throws kEmptyForegroundSet for an empty list. The sum runs over the
/// sorted scores so the result does not depend on collection order.
TauObj compute_tau_obj(std::span<const double> fg_objectness,
                       double lambda = kDefaultLambda);

/// Proposals scoring above tau whose IoU with every annotated truth is at
/// most 0.3, relabelled as `unknown_id`.
std::vector<PseudoLabel> generate_pseudo_labels(
    std::span<const RegionProposal> proposals,
    std::span<const GroundTruthObject> annotated_truths, const TauObj& tau,
    ClassId unknown_id);

}  // namespace osdet
