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

#include "osdet/pseudolabel.hpp"

#include <algorithm>
#include <cmath>

#include "osdet/geometry.hpp"

namespace osdet {

std::vector<std::size_t> select_foreground_rois(
    std::span<const RegionProposal> proposals,
    std::span<const GroundTruthObject> truths) {
  if (truths.empty()) {
    throw Error(ErrorCode::kEmptyTruths,
                "foreground selection needs at least one truth");
  }
  std::vector<bool> selected(proposals.size(), false);
  for (const auto& truth : truths) {
    std::size_t best = proposals.size();
    double best_iou = 0.0;
    for (std::size_t p = 0; p < proposals.size(); ++p) {
      const double overlap = iou(proposals[p].box, truth.box);
      if (overlap > best_iou) {
        best = p;
        best_iou = overlap;
      }
      if (overlap > kForegroundIou) selected[p] = true;
    }
    if (best < proposals.size()) selected[best] = true;
  }
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < proposals.size(); ++p) {
    if (selected[p]) out.push_back(p);
  }
  return out;
}

TauObj compute_tau_obj(std::span<const double> fg_objectness, double lambda) {
  if (fg_objectness.empty()) {
    throw Error(ErrorCode::kEmptyForegroundSet,
                "no foreground RoIs to derive the objectness threshold from");
  }
  if (!std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite");
  }
  std::vector<double> sorted(fg_objectness.begin(), fg_objectness.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  double sum = 0.0;
  for (double w : sorted) sum += w;
  const double mu = sum / n;

  double sq = 0.0;
  for (double w : sorted) sq += (w - mu) * (w - mu);
  const double sigma = std::sqrt(sq / n);

  return TauObj{mu + lambda * sigma, mu, sigma, lambda, sorted.size()};
}

std::vector<PseudoLabel> generate_pseudo_labels(
    std::span<const RegionProposal> proposals,
    std::span<const GroundTruthObject> annotated_truths, const TauObj& tau,
    ClassId unknown_id) {
  std::vector<PseudoLabel> out;
  for (std::size_t p = 0; p < proposals.size(); ++p) {
    const auto& region = proposals[p];
    if (!(region.objectness > tau.value)) continue;
    const double overlap = max_iou(region.box, annotated_truths);
    if (overlap > kPseudoLabelMaxIou) continue;
    out.push_back(PseudoLabel{region, p, unknown_id, overlap, region.objectness});
  }
  return out;
}

}  // namespace osdet
