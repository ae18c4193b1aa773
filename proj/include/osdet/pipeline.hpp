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

#include "osdet/detector.hpp"
#include "osdet/metrics.hpp"
#include "osdet/rejection.hpp"
#include "osdet/scenario.hpp"

namespace osdet {

struct EvaluationOptions {
  double iou_threshold = kDefaultMatchIou;
  int threads = 1;
  std::string training_mode;
  std::string scenario_hash;
};

struct EvaluationRun {
  std::vector<std::size_t> image_ids;
  std::vector<ImageEval> images;
  EvaluationReport report;
  bool odin_perturbation_applied = false;
};

/// Counts, per-class AP and the report for already-produced detections.
EvaluationReport score_detections(std::span<const ImageEval> images,
                                  const LabelSpace& labels,
                                  std::optional<double> avg_obj_known,
                                  std::optional<double> avg_obj_unknown,
                                  const ReportContext& context);

/// Inference, rejection and scoring over a split. Per-image work runs on
/// `options.threads` workers; the output does not depend on that number.
EvaluationRun evaluate_split(const ToyDetector& detector,
                             std::span<const SceneImage> images,
                             const RejectionConfig& rejection,
                             const EvaluationOptions& options);

}  // namespace osdet
