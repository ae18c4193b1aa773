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

#include "osdet/pipeline.hpp"

#include "osdet/io.hpp"
#include "osdet/geometry.hpp"
#include "osdet/parallel.hpp"

namespace osdet {

EvaluationReport score_detections(std::span<const ImageEval> images,
                                  const LabelSpace& labels,
                                  std::optional<double> avg_obj_known,
                                  std::optional<double> avg_obj_unknown,
                                  const ReportContext& context) {
  ConfusionCounts counts;
  for (const auto& image : images) {
    counts += confusion_counts(image.detections, image.truths, labels, context.iou_threshold);
  }
  std::vector<ClassAp> per_class;
  for (ClassId cls = 0; cls < labels.num_known(); ++cls) {
    std::size_t num_truths = 0;
    const auto outcomes = class_outcomes(images, cls, context.iou_threshold, &num_truths);
    per_class.push_back({cls, labels.known_classes()[static_cast<std::size_t>(cls)],
                         num_truths, average_precision(outcomes, num_truths)});
  }
  return build_report(counts, std::move(per_class), avg_obj_known, avg_obj_unknown, context);
}

EvaluationRun evaluate_split(const ToyDetector& detector,
                             std::span<const SceneImage> images,
                             const RejectionConfig& rejection,
                             const EvaluationOptions& options) {
  rejection.validate();
  check_iou_threshold(options.iou_threshold);
  const PerturbableModel model = perturbable_model(detector);
  const std::optional<double> tau =
      detector.tau ? std::optional<double>(detector.tau->value) : std::nullopt;

  EvaluationRun run;
  run.images.resize(images.size());
  std::vector<char> perturbed(images.size(), 0);
  parallel_for(images.size(), options.threads, [&](std::size_t i) {
    const auto proposals = infer_image(detector, images[i]);
    auto out = apply_rejection(proposals, rejection, detector.labels, tau, &model);
    run.images[i].detections = std::move(out.detections);
    run.images[i].truths = images[i].truths;
    perturbed[i] = out.odin_perturbation_applied ? 1 : 0;
  });
  for (const auto& image : images) run.image_ids.push_back(image.image_id);
  for (char p : perturbed) run.odin_perturbation_applied = run.odin_perturbation_applied || p;

  const auto [known_obj, unknown_obj] = avg_obj_by_group(detector, images);

  ReportContext context;
  context.training_mode = options.training_mode;
  context.rejection = to_string(rejection.strategy);
  context.scenario_hash = options.scenario_hash;
  context.iou_threshold = options.iou_threshold;
  context.config["rejection"] = io::to_json(rejection);
  context.config["iou_threshold"] = options.iou_threshold;
  context.config["tau_obj"] = detector.tau ? io::to_json(*detector.tau) : io::Json(nullptr);
  context.config["odin_perturbation_applied"] = run.odin_perturbation_applied;

  run.report = score_detections(run.images, detector.labels, known_obj, unknown_obj, context);
  return run;
}

}  // namespace osdet
