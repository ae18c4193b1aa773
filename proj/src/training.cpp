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

#include "osdet/training.hpp"

#include <cmath>
#include <sstream>

#include "osdet/geometry.hpp"
#include "osdet/rng.hpp"

namespace osdet {

const char* to_string(TrainingMode mode) {
  return mode == TrainingMode::kUnkad ? "unkad" : "standard";
}

TrainingMode parse_training_mode(const std::string& name) {
  if (name == "unkad") return TrainingMode::kUnkad;
  if (name == "standard") return TrainingMode::kStandard;
  throw Error(ErrorCode::kInvalidArgument, "unknown training mode '" + name + "'");
}

void TrainConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(learning_rate >= 0.0 && std::isfinite(learning_rate),
          "train.learning_rate must be finite and >= 0");
  for (int it : iterations) require(it >= 1, "train.iterations must all be >= 1");
  require(batch_size >= 1, "train.batch_size must be >= 1");
  require(std::isfinite(lambda), "train.lambda must be finite");
  require(trace_every >= 1, "train.trace_every must be >= 1");
}

RegionTable stack_regions(std::span<const SceneImage> images) {
  std::size_t rows = 0;
  Eigen::Index dim = 0;
  for (const auto& image : images) {
    rows += image.regions.size();
    if (!image.regions.empty()) dim = image.regions.front().features.size();
  }
  RegionTable table;
  table.features.resize(static_cast<Eigen::Index>(rows), dim);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < images[i].regions.size(); ++j, ++r) {
      const auto& f = images[i].regions[j].features;
      if (f.size() != dim) {
        throw Error(ErrorCode::kDimensionMismatch, "regions disagree on feature width");
      }
      table.features.row(r) = f.transpose();
      table.image_index.push_back(i);
      table.region_index.push_back(j);
    }
  }
  return table;
}

BoxesPerImage annotated_boxes(std::span<const SceneImage> images) {
  BoxesPerImage out(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& t : images[i].truths) {
      if (t.visibility == Visibility::kAnnotated) out[i].push_back(t.box);
    }
  }
  return out;
}

namespace {

double best_overlap(const Box& box, const std::vector<Box>& boxes, std::size_t* index) {
  double best = 0.0;
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    const double overlap = iou(box, boxes[k]);
    if (overlap > best) {
      best = overlap;
      if (index) *index = k;
    }
  }
  return best;
}

void check_finite(double loss, int step, std::size_t iteration) {
  if (!std::isfinite(loss)) {
    std::ostringstream os;
    os << "training loss became non-finite at step " << step << ", iteration "
       << iteration << "; lower the learning rate";
    throw Error(ErrorCode::kDivergence, os.str());
  }
}

/// Shared descent loop. `sample` fills a mini-batch of row indices;
/// `loss_on_all` evaluates the full training objective for the trace.
template <typename SampleFn, typename LossFn, typename UpdateFn>
void run_descent(const TrainConfig& config, int step, std::vector<TracePoint>& trace,
                 SampleFn&& sample, LossFn&& loss_on_all, UpdateFn&& update) {
  Rng rng(derive_seed(config.seed, {static_cast<std::uint64_t>(step)}));
  const int iterations = config.iterations[static_cast<std::size_t>(step - 1)];

  auto record = [&](std::size_t iteration) {
    const double loss = loss_on_all();
    check_finite(loss, step, iteration);
    trace.push_back({step, iteration, loss});
  };

  std::vector<std::size_t> picked(static_cast<std::size_t>(config.batch_size));
  for (int it = 0; it < iterations; ++it) {
    if (it % config.trace_every == 0) record(static_cast<std::size_t>(it));
    sample(rng, picked);
    update(picked);
  }
  record(static_cast<std::size_t>(iterations));
}

std::size_t pick(Rng& rng, const std::vector<std::size_t>& rows) {
  return rows[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(rows.size()) - 1))];
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& features, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

}  // namespace

std::vector<int> objectness_targets(std::span<const SceneImage> images,
                                    const BoxesPerImage& positives) {
  std::vector<int> targets;
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& region : images[i].regions) {
      const double overlap = best_overlap(region.box, positives[i], nullptr);
      if (overlap >= kObjectnessPositiveIou) {
        targets.push_back(1);
      } else if (overlap < kObjectnessNegativeIou) {
        targets.push_back(0);
      } else {
        targets.push_back(kIgnore);
      }
    }
  }
  return targets;
}

std::vector<int> classifier_targets(std::span<const SceneImage> images,
                                    const BoxesPerImage& pseudo_boxes,
                                    const LabelSpace& labels) {
  std::vector<int> targets;
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::vector<Box> boxes;
    std::vector<ClassId> classes;
    for (const auto& t : images[i].truths) {
      if (t.visibility != Visibility::kAnnotated) continue;
      boxes.push_back(t.box);
      classes.push_back(t.class_id);
    }
    for (const auto& region : images[i].regions) {
      std::size_t best = 0;
      if (best_overlap(region.box, boxes, &best) >= kClassifierPositiveIou) {
        targets.push_back(classes[best]);
      } else if (labels.has_unknown_class() && i < pseudo_boxes.size() &&
                 best_overlap(region.box, pseudo_boxes[i], nullptr) >=
                     kClassifierPositiveIou) {
        targets.push_back(labels.unknown_id());
      } else {
        targets.push_back(labels.background_id());
      }
    }
  }
  return targets;
}

void train_objectness(ToyDetector& detector, const RegionTable& table,
                      std::span<const int> targets, const TrainConfig& config,
                      int step) {
  config.validate();
  if (targets.size() != static_cast<std::size_t>(table.features.rows())) {
    throw Error(ErrorCode::kDimensionMismatch, "one objectness target per region expected");
  }
  bool any_positive = false;
  for (int t : targets) any_positive = any_positive || t == 1;
  if (!any_positive) {
    throw Error(ErrorCode::kInvalidArgument, "objectness training needs positives");
  }
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] == 1) positives.push_back(i);
    if (targets[i] == 0) negatives.push_back(i);
  }
  auto target_vector = [&](const std::vector<std::size_t>& rows) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y(static_cast<Eigen::Index>(i)) = targets[rows[i]];
    }
    return y;
  };
  auto mean_loss = [&](const std::vector<std::size_t>& rows) {
    return logistic_loss<double>(detector.objectness_weights, detector.objectness_bias,
                                 gather(table.features, rows), target_vector(rows))
        .loss;
  };
  // Batches are half positives, half negatives (negatives drawn from the
  // whole pool), so the traced objective is the class-balanced loss.
  run_descent(
      config, step, detector.trace,
      [&](Rng& rng, std::vector<std::size_t>& batch) {
        for (std::size_t k = 0; k < batch.size(); ++k) {
          const bool positive = negatives.empty() || k % 2 == 0;
          batch[k] = pick(rng, positive ? positives : negatives);
        }
      },
      [&] {
        const double pos = mean_loss(positives);
        return negatives.empty() ? pos : 0.5 * pos + 0.5 * mean_loss(negatives);
      },
      [&](const std::vector<std::size_t>& rows) {
        const auto g = logistic_loss<double>(detector.objectness_weights,
                                             detector.objectness_bias,
                                             gather(table.features, rows), target_vector(rows));
        detector.objectness_weights -= config.learning_rate * g.grad_weights;
        detector.objectness_bias -= config.learning_rate * g.grad_bias;
      });
}

void train_classifier(ToyDetector& detector, const RegionTable& table,
                      std::span<const int> targets, const TrainConfig& config,
                      int step) {
  config.validate();
  if (targets.size() != static_cast<std::size_t>(table.features.rows())) {
    throw Error(ErrorCode::kDimensionMismatch, "one class target per region expected");
  }
  if (targets.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "classifier training needs labelled regions");
  }
  for (int t : targets) {
    if (t < 0 || t >= detector.labels.logit_width()) {
      throw Error(ErrorCode::kLabelSpaceViolation,
                  "class target " + std::to_string(t) + " lies outside the label space");
    }
  }
  std::vector<std::size_t> all(targets.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto labels_of = [&](const std::vector<std::size_t>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(targets[r]);
    return out;
  };
  run_descent(
      config, step, detector.trace,
      [&](Rng& rng, std::vector<std::size_t>& batch) {
        for (auto& b : batch) b = pick(rng, all);
      },
      [&] {
        return softmax_cross_entropy<double>(detector.classifier_weights,
                                             detector.classifier_bias, table.features,
                                             targets)
            .loss;
      },
      [&](const std::vector<std::size_t>& rows) {
        const auto y = labels_of(rows);
        const auto g = softmax_cross_entropy<double>(detector.classifier_weights,
                                                     detector.classifier_bias,
                                                     gather(table.features, rows), y);
        detector.classifier_weights -= config.learning_rate * g.grad_weights;
        detector.classifier_bias -= config.learning_rate * g.grad_bias;
      });
}

std::size_t PseudoLabelPass::total() const {
  std::size_t n = 0;
  for (const auto& image : images) n += image.labels.size();
  return n;
}

PseudoLabelPass pseudo_label_pass(const ToyDetector& detector,
                                  std::span<const SceneImage> images, double lambda,
                                  int pass) {
  std::vector<std::vector<RegionProposal>> scored(images.size());
  std::vector<std::vector<GroundTruthObject>> annotated(images.size());
  std::vector<double> fg_objectness;
  for (std::size_t i = 0; i < images.size(); ++i) {
    scored[i] = infer_image(detector, images[i], false);
    annotated[i] = annotated_only(images[i].truths);
    if (annotated[i].empty()) continue;
    for (std::size_t p : select_foreground_rois(scored[i], annotated[i])) {
      fg_objectness.push_back(scored[i][p].objectness);
    }
  }
  PseudoLabelPass out;
  out.pass = pass;
  out.tau = compute_tau_obj(fg_objectness, lambda);
  for (std::size_t i = 0; i < images.size(); ++i) {
    out.images.push_back({images[i].image_id,
                          generate_pseudo_labels(scored[i], annotated[i], out.tau,
                                                 detector.labels.unknown_id())});
  }
  return out;
}

namespace {

BoxesPerImage pseudo_boxes(const PseudoLabelPass& pass) {
  BoxesPerImage out(pass.images.size());
  for (std::size_t i = 0; i < pass.images.size(); ++i) {
    for (const auto& label : pass.images[i].labels) out[i].push_back(label.region.box);
  }
  return out;
}

BoxesPerImage merge(BoxesPerImage a, const BoxesPerImage& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    a[i].insert(a[i].end(), b[i].begin(), b[i].end());
  }
  return a;
}

}  // namespace

TrainResult run_four_step(const Scenario& scenario, const TrainConfig& config) {
  config.validate();
  const bool unkad = config.mode == TrainingMode::kUnkad;
  const std::span<const SceneImage> train = scenario.train;
  const LabelSpace labels = scenario_label_space(scenario.config, unkad);

  TrainResult result;
  ToyDetector det = ToyDetector::zeros(labels, scenario.config.feature_dim);
  const RegionTable table = stack_regions(train);
  const BoxesPerImage annotated = annotated_boxes(train);
  const BoxesPerImage none(train.size());

  train_objectness(det, table, objectness_targets(train, annotated), config, 1);
  PseudoLabelPass first = pseudo_label_pass(det, train, config.lambda, 1);
  det.tau = first.tau;
  result.after_step1 = det;

  const BoxesPerImage first_boxes = unkad ? pseudo_boxes(first) : none;
  train_classifier(det, table, classifier_targets(train, first_boxes, labels), config, 2);

  train_objectness(det, table, objectness_targets(train, merge(annotated, first_boxes)),
                   config, 3);
  PseudoLabelPass second = pseudo_label_pass(det, train, config.lambda, 2);
  det.tau = second.tau;

  const BoxesPerImage second_boxes = unkad ? pseudo_boxes(second) : none;
  train_classifier(det, table, classifier_targets(train, second_boxes, labels), config, 4);

  if (unkad) {
    result.audit.push_back(std::move(first));
    result.audit.push_back(std::move(second));
  }
  result.detector = std::move(det);
  return result;
}

}  // namespace osdet
