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

#include "osdet/detector.hpp"

#include <string>

#include "osdet/geometry.hpp"
#include "osdet/metrics.hpp"
#include "osdet/scoring.hpp"

namespace osdet {
namespace {

void check_width(const ToyDetector& d, const Eigen::VectorXd& x) {
  if (x.size() != d.objectness_weights.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature width " + std::to_string(x.size()) + " but detector expects " +
                    std::to_string(d.objectness_weights.size()));
  }
}

}  // namespace

ToyDetector ToyDetector::zeros(LabelSpace labels, int feature_dim) {
  ToyDetector d;
  const int width = labels.logit_width();
  d.labels = std::move(labels);
  d.objectness_weights = Eigen::VectorXd::Zero(feature_dim);
  d.classifier_weights = Eigen::MatrixXd::Zero(width, feature_dim);
  d.classifier_bias = Eigen::VectorXd::Zero(width);
  return d;
}

bool operator==(const ToyDetector& a, const ToyDetector& b) {
  auto same = [](const auto& x, const auto& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
  };
  return a.labels == b.labels && same(a.objectness_weights, b.objectness_weights) &&
         a.objectness_bias == b.objectness_bias &&
         same(a.classifier_weights, b.classifier_weights) &&
         same(a.classifier_bias, b.classifier_bias) && a.tau == b.tau &&
         a.trace == b.trace;
}

double objectness_forward(const ToyDetector& detector, const Eigen::VectorXd& features) {
  check_width(detector, features);
  return sigmoid(detector.objectness_weights.dot(features) + detector.objectness_bias);
}

Eigen::VectorXd classifier_forward(const ToyDetector& detector,
                                   const Eigen::VectorXd& features) {
  check_width(detector, features);
  return detector.classifier_weights * features + detector.classifier_bias;
}

GradientOracle gradient_oracle(const ToyDetector& detector) {
  const Eigen::Index closed = detector.labels.num_known() + 1;
  Eigen::MatrixXd weights = detector.classifier_weights.topRows(closed);
  Eigen::VectorXd bias = detector.classifier_bias.head(closed);
  return GradientOracle{[weights, bias](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd s = weights * x + bias;
    const Eigen::VectorXd p = softmax(s);
    const Eigen::Index top = argmax(s);
    return weights.row(top).transpose() - weights.transpose() * p;
  }};
}

PerturbableModel perturbable_model(const ToyDetector& detector) {
  return PerturbableModel{
      [&detector](const Eigen::VectorXd& x) { return classifier_forward(detector, x); },
      gradient_oracle(detector)};
}

std::vector<RegionProposal> infer_image(const ToyDetector& detector,
                                        const SceneImage& image, bool classify) {
  std::vector<RegionProposal> out;
  out.reserve(image.regions.size());
  for (const auto& region : image.regions) {
    RegionProposal p;
    p.box = region.box;
    p.features = region.features;
    p.objectness = objectness_forward(detector, region.features);
    if (classify) p.logits = classifier_forward(detector, region.features);
    out.push_back(std::move(p));
  }
  return out;
}

std::pair<std::optional<double>, std::optional<double>> avg_obj_by_group(
    const ToyDetector& detector, std::span<const SceneImage> images,
    double iou_threshold) {
  const ClassId unknown = detector.labels.unknown_id();
  std::vector<double> known_scores;
  std::vector<double> unknown_scores;
  for (const auto& image : images) {
    for (const auto& region : image.regions) {
      std::optional<ClassId> owner;
      double best = iou_threshold;
      for (const auto& t : image.truths) {
        const double overlap = iou(region.box, t.box);
        if (overlap >= best) {
          best = overlap;
          owner = t.class_id;
        }
      }
      if (!owner) continue;
      const double w = objectness_forward(detector, region.features);
      (*owner == unknown ? unknown_scores : known_scores).push_back(w);
    }
  }
  std::pair<std::optional<double>, std::optional<double>> out;
  if (!known_scores.empty()) out.first = avg_obj(known_scores);
  if (!unknown_scores.empty()) out.second = avg_obj(unknown_scores);
  return out;
}

}  // namespace osdet
