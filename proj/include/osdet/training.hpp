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

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "osdet/detector.hpp"
#include "osdet/pseudolabel.hpp"
#include "osdet/scenario.hpp"
#include "osdet/scoring.hpp"

namespace osdet {

enum class TrainingMode { kStandard, kUnkad };

const char* to_string(TrainingMode mode);
TrainingMode parse_training_mode(const std::string& name);

struct TrainConfig {
  TrainingMode mode = TrainingMode::kUnkad;
  double learning_rate = 0.1;
  std::array<int, 4> iterations{2000, 2000, 500, 500};
  int batch_size = 32;
  double lambda = kDefaultLambda;
  std::uint64_t seed = 0;
  /// Full-data loss is recorded every this many iterations (and at the end
  /// of each step).
  int trace_every = 50;

  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// IoU bands for turning regions into training targets.
inline constexpr double kObjectnessPositiveIou = 0.5;
inline constexpr double kObjectnessNegativeIou = 0.3;
inline constexpr double kClassifierPositiveIou = 0.5;
inline constexpr int kIgnore = -1;

template <typename Scalar>
struct LogisticLoss {
  Scalar loss{};
  Vector<Scalar> grad_weights;
  Scalar grad_bias{};
};

/// Mean binary cross-entropy of sigmoid(X w + b) against `targets` (0/1),
/// with its gradient (p - y) x averaged over rows.
template <typename Scalar>
LogisticLoss<Scalar> logistic_loss(const Vector<Scalar>& weights, Scalar bias,
                                   const Matrix<Scalar>& features,
                                   const Vector<Scalar>& targets) {
  using std::exp;
  using std::log1p;
  const Eigen::Index n = features.rows();
  const Vector<Scalar> z = (features * weights).array() + bias;
  Vector<Scalar> residual(n);
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // softplus(z) - y z, written to stay finite for large |z|.
    const Scalar zi = z(i);
    const Scalar softplus = zi > 0 ? zi + log1p(exp(-zi)) : log1p(exp(zi));
    loss += softplus - targets(i) * zi;
    residual(i) = sigmoid(zi) - targets(i);
  }
  LogisticLoss<Scalar> out;
  out.loss = loss / Scalar(n);
  out.grad_weights = features.transpose() * residual / Scalar(n);
  out.grad_bias = residual.sum() / Scalar(n);
  return out;
}

template <typename Scalar>
struct SoftmaxLoss {
  Scalar loss{};
  Matrix<Scalar> grad_weights;
  Vector<Scalar> grad_bias;
};

/// Mean softmax cross-entropy of W x + b over rows of `features`.
template <typename Scalar>
SoftmaxLoss<Scalar> softmax_cross_entropy(const Matrix<Scalar>& weights,
                                          const Vector<Scalar>& bias,
                                          const Matrix<Scalar>& features,
                                          std::span<const int> labels) {
  const Eigen::Index n = features.rows();
  const Matrix<Scalar> logits = (features * weights.transpose()).rowwise() + bias.transpose();
  Matrix<Scalar> residual(n, weights.rows());
  Scalar loss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector<Scalar> row = logits.row(i).transpose();
    loss += log_sum_exp(row) - row(labels[i]);
    residual.row(i) = softmax(row).transpose();
    residual(i, labels[i]) -= Scalar(1);
  }
  SoftmaxLoss<Scalar> out;
  out.loss = loss / Scalar(n);
  out.grad_weights = residual.transpose() * features / Scalar(n);
  out.grad_bias = residual.colwise().sum().transpose() / Scalar(n);
  return out;
}

/// Region features of a split stacked row-wise, image by image.
struct RegionTable {
  Eigen::MatrixXd features;
  std::vector<std::size_t> image_index;
  std::vector<std::size_t> region_index;
};

RegionTable stack_regions(std::span<const SceneImage> images);

/// Per-image positive boxes (annotated truths plus pseudo-labels).
using BoxesPerImage = std::vector<std::vector<Box>>;

BoxesPerImage annotated_boxes(std::span<const SceneImage> images);

/// 1 for regions overlapping a positive box by >= 0.5, 0 below 0.3,
/// kIgnore in between.
std::vector<int> objectness_targets(std::span<const SceneImage> images,
                                    const BoxesPerImage& positives);

/// Known class of the best annotated truth at IoU >= 0.5; otherwise the
/// unknown id when a pseudo-label box overlaps by >= 0.5 (and the head has an
/// unknown slot); otherwise background.
std::vector<int> classifier_targets(std::span<const SceneImage> images,
                                    const BoxesPerImage& pseudo_boxes,
                                    const LabelSpace& labels);

/// Seeded mini-batch gradient descent on binary cross-entropy. Throws
/// kDivergence on a non-finite loss.
void train_objectness(ToyDetector& detector, const RegionTable& table,
                      std::span<const int> targets, const TrainConfig& config,
                      int step);

/// Seeded mini-batch gradient descent on softmax cross-entropy.
void train_classifier(ToyDetector& detector, const RegionTable& table,
                      std::span<const int> targets, const TrainConfig& config,
                      int step);

struct ImagePseudoLabels {
  std::size_t image_id = 0;
  std::vector<PseudoLabel> labels;
};

struct PseudoLabelPass {
  int pass = 0;
  TauObj tau;
  std::vector<ImagePseudoLabels> images;

  std::size_t total() const;
};

/// Scores the split, derives tau_obj from the foreground RoIs of every image
/// with annotated truths, then pseudo-labels each image with that global
/// threshold.
PseudoLabelPass pseudo_label_pass(const ToyDetector& detector,
                                  std::span<const SceneImage> images,
                                  double lambda, int pass);

struct TrainResult {
  ToyDetector detector;
  ToyDetector after_step1;
  std::vector<PseudoLabelPass> audit;
};

/// Alternating schedule: objectness (1), pseudo-labels, classifier (2),
/// objectness with pseudo-unknowns as positives (3), pseudo-labels again,
/// classifier refresh (4). Standard mode trains the same steps without
/// pseudo-labels and without the unknown slot.
TrainResult run_four_step(const Scenario& scenario, const TrainConfig& config);

}  // namespace osdet
