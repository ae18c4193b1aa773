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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "osdet/pseudolabel.hpp"
#include "osdet/scoring.hpp"
#include "osdet/types.hpp"

namespace osdet {

enum class RejectionStrategy { kNone, kDirect, kMsp, kEnergy, kOdin };

/// kLiteral flags E <= tau_energy exactly as the energy rule is written.
/// kNegativeEnergy scores -E (higher for known samples) and flags
/// -E <= -tau_energy.
enum class EnergyDirection { kLiteral, kNegativeEnergy };

const char* to_string(RejectionStrategy strategy);
RejectionStrategy parse_strategy(const std::string& name);
const char* to_string(EnergyDirection direction);
EnergyDirection parse_energy_direction(const std::string& name);

struct RejectionConfig {
  RejectionStrategy strategy = RejectionStrategy::kNone;
  double tau_msp = 0.5;
  double tau_energy = -3.0;
  double tau_odin = 0.4;
  double energy_temperature = 1.0;
  double odin_temperature = 5.0;
  double epsilon = 0.01;
  EnergyDirection energy_direction = EnergyDirection::kNegativeEnergy;
  double nms_iou = 0.5;

  /// Threshold the energy score is compared against under the chosen
  /// direction.
  double energy_threshold() const {
    return energy_direction == EnergyDirection::kLiteral ? tau_energy : -tau_energy;
  }

  void validate() const;

  friend bool operator==(const RejectionConfig&, const RejectionConfig&) = default;
};

/// Input gradient of log(max softmax) over known classes and background.
/// An empty callable means no model access.
struct GradientOracle {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;

  bool available() const { return static_cast<bool>(gradient); }
};

struct RejectionScore {
  bool unknown = false;
  double score = 0.0;
};

struct DirectResult {
  bool unknown = false;
  ClassId predicted_class = 0;
};

/// Logits over known classes and background (drops the unknown slot).
template <typename Derived>
auto closed_set_logits(const Eigen::MatrixBase<Derived>& logits,
                       const LabelSpace& space) {
  return logits.head(space.num_known() + 1);
}

template <typename Derived>
auto known_logits(const Eigen::MatrixBase<Derived>& logits,
                  const LabelSpace& space) {
  return logits.head(space.num_known());
}

/// Unknown when the top class is `u`, or when it is background and the
/// objectness exceeds tau_obj. The argmax runs over the full head.
DirectResult direct_predict(const Eigen::VectorXd& logits, double objectness,
                            double tau_obj, const LabelSpace& space);

template <typename Derived>
RejectionScore msp_reject(const Eigen::MatrixBase<Derived>& closed_logits,
                          double tau_msp) {
  const double score = static_cast<double>(softmax(closed_logits).maxCoeff());
  return {score <= tau_msp, score};
}

/// E = -T log sum_c exp(s_c / T).
template <typename Derived>
typename Derived::Scalar energy_score(const Eigen::MatrixBase<Derived>& logits,
                                      typename Derived::Scalar temperature) {
  return -temperature * log_sum_exp(logits / temperature);
}

template <typename Derived>
RejectionScore energy_reject(const Eigen::MatrixBase<Derived>& closed_logits,
                             const RejectionConfig& config) {
  const double e = energy_score(closed_logits, config.energy_temperature);
  const double score = config.energy_direction == EnergyDirection::kLiteral ? e : -e;
  return {score <= config.energy_threshold(), score};
}

/// Max softmax over the known classes only, on temperature-scaled logits.
template <typename Derived>
RejectionScore odin_reject(const Eigen::MatrixBase<Derived>& known,
                           double temperature, double tau_odin) {
  const double score = static_cast<double>(softmax(known / temperature).maxCoeff());
  return {score <= tau_odin, score};
}

/// x - epsilon * sgn(-grad). Returns the input unchanged for epsilon == 0 or
/// an unavailable oracle.
Eigen::VectorXd odin_perturb(const Eigen::VectorXd& features, double epsilon,
                             const GradientOracle& oracle);

/// Model access needed for the ODIN input perturbation.
struct PerturbableModel {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> logits;
  GradientOracle oracle;
};

struct RejectionOutput {
  std::vector<Detection> detections;
  bool odin_perturbation_applied = false;
};

/// Turns classified proposals into known or unknown detections (background
/// predictions that are not promoted are dropped), then applies per-class
/// NMS. `tau_obj` is required by the direct strategy; `model` enables the
/// ODIN perturbation.
RejectionOutput apply_rejection(std::span<const RegionProposal> proposals,
                                const RejectionConfig& config,
                                const LabelSpace& space,
                                std::optional<double> tau_obj,
                                const PerturbableModel* model = nullptr);

}  // namespace osdet
