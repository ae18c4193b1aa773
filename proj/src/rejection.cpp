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

#include "osdet/rejection.hpp"

#include <cmath>
#include <iostream>

#include "osdet/geometry.hpp"

namespace osdet {

const char* to_string(RejectionStrategy strategy) {
  switch (strategy) {
    case RejectionStrategy::kNone: return "none";
    case RejectionStrategy::kDirect: return "direct";
    case RejectionStrategy::kMsp: return "msp";
    case RejectionStrategy::kEnergy: return "energy";
    case RejectionStrategy::kOdin: return "odin";
  }
  return "none";
}

RejectionStrategy parse_strategy(const std::string& name) {
  for (auto s : {RejectionStrategy::kNone, RejectionStrategy::kDirect,
                 RejectionStrategy::kMsp, RejectionStrategy::kEnergy,
                 RejectionStrategy::kOdin}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown rejection strategy '" + name + "'");
}

const char* to_string(EnergyDirection direction) {
  return direction == EnergyDirection::kLiteral ? "literal" : "negative_energy";
}

EnergyDirection parse_energy_direction(const std::string& name) {
  if (name == "literal") return EnergyDirection::kLiteral;
  if (name == "negative_energy") return EnergyDirection::kNegativeEnergy;
  throw Error(ErrorCode::kInvalidArgument, "unknown energy direction '" + name + "'");
}

void RejectionConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(std::isfinite(tau_msp) && std::isfinite(tau_energy) &&
              std::isfinite(tau_odin),
          "rejection thresholds must be finite");
  require(energy_temperature > 0.0 && std::isfinite(energy_temperature),
          "energy temperature must be > 0");
  require(odin_temperature > 0.0 && std::isfinite(odin_temperature),
          "odin temperature must be > 0");
  require(epsilon >= 0.0 && std::isfinite(epsilon), "epsilon must be >= 0");
  require(nms_iou > 0.0 && nms_iou < 1.0, "nms IoU must lie in (0, 1)");
}

DirectResult direct_predict(const Eigen::VectorXd& logits, double objectness,
                            double tau_obj, const LabelSpace& space) {
  if (!space.has_unknown_class()) {
    throw Error(ErrorCode::kMissingUnknownSlot,
                "direct prediction needs a head trained with the unknown class");
  }
  if (auto violation = validate_label_space(space, static_cast<int>(logits.size()))) {
    throw Error(ErrorCode::kLabelSpaceViolation, *violation);
  }
  const auto top = static_cast<ClassId>(argmax(logits));
  if (top == space.unknown_id()) return {true, space.unknown_id()};
  if (top == space.background_id() && objectness > tau_obj) {
    return {true, space.unknown_id()};
  }
  return {false, top};
}

Eigen::VectorXd odin_perturb(const Eigen::VectorXd& features, double epsilon,
                             const GradientOracle& oracle) {
  if (epsilon < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be >= 0");
  }
  if (epsilon == 0.0 || !oracle.available()) return features;
  const Eigen::VectorXd grad = oracle.gradient(features);
  if (grad.size() != features.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "gradient width differs from features");
  }
  // sgn(-g), with sgn(0) = 0.
  const Eigen::VectorXd sign = (-grad).unaryExpr([](double v) {
    return static_cast<double>((v > 0.0) - (v < 0.0));
  });
  return features - epsilon * sign;
}

namespace {

Detection make_detection(const RegionProposal& p, ClassId cls, double confidence) {
  return Detection{p.box, cls, confidence, p.objectness};
}

}  // namespace

RejectionOutput apply_rejection(std::span<const RegionProposal> proposals,
                                const RejectionConfig& config,
                                const LabelSpace& space,
                                std::optional<double> tau_obj,
                                const PerturbableModel* model) {
  config.validate();
  if (config.strategy == RejectionStrategy::kDirect) {
    if (!space.has_unknown_class()) {
      throw Error(ErrorCode::kMissingUnknownSlot,
                  "direct prediction needs a head trained with the unknown class");
    }
    if (!tau_obj) {
      throw Error(ErrorCode::kInvalidArgument,
                  "direct prediction needs the persisted objectness threshold");
    }
  }

  const bool perturb = config.strategy == RejectionStrategy::kOdin &&
                       config.epsilon > 0.0 && model != nullptr &&
                       model->oracle.available() && model->logits;
  if (config.strategy == RejectionStrategy::kOdin && config.epsilon > 0.0 && !perturb) {
    std::clog << "osdet: no gradient oracle available, ODIN runs with epsilon = 0\n";
  }

  RejectionOutput out;
  out.odin_perturbation_applied = perturb;
  const ClassId unknown = space.unknown_id();
  const ClassId background = space.background_id();

  for (const auto& p : proposals) {
    if (!p.logits) {
      throw Error(ErrorCode::kInvalidArgument, "proposal has not been classified");
    }
    const Eigen::VectorXd& s = *p.logits;
    if (auto violation = validate_label_space(space, static_cast<int>(s.size()))) {
      throw Error(ErrorCode::kLabelSpaceViolation, *violation);
    }

    if (config.strategy == RejectionStrategy::kDirect) {
      const DirectResult r = direct_predict(s, p.objectness, *tau_obj, space);
      const Eigen::VectorXd prob = softmax(s);
      if (r.unknown) {
        const bool by_class = argmax(s) == unknown;
        out.detections.push_back(
            make_detection(p, unknown, by_class ? prob(unknown) : p.objectness));
      } else if (r.predicted_class != background) {
        out.detections.push_back(make_detection(p, r.predicted_class, prob(r.predicted_class)));
      }
      continue;
    }

    const auto closed = closed_set_logits(s, space);
    const auto top = static_cast<ClassId>(argmax(closed));
    // The ODIN score ignores the background logit, so it can only
    // re-examine would-be known detections. MSP and energy see every region.
    if (top == background && config.strategy == RejectionStrategy::kOdin) continue;
    const Eigen::VectorXd closed_prob = softmax(closed);

    std::optional<double> unknown_confidence;
    switch (config.strategy) {
      case RejectionStrategy::kMsp: {
        const auto r = msp_reject(closed, config.tau_msp);
        if (r.unknown) unknown_confidence = 1.0 - r.score;
        break;
      }
      case RejectionStrategy::kEnergy: {
        const auto r = energy_reject(closed, config);
        if (r.unknown) {
          unknown_confidence = energy_score(closed, config.energy_temperature);
        }
        break;
      }
      case RejectionStrategy::kOdin: {
        Eigen::VectorXd scored = s;
        if (perturb) {
          scored = model->logits(odin_perturb(p.features, config.epsilon, model->oracle));
        }
        const auto r = odin_reject(known_logits(scored, space),
                                   config.odin_temperature, config.tau_odin);
        if (r.unknown) unknown_confidence = 1.0 - r.score;
        break;
      }
      default:
        break;
    }

    if (unknown_confidence) {
      out.detections.push_back(make_detection(p, unknown, *unknown_confidence));
    } else if (top != background) {
      out.detections.push_back(make_detection(p, top, closed_prob(top)));
    }
  }

  out.detections = nms(out.detections, config.nms_iou);
  return out;
}

}  // namespace osdet
