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

#include "osdet/types.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace osdet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidBox: return "InvalidBox";
    case ErrorCode::kLabelSpaceViolation: return "LabelSpaceViolation";
    case ErrorCode::kEmptyTruths: return "EmptyTruths";
    case ErrorCode::kEmptyForegroundSet: return "EmptyForegroundSet";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kMissingUnknownSlot: return "MissingUnknownSlot";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kFormat: return "FormatError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

bool is_valid(const Box& box) {
  return std::isfinite(box.x_min) && std::isfinite(box.y_min) &&
         std::isfinite(box.x_max) && std::isfinite(box.y_max) &&
         box.x_min < box.x_max && box.y_min < box.y_max;
}

Box make_box(double x_min, double y_min, double x_max, double y_max) {
  Box box{x_min, y_min, x_max, y_max};
  if (!is_valid(box)) {
    std::ostringstream os;
    os << "box [" << x_min << ", " << y_min << ", " << x_max << ", " << y_max
       << "] must have finite corners and positive area";
    throw Error(ErrorCode::kInvalidBox, os.str());
  }
  return box;
}

LabelSpace::LabelSpace(std::vector<std::string> known_classes,
                       bool has_unknown_class)
    : known_(std::move(known_classes)), has_unknown_(has_unknown_class) {
  if (known_.empty()) {
    throw Error(ErrorCode::kLabelSpaceViolation, "known classes are empty");
  }
  std::set<std::string> seen;
  for (const auto& name : known_) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kLabelSpaceViolation,
                  "duplicate known class '" + name + "'");
    }
  }
}

LabelSpace LabelSpace::with_known_count(int num_known, bool has_unknown_class) {
  std::vector<std::string> names;
  for (int i = 0; i < num_known; ++i) names.push_back("class_" + std::to_string(i));
  return LabelSpace(std::move(names), has_unknown_class);
}

std::optional<std::string> validate_label_space(const LabelSpace& space,
                                                int logit_width) {
  if (logit_width == space.logit_width()) return std::nullopt;
  std::ostringstream os;
  os << "expected logit width " << space.logit_width() << " ("
     << space.num_known() << " known + background"
     << (space.has_unknown_class() ? " + unknown" : "") << "), got "
     << logit_width;
  return os.str();
}

bool operator==(const RegionProposal& a, const RegionProposal& b) {
  if (a.box != b.box || a.objectness != b.objectness) return false;
  if (a.features.size() != b.features.size() || a.features != b.features) {
    return false;
  }
  if (a.logits.has_value() != b.logits.has_value()) return false;
  if (a.logits && (a.logits->size() != b.logits->size() || *a.logits != *b.logits)) {
    return false;
  }
  return true;
}

void check_detection(const Detection& detection, const LabelSpace& space) {
  if (detection.predicted_class == space.background_id()) {
    throw Error(ErrorCode::kLabelSpaceViolation,
                "detections never carry the background class");
  }
  // Evaluation is open-set, so the unknown id is legal even for heads
  // trained without an unknown logit.
  if (!space.is_known(detection.predicted_class) &&
      detection.predicted_class != space.unknown_id()) {
    throw Error(ErrorCode::kLabelSpaceViolation,
                "detection class " + std::to_string(detection.predicted_class) +
                    " lies outside the label space");
  }
  if (!std::isfinite(detection.confidence)) {
    throw Error(ErrorCode::kInvalidArgument, "detection confidence is not finite");
  }
}

std::vector<GroundTruthObject> annotated_only(
    const std::vector<GroundTruthObject>& truths) {
  std::vector<GroundTruthObject> out;
  for (const auto& t : truths) {
    if (t.visibility == Visibility::kAnnotated) out.push_back(t);
  }
  return out;
}

}  // namespace osdet
