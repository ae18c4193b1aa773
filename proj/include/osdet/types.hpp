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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "osdet/error.hpp"

namespace osdet {

using ClassId = int;

/// Axis-aligned rectangle in continuous image coordinates (corner form).
template <typename Scalar>
struct BasicBox {
  Scalar x_min{};
  Scalar y_min{};
  Scalar x_max{};
  Scalar y_max{};

  Scalar width() const { return x_max - x_min; }
  Scalar height() const { return y_max - y_min; }
  Scalar area() const { return width() * height(); }

  BasicBox translated(Scalar dx, Scalar dy) const {
    return {x_min + dx, y_min + dy, x_max + dx, y_max + dy};
  }

  friend bool operator==(const BasicBox&, const BasicBox&) = default;
};

using Box = BasicBox<double>;

bool is_valid(const Box& box);

/// Throws kInvalidBox unless the box has finite corners and positive area.
Box make_box(double x_min, double y_min, double x_max, double y_max);

/// Known classes occupy ids 0..K-1, background is K and unknown is K+1.
class LabelSpace {
 public:
  LabelSpace() = default;
  LabelSpace(std::vector<std::string> known_classes, bool has_unknown_class);

  /// Names "class_0".."class_{n-1}".
  static LabelSpace with_known_count(int num_known, bool has_unknown_class);

  const std::vector<std::string>& known_classes() const { return known_; }
  int num_known() const { return static_cast<int>(known_.size()); }
  bool has_unknown_class() const { return has_unknown_; }
  ClassId background_id() const { return num_known(); }
  ClassId unknown_id() const { return num_known() + 1; }
  int logit_width() const { return num_known() + (has_unknown_ ? 2 : 1); }

  bool is_known(ClassId id) const { return id >= 0 && id < num_known(); }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;

 private:
  std::vector<std::string> known_;
  bool has_unknown_ = false;
};

/// Empty optional when `logit_width` fits the label space, otherwise a
/// description naming the expected and actual widths.
std::optional<std::string> validate_label_space(const LabelSpace& space,
                                                int logit_width);

struct RegionProposal {
  Box box;
  double objectness = 0.0;
  Eigen::VectorXd features;
  std::optional<Eigen::VectorXd> logits;
};

bool operator==(const RegionProposal& a, const RegionProposal& b);

enum class Visibility { kAnnotated, kHidden };

struct GroundTruthObject {
  Box box;
  ClassId class_id = 0;
  Visibility visibility = Visibility::kAnnotated;

  friend bool operator==(const GroundTruthObject&,
                         const GroundTruthObject&) = default;
};

struct Detection {
  Box box;
  ClassId predicted_class = 0;
  double confidence = 0.0;
  double source_objectness = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Rejects detections carrying the background id or a non-finite confidence.
void check_detection(const Detection& detection, const LabelSpace& space);

std::vector<GroundTruthObject> annotated_only(
    const std::vector<GroundTruthObject>& truths);

}  // namespace osdet
