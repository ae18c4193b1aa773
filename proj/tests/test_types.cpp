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

#include <gtest/gtest.h>

#include "osdet/error.hpp"
#include "osdet/types.hpp"

namespace osdet {
namespace {

TEST(LabelSpaceTest, TwentyKnownWithUnknownSlotNeedsWidth22) {
  const auto space = LabelSpace::with_known_count(20, true);
  EXPECT_FALSE(validate_label_space(space, 22).has_value());
  EXPECT_EQ(space.background_id(), 20);
  EXPECT_EQ(space.unknown_id(), 21);
}

TEST(LabelSpaceTest, TwentyKnownStandardHeadNeedsWidth21) {
  const auto space = LabelSpace::with_known_count(20, false);
  EXPECT_FALSE(validate_label_space(space, 21).has_value());
  EXPECT_EQ(space.logit_width(), 21);
}

TEST(LabelSpaceTest, MissingUnknownSlotIsAViolation) {
  const auto space = LabelSpace::with_known_count(20, true);
  const auto violation = validate_label_space(space, 21);
  ASSERT_TRUE(violation.has_value());
  EXPECT_NE(violation->find("22"), std::string::npos);
}

TEST(LabelSpaceTest, IdsAreDistinctFromKnownClasses) {
  for (int k = 1; k <= 30; ++k) {
    for (bool unknown : {false, true}) {
      const auto space = LabelSpace::with_known_count(k, unknown);
      EXPECT_FALSE(space.is_known(space.background_id()));
      EXPECT_FALSE(space.is_known(space.unknown_id()));
      EXPECT_NE(space.background_id(), space.unknown_id());
      EXPECT_EQ(space.logit_width(), k + 1 + (unknown ? 1 : 0));
    }
  }
}

TEST(LabelSpaceTest, RejectsEmptyAndDuplicateNames) {
  EXPECT_THROW(LabelSpace({}, false), Error);
  EXPECT_THROW(LabelSpace({"car", "car"}, false), Error);
  EXPECT_NO_THROW(LabelSpace({"car", "dog"}, true));
}

TEST(BoxTest, MakeBoxRejectsInvertedAndNonFinite) {
  EXPECT_THROW(make_box(10, 0, 5, 5), Error);
  EXPECT_THROW(make_box(0, 0, 5, std::nan("")), Error);
  EXPECT_THROW(make_box(0, 0, 0, 5), Error);
  const Box b = make_box(1, 2, 4, 6);
  EXPECT_DOUBLE_EQ(b.area(), 12.0);
}

TEST(DetectionTest, BackgroundPredictionIsRejected) {
  const auto space = LabelSpace::with_known_count(3, true);
  Detection d{{0, 0, 1, 1}, space.background_id(), 0.9, 0.5};
  try {
    check_detection(d, space);
    FAIL() << "expected a label-space violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLabelSpaceViolation);
  }
  d.predicted_class = space.unknown_id();
  EXPECT_NO_THROW(check_detection(d, space));
  d.confidence = std::numeric_limits<double>::infinity();
  EXPECT_THROW(check_detection(d, space), Error);
}

TEST(DetectionTest, OutOfRangeClassIsRejected) {
  const auto space = LabelSpace::with_known_count(3, false);
  EXPECT_NO_THROW(check_detection({{0, 0, 1, 1}, space.unknown_id(), 0.9, 0.5}, space));
  EXPECT_THROW(check_detection({{0, 0, 1, 1}, -1, 0.9, 0.5}, space), Error);
  EXPECT_THROW(check_detection({{0, 0, 1, 1}, 7, 0.9, 0.5}, space), Error);
}

TEST(TruthTest, AnnotatedOnlyDropsHidden) {
  const std::vector<GroundTruthObject> truths = {
      {{0, 0, 1, 1}, 0, Visibility::kAnnotated},
      {{0, 0, 2, 2}, 4, Visibility::kHidden},
      {{0, 0, 3, 3}, 1, Visibility::kAnnotated}};
  const auto kept = annotated_only(truths);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0], truths[0]);
  EXPECT_EQ(kept[1], truths[2]);
}

TEST(ErrorTest, ValidationCodesMapToExitOne) {
  EXPECT_TRUE(is_validation_error(ErrorCode::kInvalidArgument));
  EXPECT_TRUE(is_validation_error(ErrorCode::kManifestMismatch));
  EXPECT_FALSE(is_validation_error(ErrorCode::kDivergence));
  EXPECT_FALSE(is_validation_error(ErrorCode::kIo));
}

}  // namespace
}  // namespace osdet
