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
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "osdet/types.hpp"

namespace osdet {

/// Synthetic open-set world. Every object carries a shared objectness cue on
/// feature 0; known classes sit on a centred regular simplex in the next
/// `num_known_classes` features, unknown clusters sit on simplex edge
/// midpoints, and background clutter is isotropic noise around the origin.
struct ScenarioConfig {
  int num_images = 300;
  int num_test_images = 300;
  int objects_per_image_mean = 4;
  int objects_per_image_spread = 2;
  int proposals_per_object = 2;
  double background_region_rate = 40.0;
  int num_known_classes = 5;
  int num_unknown_clusters = 2;
  double unknown_object_rate = 0.25;
  int feature_dim = 8;
  double class_mean_separation = 8.0;
  double object_cue = 4.0;
  // Spread of the object cue across objects, relative to feature_noise_scale.
  double object_cue_noise = 0.15;
  double feature_noise_scale = 1.0;
  double box_jitter_scale = 0.1;
  double image_width = 640.0;
  double image_height = 480.0;
  std::uint64_t seed = 0;

  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct SceneRegion {
  Box box;
  Eigen::VectorXd features;

  friend bool operator==(const SceneRegion& a, const SceneRegion& b) {
    return a.box == b.box && a.features.size() == b.features.size() &&
           a.features == b.features;
  }
};

struct SceneImage {
  std::size_t image_id = 0;
  double width = 0.0;
  double height = 0.0;
  std::vector<GroundTruthObject> truths;
  std::vector<SceneRegion> regions;

  friend bool operator==(const SceneImage&, const SceneImage&) = default;
};

struct Scenario {
  ScenarioConfig config;
  std::vector<SceneImage> train;
  std::vector<SceneImage> test;
};

/// Class ids used in scenario truths: known 0..K-1, unknown K+1.
LabelSpace scenario_label_space(const ScenarioConfig& config, bool has_unknown_class);

/// Mean feature vectors for the known classes (rows 0..K-1), then the
/// training unknown clusters, then the fresh test-only clusters.
Eigen::MatrixXd class_means(const ScenarioConfig& config);

/// Simplex edges used by the unknown clusters, training ones first.
std::vector<std::pair<int, int>> unknown_cluster_edges(const ScenarioConfig& config);

/// Deterministic in the seed and independent of `threads`. Unknown objects
/// are hidden in the training split; the test split also draws from fresh
/// clusters never seen in training.
Scenario generate_scenario(const ScenarioConfig& config, int threads = 1);

}  // namespace osdet
