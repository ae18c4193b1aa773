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

#include "osdet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "osdet/geometry.hpp"
#include "osdet/parallel.hpp"
#include "osdet/rng.hpp"

namespace osdet {
namespace {

constexpr double kMinObjectSize = 48.0;
constexpr double kMaxObjectSize = 128.0;
constexpr double kMaxPlacementIou = 0.05;
constexpr int kPlacementAttempts = 50;
constexpr double kProposalNoise = 0.25;

void require(bool ok, const std::string& field, const std::string& rule) {
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument, "scenario." + field + " " + rule);
  }
}

struct Placed {
  Box box;
  ClassId class_id;
  Eigen::VectorXd features;
};

std::optional<Box> place_box(Rng& rng, const ScenarioConfig& c,
                             const std::vector<Box>& avoid) {
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    const double w = rng.uniform(kMinObjectSize, kMaxObjectSize);
    const double h = rng.uniform(kMinObjectSize, kMaxObjectSize);
    const double x = rng.uniform(0.0, c.image_width - w);
    const double y = rng.uniform(0.0, c.image_height - h);
    const Box box{x, y, x + w, y + h};
    bool clear = true;
    for (const auto& other : avoid) {
      if (iou(box, other) > kMaxPlacementIou) {
        clear = false;
        break;
      }
    }
    if (clear) return box;
  }
  return std::nullopt;
}

Eigen::VectorXd noisy(const Eigen::VectorXd& mean, double scale, Rng& rng) {
  Eigen::VectorXd out = mean;
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += scale * rng.normal();
  return out;
}

SceneImage generate_image(const ScenarioConfig& c, const Eigen::MatrixXd& means,
                          bool training, std::size_t image_id) {
  Rng rng(derive_seed(c.seed, {training ? 0u : 1u, image_id}));
  const int k = c.num_known_classes;
  const int n_unknown = c.num_unknown_clusters;
  const ClassId unknown_id = k + 1;

  SceneImage image;
  image.image_id = image_id;
  image.width = c.image_width;
  image.height = c.image_height;

  const auto num_objects = std::max<std::int64_t>(
      0, rng.uniform_int(c.objects_per_image_mean - c.objects_per_image_spread,
                         c.objects_per_image_mean + c.objects_per_image_spread));

  std::vector<Placed> objects;
  std::vector<Box> occupied;
  for (std::int64_t o = 0; o < num_objects; ++o) {
    Eigen::Index mean_row = 0;
    ClassId cls = 0;
    if (n_unknown > 0 && rng.uniform() < c.unknown_object_rate) {
      const int clusters = training ? n_unknown : 2 * n_unknown;
      mean_row = k + rng.uniform_int(0, clusters - 1);
      cls = unknown_id;
    } else {
      cls = static_cast<ClassId>(rng.uniform_int(0, k - 1));
      mean_row = cls;
    }
    const auto box = place_box(rng, c, occupied);
    if (!box) continue;
    occupied.push_back(*box);
    Eigen::VectorXd features = noisy(means.row(mean_row).transpose(), c.feature_noise_scale, rng);
    features(0) = means(mean_row, 0) + c.object_cue_noise * c.feature_noise_scale * rng.normal();
    objects.push_back({*box, cls, std::move(features)});
  }

  for (const auto& obj : objects) {
    image.truths.push_back({obj.box, obj.class_id,
                            obj.class_id == unknown_id ? Visibility::kHidden
                                                       : Visibility::kAnnotated});
    const double w = obj.box.width();
    const double h = obj.box.height();
    const double j = c.box_jitter_scale;
    for (int p = 0; p < c.proposals_per_object; ++p) {
      const double x0 = obj.box.x_min + rng.uniform(-j, j) * w;
      const double y0 = obj.box.y_min + rng.uniform(-j, j) * h;
      const double x1 = obj.box.x_max + rng.uniform(-j, j) * w;
      const double y1 = obj.box.y_max + rng.uniform(-j, j) * h;
      image.regions.push_back(
          {make_box(x0, y0, x1, y1),
           noisy(obj.features, kProposalNoise * c.feature_noise_scale, rng)});
    }
  }

  const int num_background = rng.poisson(c.background_region_rate);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(c.feature_dim);
  for (int b = 0; b < num_background; ++b) {
    const auto box = place_box(rng, c, occupied);
    if (!box) continue;
    image.regions.push_back({*box, noisy(origin, c.feature_noise_scale, rng)});
  }

  for (std::size_t i = image.regions.size(); i > 1; --i) {
    const auto r = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(image.regions[i - 1], image.regions[r]);
  }
  return image;
}

}  // namespace

void ScenarioConfig::validate() const {
  require(num_images >= 1, "num_images", "must be >= 1");
  require(num_test_images >= 1, "num_test_images", "must be >= 1");
  require(objects_per_image_mean >= 1, "objects_per_image_mean", "must be >= 1");
  require(objects_per_image_spread >= 0, "objects_per_image_spread", "must be >= 0");
  require(proposals_per_object >= 1, "proposals_per_object", "must be >= 1");
  require(std::isfinite(background_region_rate) && background_region_rate >= 0.0 &&
              background_region_rate <= 100.0,
          "background_region_rate", "must lie in [0, 100]");
  require(num_known_classes >= 2, "num_known_classes", "must be >= 2");
  require(num_unknown_clusters >= 0, "num_unknown_clusters", "must be >= 0");
  require(2 * num_unknown_clusters <= num_known_classes * (num_known_classes - 1) / 2,
          "num_unknown_clusters",
          "needs two simplex edges per cluster (training + fresh test cluster)");
  require(unknown_object_rate >= 0.0 && unknown_object_rate <= 1.0,
          "unknown_object_rate", "must lie in [0, 1]");
  require(feature_dim >= 1 + num_known_classes, "feature_dim",
          "must be >= 1 + num_known_classes");
  require(class_mean_separation > 0.0 && std::isfinite(class_mean_separation),
          "class_mean_separation", "must be > 0");
  require(object_cue > 0.0 && std::isfinite(object_cue), "object_cue", "must be > 0");
  require(object_cue_noise > 0.0 && std::isfinite(object_cue_noise), "object_cue_noise",
          "must be > 0");
  require(feature_noise_scale > 0.0 && std::isfinite(feature_noise_scale),
          "feature_noise_scale", "must be > 0");
  require(box_jitter_scale > 0.0 && box_jitter_scale < 0.25, "box_jitter_scale",
          "must lie in (0, 0.25)");
  require(image_width >= 2 * kMaxObjectSize && image_height >= 2 * kMaxObjectSize,
          "image_width/image_height", "must be >= 256");
}

LabelSpace scenario_label_space(const ScenarioConfig& config, bool has_unknown_class) {
  return LabelSpace::with_known_count(config.num_known_classes, has_unknown_class);
}

std::vector<std::pair<int, int>> unknown_cluster_edges(const ScenarioConfig& config) {
  const int k = config.num_known_classes;
  std::vector<std::pair<int, int>> all;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) all.emplace_back(a, b);
  }
  // Vertex-disjoint edges first, then the rest in lexicographic order.
  std::vector<std::pair<int, int>> ordered;
  std::vector<bool> used_vertex(k, false);
  std::vector<bool> taken(all.size(), false);
  for (std::size_t e = 0; e < all.size(); ++e) {
    const auto [a, b] = all[e];
    if (!used_vertex[a] && !used_vertex[b]) {
      used_vertex[a] = used_vertex[b] = true;
      taken[e] = true;
      ordered.push_back(all[e]);
    }
  }
  for (std::size_t e = 0; e < all.size(); ++e) {
    if (!taken[e]) ordered.push_back(all[e]);
  }
  ordered.resize(std::min<std::size_t>(ordered.size(), 2 * config.num_unknown_clusters));
  return ordered;
}

Eigen::MatrixXd class_means(const ScenarioConfig& c) {
  const int k = c.num_known_classes;
  const auto edges = unknown_cluster_edges(c);
  Eigen::MatrixXd means =
      Eigen::MatrixXd::Zero(k + static_cast<Eigen::Index>(edges.size()), c.feature_dim);
  // Centred one-hot vectors scaled so that every pair of known means is
  // class_mean_separation apart.
  const double scale = c.class_mean_separation / std::sqrt(2.0);
  for (int cls = 0; cls < k; ++cls) {
    means(cls, 0) = c.object_cue;
    for (int j = 0; j < k; ++j) {
      means(cls, 1 + j) = scale * ((j == cls ? 1.0 : 0.0) - 1.0 / k);
    }
  }
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto row = k + static_cast<Eigen::Index>(e);
    means.row(row) = 0.5 * (means.row(edges[e].first) + means.row(edges[e].second));
  }
  return means;
}

Scenario generate_scenario(const ScenarioConfig& config, int threads) {
  config.validate();
  const Eigen::MatrixXd means = class_means(config);
  Scenario scenario;
  scenario.config = config;
  scenario.train.resize(config.num_images);
  scenario.test.resize(config.num_test_images);
  parallel_for(scenario.train.size(), threads, [&](std::size_t i) {
    scenario.train[i] = generate_image(config, means, true, i);
  });
  parallel_for(scenario.test.size(), threads, [&](std::size_t i) {
    scenario.test[i] = generate_image(config, means, false, i);
  });
  return scenario;
}

}  // namespace osdet
