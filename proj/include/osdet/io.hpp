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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "osdet/detector.hpp"
#include "osdet/metrics.hpp"
#include "osdet/rejection.hpp"
#include "osdet/scenario.hpp"
#include "osdet/training.hpp"

namespace osdet::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kFormatVersion = "1.0";
inline constexpr int kFormatMajor = 1;

/// 64-bit FNV-1a, lowercase hex.
std::string fnv1a_hex(std::string_view bytes);

/// Throws kFormat unless `doc` carries format_version with major 1 and the
/// expected kind.
void check_header(const Json& doc, std::string_view kind);
Json header(std::string_view kind);

Json to_json(const Box& box);
Box box_from_json(const Json& j);

Json to_json(const GroundTruthObject& truth);
GroundTruthObject truth_from_json(const Json& j);

Json to_json(const Detection& detection);
Detection detection_from_json(const Json& j);

Json to_json(const SceneImage& image);
SceneImage scene_image_from_json(const Json& j);

Json to_json(const LabelSpace& labels);
LabelSpace label_space_from_json(const Json& j);

Json to_json(const TauObj& tau);
TauObj tau_from_json(const Json& j);

// Config readers reject unknown fields; missing fields keep their defaults.
Json to_json(const ScenarioConfig& config);
ScenarioConfig scenario_config_from_json(const Json& j);

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& j);

Json to_json(const RejectionConfig& config);
RejectionConfig rejection_config_from_json(const Json& j);

Json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const Json& j);

/// Hash identifying a scenario: FNV-1a of the canonical config dump.
std::string scenario_hash(const ScenarioConfig& config);

struct ScenarioFiles {
  Scenario scenario;
  std::string hash;
};

/// manifest.json plus train.jsonl / test.jsonl. Returns the scenario hash.
std::string write_scenario(const std::filesystem::path& dir, const Scenario& scenario);
ScenarioFiles read_scenario(const std::filesystem::path& dir);

struct ModelFile {
  ToyDetector detector;
  TrainConfig train_config;
  std::string scenario_hash;
};

Json model_to_json(const ModelFile& model);
ModelFile model_from_json(const Json& j);
void write_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile read_model(const std::filesystem::path& path);

void write_pseudo_labels(const std::filesystem::path& path,
                         const std::vector<PseudoLabelPass>& passes,
                         std::uint64_t seed, const std::string& scenario_hash);

struct AuditEntry {
  int pass = 0;
  std::size_t image_id = 0;
  std::size_t region_index = 0;
  Box box;
  double objectness = 0.0;
  double max_gt_iou = 0.0;
};

struct AuditFile {
  std::vector<std::pair<int, TauObj>> taus;
  std::vector<AuditEntry> entries;
};
AuditFile read_pseudo_labels(const std::filesystem::path& path);

void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TracePoint>& trace, std::uint64_t seed);

void write_detections(const std::filesystem::path& path,
                      const std::vector<std::size_t>& image_ids,
                      const std::vector<ImageEval>& images,
                      const std::string& scenario_hash);
/// Per-image detections in file order.
std::vector<std::vector<Detection>> read_detections(const std::filesystem::path& path);

void write_report(const std::filesystem::path& path, const EvaluationReport& report);
EvaluationReport read_report(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Serialised form used for every JSON document: two-space indent plus a
/// trailing newline.
std::string dump(const Json& j);

}  // namespace osdet::io
