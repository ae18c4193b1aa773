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

#include <filesystem>
#include <string>
#include <vector>

#include "osdet/io.hpp"
#include "osdet/metrics.hpp"
#include "osdet/rejection.hpp"
#include "osdet/scenario.hpp"
#include "osdet/training.hpp"

namespace osdet {

namespace fs = std::filesystem;

struct SimulateOptions {
  ScenarioConfig config;
  fs::path out_dir;
  int threads = 1;
};

/// Writes the scenario files and returns the manifest hash.
std::string cmd_simulate(const SimulateOptions& options);

struct TrainOptions {
  fs::path scenario_dir;
  TrainConfig config;
  fs::path model_out;
  /// Defaults to <model stem>.pseudo_labels.jsonl next to the model.
  fs::path audit_out;
  /// Defaults to <model stem>.trace.csv next to the model.
  fs::path trace_out;
};

struct TrainSummary {
  fs::path model_path;
  fs::path audit_path;  // empty in standard mode
  fs::path trace_path;
  TrainResult result;
};

TrainSummary cmd_train(const TrainOptions& options);

struct PseudoLabelOptions {
  fs::path scenario_dir;
  fs::path model_path;
  fs::path out;
  double lambda = kDefaultLambda;
};

/// Standalone audit: one pseudo-label pass of a trained model over the
/// training split.
PseudoLabelPass cmd_pseudo_label(const PseudoLabelOptions& options);

struct EvaluateOptions {
  fs::path scenario_dir;
  fs::path model_path;
  RejectionConfig rejection;
  double iou_threshold = kDefaultMatchIou;
  fs::path out_dir;
  int threads = 1;
};

/// Writes report.json, report.txt, detections.jsonl and pr_curves.csv.
EvaluationReport cmd_evaluate(const EvaluateOptions& options);

struct ReportOptions {
  std::vector<fs::path> reports;
  fs::path out;  // optional text output
};

/// Combined table; throws kManifestMismatch when the reports come from
/// different scenarios.
std::string cmd_report(const ReportOptions& options);

}  // namespace osdet
