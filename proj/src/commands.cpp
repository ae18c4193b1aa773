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

#include "osdet/commands.hpp"

#include <cstdio>
#include <sstream>

#include "osdet/pipeline.hpp"

namespace osdet {
namespace {

fs::path sibling(const fs::path& model, const std::string& suffix) {
  return model.parent_path() / (model.stem().string() + suffix);
}

void check_compatible(const ToyDetector& detector, const ScenarioConfig& config) {
  if (detector.feature_dim() != config.feature_dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model expects " + std::to_string(detector.feature_dim()) +
                    " features, scenario has " + std::to_string(config.feature_dim));
  }
  if (detector.labels.num_known() != config.num_known_classes) {
    throw Error(ErrorCode::kLabelSpaceViolation,
                "model and scenario disagree on the number of known classes");
  }
}

}  // namespace

std::string cmd_simulate(const SimulateOptions& options) {
  const Scenario scenario = generate_scenario(options.config, options.threads);
  return io::write_scenario(options.out_dir, scenario);
}

TrainSummary cmd_train(const TrainOptions& options) {
  const auto files = io::read_scenario(options.scenario_dir);
  TrainSummary summary;
  summary.result = run_four_step(files.scenario, options.config);
  summary.model_path = options.model_out;
  io::write_model(options.model_out,
                  io::ModelFile{summary.result.detector, options.config, files.hash});

  summary.trace_path = options.trace_out.empty() ? sibling(options.model_out, ".trace.csv")
                                                 : options.trace_out;
  io::write_trace_csv(summary.trace_path, summary.result.detector.trace, options.config.seed);

  if (options.config.mode == TrainingMode::kUnkad) {
    summary.audit_path = options.audit_out.empty()
                             ? sibling(options.model_out, ".pseudo_labels.jsonl")
                             : options.audit_out;
    io::write_pseudo_labels(summary.audit_path, summary.result.audit, options.config.seed,
                            files.hash);
  }
  return summary;
}

PseudoLabelPass cmd_pseudo_label(const PseudoLabelOptions& options) {
  const auto files = io::read_scenario(options.scenario_dir);
  const auto model = io::read_model(options.model_path);
  check_compatible(model.detector, files.scenario.config);
  PseudoLabelPass pass =
      pseudo_label_pass(model.detector, files.scenario.train, options.lambda, 1);
  io::write_pseudo_labels(options.out, {pass}, model.train_config.seed, files.hash);
  return pass;
}

EvaluationReport cmd_evaluate(const EvaluateOptions& options) {
  const auto files = io::read_scenario(options.scenario_dir);
  const auto model = io::read_model(options.model_path);
  check_compatible(model.detector, files.scenario.config);

  EvaluationOptions eval;
  eval.iou_threshold = options.iou_threshold;
  eval.threads = options.threads;
  eval.training_mode = to_string(model.train_config.mode);
  eval.scenario_hash = files.hash;
  EvaluationRun run =
      evaluate_split(model.detector, files.scenario.test, options.rejection, eval);
  run.report.config["model_scenario_hash"] = model.scenario_hash;
  run.report.config["seed"] = model.train_config.seed;
  run.report.config["scenario_seed"] = files.scenario.config.seed;

  const fs::path& dir = options.out_dir;
  io::write_detections(dir / "detections.jsonl", run.image_ids, run.images, files.hash);
  io::write_report(dir / "report.json", run.report);
  io::write_text(dir / "report.txt", render_table(std::span(&run.report, 1)));

  std::ostringstream pr;
  pr << "# format_version=" << io::kFormatVersion << " kind=osdet.pr_curves\n";
  pr << "class_id,rank,recall,precision\n";
  char buf[96];
  for (ClassId cls = 0; cls < model.detector.labels.num_known(); ++cls) {
    std::size_t num_truths = 0;
    const auto outcomes = class_outcomes(run.images, cls, options.iou_threshold, &num_truths);
    const auto points = pr_curve(outcomes, num_truths);
    for (std::size_t k = 0; k < points.size(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g,%.17g\n", cls, k + 1, points[k].recall,
                    points[k].precision);
      pr << buf;
    }
  }
  io::write_text(dir / "pr_curves.csv", pr.str());
  return run.report;
}

std::string cmd_report(const ReportOptions& options) {
  if (options.reports.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "report needs at least one report file");
  }
  std::vector<EvaluationReport> reports;
  for (const auto& path : options.reports) reports.push_back(io::read_report(path));
  for (const auto& r : reports) {
    if (r.scenario_hash != reports.front().scenario_hash) {
      throw Error(ErrorCode::kManifestMismatch,
                  "reports come from different scenarios (" + reports.front().scenario_hash +
                      " vs " + r.scenario_hash + ")");
    }
  }
  std::string table = render_table(reports);
  if (!options.out.empty()) io::write_text(options.out, table);
  return table;
}

}  // namespace osdet
