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

// Command-line front end: simulate, train, pseudo-label, evaluate, report.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osdet/commands.hpp"
#include "osdet/io.hpp"

namespace fs = std::filesystem;
using osdet::io::Json;

namespace {

fs::path default_out(const std::string& leaf) {
  if (const char* dir = std::getenv("OSDET_OUT_DIR"); dir && *dir) return fs::path(dir) / leaf;
  return fs::path(leaf);
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(osdet::io::read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw osdet::Error(osdet::ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-set detection toolkit: simulate, train, pseudo-label, evaluate, report"};
  app.require_subcommand(1);

  int threads = 1;
  bool print_config = false;
  app.add_option("--threads", threads, "Worker threads (outputs do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a seeded synthetic scenario");
  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  simulate->add_option("--config", sim_config, "Scenario config JSON");
  simulate->add_option("--seed", sim_seed, "Scenario seed (overrides the config)");
  simulate->add_option("--out", sim_out, "Output directory");

  // train
  auto* train = app.add_subcommand("train", "Run the four-step training schedule");
  std::string tr_scenario, tr_config, tr_mode, tr_out, tr_audit, tr_trace;
  std::optional<std::uint64_t> tr_seed;
  train->add_option("--scenario", tr_scenario, "Scenario directory")->required();
  train->add_option("--config", tr_config, "Training config JSON");
  train->add_option("--mode", tr_mode, "unkad or standard")
      ->check(CLI::IsMember({"unkad", "standard"}));
  train->add_option("--seed", tr_seed, "Training seed (overrides the config)");
  train->add_option("--out", tr_out, "Model file");
  train->add_option("--audit", tr_audit, "Pseudo-label audit file");
  train->add_option("--trace", tr_trace, "Loss trace CSV");

  // pseudo-label
  auto* pseudo = app.add_subcommand("pseudo-label", "Audit pseudo-labels of a trained model");
  osdet::PseudoLabelOptions pl;
  std::string pl_scenario, pl_model, pl_out;
  pseudo->add_option("--scenario", pl_scenario, "Scenario directory")->required();
  pseudo->add_option("--model", pl_model, "Model file")->required();
  pseudo->add_option("--out", pl_out, "Audit output (JSON lines)");
  pseudo->add_option("--lambda", pl.lambda, "Multiplier on the foreground std-dev");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Run inference, rejection and metrics");
  osdet::RejectionConfig rej;
  std::string ev_scenario, ev_model, ev_out, ev_strategy = "none",
                                             ev_direction = "negative_energy";
  double ev_iou = osdet::kDefaultMatchIou;
  evaluate->add_option("--scenario", ev_scenario, "Scenario directory")->required();
  evaluate->add_option("--model", ev_model, "Model file")->required();
  evaluate->add_option("--rejection", ev_strategy, "none, direct, msp, energy or odin")
      ->check(CLI::IsMember({"none", "direct", "msp", "energy", "odin"}));
  evaluate->add_option("--tau-msp", rej.tau_msp, "MSP threshold");
  evaluate->add_option("--tau-energy", rej.tau_energy, "Energy threshold");
  evaluate->add_option("--tau-odin", rej.tau_odin, "ODIN threshold");
  evaluate->add_option("--energy-temperature", rej.energy_temperature, "Energy temperature");
  evaluate->add_option("--odin-temperature", rej.odin_temperature, "ODIN temperature");
  evaluate->add_option("--epsilon", rej.epsilon, "ODIN perturbation magnitude");
  evaluate->add_option("--energy-direction", ev_direction, "negative_energy or literal")
      ->check(CLI::IsMember({"negative_energy", "literal"}));
  evaluate->add_option("--nms-iou", rej.nms_iou, "NMS IoU threshold");
  evaluate->add_option("--iou", ev_iou, "Matching IoU threshold for all metrics");
  evaluate->add_option("--out", ev_out, "Output directory");

  // report
  auto* report = app.add_subcommand("report", "Combine reports into one table");
  std::vector<std::string> rp_inputs;
  std::string rp_out;
  report->add_option("reports", rp_inputs, "report.json files")->required();
  report->add_option("--out", rp_out, "Write the table here as well");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (simulate->parsed()) {
      osdet::SimulateOptions opts;
      if (!sim_config.empty()) {
        opts.config = osdet::io::scenario_config_from_json(read_json_file(sim_config));
      }
      if (sim_seed) opts.config.seed = *sim_seed;
      opts.config.validate();
      opts.out_dir = sim_out.empty() ? default_out("scenario") : fs::path(sim_out);
      opts.threads = threads;
      if (print_config) {
        std::cout << osdet::io::dump(osdet::io::to_json(opts.config));
        return 0;
      }
      const std::string hash = osdet::cmd_simulate(opts);
      std::cout << "scenario " << hash << " written to " << opts.out_dir.string() << "\n";
    } else if (train->parsed()) {
      osdet::TrainOptions opts;
      if (!tr_config.empty()) {
        opts.config = osdet::io::train_config_from_json(read_json_file(tr_config));
      }
      if (!tr_mode.empty()) opts.config.mode = osdet::parse_training_mode(tr_mode);
      if (tr_seed) opts.config.seed = *tr_seed;
      opts.config.validate();
      opts.scenario_dir = tr_scenario;
      opts.model_out = tr_out.empty() ? default_out("model.json") : fs::path(tr_out);
      opts.audit_out = tr_audit;
      opts.trace_out = tr_trace;
      if (print_config) {
        std::cout << osdet::io::dump(osdet::io::to_json(opts.config));
        return 0;
      }
      const auto summary = osdet::cmd_train(opts);
      std::cout << "model written to " << summary.model_path.string();
      if (!summary.audit_path.empty()) {
        std::cout << ", " << summary.result.audit.back().total() << " pseudo-labels in "
                  << summary.audit_path.string();
      }
      std::cout << "\n";
    } else if (pseudo->parsed()) {
      pl.scenario_dir = pl_scenario;
      pl.model_path = pl_model;
      pl.out = pl_out.empty() ? default_out("pseudo_labels.jsonl") : fs::path(pl_out);
      if (print_config) {
        std::cout << osdet::io::dump(Json{{"lambda", pl.lambda}});
        return 0;
      }
      const auto pass = osdet::cmd_pseudo_label(pl);
      std::cout << pass.total() << " pseudo-labels (tau_obj " << pass.tau.value << ") written to "
                << pl.out.string() << "\n";
    } else if (evaluate->parsed()) {
      rej.strategy = osdet::parse_strategy(ev_strategy);
      rej.energy_direction = osdet::parse_energy_direction(ev_direction);
      rej.validate();
      osdet::EvaluateOptions opts;
      opts.scenario_dir = ev_scenario;
      opts.model_path = ev_model;
      opts.rejection = rej;
      opts.iou_threshold = ev_iou;
      opts.out_dir = ev_out.empty() ? default_out("eval") : fs::path(ev_out);
      opts.threads = threads;
      if (print_config) {
        Json j = osdet::io::to_json(rej);
        j["iou_threshold"] = ev_iou;
        std::cout << osdet::io::dump(j);
        return 0;
      }
      const auto r = osdet::cmd_evaluate(opts);
      std::cout << osdet::render_table(std::span(&r, 1));
    } else if (report->parsed()) {
      osdet::ReportOptions opts;
      for (const auto& p : rp_inputs) opts.reports.emplace_back(p);
      opts.out = rp_out;
      std::cout << osdet::cmd_report(opts);
    }
  } catch (const osdet::Error& e) {
    std::cerr << "osdet: " << e.what() << "\n";
    return osdet::is_validation_error(e.code()) ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "osdet: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
