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
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "osdet/error.hpp"
#include "osdet/io.hpp"

namespace osdet {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  // One root per process so parallel test runs never share directories.
  struct Root {
    fs::path path = fs::temp_directory_path() / ("osdet_io_" + std::to_string(::getpid()));
    ~Root() {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  };
  static const Root root;
  const fs::path dir = root.path / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

template <typename T, typename Read>
void expect_round_trip(const T& value, Read read) {
  const io::Json j = io::to_json(value);
  EXPECT_EQ(read(io::Json::parse(io::dump(j))), value);
}

TEST(IoTest, FnvMatchesPublishedVectors) {
  EXPECT_EQ(io::fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(io::fnv1a_hex("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(io::fnv1a_hex("foobar"), "85944171f73967e8");
}

TEST(IoTest, ValueTypesRoundTripExactly) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coord(0, 1000);
  for (int i = 0; i < 100; ++i) {
    const double a = coord(gen), b = coord(gen), c = coord(gen), d = coord(gen);
    const Box box = make_box(std::min(a, b), std::min(c, d), std::max(a, b) + 1e-9,
                             std::max(c, d) + 1e-9);
    expect_round_trip(box, io::box_from_json);
    expect_round_trip(GroundTruthObject{box, 3, Visibility::kHidden}, io::truth_from_json);
    expect_round_trip(Detection{box, 2, coord(gen) / 1000, std::nextafter(1.0, 0.0)},
                      io::detection_from_json);
  }
  expect_round_trip(LabelSpace::with_known_count(20, true), io::label_space_from_json);
  expect_round_trip(LabelSpace::with_known_count(3, false), io::label_space_from_json);
  expect_round_trip(TauObj{0.7236, 0.5, 0.2236, 1.0, 4}, io::tau_from_json);
}

TEST(IoTest, ConfigsRoundTrip) {
  ScenarioConfig scenario;
  scenario.seed = 99;
  scenario.feature_noise_scale = 0.1 + 0.2;
  expect_round_trip(scenario, io::scenario_config_from_json);

  TrainConfig train;
  train.mode = TrainingMode::kStandard;
  train.iterations = {1, 2, 3, 4};
  train.lambda = -0.5;
  expect_round_trip(train, io::train_config_from_json);

  RejectionConfig rejection;
  rejection.strategy = RejectionStrategy::kEnergy;
  rejection.energy_direction = EnergyDirection::kLiteral;
  rejection.tau_energy = 2.5;
  expect_round_trip(rejection, io::rejection_config_from_json);
}

TEST(IoTest, MissingConfigFieldsKeepDefaults) {
  const auto c = io::scenario_config_from_json(io::Json::parse(R"({"seed": 3})"));
  ScenarioConfig expected;
  expected.seed = 3;
  EXPECT_EQ(c, expected);
}

TEST(IoTest, UnknownConfigFieldsAreRejectedByName) {
  try {
    io::train_config_from_json(io::Json::parse(R"({"learning_rate": 0.1, "lr": 0.2})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("'lr'"), std::string::npos);
  }
  EXPECT_EQ(code_of([] {
              io::rejection_config_from_json(io::Json::parse(R"({"tau_msp": "high"})"));
            }),
            ErrorCode::kInvalidArgument);
}

TEST(IoTest, ReportRoundTripsWithAbsentValues) {
  EvaluationReport r;
  r.training_mode = "unkad";
  r.rejection = "msp";
  r.scenario_hash = "0123456789abcdef";
  r.map_percent = 71.25;
  r.wi = std::nullopt;
  r.wi_no_rej = 0.125;
  r.u_f1_percent = 3.5;
  r.per_class_ap = {{0, "class_00", 3, 0.5}, {1, "class_01", 0, std::nullopt}};
  r.avg_obj_known = 0.99;
  r.counts = {4, 3, 2, 1, 5};
  r.config = io::Json::object();
  r.config["rejection"] = io::to_json(RejectionConfig{});
  expect_round_trip(r, io::report_from_json);
}

TEST(IoTest, MajorVersionAndKindAreChecked) {
  auto doc = io::header("osdet.model");
  EXPECT_NO_THROW(io::check_header(doc, "osdet.model"));
  EXPECT_EQ(code_of([&] { io::check_header(doc, "osdet.report"); }), ErrorCode::kFormat);
  doc["format_version"] = "1.7";
  EXPECT_NO_THROW(io::check_header(doc, "osdet.model"));
  doc["format_version"] = "2.0";
  EXPECT_EQ(code_of([&] { io::check_header(doc, "osdet.model"); }), ErrorCode::kFormat);
  doc.erase("format_version");
  EXPECT_EQ(code_of([&] { io::check_header(doc, "osdet.model"); }), ErrorCode::kFormat);
}

ScenarioConfig tiny_config() {
  ScenarioConfig c;
  c.num_images = 3;
  c.num_test_images = 2;
  c.seed = 11;
  return c;
}

TEST(IoTest, ScenarioFilesRoundTrip) {
  const auto dir = scratch("scenario");
  const Scenario s = generate_scenario(tiny_config(), 1);
  const std::string hash = io::write_scenario(dir, s);
  EXPECT_EQ(hash, io::scenario_hash(s.config));
  const auto back = io::read_scenario(dir);
  EXPECT_EQ(back.hash, hash);
  EXPECT_EQ(back.scenario.config, s.config);
  EXPECT_EQ(back.scenario.train, s.train);
  EXPECT_EQ(back.scenario.test, s.test);
}

TEST(IoTest, GoldenScenarioIsReproducedByteForByte) {
  const fs::path golden = fs::path(OSDET_TEST_DATA_DIR) / "golden_scenario";
  const auto config = io::scenario_config_from_json(
      io::Json::parse(io::read_text(fs::path(OSDET_TEST_DATA_DIR) / "golden_config.json")));
  const auto dir = scratch("golden");
  io::write_scenario(dir, generate_scenario(config, 3));
  for (const char* name : {"manifest.json", "train.jsonl", "test.jsonl"}) {
    EXPECT_EQ(io::read_text(dir / name), io::read_text(golden / name)) << name;
  }
}

TEST(IoTest, TamperedScenarioIsAManifestMismatch) {
  const auto dir = scratch("tamper");
  io::write_scenario(dir, generate_scenario(tiny_config(), 1));
  {
    std::ofstream out(dir / "test.jsonl", std::ios::app);
    out << "\n";
  }
  EXPECT_EQ(code_of([&] { io::read_scenario(dir); }), ErrorCode::kManifestMismatch);

  io::write_scenario(dir, generate_scenario(tiny_config(), 1));
  auto manifest = io::Json::parse(io::read_text(dir / "manifest.json"));
  manifest["config"]["seed"] = 12;
  io::write_text(dir / "manifest.json", io::dump(manifest));
  EXPECT_EQ(code_of([&] { io::read_scenario(dir); }), ErrorCode::kManifestMismatch);
}

TEST(IoTest, MissingFilesAreIoErrors) {
  const auto dir = scratch("missing");
  const auto code = code_of([&] { io::read_scenario(dir); });
  EXPECT_EQ(code, ErrorCode::kIo);
  EXPECT_FALSE(is_validation_error(code));
}

TEST(IoTest, ModelRoundTripsBitExactly) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> n(0, 1);
  io::ModelFile m;
  m.detector = ToyDetector::zeros(LabelSpace::with_known_count(4, true), 6);
  for (Eigen::Index i = 0; i < m.detector.classifier_weights.size(); ++i) {
    m.detector.classifier_weights(i) = n(gen) * 1e-7;
  }
  m.detector.objectness_weights(2) = 1.0 / 3.0;
  m.detector.objectness_bias = -0.0;
  m.detector.classifier_bias(5) = 5e-324;
  m.detector.tau = TauObj{0.9, 0.8, 0.1, 1.0, 12};
  m.detector.trace = {{1, 0, 0.6931471805599453}, {2, 50, 0.1}};
  m.train_config.seed = 4;
  m.scenario_hash = "feedfacecafebeef";
  const auto path = scratch("model") / "model.json";
  io::write_model(path, m);
  const auto back = io::read_model(path);
  EXPECT_EQ(back.detector, m.detector);
  EXPECT_EQ(back.train_config, m.train_config);
  EXPECT_EQ(back.scenario_hash, m.scenario_hash);
  io::write_model(path.parent_path() / "again.json", back);
  EXPECT_EQ(io::read_text(path), io::read_text(path.parent_path() / "again.json"));
}

TEST(IoTest, ModelWithInconsistentShapesIsRejected) {
  io::ModelFile m;
  m.detector = ToyDetector::zeros(LabelSpace::with_known_count(4, true), 6);
  auto j = io::model_to_json(m);
  j["classifier"]["weights"].erase(0);
  EXPECT_EQ(code_of([&] { io::model_from_json(j); }), ErrorCode::kLabelSpaceViolation);
  j = io::model_to_json(m);
  j["feature_dim"] = 7;
  EXPECT_EQ(code_of([&] { io::model_from_json(j); }), ErrorCode::kFormat);
}

TEST(IoTest, DetectionsRoundTripPerImage) {
  const Box a = make_box(0, 0, 10, 10), b = make_box(5, 5, 20, 30);
  std::vector<ImageEval> images(3);
  images[0].detections = {{a, 1, 0.5, 0.9}, {b, 6, 0.75, 0.95}};
  images[2].detections = {{b, 0, 0.25, 0.6}};
  const auto path = scratch("detections") / "detections.jsonl";
  io::write_detections(path, {0, 1, 2}, images, "00");
  const auto back = io::read_detections(path);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back[i], images[i].detections);
}

TEST(IoTest, DumpIsIndentedWithTrailingNewline) {
  io::Json j = io::Json::object();
  j["b"] = 1;
  j["a"] = 0.1;
  EXPECT_EQ(io::dump(j), "{\n  \"b\": 1,\n  \"a\": 0.1\n}\n");
}

}  // namespace
}  // namespace osdet
