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

#include "osdet/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace osdet::io {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorCode::kFormat, what);
}

/// Reads declared fields and rejects anything else.
class FieldReader {
 public:
  FieldReader(const Json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) format_error(what_ + " must be a JSON object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    known_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  what_ + "." + key + " has the wrong type (" + e.what() + ")");
    }
  }

  void allow(const char* key) { known_.insert(key); }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!known_.count(item.key())) {
        throw Error(ErrorCode::kInvalidArgument,
                    "unknown field '" + item.key() + "' in " + what_);
      }
    }
  }

 private:
  const Json& j_;
  std::string what_;
  std::set<std::string> known_;
};

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) format_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    format_error(std::string("field '") + key + "': " + e.what());
  }
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<double>(j, key);
}

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from(const Json& j) {
  if (!j.is_array()) format_error("expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return in;
}

Json parse(const std::string& text, const fs::path& path) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    format_error(path.string() + ": " + e.what());
  }
}

std::vector<Json> read_lines(const fs::path& path) {
  auto in = open_in(path);
  std::vector<Json> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    lines.push_back(parse(line, path));
  }
  if (lines.empty()) format_error(path.string() + " is empty");
  return lines;
}

Json read_document(const fs::path& path) { return parse(read_text(path), path); }

void write_split(const fs::path& path, const std::vector<SceneImage>& images,
                 const char* split, const ScenarioConfig& config, const std::string& hash) {
  auto out = open_out(path);
  Json head = header("osdet.scene_split");
  head["split"] = split;
  head["seed"] = config.seed;
  head["config_hash"] = hash;
  out << head.dump() << '\n';
  for (const auto& image : images) out << to_json(image).dump() << '\n';
}

std::vector<SceneImage> read_split(const fs::path& path, const std::string& hash) {
  const auto lines = read_lines(path);
  check_header(lines.front(), "osdet.scene_split");
  if (get<std::string>(lines.front(), "config_hash") != hash) {
    throw Error(ErrorCode::kManifestMismatch,
                path.string() + " was generated from a different configuration");
  }
  std::vector<SceneImage> images;
  for (std::size_t i = 1; i < lines.size(); ++i) images.push_back(scene_image_from_json(lines[i]));
  return images;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json header(std::string_view kind) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = std::string(kind);
  return j;
}

void check_header(const Json& doc, std::string_view kind) {
  if (!doc.is_object() || !doc.contains("format_version")) {
    format_error("missing format_version");
  }
  const auto version = get<std::string>(doc, "format_version");
  int major = -1;
  try {
    major = std::stoi(version.substr(0, version.find('.')));
  } catch (const std::exception&) {
    format_error("malformed format_version '" + version + "'");
  }
  if (major != kFormatMajor) {
    format_error("unsupported format_version '" + version + "'");
  }
  if (get<std::string>(doc, "kind") != kind) {
    format_error("expected a " + std::string(kind) + " document, got " +
                 get<std::string>(doc, "kind"));
  }
}

Json to_json(const Box& box) { return Json::array({box.x_min, box.y_min, box.x_max, box.y_max}); }

Box box_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) format_error("a box is an array of four numbers");
  return make_box(j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                  j[3].get<double>());
}

Json to_json(const GroundTruthObject& truth) {
  Json j;
  j["box"] = to_json(truth.box);
  j["class_id"] = truth.class_id;
  j["visibility"] = truth.visibility == Visibility::kAnnotated ? "annotated" : "hidden";
  return j;
}

GroundTruthObject truth_from_json(const Json& j) {
  GroundTruthObject t;
  t.box = box_from_json(j.at("box"));
  t.class_id = get<ClassId>(j, "class_id");
  const auto vis = get<std::string>(j, "visibility");
  if (vis == "annotated") {
    t.visibility = Visibility::kAnnotated;
  } else if (vis == "hidden") {
    t.visibility = Visibility::kHidden;
  } else {
    format_error("unknown visibility '" + vis + "'");
  }
  return t;
}

Json to_json(const Detection& d) {
  Json j;
  j["box"] = to_json(d.box);
  j["class_id"] = d.predicted_class;
  j["confidence"] = d.confidence;
  j["objectness"] = d.source_objectness;
  return j;
}

Detection detection_from_json(const Json& j) {
  Detection d;
  d.box = box_from_json(j.at("box"));
  d.predicted_class = get<ClassId>(j, "class_id");
  d.confidence = get<double>(j, "confidence");
  d.source_objectness = get<double>(j, "objectness");
  return d;
}

Json to_json(const SceneImage& image) {
  Json j;
  j["image_id"] = image.image_id;
  j["width"] = image.width;
  j["height"] = image.height;
  Json truths = Json::array();
  for (const auto& t : image.truths) truths.push_back(to_json(t));
  j["truths"] = std::move(truths);
  Json regions = Json::array();
  for (const auto& r : image.regions) {
    Json rj;
    rj["box"] = to_json(r.box);
    rj["features"] = vector_json(r.features);
    regions.push_back(std::move(rj));
  }
  j["regions"] = std::move(regions);
  return j;
}

SceneImage scene_image_from_json(const Json& j) {
  SceneImage image;
  image.image_id = get<std::size_t>(j, "image_id");
  image.width = get<double>(j, "width");
  image.height = get<double>(j, "height");
  for (const auto& t : j.at("truths")) image.truths.push_back(truth_from_json(t));
  for (const auto& r : j.at("regions")) {
    image.regions.push_back({box_from_json(r.at("box")), vector_from(r.at("features"))});
  }
  return image;
}

Json to_json(const LabelSpace& labels) {
  Json j;
  j["known_classes"] = labels.known_classes();
  j["has_unknown_class"] = labels.has_unknown_class();
  j["background_id"] = labels.background_id();
  j["unknown_id"] = labels.unknown_id();
  return j;
}

LabelSpace label_space_from_json(const Json& j) {
  LabelSpace labels(get<std::vector<std::string>>(j, "known_classes"),
                    get<bool>(j, "has_unknown_class"));
  if (get<ClassId>(j, "background_id") != labels.background_id() ||
      get<ClassId>(j, "unknown_id") != labels.unknown_id()) {
    format_error("background/unknown ids disagree with the known class count");
  }
  return labels;
}

Json to_json(const TauObj& tau) {
  Json j;
  j["value"] = tau.value;
  j["mu"] = tau.mu;
  j["sigma"] = tau.sigma;
  j["lambda"] = tau.lambda;
  j["sample_count"] = tau.sample_count;
  return j;
}

TauObj tau_from_json(const Json& j) {
  return TauObj{get<double>(j, "value"), get<double>(j, "mu"), get<double>(j, "sigma"),
                get<double>(j, "lambda"), get<std::size_t>(j, "sample_count")};
}

Json to_json(const ScenarioConfig& c) {
  Json j;
  j["num_images"] = c.num_images;
  j["num_test_images"] = c.num_test_images;
  j["objects_per_image_mean"] = c.objects_per_image_mean;
  j["objects_per_image_spread"] = c.objects_per_image_spread;
  j["proposals_per_object"] = c.proposals_per_object;
  j["background_region_rate"] = c.background_region_rate;
  j["num_known_classes"] = c.num_known_classes;
  j["num_unknown_clusters"] = c.num_unknown_clusters;
  j["unknown_object_rate"] = c.unknown_object_rate;
  j["feature_dim"] = c.feature_dim;
  j["class_mean_separation"] = c.class_mean_separation;
  j["object_cue"] = c.object_cue;
  j["object_cue_noise"] = c.object_cue_noise;
  j["feature_noise_scale"] = c.feature_noise_scale;
  j["box_jitter_scale"] = c.box_jitter_scale;
  j["image_width"] = c.image_width;
  j["image_height"] = c.image_height;
  j["seed"] = c.seed;
  return j;
}

ScenarioConfig scenario_config_from_json(const Json& j) {
  ScenarioConfig c;
  FieldReader r(j, "scenario config");
  r.allow("format_version");
  r.read("num_images", c.num_images);
  r.read("num_test_images", c.num_test_images);
  r.read("objects_per_image_mean", c.objects_per_image_mean);
  r.read("objects_per_image_spread", c.objects_per_image_spread);
  r.read("proposals_per_object", c.proposals_per_object);
  r.read("background_region_rate", c.background_region_rate);
  r.read("num_known_classes", c.num_known_classes);
  r.read("num_unknown_clusters", c.num_unknown_clusters);
  r.read("unknown_object_rate", c.unknown_object_rate);
  r.read("feature_dim", c.feature_dim);
  r.read("class_mean_separation", c.class_mean_separation);
  r.read("object_cue", c.object_cue);
  r.read("object_cue_noise", c.object_cue_noise);
  r.read("feature_noise_scale", c.feature_noise_scale);
  r.read("box_jitter_scale", c.box_jitter_scale);
  r.read("image_width", c.image_width);
  r.read("image_height", c.image_height);
  r.read("seed", c.seed);
  r.finish();
  return c;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["mode"] = to_string(c.mode);
  j["learning_rate"] = c.learning_rate;
  j["iterations"] = c.iterations;
  j["batch_size"] = c.batch_size;
  j["lambda"] = c.lambda;
  j["seed"] = c.seed;
  j["trace_every"] = c.trace_every;
  return j;
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  FieldReader r(j, "train config");
  r.allow("format_version");
  std::string mode = to_string(c.mode);
  r.read("mode", mode);
  c.mode = parse_training_mode(mode);
  r.read("learning_rate", c.learning_rate);
  r.read("iterations", c.iterations);
  r.read("batch_size", c.batch_size);
  r.read("lambda", c.lambda);
  r.read("seed", c.seed);
  r.read("trace_every", c.trace_every);
  r.finish();
  return c;
}

Json to_json(const RejectionConfig& c) {
  Json j;
  j["strategy"] = to_string(c.strategy);
  j["tau_msp"] = c.tau_msp;
  j["tau_energy"] = c.tau_energy;
  j["tau_odin"] = c.tau_odin;
  j["energy_temperature"] = c.energy_temperature;
  j["odin_temperature"] = c.odin_temperature;
  j["epsilon"] = c.epsilon;
  j["energy_direction"] = to_string(c.energy_direction);
  j["nms_iou"] = c.nms_iou;
  return j;
}

RejectionConfig rejection_config_from_json(const Json& j) {
  RejectionConfig c;
  FieldReader r(j, "rejection config");
  std::string strategy = to_string(c.strategy);
  std::string direction = to_string(c.energy_direction);
  r.read("strategy", strategy);
  r.read("tau_msp", c.tau_msp);
  r.read("tau_energy", c.tau_energy);
  r.read("tau_odin", c.tau_odin);
  r.read("energy_temperature", c.energy_temperature);
  r.read("odin_temperature", c.odin_temperature);
  r.read("epsilon", c.epsilon);
  r.read("energy_direction", direction);
  r.read("nms_iou", c.nms_iou);
  r.finish();
  c.strategy = parse_strategy(strategy);
  c.energy_direction = parse_energy_direction(direction);
  return c;
}

Json to_json(const EvaluationReport& report) {
  Json j = header("osdet.report");
  j["training_mode"] = report.training_mode;
  j["rejection"] = report.rejection;
  j["scenario_hash"] = report.scenario_hash;
  j["iou_threshold"] = report.iou_threshold;
  j["map_percent"] = optional_number(report.map_percent);
  j["wi_no_rej"] = optional_number(report.wi_no_rej);
  j["wi"] = optional_number(report.wi);
  j["u_recall_percent"] = report.u_recall_percent;
  j["u_precision_percent"] = report.u_precision_percent;
  j["u_f1_percent"] = report.u_f1_percent;
  Json per_class = Json::array();
  for (const auto& c : report.per_class_ap) {
    Json cj;
    cj["class_id"] = c.class_id;
    cj["name"] = c.name;
    cj["num_truths"] = c.num_truths;
    cj["ap"] = optional_number(c.ap);
    per_class.push_back(std::move(cj));
  }
  j["per_class_ap"] = std::move(per_class);
  j["avg_obj_known"] = optional_number(report.avg_obj_known);
  j["avg_obj_unknown"] = optional_number(report.avg_obj_unknown);
  Json counts;
  counts["tp_c"] = report.counts.tp_c;
  counts["fp_c"] = report.counts.fp_c;
  counts["tp_o"] = report.counts.tp_o;
  counts["fp_o"] = report.counts.fp_o;
  counts["fn_o"] = report.counts.fn_o;
  j["counts"] = std::move(counts);
  j["config"] = report.config;
  return j;
}

EvaluationReport report_from_json(const Json& j) {
  check_header(j, "osdet.report");
  EvaluationReport r;
  r.training_mode = get<std::string>(j, "training_mode");
  r.rejection = get<std::string>(j, "rejection");
  r.scenario_hash = get<std::string>(j, "scenario_hash");
  r.iou_threshold = get<double>(j, "iou_threshold");
  r.map_percent = optional_from(j, "map_percent");
  r.wi_no_rej = optional_from(j, "wi_no_rej");
  r.wi = optional_from(j, "wi");
  r.u_recall_percent = get<double>(j, "u_recall_percent");
  r.u_precision_percent = get<double>(j, "u_precision_percent");
  r.u_f1_percent = get<double>(j, "u_f1_percent");
  for (const auto& cj : j.at("per_class_ap")) {
    r.per_class_ap.push_back({get<ClassId>(cj, "class_id"), get<std::string>(cj, "name"),
                              get<std::size_t>(cj, "num_truths"), optional_from(cj, "ap")});
  }
  r.avg_obj_known = optional_from(j, "avg_obj_known");
  r.avg_obj_unknown = optional_from(j, "avg_obj_unknown");
  const auto& c = j.at("counts");
  r.counts = {get<std::size_t>(c, "tp_c"), get<std::size_t>(c, "fp_c"),
              get<std::size_t>(c, "tp_o"), get<std::size_t>(c, "fp_o"),
              get<std::size_t>(c, "fn_o")};
  r.config = j.at("config");
  return r;
}

std::string scenario_hash(const ScenarioConfig& config) {
  return fnv1a_hex(to_json(config).dump());
}

std::string write_scenario(const fs::path& dir, const Scenario& scenario) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const std::string hash = scenario_hash(scenario.config);
  write_split(dir / "train.jsonl", scenario.train, "train", scenario.config, hash);
  write_split(dir / "test.jsonl", scenario.test, "test", scenario.config, hash);

  Json manifest = header("osdet.scenario_manifest");
  manifest["seed"] = scenario.config.seed;
  manifest["config_hash"] = hash;
  manifest["config"] = to_json(scenario.config);
  manifest["files"] = {{"train", "train.jsonl"}, {"test", "test.jsonl"}};
  manifest["train_hash"] = fnv1a_hex(read_text(dir / "train.jsonl"));
  manifest["test_hash"] = fnv1a_hex(read_text(dir / "test.jsonl"));
  write_text(dir / "manifest.json", dump(manifest));
  return hash;
}

ScenarioFiles read_scenario(const fs::path& dir) {
  const Json manifest = read_document(dir / "manifest.json");
  check_header(manifest, "osdet.scenario_manifest");
  ScenarioFiles out;
  out.scenario.config = scenario_config_from_json(manifest.at("config"));
  out.scenario.config.validate();
  out.hash = get<std::string>(manifest, "config_hash");
  if (out.hash != scenario_hash(out.scenario.config)) {
    throw Error(ErrorCode::kManifestMismatch,
                (dir / "manifest.json").string() + ": config hash does not match config");
  }
  for (const char* split : {"train", "test"}) {
    const auto file = dir / (std::string(split) + ".jsonl");
    if (get<std::string>(manifest, (std::string(split) + "_hash").c_str()) !=
        fnv1a_hex(read_text(file))) {
      throw Error(ErrorCode::kManifestMismatch,
                  file.string() + " does not match the hash recorded in the manifest");
    }
  }
  out.scenario.train = read_split(dir / "train.jsonl", out.hash);
  out.scenario.test = read_split(dir / "test.jsonl", out.hash);
  return out;
}

Json model_to_json(const ModelFile& model) {
  const ToyDetector& d = model.detector;
  Json j = header("osdet.model");
  j["scenario_hash"] = model.scenario_hash;
  j["seed"] = model.train_config.seed;
  j["train_config"] = to_json(model.train_config);
  j["label_space"] = to_json(d.labels);
  j["feature_dim"] = d.feature_dim();
  j["objectness"] = {{"weights", vector_json(d.objectness_weights)},
                     {"bias", d.objectness_bias}};
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < d.classifier_weights.rows(); ++r) {
    rows.push_back(vector_json(d.classifier_weights.row(r).transpose()));
  }
  j["classifier"] = {{"weights", std::move(rows)}, {"bias", vector_json(d.classifier_bias)}};
  j["tau_obj"] = d.tau ? to_json(*d.tau) : Json(nullptr);
  Json trace = Json::array();
  for (const auto& t : d.trace) trace.push_back(Json::array({t.step, t.iteration, t.loss}));
  j["trace"] = std::move(trace);
  return j;
}

ModelFile model_from_json(const Json& j) {
  check_header(j, "osdet.model");
  ModelFile m;
  m.scenario_hash = get<std::string>(j, "scenario_hash");
  m.train_config = train_config_from_json(j.at("train_config"));
  ToyDetector& d = m.detector;
  d.labels = label_space_from_json(j.at("label_space"));
  d.objectness_weights = vector_from(j.at("objectness").at("weights"));
  d.objectness_bias = get<double>(j.at("objectness"), "bias");
  const auto& rows = j.at("classifier").at("weights");
  const auto dim = static_cast<Eigen::Index>(get<int>(j, "feature_dim"));
  if (d.objectness_weights.size() != dim) format_error("objectness weights have the wrong width");
  d.classifier_weights.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Eigen::VectorXd row = vector_from(rows[r]);
    if (row.size() != dim) format_error("classifier row has the wrong width");
    d.classifier_weights.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  d.classifier_bias = vector_from(j.at("classifier").at("bias"));
  if (auto violation = validate_label_space(d.labels, static_cast<int>(rows.size()))) {
    throw Error(ErrorCode::kLabelSpaceViolation, *violation);
  }
  if (d.classifier_bias.size() != d.classifier_weights.rows()) {
    format_error("classifier bias has the wrong width");
  }
  if (!j.at("tau_obj").is_null()) d.tau = tau_from_json(j.at("tau_obj"));
  for (const auto& t : j.at("trace")) {
    d.trace.push_back({t.at(0).get<int>(), t.at(1).get<std::size_t>(), t.at(2).get<double>()});
  }
  return m;
}

void write_model(const fs::path& path, const ModelFile& model) {
  write_text(path, dump(model_to_json(model)));
}

ModelFile read_model(const fs::path& path) { return model_from_json(read_document(path)); }

void write_pseudo_labels(const fs::path& path, const std::vector<PseudoLabelPass>& passes,
                         std::uint64_t seed, const std::string& scenario_hash) {
  auto out = open_out(path);
  Json head = header("osdet.pseudo_labels");
  head["seed"] = seed;
  head["scenario_hash"] = scenario_hash;
  out << head.dump() << '\n';
  for (const auto& pass : passes) {
    Json pj;
    pj["record"] = "pass";
    pj["pass"] = pass.pass;
    pj["tau_obj"] = to_json(pass.tau);
    pj["total"] = pass.total();
    out << pj.dump() << '\n';
    for (const auto& image : pass.images) {
      if (image.labels.empty()) continue;
      Json ij;
      ij["record"] = "image";
      ij["pass"] = pass.pass;
      ij["image_id"] = image.image_id;
      Json labels = Json::array();
      for (const auto& l : image.labels) {
        Json lj;
        lj["region_index"] = l.proposal_index;
        lj["box"] = to_json(l.region.box);
        lj["objectness"] = l.objectness;
        lj["max_gt_iou"] = l.max_gt_iou;
        labels.push_back(std::move(lj));
      }
      ij["labels"] = std::move(labels);
      out << ij.dump() << '\n';
    }
  }
}

AuditFile read_pseudo_labels(const fs::path& path) {
  const auto lines = read_lines(path);
  check_header(lines.front(), "osdet.pseudo_labels");
  AuditFile audit;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    const auto record = get<std::string>(l, "record");
    if (record == "pass") {
      audit.taus.emplace_back(get<int>(l, "pass"), tau_from_json(l.at("tau_obj")));
    } else if (record == "image") {
      for (const auto& lj : l.at("labels")) {
        audit.entries.push_back({get<int>(l, "pass"), get<std::size_t>(l, "image_id"),
                                 get<std::size_t>(lj, "region_index"),
                                 box_from_json(lj.at("box")), get<double>(lj, "objectness"),
                                 get<double>(lj, "max_gt_iou")});
      }
    } else {
      format_error("unknown record type '" + record + "'");
    }
  }
  return audit;
}

void write_trace_csv(const fs::path& path, const std::vector<TracePoint>& trace,
                     std::uint64_t seed) {
  auto out = open_out(path);
  out << "# format_version=" << kFormatVersion << " kind=osdet.loss_trace seed=" << seed
      << '\n';
  out << "step,iteration,loss\n";
  char buf[64];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof(buf), "%.17g", t.loss);
    out << t.step << ',' << t.iteration << ',' << buf << '\n';
  }
}

void write_detections(const fs::path& path, const std::vector<std::size_t>& image_ids,
                      const std::vector<ImageEval>& images,
                      const std::string& scenario_hash) {
  auto out = open_out(path);
  Json head = header("osdet.detections");
  head["scenario_hash"] = scenario_hash;
  out << head.dump() << '\n';
  for (std::size_t i = 0; i < images.size(); ++i) {
    Json ij;
    ij["image_id"] = image_ids[i];
    Json dets = Json::array();
    for (const auto& d : images[i].detections) dets.push_back(to_json(d));
    ij["detections"] = std::move(dets);
    out << ij.dump() << '\n';
  }
}

std::vector<std::vector<Detection>> read_detections(const fs::path& path) {
  const auto lines = read_lines(path);
  check_header(lines.front(), "osdet.detections");
  std::vector<std::vector<Detection>> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<Detection> dets;
    for (const auto& dj : lines[i].at("detections")) dets.push_back(detection_from_json(dj));
    out.push_back(std::move(dets));
  }
  return out;
}

void write_report(const fs::path& path, const EvaluationReport& report) {
  write_text(path, dump(to_json(report)));
}

EvaluationReport read_report(const fs::path& path) {
  return report_from_json(read_document(path));
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace osdet::io
