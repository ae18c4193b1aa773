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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "osdet/commands.hpp"
#include "osdet/detector.hpp"
#include "osdet/io.hpp"
#include "osdet/metrics.hpp"
#include "osdet/pipeline.hpp"
#include "osdet/pseudolabel.hpp"
#include "osdet/rejection.hpp"
#include "osdet/scenario.hpp"
#include "osdet/training.hpp"

namespace {

using namespace osdet;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first few failures and keeps a pass flag.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) notes_ << (failures_ > 1 ? "; " : "") << what;
  }
  void near_rel(double got, double want, double tol, const std::string& what) {
    const double err = oracle::relative_error(got, want);
    worst_ = std::max(worst_, err);
    std::ostringstream os;
    os << what << " rel err " << err;
    expect(err < tol, os.str());
  }
  void note(const std::string& s) { extra_ << (extra_.tellp() > 0 ? ", " : "") << s; }
  double worst() const { return worst_; }
  Outcome done() const {
    Outcome o;
    o.pass = failures_ == 0;
    o.detail = o.pass ? extra_.str() : std::to_string(failures_) + " failures: " + notes_.str();
    return o;
  }

 private:
  int failures_ = 0;
  double worst_ = 0.0;
  std::ostringstream notes_;
  std::ostringstream extra_;
};

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1e", v);
  return buf;
}

oracle::Counts to_oracle(const ConfusionCounts& c) {
  return {static_cast<long>(c.tp_c), static_cast<long>(c.fp_c), static_cast<long>(c.tp_o),
          static_cast<long>(c.fp_o), static_cast<long>(c.fn_o)};
}

ConfusionCounts random_counts(std::mt19937_64& gen, bool no_open_tp = false) {
  std::uniform_int_distribution<std::size_t> n(0, 60);
  ConfusionCounts c{n(gen), n(gen), no_open_tp ? 0 : n(gen), n(gen), n(gen)};
  if (c.tp_c == 0) c.tp_c = 1;
  return c;
}

void compare_metrics(Check& check, const ConfusionCounts& c) {
  const auto o = to_oracle(c);
  const auto wi = wilderness_impact(c);
  const auto wi_ref = oracle::wi(o);
  check.expect(wi.has_value() == wi_ref.has_value(), "WI presence");
  if (wi && wi_ref) check.near_rel(*wi, *wi_ref, 1e-12, "WI");
  const auto nr = wi_no_rejection(c);
  const auto nr_ref = oracle::wi_no_rej(o);
  check.expect(nr.has_value() == nr_ref.has_value(), "WI_no_rej presence");
  if (nr && nr_ref) check.near_rel(*nr, *nr_ref, 1e-12, "WI_no_rej");
  const auto prf = unknown_prf(c);
  const auto ref = oracle::prf(o);
  check.near_rel(prf.recall, ref.recall, 1e-12, "U_Recall");
  check.near_rel(prf.precision, ref.precision, 1e-12, "U_Precision");
  check.near_rel(prf.f1, ref.f1, 1e-12, "U_F1");
}

Outcome formula_oracles() {
  Check check;
  std::mt19937_64 gen(1001);
  for (int i = 0; i < 100; ++i) compare_metrics(check, random_counts(gen));

  // Micro-scenarios: random boxes and classes, counted by the library and by
  // the brute-force matcher, then pushed through the same formulas.
  const int known = 3;
  const auto space = LabelSpace::with_known_count(known, true);
  std::uniform_int_distribution<int> count(0, 8), cls(0, known + 1);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    std::vector<GroundTruthObject> truths;
    std::vector<Detection> dets;
    const int nt = count(gen), nd = count(gen);
    for (int t = 0; t < nt; ++t) {
      int c = cls(gen);
      if (c == known) c = known + 1;
      truths.push_back({oracle::random_box(gen, 60.0), c, Visibility::kAnnotated});
    }
    for (int d = 0; d < nd; ++d) {
      int c = cls(gen);
      if (c == known) c = 0;
      // Half the detections are jittered truths so that matches happen.
      Box box = oracle::random_box(gen, 60.0);
      if (!truths.empty() && d % 2 == 0) {
        box = truths[static_cast<std::size_t>(d) % truths.size()].box;
        box.x_max += conf(gen) * 3.0;
      }
      dets.push_back({box, c, conf(gen), conf(gen)});
    }
    const auto lib = confusion_counts(dets, truths, space, 0.5);
    const auto ref = oracle::counts(dets, truths, known, 0.5);
    check.expect(to_oracle(lib).tp_c == ref.tp_c && to_oracle(lib).fp_c == ref.fp_c &&
                     to_oracle(lib).tp_o == ref.tp_o && to_oracle(lib).fp_o == ref.fp_o &&
                     to_oracle(lib).fn_o == ref.fn_o,
                 "micro-scenario counts differ");
    compare_metrics(check, lib);
  }
  check.note("200 cases, worst rel err " + sci(check.worst()));
  return check.done();
}

Outcome wi_reduction() {
  Check check;
  std::mt19937_64 gen(1002);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto c = random_counts(gen, true);
    const auto wi = wilderness_impact(c);
    const auto nr = wi_no_rejection(c);
    check.expect(wi && nr, "WI undefined");
    if (!wi || !nr) continue;
    worst = std::max(worst, std::abs(*wi - *nr));
    check.expect(std::abs(*wi - *nr) < 1e-12, "WI != WI_no_rej");
  }
  check.note("max |WI - WI_no_rej| = " + sci(worst));
  return check.done();
}

Outcome tau_exactness() {
  Check check;
  const std::vector<double> worked = {0.2, 0.4, 0.6, 0.8};
  const double got = compute_tau_obj(worked, 1.0).value;
  check.expect(std::abs(got - (0.5 + std::sqrt(0.05))) < 1e-12, "worked set");

  std::mt19937_64 gen(1003);
  std::uniform_real_distribution<double> u(0.0, 1.0), shift(-0.5, 0.5);
  std::uniform_int_distribution<int> size(1, 200);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> w(static_cast<std::size_t>(size(gen)));
    for (auto& x : w) x = u(gen);
    const std::vector<double> flat(w.size(), w[0]);
    const auto tau_flat = compute_tau_obj(flat, 1.0);
    check.expect(std::abs(tau_flat.sigma) < 1e-12 && std::abs(tau_flat.value - w[0]) < 1e-12,
                 "zero-variance set");
    const double c = shift(gen);
    auto moved = w;
    for (auto& x : moved) x += c;
    const auto tau = compute_tau_obj(w, 1.0);
    const auto tau_moved = compute_tau_obj(moved, 1.0);
    check.expect(std::abs(tau_moved.value - (tau.value + c)) < 1e-12 &&
                     std::abs(tau_moved.sigma - tau.sigma) < 1e-12,
                 "shift consistency");
  }
  check.note("tau(worked) = " + fixed(got, 15));
  return check.done();
}

Outcome pseudo_label_soundness() {
  Check check;
  std::size_t total = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScenarioConfig sc;
    sc.seed = seed;
    const auto scenario = generate_scenario(sc, 4);
    TrainConfig tc;
    tc.seed = seed;
    const auto result = run_four_step(scenario, tc);
    for (const auto& pass : result.audit) {
      for (const auto& image : pass.images) {
        for (const auto& label : image.labels) {
          ++total;
          check.expect(label.objectness > pass.tau.value, "objectness not above tau_obj");
          check.expect(label.max_gt_iou <= 0.3, "overlaps an annotated truth");
        }
      }
    }
  }
  check.expect(total > 0, "no pseudo-labels emitted");
  check.note(std::to_string(total) + " pseudo-labels checked");
  return check.done();
}

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = n(gen);
  return m;
}

double rel_norm(const Eigen::VectorXd& analytic, const Eigen::VectorXd& fd) {
  return (analytic - fd).norm() / std::max(analytic.norm(), 1e-12);
}

Outcome gradient_checks() {
  Check check;
  std::mt19937_64 gen(1005);
  const double h = 1e-5;
  double worst = 0.0;
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> label(0, 4);
  for (int trial = 0; trial < 50; ++trial) {
    // Logistic objectness loss.
    const Eigen::MatrixXd x = random_matrix(gen, 8, 6);
    const Eigen::VectorXd w = random_matrix(gen, 6, 1);
    const double b = random_matrix(gen, 1, 1)(0);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) y(i) = coin(gen);
    const auto lg = logistic_loss<double>(w, b, x, y);
    Eigen::VectorXd analytic(7), fd(7);
    analytic << lg.grad_weights, lg.grad_bias;
    for (int i = 0; i < 7; ++i) {
      Eigen::VectorXd up = w, down = w;
      double bu = b, bd = b;
      if (i < 6) {
        up(i) += h;
        down(i) -= h;
      } else {
        bu += h;
        bd -= h;
      }
      fd(i) = (logistic_loss<double>(up, bu, x, y).loss -
               logistic_loss<double>(down, bd, x, y).loss) / (2 * h);
    }
    worst = std::max(worst, rel_norm(analytic, fd));

    // Softmax cross-entropy.
    const Eigen::MatrixXd sw = random_matrix(gen, 5, 6);
    const Eigen::VectorXd sb = random_matrix(gen, 5, 1);
    std::vector<int> labels(8);
    for (auto& v : labels) v = label(gen);
    const auto sg = softmax_cross_entropy<double>(sw, sb, x, labels);
    Eigen::VectorXd sa(sw.size() + sb.size()), sf(sw.size() + sb.size());
    for (Eigen::Index i = 0; i < sw.size(); ++i) {
      Eigen::MatrixXd up = sw, down = sw;
      up(i) += h;
      down(i) -= h;
      sa(i) = sg.grad_weights(i);
      sf(i) = (softmax_cross_entropy<double>(up, sb, x, labels).loss -
               softmax_cross_entropy<double>(down, sb, x, labels).loss) / (2 * h);
    }
    for (Eigen::Index i = 0; i < sb.size(); ++i) {
      Eigen::VectorXd up = sb, down = sb;
      up(i) += h;
      down(i) -= h;
      sa(sw.size() + i) = sg.grad_bias(i);
      sf(sw.size() + i) = (softmax_cross_entropy<double>(sw, up, x, labels).loss -
                           softmax_cross_entropy<double>(sw, down, x, labels).loss) / (2 * h);
    }
    worst = std::max(worst, rel_norm(sa, sf));

    // Input gradient of log max softmax over known classes and background.
    ToyDetector d = ToyDetector::zeros(LabelSpace::with_known_count(3, true), 6);
    // Moderate logits: a saturated softmax has a gradient far below the
    // finite-difference roundoff.
    d.classifier_weights = 0.5 * random_matrix(gen, d.labels.logit_width(), 6);
    d.classifier_bias = 0.5 * random_matrix(gen, d.labels.logit_width(), 1);
    const Eigen::VectorXd input = random_matrix(gen, 6, 1);
    auto objective = [&](const Eigen::VectorXd& v) {
      const Eigen::VectorXd s = closed_set_logits(classifier_forward(d, v), d.labels);
      return s.maxCoeff() - log_sum_exp(s);
    };
    const Eigen::VectorXd og = gradient_oracle(d).gradient(input);
    Eigen::VectorXd of(6);
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd up = input, down = input;
      up(i) += h;
      down(i) -= h;
      of(i) = (objective(up) - objective(down)) / (2 * h);
    }
    worst = std::max(worst, rel_norm(og, of));
  }
  check.expect(worst < 1e-5, "relative error " + sci(worst));
  check.note("150 points, worst rel err " + sci(worst));
  return check.done();
}

Outcome rejection_algebra() {
  Check check;
  std::mt19937_64 gen(1006);
  std::uniform_real_distribution<double> u(-10, 10), shift(-20, 20), unit(0, 1);
  const auto space = LabelSpace::with_known_count(5, true);
  for (int i = 0; i < 1000; ++i) {
    Eigen::VectorXd s(space.logit_width());
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = u(gen);
    const auto known = known_logits(s, space);
    const auto odin = odin_reject(known, 1.0, 0.4);
    const auto msp = msp_reject(known, 0.4);
    check.expect(odin.score == msp.score && odin.unknown == msp.unknown, "ODIN(T=1) != MSP");

    const double c = shift(gen);
    const Eigen::VectorXd t = (s.array() + c).matrix();
    const auto cs = closed_set_logits(s, space);
    const auto ct = closed_set_logits(t, space);
    check.expect(std::abs(msp_reject(cs, 0.5).score - msp_reject(ct, 0.5).score) < 1e-12,
                 "MSP shift");
    check.expect(std::abs(odin_reject(known_logits(s, space), 5.0, 0.4).score -
                          odin_reject(known_logits(t, space), 5.0, 0.4).score) < 1e-12,
                 "ODIN shift");
    check.expect(std::abs(energy_score(ct, 1.0) - (energy_score(cs, 1.0) - c)) < 1e-9,
                 "energy shift");
    check.expect(argmax(s) == argmax(t), "argmax shift");

    // Per-vector threshold monotonicity: once flagged, a stricter threshold
    // keeps the flag.
    const double obj = unit(gen);
    bool msp_prev = false, odin_prev = false, neg_prev = false, lit_prev = false,
         direct_prev = false;
    for (int step = 0; step <= 40; ++step) {
      const double tau = step / 40.0;
      const bool msp_now = msp_reject(cs, tau).unknown;
      const bool odin_now = odin_reject(known_logits(s, space), 5.0, tau).unknown;
      RejectionConfig neg, lit;
      lit.energy_direction = EnergyDirection::kLiteral;
      neg.tau_energy = -20.0 + step;
      lit.tau_energy = -20.0 + step;
      const bool neg_now = energy_reject(cs, neg).unknown;
      const bool lit_now = energy_reject(cs, lit).unknown;
      const bool direct_now = direct_predict(s, obj, 1.0 - tau, space).unknown;
      check.expect(!msp_prev || msp_now, "MSP monotonicity");
      check.expect(!odin_prev || odin_now, "ODIN monotonicity");
      check.expect(!lit_prev || lit_now, "energy monotonicity (literal)");
      // Under the negative-energy direction a larger tau lowers the bar.
      check.expect(!neg_now || neg_prev || step == 0, "energy monotonicity (negative)");
      check.expect(!direct_prev || direct_now, "direct monotonicity");
      msp_prev = msp_now;
      odin_prev = odin_now;
      neg_prev = neg_now;
      lit_prev = lit_now;
      direct_prev = direct_now;
    }
  }
  check.note("1000 logit vectors");
  return check.done();
}

Outcome directional_claim() {
  Check check;
  int msp_wins = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScenarioConfig sc;
    sc.seed = seed;
    const auto scenario = generate_scenario(sc, 4);
    TrainConfig tc;
    tc.seed = seed;
    tc.mode = TrainingMode::kStandard;
    const auto standard = run_four_step(scenario, tc);
    tc.mode = TrainingMode::kUnkad;
    const auto unkad = run_four_step(scenario, tc);
    auto eval = [&](const ToyDetector& d, RejectionStrategy strategy) {
      RejectionConfig rc;
      rc.strategy = strategy;
      EvaluationOptions o;
      o.threads = 4;
      return evaluate_split(d, scenario.test, rc, o).report;
    };
    const auto std_none = eval(standard.detector, RejectionStrategy::kNone);
    const auto unk_direct = eval(unkad.detector, RejectionStrategy::kDirect);
    const auto std_msp = eval(standard.detector, RejectionStrategy::kMsp);
    const auto unk_msp = eval(unkad.detector, RejectionStrategy::kMsp);
    const auto s = std::to_string(seed);
    check.expect(std_none.u_f1_percent == 0.0, "(a) seed " + s);
    check.expect(unk_direct.u_f1_percent > 0.0, "(b) seed " + s);
    check.expect(std_none.map_percent && unk_direct.map_percent &&
                     *unk_direct.map_percent >= *std_none.map_percent - 2.0,
                 "(c) seed " + s);
    msp_wins += unk_msp.u_f1_percent >= std_msp.u_f1_percent;
    detail << (seed ? " " : "") << "s" << seed << ":UF1 direct " << fixed(unk_direct.u_f1_percent)
           << " msp " << fixed(unk_msp.u_f1_percent) << "/" << fixed(std_msp.u_f1_percent)
           << " mAP " << fixed(unk_direct.map_percent.value_or(0)) << "/"
           << fixed(std_none.map_percent.value_or(0));
  }
  check.expect(msp_wins >= 4, "(d) UNKAD+MSP ahead on " + std::to_string(msp_wins) + "/5");
  check.note("(d) " + std::to_string(msp_wins) + "/5; " + detail.str());
  return check.done();
}

Outcome objectness_agnosticism() {
  Check check;
  const auto scenario = generate_scenario(ScenarioConfig{}, 4);
  const auto result = run_four_step(scenario, TrainConfig{});
  const auto [known, unknown] = avg_obj_by_group(result.after_step1, scenario.train);
  check.expect(known && unknown, "no truth proposals");
  if (known && unknown) {
    check.expect(*known > 0.9, "known AVG_obj " + fixed(*known, 4));
    check.expect(*unknown > 0.9, "unknown AVG_obj " + fixed(*unknown, 4));
    check.expect(std::abs(*known - *unknown) < 0.05, "gap too large");
    check.note("known " + fixed(*known, 4) + ", unknown " + fixed(*unknown, 4) + ", gap " +
               fixed(std::abs(*known - *unknown), 4));
  }
  return check.done();
}

Outcome determinism() {
  Check check;
  const fs::path root = fs::temp_directory_path() / "osdet_acceptance_determinism";
  fs::remove_all(root);
  for (int threads : {1, 4}) {
    const fs::path dir = root / ("threads" + std::to_string(threads));
    cmd_simulate({ScenarioConfig{}, dir / "scenario", threads});
    TrainOptions t;
    t.scenario_dir = dir / "scenario";
    t.model_out = dir / "model.json";
    cmd_train(t);
    for (auto strategy : {RejectionStrategy::kDirect, RejectionStrategy::kOdin}) {
      EvaluateOptions e;
      e.scenario_dir = dir / "scenario";
      e.model_path = t.model_out;
      e.rejection.strategy = strategy;
      e.out_dir = dir / to_string(strategy);
      e.threads = threads;
      cmd_evaluate(e);
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "threads1")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), root / "threads1");
    const auto other = root / "threads4" / rel;
    check.expect(fs::exists(other) && io::read_text(entry.path()) == io::read_text(other),
                 rel.string() + " differs");
    ++compared;
  }
  fs::remove_all(root);
  check.note(std::to_string(compared) + " files byte-identical across 1 and 4 threads");
  return check.done();
}

Outcome ap_oracle() {
  Check check;
  std::mt19937_64 gen(1010);
  std::uniform_int_distribution<int> n(0, 20), truths(1, 12);
  std::uniform_real_distribution<double> conf(0.0, 1.0);
  std::bernoulli_distribution hit(0.5);
  for (int i = 0; i < 200; ++i) {
    const int nd = n(gen);
    const auto nt = static_cast<std::size_t>(truths(gen));
    std::vector<RankedOutcome> outcomes;
    std::vector<double> c;
    std::vector<bool> tp;
    std::size_t hits = 0;
    for (int d = 0; d < nd; ++d) {
      // Coarse confidences force ties.
      const double v = std::round(conf(gen) * 10.0) / 10.0;
      const bool t = hits < nt && hit(gen);
      hits += t;
      outcomes.push_back({v, t});
      c.push_back(v);
      tp.push_back(t);
    }
    const auto streaming = average_precision(outcomes, nt);
    const auto brute = oracle::ap_brute(c, tp, nt);
    check.expect(streaming && brute, "AP absent");
    if (streaming && brute) check.near_rel(*streaming, *brute, 1e-12, "AP");
  }
  const std::vector<RankedOutcome> hand = {{0.9, true}, {0.8, false}, {0.7, true}};
  const auto ap = average_precision(hand, 2);
  check.expect(ap && std::abs(*ap - 5.0 / 6.0) < 1e-12, "hand case");
  check.note("hand case " + fixed(ap.value_or(-1), 6) + ", 200 instances worst rel err " +
             sci(check.worst()));
  return check.done();
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0 means no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "formula oracle suite", 5.0, formula_oracles},
      {2, "WI reduction identity", 0.0, wi_reduction},
      {3, "tau_obj exactness", 0.0, tau_exactness},
      {4, "pseudo-label soundness", 10.0, pseudo_label_soundness},
      {5, "gradient checks", 0.0, gradient_checks},
      {6, "rejection algebra", 0.0, rejection_algebra},
      {7, "directional open-set claim", 60.0, directional_claim},
      {8, "objectness class-agnosticism", 0.0, objectness_agnosticism},
      {9, "determinism", 0.0, determinism},
      {10, "AP oracle", 0.0, ap_oracle},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds >= c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += " (over the " + fixed(c.budget_seconds, 0) + " s budget)";
    }
    failed += !outcome.pass;
    std::printf("criterion %2d %-30s %s  [%.2f s] %s\n", c.id, c.name,
                outcome.pass ? "PASS" : "FAIL", seconds, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
