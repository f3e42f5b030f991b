// Copyright 2026 The gestic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance suite: runs every release gate end to end and prints one
// PASS/FAIL line per criterion. Exits nonzero if any gate fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "gestic/cascade.hpp"
#include "gestic/config.hpp"
#include "gestic/dataio.hpp"
#include "gestic/eval.hpp"
#include "gestic/harness.hpp"
#include "gestic/losses.hpp"
#include "gestic/metrics.hpp"
#include "gestic/synthetic.hpp"
#include "gestic/train.hpp"
#include "test_support.hpp"

using namespace gestic;

namespace {

int g_failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s  %-22s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// ---- criterion 1: gradient suite ------------------------------------------

void criterion_gradients() {
  real_t worst = 0;
  std::string worst_name = "-";
  bool ok = true;
  auto run_cases = [&](const std::vector<testsup::GradCase>& cases) {
    for (const auto& c : cases) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const real_t err = c.run(seed);
        if (err > worst) {
          worst = err;
          worst_name = c.name;
        }
        if (!(err < real_t(1e-4))) ok = false;
      }
    }
  };
  run_cases(testsup::op_grad_cases());
  run_cases(testsup::composite_grad_cases());
  report("gradient-suite", ok,
         "every op and composite, 10 seeds, tolerance 1e-4 (worst " + fmt(worst) + " in " + worst_name + ")");
}

// ---- criterion 2: loss oracles ---------------------------------------------

void criterion_loss_oracles() {
  bool ok = true;
  std::string detail;

  {  // single-frame rhythmic loss is exactly zero
    ModelConfig cfg = testsup::tiny_model_config();
    cfg.latent = 4;
    ParamStore ps(0);
    init_rhythm_heads(ps, cfg);
    for (auto& x : ps.at("rhythm/f/w").v) x = 0;
    for (auto& x : ps.at("rhythm/g/w").v) x = 0;
    for (int i = 0; i < 4; ++i) ps.at("rhythm/f/w").at(i, i) = ps.at("rhythm/g/w").at(i, i) = 1;
    std::mt19937_64 rng(1);
    Tape tp;
    const real_t n1 = tp.val(rhythmic_loss(tp, ps, tp.input(testsup::signed_tensor({1, 4}, rng)),
                                           tp.input(testsup::signed_tensor({1, 4}, rng)), real_t(0.1)))
                          .v[0];
    if (n1 != real_t(0)) {
      ok = false;
      detail += " N=1 not exactly 0;";
    }
  }
  {  // orthogonal two-frame case
    ModelConfig cfg = testsup::tiny_model_config();
    cfg.latent = 2;
    ParamStore ps(0);
    init_rhythm_heads(ps, cfg);
    for (auto& x : ps.at("rhythm/f/w").v) x = 0;
    for (auto& x : ps.at("rhythm/g/w").v) x = 0;
    ps.at("rhythm/f/w").at(0, 0) = ps.at("rhythm/f/w").at(1, 1) = 1;
    ps.at("rhythm/g/w").at(0, 0) = ps.at("rhythm/g/w").at(1, 1) = 1;
    Tensor f({2, 2}), a({2, 2});
    f.v = {1, 0, 0, 1};
    a.v = {1, 0, 0, 1};
    Tape tp;
    const double got = tp.val(rhythmic_loss(tp, ps, tp.input(f), tp.input(a), real_t(0.1))).v[0];
    const double want = std::log1p(std::exp(-10.0));
    if (std::abs(got - want) > 1e-9) {
      ok = false;
      detail += " orthogonal case off by " + fmt(std::abs(got - want)) + ";";
    }
  }
  {  // face_mse and recon_l1 against brute-force loops
    std::mt19937_64 rng(2);
    const Tensor a = testsup::random_tensor({6, 5}, rng, 0, 1);
    const Tensor b = testsup::random_tensor({6, 5}, rng, 0, 1);
    real_t brute = 0;
    for (long i = 0; i < a.numel(); ++i) brute += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
    brute /= a.numel();
    Tape tp;
    if (std::abs(tp.val(face_mse(tp, tp.input(a), tp.input(b))).v[0] - brute) > 1e-12) {
      ok = false;
      detail += " face_mse vs oracle;";
    }
    const Tensor bp = testsup::random_tensor({6, kBodyDims}, rng, -5, 5);
    const Tensor bg = testsup::random_tensor({6, kBodyDims}, rng, -5, 5);
    const Tensor hp = testsup::random_tensor({6, kHandDims}, rng, -5, 5);
    const Tensor hg = testsup::random_tensor({6, kHandDims}, rng, -5, 5);
    real_t lb = 0, lh = 0;
    for (long i = 0; i < bp.numel(); ++i) lb += std::abs(bp.v[i] - bg.v[i]);
    for (long i = 0; i < hp.numel(); ++i) lh += std::abs(hp.v[i] - hg.v[i]);
    const real_t want = lb / bp.numel() + real_t(0.6) * lh / hp.numel();
    Tape tp2;
    const real_t got =
        tp2.val(recon_l1(tp2, tp2.input(bp), tp2.input(bg), tp2.input(hp), tp2.input(hg), real_t(0.6))).v[0];
    if (std::abs(got - want) > 1e-12) {
      ok = false;
      detail += " recon_l1 vs oracle;";
    }
  }
  {  // unit components under the default weights
    LossWeights w;
    Tape tp;
    Var one = tp.input(Tensor::scalar(1));
    if (tp.val(total_loss(tp, one, one, one, w)).v[0] != real_t(1501)) {
      ok = false;
      detail += " total != 1501;";
    }
  }
  report("loss-oracles", ok, ok ? "N=1 zero, log1p(e^-10), brute-force MSE/L1, 1501" : detail);
}

// ---- criterion 3: metric oracles -------------------------------------------

void criterion_metric_oracles() {
  bool ok = true;
  std::string detail;

  std::mt19937_64 rng(3);
  std::vector<std::vector<real_t>> xs;
  for (int i = 0; i < 24; ++i) {
    std::vector<real_t> x(6);
    for (auto& v : x) v = std::uniform_real_distribution<real_t>(-2, 2)(rng);
    xs.push_back(x);
  }
  const GaussianStats st = gaussian_stats(xs);
  if (!(std::abs(fgd(st, st)) < 1e-6)) {
    ok = false;
    detail += " fgd(a,a);";
  }
  {
    GaussianStats r, g;
    r.mean = {0};
    r.cov = Tensor({1, 1});
    r.cov.at(0, 0) = 1;
    g.mean = {1};
    g.cov = Tensor({1, 1});
    g.cov.at(0, 0) = 1;
    if (std::abs(fgd(r, g) - 1.0) > 1e-9) {
      ok = false;
      detail += " 1-d fgd;";
    }
  }
  {
    const int d = 5;
    GaussianStats r, g;
    r.mean.resize(d);
    g.mean.resize(d);
    r.cov = Tensor({d, d});
    g.cov = Tensor({d, d});
    real_t want = 0;
    for (int i = 0; i < d; ++i) {
      r.mean[i] = std::uniform_real_distribution<real_t>(-2, 2)(rng);
      g.mean[i] = std::uniform_real_distribution<real_t>(-2, 2)(rng);
      const real_t vr = std::uniform_real_distribution<real_t>(real_t(0.2), 3)(rng);
      const real_t vg = std::uniform_real_distribution<real_t>(real_t(0.2), 3)(rng);
      r.cov.at(i, i) = vr;
      g.cov.at(i, i) = vg;
      want += (r.mean[i] - g.mean[i]) * (r.mean[i] - g.mean[i]) +
              (std::sqrt(vr) - std::sqrt(vg)) * (std::sqrt(vr) - std::sqrt(vg));
    }
    if (std::abs(fgd(r, g) - want) > 1e-8) {
      ok = false;
      detail += " diagonal fgd;";
    }
  }
  {
    const Tensor gt = testsup::random_tensor({8, 12 * 3}, rng, -30, 30);
    Tensor miss = gt, half = gt;
    for (int r = 0; r < 8; ++r)
      for (int q = 0; q < 12; ++q) {
        miss.at(r, 3 * q) += 10;
        if (q < 6) half.at(r, 3 * q) += 10;
      }
    if (srgr(gt, gt, {}, 5) != real_t(1) || srgr(miss, gt, {}, 5) != real_t(0) ||
        srgr(half, gt, {}, 5) != real_t(0.5)) {
      ok = false;
      detail += " srgr boundaries;";
    }
  }
  {
    BeatList a;
    a.times = {0.4, 1.1, 2.0};
    if (beat_align(a, a, 0.2) != real_t(1)) {
      ok = false;
      detail += " beat_align identical;";
    }
    BeatList single, moved;
    single.times = {0.0};
    moved.times = {0.2 * std::sqrt(2.0)};
    if (std::abs(beat_align(single, moved, 0.2) - std::exp(-1.0)) > 1e-9) {
      ok = false;
      detail += " beat_align sigma*sqrt(2);";
    }
    BeatList none;
    if (beat_align(a, none, 0.2) != real_t(0)) {
      ok = false;
      detail += " empty gesture beats;";
    }
  }
  report("metric-oracles", ok, ok ? "fgd {0, 1-d, diagonal}, srgr {1, 0, 0.5}, beat_align {1, 1/e, 0}" : detail);
}

// ---- criteria 4-8 share one desk-scale training run -------------------------

struct LearningRun {
  SyntheticConfig data_cfg;
  ModelConfig model_cfg;
  std::vector<Clip> clips;
  ParamStore trained{0};
  ParamStore untrained{0};
  std::vector<StepLog> logs;
};

LearningRun make_learning_run() {
  LearningRun run;
  run.data_cfg.n_sequences = 10;
  run.data_cfg.frames_per_sequence = 100;
  run.data_cfg.rng_seed = 12345;
  run.data_cfg.audio_dim = 10;
  run.data_cfg.text_dim = 4;
  run.data_cfg.blendshape_dim = 6;
  run.data_cfg.n_emotions = 4;
  run.data_cfg.n_speakers = 2;
  run.data_cfg.style_mag = 25;
  run.data_cfg.stroke_amp = 8;

  run.model_cfg.audio_dim = run.data_cfg.audio_dim;
  run.model_cfg.text_dim = run.data_cfg.text_dim;
  run.model_cfg.blendshape_dim = run.data_cfg.blendshape_dim;
  run.model_cfg.n_emotions = run.data_cfg.n_emotions;
  run.model_cfg.n_speakers = run.data_cfg.n_speakers;
  run.model_cfg.latent = 16;
  run.model_cfg.enc_hidden = 12;
  run.model_cfg.style_dim = 8;
  run.model_cfg.lstm_hidden = 16;
  run.model_cfg.lstm_layers = 1;
  run.model_cfg.mlp_hidden = 24;

  run.clips = window_clips(synthetic_records(gen_synthetic(run.data_cfg)), 34, 10, 4, nullptr);
  return run;
}

void criterion_learning(LearningRun& run) {
  bool ok = true;
  std::string detail;
  const std::uint64_t seed = 99;
  AdamConfig adam;
  adam.lr = real_t(2e-3);

  // (a) classifier accuracy on strongly separated styles
  ParamStore cls(seed);
  init_classifier(cls, run.model_cfg);
  train_classifier(cls, run.model_cfg, run.clips, 400, 16, adam, seed);
  int correct = 0;
  for (const Clip& c : run.clips) {
    const ClassifyResult r = classify(cls, run.model_cfg, c.audio);
    if (r.emotion == c.emotion && r.speaker == c.speaker) ++correct;
  }
  const double acc = double(correct) / double(run.clips.size());
  if (!(acc > 0.9)) {
    ok = false;
    detail += " accuracy " + fmt(acc) + ";";
  }

  // (b) total loss falls to half of its initial value
  run.trained = ParamStore(seed);
  init_model(run.trained, run.model_cfg);
  init_rhythm_heads(run.trained, run.model_cfg);
  run.trained.absorb(cls);
  TrainConfig tc;
  tc.steps = 400;
  tc.batch_size = 8;
  tc.checkpoint_every = 0;
  tc.early_stop_patience = 200;
  LossWeights weights;
  const TrainResult tr = train_full(run.trained, run.model_cfg, weights, run.clips, tc, adam, seed);
  run.logs = tr.logs;
  const real_t first = tr.logs.front().total;
  real_t best = first;
  for (const StepLog& l : tr.logs) best = std::min(best, l.total);
  const real_t last = tr.logs.back().total;
  if (!(last <= real_t(0.5) * first)) {
    ok = false;
    detail += " loss " + fmt(first) + "->" + fmt(last) + ";";
  }

  // (c) aligned rhythmic loss beats within-clip-shuffled pairs
  {
    std::mt19937_64 rng(7);
    real_t aligned = 0, shuffled = 0;
    int n = 0;
    for (std::size_t ci = 0; ci < run.clips.size(); ci += 5) {
      const Clip& c = run.clips[ci];
      Tape tp;
      CascadeOut out = synthesize_on_tape(tp, run.trained, run.model_cfg, c.audio, c.text, c.seed_poses, c.emotion,
                                          c.speaker);
      aligned += tp.val(rhythmic_loss(tp, run.trained, out.face_latent, out.audio_latent, weights.tau)).v[0];
      // permute the audio rows within the clip
      const Tensor& alat = tp.val(out.audio_latent);
      std::vector<int> perm(alat.rows());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      Tensor shuf = alat;
      for (int r = 0; r < alat.rows(); ++r)
        for (int col = 0; col < alat.cols(); ++col) shuf.at(r, col) = alat.at(perm[r], col);
      shuffled += tp.val(rhythmic_loss(tp, run.trained, out.face_latent, tp.input(shuf), weights.tau)).v[0];
      ++n;
    }
    aligned /= n;
    shuffled /= n;
    if (!(aligned < shuffled)) {
      ok = false;
      detail += " rhythm aligned " + fmt(aligned) + " !< shuffled " + fmt(shuffled) + ";";
    }
  }

  // (d) trained model beats the untrained one on FGD and BeatAlign
  run.untrained = ParamStore(seed + 1);
  init_model(run.untrained, run.model_cfg);
  init_rhythm_heads(run.untrained, run.model_cfg);
  {
    ParamStore cls_copy = cls;
    run.untrained.absorb(cls_copy);
  }
  EvalConfig ec;
  ec.embedder.steps = 150;
  ec.embedder.latent = 16;
  ec.embedder.hidden = 16;
  const MetricReport trained_report = evaluate_model(run.trained, run.model_cfg, run.clips, ec);
  const MetricReport untrained_report = evaluate_model(run.untrained, run.model_cfg, run.clips, ec);
  if (!(trained_report.fgd_value < untrained_report.fgd_value)) {
    ok = false;
    detail += " fgd " + fmt(trained_report.fgd_value) + " !< " + fmt(untrained_report.fgd_value) + ";";
  }
  if (!(trained_report.beat_align_value > untrained_report.beat_align_value)) {
    ok = false;
    detail += " beat_align " + fmt(trained_report.beat_align_value) + " !> " +
              fmt(untrained_report.beat_align_value) + ";";
  }

  // (e) speaker label moves the mean pose beyond the label-invariant noise floor
  {
    const Clip& c = run.clips[3];
    const SynthesisResult s0 = synthesize(run.trained, run.model_cfg, c.audio, c.text, c.seed_poses, c.emotion, 0);
    const SynthesisResult s0_again =
        synthesize(run.trained, run.model_cfg, c.audio, c.text, c.seed_poses, c.emotion, 0);
    const SynthesisResult s1 = synthesize(run.trained, run.model_cfg, c.audio, c.text, c.seed_poses, c.emotion, 1);
    real_t noise_floor = 0, shift = 0;
    for (long i = 0; i < s0.gesture.body.numel(); ++i) {
      noise_floor += std::abs(s0.gesture.body.v[i] - s0_again.gesture.body.v[i]);
      shift += std::abs(s0.gesture.body.v[i] - s1.gesture.body.v[i]);
    }
    noise_floor /= s0.gesture.body.numel();
    shift /= s0.gesture.body.numel();
    if (!(shift > noise_floor + real_t(1e-6))) {
      ok = false;
      detail += " speaker shift " + fmt(shift) + " vs floor " + fmt(noise_floor) + ";";
    }
  }

  report("learning-checks", ok,
         ok ? "classifier " + fmt(acc * 100) + "%, loss " + fmt(first) + "->" + fmt(last) + ", aligned rhythm, " +
                  "fgd " + fmt(trained_report.fgd_value) + "<" + fmt(untrained_report.fgd_value) + ", style shift"
            : detail);
}

// ---- criterion 5: structural checks ----------------------------------------

void criterion_structural() {
  bool ok = true;
  std::string detail;

  std::mt19937_64 rng(4);
  for (int t : {34, 44, 55, 89, 100, 128, 200}) {
    for (int n : {10, 21, 34}) {
      for (int stride : {1, 3, 10, 17}) {
        if (t < n) continue;
        SequenceRecord rec;
        rec.audio = Tensor({t, 3});
        rec.text = Tensor({t, 2});
        rec.face = Tensor({t, 2});
        rec.body = Tensor({t, kBodyDims});
        rec.hands = Tensor({t, kHandDims});
        const auto clips = window_clips({rec}, n, stride, std::min(4, n), nullptr);
        if (static_cast<int>(clips.size()) != (t - n) / stride + 1) {
          ok = false;
          detail += " window(" + std::to_string(t) + "," + std::to_string(n) + "," + std::to_string(stride) + ");";
        }
      }
    }
  }

  const RunConfig defaults = parse_run_config(nlohmann::json::object());
  if (defaults.window_frames != 34 || defaults.window_stride != 10 || defaults.model.seed_frames != 4) {
    ok = false;
    detail += " window defaults;";
  }

  ModelConfig full;  // full-scale defaults
  if (full.latent != 128 || full.embed_dim != 8 || full.blendshape_dim != 51) {
    ok = false;
    detail += " width defaults;";
  }
  if (kBodyDims != 9 * 3 || kHandDims != 38 * 3) {
    ok = false;
    detail += " joint counts;";
  }
  {
    ParamStore ps(5);
    init_model(ps, full);
    Tape tp;
    CascadeOut out = synthesize_on_tape(tp, ps, full, testsup::random_tensor({34, full.audio_dim}, rng),
                                        testsup::random_tensor({34, full.text_dim}, rng),
                                        Tensor({4, kPoseDims}), 2, 1);
    const bool dims_ok = tp.val(out.face).cols() == 51 && tp.val(out.body).cols() == 27 &&
                         tp.val(out.hands).cols() == 114 && tp.val(out.audio_latent).cols() == 128 &&
                         tp.val(out.text_latent).cols() == 128 && tp.val(out.face_latent).cols() == 128;
    if (!dims_ok) {
      ok = false;
      detail += " forward dims;";
    }
  }
  report("structural-checks", ok, ok ? "window formula grid, 34/10/4 defaults, D_f 51 / 27 / 114 / 128 / 8" : detail);
}

// ---- criterion 6: inference efficiency ---------------------------------------

void criterion_inference(LearningRun& run) {
  bool ok = true;
  std::string detail;
  const Clip& c = run.clips[1];
  try {
    // audio + text + seed poses only: no blendshapes, no emotion, no speaker
    const SynthesisResult r = synthesize(run.trained, run.model_cfg, c.audio, c.text, c.seed_poses);
    if (r.face.rows() != c.frames() || r.gesture.body.rows() != c.frames() ||
        r.gesture.hands.cols() != kHandDims) {
      ok = false;
      detail = "wrong output shape";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  report("inference-efficiency", ok, ok ? "synthesize ran from speech features and seed poses alone" : detail);
}

// ---- criterion 7: determinism -----------------------------------------------

void criterion_determinism(const LearningRun& run) {
  auto run_ten = [&run]() {
    const std::uint64_t seed = 4242;
    AdamConfig adam;
    ParamStore cls(seed);
    init_classifier(cls, run.model_cfg);
    train_classifier(cls, run.model_cfg, run.clips, 20, 4, adam, seed);
    ParamStore ps(seed);
    init_model(ps, run.model_cfg);
    init_rhythm_heads(ps, run.model_cfg);
    ps.absorb(cls);
    TrainConfig tc;
    tc.steps = 10;
    tc.batch_size = 4;
    tc.checkpoint_every = 0;
    const TrainResult r = train_full(ps, run.model_cfg, LossWeights{}, run.clips, tc, adam, seed);
    std::vector<real_t> totals;
    for (const StepLog& l : r.logs) totals.push_back(l.total);
    return totals;
  };
  const auto a = run_ten();
  const auto b = run_ten();
  bool ok = a.size() == 10 && b.size() == 10;
  for (std::size_t i = 0; ok && i < a.size(); ++i)
    if (std::memcmp(&a[i], &b[i], sizeof(real_t)) != 0) ok = false;
  report("determinism", ok, ok ? "first 10 training losses bitwise identical across reruns" : "losses diverged");
}

// ---- criterion 8: sweep protocol ----------------------------------------------

void criterion_sweep(const LearningRun& run) {
  bool ok = true;
  std::string detail;
  RunConfig cfg = parse_run_config(nlohmann::json::object());
  cfg.synthetic = run.data_cfg;
  cfg.synthetic.n_sequences = 5;
  cfg.model = run.model_cfg;
  cfg.model.latent = 8;
  cfg.model.enc_hidden = 6;
  cfg.model.lstm_hidden = 6;
  cfg.model.mlp_hidden = 8;
  cfg.model.style_dim = 4;
  cfg.train.classifier_steps = 60;
  cfg.train.classifier_batch = 8;
  cfg.train.batch_size = 4;
  cfg.sweep_steps = 40;
  cfg.optim.lr = real_t(2e-3);
  cfg.eval.embedder.steps = 60;
  cfg.eval.embedder.latent = 8;
  cfg.eval.embedder.hidden = 8;
  cfg.seed = 31;

  const auto out_dir = std::filesystem::temp_directory_path() / "gestic_acceptance_sweep";
  std::filesystem::remove_all(out_dir);
  try {
    const auto rows = cmd_sweep(cfg, out_dir);
    if (rows.size() != 8) {
      ok = false;
      detail += " expected 8 cells, got " + std::to_string(rows.size()) + ";";
    }
    bool has_default_cell = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i > 0 && rows[i].report.fgd_value < rows[i - 1].report.fgd_value) {
        ok = false;
        detail += " not sorted;";
      }
      if (rows[i].lambda_rec == 500 && rows[i].lambda_mse == 1000 && rows[i].lambda_rhy == 1) has_default_cell = true;
    }
    if (!has_default_cell) {
      ok = false;
      detail += " (500,1000,1) missing;";
    }
    if (!std::filesystem::exists(out_dir / "sweep_results.csv")) {
      ok = false;
      detail += " results file missing;";
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  std::filesystem::remove_all(out_dir);
  report("sweep-protocol", ok, ok ? "8-cell grid incl. (500,1000,1) ran and ranked by FGD" : detail);
}

}  // namespace

int main() {
  std::printf("acceptance suite\n================\n");
  criterion_gradients();
  criterion_loss_oracles();
  criterion_metric_oracles();
  LearningRun run = make_learning_run();
  criterion_learning(run);
  criterion_structural();
  criterion_inference(run);
  criterion_determinism(run);
  criterion_sweep(run);
  std::printf("================\n%s (%d failure%s)\n", g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
