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

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestic/cascade.hpp"
#include "gestic/dataio.hpp"
#include "gestic/losses.hpp"
#include "gestic/model_config.hpp"
#include "gestic/optim.hpp"
#include "gestic/params.hpp"

namespace gestic {

struct TrainConfig {
  int steps = 500;
  int batch_size = 16;
  int checkpoint_every = 200;        // 0 disables periodic checkpoints
  int classifier_steps = 300;
  int classifier_batch = 16;
  int early_stop_patience = 50;      // steps without improvement before stopping
  real_t early_stop_tolerance = real_t(1e-4);
};

struct StepLog {
  long step = 0;
  real_t rhy = 0, mse = 0, rec_body = 0, rec_hand = 0, total = 0;
};

struct TrainResult {
  std::vector<StepLog> logs;
  bool early_stopped = false;
};

inline const char* training_log_header() { return "step,loss_rhy,loss_mse,loss_rec_body,loss_rec_hand,total"; }

inline void write_log_line(std::ostream& os, const StepLog& l) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g,%.17g", l.step, static_cast<double>(l.rhy),
                static_cast<double>(l.mse), static_cast<double>(l.rec_body), static_cast<double>(l.rec_hand),
                static_cast<double>(l.total));
  os << buf << '\n';
}

// One optimization step over a clip batch: per clip, run the cascade with
// ground-truth labels, take the three losses, and average each component
// over the batch before weighting. Returns the logged components.
inline StepLog train_step(ParamStore& ps, const ModelConfig& cfg, const LossWeights& weights,
                          const std::vector<Clip>& clips, const std::vector<std::size_t>& batch, AdamState& adam) {
  Tape tp;
  std::vector<Var> rhy_terms, mse_terms, body_terms, hand_terms;
  for (std::size_t idx : batch) {
    const Clip& clip = clips[idx];
    CascadeOut out = synthesize_on_tape(tp, ps, cfg, clip.audio, clip.text, clip.seed_poses, clip.emotion,
                                        clip.speaker, &clip.face);
    rhy_terms.push_back(rhythmic_loss(tp, ps, out.face_latent, out.audio_latent, weights.tau));
    mse_terms.push_back(face_mse(tp, out.face, tp.input(clip.face)));
    body_terms.push_back(tp.l1(out.body, tp.input(clip.body)));
    hand_terms.push_back(tp.l1(out.hands, tp.input(clip.hands)));
  }
  const std::vector<real_t> avg(batch.size(), real_t(1) / batch.size());
  Var rhy = tp.scalar_weighted_sum(rhy_terms, avg);
  Var mse = tp.scalar_weighted_sum(mse_terms, avg);
  Var rec_body = tp.scalar_weighted_sum(body_terms, avg);
  Var rec_hand = tp.scalar_weighted_sum(hand_terms, avg);
  Var rec = tp.scalar_weighted_sum({rec_body, rec_hand}, {real_t(1), weights.alpha});
  Var total = total_loss(tp, rhy, mse, rec, weights);

  StepLog log;
  log.rhy = tp.val(rhy).v[0];
  log.mse = tp.val(mse).v[0];
  log.rec_body = tp.val(rec_body).v[0];
  log.rec_hand = tp.val(rec_hand).v[0];
  log.total = tp.val(total).v[0];

  GradMap grads = tp.backward(total);
  adam_step(ps, grads, adam);
  return log;
}

// Full-model training. Requires the frozen classifier to be present in the
// store (the inference path depends on it); the optimizer never touches
// frozen entries. Stops early once the total loss has not improved by more
// than the tolerance for `early_stop_patience` consecutive steps.
inline TrainResult train_full(ParamStore& ps, const ModelConfig& cfg, const LossWeights& weights,
                              const std::vector<Clip>& clips, const TrainConfig& tc, const AdamConfig& adam_cfg,
                              std::uint64_t seed, std::ostream* log_csv = nullptr,
                              const std::string& checkpoint_dir = "") {
  if (clips.empty()) throw std::invalid_argument("train_full: empty clip set");
  if (!ps.has("cls/conv0/w") || !ps.frozen("cls/conv0/w"))
    throw std::runtime_error("train_full: no frozen classifier in the parameter store; run classifier "
                             "pre-training first");
  weights.validate();

  std::mt19937_64 rng(seed);
  AdamState adam;
  adam.cfg = adam_cfg;
  TrainResult result;
  if (log_csv) *log_csv << training_log_header() << '\n';

  real_t best = std::numeric_limits<real_t>::infinity();
  int stall = 0;
  const int bs = std::min<int>(tc.batch_size, static_cast<int>(clips.size()));
  for (int step = 0; step < tc.steps; ++step) {
    std::vector<std::size_t> batch(bs);
    for (auto& idx : batch) idx = rng() % clips.size();
    StepLog log = train_step(ps, cfg, weights, clips, batch, adam);
    log.step = step;
    result.logs.push_back(log);
    if (log_csv) write_log_line(*log_csv, log);
    if (tc.checkpoint_every > 0 && !checkpoint_dir.empty() && (step + 1) % tc.checkpoint_every == 0)
      save_checkpoint(ps, checkpoint_dir + "/model_step_" + std::to_string(step + 1) + ".ckpt");

    if (log.total < best - tc.early_stop_tolerance) {
      best = log.total;
      stall = 0;
    } else if (++stall >= tc.early_stop_patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace gestic
