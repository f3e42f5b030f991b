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

#include <numeric>
#include <stdexcept>
#include <vector>

#include "gestic/model_config.hpp"
#include "gestic/params.hpp"
#include "gestic/tape.hpp"

namespace gestic {

struct LossWeights {
  real_t lambda_rhy = 1;
  real_t lambda_mse = 1000;
  real_t lambda_rec = 500;
  real_t alpha = 1;     // body/hand balance inside the reconstruction term
  real_t tau = real_t(0.1);

  void validate() const {
    if (lambda_rhy < 0 || lambda_mse < 0 || lambda_rec < 0 || alpha < 0)
      throw std::invalid_argument("LossWeights: weights must be >= 0");
    if (tau <= 0) throw std::invalid_argument("LossWeights: tau must be > 0");
  }
};

// Projection heads for the rhythmic contrastive loss; trained together with
// the rest of the model. Bias-free, so rescaling a single frame's feature
// vector cannot move its cosine similarities.
inline void init_rhythm_heads(ParamStore& ps, const ModelConfig& cfg) {
  ps.add("rhythm/f/w", {cfg.latent, cfg.latent}, Init::XavierUniform);
  ps.add("rhythm/g/w", {cfg.latent, cfg.latent}, Init::XavierUniform);
}

// Frame-level InfoNCE between projected facial features and projected audio
// features. Positives are same-frame pairs, negatives the other frames of
// the same clip. With one frame the numerator equals the denominator and the
// loss is exactly zero.
inline Var rhythmic_loss(Tape& tp, ParamStore& ps, Var face_latent, Var audio_latent, real_t tau) {
  if (tau <= 0) throw std::invalid_argument("rhythmic_loss: tau must be > 0");
  const int n = tp.val(face_latent).rows();
  if (tp.val(audio_latent).rows() != n)
    throw std::invalid_argument("rhythmic_loss: frame counts differ, " + tp.val(face_latent).shape_string() +
                                " vs " + tp.val(audio_latent).shape_string());
  Var f = tp.linear(face_latent, tp.param(ps, "rhythm/f/w"));
  Var g = tp.linear(audio_latent, tp.param(ps, "rhythm/g/w"));
  Var logits = tp.scale(tp.cosine_similarity(f, g), real_t(1) / tau);
  std::vector<int> diagonal(n);
  std::iota(diagonal.begin(), diagonal.end(), 0);
  return tp.cross_entropy(logits, diagonal);
}

inline Var face_mse(Tape& tp, Var predicted, Var target) { return tp.mse(predicted, target); }

// mean |body error| + alpha * mean |hand error|
inline Var recon_l1(Tape& tp, Var body_pred, Var body_gt, Var hand_pred, Var hand_gt, real_t alpha) {
  return tp.scalar_weighted_sum({tp.l1(body_pred, body_gt), tp.l1(hand_pred, hand_gt)}, {real_t(1), alpha});
}

inline Var total_loss(Tape& tp, Var rhy, Var mse, Var rec, const LossWeights& w) {
  return tp.scalar_weighted_sum({rhy, mse, rec}, {w.lambda_rhy, w.lambda_mse, w.lambda_rec});
}

}  // namespace gestic
