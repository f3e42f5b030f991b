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
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gestic/dataio.hpp"
#include "gestic/model_config.hpp"
#include "gestic/optim.hpp"
#include "gestic/params.hpp"
#include "gestic/tape.hpp"

namespace gestic {

// Trainable fronts for the speech side: a small audio TCN with a final
// projection to the shared latent width, a deeper residual text TCN, the
// 8-d emotion/speaker embedding tables, and the emotion & speaker-id
// classifier that gets pre-trained and frozen.

inline void init_frontend(ParamStore& ps, const ModelConfig& cfg) {
  const int h = cfg.enc_hidden;
  // audio: 4 conv layers then a linear projection to the latent width
  ps.add("audio_enc/conv0/w", {3, cfg.audio_dim, h}, Init::XavierUniform);
  ps.add("audio_enc/conv0/b", {1, h}, Init::Zero);
  for (int l = 1; l < 4; ++l) {
    ps.add("audio_enc/conv" + std::to_string(l) + "/w", {3, h, h}, Init::XavierUniform);
    ps.add("audio_enc/conv" + std::to_string(l) + "/b", {1, h}, Init::Zero);
  }
  ps.add("audio_enc/proj/w", {h, cfg.latent}, Init::XavierUniform);
  ps.add("audio_enc/proj/b", {1, cfg.latent}, Init::Zero);

  // text: input projection plus 8 dilated residual conv blocks, so the
  // receptive field covers a full 34-frame window
  ps.add("text_enc/in/w", {cfg.text_dim, cfg.latent}, Init::XavierUniform);
  ps.add("text_enc/in/b", {1, cfg.latent}, Init::Zero);
  for (int l = 0; l < 8; ++l) {
    ps.add("text_enc/conv" + std::to_string(l) + "/w", {3, cfg.latent, cfg.latent}, Init::XavierUniform);
    ps.add("text_enc/conv" + std::to_string(l) + "/b", {1, cfg.latent}, Init::Zero);
  }

  ps.add("embed/emotion", {cfg.n_emotions, cfg.embed_dim}, Init::XavierUniform);
  ps.add("embed/speaker", {cfg.n_speakers, cfg.embed_dim}, Init::XavierUniform);
}

inline void init_classifier(ParamStore& ps, const ModelConfig& cfg) {
  const int h = cfg.enc_hidden;
  ps.add("cls/conv0/w", {3, cfg.audio_dim, h}, Init::XavierUniform);
  ps.add("cls/conv0/b", {1, h}, Init::Zero);
  for (int l = 1; l < 3; ++l) {
    ps.add("cls/conv" + std::to_string(l) + "/w", {3, h, h}, Init::XavierUniform);
    ps.add("cls/conv" + std::to_string(l) + "/b", {1, h}, Init::Zero);
  }
  ps.add("cls/emo/w", {h, cfg.n_emotions}, Init::XavierUniform);
  ps.add("cls/emo/b", {1, cfg.n_emotions}, Init::Zero);
  ps.add("cls/spk/w", {h, cfg.n_speakers}, Init::XavierUniform);
  ps.add("cls/spk/b", {1, cfg.n_speakers}, Init::Zero);
}

inline Var encode_audio(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var audio) {
  if (tp.val(audio).cols() != cfg.audio_dim)
    throw std::invalid_argument("encode_audio: expected width " + std::to_string(cfg.audio_dim) + ", got " +
                                tp.val(audio).shape_string());
  Var h = audio;
  for (int l = 0; l < 4; ++l) {
    const std::string p = "audio_enc/conv" + std::to_string(l);
    h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, p + "/w"), tp.param(ps, p + "/b")));
  }
  return tp.linear(h, tp.param(ps, "audio_enc/proj/w"), tp.param(ps, "audio_enc/proj/b"));
}

// Zeroing every conv kernel and bias reduces this to the input projection:
// each block is h + relu(conv(h)).
inline Var encode_text(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var text) {
  if (tp.val(text).cols() != cfg.text_dim)
    throw std::invalid_argument("encode_text: expected width " + std::to_string(cfg.text_dim) + ", got " +
                                tp.val(text).shape_string());
  static constexpr int kDilations[8] = {1, 1, 2, 2, 4, 4, 8, 8};
  Var h = tp.linear(text, tp.param(ps, "text_enc/in/w"), tp.param(ps, "text_enc/in/b"));
  for (int l = 0; l < 8; ++l) {
    const std::string p = "text_enc/conv" + std::to_string(l);
    Var c = tp.temporal_conv1d(h, tp.param(ps, p + "/w"), tp.param(ps, p + "/b"), kDilations[l]);
    h = tp.add(h, tp.relu(c));
  }
  return h;
}

inline std::pair<Var, Var> embed_labels(Tape& tp, ParamStore& ps, const ModelConfig& cfg, int emotion, int speaker,
                                        int t_frames) {
  if (emotion < 0 || emotion >= cfg.n_emotions)
    throw std::invalid_argument("embed_labels: emotion " + std::to_string(emotion) + " outside 0.." +
                                std::to_string(cfg.n_emotions - 1));
  if (speaker < 0 || speaker >= cfg.n_speakers)
    throw std::invalid_argument("embed_labels: speaker " + std::to_string(speaker) + " outside 0.." +
                                std::to_string(cfg.n_speakers - 1));
  Var e = tp.embed_lookup(tp.param(ps, "embed/emotion"), emotion, t_frames);
  Var i = tp.embed_lookup(tp.param(ps, "embed/speaker"), speaker, t_frames);
  return {e, i};
}

struct ClassifierLogits {
  Var emotion;  // (1, n_emotions)
  Var speaker;  // (1, n_speakers)
};

inline ClassifierLogits classifier_logits(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var audio) {
  (void)cfg;
  Var h = audio;
  for (int l = 0; l < 3; ++l) {
    const std::string p = "cls/conv" + std::to_string(l);
    h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, p + "/w"), tp.param(ps, p + "/b")));
  }
  Var pooled = tp.avg_pool_time(h);
  return {tp.linear(pooled, tp.param(ps, "cls/emo/w"), tp.param(ps, "cls/emo/b")),
          tp.linear(pooled, tp.param(ps, "cls/spk/w"), tp.param(ps, "cls/spk/b"))};
}

struct ClassifyResult {
  std::vector<real_t> emotion_probs;
  std::vector<real_t> speaker_probs;
  int emotion = 0;  // argmax
  int speaker = 0;
};

inline ClassifyResult classify(ParamStore& ps, const ModelConfig& cfg, const Tensor& audio) {
  Tape tp;
  ClassifierLogits out = classifier_logits(tp, ps, cfg, tp.input(audio));
  Var pe = tp.softmax(out.emotion);
  Var pspk = tp.softmax(out.speaker);
  ClassifyResult r;
  r.emotion_probs = tp.val(pe).v;
  r.speaker_probs = tp.val(pspk).v;
  r.emotion = static_cast<int>(std::max_element(r.emotion_probs.begin(), r.emotion_probs.end()) -
                               r.emotion_probs.begin());
  r.speaker = static_cast<int>(std::max_element(r.speaker_probs.begin(), r.speaker_probs.end()) -
                               r.speaker_probs.begin());
  return r;
}

struct ClassifierTrainResult {
  std::vector<real_t> losses;  // per-step combined emotion + speaker CE
};

// Pre-training stage: minimizes emotion CE plus speaker CE over clips, then
// freezes every cls/ parameter.
inline ClassifierTrainResult train_classifier(ParamStore& ps, const ModelConfig& cfg, const std::vector<Clip>& clips,
                                              int steps, int batch_size, const AdamConfig& adam_cfg,
                                              std::uint64_t seed) {
  if (clips.empty()) throw std::invalid_argument("train_classifier: empty dataset");
  std::mt19937_64 rng(seed);
  AdamState adam;
  adam.cfg = adam_cfg;
  ClassifierTrainResult result;
  result.losses.reserve(steps);
  const int bs = std::min<int>(batch_size, static_cast<int>(clips.size()));
  for (int step = 0; step < steps; ++step) {
    Tape tp;
    std::vector<Var> terms;
    for (int b = 0; b < bs; ++b) {
      const Clip& clip = clips[rng() % clips.size()];
      ClassifierLogits lg = classifier_logits(tp, ps, cfg, tp.input(clip.audio));
      terms.push_back(tp.cross_entropy(lg.emotion, {clip.emotion}));
      terms.push_back(tp.cross_entropy(lg.speaker, {clip.speaker}));
    }
    Var loss = tp.scalar_weighted_sum(terms, std::vector<real_t>(terms.size(), real_t(1) / bs));
    result.losses.push_back(tp.val(loss).v[0]);
    GradMap grads = tp.backward(loss);
    adam_step(ps, grads, adam);
  }
  ps.freeze_prefix("cls/");
  return result;
}

}  // namespace gestic
