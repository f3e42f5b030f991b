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

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gestic/dataio.hpp"
#include "gestic/frontend.hpp"
#include "gestic/model_config.hpp"
#include "gestic/params.hpp"
#include "gestic/tape.hpp"

namespace gestic {

// Cascaded synthesizer: audio/text latents feed a face generator, the
// predicted blendshapes are decoded back into facial features, everything is
// fused under channel attention, style-modulated, and decoded into body then
// hand rotations. Each stage's output conditions the next.

inline int fused_width(const ModelConfig& cfg) { return 4 * cfg.latent; }  // audio : text : face : seed

inline void init_cascade(ParamStore& ps, const ModelConfig& cfg) {
  const int h = cfg.enc_hidden, lat = cfg.latent, df = cfg.blendshape_dim;

  ps.add("cascade/face/conv0/w", {3, lat, h}, Init::XavierUniform);
  ps.add("cascade/face/conv0/b", {1, h}, Init::Zero);
  ps.add("cascade/face/conv1/w", {3, h, h}, Init::XavierUniform);
  ps.add("cascade/face/conv1/b", {1, h}, Init::Zero);
  ps.add("cascade/face/conv2/w", {3, h, df}, Init::XavierUniform);
  ps.add("cascade/face/conv2/b", {1, df}, Init::Zero);

  ps.add("cascade/tffd/conv0/w", {3, df, h}, Init::XavierUniform);
  ps.add("cascade/tffd/conv0/b", {1, h}, Init::Zero);
  ps.add("cascade/tffd/conv1/w", {3, h, h}, Init::XavierUniform);
  ps.add("cascade/tffd/conv1/b", {1, h}, Init::Zero);
  ps.add("cascade/tffd/conv2/w", {3, h, h}, Init::XavierUniform);
  ps.add("cascade/tffd/conv2/b", {1, h}, Init::Zero);
  ps.add("cascade/tffd/conv3/w", {3, h, lat}, Init::XavierUniform);
  ps.add("cascade/tffd/conv3/b", {1, lat}, Init::Zero);

  ps.add("cascade/seed/w", {cfg.seed_frames * kPoseDims, lat}, Init::XavierUniform);
  ps.add("cascade/seed/b", {1, lat}, Init::Zero);

  auto add_attn = [&](const std::string& prefix, int channels) {
    const int mid = std::max(1, channels / cfg.attn_reduction);
    ps.add(prefix + "/w1", {channels, mid}, Init::XavierUniform);
    ps.add(prefix + "/b1", {1, mid}, Init::Zero);
    ps.add(prefix + "/w2", {mid, channels}, Init::XavierUniform);
    ps.add(prefix + "/b2", {1, channels}, Init::Zero);
  };
  add_attn("cascade/attn_fuse", fused_width(cfg));
  add_attn("cascade/attn_hand", fused_width(cfg) + cfg.lstm_hidden);

  ps.add("cascade/hynet/conv0/w", {3, 2 * cfg.embed_dim, cfg.style_dim}, Init::XavierUniform);
  ps.add("cascade/hynet/conv0/b", {1, cfg.style_dim}, Init::Zero);
  ps.add("cascade/hynet/conv1/w", {3, cfg.style_dim, cfg.style_dim}, Init::XavierUniform);
  ps.add("cascade/hynet/conv1/b", {1, cfg.style_dim}, Init::Zero);

  // Style projections start as the identity modulation (scale 1, shift 0) so
  // an untrained injector leaves the normalized features untouched.
  ps.add("cascade/adaln/f/w", {cfg.style_dim, fused_width(cfg)}, Init::Zero);
  ps.add("cascade/adaln/f/b", {1, fused_width(cfg)}, Init::One);
  ps.add("cascade/adaln/g/w", {cfg.style_dim, fused_width(cfg)}, Init::Zero);
  ps.add("cascade/adaln/g/b", {1, fused_width(cfg)}, Init::Zero);

  auto add_lstm = [&](const std::string& prefix, int in_width) {
    for (int l = 0; l < cfg.lstm_layers; ++l) {
      const int in = l == 0 ? in_width : cfg.lstm_hidden;
      const std::string p = prefix + std::to_string(l);
      ps.add(p + "/wih", {in, 4 * cfg.lstm_hidden}, Init::XavierUniform);
      ps.add(p + "/whh", {cfg.lstm_hidden, 4 * cfg.lstm_hidden}, Init::XavierUniform);
      Tensor& b = ps.add(p + "/b", {1, 4 * cfg.lstm_hidden}, Init::Zero);
      // forget-gate bias starts at 1
      for (int j = cfg.lstm_hidden; j < 2 * cfg.lstm_hidden; ++j) b.at(0, j) = real_t(1);
    }
  };
  add_lstm("cascade/body_lstm", fused_width(cfg));
  add_lstm("cascade/hand_lstm", fused_width(cfg) + cfg.lstm_hidden);

  // Pose heads: hidden layer plus a zero-initialized output layer, so a
  // fresh model emits the rest pose.
  auto add_mlp = [&](const std::string& prefix, int out_width) {
    ps.add(prefix + "/w1", {cfg.lstm_hidden, cfg.mlp_hidden}, Init::XavierUniform);
    ps.add(prefix + "/b1", {1, cfg.mlp_hidden}, Init::Zero);
    ps.add(prefix + "/w2", {cfg.mlp_hidden, out_width}, Init::Zero);
    ps.add(prefix + "/b2", {1, out_width}, Init::Zero);
  };
  add_mlp("cascade/body_mlp", kBodyDims);
  add_mlp("cascade/hand_mlp", kHandDims);
}

inline void init_model(ParamStore& ps, const ModelConfig& cfg) {
  init_frontend(ps, cfg);
  init_cascade(ps, cfg);
}

inline Var face_generate(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var audio_latent) {
  (void)cfg;
  Var h = tp.relu(tp.temporal_conv1d(audio_latent, tp.param(ps, "cascade/face/conv0/w"),
                                     tp.param(ps, "cascade/face/conv0/b")));
  h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, "cascade/face/conv1/w"), tp.param(ps, "cascade/face/conv1/b")));
  Var out = tp.temporal_conv1d(h, tp.param(ps, "cascade/face/conv2/w"), tp.param(ps, "cascade/face/conv2/b"));
  return tp.sigmoid(out);  // blendshapes live in [0,1]
}

inline Var tffd(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var face) {
  (void)cfg;
  Var h = face;
  for (int l = 0; l < 4; ++l) {
    const std::string p = "cascade/tffd/conv" + std::to_string(l);
    Var c = tp.temporal_conv1d(h, tp.param(ps, p + "/w"), tp.param(ps, p + "/b"));
    h = l + 1 < 4 ? tp.relu(c) : c;
  }
  return h;
}

// Channel-wise attention: a shared two-layer MLP scores time-averaged and
// time-max channel statistics; the sigmoid of their sum gates each channel.
inline Var cw_attn(Tape& tp, ParamStore& ps, const std::string& prefix, Var x) {
  Var w1 = tp.param(ps, prefix + "/w1");
  Var b1 = tp.param(ps, prefix + "/b1");
  Var w2 = tp.param(ps, prefix + "/w2");
  Var b2 = tp.param(ps, prefix + "/b2");
  auto mlp = [&](Var pooled) { return tp.linear(tp.relu(tp.linear(pooled, w1, b1)), w2, b2); };
  Var gate = tp.sigmoid(tp.add(mlp(tp.avg_pool_time(x)), mlp(tp.max_pool_time(x))));
  return tp.mul(x, gate);  // gate broadcasts over frames
}

inline Var style_vector(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var emotion_emb, Var speaker_emb) {
  (void)cfg;
  Var h = tp.concat_channels({emotion_emb, speaker_emb});
  h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, "cascade/hynet/conv0/w"), tp.param(ps, "cascade/hynet/conv0/b")));
  return tp.temporal_conv1d(h, tp.param(ps, "cascade/hynet/conv1/w"), tp.param(ps, "cascade/hynet/conv1/b"));
}

// GestureAdaLN: standardize each frame across channels, then apply the
// style-conditioned affine f(S) * x + g(S). adaln_normalize=false keeps the
// literal affine-only form.
inline Var gesture_adaln(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var x, Var style) {
  Var fw = tp.param(ps, "cascade/adaln/f/w");
  if (tp.val(x).cols() != tp.val(fw).cols())
    throw std::invalid_argument("gesture_adaln: feature width " + tp.val(x).shape_string() +
                                " does not match the style projections");
  Var fs = tp.linear(style, fw, tp.param(ps, "cascade/adaln/f/b"));
  Var gs = tp.linear(style, tp.param(ps, "cascade/adaln/g/w"), tp.param(ps, "cascade/adaln/g/b"));
  Var base = cfg.adaln_normalize ? tp.layer_stats_normalize(x, cfg.adaln_eps) : x;
  return tp.add(tp.mul(base, fs), gs);
}

inline Var lstm_sequence(Tape& tp, ParamStore& ps, const ModelConfig& cfg, const std::string& prefix, Var x) {
  Var h_seq = x;
  for (int l = 0; l < cfg.lstm_layers; ++l) {
    const std::string p = prefix + std::to_string(l);
    Var w_ih = tp.param(ps, p + "/wih");
    Var w_hh = tp.param(ps, p + "/whh");
    Var b = tp.param(ps, p + "/b");
    Var h = tp.input(Tensor({1, cfg.lstm_hidden}));
    Var c = tp.input(Tensor({1, cfg.lstm_hidden}));
    std::vector<Var> rows;
    const int t = tp.val(h_seq).rows();
    rows.reserve(t);
    for (int f = 0; f < t; ++f) {
      auto [h_next, c_next] = lstm_step(tp, tp.row(h_seq, f), h, c, w_ih, w_hh, b);
      h = h_next;
      c = c_next;
      rows.push_back(h);
    }
    h_seq = tp.stack_rows(rows);
  }
  return h_seq;
}

inline Var pose_mlp(Tape& tp, ParamStore& ps, const std::string& prefix, Var h) {
  Var mid = tp.relu(tp.linear(h, tp.param(ps, prefix + "/w1"), tp.param(ps, prefix + "/b1")));
  return tp.linear(mid, tp.param(ps, prefix + "/w2"), tp.param(ps, prefix + "/b2"));
}

// (T, fused) -> latent body sequence (T, lstm_hidden) and poses (T, 27)
inline std::pair<Var, Var> body_decode(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var styled) {
  Var bhat = lstm_sequence(tp, ps, cfg, "cascade/body_lstm", styled);
  return {bhat, pose_mlp(tp, ps, "cascade/body_mlp", bhat)};
}

// The hand stage re-attends over [styled : body latents] before decoding.
inline std::pair<Var, Var> hand_decode(Tape& tp, ParamStore& ps, const ModelConfig& cfg, Var styled, Var bhat) {
  Var chat = cw_attn(tp, ps, "cascade/attn_hand", tp.concat_channels({styled, bhat}));
  Var hhat = lstm_sequence(tp, ps, cfg, "cascade/hand_lstm", chat);
  return {hhat, pose_mlp(tp, ps, "cascade/hand_mlp", hhat)};
}

struct CascadeOut {
  Var audio_latent, text_latent;
  Var face;         // (T, D_f)
  Var face_latent;  // TFFD output (T, latent)
  Var fused;        // attended fusion (T, 4*latent)
  Var styled;       // after GestureAdaLN
  Var body_latent, body;
  Var hand_latent, hands;
  int emotion = 0, speaker = 0;  // labels actually used
};

// Full chain on an existing tape. Labels may be omitted; the frozen
// classifier then fills them in from the audio, which is what makes
// inference run on speech features alone.
inline CascadeOut synthesize_on_tape(Tape& tp, ParamStore& ps, const ModelConfig& cfg, const Tensor& audio,
                                     const Tensor& text, const Tensor& seed_poses,
                                     std::optional<int> emotion = std::nullopt,
                                     std::optional<int> speaker = std::nullopt,
                                     const Tensor* teacher_face = nullptr) {
  if (audio.rows() != text.rows())
    throw std::invalid_argument("synthesize: audio has " + std::to_string(audio.rows()) + " frames but text has " +
                                std::to_string(text.rows()));
  if (seed_poses.cols() != kPoseDims || seed_poses.rows() != cfg.seed_frames)
    throw std::invalid_argument("synthesize: seed poses must be (" + std::to_string(cfg.seed_frames) + "," +
                                std::to_string(kPoseDims) + "), got " + seed_poses.shape_string());
  const int t = audio.rows();

  CascadeOut out;
  out.audio_latent = encode_audio(tp, ps, cfg, tp.input(audio));
  out.text_latent = encode_text(tp, ps, cfg, tp.input(text));
  out.face = face_generate(tp, ps, cfg, out.audio_latent);
  Var face_in = out.face;
  if (cfg.teacher_forcing && teacher_face != nullptr) face_in = tp.input(*teacher_face);
  out.face_latent = tffd(tp, ps, cfg, face_in);

  Var seed_flat = tp.reshape(tp.input(seed_poses), {1, cfg.seed_frames * kPoseDims});
  Var seed_lat = tp.repeat_rows(tp.linear(seed_flat, tp.param(ps, "cascade/seed/w"), tp.param(ps, "cascade/seed/b")), t);

  out.fused = cw_attn(tp, ps, "cascade/attn_fuse",
                      tp.concat_channels({out.audio_latent, out.text_latent, out.face_latent, seed_lat}));

  Var emo_rows, spk_rows;
  if (emotion.has_value() && speaker.has_value()) {
    out.emotion = *emotion;
    out.speaker = *speaker;
    auto [e, i] = embed_labels(tp, ps, cfg, out.emotion, out.speaker, t);
    emo_rows = e;
    spk_rows = i;
  } else {
    if (!ps.has("cls/conv0/w"))
      throw std::runtime_error("synthesize: labels were omitted but no classifier is present; "
                               "train one first or pass labels explicitly");
    if (cfg.soft_labels) {
      ClassifierLogits lg = classifier_logits(tp, ps, cfg, tp.input(audio));
      emo_rows = tp.repeat_rows(tp.linear(tp.softmax(lg.emotion), tp.param(ps, "embed/emotion")), t);
      spk_rows = tp.repeat_rows(tp.linear(tp.softmax(lg.speaker), tp.param(ps, "embed/speaker")), t);
      ClassifyResult r = classify(ps, cfg, audio);
      out.emotion = r.emotion;
      out.speaker = r.speaker;
    } else {
      ClassifyResult r = classify(ps, cfg, audio);
      out.emotion = emotion.value_or(r.emotion);
      out.speaker = speaker.value_or(r.speaker);
      auto [e, i] = embed_labels(tp, ps, cfg, out.emotion, out.speaker, t);
      emo_rows = e;
      spk_rows = i;
    }
  }

  Var style = style_vector(tp, ps, cfg, emo_rows, spk_rows);
  out.styled = gesture_adaln(tp, ps, cfg, out.fused, style);

  auto [bhat, body] = body_decode(tp, ps, cfg, out.styled);
  out.body_latent = bhat;
  out.body = body;
  auto [hhat, hands] = hand_decode(tp, ps, cfg, out.styled, bhat);
  out.hand_latent = hhat;
  out.hands = hands;
  return out;
}

struct SynthesisResult {
  Tensor face;
  GestureSequence gesture;
  int emotion = 0, speaker = 0;
};

inline SynthesisResult synthesize(ParamStore& ps, const ModelConfig& cfg, const Tensor& audio, const Tensor& text,
                                  const Tensor& seed_poses, std::optional<int> emotion = std::nullopt,
                                  std::optional<int> speaker = std::nullopt, double frame_rate = 15.0) {
  Tape tp;
  CascadeOut out = synthesize_on_tape(tp, ps, cfg, audio, text, seed_poses, emotion, speaker);
  SynthesisResult r;
  r.face = tp.val(out.face);
  r.gesture.body = tp.val(out.body);
  r.gesture.hands = tp.val(out.hands);
  r.gesture.frame_rate = frame_rate;
  for (auto& x : r.gesture.body.v) x = wrap_angle(x);
  for (auto& x : r.gesture.hands.v) x = wrap_angle(x);
  r.emotion = out.emotion;
  r.speaker = out.speaker;
  return r;
}

}  // namespace gestic
