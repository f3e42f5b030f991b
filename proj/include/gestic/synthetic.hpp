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
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestic/dataio.hpp"
#include "gestic/tensor.hpp"

namespace gestic {

// Synthetic speech/gesture generator. Every signal the model is supposed to
// learn is planted explicitly:
//   - audio band energies follow a smooth envelope, with emotion and speaker
//     identity binary-coded into per-band gains (the classifier's target);
//   - the last audio channel carries an onset impulse at each beat frame;
//   - blendshapes are a low-passed affine function of the envelope (the
//     face/audio correlation the rhythm loss exploits);
//   - poses interpolate between random targets with a smoothstep stroke per
//     beat interval and hold for exactly one frame at each beat, so mean
//     joint speed has a strict local minimum exactly on the beat;
//   - per-(emotion,speaker) offsets shift the pose targets (the style
//     signal).
struct SyntheticConfig {
  int n_sequences = 8;
  int frames_per_sequence = 120;
  std::uint64_t rng_seed = 1;
  double frame_rate = 15.0;
  int audio_dim = 16;
  int text_dim = 8;
  int blendshape_dim = 51;
  int n_emotions = 8;
  int n_speakers = 4;
  int beat_period_min = 8;
  int beat_period_max = 12;
  double style_mag = 15.0;    // degrees added per label bit pattern
  double stroke_amp = 10.0;   // half-range of body stroke targets, degrees
  double hand_scale = 0.5;    // hand targets scale relative to body
  double audio_noise = 0.02;
  double face_noise = 0.0;
  double pose_noise = 0.0;    // nonzero noise perturbs the planted beat geometry
  double envelope_period_min = 20.0;
  double envelope_period_max = 40.0;

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("SyntheticConfig: " + m); };
    if (n_sequences < 1) fail("n_sequences must be >= 1");
    if (beat_period_min < 4) fail("beat_period_min must be >= 4");
    if (beat_period_max < beat_period_min) fail("beat_period_max must be >= beat_period_min");
    if (frames_per_sequence < beat_period_max + 10) fail("frames_per_sequence too short for the beat period range");
    if (n_emotions < 1 || n_emotions > 8) fail("n_emotions must be in 1..8");
    if (n_speakers < 1) fail("n_speakers must be >= 1");
    const int bits = label_bits(n_emotions) + label_bits(n_speakers);
    if (audio_dim < bits + 2) fail("audio_dim must be >= label bits + 2 (bands plus onset channel)");
    if (text_dim < 1 || blendshape_dim < 1) fail("feature widths must be >= 1");
    if (stroke_amp <= 0) fail("stroke_amp must be positive");
    if (style_mag < 0) fail("style_mag must be >= 0");
    if (style_mag + stroke_amp > 180) fail("style_mag + stroke_amp must stay within the Euler range");
    if (envelope_period_min < 4 || envelope_period_max < envelope_period_min) fail("bad envelope period range");
  }

  static int label_bits(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return std::max(b, 1);
  }
};

struct SyntheticSequence {
  SequenceRecord record;
  std::vector<int> beat_frames;  // frame indices of the planted beats
  Tensor style_offset;           // (1, 141) additive pose offset for this (emotion, speaker)
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline real_t sign_hash(std::uint64_t seed, std::uint64_t tag, int label, int channel) {
  const std::uint64_t h = splitmix64(seed ^ (tag * 0x9e3779b97f4a7c15ull) ^
                                     (static_cast<std::uint64_t>(label) << 32) ^ static_cast<std::uint64_t>(channel));
  return (h & 1) ? real_t(1) : real_t(-1);
}

inline real_t smoothstep(real_t u) { return u * u * (real_t(3) - real_t(2) * u); }

}  // namespace detail

// Deterministic additive pose offset for an (emotion, speaker) pair. The
// emotion and speaker contributions are independent sign patterns, so
// marginalizing over one label leaves the other's offset intact.
inline Tensor synthetic_style_offset(const SyntheticConfig& cfg, int emotion, int speaker) {
  Tensor off({1, kPoseDims});
  for (int c = 0; c < kPoseDims; ++c) {
    off.at(0, c) = real_t(0.5) * static_cast<real_t>(cfg.style_mag) *
                   (detail::sign_hash(cfg.rng_seed, 0xE11ull, emotion, c) +
                    detail::sign_hash(cfg.rng_seed, 0x5BDull, speaker, c));
  }
  return off;
}

inline std::vector<SyntheticSequence> gen_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  auto unif = [&](double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(rng);
  };
  auto unii = [&](int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
  };

  const int t_total = cfg.frames_per_sequence;
  const int n_bands = cfg.audio_dim - 1;  // last channel is the onset track
  const int emo_bits = SyntheticConfig::label_bits(cfg.n_emotions);
  const int spk_bits = SyntheticConfig::label_bits(cfg.n_speakers);

  // Global blendshape mapping, shared by all sequences so the face is a
  // learnable function of the audio envelope.
  std::vector<real_t> face_base(cfg.blendshape_dim), face_amp(cfg.blendshape_dim);
  for (int d = 0; d < cfg.blendshape_dim; ++d) {
    face_base[d] = static_cast<real_t>(unif(0.3, 0.7));
    face_amp[d] = static_cast<real_t>(unif(-0.6, 0.6));
  }

  std::vector<SyntheticSequence> out;
  out.reserve(cfg.n_sequences);
  for (int si = 0; si < cfg.n_sequences; ++si) {
    SyntheticSequence seq;
    SequenceRecord& rec = seq.record;
    rec.frame_rate = cfg.frame_rate;
    rec.emotion = unii(0, cfg.n_emotions - 1);
    rec.speaker = unii(0, cfg.n_speakers - 1);

    // Beat schedule. First beat lands at >= 4 and the last at <= T-5, which
    // leaves room for a lead-in and lead-out stroke on every side.
    std::vector<int>& beats = seq.beat_frames;
    int t = 4 + unii(0, cfg.beat_period_min - 1);
    while (t <= t_total - 5) {
      beats.push_back(t);
      t += unii(cfg.beat_period_min, cfg.beat_period_max);
    }

    // Envelope: slow sinusoid, plus a short triangular burst at each beat.
    const double env_period = unif(cfg.envelope_period_min, cfg.envelope_period_max);
    const double env_phase = unif(0.0, 2.0 * 3.14159265358979323846);
    std::vector<real_t> env(t_total), burst(t_total, 0);
    for (int f = 0; f < t_total; ++f)
      env[f] = static_cast<real_t>(0.5 + 0.35 * std::sin(2.0 * 3.14159265358979323846 * f / env_period + env_phase));
    for (int b : beats)
      for (int d = -2; d <= 2; ++d) {
        const int f = b + d;
        if (f >= 0 && f < t_total) burst[f] = std::max(burst[f], real_t(1) - std::abs(d) * real_t(0.5));
      }

    // Audio: band gains binary-code the labels; onset channel spikes on beats.
    rec.audio = Tensor({t_total, cfg.audio_dim});
    for (int b = 0; b < n_bands; ++b) {
      real_t gain = real_t(0.75);
      if (b < emo_bits)
        gain = real_t(0.3) + real_t(0.9) * ((rec.emotion >> b) & 1);
      else if (b < emo_bits + spk_bits)
        gain = real_t(0.3) + real_t(0.9) * ((rec.speaker >> (b - emo_bits)) & 1);
      for (int f = 0; f < t_total; ++f)
        rec.audio.at(f, b) = gain * env[f] + real_t(0.3) * burst[f] + static_cast<real_t>(unif(0.0, cfg.audio_noise));
    }
    for (int f = 0; f < t_total; ++f) rec.audio.at(f, n_bands) = static_cast<real_t>(unif(0.0, cfg.audio_noise));
    for (int b : beats) rec.audio.at(b, n_bands) = static_cast<real_t>(unif(0.85, 0.95));

    // Blendshapes: 5-frame moving average of the envelope, channel-wise affine.
    rec.face = Tensor({t_total, cfg.blendshape_dim});
    for (int f = 0; f < t_total; ++f) {
      real_t acc = 0;
      int cnt = 0;
      for (int d = -2; d <= 2; ++d) {
        const int g = f + d;
        if (g >= 0 && g < t_total) {
          acc += env[g];
          ++cnt;
        }
      }
      const real_t env_s = acc / cnt;
      for (int d = 0; d < cfg.blendshape_dim; ++d) {
        real_t x = face_base[d] + face_amp[d] * (env_s - real_t(0.5));
        if (cfg.face_noise > 0) x += static_cast<real_t>(unif(-cfg.face_noise, cfg.face_noise));
        rec.face.at(f, d) = std::clamp(x, real_t(0), real_t(1));
      }
    }

    // Poses: pick a target per waypoint, smoothstep between targets, and hold
    // for one frame at each beat so the beat frame is a strict speed minimum.
    seq.style_offset = synthetic_style_offset(cfg, rec.emotion, rec.speaker);
    std::vector<int> waypoints;
    waypoints.push_back(0);
    for (int b : beats) waypoints.push_back(b);
    waypoints.push_back(t_total - 1);

    const int n_way = static_cast<int>(waypoints.size());
    std::vector<std::vector<real_t>> targets(n_way, std::vector<real_t>(kPoseDims));
    for (int w = 0; w < n_way; ++w)
      for (int c = 0; c < kPoseDims; ++c) {
        const double amp = c < kBodyDims ? cfg.stroke_amp : cfg.stroke_amp * cfg.hand_scale;
        targets[w][c] = seq.style_offset.at(0, c) + static_cast<real_t>(unif(-amp, amp));
      }

    Tensor pose({t_total, kPoseDims});
    for (int w = 0; w + 1 < n_way; ++w) {
      const int a = waypoints[w], b = waypoints[w + 1];
      const int span = b - a;
      for (int f = a; f <= b; ++f) {
        const real_t u = std::min(real_t(f - a) / real_t(span - 1), real_t(1));
        const real_t h = detail::smoothstep(u);
        for (int c = 0; c < kPoseDims; ++c)
          pose.at(f, c) = targets[w][c] + h * (targets[w + 1][c] - targets[w][c]);
      }
    }
    if (cfg.pose_noise > 0)
      for (auto& x : pose.v) x += static_cast<real_t>(unif(-cfg.pose_noise, cfg.pose_noise));

    rec.body = Tensor({t_total, kBodyDims});
    rec.hands = Tensor({t_total, kHandDims});
    for (int f = 0; f < t_total; ++f) {
      for (int c = 0; c < kBodyDims; ++c) rec.body.at(f, c) = pose.at(f, c);
      for (int c = 0; c < kHandDims; ++c) rec.hands.at(f, c) = pose.at(f, kBodyDims + c);
    }

    // Text: one random vector per "word", held over the word's duration.
    rec.text = Tensor({t_total, cfg.text_dim});
    int f = 0;
    while (f < t_total) {
      const int len = std::min(unii(3, 8), t_total - f);
      std::vector<real_t> word(cfg.text_dim);
      for (auto& x : word) x = static_cast<real_t>(unif(-1.0, 1.0));
      for (int g = f; g < f + len; ++g)
        for (int d = 0; d < cfg.text_dim; ++d) rec.text.at(g, d) = word[d];
      f += len;
    }

    // Semantic weights for SRGR: beat frames count double, normalized to mean 1.
    rec.sem_weights.assign(t_total, real_t(1));
    for (int b : beats) rec.sem_weights[b] = real_t(2);
    real_t mean = 0;
    for (real_t w : rec.sem_weights) mean += w;
    mean /= t_total;
    for (real_t& w : rec.sem_weights) w /= mean;

    out.push_back(std::move(seq));
  }
  return out;
}

inline std::vector<SequenceRecord> synthetic_records(const std::vector<SyntheticSequence>& seqs) {
  std::vector<SequenceRecord> recs;
  recs.reserve(seqs.size());
  for (const auto& s : seqs) recs.push_back(s.record);
  return recs;
}

}  // namespace gestic
