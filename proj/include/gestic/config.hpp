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

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gestic/eval.hpp"
#include "gestic/losses.hpp"
#include "gestic/model_config.hpp"
#include "gestic/optim.hpp"
#include "gestic/synthetic.hpp"
#include "gestic/train.hpp"

namespace gestic {

// Everything one run needs, loadable from a single JSON file. Unset fields
// keep their defaults; the parsed object is echoed back verbatim into run
// outputs together with a stable hash.
struct RunConfig {
  // data: either a manifest path or a synthetic generator spec
  std::string manifest;
  bool use_synthetic = true;
  SyntheticConfig synthetic;

  ModelConfig model;
  LossWeights loss;
  AdamConfig optim;
  TrainConfig train;
  EvalConfig eval;

  int window_frames = 34;
  int window_stride = 10;

  std::string classifier_ckpt;  // input to `train`
  std::string model_ckpt;       // input to `evaluate` / `synthesize`

  // sweep grid rows are (lambda_rec, lambda_mse, lambda_rhy)
  std::vector<std::array<real_t, 3>> sweep_grid;
  int sweep_steps = 100;

  std::uint64_t seed = 1;

  nlohmann::json echo;  // the JSON this config was parsed from
};

namespace cfgjson {

template <typename T>
void get_to(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    j.at(key).get_to(out);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

inline void parse_synthetic(const nlohmann::json& j, SyntheticConfig& s) {
  get_to(j, "n_sequences", s.n_sequences);
  get_to(j, "frames_per_sequence", s.frames_per_sequence);
  get_to(j, "rng_seed", s.rng_seed);
  get_to(j, "frame_rate", s.frame_rate);
  get_to(j, "audio_dim", s.audio_dim);
  get_to(j, "text_dim", s.text_dim);
  get_to(j, "blendshape_dim", s.blendshape_dim);
  get_to(j, "n_emotions", s.n_emotions);
  get_to(j, "n_speakers", s.n_speakers);
  get_to(j, "beat_period_min", s.beat_period_min);
  get_to(j, "beat_period_max", s.beat_period_max);
  get_to(j, "style_mag", s.style_mag);
  get_to(j, "stroke_amp", s.stroke_amp);
  get_to(j, "hand_scale", s.hand_scale);
  get_to(j, "audio_noise", s.audio_noise);
  get_to(j, "face_noise", s.face_noise);
  get_to(j, "pose_noise", s.pose_noise);
  get_to(j, "envelope_period_min", s.envelope_period_min);
  get_to(j, "envelope_period_max", s.envelope_period_max);
}

inline void parse_model(const nlohmann::json& j, ModelConfig& m) {
  get_to(j, "audio_dim", m.audio_dim);
  get_to(j, "text_dim", m.text_dim);
  get_to(j, "latent", m.latent);
  get_to(j, "enc_hidden", m.enc_hidden);
  get_to(j, "embed_dim", m.embed_dim);
  get_to(j, "n_emotions", m.n_emotions);
  get_to(j, "n_speakers", m.n_speakers);
  get_to(j, "blendshape_dim", m.blendshape_dim);
  get_to(j, "seed_frames", m.seed_frames);
  get_to(j, "style_dim", m.style_dim);
  get_to(j, "lstm_hidden", m.lstm_hidden);
  get_to(j, "lstm_layers", m.lstm_layers);
  get_to(j, "mlp_hidden", m.mlp_hidden);
  get_to(j, "attn_reduction", m.attn_reduction);
  get_to(j, "adaln_normalize", m.adaln_normalize);
  get_to(j, "soft_labels", m.soft_labels);
  get_to(j, "teacher_forcing", m.teacher_forcing);
}

}  // namespace cfgjson

inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig c;
  c.echo = j;
  if (j.contains("data")) {
    const auto& d = j.at("data");
    if (d.contains("manifest")) {
      c.manifest = d.at("manifest").get<std::string>();
      c.use_synthetic = false;
    }
    if (d.contains("synthetic")) {
      cfgjson::parse_synthetic(d.at("synthetic"), c.synthetic);
      c.use_synthetic = true;
    }
    if (d.contains("manifest") && d.contains("synthetic"))
      throw std::runtime_error("config: 'data' must name either a manifest or a synthetic spec, not both");
  }
  if (j.contains("model")) cfgjson::parse_model(j.at("model"), c.model);
  if (j.contains("loss")) {
    const auto& l = j.at("loss");
    cfgjson::get_to(l, "lambda_rhy", c.loss.lambda_rhy);
    cfgjson::get_to(l, "lambda_mse", c.loss.lambda_mse);
    cfgjson::get_to(l, "lambda_rec", c.loss.lambda_rec);
    cfgjson::get_to(l, "alpha", c.loss.alpha);
    cfgjson::get_to(l, "tau", c.loss.tau);
  }
  if (j.contains("optim")) {
    const auto& o = j.at("optim");
    cfgjson::get_to(o, "lr", c.optim.lr);
    cfgjson::get_to(o, "beta1", c.optim.beta1);
    cfgjson::get_to(o, "beta2", c.optim.beta2);
    cfgjson::get_to(o, "eps", c.optim.eps);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    cfgjson::get_to(t, "steps", c.train.steps);
    cfgjson::get_to(t, "batch_size", c.train.batch_size);
    cfgjson::get_to(t, "checkpoint_every", c.train.checkpoint_every);
    cfgjson::get_to(t, "classifier_steps", c.train.classifier_steps);
    cfgjson::get_to(t, "classifier_batch", c.train.classifier_batch);
    cfgjson::get_to(t, "early_stop_patience", c.train.early_stop_patience);
    cfgjson::get_to(t, "early_stop_tolerance", c.train.early_stop_tolerance);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    cfgjson::get_to(e, "srgr_delta", c.eval.srgr_delta);
    cfgjson::get_to(e, "beat_sigma", c.eval.beat_sigma);
    cfgjson::get_to(e, "use_ground_truth", c.eval.use_ground_truth);
    if (e.contains("embedder")) {
      const auto& m = e.at("embedder");
      cfgjson::get_to(m, "latent", c.eval.embedder.latent);
      cfgjson::get_to(m, "hidden", c.eval.embedder.hidden);
      cfgjson::get_to(m, "steps", c.eval.embedder.steps);
      cfgjson::get_to(m, "batch", c.eval.embedder.batch);
      cfgjson::get_to(m, "lr", c.eval.embedder.lr);
      cfgjson::get_to(m, "seed", c.eval.embedder.seed);
    }
  }
  cfgjson::get_to(j, "window_frames", c.window_frames);
  cfgjson::get_to(j, "window_stride", c.window_stride);
  cfgjson::get_to(j, "classifier_ckpt", c.classifier_ckpt);
  cfgjson::get_to(j, "model_ckpt", c.model_ckpt);
  cfgjson::get_to(j, "seed", c.seed);
  cfgjson::get_to(j, "sweep_steps", c.sweep_steps);
  if (j.contains("sweep_grid")) {
    for (const auto& row : j.at("sweep_grid")) {
      if (!row.is_array() || row.size() != 3)
        throw std::runtime_error("config: sweep_grid rows must be [lambda_rec, lambda_mse, lambda_rhy]");
      c.sweep_grid.push_back({row[0].get<real_t>(), row[1].get<real_t>(), row[2].get<real_t>()});
    }
  }

  // keep the synthetic spec and the model front ends dimensionally in sync
  if (c.use_synthetic) {
    c.model.audio_dim = c.synthetic.audio_dim;
    c.model.text_dim = c.synthetic.text_dim;
    c.model.blendshape_dim = c.synthetic.blendshape_dim;
    c.model.n_emotions = c.synthetic.n_emotions;
    c.model.n_speakers = c.synthetic.n_speakers;
  }
  c.model.validate();
  c.loss.validate();
  if (c.use_synthetic) c.synthetic.validate();
  if (c.window_frames < 1 || c.window_stride < 1)
    throw std::runtime_error("config: window_frames and window_stride must be >= 1");
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open config");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": invalid JSON: " + e.what());
  }
  return parse_run_config(j);
}

// FNV-1a over the canonical (sorted-key) dump; stable across runs.
inline std::string config_hash(const nlohmann::json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// The hyperparameter grid of the weight sweep: (lambda_rec, lambda_mse,
// lambda_rhy) cells, always including (500, 1000, 1).
inline std::vector<std::array<real_t, 3>> default_sweep_grid() {
  return {{{500, 500, 500}},
          {{1000, 500, 500}},
          {{1000, 500, 100}},
          {{500, 1000, 100}},
          {{1000, 500, 10}},
          {{500, 1000, 10}},
          {{1000, 500, 1}},
          {{500, 1000, 1}}};
}

}  // namespace gestic
