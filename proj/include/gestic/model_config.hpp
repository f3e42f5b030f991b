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

#include <stdexcept>
#include <string>

#include "gestic/tensor.hpp"

namespace gestic {

// Widths and switches for the full model. Defaults are the full-scale
// dimensions (128-d latents, 8-d embeddings, 2x256 LSTMs); tests and the
// desk-scale harness shrink them through the run config.
struct ModelConfig {
  int audio_dim = 16;        // per-frame audio feature width
  int text_dim = 8;          // per-frame text feature width
  int latent = 128;          // shared latent width of all encoders
  int enc_hidden = 64;       // audio/text/classifier conv width
  int embed_dim = 8;         // emotion / speaker embedding width
  int n_emotions = 8;
  int n_speakers = 4;
  int blendshape_dim = 51;
  int seed_frames = 4;
  int style_dim = 64;        // style vector width out of the hypernetwork
  int lstm_hidden = 256;     // body/hand decoder LSTM width
  int lstm_layers = 2;
  int mlp_hidden = 512;      // pose head hidden width
  int attn_reduction = 4;    // channel bottleneck of the attention MLP
  real_t adaln_eps = real_t(1e-5);
  bool adaln_normalize = true;   // standardize before the style affine
  bool soft_labels = false;      // feed classifier probabilities instead of argmax
  bool teacher_forcing = false;  // feed ground-truth blendshapes to the TFFD during training

  void validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument("ModelConfig: " + m); };
    if (audio_dim < 1 || text_dim < 1) fail("feature widths must be >= 1");
    if (latent < 1 || enc_hidden < 1 || embed_dim < 1 || style_dim < 1) fail("latent widths must be >= 1");
    if (n_emotions < 1 || n_speakers < 1) fail("label counts must be >= 1");
    if (blendshape_dim < 1) fail("blendshape_dim must be >= 1");
    if (seed_frames < 1) fail("seed_frames must be >= 1");
    if (lstm_hidden < 1 || lstm_layers < 1 || mlp_hidden < 1) fail("decoder widths must be >= 1");
    if (attn_reduction < 1) fail("attn_reduction must be >= 1");
    if (adaln_eps <= 0) fail("adaln_eps must be positive");
  }
};

}  // namespace gestic
