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
#include <vector>

#include "gestic/cascade.hpp"
#include "gestic/dataio.hpp"
#include "gestic/metrics.hpp"
#include "gestic/model_config.hpp"

namespace gestic {

struct EvalConfig {
  real_t srgr_delta = 5;        // degrees
  double beat_sigma = 0.2;      // seconds, ~3 frames at 15 fps
  EmbedderConfig embedder;
  bool use_ground_truth = false;  // score the ground truth against itself
};

struct MetricReport {
  double fgd_value = 0;
  double srgr_value = 0;
  double beat_align_value = 0;
  int n_clips = 0;
};

// Scores a model over a clip set. Generation runs the inference path: labels
// come from the frozen classifier when one is present, otherwise from the
// clip annotations. The FGD embedder is trained on the ground-truth poses of
// the same clip set, so values are comparable within a run only.
inline MetricReport evaluate_model(ParamStore& ps, const ModelConfig& cfg, const std::vector<Clip>& clips,
                                   const EvalConfig& eval_cfg) {
  if (clips.size() < 2) throw std::invalid_argument("evaluate_model: needs at least 2 clips");
  const bool has_classifier = ps.has("cls/conv0/w");

  Embedder emb = train_embedder(clips, eval_cfg.embedder);

  std::vector<std::vector<real_t>> gt_latents, gen_latents;
  real_t srgr_acc = 0, beat_acc = 0;
  int beat_clips = 0;
  for (const Clip& clip : clips) {
    const Tensor gt_pose = concat_pose(clip.body, clip.hands);
    Tensor gen_pose;
    if (eval_cfg.use_ground_truth) {
      gen_pose = gt_pose;
    } else {
      SynthesisResult r =
          has_classifier
              ? synthesize(ps, cfg, clip.audio, clip.text, clip.seed_poses, std::nullopt, std::nullopt, clip.frame_rate)
              : synthesize(ps, cfg, clip.audio, clip.text, clip.seed_poses, clip.emotion, clip.speaker, clip.frame_rate);
      gen_pose = concat_pose(r.gesture.body, r.gesture.hands);
    }

    gt_latents.push_back(embed_clip(emb, gt_pose));
    gen_latents.push_back(embed_clip(emb, gen_pose));
    srgr_acc += srgr(gen_pose, gt_pose, clip.sem_weights, eval_cfg.srgr_delta);

    const BeatList audio_beats = extract_beats(onset_channel(clip.audio), clip.frame_rate, BeatKind::AudioOnset);
    if (!audio_beats.times.empty()) {
      const BeatList gesture_beats =
          extract_beats(mean_joint_speed(gen_pose), clip.frame_rate, BeatKind::GestureKinematic);
      beat_acc += beat_align(audio_beats, gesture_beats, eval_cfg.beat_sigma);
      ++beat_clips;
    }
  }

  MetricReport report;
  report.n_clips = static_cast<int>(clips.size());
  report.fgd_value = fgd(gaussian_stats(gt_latents), gaussian_stats(gen_latents));
  report.srgr_value = srgr_acc / static_cast<real_t>(clips.size());
  report.beat_align_value = beat_clips > 0 ? beat_acc / beat_clips : 0;
  return report;
}

}  // namespace gestic
