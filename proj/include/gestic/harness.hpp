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
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gestic/cascade.hpp"
#include "gestic/config.hpp"
#include "gestic/dataio.hpp"
#include "gestic/eval.hpp"
#include "gestic/export.hpp"
#include "gestic/synthetic.hpp"
#include "gestic/train.hpp"

namespace gestic {

// Command implementations behind the CLI. Each command reads and writes
// files only, so runs compose through the filesystem. Timestamps live in
// run_info.json and never inside logs, which keeps logs byte-reproducible.

namespace fs = std::filesystem;

inline void write_run_info(const RunConfig& cfg, const fs::path& out_dir, const std::string& command) {
  nlohmann::json info;
  info["command"] = command;
  info["config"] = cfg.echo;
  info["config_hash"] = config_hash(cfg.echo);
  const auto now = std::chrono::system_clock::now();
  info["timestamp_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
  std::ofstream os(out_dir / "run_info.json");
  os << info.dump(2) << '\n';
}

inline std::vector<SequenceRecord> load_records(const RunConfig& cfg) {
  if (cfg.use_synthetic) return synthetic_records(gen_synthetic(cfg.synthetic));
  return load_dataset(cfg.manifest, cfg.model.n_speakers, cfg.model.n_emotions);
}

inline std::vector<Clip> load_clips(const RunConfig& cfg, std::ostream* warn = nullptr) {
  std::vector<Clip> clips =
      window_clips(load_records(cfg), cfg.window_frames, cfg.window_stride, cfg.model.seed_frames, warn);
  if (clips.empty()) throw std::runtime_error("dataset yields no clips at the configured window size");
  return clips;
}

// gen-synthetic: writes per-sequence CSVs plus a manifest the loader accepts.
inline fs::path cmd_gen_synthetic(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::vector<SyntheticSequence> seqs = gen_synthetic(cfg.synthetic);
  nlohmann::json manifest;
  manifest["frame_rate"] = cfg.synthetic.frame_rate;
  manifest["sequences"] = nlohmann::json::array();
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const SequenceRecord& rec = seqs[i].record;
    const std::string stem = "seq" + std::to_string(i);
    csvio::write_csv((out_dir / (stem + "_audio.csv")).string(), csvio::numbered_header("a", rec.audio.cols()),
                     rec.audio);
    csvio::write_csv((out_dir / (stem + "_text.csv")).string(), csvio::numbered_header("w", rec.text.cols()),
                     rec.text);
    csvio::write_csv((out_dir / (stem + "_face.csv")).string(), csvio::numbered_header("f", rec.face.cols()),
                     rec.face);
    csvio::write_csv((out_dir / (stem + "_pose.csv")).string(), csvio::numbered_header("p", kPoseDims),
                     concat_pose(rec.body, rec.hands));
    Tensor w({rec.frames(), 1});
    for (int r = 0; r < rec.frames(); ++r) w.at(r, 0) = rec.sem_weights[r];
    csvio::write_csv((out_dir / (stem + "_weights.csv")).string(), {"weight"}, w);
    nlohmann::json entry;
    entry["audio_csv"] = stem + "_audio.csv";
    entry["text_csv"] = stem + "_text.csv";
    entry["face_csv"] = stem + "_face.csv";
    entry["pose_csv"] = stem + "_pose.csv";
    entry["weights_csv"] = stem + "_weights.csv";
    entry["emotion"] = rec.emotion;
    entry["speaker"] = rec.speaker;
    manifest["sequences"].push_back(entry);
  }
  const fs::path manifest_path = out_dir / "manifest.json";
  std::ofstream os(manifest_path);
  os << manifest.dump(2) << '\n';
  if (!os) throw std::runtime_error(manifest_path.string() + ": write failed");
  write_run_info(cfg, out_dir, "gen-synthetic");
  return manifest_path;
}

// train-classifier: pre-trains the emotion/speaker classifier and writes a
// checkpoint with every cls/ entry frozen.
inline fs::path cmd_train_classifier(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::vector<Clip> clips = load_clips(cfg);
  ParamStore ps(cfg.seed);
  init_classifier(ps, cfg.model);
  ClassifierTrainResult r = train_classifier(ps, cfg.model, clips, cfg.train.classifier_steps,
                                             cfg.train.classifier_batch, cfg.optim, cfg.seed);
  const fs::path ckpt = out_dir / "classifier.ckpt";
  save_checkpoint(ps, ckpt.string());
  std::ofstream log(out_dir / "classifier_log.csv");
  log << "step,loss_cls\n";
  char buf[64];
  for (std::size_t i = 0; i < r.losses.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g", i, static_cast<double>(r.losses[i]));
    log << buf << '\n';
  }
  write_run_info(cfg, out_dir, "train-classifier");
  return ckpt;
}

// train: builds a fresh model, absorbs the frozen classifier, optimizes the
// weighted objective, and writes model.ckpt plus the per-step loss log.
inline fs::path cmd_train(const RunConfig& cfg, const fs::path& out_dir) {
  if (cfg.classifier_ckpt.empty())
    throw std::runtime_error("train: config has no classifier_ckpt; run the train-classifier command first");
  if (!fs::exists(cfg.classifier_ckpt))
    throw std::runtime_error("train: classifier checkpoint '" + cfg.classifier_ckpt +
                             "' not found; run the train-classifier command first");
  fs::create_directories(out_dir);
  const std::vector<Clip> clips = load_clips(cfg);

  ParamStore ps(cfg.seed);
  init_model(ps, cfg.model);
  init_rhythm_heads(ps, cfg.model);
  ParamStore cls = load_checkpoint(cfg.classifier_ckpt);
  if (!cls.has("cls/conv0/w")) throw std::runtime_error("train: '" + cfg.classifier_ckpt + "' is not a classifier checkpoint");
  ps.absorb(cls);

  std::ofstream log(out_dir / "training_log.csv");
  train_full(ps, cfg.model, cfg.loss, clips, cfg.train, cfg.optim, cfg.seed, &log, out_dir.string());
  const fs::path ckpt = out_dir / "model.ckpt";
  save_checkpoint(ps, ckpt.string());
  write_run_info(cfg, out_dir, "train");
  return ckpt;
}

inline nlohmann::json metric_report_json(const MetricReport& report, const RunConfig& cfg) {
  nlohmann::json j;
  j["fgd"] = report.fgd_value;
  j["srgr"] = report.srgr_value;
  j["beat_align"] = report.beat_align_value;
  j["n_clips"] = report.n_clips;
  j["config"] = cfg.echo;
  j["config_hash"] = config_hash(cfg.echo);
  return j;
}

// evaluate: scores a model checkpoint (or the ground truth itself) over the
// configured dataset and writes metrics.json.
inline MetricReport cmd_evaluate(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::vector<Clip> clips = load_clips(cfg);
  ParamStore ps(cfg.seed);
  if (!cfg.eval.use_ground_truth) {
    if (cfg.model_ckpt.empty()) throw std::runtime_error("evaluate: config has no model_ckpt");
    ps = load_checkpoint(cfg.model_ckpt);
  }
  ModelConfig mc = cfg.model;
  const MetricReport report = evaluate_model(ps, mc, clips, cfg.eval);
  std::ofstream os(out_dir / "metrics.json");
  os << metric_report_json(report, cfg).dump(2) << '\n';
  write_run_info(cfg, out_dir, "evaluate");
  return report;
}

struct SweepRow {
  real_t lambda_rec = 0, lambda_mse = 0, lambda_rhy = 0;
  MetricReport report;
};

// sweep: one full train + evaluate per loss-weight cell, results ranked by
// FGD ascending.
inline std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::array<real_t, 3>> grid = cfg.sweep_grid.empty() ? default_sweep_grid() : cfg.sweep_grid;

  const std::vector<Clip> clips = load_clips(cfg);
  // one shared classifier for all cells
  ParamStore cls(cfg.seed);
  init_classifier(cls, cfg.model);
  train_classifier(cls, cfg.model, clips, cfg.train.classifier_steps, cfg.train.classifier_batch, cfg.optim,
                   cfg.seed);

  std::vector<SweepRow> rows;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    RunConfig cell_cfg = cfg;
    cell_cfg.loss.lambda_rec = grid[cell][0];
    cell_cfg.loss.lambda_mse = grid[cell][1];
    cell_cfg.loss.lambda_rhy = grid[cell][2];
    cell_cfg.train.steps = cfg.sweep_steps;
    cell_cfg.train.checkpoint_every = 0;

    ParamStore ps(cfg.seed);
    init_model(ps, cell_cfg.model);
    init_rhythm_heads(ps, cell_cfg.model);
    ps.absorb(cls);
    train_full(ps, cell_cfg.model, cell_cfg.loss, clips, cell_cfg.train, cell_cfg.optim, cfg.seed);

    SweepRow row;
    row.lambda_rec = grid[cell][0];
    row.lambda_mse = grid[cell][1];
    row.lambda_rhy = grid[cell][2];
    row.report = evaluate_model(ps, cell_cfg.model, clips, cell_cfg.eval);
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.report.fgd_value < b.report.fgd_value; });

  std::ofstream os(out_dir / "sweep_results.csv");
  os << "lambda_rec,lambda_mse,lambda_rhy,fgd,srgr,beat_align\n";
  char buf[200];
  for (const SweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%g,%g,%g,%.17g,%.17g,%.17g", static_cast<double>(r.lambda_rec),
                  static_cast<double>(r.lambda_mse), static_cast<double>(r.lambda_rhy), r.report.fgd_value,
                  r.report.srgr_value, r.report.beat_align_value);
    os << buf << '\n';
  }
  write_run_info(cfg, out_dir, "sweep");
  return rows;
}

struct SynthesizeFiles {
  std::string model_ckpt;
  std::string audio_csv;
  std::string text_csv;
  std::string seed_poses_csv;  // optional, zeros when empty
  std::optional<int> emotion;
  std::optional<int> speaker;
  ExportFormat format = ExportFormat::Csv;
};

// synthesize: audio + text features in, blendshape and gesture files out.
// Labels are optional; the embedded classifier covers the rest.
inline SynthesisResult cmd_synthesize(const RunConfig& cfg, const SynthesizeFiles& files, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  ParamStore ps = load_checkpoint(files.model_ckpt);
  const Tensor audio = csvio::read_csv(files.audio_csv).data;
  const Tensor text = csvio::read_csv(files.text_csv).data;
  Tensor seed({cfg.model.seed_frames, kPoseDims});
  if (!files.seed_poses_csv.empty()) {
    seed = csvio::read_csv(files.seed_poses_csv).data;
    if (seed.rows() > cfg.model.seed_frames) seed = slice_rows(seed, 0, cfg.model.seed_frames);
  }
  SynthesisResult r = synthesize(ps, cfg.model, audio, text, seed, files.emotion, files.speaker,
                                 cfg.synthetic.frame_rate);
  export_sequence(r.gesture, r.face, (out_dir / "synthesized").string(), files.format);
  write_run_info(cfg, out_dir, "synthesize");
  return r;
}

}  // namespace gestic
