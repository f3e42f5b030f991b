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

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gestic/harness.hpp"

namespace {

gestic::RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) return gestic::parse_run_config(nlohmann::json::object());
  return gestic::load_run_config(path);
}

void apply_seed(gestic::RunConfig& cfg, const std::optional<std::uint64_t>& seed) {
  if (seed) {
    cfg.seed = *seed;
    cfg.synthetic.rng_seed = *seed;
  }
  // normalize the echoed config so the hash tracks the effective seed
  cfg.echo["seed"] = cfg.seed;
  if (cfg.use_synthetic) cfg.echo["data"]["synthetic"]["rng_seed"] = cfg.synthetic.rng_seed;
}

void print_report(const gestic::MetricReport& r) {
  std::printf("fgd        %.6f\n", r.fgd_value);
  std::printf("srgr       %.6f\n", r.srgr_value);
  std::printf("beat_align %.6f\n", r.beat_align_value);
  std::printf("n_clips    %d\n", r.n_clips);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gestic - cascaded co-speech gesture synthesis, desk scale"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "run configuration JSON");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "override the run seed");

  auto* gen = app.add_subcommand("gen-synthetic", "write a synthetic dataset (manifest.json + CSVs)");
  auto* train_cls = app.add_subcommand("train-classifier", "pre-train and freeze the emotion/speaker classifier");
  auto* train = app.add_subcommand("train", "train the full model against a frozen classifier");
  std::string classifier_ckpt;
  train->add_option("--classifier", classifier_ckpt, "classifier checkpoint (overrides config)");
  auto* evaluate = app.add_subcommand("evaluate", "compute FGD / SRGR / BeatAlign for a model checkpoint");
  std::string model_ckpt;
  evaluate->add_option("--model", model_ckpt, "model checkpoint (overrides config)");
  auto* sweep = app.add_subcommand("sweep", "train + evaluate over the loss-weight grid");
  auto* synth = app.add_subcommand("synthesize", "generate blendshapes and gestures from feature files");
  gestic::SynthesizeFiles files;
  std::string format = "csv";
  int emotion_flag = -1, speaker_flag = -1;
  synth->add_option("--model", files.model_ckpt, "model checkpoint")->required();
  synth->add_option("--audio", files.audio_csv, "audio feature CSV")->required();
  synth->add_option("--text", files.text_csv, "text feature CSV")->required();
  synth->add_option("--seed-poses", files.seed_poses_csv, "seed pose CSV (zeros when omitted)");
  synth->add_option("--emotion", emotion_flag, "emotion label (classifier decides when omitted)");
  synth->add_option("--speaker", speaker_flag, "speaker label (classifier decides when omitted)");
  synth->add_option("--format", format, "gesture output format: csv | bvh-lite");

  std::string command = "parse";
  try {
    app.parse(argc, argv);

    gestic::RunConfig cfg = load_config_or_default(config_path);
    apply_seed(cfg, seed);

    if (gen->parsed()) {
      command = "gen-synthetic";
      const auto manifest = gestic::cmd_gen_synthetic(cfg, out_dir);
      std::printf("wrote %s\n", manifest.string().c_str());
    } else if (train_cls->parsed()) {
      command = "train-classifier";
      const auto ckpt = gestic::cmd_train_classifier(cfg, out_dir);
      std::printf("wrote %s\n", ckpt.string().c_str());
    } else if (train->parsed()) {
      command = "train";
      if (!classifier_ckpt.empty()) cfg.classifier_ckpt = classifier_ckpt;
      const auto ckpt = gestic::cmd_train(cfg, out_dir);
      std::printf("wrote %s\n", ckpt.string().c_str());
    } else if (evaluate->parsed()) {
      command = "evaluate";
      if (!model_ckpt.empty()) cfg.model_ckpt = model_ckpt;
      const auto report = gestic::cmd_evaluate(cfg, out_dir);
      print_report(report);
    } else if (sweep->parsed()) {
      command = "sweep";
      const auto rows = gestic::cmd_sweep(cfg, out_dir);
      std::printf("%-12s %-12s %-12s %-10s %-8s %-10s\n", "lambda_rec", "lambda_mse", "lambda_rhy", "fgd", "srgr",
                  "beat_align");
      for (const auto& r : rows)
        std::printf("%-12g %-12g %-12g %-10.4f %-8.4f %-10.4f\n", static_cast<double>(r.lambda_rec),
                    static_cast<double>(r.lambda_mse), static_cast<double>(r.lambda_rhy), r.report.fgd_value,
                    r.report.srgr_value, r.report.beat_align_value);
    } else if (synth->parsed()) {
      command = "synthesize";
      if (emotion_flag >= 0) files.emotion = emotion_flag;
      if (speaker_flag >= 0) files.speaker = speaker_flag;
      if (format == "csv")
        files.format = gestic::ExportFormat::Csv;
      else if (format == "bvh-lite")
        files.format = gestic::ExportFormat::BvhLite;
      else
        throw std::runtime_error("synthesize: unknown format '" + format + "' (expected csv or bvh-lite)");
      const auto result = gestic::cmd_synthesize(cfg, files, out_dir);
      std::printf("synthesized %d frames (emotion %d, speaker %d) into %s\n", result.gesture.frames(),
                  result.emotion, result.speaker, out_dir.c_str());
    }
    return 0;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    nlohmann::json err{{"error", e.what()}, {"command", command}};
    std::cerr << err.dump() << '\n';
    return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", e.what()}, {"command", command}};
    std::cerr << err.dump() << '\n';
    return 1;
  }
}
