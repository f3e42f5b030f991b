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

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gestic/config.hpp"
#include "gestic/harness.hpp"

using namespace gestic;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// small but trainable setup shared by the pipeline tests
nlohmann::json tiny_run_json() {
  nlohmann::json j;
  j["data"]["synthetic"] = {{"n_sequences", 4},     {"frames_per_sequence", 60}, {"rng_seed", 7},
                            {"audio_dim", 10},      {"text_dim", 4},             {"blendshape_dim", 6},
                            {"n_emotions", 4},      {"n_speakers", 2}};
  j["model"] = {{"latent", 8},     {"enc_hidden", 6}, {"style_dim", 4}, {"lstm_hidden", 6},
                {"mlp_hidden", 8}, {"lstm_layers", 1}};
  j["train"] = {{"steps", 25}, {"batch_size", 4}, {"classifier_steps", 60}, {"classifier_batch", 4},
                {"checkpoint_every", 10}};
  j["eval"] = {{"embedder", {{"steps", 40}, {"latent", 8}, {"hidden", 8}}}};
  j["optim"] = {{"lr", 0.002}};
  j["seed"] = 7;
  return j;
}

std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run config parses defaults, overrides, and rejects nonsense") {
  SECTION("empty object gives the documented defaults") {
    const RunConfig c = parse_run_config(nlohmann::json::object());
    REQUIRE(c.window_frames == 34);
    REQUIRE(c.window_stride == 10);
    REQUIRE(c.model.seed_frames == 4);
    REQUIRE(c.model.latent == 128);
    REQUIRE(c.model.embed_dim == 8);
    REQUIRE(c.loss.lambda_rhy == 1.0);
    REQUIRE(c.loss.lambda_mse == 1000.0);
    REQUIRE(c.loss.lambda_rec == 500.0);
    REQUIRE(c.loss.tau == Catch::Approx(0.1));
    REQUIRE(c.optim.lr == Catch::Approx(0.00025));
    REQUIRE(c.use_synthetic);
  }
  SECTION("field overrides land in the right places") {
    const RunConfig c = parse_run_config(tiny_run_json());
    REQUIRE(c.model.latent == 8);
    REQUIRE(c.train.steps == 25);
    REQUIRE(c.optim.lr == Catch::Approx(0.002));
    REQUIRE(c.model.audio_dim == 10);  // synced from the synthetic spec
    REQUIRE(c.model.n_emotions == 4);
  }
  SECTION("manifest and synthetic are mutually exclusive") {
    nlohmann::json j;
    j["data"]["manifest"] = "x.json";
    j["data"]["synthetic"] = nlohmann::json::object();
    REQUIRE_THROWS_WITH(parse_run_config(j), Catch::Matchers::ContainsSubstring("not both"));
  }
  SECTION("bad types are reported with the key name") {
    nlohmann::json j;
    j["train"]["steps"] = "many";
    REQUIRE_THROWS_WITH(parse_run_config(j), Catch::Matchers::ContainsSubstring("steps"));
  }
  SECTION("config hash is stable and key-order independent") {
    nlohmann::json a = tiny_run_json();
    const std::string h1 = config_hash(a);
    const std::string h2 = config_hash(a);
    REQUIRE(h1 == h2);
    nlohmann::json b = a;
    b["seed"] = 8;
    REQUIRE(config_hash(b) != h1);
  }
}

TEST_CASE("gen-synthetic writes byte-identical datasets for the same seed") {
  const fs::path d1 = fresh_dir("gestic_gen_a");
  const fs::path d2 = fresh_dir("gestic_gen_b");
  const RunConfig cfg = parse_run_config(tiny_run_json());
  cmd_gen_synthetic(cfg, d1);
  cmd_gen_synthetic(cfg, d2);
  REQUIRE(fs::exists(d1 / "manifest.json"));
  for (const char* f : {"seq0_audio.csv", "seq0_pose.csv", "seq2_face.csv", "seq3_weights.csv"})
    REQUIRE(read_file(d1 / f) == read_file(d2 / f));

  // manifest lists every sequence and the dataset loads back
  std::ifstream is(d1 / "manifest.json");
  nlohmann::json m;
  is >> m;
  REQUIRE(m["sequences"].size() == 4);
  REQUIRE(load_dataset((d1 / "manifest.json").string()).size() == 4);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("train refuses to run without a frozen classifier") {
  const fs::path out = fresh_dir("gestic_train_refuse");
  RunConfig cfg = parse_run_config(tiny_run_json());
  SECTION("no classifier configured") {
    REQUIRE_THROWS_WITH(cmd_train(cfg, out), Catch::Matchers::ContainsSubstring("train-classifier"));
  }
  SECTION("configured but missing on disk") {
    cfg.classifier_ckpt = (out / "nope.ckpt").string();
    REQUIRE_THROWS_WITH(cmd_train(cfg, out), Catch::Matchers::ContainsSubstring("not found"));
  }
  fs::remove_all(out);
}

TEST_CASE("classifier -> train -> evaluate pipeline holds its contracts") {
  const fs::path root = fresh_dir("gestic_pipeline");
  RunConfig cfg = parse_run_config(tiny_run_json());

  const fs::path cls_ckpt = cmd_train_classifier(cfg, root / "cls");
  REQUIRE(fs::exists(cls_ckpt));
  {
    const ParamStore cls = load_checkpoint(cls_ckpt.string());
    REQUIRE(cls.has("cls/conv0/w"));
    REQUIRE(cls.frozen("cls/conv0/w"));
  }

  cfg.classifier_ckpt = cls_ckpt.string();
  const fs::path model_ckpt = cmd_train(cfg, root / "model");
  REQUIRE(fs::exists(model_ckpt));
  REQUIRE(fs::exists(root / "model" / "model_step_10.ckpt"));
  REQUIRE(fs::exists(root / "model" / "run_info.json"));

  SECTION("the training log carries the documented columns and strictly increasing steps") {
    std::ifstream log(root / "model" / "training_log.csv");
    std::string header;
    std::getline(log, header);
    REQUIRE(header == "step,loss_rhy,loss_mse,loss_rec_body,loss_rec_hand,total");
    std::string line;
    long prev = -1;
    int rows = 0;
    while (std::getline(log, line)) {
      const long step = std::stol(line.substr(0, line.find(',')));
      REQUIRE(step == prev + 1);
      prev = step;
      ++rows;
    }
    REQUIRE(rows == 25);
  }

  SECTION("classifier weights ride along frozen and untouched") {
    const ParamStore cls = load_checkpoint(cls_ckpt.string());
    const ParamStore model = load_checkpoint(model_ckpt.string());
    for (const auto& [name, e] : cls.entries()) {
      REQUIRE(model.has(name));
      REQUIRE(model.frozen(name));
      REQUIRE(model.at(name).v == e.t.v);
    }
  }

  SECTION("evaluate writes a metric report that echoes the config") {
    cfg.model_ckpt = model_ckpt.string();
    const MetricReport r = cmd_evaluate(cfg, root / "eval");
    REQUIRE(r.n_clips > 0);
    std::ifstream is(root / "eval" / "metrics.json");
    nlohmann::json m;
    is >> m;
    REQUIRE(m.contains("fgd"));
    REQUIRE(m.contains("srgr"));
    REQUIRE(m.contains("beat_align"));
    REQUIRE(m["n_clips"].get<int>() == r.n_clips);
    REQUIRE(m["config_hash"].get<std::string>() == config_hash(cfg.echo));
    REQUIRE(m["config"] == cfg.echo);
  }
  fs::remove_all(root);
}

TEST_CASE("identical config and seed reproduce the loss log byte for byte") {
  const fs::path root = fresh_dir("gestic_determinism");
  RunConfig cfg = parse_run_config(tiny_run_json());
  cfg.train.steps = 10;
  const fs::path cls = cmd_train_classifier(cfg, root / "cls");
  cmd_train_classifier(cfg, root / "cls2");
  REQUIRE(read_file(root / "cls" / "classifier_log.csv") == read_file(root / "cls2" / "classifier_log.csv"));
  cfg.classifier_ckpt = cls.string();
  cmd_train(cfg, root / "m1");
  cmd_train(cfg, root / "m2");
  REQUIRE(read_file(root / "m1" / "training_log.csv") == read_file(root / "m2" / "training_log.csv"));
  fs::remove_all(root);
}

TEST_CASE("early stopping halts on a plateau") {
  RunConfig cfg = parse_run_config(tiny_run_json());
  SyntheticConfig sc = cfg.synthetic;
  const auto clips = window_clips(synthetic_records(gen_synthetic(sc)), 34, 10, 4, nullptr);
  ParamStore ps(1);
  init_model(ps, cfg.model);
  init_rhythm_heads(ps, cfg.model);
  init_classifier(ps, cfg.model);
  ps.freeze_prefix("cls/");

  TrainConfig tc;
  tc.steps = 500;
  tc.batch_size = 2;
  tc.early_stop_patience = 5;
  tc.early_stop_tolerance = real_t(1e9);  // nothing can improve by this much
  AdamConfig adam;
  const TrainResult r = train_full(ps, cfg.model, cfg.loss, clips, tc, adam, 3);
  REQUIRE(r.early_stopped);
  // the first step always sets the baseline, then `patience` stalls
  REQUIRE(r.logs.size() == 6);
}

TEST_CASE("sweep ranks its cells by FGD and the default grid keeps the (500,1000,1) cell") {
  const auto grid = default_sweep_grid();
  REQUIRE(grid.size() == 8);
  bool has_default_cell = false;
  for (const auto& cell : grid)
    if (cell[0] == 500 && cell[1] == 1000 && cell[2] == 1) has_default_cell = true;
  REQUIRE(has_default_cell);

  const fs::path root = fresh_dir("gestic_sweep");
  RunConfig cfg = parse_run_config(tiny_run_json());
  cfg.sweep_grid = {{{500, 1000, 1}}, {{1000, 500, 10}}};
  cfg.sweep_steps = 8;
  cfg.train.classifier_steps = 30;
  const auto rows = cmd_sweep(cfg, root);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].report.fgd_value <= rows[1].report.fgd_value);
  std::ifstream is(root / "sweep_results.csv");
  std::string header;
  std::getline(is, header);
  REQUIRE(header == "lambda_rec,lambda_mse,lambda_rhy,fgd,srgr,beat_align");
  int lines = 0;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) ++lines;
  REQUIRE(lines == 2);
  fs::remove_all(root);
}

TEST_CASE("synthesize runs from feature files alone and is repeatable") {
  const fs::path root = fresh_dir("gestic_synth_cmd");
  RunConfig cfg = parse_run_config(tiny_run_json());
  cmd_gen_synthetic(cfg, root / "data");
  const fs::path cls = cmd_train_classifier(cfg, root / "cls");
  cfg.classifier_ckpt = cls.string();
  cfg.train.steps = 5;
  const fs::path model = cmd_train(cfg, root / "model");

  SynthesizeFiles files;
  files.model_ckpt = model.string();
  files.audio_csv = (root / "data" / "seq0_audio.csv").string();
  files.text_csv = (root / "data" / "seq0_text.csv").string();
  // no seed poses, no labels, no blendshapes: the inference-efficient path
  const SynthesisResult r1 = cmd_synthesize(cfg, files, root / "out1");
  REQUIRE(fs::exists(root / "out1" / "synthesized_face.csv"));
  REQUIRE(fs::exists(root / "out1" / "synthesized_gesture.csv"));
  const auto face = csvio::read_csv((root / "out1" / "synthesized_face.csv").string());
  const auto gest = csvio::read_csv((root / "out1" / "synthesized_gesture.csv").string());
  REQUIRE(face.data.rows() == 60);  // matches the input frame count
  REQUIRE(gest.data.rows() == 60);
  REQUIRE(gest.data.cols() == kPoseDims);

  const SynthesisResult r2 = cmd_synthesize(cfg, files, root / "out2");
  REQUIRE(r1.gesture.body.v == r2.gesture.body.v);
  REQUIRE(read_file(root / "out1" / "synthesized_gesture.csv") == read_file(root / "out2" / "synthesized_gesture.csv"));

  SECTION("bvh-lite output is also available") {
    files.format = ExportFormat::BvhLite;
    cmd_synthesize(cfg, files, root / "out3");
    REQUIRE(fs::exists(root / "out3" / "synthesized_gesture.bvh"));
    const std::string bvh = read_file(root / "out3" / "synthesized_gesture.bvh");
    REQUIRE(bvh.find("Frames: 60") != std::string::npos);
  }
  fs::remove_all(root);
}
