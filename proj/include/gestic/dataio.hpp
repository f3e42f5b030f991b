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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gestic/tensor.hpp"

namespace gestic {

constexpr int kBodyDims = 27;    // 9 body joints x 3 Euler angles
constexpr int kHandDims = 114;   // 38 hand joints x 3 Euler angles
constexpr int kPoseDims = kBodyDims + kHandDims;

// One captured sequence: aligned per-frame streams plus sequence-level
// emotion and speaker labels. Optional per-frame semantic weights feed the
// SRGR metric; empty means unit weights.
struct SequenceRecord {
  double frame_rate = 15.0;
  Tensor audio;   // (T, F_a)
  Tensor text;    // (T, F_w)
  Tensor face;    // (T, D_f), entries in [0,1]
  Tensor body;    // (T, 27), Euler degrees in [-180,180]
  Tensor hands;   // (T, 114)
  std::vector<real_t> sem_weights;
  int emotion = 0;
  int speaker = 0;

  int frames() const { return audio.rows(); }
};

// Generated joint rotations. Angles are Euler degrees, wrapped to
// [-180,180] on construction via wrap_angle.
struct GestureSequence {
  Tensor body;   // (T, 27)
  Tensor hands;  // (T, 114)
  double frame_rate = 15.0;

  int frames() const { return body.rows(); }
};

inline real_t wrap_angle(real_t deg) {
  real_t x = std::fmod(deg + real_t(180), real_t(360));
  if (x < 0) x += real_t(360);
  return x - real_t(180);
}

// One training window. seed_poses holds the first seed_frames rows of the
// concatenated body+hand pose.
struct Clip {
  double frame_rate = 15.0;
  Tensor audio, text, face, body, hands;
  Tensor seed_poses;  // (seed_frames, 141)
  std::vector<real_t> sem_weights;
  int emotion = 0;
  int speaker = 0;
  int record_index = 0;
  int start_frame = 0;

  int frames() const { return audio.rows(); }
};

namespace csvio {

struct Table {
  std::vector<std::string> header;
  Tensor data;  // (rows, cols)
};

inline Table read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(path + ": cannot open");
  Table out;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path + ":1: missing header row");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.header.push_back(cell);
  }
  const int cols = static_cast<int>(out.header.size());
  if (cols == 0) throw std::runtime_error(path + ":1: empty header row");
  std::vector<real_t> values;
  int rows = 0;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int got = 0;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        const double x = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing characters");
        values.push_back(static_cast<real_t>(x));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed number '" + cell + "'");
      }
      ++got;
    }
    if (got != cols)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                               " columns, got " + std::to_string(got));
    ++rows;
  }
  if (rows == 0) throw std::runtime_error(path + ": no data rows");
  out.data = Tensor::from_rows(rows, cols, std::move(values));
  return out;
}

// %.17g keeps doubles exactly round-trippable through text.
inline void write_csv(const std::string& path, const std::vector<std::string>& header, const Tensor& data) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  char buf[40];
  for (int r = 0; r < data.rows(); ++r) {
    for (int c = 0; c < data.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(data.at(r, c)));
      os << (c ? "," : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error(path + ": write failed");
}

inline std::vector<std::string> numbered_header(const std::string& prefix, int n) {
  std::vector<std::string> h;
  h.reserve(n);
  for (int i = 0; i < n; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

}  // namespace csvio

namespace detail {

inline void check_range(const Tensor& t, real_t lo, real_t hi, const std::string& field, const std::string& path) {
  for (int r = 0; r < t.rows(); ++r)
    for (int c = 0; c < t.cols(); ++c) {
      const real_t x = t.at(r, c);
      if (!(x >= lo && x <= hi))
        // +2: one for the header row, one for 1-based line numbers
        throw std::runtime_error(path + ":" + std::to_string(r + 2) + ": " + field + " value " + std::to_string(x) +
                                 " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "] in column " +
                                 std::to_string(c));
    }
}

}  // namespace detail

// Manifest format: JSON object {"frame_rate": fps, "sequences": [{"audio_csv":
// ..., "text_csv": ..., "face_csv": ..., "pose_csv": ..., "weights_csv"?: ...,
// "emotion": int, "speaker": int}, ...]}. CSV paths are relative to the
// manifest directory. pose_csv carries 141 columns (27 body + 114 hand).
inline std::vector<SequenceRecord> load_dataset(const std::string& manifest_path, int n_speakers = 4,
                                                int n_emotions = 8) {
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error(manifest_path + ": cannot open manifest");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(manifest_path + ": invalid JSON: " + e.what());
  }
  if (!j.contains("sequences") || !j["sequences"].is_array())
    throw std::runtime_error(manifest_path + ": manifest needs a 'sequences' array");
  const double fps = j.value("frame_rate", 15.0);
  const auto base = std::filesystem::path(manifest_path).parent_path();

  std::vector<SequenceRecord> records;
  int idx = 0;
  for (const auto& s : j["sequences"]) {
    const std::string where = manifest_path + ": sequences[" + std::to_string(idx) + "]";
    auto need = [&](const char* key) -> std::string {
      if (!s.contains(key)) throw std::runtime_error(where + ": missing '" + std::string(key) + "'");
      return (base / s[key].get<std::string>()).string();
    };
    SequenceRecord rec;
    rec.frame_rate = fps;
    const std::string audio_path = need("audio_csv");
    const std::string text_path = need("text_csv");
    const std::string face_path = need("face_csv");
    const std::string pose_path = need("pose_csv");
    rec.audio = csvio::read_csv(audio_path).data;
    rec.text = csvio::read_csv(text_path).data;
    rec.face = csvio::read_csv(face_path).data;
    Tensor pose = csvio::read_csv(pose_path).data;
    if (pose.cols() != kPoseDims)
      throw std::runtime_error(pose_path + ":1: pose stream needs " + std::to_string(kPoseDims) + " columns, got " +
                               std::to_string(pose.cols()));
    rec.body = Tensor({pose.rows(), kBodyDims});
    rec.hands = Tensor({pose.rows(), kHandDims});
    for (int r = 0; r < pose.rows(); ++r) {
      for (int c = 0; c < kBodyDims; ++c) rec.body.at(r, c) = pose.at(r, c);
      for (int c = 0; c < kHandDims; ++c) rec.hands.at(r, c) = pose.at(r, kBodyDims + c);
    }
    if (s.contains("weights_csv")) {
      const std::string wpath = (base / s["weights_csv"].get<std::string>()).string();
      Tensor w = csvio::read_csv(wpath).data;
      if (w.cols() != 1)
        throw std::runtime_error(wpath + ":1: weights stream needs exactly 1 column, got " + std::to_string(w.cols()));
      rec.sem_weights.assign(w.v.begin(), w.v.end());
    }
    rec.emotion = s.value("emotion", 0);
    rec.speaker = s.value("speaker", 0);

    const int t = rec.audio.rows();
    auto check_len = [&](const Tensor& x, const char* name, const std::string& path) {
      if (x.rows() != t)
        throw std::runtime_error(path + ": " + name + " has " + std::to_string(x.rows()) + " frames but " +
                                 audio_path + " has " + std::to_string(t));
    };
    check_len(rec.text, "text stream", text_path);
    check_len(rec.face, "face stream", face_path);
    check_len(rec.body, "pose stream", pose_path);
    if (!rec.sem_weights.empty() && static_cast<int>(rec.sem_weights.size()) != t)
      throw std::runtime_error(where + ": weights stream length does not match audio");
    detail::check_range(rec.face, real_t(0), real_t(1), "blendshape", face_path);
    detail::check_range(rec.body, real_t(-180), real_t(180), "body Euler angle", pose_path);
    detail::check_range(rec.hands, real_t(-180), real_t(180), "hand Euler angle", pose_path);
    if (rec.emotion < 0 || rec.emotion >= n_emotions)
      throw std::runtime_error(where + ": emotion label " + std::to_string(rec.emotion) + " outside 0.." +
                               std::to_string(n_emotions - 1));
    if (rec.speaker < 0 || rec.speaker >= n_speakers)
      throw std::runtime_error(where + ": speaker label " + std::to_string(rec.speaker) + " outside 0.." +
                               std::to_string(n_speakers - 1));
    records.push_back(std::move(rec));
    ++idx;
  }
  return records;
}

inline Tensor slice_rows(const Tensor& t, int start, int count) {
  Tensor out({count, t.cols()});
  for (int r = 0; r < count; ++r)
    for (int c = 0; c < t.cols(); ++c) out.at(r, c) = t.at(start + r, c);
  return out;
}

// Fixed-length training windows: per record, floor((T-N)/stride)+1 clips;
// the trailing remainder is dropped. Records shorter than N are skipped
// with a warning.
inline std::vector<Clip> window_clips(const std::vector<SequenceRecord>& records, int n_frames = 34, int stride = 10,
                                      int seed_frames = 4, std::ostream* warn = &std::cerr) {
  if (n_frames < 1 || stride < 1 || seed_frames < 0 || seed_frames > n_frames)
    throw std::invalid_argument("window_clips: invalid window parameters");
  std::vector<Clip> clips;
  for (std::size_t ri = 0; ri < records.size(); ++ri) {
    const SequenceRecord& rec = records[ri];
    const int t = rec.frames();
    if (t < n_frames) {
      if (warn)
        *warn << "window_clips: record " << ri << " has " << t << " frames (< " << n_frames << "), skipped\n";
      continue;
    }
    const int count = (t - n_frames) / stride + 1;
    for (int k = 0; k < count; ++k) {
      const int start = k * stride;
      Clip c;
      c.frame_rate = rec.frame_rate;
      c.audio = slice_rows(rec.audio, start, n_frames);
      c.text = slice_rows(rec.text, start, n_frames);
      c.face = slice_rows(rec.face, start, n_frames);
      c.body = slice_rows(rec.body, start, n_frames);
      c.hands = slice_rows(rec.hands, start, n_frames);
      c.seed_poses = Tensor({seed_frames > 0 ? seed_frames : 1, kPoseDims});
      for (int r = 0; r < seed_frames; ++r) {
        for (int j = 0; j < kBodyDims; ++j) c.seed_poses.at(r, j) = c.body.at(r, j);
        for (int j = 0; j < kHandDims; ++j) c.seed_poses.at(r, kBodyDims + j) = c.hands.at(r, j);
      }
      if (!rec.sem_weights.empty()) {
        c.sem_weights.assign(rec.sem_weights.begin() + start, rec.sem_weights.begin() + start + n_frames);
        // re-normalize the window to mean 1 (the SRGR contract)
        real_t mean = 0;
        for (real_t w : c.sem_weights) mean += w;
        mean /= n_frames;
        if (mean > 0)
          for (real_t& w : c.sem_weights) w /= mean;
      }
      c.emotion = rec.emotion;
      c.speaker = rec.speaker;
      c.record_index = static_cast<int>(ri);
      c.start_frame = start;
      clips.push_back(std::move(c));
    }
  }
  return clips;
}

inline Tensor concat_pose(const Tensor& body, const Tensor& hands) {
  Tensor out({body.rows(), body.cols() + hands.cols()});
  for (int r = 0; r < body.rows(); ++r) {
    for (int c = 0; c < body.cols(); ++c) out.at(r, c) = body.at(r, c);
    for (int c = 0; c < hands.cols(); ++c) out.at(r, body.cols() + c) = hands.at(r, c);
  }
  return out;
}

}  // namespace gestic
