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

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestic/dataio.hpp"
#include "gestic/tensor.hpp"

namespace gestic {

enum class ExportFormat { Csv, BvhLite };

inline void export_gesture_csv(const GestureSequence& g, const std::string& path) {
  Tensor pose = concat_pose(g.body, g.hands);
  std::vector<std::string> header;
  for (int i = 0; i < kBodyDims; ++i) header.push_back("body" + std::to_string(i));
  for (int i = 0; i < kHandDims; ++i) header.push_back("hand" + std::to_string(i));
  csvio::write_csv(path, header, pose);
}

inline void export_blendshapes_csv(const Tensor& face, const std::string& path) {
  csvio::write_csv(path, csvio::numbered_header("f", face.cols()), face);
}

namespace detail {

struct BvhJoint {
  std::string name;
  std::vector<BvhJoint> children;
};

inline BvhJoint bvh_chain(const std::string& prefix, int count) {
  BvhJoint root{prefix + "0", {}};
  BvhJoint* tip = &root;
  for (int i = 1; i < count; ++i) {
    tip->children.push_back(BvhJoint{prefix + std::to_string(i), {}});
    tip = &tip->children.back();
  }
  return root;
}

inline void bvh_emit(std::ostream& os, const BvhJoint& j, int depth, bool is_root) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  os << pad << (is_root ? "ROOT " : "JOINT ") << j.name << "\n" << pad << "{\n";
  os << pad << "  OFFSET 0.0 10.0 0.0\n";
  os << pad << "  CHANNELS 3 Zrotation Xrotation Yrotation\n";
  if (j.children.empty()) {
    os << pad << "  End Site\n" << pad << "  {\n" << pad << "    OFFSET 0.0 1.0 0.0\n" << pad << "  }\n";
  } else {
    for (const auto& c : j.children) bvh_emit(os, c, depth + 1, false);
  }
  os << pad << "}\n";
}

}  // namespace detail

// Minimal BVH-style export: a fixed 47-joint skeleton (a 9-joint body chain
// with two 19-joint hand chains off the last body joint), three rotation
// channels per joint, then a MOTION block with one line per frame. Channel
// order matches the pose column order: body joints 0..8, then hands.
inline void export_bvh_lite(const GestureSequence& g, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(path + ": cannot open for writing");

  detail::BvhJoint root = detail::bvh_chain("body", 9);
  detail::BvhJoint* tip = &root;
  while (!tip->children.empty()) tip = &tip->children.front();
  tip->children.push_back(detail::bvh_chain("lhand", 19));
  tip->children.push_back(detail::bvh_chain("rhand", 19));

  os << "HIERARCHY\n";
  detail::bvh_emit(os, root, 0, true);

  const int t = g.frames();
  os << "MOTION\n";
  os << "Frames: " << t << "\n";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", 1.0 / g.frame_rate);
  os << "Frame Time: " << buf << "\n";
  Tensor pose = concat_pose(g.body, g.hands);
  for (int r = 0; r < t; ++r) {
    for (int c = 0; c < pose.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.6f", static_cast<double>(pose.at(r, c)));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error(path + ": write failed");
}

// Writes <basename>_face.csv plus <basename>_gesture.csv or .bvh under the
// chosen format.
inline void export_sequence(const GestureSequence& g, const Tensor& face, const std::string& basename,
                            ExportFormat format) {
  export_blendshapes_csv(face, basename + "_face.csv");
  if (format == ExportFormat::Csv)
    export_gesture_csv(g, basename + "_gesture.csv");
  else
    export_bvh_lite(g, basename + "_gesture.bvh");
}

}  // namespace gestic
