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
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestic/dataio.hpp"
#include "gestic/optim.hpp"
#include "gestic/params.hpp"
#include "gestic/tape.hpp"
#include "gestic/tensor.hpp"

namespace gestic {

// ---- small dense symmetric linear algebra --------------------------------

namespace linalg {

struct SymEig {
  std::vector<real_t> values;
  Tensor vectors;  // column j is the eigenvector of values[j]
};

// Cyclic Jacobi rotations; plenty for the 32x32 matrices FGD works with.
inline SymEig sym_eig(Tensor a) {
  if (a.ndim() != 2 || a.rows() != a.cols())
    throw std::invalid_argument("sym_eig: expects a square matrix, got " + a.shape_string());
  const int n = a.rows();
  Tensor v({n, n});
  for (int i = 0; i < n; ++i) v.at(i, i) = 1;

  for (int sweep = 0; sweep < 100; ++sweep) {
    real_t off = 0, diag = 0;
    for (int p = 0; p < n; ++p) {
      diag += std::abs(a.at(p, p));
      for (int q = p + 1; q < n; ++q) off += std::abs(a.at(p, q));
    }
    if (off <= real_t(1e-14) * std::max(diag, real_t(1))) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const real_t apq = a.at(p, q);
        if (std::abs(apq) <= real_t(1e-300)) continue;
        const real_t theta = (a.at(q, q) - a.at(p, p)) / (2 * apq);
        const real_t t = (theta >= 0 ? real_t(1) : real_t(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const real_t c = real_t(1) / std::sqrt(t * t + 1);
        const real_t s = t * c;
        for (int i = 0; i < n; ++i) {
          const real_t aip = a.at(i, p), aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const real_t api = a.at(p, i), aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const real_t vip = v.at(i, p), viq = v.at(i, q);
          v.at(i, p) = c * vip - s * viq;
          v.at(i, q) = s * vip + c * viq;
        }
      }
  }
  SymEig out;
  out.values.resize(n);
  for (int i = 0; i < n; ++i) out.values[i] = a.at(i, i);
  out.vectors = std::move(v);
  return out;
}

inline Tensor mat_mul(const Tensor& a, const Tensor& b) {
  Tensor y({a.rows(), b.cols()});
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const real_t aik = a.at(i, k);
      if (aik == real_t(0)) continue;
      for (int j = 0; j < b.cols(); ++j) y.at(i, j) += aik * b.at(k, j);
    }
  return y;
}

// V f(L) V^T for a symmetric input
inline Tensor eig_apply(const SymEig& e, real_t (*fn)(real_t)) {
  const int n = static_cast<int>(e.values.size());
  Tensor y({n, n});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      real_t acc = 0;
      for (int k = 0; k < n; ++k) acc += e.vectors.at(i, k) * fn(e.values[k]) * e.vectors.at(j, k);
      y.at(i, j) = acc;
    }
  return y;
}

inline Tensor sqrt_psd(const Tensor& a) {
  return eig_apply(sym_eig(a), [](real_t x) { return x > 0 ? std::sqrt(x) : real_t(0); });
}

}  // namespace linalg

// ---- Gaussian fit + Fréchet distance -------------------------------------

struct GaussianStats {
  std::vector<real_t> mean;
  Tensor cov;  // symmetric (d, d)
};

// Sample mean and unbiased covariance, explicitly symmetrized.
inline GaussianStats gaussian_stats(const std::vector<std::vector<real_t>>& latents) {
  if (latents.size() < 2) throw std::invalid_argument("gaussian_stats: needs at least 2 samples");
  const int m = static_cast<int>(latents.size());
  const int d = static_cast<int>(latents[0].size());
  for (const auto& x : latents)
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("gaussian_stats: ragged sample widths");
  GaussianStats st;
  st.mean.assign(d, 0);
  for (const auto& x : latents)
    for (int j = 0; j < d; ++j) st.mean[j] += x[j];
  for (int j = 0; j < d; ++j) st.mean[j] /= m;
  st.cov = Tensor({d, d});
  for (const auto& x : latents)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) st.cov.at(i, j) += (x[i] - st.mean[i]) * (x[j] - st.mean[j]);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) st.cov.at(i, j) /= (m - 1);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const real_t s = (st.cov.at(i, j) + st.cov.at(j, i)) / 2;
      st.cov.at(i, j) = st.cov.at(j, i) = s;
    }
  return st;
}

// Fréchet distance between two Gaussian fits:
//   |mu_r - mu_g|^2 + Tr(C_r + C_g - 2 (C_r^1/2 C_g C_r^1/2)^1/2).
// The inner product matrix is symmetrized before its eigendecomposition;
// eigenvalues are clamped at zero, and anything below -1e-6 * max is an
// error rather than noise.
inline real_t fgd(const GaussianStats& r, const GaussianStats& g) {
  if (r.mean.size() != g.mean.size())
    throw std::invalid_argument("fgd: dimension mismatch " + std::to_string(r.mean.size()) + " vs " +
                                std::to_string(g.mean.size()));
  const int d = static_cast<int>(r.mean.size());
  real_t mean_term = 0;
  for (int j = 0; j < d; ++j) {
    const real_t delta = r.mean[j] - g.mean[j];
    mean_term += delta * delta;
  }
  const Tensor sr = linalg::sqrt_psd(r.cov);
  Tensor inner = linalg::mat_mul(linalg::mat_mul(sr, g.cov), sr);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const real_t s = (inner.at(i, j) + inner.at(j, i)) / 2;
      inner.at(i, j) = inner.at(j, i) = s;
    }
  const linalg::SymEig e = linalg::sym_eig(inner);
  real_t max_ev = 0;
  for (real_t ev : e.values) max_ev = std::max(max_ev, ev);
  real_t tr_sqrt = 0;
  for (real_t ev : e.values) {
    if (ev < real_t(-1e-6) * std::max(max_ev, real_t(1)))
      throw std::runtime_error("fgd: covariance product is not PSD (eigenvalue " + std::to_string(ev) + ")");
    tr_sqrt += std::sqrt(std::max(ev, real_t(0)));
  }
  real_t trace_r = 0, trace_g = 0;
  for (int i = 0; i < d; ++i) {
    trace_r += r.cov.at(i, i);
    trace_g += g.cov.at(i, i);
  }
  return mean_term + trace_r + trace_g - 2 * tr_sqrt;
}

// ---- SRGR ------------------------------------------------------------------

// Semantically weighted probability of correct keypoint. Poses are (T, J*3)
// Euler matrices; a joint counts when the L2 distance of its 3 angles is
// under delta. Weights must be >= 0 with mean 1 (pass {} for unit weights).
inline real_t srgr(const Tensor& gen, const Tensor& gt, const std::vector<real_t>& weights, real_t delta) {
  if (!gen.same_shape(gt))
    throw std::invalid_argument("srgr: shape mismatch " + gen.shape_string() + " vs " + gt.shape_string());
  if (gen.cols() % 3 != 0)
    throw std::invalid_argument("srgr: pose width must be a multiple of 3, got " + gen.shape_string());
  if (delta <= 0) throw std::invalid_argument("srgr: delta must be positive");
  const int t = gen.rows(), j_count = gen.cols() / 3;
  if (!weights.empty() && static_cast<int>(weights.size()) != t)
    throw std::invalid_argument("srgr: weight count does not match frames");
  for (real_t w : weights)
    if (w < 0) throw std::invalid_argument("srgr: weights must be >= 0");
  real_t acc = 0;
  for (int f = 0; f < t; ++f) {
    int hit = 0;
    for (int j = 0; j < j_count; ++j) {
      real_t d2 = 0;
      for (int k = 0; k < 3; ++k) {
        const real_t d = gen.at(f, 3 * j + k) - gt.at(f, 3 * j + k);
        d2 += d * d;
      }
      if (std::sqrt(d2) < delta) ++hit;
    }
    const real_t w = weights.empty() ? real_t(1) : weights[f];
    acc += w * (static_cast<real_t>(hit) / j_count);
  }
  return acc / t;
}

// ---- beats -----------------------------------------------------------------

struct BeatList {
  std::vector<double> times;  // seconds, strictly increasing
};

enum class BeatKind { AudioOnset, GestureKinematic };

// Mean per-joint angular speed via one-frame differences; index 0 copies
// index 1 so the series has the input length.
inline std::vector<real_t> mean_joint_speed(const Tensor& pose) {
  if (pose.cols() % 3 != 0)
    throw std::invalid_argument("mean_joint_speed: pose width must be a multiple of 3, got " + pose.shape_string());
  const int t = pose.rows(), j_count = pose.cols() / 3;
  std::vector<real_t> s(t, 0);
  for (int f = 1; f < t; ++f) {
    real_t acc = 0;
    for (int j = 0; j < j_count; ++j) {
      real_t d2 = 0;
      for (int k = 0; k < 3; ++k) {
        const real_t d = pose.at(f, 3 * j + k) - pose.at(f - 1, 3 * j + k);
        d2 += d * d;
      }
      acc += std::sqrt(d2);
    }
    s[f] = acc / j_count;
  }
  if (t > 1) s[0] = s[1];
  return s;
}

// By convention the onset track is the last audio feature column.
inline std::vector<real_t> onset_channel(const Tensor& audio) {
  std::vector<real_t> s(audio.rows());
  for (int r = 0; r < audio.rows(); ++r) s[r] = audio.at(r, audio.cols() - 1);
  return s;
}

// Audio beats are strict local maxima of the onset signal above
// mean + 0.5 * stdev; gesture beats are strict local minima of the speed
// signal below its mean (motion pauses). Candidates come from the interior
// frames [2, T-2] for both kinds, and survivors keep a minimum separation of
// 3 frames (earliest first).
inline BeatList extract_beats(const std::vector<real_t>& signal, double frame_rate, BeatKind kind) {
  const int t = static_cast<int>(signal.size());
  if (t < 3) throw std::invalid_argument("extract_beats: needs at least 3 frames, got " + std::to_string(t));
  if (frame_rate <= 0) throw std::invalid_argument("extract_beats: frame_rate must be positive");
  real_t mean = 0;
  for (real_t x : signal) mean += x;
  mean /= t;
  real_t var = 0;
  for (real_t x : signal) var += (x - mean) * (x - mean);
  const real_t stdev = std::sqrt(var / t);

  std::vector<int> frames;
  for (int f = 2; f <= t - 2; ++f) {
    bool hit = false;
    if (kind == BeatKind::AudioOnset)
      hit = signal[f] > signal[f - 1] && signal[f] > signal[f + 1] && signal[f] > mean + real_t(0.5) * stdev;
    else
      hit = signal[f] < signal[f - 1] && signal[f] < signal[f + 1] && signal[f] < mean;
    if (hit && (frames.empty() || f - frames.back() >= 3)) frames.push_back(f);
  }
  BeatList out;
  out.times.reserve(frames.size());
  for (int f : frames) out.times.push_back(f / frame_rate);
  return out;
}

// Mean Gaussian-kernel similarity from each audio beat to its nearest
// gesture beat. No gesture beats at all scores 0.
inline real_t beat_align(const BeatList& audio, const BeatList& gesture, double sigma) {
  if (audio.times.empty()) throw std::invalid_argument("beat_align: audio beat list must be non-empty");
  if (sigma <= 0) throw std::invalid_argument("beat_align: sigma must be positive");
  if (gesture.times.empty()) return 0;
  real_t acc = 0;
  for (double a : audio.times) {
    double best = std::numeric_limits<double>::infinity();
    for (double g : gesture.times) best = std::min(best, (a - g) * (a - g));
    acc += static_cast<real_t>(std::exp(-best / (2 * sigma * sigma)));
  }
  return acc / static_cast<real_t>(audio.times.size());
}

// ---- the FGD embedder -------------------------------------------------------

struct EmbedderConfig {
  int latent = 32;
  int hidden = 32;
  int steps = 200;
  int batch = 8;
  real_t lr = real_t(1e-3);
  std::uint64_t seed = 99;
};

// Small pose autoencoder trained on ground-truth clips only. Poses are
// standardized channel-wise; the clip embedding is the time-pooled encoder
// output.
struct Embedder {
  EmbedderConfig cfg;
  ParamStore ps{0};
  std::vector<real_t> mean, inv_std;  // per pose channel
  std::vector<real_t> losses;
};

namespace detail {

inline Tensor standardize_pose(const Embedder& emb, const Tensor& pose) {
  Tensor out = pose;
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out.at(r, c) = (out.at(r, c) - emb.mean[c]) * emb.inv_std[c];
  return out;
}

inline Var embedder_encode(Tape& tp, ParamStore& ps, Var x) {
  Var h = tp.relu(tp.temporal_conv1d(x, tp.param(ps, "emb/enc0/w"), tp.param(ps, "emb/enc0/b")));
  h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, "emb/enc1/w"), tp.param(ps, "emb/enc1/b")));
  h = tp.linear(h, tp.param(ps, "emb/proj/w"), tp.param(ps, "emb/proj/b"));
  return tp.avg_pool_time(h);
}

inline Var embedder_decode(Tape& tp, ParamStore& ps, Var z, int t_frames) {
  Var h = tp.repeat_rows(z, t_frames);
  h = tp.relu(tp.temporal_conv1d(h, tp.param(ps, "emb/dec0/w"), tp.param(ps, "emb/dec0/b")));
  return tp.temporal_conv1d(h, tp.param(ps, "emb/dec1/w"), tp.param(ps, "emb/dec1/b"));
}

}  // namespace detail

inline Embedder train_embedder(const std::vector<Clip>& gt_clips, const EmbedderConfig& cfg) {
  if (gt_clips.size() < 2) throw std::invalid_argument("train_embedder: needs at least 2 clips");
  Embedder emb;
  emb.cfg = cfg;
  emb.ps = ParamStore(cfg.seed);

  emb.mean.assign(kPoseDims, 0);
  emb.inv_std.assign(kPoseDims, 0);
  long total_frames = 0;
  for (const Clip& c : gt_clips) {
    const Tensor pose = concat_pose(c.body, c.hands);
    for (int r = 0; r < pose.rows(); ++r)
      for (int j = 0; j < kPoseDims; ++j) emb.mean[j] += pose.at(r, j);
    total_frames += pose.rows();
  }
  for (auto& m : emb.mean) m /= total_frames;
  std::vector<real_t> var(kPoseDims, 0);
  for (const Clip& c : gt_clips) {
    const Tensor pose = concat_pose(c.body, c.hands);
    for (int r = 0; r < pose.rows(); ++r)
      for (int j = 0; j < kPoseDims; ++j) {
        const real_t d = pose.at(r, j) - emb.mean[j];
        var[j] += d * d;
      }
  }
  for (int j = 0; j < kPoseDims; ++j) emb.inv_std[j] = real_t(1) / std::max(std::sqrt(var[j] / total_frames), real_t(1e-6));

  ParamStore& ps = emb.ps;
  ps.add("emb/enc0/w", {3, kPoseDims, cfg.hidden}, Init::XavierUniform);
  ps.add("emb/enc0/b", {1, cfg.hidden}, Init::Zero);
  ps.add("emb/enc1/w", {3, cfg.hidden, cfg.hidden}, Init::XavierUniform);
  ps.add("emb/enc1/b", {1, cfg.hidden}, Init::Zero);
  ps.add("emb/proj/w", {cfg.hidden, cfg.latent}, Init::XavierUniform);
  ps.add("emb/proj/b", {1, cfg.latent}, Init::Zero);
  ps.add("emb/dec0/w", {3, cfg.latent, cfg.hidden}, Init::XavierUniform);
  ps.add("emb/dec0/b", {1, cfg.hidden}, Init::Zero);
  ps.add("emb/dec1/w", {3, cfg.hidden, kPoseDims}, Init::XavierUniform);
  ps.add("emb/dec1/b", {1, kPoseDims}, Init::Zero);

  std::mt19937_64 rng(cfg.seed);
  AdamState adam;
  adam.cfg.lr = cfg.lr;
  const int bs = std::min<int>(cfg.batch, static_cast<int>(gt_clips.size()));
  for (int step = 0; step < cfg.steps; ++step) {
    Tape tp;
    std::vector<Var> terms;
    for (int b = 0; b < bs; ++b) {
      const Clip& clip = gt_clips[rng() % gt_clips.size()];
      const Tensor pose = detail::standardize_pose(emb, concat_pose(clip.body, clip.hands));
      Var x = tp.input(pose);
      Var z = detail::embedder_encode(tp, ps, x);
      Var rec = detail::embedder_decode(tp, ps, z, pose.rows());
      terms.push_back(tp.mse(rec, x));
    }
    Var loss = tp.scalar_weighted_sum(terms, std::vector<real_t>(terms.size(), real_t(1) / bs));
    emb.losses.push_back(tp.val(loss).v[0]);
    GradMap grads = tp.backward(loss);
    adam_step(ps, grads, adam);
  }
  ps.freeze_prefix("");
  return emb;
}

inline std::vector<real_t> embed_clip(const Embedder& emb, const Tensor& pose) {
  Tape tp;
  // frozen store: const_cast is safe, param() only reads it
  Var z = detail::embedder_encode(tp, const_cast<ParamStore&>(emb.ps), tp.input(detail::standardize_pose(emb, pose)));
  return tp.val(z).v;
}

}  // namespace gestic
