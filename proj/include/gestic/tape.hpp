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
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gestic/params.hpp"
#include "gestic/tensor.hpp"

namespace gestic {

// Handle into a Tape. Cheap to copy; valid only for the tape that made it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

using GradMap = std::map<std::string, Tensor>;

// Reverse-mode tape. Nodes are appended in evaluation order, which is a
// topological order by construction; backward() walks the node list in
// reverse and accumulates gradients additively at fan-out. A tape is
// single-owner: build, run backward, discard.
class Tape {
 public:
  struct Node {
    Tensor val;
    Tensor grad;
    std::function<void(Tape&, const Tensor&)> backprop;
    bool needs_grad = false;
    bool reachable = false;
    std::vector<int> parents;
    const char* op = "leaf";
  };

  // ---- leaves ---------------------------------------------------------

  Var input(Tensor t) {
    Node n;
    n.val = std::move(t);
    return push(std::move(n));
  }

  // Registers a named parameter leaf. Repeated calls with the same name
  // return the same node so gradients accumulate in one place. Frozen
  // parameters participate as constants.
  Var param(ParamStore& ps, const std::string& name) {
    auto it = param_nodes_.find(name);
    if (it != param_nodes_.end()) return Var{it->second};
    Node n;
    n.val = ps.at(name);
    n.needs_grad = !ps.frozen(name);
    n.op = "param";
    Var v = push(std::move(n));
    param_nodes_[name] = v.id;
    return v;
  }

  const Tensor& val(Var v) const { return node(v.id).val; }
  const char* op_name(Var v) const { return node(v.id).op; }
  long size() const { return static_cast<long>(nodes_.size()); }

  // ---- elementwise ----------------------------------------------------

  Var sigmoid(Var x) {
    const Tensor& xv = val(x);
    Tensor out = xv;
    for (auto& e : out.v) e = real_t(1) / (real_t(1) + std::exp(-e));
    return unary("sigmoid", x, std::move(out), [](const Tensor& y, const Tensor& g, Tensor& gx) {
      for (long i = 0; i < y.numel(); ++i) gx.v[i] += g.v[i] * y.v[i] * (real_t(1) - y.v[i]);
    });
  }

  Var tanh(Var x) {
    Tensor out = val(x);
    for (auto& e : out.v) e = std::tanh(e);
    return unary("tanh", x, std::move(out), [](const Tensor& y, const Tensor& g, Tensor& gx) {
      for (long i = 0; i < y.numel(); ++i) gx.v[i] += g.v[i] * (real_t(1) - y.v[i] * y.v[i]);
    });
  }

  Var relu(Var x) {
    Tensor out = val(x);
    for (auto& e : out.v) e = e > real_t(0) ? e : real_t(0);
    return unary("relu", x, std::move(out), [](const Tensor& y, const Tensor& g, Tensor& gx) {
      for (long i = 0; i < y.numel(); ++i) gx.v[i] += y.v[i] > real_t(0) ? g.v[i] : real_t(0);
    });
  }

  Var scale(Var x, real_t c) {
    Tensor out = val(x);
    for (auto& e : out.v) e *= c;
    Node n = make("scale", {x.id}, std::move(out));
    const int xid = x.id;
    n.backprop = [xid, c](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (long i = 0; i < g.numel(); ++i) gx.v[i] += c * g.v[i];
    };
    return push(std::move(n));
  }

  // add/mul accept equal shapes, or a (1,C) operand broadcast over the rows
  // of a (T,C) operand.
  Var add(Var a, Var b) { return binary_broadcast("add", a, b, /*is_mul=*/false); }
  Var mul(Var a, Var b) { return binary_broadcast("elementwise_mul", a, b, /*is_mul=*/true); }

  // ---- linear algebra -------------------------------------------------

  Var linear(Var x, Var w, Var b = Var{}) {
    const Tensor &xv = val(x), &wv = val(w);
    require(xv.ndim() == 2 && wv.ndim() == 2, "linear", "expects rank-2 input and weight, got " +
                                                   xv.shape_string() + " and " + wv.shape_string());
    require(xv.cols() == wv.rows(), "linear",
            "input width " + std::to_string(xv.cols()) + " does not match weight " + wv.shape_string());
    const int t = xv.rows(), in = xv.cols(), out = wv.cols();
    if (b.valid()) {
      const Tensor& bv = val(b);
      require(bv.rows() == 1 && bv.cols() == out, "linear",
              "bias " + bv.shape_string() + " does not match output width " + std::to_string(out));
    }
    Tensor y({t, out});
    for (int r = 0; r < t; ++r)
      for (int i = 0; i < in; ++i) {
        const real_t xi = xv.at(r, i);
        if (xi == real_t(0)) continue;
        for (int o = 0; o < out; ++o) y.at(r, o) += xi * wv.at(i, o);
      }
    if (b.valid()) {
      const Tensor& bv = val(b);
      for (int r = 0; r < t; ++r)
        for (int o = 0; o < out; ++o) y.at(r, o) += bv.at(0, o);
    }
    std::vector<int> parents = {x.id, w.id};
    if (b.valid()) parents.push_back(b.id);
    Node n = make("linear", parents, std::move(y));
    const int xid = x.id, wid = w.id, bid = b.valid() ? b.id : -1;
    n.backprop = [xid, wid, bid, t, in, out](Tape& tp, const Tensor& g) {
      const Tensor& xv = tp.node(xid).val;
      const Tensor& wv = tp.node(wid).val;
      if (tp.wants(xid)) {
        Tensor& gx = tp.grad(xid);
        for (int r = 0; r < t; ++r)
          for (int o = 0; o < out; ++o) {
            const real_t go = g.at(r, o);
            if (go == real_t(0)) continue;
            for (int i = 0; i < in; ++i) gx.at(r, i) += go * wv.at(i, o);
          }
      }
      if (tp.wants(wid)) {
        Tensor& gw = tp.grad(wid);
        for (int r = 0; r < t; ++r)
          for (int i = 0; i < in; ++i) {
            const real_t xi = xv.at(r, i);
            if (xi == real_t(0)) continue;
            for (int o = 0; o < out; ++o) gw.at(i, o) += xi * g.at(r, o);
          }
      }
      if (bid >= 0 && tp.wants(bid)) {
        Tensor& gb = tp.grad(bid);
        for (int r = 0; r < t; ++r)
          for (int o = 0; o < out; ++o) gb.at(0, o) += g.at(r, o);
      }
    };
    return push(std::move(n));
  }

  // 1-d convolution along the time axis with symmetric "same" zero padding.
  // Kernel is (taps, in_ch, out_ch) with an odd tap count; `dilation`
  // stretches the receptive field without changing the output length.
  Var temporal_conv1d(Var x, Var w, Var b = Var{}, int dilation = 1) {
    const Tensor &xv = val(x), &wv = val(w);
    require(xv.ndim() == 2, "temporal_conv1d", "expects rank-2 input, got " + xv.shape_string());
    require(wv.ndim() == 3, "temporal_conv1d", "expects rank-3 kernel (taps,in,out), got " + wv.shape_string());
    require(wv.shape[0] % 2 == 1, "temporal_conv1d", "tap count must be odd for same padding, got " + wv.shape_string());
    require(wv.shape[1] == xv.cols(), "temporal_conv1d",
            "kernel input channels " + wv.shape_string() + " do not match input " + xv.shape_string());
    require(dilation >= 1, "temporal_conv1d", "dilation must be >= 1");
    const int t = xv.rows(), cin = xv.cols(), k = wv.shape[0], cout = wv.shape[2];
    const int half = k / 2;
    if (b.valid()) {
      const Tensor& bv = val(b);
      require(bv.rows() == 1 && bv.cols() == cout, "temporal_conv1d",
              "bias " + bv.shape_string() + " does not match output channels " + std::to_string(cout));
    }
    Tensor y({t, cout});
    for (int r = 0; r < t; ++r)
      for (int tap = 0; tap < k; ++tap) {
        const int src = r + (tap - half) * dilation;
        if (src < 0 || src >= t) continue;
        for (int i = 0; i < cin; ++i) {
          const real_t xi = xv.at(src, i);
          if (xi == real_t(0)) continue;
          for (int o = 0; o < cout; ++o) y.at(r, o) += xi * wv.at3(tap, i, o);
        }
      }
    if (b.valid()) {
      const Tensor& bv = val(b);
      for (int r = 0; r < t; ++r)
        for (int o = 0; o < cout; ++o) y.at(r, o) += bv.at(0, o);
    }
    std::vector<int> parents = {x.id, w.id};
    if (b.valid()) parents.push_back(b.id);
    Node n = make("temporal_conv1d", parents, std::move(y));
    const int xid = x.id, wid = w.id, bid = b.valid() ? b.id : -1;
    n.backprop = [xid, wid, bid, t, cin, k, cout, half, dilation](Tape& tp, const Tensor& g) {
      const Tensor& xv = tp.node(xid).val;
      const Tensor& wv = tp.node(wid).val;
      const bool wx = tp.wants(xid), ww = tp.wants(wid);
      if (wx || ww) {
        for (int r = 0; r < t; ++r)
          for (int tap = 0; tap < k; ++tap) {
            const int src = r + (tap - half) * dilation;
            if (src < 0 || src >= t) continue;
            for (int o = 0; o < cout; ++o) {
              const real_t go = g.at(r, o);
              if (go == real_t(0)) continue;
              if (wx) {
                Tensor& gx = tp.grad(xid);
                for (int i = 0; i < cin; ++i) gx.at(src, i) += go * wv.at3(tap, i, o);
              }
              if (ww) {
                Tensor& gw = tp.grad(wid);
                for (int i = 0; i < cin; ++i) gw.at3(tap, i, o) += go * xv.at(src, i);
              }
            }
          }
      }
      if (bid >= 0 && tp.wants(bid)) {
        Tensor& gb = tp.grad(bid);
        for (int r = 0; r < t; ++r)
          for (int o = 0; o < cout; ++o) gb.at(0, o) += g.at(r, o);
      }
    };
    return push(std::move(n));
  }

  // ---- row / column structure ----------------------------------------

  Var concat_channels(const std::vector<Var>& parts) {
    require(!parts.empty(), "concat_channels", "needs at least one input");
    const int t = val(parts[0]).rows();
    int total = 0;
    for (const Var& p : parts) {
      const Tensor& pv = val(p);
      require(pv.ndim() == 2, "concat_channels", "expects rank-2 inputs, got " + pv.shape_string());
      require(pv.rows() == t, "concat_channels",
              "row mismatch: " + pv.shape_string() + " vs " + val(parts[0]).shape_string());
      total += pv.cols();
    }
    Tensor y({t, total});
    int off = 0;
    for (const Var& p : parts) {
      const Tensor& pv = val(p);
      for (int r = 0; r < t; ++r)
        for (int c = 0; c < pv.cols(); ++c) y.at(r, off + c) = pv.at(r, c);
      off += pv.cols();
    }
    std::vector<int> parents;
    std::vector<std::pair<int, int>> spans;  // (parent id, width)
    for (const Var& p : parts) {
      parents.push_back(p.id);
      spans.emplace_back(p.id, val(p).cols());
    }
    Node n = make("concat_channels", parents, std::move(y));
    n.backprop = [spans, t](Tape& tp, const Tensor& g) {
      int off = 0;
      for (const auto& [pid, width] : spans) {
        if (tp.wants(pid)) {
          Tensor& gp = tp.grad(pid);
          for (int r = 0; r < t; ++r)
            for (int c = 0; c < width; ++c) gp.at(r, c) += g.at(r, off + c);
        }
        off += width;
      }
    };
    return push(std::move(n));
  }

  Var slice_channels(Var x, int c0, int c1) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "slice_channels", "expects rank-2 input, got " + xv.shape_string());
    require(0 <= c0 && c0 < c1 && c1 <= xv.cols(), "slice_channels",
            "range [" + std::to_string(c0) + "," + std::to_string(c1) + ") out of " + xv.shape_string());
    const int t = xv.rows(), w = c1 - c0;
    Tensor y({t, w});
    for (int r = 0; r < t; ++r)
      for (int c = 0; c < w; ++c) y.at(r, c) = xv.at(r, c0 + c);
    Node n = make("slice_channels", {x.id}, std::move(y));
    const int xid = x.id;
    n.backprop = [xid, c0, t, w](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int r = 0; r < t; ++r)
        for (int c = 0; c < w; ++c) gx.at(r, c0 + c) += g.at(r, c);
    };
    return push(std::move(n));
  }

  Var row(Var x, int r) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "row", "expects rank-2 input, got " + xv.shape_string());
    require(0 <= r && r < xv.rows(), "row", "index " + std::to_string(r) + " out of " + xv.shape_string());
    Tensor y({1, xv.cols()});
    for (int c = 0; c < xv.cols(); ++c) y.at(0, c) = xv.at(r, c);
    Node n = make("row", {x.id}, std::move(y));
    const int xid = x.id, cols = xv.cols();
    n.backprop = [xid, r, cols](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int c = 0; c < cols; ++c) gx.at(r, c) += g.at(0, c);
    };
    return push(std::move(n));
  }

  Var stack_rows(const std::vector<Var>& rows_in) {
    require(!rows_in.empty(), "stack_rows", "needs at least one row");
    const int c = val(rows_in[0]).cols();
    std::vector<int> parents;
    for (const Var& r : rows_in) {
      const Tensor& rv = val(r);
      require(rv.rows() == 1 && rv.cols() == c, "stack_rows",
              "every row must be (1," + std::to_string(c) + "), got " + rv.shape_string());
      parents.push_back(r.id);
    }
    const int t = static_cast<int>(rows_in.size());
    Tensor y({t, c});
    for (int r = 0; r < t; ++r)
      for (int j = 0; j < c; ++j) y.at(r, j) = val(rows_in[r]).at(0, j);
    Node n = make("stack_rows", parents, std::move(y));
    const std::vector<int> ids = parents;
    n.backprop = [ids, c](Tape& tp, const Tensor& g) {
      for (std::size_t r = 0; r < ids.size(); ++r) {
        if (!tp.wants(ids[r])) continue;
        Tensor& gr = tp.grad(ids[r]);
        for (int j = 0; j < c; ++j) gr.at(0, j) += g.at(static_cast<int>(r), j);
      }
    };
    return push(std::move(n));
  }

  Var repeat_rows(Var x, int t_frames) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2 && xv.rows() == 1, "repeat_rows", "expects a (1,C) input, got " + xv.shape_string());
    require(t_frames >= 1, "repeat_rows", "frame count must be >= 1");
    const int c = xv.cols();
    Tensor y({t_frames, c});
    for (int r = 0; r < t_frames; ++r)
      for (int j = 0; j < c; ++j) y.at(r, j) = xv.at(0, j);
    Node n = make("repeat_rows", {x.id}, std::move(y));
    const int xid = x.id;
    n.backprop = [xid, t_frames, c](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int r = 0; r < t_frames; ++r)
        for (int j = 0; j < c; ++j) gx.at(0, j) += g.at(r, j);
    };
    return push(std::move(n));
  }

  Var reshape(Var x, std::vector<int> shape) {
    const Tensor& xv = val(x);
    require(Tensor::numel_of(shape) == xv.numel(), "reshape",
            "cannot reshape " + xv.shape_string() + " to " + shape_str(shape));
    Tensor y = xv;
    y.shape = std::move(shape);
    Node n = make("reshape", {x.id}, std::move(y));
    const int xid = x.id;
    n.backprop = [xid](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (long i = 0; i < g.numel(); ++i) gx.v[i] += g.v[i];
    };
    return push(std::move(n));
  }

  Var embed_lookup(Var table, int index, int t_frames) {
    const Tensor& tv = val(table);
    require(tv.ndim() == 2, "embed_lookup", "expects rank-2 table, got " + tv.shape_string());
    require(0 <= index && index < tv.rows(), "embed_lookup",
            "index " + std::to_string(index) + " out of table " + tv.shape_string());
    require(t_frames >= 1, "embed_lookup", "frame count must be >= 1");
    const int e = tv.cols();
    Tensor y({t_frames, e});
    for (int r = 0; r < t_frames; ++r)
      for (int j = 0; j < e; ++j) y.at(r, j) = tv.at(index, j);
    Node n = make("embed_lookup", {table.id}, std::move(y));
    const int tid = table.id;
    n.backprop = [tid, index, t_frames, e](Tape& tp, const Tensor& g) {
      if (!tp.wants(tid)) return;
      Tensor& gt = tp.grad(tid);
      for (int r = 0; r < t_frames; ++r)
        for (int j = 0; j < e; ++j) gt.at(index, j) += g.at(r, j);
    };
    return push(std::move(n));
  }

  // ---- normalization, pooling, attention helpers ----------------------

  Var softmax(Var x) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "softmax", "expects rank-2 input, got " + xv.shape_string());
    Tensor y = xv;
    for (int r = 0; r < xv.rows(); ++r) {
      real_t mx = xv.at(r, 0);
      for (int c = 1; c < xv.cols(); ++c) mx = std::max(mx, xv.at(r, c));
      real_t sum = 0;
      for (int c = 0; c < xv.cols(); ++c) {
        y.at(r, c) = std::exp(xv.at(r, c) - mx);
        sum += y.at(r, c);
      }
      for (int c = 0; c < xv.cols(); ++c) y.at(r, c) /= sum;
    }
    return unary("softmax", x, std::move(y), [](const Tensor& y, const Tensor& g, Tensor& gx) {
      for (int r = 0; r < y.rows(); ++r) {
        real_t dot = 0;
        for (int c = 0; c < y.cols(); ++c) dot += g.at(r, c) * y.at(r, c);
        for (int c = 0; c < y.cols(); ++c) gx.at(r, c) += y.at(r, c) * (g.at(r, c) - dot);
      }
    });
  }

  // Per-frame standardization across channels: each row is shifted to zero
  // mean and scaled to unit variance (population variance, +eps under the
  // square root). The adaptive-layer-norm core.
  Var layer_stats_normalize(Var x, real_t eps = real_t(1e-5)) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "layer_stats_normalize", "expects rank-2 input, got " + xv.shape_string());
    const int t = xv.rows(), c = xv.cols();
    Tensor y({t, c});
    std::vector<real_t> inv_std(t);
    for (int r = 0; r < t; ++r) {
      real_t mean = 0;
      for (int j = 0; j < c; ++j) mean += xv.at(r, j);
      mean /= c;
      real_t var = 0;
      for (int j = 0; j < c; ++j) {
        const real_t d = xv.at(r, j) - mean;
        var += d * d;
      }
      var /= c;
      const real_t s = real_t(1) / std::sqrt(var + eps);
      inv_std[r] = s;
      for (int j = 0; j < c; ++j) y.at(r, j) = (xv.at(r, j) - mean) * s;
    }
    Node n = make("layer_stats_normalize", {x.id}, y);
    const int xid = x.id;
    const Tensor norm = y;  // saved activation
    n.backprop = [xid, norm, inv_std, t, c](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int r = 0; r < t; ++r) {
        real_t gmean = 0, gdot = 0;
        for (int j = 0; j < c; ++j) {
          gmean += g.at(r, j);
          gdot += g.at(r, j) * norm.at(r, j);
        }
        gmean /= c;
        gdot /= c;
        for (int j = 0; j < c; ++j)
          gx.at(r, j) += inv_std[r] * (g.at(r, j) - gmean - norm.at(r, j) * gdot);
      }
    };
    return push(std::move(n));
  }

  Var avg_pool_time(Var x) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "avg_pool_time", "expects rank-2 input, got " + xv.shape_string());
    const int t = xv.rows(), c = xv.cols();
    Tensor y({1, c});
    for (int r = 0; r < t; ++r)
      for (int j = 0; j < c; ++j) y.at(0, j) += xv.at(r, j);
    for (int j = 0; j < c; ++j) y.at(0, j) /= t;
    Node n = make("avg_pool_time", {x.id}, std::move(y));
    const int xid = x.id;
    n.backprop = [xid, t, c](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int r = 0; r < t; ++r)
        for (int j = 0; j < c; ++j) gx.at(r, j) += g.at(0, j) / t;
    };
    return push(std::move(n));
  }

  Var max_pool_time(Var x) {
    const Tensor& xv = val(x);
    require(xv.ndim() == 2, "max_pool_time", "expects rank-2 input, got " + xv.shape_string());
    const int t = xv.rows(), c = xv.cols();
    Tensor y({1, c});
    std::vector<int> arg(c, 0);
    for (int j = 0; j < c; ++j) {
      real_t best = xv.at(0, j);
      for (int r = 1; r < t; ++r)
        if (xv.at(r, j) > best) {
          best = xv.at(r, j);
          arg[j] = r;
        }
      y.at(0, j) = best;
    }
    Node n = make("max_pool_time", {x.id}, std::move(y));
    const int xid = x.id;
    n.backprop = [xid, arg, c](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      Tensor& gx = tp.grad(xid);
      for (int j = 0; j < c; ++j) gx.at(arg[j], j) += g.at(0, j);
    };
    return push(std::move(n));
  }

  // ---- similarity and losses ------------------------------------------

  // Pairwise cosine similarity between rows of a (N,D) and rows of b (M,D).
  // Row-norm products below eps clamp the denominator to eps; such pairs get
  // no gradient, since a near-zero vector has no usable direction and the
  // 1/eps factor would otherwise blow up the backward pass.
  Var cosine_similarity(Var a, Var b, real_t eps = real_t(1e-8)) {
    const Tensor &av = val(a), &bv = val(b);
    require(av.ndim() == 2 && bv.ndim() == 2 && av.cols() == bv.cols(), "cosine_similarity",
            "expects rank-2 inputs with equal width, got " + av.shape_string() + " and " + bv.shape_string());
    const int nr = av.rows(), mr = bv.rows(), d = av.cols();
    std::vector<real_t> na(nr), nb(mr);
    for (int i = 0; i < nr; ++i) {
      real_t s = 0;
      for (int k = 0; k < d; ++k) s += av.at(i, k) * av.at(i, k);
      na[i] = std::sqrt(s);
    }
    for (int j = 0; j < mr; ++j) {
      real_t s = 0;
      for (int k = 0; k < d; ++k) s += bv.at(j, k) * bv.at(j, k);
      nb[j] = std::sqrt(s);
    }
    Tensor y({nr, mr});
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < mr; ++j) {
        real_t dot = 0;
        for (int k = 0; k < d; ++k) dot += av.at(i, k) * bv.at(j, k);
        y.at(i, j) = dot / std::max(na[i] * nb[j], eps);
      }
    Node n = make("cosine_similarity", {a.id, b.id}, y);
    const int aid = a.id, bid = b.id;
    const Tensor sim = y;
    n.backprop = [aid, bid, na, nb, sim, eps, nr, mr, d](Tape& tp, const Tensor& g) {
      const Tensor& av = tp.node(aid).val;
      const Tensor& bv = tp.node(bid).val;
      const bool wa = tp.wants(aid), wb = tp.wants(bid);
      if (!wa && !wb) return;
      for (int i = 0; i < nr; ++i)
        for (int j = 0; j < mr; ++j) {
          const real_t go = g.at(i, j);
          if (go == real_t(0)) continue;
          const real_t denom = na[i] * nb[j];
          if (denom <= eps) continue;
          const real_t s = sim.at(i, j);
          if (wa) {
            Tensor& ga = tp.grad(aid);
            for (int k = 0; k < d; ++k)
              ga.at(i, k) += go * (bv.at(j, k) / denom - s * av.at(i, k) / (na[i] * na[i]));
          }
          if (wb) {
            Tensor& gb = tp.grad(bid);
            for (int k = 0; k < d; ++k)
              gb.at(j, k) += go * (av.at(i, k) / denom - s * bv.at(j, k) / (nb[j] * nb[j]));
          }
        }
    };
    return push(std::move(n));
  }

  Var mse(Var a, Var b) {
    const Tensor &av = val(a), &bv = val(b);
    require(av.same_shape(bv), "mse", "shape mismatch " + av.shape_string() + " vs " + bv.shape_string());
    real_t acc = 0;
    for (long i = 0; i < av.numel(); ++i) {
      const real_t d = av.v[i] - bv.v[i];
      acc += d * d;
    }
    const real_t inv_n = real_t(1) / av.numel();
    Node n = make("mse", {a.id, b.id}, Tensor::scalar(acc * inv_n));
    const int aid = a.id, bid = b.id;
    n.backprop = [aid, bid, inv_n](Tape& tp, const Tensor& g) {
      const Tensor& av = tp.node(aid).val;
      const Tensor& bv = tp.node(bid).val;
      const real_t go = g.v[0];
      if (tp.wants(aid)) {
        Tensor& ga = tp.grad(aid);
        for (long i = 0; i < av.numel(); ++i) ga.v[i] += go * real_t(2) * (av.v[i] - bv.v[i]) * inv_n;
      }
      if (tp.wants(bid)) {
        Tensor& gb = tp.grad(bid);
        for (long i = 0; i < av.numel(); ++i) gb.v[i] -= go * real_t(2) * (av.v[i] - bv.v[i]) * inv_n;
      }
    };
    return push(std::move(n));
  }

  Var l1(Var a, Var b) {
    const Tensor &av = val(a), &bv = val(b);
    require(av.same_shape(bv), "l1", "shape mismatch " + av.shape_string() + " vs " + bv.shape_string());
    real_t acc = 0;
    for (long i = 0; i < av.numel(); ++i) acc += std::abs(av.v[i] - bv.v[i]);
    const real_t inv_n = real_t(1) / av.numel();
    Node n = make("l1", {a.id, b.id}, Tensor::scalar(acc * inv_n));
    const int aid = a.id, bid = b.id;
    n.backprop = [aid, bid, inv_n](Tape& tp, const Tensor& g) {
      const Tensor& av = tp.node(aid).val;
      const Tensor& bv = tp.node(bid).val;
      const real_t go = g.v[0];
      for (long i = 0; i < av.numel(); ++i) {
        const real_t d = av.v[i] - bv.v[i];
        const real_t s = d > real_t(0) ? real_t(1) : (d < real_t(0) ? real_t(-1) : real_t(0));
        if (tp.wants(aid)) tp.grad(aid).v[i] += go * s * inv_n;
        if (tp.wants(bid)) tp.grad(bid).v[i] -= go * s * inv_n;
      }
    };
    return push(std::move(n));
  }

  // Mean softmax cross-entropy over rows of a logit matrix. Uses the
  // log-sum-exp form, so a single-column row contributes exactly zero.
  Var cross_entropy(Var logits, std::vector<int> labels) {
    const Tensor& lv = val(logits);
    require(lv.ndim() == 2, "cross_entropy", "expects rank-2 logits, got " + lv.shape_string());
    require(static_cast<int>(labels.size()) == lv.rows(), "cross_entropy",
            "label count " + std::to_string(labels.size()) + " does not match rows of " + lv.shape_string());
    const int nr = lv.rows(), k = lv.cols();
    for (int r = 0; r < nr; ++r)
      require(0 <= labels[r] && labels[r] < k, "cross_entropy",
              "label " + std::to_string(labels[r]) + " out of range for " + lv.shape_string());
    Tensor probs({nr, k});
    real_t loss = 0;
    for (int r = 0; r < nr; ++r) {
      real_t mx = lv.at(r, 0);
      for (int c = 1; c < k; ++c) mx = std::max(mx, lv.at(r, c));
      real_t sum = 0;
      for (int c = 0; c < k; ++c) {
        probs.at(r, c) = std::exp(lv.at(r, c) - mx);
        sum += probs.at(r, c);
      }
      for (int c = 0; c < k; ++c) probs.at(r, c) /= sum;
      loss += std::log(sum) - (lv.at(r, labels[r]) - mx);
    }
    loss /= nr;
    Node n = make("cross_entropy", {logits.id}, Tensor::scalar(loss));
    const int lid = logits.id;
    n.backprop = [lid, probs, labels, nr, k](Tape& tp, const Tensor& g) {
      if (!tp.wants(lid)) return;
      Tensor& gl = tp.grad(lid);
      const real_t go = g.v[0] / nr;
      for (int r = 0; r < nr; ++r)
        for (int c = 0; c < k; ++c)
          gl.at(r, c) += go * (probs.at(r, c) - (c == labels[r] ? real_t(1) : real_t(0)));
    };
    return push(std::move(n));
  }

  Var scalar_weighted_sum(const std::vector<Var>& terms, const std::vector<real_t>& weights) {
    require(!terms.empty() && terms.size() == weights.size(), "scalar_weighted_sum",
            "needs matching non-empty term and weight lists");
    real_t acc = 0;
    std::vector<int> parents;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Tensor& tv = val(terms[i]);
      require(tv.numel() == 1, "scalar_weighted_sum", "term " + std::to_string(i) + " is not scalar, got " + tv.shape_string());
      acc += weights[i] * tv.v[0];
      parents.push_back(terms[i].id);
    }
    Node n = make("scalar_weighted_sum", parents, Tensor::scalar(acc));
    const std::vector<int> ids = parents;
    const std::vector<real_t> w = weights;
    n.backprop = [ids, w](Tape& tp, const Tensor& g) {
      for (std::size_t i = 0; i < ids.size(); ++i)
        if (tp.wants(ids[i])) tp.grad(ids[i]).v[0] += g.v[0] * w[i];
    };
    return push(std::move(n));
  }

  // ---- backward --------------------------------------------------------

  // Seeds d(loss)/d(loss) = 1 and walks the tape in reverse. Returns a
  // gradient for every registered parameter; parameters the loss never
  // touched get zeros.
  GradMap backward(Var loss) {
    const Tensor& lv = val(loss);
    if (lv.numel() != 1)
      throw std::invalid_argument("backward: loss must be scalar, got " + lv.shape_string());
    for (auto& n : nodes_) {
      n.grad = Tensor();
      n.reachable = false;
    }
    if (nodes_[loss.id].needs_grad) {
      mark_reachable(loss.id);
      for (auto& n : nodes_)
        if (n.reachable && n.needs_grad) n.grad = Tensor(n.val.shape);
      nodes_[loss.id].grad.v[0] = real_t(1);
      for (int id = loss.id; id >= 0; --id) {
        Node& n = nodes_[id];
        if (!n.reachable || !n.needs_grad || !n.backprop) continue;
        n.backprop(*this, n.grad);
      }
    }
    GradMap out;
    for (const auto& [name, id] : param_nodes_) {
      if (!nodes_[id].needs_grad) continue;  // frozen
      out[name] = nodes_[id].grad.numel() > 0 ? nodes_[id].grad : Tensor(nodes_[id].val.shape);
    }
    return out;
  }

  // internal accessors used by backprop closures
  const Node& node(int id) const { return nodes_.at(id); }
  bool wants(int id) const { return nodes_[id].needs_grad && nodes_[id].reachable; }
  Tensor& grad(int id) { return nodes_[id].grad; }

 private:
  static void require(bool ok, const char* op, const std::string& msg) {
    if (!ok) throw std::invalid_argument(std::string(op) + ": " + msg);
  }

  Node make(const char* op, const std::vector<int>& parents, Tensor val) {
    Node n;
    n.op = op;
    n.parents = parents;
    n.val = std::move(val);
    for (int p : parents) n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
    return n;
  }

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  Var unary(const char* op, Var x, Tensor out, void (*fn)(const Tensor&, const Tensor&, Tensor&)) {
    Node n = make(op, {x.id}, std::move(out));
    const int xid = x.id, yid = static_cast<int>(nodes_.size());
    n.backprop = [xid, yid, fn](Tape& tp, const Tensor& g) {
      if (!tp.wants(xid)) return;
      fn(tp.node(yid).val, g, tp.grad(xid));
    };
    return push(std::move(n));
  }

  Var binary_broadcast(const char* op, Var a, Var b, bool is_mul) {
    const Tensor &av = val(a), &bv = val(b);
    const bool same = av.same_shape(bv);
    const bool b_row = !same && av.ndim() == 2 && bv.ndim() == 2 && bv.rows() == 1 && bv.cols() == av.cols();
    const bool a_row = !same && !b_row && av.ndim() == 2 && bv.ndim() == 2 && av.rows() == 1 && av.cols() == bv.cols();
    require(same || b_row || a_row, op,
            "shape mismatch " + av.shape_string() + " vs " + bv.shape_string() +
                " (only equal shapes or a (1,C) row broadcast are supported)");
    const Tensor& big = a_row ? bv : av;
    const int c = same ? 1 : big.cols();  // unused on the same-shape path
    Tensor y = big;
    if (same) {
      for (long i = 0; i < y.numel(); ++i) y.v[i] = is_mul ? av.v[i] * bv.v[i] : av.v[i] + bv.v[i];
    } else {
      for (long i = 0; i < y.numel(); ++i) {
        const int j = static_cast<int>(i % c);
        const real_t x = b_row ? av.v[i] : av.at(0, j);
        const real_t z = b_row ? bv.at(0, j) : bv.v[i];
        y.v[i] = is_mul ? x * z : x + z;
      }
    }
    Node n = make(op, {a.id, b.id}, std::move(y));
    const int aid = a.id, bid = b.id;
    n.backprop = [aid, bid, same, b_row, is_mul, c](Tape& tp, const Tensor& g) {
      const Tensor& av = tp.node(aid).val;
      const Tensor& bv = tp.node(bid).val;
      const bool wa = tp.wants(aid), wb = tp.wants(bid);
      if (!wa && !wb) return;
      for (long i = 0; i < g.numel(); ++i) {
        const real_t go = g.v[i];
        if (go == real_t(0)) continue;
        const int j = same ? 0 : static_cast<int>(i % c);
        const real_t x = same || b_row ? av.v[i] : av.at(0, j);
        const real_t z = same ? bv.v[i] : (b_row ? bv.at(0, j) : bv.v[i]);
        if (wa) {
          const real_t d = is_mul ? go * z : go;
          if (same || b_row)
            tp.grad(aid).v[i] += d;
          else
            tp.grad(aid).at(0, j) += d;
        }
        if (wb) {
          const real_t d = is_mul ? go * x : go;
          if (same || !b_row)
            tp.grad(bid).v[i] += d;
          else
            tp.grad(bid).at(0, j) += d;
        }
      }
    };
    return push(std::move(n));
  }

  void mark_reachable(int id) {
    std::vector<int> stack = {id};
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      if (nodes_[u].reachable) continue;
      nodes_[u].reachable = true;
      for (int p : nodes_[u].parents)
        if (!nodes_[p].reachable) stack.push_back(p);
    }
  }

  std::vector<Node> nodes_;
  std::map<std::string, int> param_nodes_;
};

// One LSTM cell update built from tape primitives. Gate layout in the fused
// (in+hidden -> 4H) projections is [input, forget, cell, output].
inline std::pair<Var, Var> lstm_step(Tape& tp, Var x_t, Var h_prev, Var c_prev, Var w_ih, Var w_hh,
                                     Var bias) {
  const int hidden = tp.val(w_hh).rows();
  Var pre = tp.add(tp.linear(x_t, w_ih), tp.linear(h_prev, w_hh, bias));
  Var i = tp.sigmoid(tp.slice_channels(pre, 0, hidden));
  Var f = tp.sigmoid(tp.slice_channels(pre, hidden, 2 * hidden));
  Var g = tp.tanh(tp.slice_channels(pre, 2 * hidden, 3 * hidden));
  Var o = tp.sigmoid(tp.slice_channels(pre, 3 * hidden, 4 * hidden));
  Var c_next = tp.add(tp.mul(f, c_prev), tp.mul(i, g));
  Var h_next = tp.mul(o, tp.tanh(c_next));
  return {h_next, c_next};
}

}  // namespace gestic
