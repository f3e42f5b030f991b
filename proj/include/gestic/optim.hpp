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
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

#include "gestic/params.hpp"
#include "gestic/tape.hpp"
#include "gestic/tensor.hpp"

namespace gestic {

struct AdamConfig {
  real_t lr = real_t(0.00025);
  real_t beta1 = real_t(0.9);
  real_t beta2 = real_t(0.999);
  real_t eps = real_t(1e-8);
};

// Bias-corrected Adam. Moment tensors are created lazily the first time a
// parameter shows up in a gradient map; frozen parameters are never touched.
struct AdamState {
  AdamConfig cfg;
  long step = 0;
  std::map<std::string, Tensor> m;
  std::map<std::string, Tensor> v;
};

inline void adam_step(ParamStore& ps, const GradMap& grads, AdamState& st) {
  st.step += 1;
  const real_t corr1 = real_t(1) - std::pow(st.cfg.beta1, static_cast<real_t>(st.step));
  const real_t corr2 = real_t(1) - std::pow(st.cfg.beta2, static_cast<real_t>(st.step));
  for (const auto& [name, g] : grads) {
    if (!ps.has(name)) throw std::invalid_argument("adam_step: gradient for unknown parameter '" + name + "'");
    if (ps.frozen(name)) continue;
    Tensor& p = ps.at(name);
    if (!p.same_shape(g))
      throw std::invalid_argument("adam_step: gradient shape " + g.shape_string() + " does not match parameter '" +
                                  name + "' " + p.shape_string());
    Tensor& m = st.m.try_emplace(name, Tensor(p.shape)).first->second;
    Tensor& v = st.v.try_emplace(name, Tensor(p.shape)).first->second;
    for (long i = 0; i < p.numel(); ++i) {
      m.v[i] = st.cfg.beta1 * m.v[i] + (real_t(1) - st.cfg.beta1) * g.v[i];
      v.v[i] = st.cfg.beta2 * v.v[i] + (real_t(1) - st.cfg.beta2) * g.v[i] * g.v[i];
      const real_t m_hat = m.v[i] / corr1;
      const real_t v_hat = v.v[i] / corr2;
      p.v[i] -= st.cfg.lr * m_hat / (std::sqrt(v_hat) + st.cfg.eps);
    }
  }
}

// Builds a scalar loss from the current parameter values. Must be
// deterministic: grad_check calls it repeatedly under perturbation.
using LossBuilder = std::function<Var(Tape&, ParamStore&)>;

// Central-difference check of every non-frozen parameter element. Returns
// max over elements of |analytic - numeric| / max(1, |numeric|).
inline real_t grad_check(const LossBuilder& build, ParamStore& ps, real_t eps = real_t(1e-5)) {
  GradMap analytic;
  {
    Tape tp;
    Var loss = build(tp, ps);
    if (!std::isfinite(tp.val(loss).v[0]))
      throw std::runtime_error("grad_check: loss is not finite");
    analytic = tp.backward(loss);
  }
  auto eval = [&]() -> real_t {
    Tape tp;
    Var loss = build(tp, ps);
    const real_t l = tp.val(loss).v[0];
    if (!std::isfinite(l)) throw std::runtime_error("grad_check: loss is not finite under perturbation");
    return l;
  };
  real_t worst = 0;
  for (auto& [name, entry] : ps.entries()) {
    if (entry.frozen) continue;
    auto it = analytic.find(name);
    if (it == analytic.end()) continue;
    Tensor& p = entry.t;
    for (long i = 0; i < p.numel(); ++i) {
      const real_t saved = p.v[i];
      p.v[i] = saved + eps;
      const real_t up = eval();
      p.v[i] = saved - eps;
      const real_t down = eval();
      p.v[i] = saved;
      const real_t numeric = (up - down) / (2 * eps);
      const real_t err = std::abs(it->second.v[i] - numeric) / std::max(real_t(1), std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace gestic
