// Copyright 2026 The hqb Authors
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
/**
 * @file
 * Plain SGD and Adam over a list of parameter arrays.
 *
 * Parameters and gradients are passed as parallel lists of spans; the
 * optimizer state remembers the layout from its first step and rejects any
 * later call whose layout differs.
 */
#pragma once

#include "hqb/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::neural {

using ParamViews = std::vector<std::span<double>>;
using GradViews = std::vector<std::span<const double>>;

enum class OptimizerKind { Sgd, Adam };

inline std::string_view to_string(OptimizerKind k) {
    return k == OptimizerKind::Sgd ? "sgd" : "adam";
}

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::Sgd;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::vector<std::vector<double>> first_moment;
    std::vector<std::vector<double>> second_moment;
    std::size_t step = 0;

    static OptimizerState sgd(double lr) { return make(OptimizerKind::Sgd, lr); }
    static OptimizerState adam(double lr) { return make(OptimizerKind::Adam, lr); }

    static OptimizerState make(OptimizerKind kind, double lr) {
        if (!(lr > 0.0) || !std::isfinite(lr)) {
            throw DomainError("learning rate must be positive, got " + std::to_string(lr));
        }
        OptimizerState s;
        s.kind = kind;
        s.learning_rate = lr;
        return s;
    }
};

namespace detail {

inline void check_layout(const ParamViews &params, const GradViews &grads) {
    if (params.size() != grads.size()) {
        throw DimensionError("optimizer: " + std::to_string(params.size()) +
                             " parameter arrays but " + std::to_string(grads.size()) +
                             " gradient arrays");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != grads[i].size()) {
            throw DimensionError("optimizer: array " + std::to_string(i) + " has " +
                                 std::to_string(params[i].size()) + " parameters but " +
                                 std::to_string(grads[i].size()) + " gradients");
        }
    }
}

} // namespace detail

/// params <- params - lr * grads
inline void sgd_step(const OptimizerState &state, const ParamViews &params,
                     const GradViews &grads) {
    detail::check_layout(params, grads);
    for (std::size_t a = 0; a < params.size(); ++a) {
        for (std::size_t i = 0; i < params[a].size(); ++i) {
            params[a][i] -= state.learning_rate * grads[a][i];
        }
    }
}

inline void adam_step(OptimizerState &state, const ParamViews &params,
                      const GradViews &grads) {
    detail::check_layout(params, grads);
    if (state.step == 0 && state.first_moment.empty()) {
        for (const auto &p : params) {
            state.first_moment.emplace_back(p.size(), 0.0);
            state.second_moment.emplace_back(p.size(), 0.0);
        }
    }
    if (state.first_moment.size() != params.size()) {
        throw DimensionError("adam: parameter layout changed between steps");
    }
    for (std::size_t a = 0; a < params.size(); ++a) {
        if (state.first_moment[a].size() != params[a].size()) {
            throw DimensionError("adam: parameter layout changed between steps");
        }
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(state.beta1, t);
    const double bc2 = 1.0 - std::pow(state.beta2, t);
    const double step_size = state.learning_rate / bc1;
    const double sqrt_bc2 = std::sqrt(bc2);
    for (std::size_t a = 0; a < params.size(); ++a) {
        auto &m = state.first_moment[a];
        auto &v = state.second_moment[a];
        for (std::size_t i = 0; i < params[a].size(); ++i) {
            const double g = grads[a][i];
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g;
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
            const double denom = std::sqrt(v[i]) / sqrt_bc2 + state.epsilon;
            params[a][i] -= step_size * m[i] / denom;
        }
    }
}

inline void optimizer_step(OptimizerState &state, const ParamViews &params,
                           const GradViews &grads) {
    if (state.kind == OptimizerKind::Adam) {
        adam_step(state, params, grads);
    } else {
        sgd_step(state, params, grads);
    }
}

} // namespace hqb::neural
