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
 * The variational classifier circuit: embedding, entangling layers and
 * Pauli-Z readout, with adjoint and parameter-shift gradients.
 *
 * Angle embedding: H on every wire, then Ry(pi * x_i - pi / 2) on wire i for
 * each feature. Amplitude embedding: zero-pad to 2^n, divide by the L2 norm.
 * Each entangling layer is a linear CNOT ladder (i -> i+1, ascending) followed
 * by Ry(2 * atan(2 * theta)) on every wire. Trainable angles are stored
 * layer-major, qubit-minor and remapped only at gate time.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/quantum/state_vector.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::quantum {

enum class Embedding { Angle, Amplitude };

inline std::string_view to_string(Embedding e) {
    return e == Embedding::Angle ? "angle" : "amplitude";
}

inline Embedding embedding_from_string(std::string_view s) {
    if (s == "angle") {
        return Embedding::Angle;
    }
    if (s == "amplitude") {
        return Embedding::Amplitude;
    }
    throw DomainError("unknown embedding '" + std::string(s) + "'");
}

struct CircuitSpec {
    std::size_t n_qubits = 1;
    std::size_t n_layers = 0;
    std::vector<double> theta; ///< n_layers * n_qubits, pre-remap
    Embedding embedding = Embedding::Angle;

    CircuitSpec() = default;
    CircuitSpec(std::size_t qubits, std::size_t layers, Embedding emb)
        : n_qubits(qubits), n_layers(layers), theta(qubits * layers, 0.0),
          embedding(emb) {
        StateVector::check_qubit_count(qubits);
    }

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return n_layers * n_qubits;
    }

    [[nodiscard]] std::size_t index(std::size_t layer, std::size_t qubit) const noexcept {
        return layer * n_qubits + qubit;
    }

    void validate() const {
        StateVector::check_qubit_count(n_qubits);
        if (theta.size() != parameter_count()) {
            throw DimensionError("theta has " + std::to_string(theta.size()) +
                                 " entries, expected " +
                                 std::to_string(parameter_count()));
        }
    }
};

struct ExpectationVector {
    std::vector<double> values;
};

struct CircuitGradient {
    std::vector<double> d_theta;
    std::vector<double> d_input;
};

enum class GradientBackend {
    Adjoint,
    ParameterShift,
    /// Runs both and throws ConsistencyError when they differ by > 1e-8.
    Checked,
};

inline constexpr double kBackendTolerance = 1e-8;

inline double remap_weight(double theta) { return 2.0 * std::atan(2.0 * theta); }

/// d remap_weight / d theta
inline double remap_weight_derivative(double theta) {
    return 4.0 / (1.0 + 4.0 * theta * theta);
}

/// Feature in [0, 1] to embedding angle in [-pi/2, pi/2].
inline double embedding_angle(double feature) {
    return feature * std::numbers::pi - 0.5 * std::numbers::pi;
}

inline std::size_t amplitude_qubits(std::size_t n_features) {
    if (n_features == 0) {
        throw DimensionError("amplitude embedding needs at least one feature");
    }
    std::size_t n = 1;
    while ((std::size_t{1} << n) < n_features) {
        ++n;
    }
    return n;
}

namespace detail {

inline void check_angle_features(std::size_t n_qubits, std::span<const double> features) {
    if (features.size() > n_qubits) {
        throw CapacityError(std::to_string(features.size()) +
                            " features do not fit on " + std::to_string(n_qubits) +
                            " qubits");
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double x = features[i];
        if (!(x >= 0.0 && x <= 1.0)) {
            throw DomainError("angle-embedding feature " + std::to_string(i) +
                              " = " + std::to_string(x) + " outside [0, 1]");
        }
    }
}

/// Padded, unit-norm real amplitude vector.
inline std::vector<double> normalized_padded(std::span<const double> features,
                                             double *norm_out = nullptr) {
    const std::size_t n = amplitude_qubits(features.size());
    std::vector<double> padded(std::size_t{1} << n, 0.0);
    std::copy(features.begin(), features.end(), padded.begin());
    double sq = 0.0;
    for (const double v : padded) {
        sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw NormalizationError("amplitude embedding of a vector with norm " +
                                 std::to_string(norm));
    }
    for (double &v : padded) {
        v /= norm;
    }
    if (norm_out != nullptr) {
        *norm_out = norm;
    }
    return padded;
}

} // namespace detail

/// Expects a freshly initialized |0...0>.
inline StateVector angle_embed(StateVector state, std::span<const double> features) {
    detail::check_angle_features(state.n_qubits(), features);
    state.apply_hadamard_all();
    for (std::size_t i = 0; i < features.size(); ++i) {
        state.apply_ry(i, embedding_angle(features[i]));
    }
    return state;
}

inline StateVector amplitude_embed(std::span<const double> features) {
    const auto padded = detail::normalized_padded(features);
    std::vector<Complex> amps(padded.size());
    std::transform(padded.begin(), padded.end(), amps.begin(),
                   [](double v) { return Complex{v, 0.0}; });
    return StateVector::from_amplitudes(std::move(amps));
}

inline StateVector entangling_layers(StateVector state, const CircuitSpec &spec) {
    spec.validate();
    if (state.n_qubits() != spec.n_qubits) {
        throw DimensionError("state has " + std::to_string(state.n_qubits()) +
                             " qubits, circuit expects " + std::to_string(spec.n_qubits));
    }
    for (std::size_t l = 0; l < spec.n_layers; ++l) {
        for (std::size_t q = 0; q + 1 < spec.n_qubits; ++q) {
            state.apply_cnot(q, q + 1);
        }
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            state.apply_ry(q, remap_weight(spec.theta[spec.index(l, q)]));
        }
    }
    return state;
}

inline ExpectationVector measure_z_all(const StateVector &state) {
    const std::size_t n = state.n_qubits();
    ExpectationVector out{std::vector<double>(n, 0.0)};
    const auto amps = state.amplitudes();
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t m = std::size_t{1} << (n - 1 - q);
        double acc = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double p = std::norm(amps[i]);
            acc += (i & m) != 0 ? -p : p;
        }
        out.values[q] = std::clamp(acc, -1.0, 1.0);
    }
    return out;
}

namespace detail {

/// One gate of the flattened circuit. `param` indexes theta; `input` indexes
/// the embedded feature vector; -1 when the gate carries neither.
struct Gate {
    enum class Kind { H, Ry, Cnot };
    Kind kind;
    std::size_t q0;
    std::size_t q1;
    double angle;
    long param;
    long input;
};

inline std::vector<Gate> build_gates(const CircuitSpec &spec, std::span<const double> features) {
    std::vector<Gate> gates;
    if (spec.embedding == Embedding::Angle) {
        check_angle_features(spec.n_qubits, features);
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            gates.push_back({Gate::Kind::H, q, 0, 0.0, -1, -1});
        }
        for (std::size_t i = 0; i < features.size(); ++i) {
            gates.push_back({Gate::Kind::Ry, i, 0, embedding_angle(features[i]), -1,
                             static_cast<long>(i)});
        }
    }
    for (std::size_t l = 0; l < spec.n_layers; ++l) {
        for (std::size_t q = 0; q + 1 < spec.n_qubits; ++q) {
            gates.push_back({Gate::Kind::Cnot, q, q + 1, 0.0, -1, -1});
        }
        for (std::size_t q = 0; q < spec.n_qubits; ++q) {
            const std::size_t p = spec.index(l, q);
            gates.push_back({Gate::Kind::Ry, q, 0, remap_weight(spec.theta[p]),
                             static_cast<long>(p), -1});
        }
    }
    return gates;
}

inline StateVector initial_state(const CircuitSpec &spec, std::span<const double> features) {
    if (spec.embedding == Embedding::Amplitude) {
        StateVector s = amplitude_embed(features);
        if (s.n_qubits() != spec.n_qubits) {
            throw DimensionError(std::to_string(features.size()) +
                                 " amplitude features need " +
                                 std::to_string(s.n_qubits()) + " qubits, circuit has " +
                                 std::to_string(spec.n_qubits));
        }
        return s;
    }
    return StateVector(spec.n_qubits);
}

inline void apply_gate(StateVector &s, const Gate &g, bool inverse = false) {
    switch (g.kind) {
    case Gate::Kind::H:
        s.apply_hadamard(g.q0);
        break;
    case Gate::Kind::Ry:
        s.apply_ry(g.q0, inverse ? -g.angle : g.angle);
        break;
    case Gate::Kind::Cnot:
        s.apply_cnot(g.q0, g.q1);
        break;
    }
}

inline StateVector run(const CircuitSpec &spec, std::span<const double> features,
                       const std::vector<Gate> &gates) {
    StateVector s = initial_state(spec, features);
    for (const auto &g : gates) {
        apply_gate(s, g);
    }
    return s;
}

/// Diagonal of H = sum_k upstream_k Z_k in the computational basis.
inline std::vector<double> weighted_z_diagonal(std::size_t n_qubits,
                                               std::span<const double> upstream) {
    std::vector<double> diag(std::size_t{1} << n_qubits, 0.0);
    for (std::size_t i = 0; i < diag.size(); ++i) {
        double h = 0.0;
        for (std::size_t q = 0; q < n_qubits; ++q) {
            const bool one = ((i >> (n_qubits - 1 - q)) & 1U) != 0;
            h += one ? -upstream[q] : upstream[q];
        }
        diag[i] = h;
    }
    return diag;
}

inline double weighted_expectation(const StateVector &s, std::span<const double> diag) {
    double acc = 0.0;
    const auto amps = s.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        acc += diag[i] * std::norm(amps[i]);
    }
    return acc;
}

/// Chain rule from the embedded (padded, normalized) amplitude vector back to
/// the raw features: d psi / d x = (I - psi psi^T) / ||x||.
inline std::vector<double> amplitude_input_gradient(std::span<const double> features,
                                                    std::span<const double> d_psi) {
    double norm = 0.0;
    const auto psi = normalized_padded(features, &norm);
    double dot = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        dot += psi[i] * d_psi[i];
    }
    std::vector<double> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        out[i] = (d_psi[i] - psi[i] * dot) / norm;
    }
    return out;
}

inline void check_upstream(const CircuitSpec &spec, std::span<const double> upstream) {
    if (upstream.size() != spec.n_qubits) {
        throw DimensionError("upstream has " + std::to_string(upstream.size()) +
                             " entries, circuit measures " + std::to_string(spec.n_qubits) +
                             " wires");
    }
}

/// Reverse accumulation. Walks the gate list backwards keeping
/// psi_j = U_j...U_1|psi_0> and lambda_j = U_{j+1}^dag...U_G^dag H |psi>.
inline CircuitGradient adjoint_gradients(const CircuitSpec &spec,
                                         std::span<const double> features,
                                         std::span<const double> upstream) {
    const auto gates = build_gates(spec, features);
    StateVector psi = run(spec, features, gates);
    const auto diag = weighted_z_diagonal(spec.n_qubits, upstream);

    StateVector lambda = psi;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        lambda[i] *= diag[i];
    }

    CircuitGradient grad;
    grad.d_theta.assign(spec.parameter_count(), 0.0);
    grad.d_input.assign(features.size(), 0.0);

    StateVector mu = psi;
    for (std::size_t k = gates.size(); k-- > 0;) {
        const Gate &g = gates[k];
        if (g.kind == Gate::Kind::Ry && (g.param >= 0 || g.input >= 0)) {
            // dL/da = 2 Re <lambda| (-i/2 Y) |psi_k>
            mu = psi;
            mu.apply_ry_generator(g.q0);
            const double d_angle = 2.0 * inner_product(lambda.amplitudes(), mu.amplitudes()).real();
            if (g.param >= 0) {
                const auto p = static_cast<std::size_t>(g.param);
                grad.d_theta[p] = d_angle * remap_weight_derivative(spec.theta[p]);
            } else {
                grad.d_input[static_cast<std::size_t>(g.input)] = d_angle * std::numbers::pi;
            }
        }
        apply_gate(psi, g, /*inverse=*/true);
        apply_gate(lambda, g, /*inverse=*/true);
    }

    if (spec.embedding == Embedding::Amplitude) {
        // lambda is now U^dag H U |psi_0>; the state is real, so
        // dL/d psi_0 = 2 Re(lambda).
        std::vector<double> d_psi(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            d_psi[i] = 2.0 * lambda[i].real();
        }
        grad.d_input = amplitude_input_gradient(features, d_psi);
    }
    return grad;
}

inline CircuitGradient parameter_shift_gradients(const CircuitSpec &spec,
                                                 std::span<const double> features,
                                                 std::span<const double> upstream) {
    auto gates = build_gates(spec, features);
    const auto diag = weighted_z_diagonal(spec.n_qubits, upstream);
    const double shift = 0.5 * std::numbers::pi;

    CircuitGradient grad;
    grad.d_theta.assign(spec.parameter_count(), 0.0);
    grad.d_input.assign(features.size(), 0.0);

    for (auto &g : gates) {
        if (g.kind != Gate::Kind::Ry || (g.param < 0 && g.input < 0)) {
            continue;
        }
        const double a = g.angle;
        g.angle = a + shift;
        const double plus = weighted_expectation(run(spec, features, gates), diag);
        g.angle = a - shift;
        const double minus = weighted_expectation(run(spec, features, gates), diag);
        g.angle = a;
        const double d_angle = 0.5 * (plus - minus);
        if (g.param >= 0) {
            const auto p = static_cast<std::size_t>(g.param);
            grad.d_theta[p] = d_angle * remap_weight_derivative(spec.theta[p]);
        } else {
            grad.d_input[static_cast<std::size_t>(g.input)] = d_angle * std::numbers::pi;
        }
    }

    if (spec.embedding == Embedding::Amplitude) {
        // No rotation carries the amplitude features, so there is nothing to
        // shift; the input gradient comes from the back-propagated state.
        grad.d_input = adjoint_gradients(spec, features, upstream).d_input;
    }
    return grad;
}

} // namespace detail

/// init -> embedding -> entangling layers -> <Z> on every wire.
inline ExpectationVector circuit_forward(const CircuitSpec &spec,
                                         std::span<const double> features) {
    spec.validate();
    return measure_z_all(detail::run(spec, features, detail::build_gates(spec, features)));
}

/// Gradient of L = sum_k upstream_k <Z_k> with respect to theta and features.
inline CircuitGradient circuit_gradients(const CircuitSpec &spec,
                                         std::span<const double> features,
                                         std::span<const double> upstream,
                                         GradientBackend backend = GradientBackend::Adjoint) {
    spec.validate();
    detail::check_upstream(spec, upstream);
    switch (backend) {
    case GradientBackend::Adjoint:
        return detail::adjoint_gradients(spec, features, upstream);
    case GradientBackend::ParameterShift:
        return detail::parameter_shift_gradients(spec, features, upstream);
    case GradientBackend::Checked:
        break;
    }
    auto adj = detail::adjoint_gradients(spec, features, upstream);
    const auto ps = detail::parameter_shift_gradients(spec, features, upstream);
    auto compare = [](const std::vector<double> &a, const std::vector<double> &b,
                      const char *what) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (std::abs(a[i] - b[i]) > kBackendTolerance) {
                throw ConsistencyError(std::string("gradient backends disagree on ") +
                                       what + "[" + std::to_string(i) +
                                       "]: adjoint " + std::to_string(a[i]) +
                                       " vs parameter-shift " + std::to_string(b[i]));
            }
        }
    };
    compare(adj.d_theta, ps.d_theta, "d_theta");
    compare(adj.d_input, ps.d_input, "d_input");
    return adj;
}

inline std::string_view to_string(GradientBackend b) {
    switch (b) {
    case GradientBackend::Adjoint:
        return "adjoint";
    case GradientBackend::ParameterShift:
        return "parameter-shift";
    case GradientBackend::Checked:
        return "checked";
    }
    return "adjoint";
}

inline GradientBackend backend_from_string(std::string_view s) {
    if (s == "adjoint") {
        return GradientBackend::Adjoint;
    }
    if (s == "parameter-shift") {
        return GradientBackend::ParameterShift;
    }
    if (s == "checked") {
        return GradientBackend::Checked;
    }
    throw DomainError("unknown gradient backend '" + std::string(s) + "'");
}

} // namespace hqb::quantum
