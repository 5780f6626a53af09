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
// Independent reference implementations shared by the unit and acceptance
// tests: dense-matrix circuit simulation, finite differences, random specs.
#pragma once

#include "hqb/neural/mlp.hpp"
#include "hqb/quantum/circuit.hpp"
#include "hqb/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

namespace hqb::test {

using Dense = Eigen::MatrixXd;

inline Dense kron(const Dense &a, const Dense &b) {
    Dense out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// `g` acting on wire q of n, qubit 0 leftmost in the tensor product.
inline Dense on_wire(const Dense &g, std::size_t q, std::size_t n) {
    Dense out = Dense::Identity(1, 1);
    for (std::size_t w = 0; w < n; ++w) {
        out = kron(out, w == q ? g : Dense(Dense::Identity(2, 2)));
    }
    return out;
}

inline Dense hadamard() {
    Dense h(2, 2);
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

inline Dense ry(double a) {
    Dense r(2, 2);
    r << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
    return r;
}

/// CNOT as |0><0| x I + |1><1| x X on the chosen wires.
inline Dense cnot(std::size_t c, std::size_t t, std::size_t n) {
    Dense p0 = Dense::Zero(2, 2);
    Dense p1 = Dense::Zero(2, 2);
    Dense x(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    x << 0, 1, 1, 0;
    Dense a = Dense::Identity(1, 1);
    Dense b = Dense::Identity(1, 1);
    for (std::size_t w = 0; w < n; ++w) {
        const Dense id = Dense::Identity(2, 2);
        a = kron(a, w == c ? p0 : id);
        b = kron(b, w == c ? p1 : (w == t ? x : id));
    }
    return a + b;
}

inline Dense pauli_z_on(std::size_t q, std::size_t n) {
    Dense z = Dense::Zero(2, 2);
    z(0, 0) = 1;
    z(1, 1) = -1;
    return on_wire(z, q, n);
}

/// Full circuit unitary after the embedding: ladder then Ry(remap) per layer.
inline Dense layers_unitary(const quantum::CircuitSpec &spec) {
    const std::size_t n = spec.n_qubits;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Dense u = Dense::Identity(dim, dim);
    for (std::size_t l = 0; l < spec.n_layers; ++l) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            u = cnot(i, i + 1, n) * u;
        }
        for (std::size_t q = 0; q < n; ++q) {
            const double phi = 2.0 * std::atan(2.0 * spec.theta[l * n + q]);
            u = on_wire(ry(phi), q, n) * u;
        }
    }
    return u;
}

inline Eigen::VectorXd dense_embedded_state(const quantum::CircuitSpec &spec,
                                            const std::vector<double> &features) {
    const std::size_t n = spec.n_qubits;
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(dim);
    if (spec.embedding == quantum::Embedding::Amplitude) {
        for (std::size_t i = 0; i < features.size(); ++i) {
            psi[static_cast<Eigen::Index>(i)] = features[i];
        }
        return psi / psi.norm();
    }
    psi[0] = 1.0;
    for (std::size_t q = 0; q < n; ++q) {
        psi = on_wire(hadamard(), q, n) * psi;
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        psi = on_wire(ry(features[i] * std::numbers::pi - std::numbers::pi / 2), i, n) * psi;
    }
    return psi;
}

inline std::vector<double> dense_expectations(const quantum::CircuitSpec &spec,
                                              const std::vector<double> &features) {
    const Eigen::VectorXd psi = layers_unitary(spec) * dense_embedded_state(spec, features);
    std::vector<double> out;
    for (std::size_t q = 0; q < spec.n_qubits; ++q) {
        out.push_back(psi.dot(pauli_z_on(q, spec.n_qubits) * psi));
    }
    return out;
}

inline double weighted_loss(const quantum::CircuitSpec &spec, const std::vector<double> &features,
                            const std::vector<double> &upstream) {
    const auto e = quantum::circuit_forward(spec, features);
    double l = 0.0;
    for (std::size_t k = 0; k < upstream.size(); ++k) {
        l += upstream[k] * e.values[k];
    }
    return l;
}

/// Central differences of sum_k upstream_k <Z_k>.
inline quantum::CircuitGradient fd_circuit_gradients(quantum::CircuitSpec spec,
                                                     std::vector<double> features,
                                                     const std::vector<double> &upstream,
                                                     double h = 1e-5) {
    quantum::CircuitGradient g;
    for (auto &t : spec.theta) {
        const double t0 = t;
        t = t0 + h;
        const double lp = weighted_loss(spec, features, upstream);
        t = t0 - h;
        const double lm = weighted_loss(spec, features, upstream);
        t = t0;
        g.d_theta.push_back((lp - lm) / (2 * h));
    }
    for (auto &x : features) {
        const double x0 = x;
        x = x0 + h;
        const double lp = weighted_loss(spec, features, upstream);
        x = x0 - h;
        const double lm = weighted_loss(spec, features, upstream);
        x = x0;
        g.d_input.push_back((lp - lm) / (2 * h));
    }
    return g;
}

struct RandomCircuitCase {
    quantum::CircuitSpec spec;
    std::vector<double> features;
    std::vector<double> upstream;
};

/// n in [1, max_qubits], layers in [0, max_layers]. Angle features stay
/// inside (0.05, 0.95) so finite differences never leave the domain.
inline RandomCircuitCase random_circuit(Rng &rng, std::size_t max_qubits, std::size_t max_layers,
                                        quantum::Embedding emb) {
    const std::size_t n = 1 + rng.below(max_qubits);
    const std::size_t layers = rng.below(max_layers + 1);
    RandomCircuitCase c{quantum::CircuitSpec(n, layers, emb), {}, {}};
    for (auto &t : c.spec.theta) {
        t = rng.uniform(-1.0, 1.0);
    }
    if (emb == quantum::Embedding::Angle) {
        const std::size_t nf = 1 + rng.below(n);
        for (std::size_t i = 0; i < nf; ++i) {
            c.features.push_back(rng.uniform(0.05, 0.95));
        }
    } else {
        const std::size_t dim = std::size_t{1} << n;
        const std::size_t nf = dim / 2 + 1 + rng.below(dim / 2);
        for (std::size_t i = 0; i < nf; ++i) {
            c.features.push_back(rng.uniform(0.1, 1.0));
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        c.upstream.push_back(rng.uniform(-1.0, 1.0));
    }
    return c;
}

/// Random chain of dense layers (1..max_layers layers, widths 1..max_width)
/// with mixed activations and random parameters.
inline neural::Mlp random_mlp(Rng &rng, std::size_t max_layers, std::size_t max_width) {
    const std::size_t n_layers = 1 + rng.below(max_layers);
    std::vector<std::size_t> dims{1 + rng.below(max_width)};
    std::vector<neural::Activation> acts;
    for (std::size_t i = 0; i < n_layers; ++i) {
        dims.push_back(1 + rng.below(max_width));
        acts.push_back(static_cast<neural::Activation>(rng.below(3)));
    }
    auto net = neural::Mlp::from_dims(dims, acts);
    net.initialize(rng);
    return net;
}

/// Relative error with an absolute floor for gradients near zero.
inline double rel_err(double a, double b, double floor = 1e-3) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

} // namespace hqb::test
