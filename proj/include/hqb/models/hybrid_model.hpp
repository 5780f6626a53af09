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
 * The six classifier architectures behind one forward/backward interface.
 *
 *   ae-vqc         frozen encoder -> angle VQC (n_classes wires)
 *   vqc-amplitude  amplitude VQC on the raw input, first n_classes wires read
 *   dqc            dense+sigmoid -> angle VQC -> dense
 *   sequent        dense+sigmoid -> dense surrogate (classical stage)
 *                  dense+sigmoid (frozen) -> angle VQC (quantum stage)
 *   nn             input -> hidden(ReLU) -> n_classes
 *   ae-nn          frozen encoder -> hidden(ReLU) -> n_classes
 *
 * Trainable parameters depend on the current stage; the frozen encoder is
 * never trainable here (it is trained separately as an autoencoder).
 */
#pragma once

#include "hqb/checksum.hpp"
#include "hqb/error.hpp"
#include "hqb/models/architecture.hpp"
#include "hqb/neural/mlp.hpp"
#include "hqb/neural/optimizer.hpp"
#include "hqb/quantum/circuit.hpp"
#include "hqb/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::models {

using neural::Matrix;
using neural::Vector;

enum class ModelKind { AeVqc, VqcAmplitude, Dqc, Sequent, NnUncompressed, AeNn };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::AeVqc,   ModelKind::VqcAmplitude,
                                               ModelKind::Dqc,     ModelKind::Sequent,
                                               ModelKind::AeNn,    ModelKind::NnUncompressed};

inline std::string_view to_string(ModelKind k) {
    switch (k) {
    case ModelKind::AeVqc:
        return "ae-vqc";
    case ModelKind::VqcAmplitude:
        return "vqc-amplitude";
    case ModelKind::Dqc:
        return "dqc";
    case ModelKind::Sequent:
        return "sequent";
    case ModelKind::NnUncompressed:
        return "nn";
    case ModelKind::AeNn:
        return "ae-nn";
    }
    return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
    for (const auto k : kAllModelKinds) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw DomainError("unknown model kind '" + std::string(s) + "'");
}

inline bool uses_encoder(ModelKind k) { return k == ModelKind::AeVqc || k == ModelKind::AeNn; }
inline bool is_two_stage(ModelKind k) { return k == ModelKind::Dqc || k == ModelKind::Sequent; }

enum class Stage { Autoencoder, Classical, Quantum };

inline std::string_view to_string(Stage s) {
    switch (s) {
    case Stage::Autoencoder:
        return "autoencoder";
    case Stage::Classical:
        return "classical";
    case Stage::Quantum:
        return "quantum";
    }
    return "?";
}

inline Stage stage_from_string(std::string_view s) {
    if (s == "autoencoder") {
        return Stage::Autoencoder;
    }
    if (s == "classical") {
        return Stage::Classical;
    }
    if (s == "quantum") {
        return Stage::Quantum;
    }
    throw DomainError("unknown stage '" + std::string(s) + "'");
}

/// The stage a freshly built model trains in first.
inline Stage initial_stage(ModelKind k) {
    switch (k) {
    case ModelKind::AeVqc:
    case ModelKind::VqcAmplitude:
        return Stage::Quantum;
    default:
        return Stage::Classical;
    }
}

struct HybridModel {
    ModelKind kind = ModelKind::NnUncompressed;
    std::size_t input_dim = 0;
    std::size_t n_classes = 0;
    std::size_t n_layers = 6;
    std::uint64_t seed = 0;

    std::optional<neural::Mlp> encoder;   ///< frozen, ae-vqc / ae-nn
    std::optional<neural::Mlp> pre;       ///< input -> n_classes + sigmoid, dqc / sequent
    std::optional<neural::Mlp> surrogate; ///< sequent classical classifier
    std::optional<neural::Mlp> post;      ///< dqc post-processing
    std::optional<neural::Mlp> head;      ///< nn / ae-nn
    std::optional<quantum::CircuitSpec> circuit;

    Stage stage = Stage::Classical;
    std::size_t n_total = 0; ///< parameter budget that sized `head`
    quantum::GradientBackend backend = quantum::GradientBackend::Adjoint;

    /// Sequent swaps its surrogate for the VQC when entering the quantum stage.
    [[nodiscard]] bool quantum_classifier_active() const {
        return kind != ModelKind::Sequent || stage == Stage::Quantum;
    }
};

struct ModelGradient {
    std::vector<std::vector<double>> arrays;

    [[nodiscard]] neural::GradViews views() const {
        neural::GradViews v;
        for (const auto &a : arrays) {
            v.emplace_back(a);
        }
        return v;
    }
};

namespace detail {

inline void append_mlp_gradient(ModelGradient &out, const neural::MlpGradient &g) {
    for (const auto view : g.views()) {
        out.arrays.emplace_back(view.begin(), view.end());
    }
}

inline std::span<const double> column(const Matrix &m, Eigen::Index c) {
    return {m.col(c).data(), static_cast<std::size_t>(m.rows())};
}

inline Matrix circuit_batch(const quantum::CircuitSpec &circuit, const Matrix &inputs,
                            std::size_t readout) {
    Matrix out(static_cast<Eigen::Index>(readout), inputs.cols());
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
        const auto e = quantum::circuit_forward(circuit, column(inputs, c));
        for (std::size_t k = 0; k < readout; ++k) {
            out(static_cast<Eigen::Index>(k), c) = e.values[k];
        }
    }
    return out;
}

/// Accumulates theta gradients over the batch and returns input gradients
/// (rows = embedded features).
inline Matrix circuit_backward(const quantum::CircuitSpec &circuit, const Matrix &inputs,
                               const Matrix &d_readout, quantum::GradientBackend backend,
                               std::vector<double> &d_theta) {
    d_theta.assign(circuit.parameter_count(), 0.0);
    Matrix d_inputs(inputs.rows(), inputs.cols());
    std::vector<double> upstream(circuit.n_qubits, 0.0);
    for (Eigen::Index c = 0; c < inputs.cols(); ++c) {
        std::fill(upstream.begin(), upstream.end(), 0.0);
        for (Eigen::Index k = 0; k < d_readout.rows(); ++k) {
            upstream[static_cast<std::size_t>(k)] = d_readout(k, c);
        }
        const auto g = quantum::circuit_gradients(circuit, column(inputs, c), upstream, backend);
        for (std::size_t p = 0; p < d_theta.size(); ++p) {
            d_theta[p] += g.d_theta[p];
        }
        for (std::size_t i = 0; i < g.d_input.size(); ++i) {
            d_inputs(static_cast<Eigen::Index>(i), c) = g.d_input[i];
        }
    }
    return d_inputs;
}

inline void check_width(const HybridModel &m, Eigen::Index rows, std::size_t expected) {
    if (static_cast<std::size_t>(rows) != expected) {
        throw DimensionError(std::string(to_string(m.kind)) + " expects inputs of width " +
                             std::to_string(expected) + ", got " + std::to_string(rows));
    }
}

} // namespace detail

/// Width of the vectors forward_head consumes.
inline std::size_t head_input_dim(const HybridModel &m) {
    return uses_encoder(m.kind) ? m.n_classes : m.input_dim;
}

/// Output of the frozen encoder for encoder-based kinds, the input otherwise.
inline Matrix frozen_features(const HybridModel &m, const Matrix &inputs) {
    detail::check_width(m, inputs.rows(), m.input_dim);
    if (m.encoder) {
        return neural::mlp_predict(*m.encoder, inputs);
    }
    return inputs;
}

/// Logits (n_classes x batch) from frozen features.
inline Matrix forward_head(const HybridModel &m, const Matrix &z) {
    detail::check_width(m, z.rows(), head_input_dim(m));
    switch (m.kind) {
    case ModelKind::AeVqc:
    case ModelKind::VqcAmplitude:
        return detail::circuit_batch(*m.circuit, z, m.n_classes);
    case ModelKind::Dqc: {
        const Matrix a = neural::mlp_predict(*m.pre, z);
        return neural::mlp_predict(*m.post, detail::circuit_batch(*m.circuit, a, m.n_classes));
    }
    case ModelKind::Sequent: {
        const Matrix a = neural::mlp_predict(*m.pre, z);
        if (m.quantum_classifier_active()) {
            return detail::circuit_batch(*m.circuit, a, m.n_classes);
        }
        return neural::mlp_predict(*m.surrogate, a);
    }
    case ModelKind::NnUncompressed:
    case ModelKind::AeNn:
        return neural::mlp_predict(*m.head, z);
    }
    throw DomainError("unreachable model kind");
}

inline Matrix model_forward(const HybridModel &m, const Matrix &inputs) {
    return forward_head(m, frozen_features(m, inputs));
}

inline Vector model_forward(const HybridModel &m, std::span<const double> input) {
    const Eigen::Map<const Vector> x(input.data(), static_cast<Eigen::Index>(input.size()));
    return model_forward(m, Matrix(x)).col(0);
}

/// Gradient of the summed loss over the batch with respect to the parameters
/// trainable in the model's current stage, in trainable_parameters() order.
inline ModelGradient backward_head(const HybridModel &m, const Matrix &z, const Matrix &d_logits) {
    detail::check_width(m, z.rows(), head_input_dim(m));
    if (static_cast<std::size_t>(d_logits.rows()) != m.n_classes || d_logits.cols() != z.cols()) {
        throw DimensionError("logit gradient shape does not match the batch");
    }
    ModelGradient out;
    switch (m.kind) {
    case ModelKind::AeVqc:
    case ModelKind::VqcAmplitude: {
        std::vector<double> d_theta;
        detail::circuit_backward(*m.circuit, z, d_logits, m.backend, d_theta);
        out.arrays.push_back(std::move(d_theta));
        return out;
    }
    case ModelKind::Dqc: {
        auto pre_fwd = neural::mlp_forward(*m.pre, z);
        const Matrix q = detail::circuit_batch(*m.circuit, pre_fwd.output, m.n_classes);
        auto post_fwd = neural::mlp_forward(*m.post, q);
        const auto post_grad = neural::mlp_backward(*m.post, post_fwd.tape, d_logits);
        std::vector<double> d_theta;
        const Matrix d_a = detail::circuit_backward(*m.circuit, pre_fwd.output,
                                                    post_grad.input, m.backend, d_theta);
        if (m.stage == Stage::Quantum) {
            out.arrays.push_back(std::move(d_theta));
            return out;
        }
        detail::append_mlp_gradient(out, neural::mlp_backward(*m.pre, pre_fwd.tape, d_a));
        detail::append_mlp_gradient(out, post_grad);
        return out;
    }
    case ModelKind::Sequent: {
        if (m.stage == Stage::Quantum) {
            const Matrix a = neural::mlp_predict(*m.pre, z);
            std::vector<double> d_theta;
            detail::circuit_backward(*m.circuit, a, d_logits, m.backend, d_theta);
            out.arrays.push_back(std::move(d_theta));
            return out;
        }
        auto pre_fwd = neural::mlp_forward(*m.pre, z);
        auto sur_fwd = neural::mlp_forward(*m.surrogate, pre_fwd.output);
        const auto sur_grad = neural::mlp_backward(*m.surrogate, sur_fwd.tape, d_logits);
        detail::append_mlp_gradient(out, neural::mlp_backward(*m.pre, pre_fwd.tape, sur_grad.input));
        detail::append_mlp_gradient(out, sur_grad);
        return out;
    }
    case ModelKind::NnUncompressed:
    case ModelKind::AeNn: {
        auto fwd = neural::mlp_forward(*m.head, z);
        detail::append_mlp_gradient(out, neural::mlp_backward(*m.head, fwd.tape, d_logits));
        return out;
    }
    }
    throw DomainError("unreachable model kind");
}

/// Mutable views of the parameters trained in `stage`, or none when the
/// kind has no such stage.
inline neural::ParamViews trainable_parameters(HybridModel &m, Stage stage) {
    neural::ParamViews out;
    auto add = [&out](neural::Mlp &net) {
        for (const auto v : net.parameters()) {
            out.push_back(v);
        }
    };
    switch (stage) {
    case Stage::Autoencoder:
        return out;
    case Stage::Quantum:
        if (m.circuit) {
            out.emplace_back(m.circuit->theta);
        }
        return out;
    case Stage::Classical:
        break;
    }
    switch (m.kind) {
    case ModelKind::Dqc:
        add(*m.pre);
        add(*m.post);
        break;
    case ModelKind::Sequent:
        add(*m.pre);
        add(*m.surrogate);
        break;
    case ModelKind::NnUncompressed:
    case ModelKind::AeNn:
        add(*m.head);
        break;
    default:
        break;
    }
    return out;
}

inline neural::ParamViews trainable_parameters(HybridModel &m) {
    return trainable_parameters(m, m.stage);
}

/// Eq.-style count of trainable weights and biases in `stage`. For the
/// autoencoder stage of encoder-based kinds this is encoder + decoder.
inline std::size_t trainable_parameter_count(const HybridModel &m, Stage stage) {
    if (stage == Stage::Autoencoder) {
        return uses_encoder(m.kind) ? autoencoder_parameter_count(m.input_dim, m.n_classes) : 0;
    }
    std::size_t n = 0;
    for (const auto v : trainable_parameters(const_cast<HybridModel &>(m), stage)) {
        n += v.size();
    }
    return n;
}

/// SHA-256 over every classical array (including the frozen encoder).
inline std::string classical_checksum(const HybridModel &m) {
    Sha256 h;
    for (const auto *net : {&m.encoder, &m.pre, &m.surrogate, &m.post, &m.head}) {
        if (*net) {
            for (const auto v : (*net)->parameters()) {
                h.update_values(v);
            }
        }
    }
    return h.finish();
}

inline std::string quantum_checksum(const HybridModel &m) {
    Sha256 h;
    if (m.circuit) {
        h.update_values(std::span<const double>(m.circuit->theta));
    }
    return h.finish();
}

/// Moves a two-stage model into its quantum stage (classical weights frozen).
inline void enter_quantum_stage(HybridModel &m) {
    if (!m.circuit) {
        throw DomainError(std::string(to_string(m.kind)) + " has no quantum stage");
    }
    m.stage = Stage::Quantum;
}

inline void initialize_circuit(quantum::CircuitSpec &c, Rng &rng) {
    for (double &t : c.theta) {
        t = rng.uniform(-0.1, 0.1);
    }
}

/// Builds and randomly initializes a model. `trained_encoder` is required
/// for ae-vqc and ae-nn and copied in frozen.
inline HybridModel build_model(ModelKind kind, std::size_t input_dim, std::size_t n_classes,
                               std::size_t n_layers = 6, const neural::Mlp *trained_encoder = nullptr,
                               std::uint64_t seed = 0) {
    using neural::Activation;
    if (input_dim == 0 || n_classes == 0) {
        throw DomainError("model dimensions must be positive");
    }
    HybridModel m;
    m.kind = kind;
    m.input_dim = input_dim;
    m.n_classes = n_classes;
    m.n_layers = n_layers;
    m.seed = seed;
    m.stage = initial_stage(kind);

    if (uses_encoder(kind)) {
        if (trained_encoder == nullptr) {
            throw DomainError(std::string(to_string(kind)) + " requires a trained encoder");
        }
        if (trained_encoder->in_dim() != input_dim || trained_encoder->out_dim() != n_classes) {
            throw DimensionError("encoder maps " + std::to_string(trained_encoder->in_dim()) +
                                 " -> " + std::to_string(trained_encoder->out_dim()) +
                                 ", model needs " + std::to_string(input_dim) + " -> " +
                                 std::to_string(n_classes));
        }
        m.encoder = *trained_encoder;
    }

    Rng classical = Rng::derive(seed, "classical-init");
    Rng quantum_rng = Rng::derive(seed, "quantum-init");
    auto dense = [&classical](std::size_t in, std::size_t out, Activation act) {
        neural::Mlp net({neural::DenseLayer(in, out, act)});
        net.initialize(classical);
        return net;
    };
    auto angle_circuit = [&] {
        quantum::CircuitSpec c(n_classes, n_layers, quantum::Embedding::Angle);
        initialize_circuit(c, quantum_rng);
        return c;
    };

    switch (kind) {
    case ModelKind::AeVqc:
        m.circuit = angle_circuit();
        break;
    case ModelKind::VqcAmplitude: {
        const std::size_t q = quantum::amplitude_qubits(input_dim);
        if (q < n_classes) {
            throw DomainError("amplitude VQC has " + std::to_string(q) + " wires for " +
                              std::to_string(n_classes) + " classes");
        }
        quantum::CircuitSpec c(q, n_layers, quantum::Embedding::Amplitude);
        initialize_circuit(c, quantum_rng);
        m.circuit = std::move(c);
        break;
    }
    case ModelKind::Dqc:
        m.pre = dense(input_dim, n_classes, Activation::Sigmoid);
        m.circuit = angle_circuit();
        m.post = dense(n_classes, n_classes, Activation::None);
        break;
    case ModelKind::Sequent:
        m.pre = dense(input_dim, n_classes, Activation::Sigmoid);
        m.surrogate = dense(n_classes, n_classes, Activation::None);
        m.circuit = angle_circuit();
        break;
    case ModelKind::NnUncompressed:
    case ModelKind::AeNn: {
        const bool compressed = kind == ModelKind::AeNn;
        const std::size_t n_in = compressed ? n_classes : input_dim;
        m.n_total = compressed
                        ? n_layers * n_classes
                        : autoencoder_parameter_count(input_dim, n_classes) + n_layers * n_classes;
        const std::size_t hidden = matched_hidden_width(m.n_total, n_in, n_classes);
        const std::size_t dims[] = {n_in, hidden, n_classes};
        const Activation acts[] = {Activation::ReLU, Activation::None};
        m.head = neural::Mlp::from_dims(dims, acts);
        m.head->initialize(classical);
        break;
    }
    }
    return m;
}

} // namespace hqb::models
