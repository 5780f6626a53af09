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
 * Dense feed-forward networks with reverse-mode gradients.
 *
 * Batches are column matrices: a batch of B samples of width d is a d x B
 * Eigen::MatrixXd, one sample per column.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hqb::neural {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Activation { None, ReLU, Sigmoid };

inline std::string_view to_string(Activation a) {
    switch (a) {
    case Activation::ReLU:
        return "relu";
    case Activation::Sigmoid:
        return "sigmoid";
    case Activation::None:
        break;
    }
    return "none";
}

inline Activation activation_from_string(std::string_view s) {
    if (s == "relu") {
        return Activation::ReLU;
    }
    if (s == "sigmoid") {
        return Activation::Sigmoid;
    }
    if (s == "none") {
        return Activation::None;
    }
    throw DomainError("unknown activation '" + std::string(s) + "'");
}

/// Overflow-free logistic function.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Vector relu(const Vector &x) { return x.cwiseMax(0.0); }

inline Vector sigmoid(const Vector &x) {
    return x.unaryExpr([](double v) { return sigmoid(v); });
}

inline void activate(Matrix &z, Activation a) {
    switch (a) {
    case Activation::ReLU:
        z = z.cwiseMax(0.0);
        break;
    case Activation::Sigmoid:
        z = z.unaryExpr([](double v) { return sigmoid(v); });
        break;
    case Activation::None:
        break;
    }
}

/// Elementwise derivative of the activation given pre- and post-activation
/// values. ReLU'(0) is taken as 0.
inline Matrix activation_derivative(const Matrix &pre, const Matrix &post, Activation a) {
    switch (a) {
    case Activation::ReLU:
        return pre.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
    case Activation::Sigmoid:
        return post.array() * (1.0 - post.array());
    case Activation::None:
        break;
    }
    return Matrix::Ones(pre.rows(), pre.cols());
}

struct DenseLayer {
    Matrix weights; ///< out_dim x in_dim
    Vector biases;  ///< out_dim
    Activation activation = Activation::None;

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
        : weights(Matrix::Zero(static_cast<Eigen::Index>(out_dim),
                               static_cast<Eigen::Index>(in_dim))),
          biases(Vector::Zero(static_cast<Eigen::Index>(out_dim))), activation(act) {
        if (in_dim == 0 || out_dim == 0) {
            throw DimensionError("dense layer dimensions must be positive");
        }
    }

    [[nodiscard]] std::size_t in_dim() const { return static_cast<std::size_t>(weights.cols()); }
    [[nodiscard]] std::size_t out_dim() const { return static_cast<std::size_t>(weights.rows()); }
    [[nodiscard]] std::size_t parameter_count() const {
        return static_cast<std::size_t>(weights.size() + biases.size());
    }

    void validate() const {
        if (biases.size() != weights.rows()) {
            throw DimensionError("bias length " + std::to_string(biases.size()) +
                                 " does not match " + std::to_string(weights.rows()) +
                                 " output rows");
        }
    }
};

class Mlp {
  public:
    Mlp() = default;

    explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i].validate();
            if (i > 0 && layers_[i].in_dim() != layers_[i - 1].out_dim()) {
                throw DimensionError("layer " + std::to_string(i) + " expects " +
                                     std::to_string(layers_[i].in_dim()) +
                                     " inputs but layer " + std::to_string(i - 1) +
                                     " produces " + std::to_string(layers_[i - 1].out_dim()));
            }
        }
    }

    /// Zero-initialized network with layer widths `dims` and one activation
    /// per layer.
    static Mlp from_dims(std::span<const std::size_t> dims,
                         std::span<const Activation> activations) {
        if (dims.size() < 2 || activations.size() != dims.size() - 1) {
            throw DimensionError("need n+1 widths and n activations");
        }
        std::vector<DenseLayer> layers;
        for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
            layers.emplace_back(dims[i], dims[i + 1], activations[i]);
        }
        return Mlp(std::move(layers));
    }

    [[nodiscard]] const std::vector<DenseLayer> &layers() const noexcept { return layers_; }
    [[nodiscard]] std::vector<DenseLayer> &layers() noexcept { return layers_; }
    [[nodiscard]] bool empty() const noexcept { return layers_.empty(); }

    [[nodiscard]] std::size_t in_dim() const { return layers_.front().in_dim(); }
    [[nodiscard]] std::size_t out_dim() const { return layers_.back().out_dim(); }

    [[nodiscard]] std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto &l : layers_) {
            n += l.parameter_count();
        }
        return n;
    }

    /// Views in declared order: W0, b0, W1, b1, ...
    [[nodiscard]] std::vector<std::span<double>> parameters() {
        std::vector<std::span<double>> out;
        for (auto &l : layers_) {
            out.emplace_back(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            out.emplace_back(l.biases.data(), static_cast<std::size_t>(l.biases.size()));
        }
        return out;
    }

    [[nodiscard]] std::vector<std::span<const double>> parameters() const {
        std::vector<std::span<const double>> out;
        for (const auto &l : layers_) {
            out.emplace_back(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
            out.emplace_back(l.biases.data(), static_cast<std::size_t>(l.biases.size()));
        }
        return out;
    }

    /// Weights and biases ~ U[-1/sqrt(in_dim), 1/sqrt(in_dim)].
    void initialize(Rng &rng) {
        for (auto &l : layers_) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim()));
            for (Eigen::Index i = 0; i < l.weights.size(); ++i) {
                l.weights.data()[i] = rng.uniform(-bound, bound);
            }
            for (Eigen::Index i = 0; i < l.biases.size(); ++i) {
                l.biases[i] = rng.uniform(-bound, bound);
            }
        }
    }

  private:
    std::vector<DenseLayer> layers_;
};

/// Per-layer activation cache of one forward call.
struct Tape {
    std::vector<Matrix> inputs; ///< input to each layer
    std::vector<Matrix> pre;    ///< affine output before activation
    std::vector<Matrix> post;   ///< activation output
};

struct ForwardResult {
    Matrix output;
    Tape tape;
};

inline void check_input(const Mlp &net, Eigen::Index rows) {
    if (net.empty()) {
        throw DimensionError("network has no layers");
    }
    if (static_cast<std::size_t>(rows) != net.in_dim()) {
        throw DimensionError("input width " + std::to_string(rows) +
                             " does not match network input " +
                             std::to_string(net.in_dim()));
    }
}

inline ForwardResult mlp_forward(const Mlp &net, const Matrix &batch) {
    check_input(net, batch.rows());
    ForwardResult r;
    Matrix a = batch;
    for (const auto &l : net.layers()) {
        r.tape.inputs.push_back(a);
        Matrix z = l.weights * a;
        z.colwise() += l.biases;
        r.tape.pre.push_back(z);
        activate(z, l.activation);
        r.tape.post.push_back(z);
        a = std::move(z);
    }
    r.output = std::move(a);
    return r;
}

/// Forward pass without a tape.
inline Matrix mlp_predict(const Mlp &net, const Matrix &batch) {
    check_input(net, batch.rows());
    Matrix a = batch;
    for (const auto &l : net.layers()) {
        Matrix z = l.weights * a;
        z.colwise() += l.biases;
        activate(z, l.activation);
        a = std::move(z);
    }
    return a;
}

inline Vector mlp_predict(const Mlp &net, const Vector &x) {
    return mlp_predict(net, Matrix(x));
}

struct LayerGradient {
    Matrix weights;
    Vector biases;
};

struct MlpGradient {
    std::vector<LayerGradient> layers;
    Matrix input; ///< d loss / d input, same shape as the forward batch

    /// Same order as Mlp::parameters().
    [[nodiscard]] std::vector<std::span<const double>> views() const {
        std::vector<std::span<const double>> out;
        for (const auto &g : layers) {
            out.emplace_back(g.weights.data(), static_cast<std::size_t>(g.weights.size()));
            out.emplace_back(g.biases.data(), static_cast<std::size_t>(g.biases.size()));
        }
        return out;
    }
};

/// Gradients summed over the batch columns. `upstream` is d loss / d output.
inline MlpGradient mlp_backward(const Mlp &net, const Tape &tape, const Matrix &upstream) {
    const auto &layers = net.layers();
    if (tape.inputs.size() != layers.size() || tape.pre.size() != layers.size()) {
        throw DimensionError("tape has " + std::to_string(tape.inputs.size()) +
                             " layers, network has " + std::to_string(layers.size()));
    }
    if (upstream.rows() != tape.post.back().rows() ||
        upstream.cols() != tape.post.back().cols()) {
        throw DimensionError("upstream shape does not match the recorded output");
    }
    MlpGradient g;
    g.layers.resize(layers.size());
    Matrix delta = upstream;
    for (std::size_t k = layers.size(); k-- > 0;) {
        const auto &l = layers[k];
        if (tape.inputs[k].rows() != l.weights.cols()) {
            throw DimensionError("stale tape: layer " + std::to_string(k) + " width changed");
        }
        delta.array() *= activation_derivative(tape.pre[k], tape.post[k], l.activation).array();
        g.layers[k].weights = delta * tape.inputs[k].transpose();
        g.layers[k].biases = delta.rowwise().sum();
        delta = l.weights.transpose() * delta;
    }
    g.input = std::move(delta);
    return g;
}

} // namespace hqb::neural
