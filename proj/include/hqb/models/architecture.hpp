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
 * Layer-width rules shared by the autoencoder and the classical baselines.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/neural/mlp.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hqb::models {

/// Encoder widths: halve (floor) while the result stays above n_classes,
/// then finish with exactly n_classes. (784, 10) -> 784 392 196 98 49 24 12 10.
inline std::vector<std::size_t> build_encoder_dims(std::size_t input_dim, std::size_t n_classes) {
    if (n_classes < 1 || input_dim < n_classes) {
        throw DomainError("encoder needs input_dim >= n_classes >= 1, got " +
                          std::to_string(input_dim) + " and " + std::to_string(n_classes));
    }
    std::vector<std::size_t> dims{input_dim};
    std::size_t prev = input_dim;
    while (prev / 2 > n_classes) {
        prev /= 2;
        dims.push_back(prev);
    }
    dims.push_back(n_classes);
    return dims;
}

inline std::vector<std::size_t> build_decoder_dims(std::size_t input_dim, std::size_t n_classes) {
    auto dims = build_encoder_dims(input_dim, n_classes);
    std::reverse(dims.begin(), dims.end());
    return dims;
}

/// ReLU on every layer but the last, which is Sigmoid.
inline std::vector<neural::Activation> halving_activations(std::size_t n_layers) {
    std::vector<neural::Activation> acts(n_layers, neural::Activation::ReLU);
    acts.back() = neural::Activation::Sigmoid;
    return acts;
}

inline neural::Mlp make_halving_network(std::span<const std::size_t> dims) {
    const auto acts = halving_activations(dims.size() - 1);
    return neural::Mlp::from_dims(dims, acts);
}

/// Weights plus biases of a chain of dense layers with widths `dims`.
inline std::size_t dense_parameter_count(std::span<const std::size_t> dims) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        n += dims[i] * dims[i + 1] + dims[i + 1];
    }
    return n;
}

inline std::size_t autoencoder_parameter_count(std::size_t input_dim, std::size_t n_classes) {
    const auto enc = build_encoder_dims(input_dim, n_classes);
    const auto dec = build_decoder_dims(input_dim, n_classes);
    return dense_parameter_count(enc) + dense_parameter_count(dec);
}

/// Hidden width of a one-hidden-layer network whose parameter count matches
/// `n_total`, rounded up and at least one:
///   max(ceil((n_total - n_out) / (n_in + n_out + 1)), 1)
inline std::size_t matched_hidden_width(std::size_t n_total, std::size_t n_in, std::size_t n_out) {
    if (n_total <= n_out) {
        return 1;
    }
    const std::size_t num = n_total - n_out;
    const std::size_t den = n_in + n_out + 1;
    return std::max<std::size_t>((num + den - 1) / den, 1);
}

struct Autoencoder {
    neural::Mlp encoder;
    neural::Mlp decoder;

    static Autoencoder build(std::size_t input_dim, std::size_t n_classes) {
        const auto enc = build_encoder_dims(input_dim, n_classes);
        const auto dec = build_decoder_dims(input_dim, n_classes);
        return {make_halving_network(enc), make_halving_network(dec)};
    }

    [[nodiscard]] std::size_t parameter_count() const {
        return encoder.parameter_count() + decoder.parameter_count();
    }
};

} // namespace hqb::models
