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
 * Training configurations and the per-dataset defaults found by grid search.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/models/hybrid_model.hpp"
#include "hqb/neural/optimizer.hpp"
#include "hqb/quantum/circuit.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

namespace hqb::experiment {

using models::ModelKind;

struct TrainConfig {
    ModelKind model = ModelKind::NnUncompressed;
    std::string dataset;
    std::uint64_t seed = 0;
    double learning_rate = 0.1;
    std::size_t batch_size = 5;
    std::size_t epochs = 100; ///< per stage for dqc and sequent
    std::size_t vqc_layers = 6;
    neural::OptimizerKind optimizer = neural::OptimizerKind::Sgd;
    quantum::GradientBackend backend = quantum::GradientBackend::Adjoint;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw DomainError("learning rate must be positive");
        }
        if (batch_size == 0) {
            throw DomainError("batch size must be positive");
        }
        if (vqc_layers == 0) {
            throw DomainError("the VQC needs at least one layer");
        }
    }

    /// Total epochs over all stages.
    [[nodiscard]] std::size_t total_epochs() const {
        return models::is_two_stage(model) ? 2 * epochs : epochs;
    }
};

struct AeConfig {
    std::string dataset;
    std::uint64_t seed = 0;
    double learning_rate = 0.001;
    std::size_t batch_size = 64;
    std::size_t epochs = 500;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw DomainError("learning rate must be positive");
        }
        if (batch_size == 0) {
            throw DomainError("batch size must be positive");
        }
    }
};

inline nlohmann::json to_json(const TrainConfig &c) {
    return {{"model", models::to_string(c.model)},
            {"dataset", c.dataset},
            {"seed", c.seed},
            {"lr", c.learning_rate},
            {"batch", c.batch_size},
            {"epochs", c.epochs},
            {"layers", c.vqc_layers},
            {"optimizer", neural::to_string(c.optimizer)},
            {"backend", quantum::to_string(c.backend)}};
}

inline TrainConfig train_config_from_json(const nlohmann::json &j) {
    TrainConfig c;
    c.model = models::model_kind_from_string(j.at("model").get<std::string>());
    c.dataset = j.at("dataset").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.learning_rate = j.at("lr").get<double>();
    c.batch_size = j.at("batch").get<std::size_t>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.vqc_layers = j.at("layers").get<std::size_t>();
    c.optimizer = j.value("optimizer", "sgd") == "adam" ? neural::OptimizerKind::Adam
                                                        : neural::OptimizerKind::Sgd;
    c.backend = quantum::backend_from_string(j.value("backend", "adjoint"));
    return c;
}

inline nlohmann::json to_json(const AeConfig &c) {
    return {{"dataset", c.dataset},
            {"seed", c.seed},
            {"lr", c.learning_rate},
            {"batch", c.batch_size},
            {"epochs", c.epochs},
            {"optimizer", "adam"}};
}

/// Classifier epochs per stage.
inline std::size_t default_epochs(std::string_view dataset) {
    if (dataset == "banknote" || dataset == "breastcancer") {
        return 100;
    }
    if (dataset == "mnist" || dataset == "audiomnist-csv") {
        return 50;
    }
    throw DomainError("no default epochs for dataset '" + std::string(dataset) + "'");
}

/// Autoencoder learning rate and batch size selected by the reconstruction
/// grid; 500 epochs throughout.
inline AeConfig default_ae_config(std::string_view dataset, std::uint64_t seed = 0) {
    AeConfig c;
    c.dataset = std::string(dataset);
    c.seed = seed;
    c.epochs = 500;
    if (dataset == "banknote") {
        c.learning_rate = 0.1;
        c.batch_size = 128;
    } else if (dataset == "breastcancer") {
        c.learning_rate = 0.01;
        c.batch_size = 32;
    } else if (dataset == "mnist") {
        c.learning_rate = 0.001;
        c.batch_size = 64;
    } else if (dataset == "audiomnist-csv") {
        c.learning_rate = 0.001;
        c.batch_size = 128;
    } else {
        throw DomainError("no autoencoder defaults for dataset '" + std::string(dataset) + "'");
    }
    return c;
}

/// Best classifier learning rate per (dataset, model).
inline double default_learning_rate(std::string_view dataset, ModelKind kind) {
    // Columns: ae-vqc, vqc-amplitude, dqc, sequent, ae-nn, nn.
    static constexpr double banknote[] = {0.01, 0.01, 0.1, 0.1, 0.1, 0.1};
    static constexpr double breast[] = {0.1, 0.01, 0.1, 0.1, 0.1, 0.1};
    static constexpr double mnist[] = {0.01, 0.01, 0.01, 0.001, 0.01, 0.1};
    static constexpr double audio[] = {0.001, 0.1, 0.1, 0.1, 0.01, 0.1};
    std::size_t col = 0;
    while (models::kAllModelKinds[col] != kind) {
        ++col;
    }
    if (dataset == "banknote") {
        return banknote[col];
    }
    if (dataset == "breastcancer") {
        return breast[col];
    }
    if (dataset == "mnist") {
        return mnist[col];
    }
    if (dataset == "audiomnist-csv") {
        return audio[col];
    }
    throw DomainError("no default learning rate for dataset '" + std::string(dataset) + "'");
}

inline TrainConfig default_train_config(std::string_view dataset, ModelKind kind,
                                        std::uint64_t seed = 0) {
    TrainConfig c;
    c.model = kind;
    c.dataset = std::string(dataset);
    c.seed = seed;
    c.learning_rate = default_learning_rate(dataset, kind);
    c.epochs = default_epochs(dataset);
    return c;
}

} // namespace hqb::experiment
