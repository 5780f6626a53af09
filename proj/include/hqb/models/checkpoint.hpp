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
 * Versioned JSON checkpoints for models and autoencoders.
 *
 * Parameter arrays are written in declared order (weights column-major as
 * stored, then biases). nlohmann::json prints doubles with the shortest
 * representation that parses back to the same bits, so a save/load cycle is
 * exact.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/models/architecture.hpp"
#include "hqb/models/hybrid_model.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace hqb::models {

inline constexpr int kCheckpointVersion = 1;
inline constexpr std::string_view kCheckpointFormat = "hqb-checkpoint";

inline nlohmann::json mlp_to_json(const neural::Mlp &net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto &l : net.layers()) {
        layers.push_back({
            {"in", l.in_dim()},
            {"out", l.out_dim()},
            {"activation", neural::to_string(l.activation)},
            {"weights", std::vector<double>(l.weights.data(), l.weights.data() + l.weights.size())},
            {"biases", std::vector<double>(l.biases.data(), l.biases.data() + l.biases.size())},
        });
    }
    return {{"layers", layers}};
}

inline neural::Mlp mlp_from_json(const nlohmann::json &j) {
    std::vector<neural::DenseLayer> layers;
    for (const auto &lj : j.at("layers")) {
        neural::DenseLayer l(lj.at("in").get<std::size_t>(), lj.at("out").get<std::size_t>(),
                             neural::activation_from_string(lj.at("activation").get<std::string>()));
        const auto w = lj.at("weights").get<std::vector<double>>();
        const auto b = lj.at("biases").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(l.weights.size()) ||
            b.size() != static_cast<std::size_t>(l.biases.size())) {
            throw DimensionError("checkpoint layer arrays do not match declared shape");
        }
        std::copy(w.begin(), w.end(), l.weights.data());
        std::copy(b.begin(), b.end(), l.biases.data());
        layers.push_back(std::move(l));
    }
    return neural::Mlp(std::move(layers));
}

inline nlohmann::json circuit_to_json(const quantum::CircuitSpec &c) {
    return {{"n_qubits", c.n_qubits},
            {"n_layers", c.n_layers},
            {"embedding", quantum::to_string(c.embedding)},
            {"theta", c.theta}};
}

inline quantum::CircuitSpec circuit_from_json(const nlohmann::json &j) {
    quantum::CircuitSpec c(j.at("n_qubits").get<std::size_t>(), j.at("n_layers").get<std::size_t>(),
                           quantum::embedding_from_string(j.at("embedding").get<std::string>()));
    c.theta = j.at("theta").get<std::vector<double>>();
    c.validate();
    return c;
}

inline void check_header(const nlohmann::json &j, std::string_view kind) {
    if (j.value("format", "") != kCheckpointFormat) {
        throw DomainError("not an hqb checkpoint");
    }
    if (j.value("version", 0) != kCheckpointVersion) {
        throw DomainError("unsupported checkpoint version " + std::to_string(j.value("version", 0)));
    }
    if (j.value("kind", "") != kind) {
        throw DomainError("checkpoint holds '" + j.value("kind", std::string{}) + "', expected '" +
                          std::string(kind) + "'");
    }
}

inline nlohmann::json to_json(const HybridModel &m) {
    nlohmann::json parts = nlohmann::json::object();
    const std::pair<const char *, const std::optional<neural::Mlp> *> nets[] = {
        {"encoder", &m.encoder}, {"pre", &m.pre},   {"surrogate", &m.surrogate},
        {"post", &m.post},       {"head", &m.head},
    };
    for (const auto &[name, net] : nets) {
        if (*net) {
            parts[name] = mlp_to_json(**net);
        }
    }
    if (m.circuit) {
        parts["circuit"] = circuit_to_json(*m.circuit);
    }
    return {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"kind", "model"},
            {"model", to_string(m.kind)},
            {"input_dim", m.input_dim},
            {"n_classes", m.n_classes},
            {"n_layers", m.n_layers},
            {"seed", m.seed},
            {"stage", to_string(m.stage)},
            {"n_total", m.n_total},
            {"backend", quantum::to_string(m.backend)},
            {"parts", parts}};
}

inline HybridModel model_from_json(const nlohmann::json &j) {
    check_header(j, "model");
    HybridModel m;
    m.kind = model_kind_from_string(j.at("model").get<std::string>());
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.n_classes = j.at("n_classes").get<std::size_t>();
    m.n_layers = j.at("n_layers").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.stage = stage_from_string(j.at("stage").get<std::string>());
    m.n_total = j.at("n_total").get<std::size_t>();
    m.backend = quantum::backend_from_string(j.at("backend").get<std::string>());
    const auto &parts = j.at("parts");
    const std::pair<const char *, std::optional<neural::Mlp> *> nets[] = {
        {"encoder", &m.encoder}, {"pre", &m.pre},   {"surrogate", &m.surrogate},
        {"post", &m.post},       {"head", &m.head},
    };
    for (const auto &[name, net] : nets) {
        if (parts.contains(name)) {
            *net = mlp_from_json(parts.at(name));
        }
    }
    if (parts.contains("circuit")) {
        m.circuit = circuit_from_json(parts.at("circuit"));
    }
    return m;
}

inline nlohmann::json to_json(const Autoencoder &ae, std::uint64_t seed) {
    return {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"kind", "autoencoder"},
            {"input_dim", ae.encoder.in_dim()},
            {"n_classes", ae.encoder.out_dim()},
            {"seed", seed},
            {"parts", {{"encoder", mlp_to_json(ae.encoder)}, {"decoder", mlp_to_json(ae.decoder)}}}};
}

inline Autoencoder autoencoder_from_json(const nlohmann::json &j) {
    check_header(j, "autoencoder");
    return {mlp_from_json(j.at("parts").at("encoder")), mlp_from_json(j.at("parts").at("decoder"))};
}

inline void write_json(const std::filesystem::path &path, const nlohmann::json &j) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(1) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

inline void save_model(const std::filesystem::path &path, const HybridModel &m) {
    write_json(path, to_json(m));
}

inline HybridModel load_model(const std::filesystem::path &path) {
    return model_from_json(read_json(path));
}

} // namespace hqb::models
