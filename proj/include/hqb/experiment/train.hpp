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
 * Autoencoder training, single- and two-stage classifier training, and
 * evaluation. Every trial is single-threaded and a pure function of its
 * configuration and the dataset.
 */
#pragma once

#include "hqb/data/dataset.hpp"
#include "hqb/error.hpp"
#include "hqb/experiment/config.hpp"
#include "hqb/models/architecture.hpp"
#include "hqb/models/hybrid_model.hpp"
#include "hqb/neural/loss.hpp"
#include "hqb/neural/mlp.hpp"
#include "hqb/neural/optimizer.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace hqb::experiment {

using data::Dataset;
using models::HybridModel;
using neural::Matrix;

struct Evaluation {
    double accuracy = 0.0;
    double loss = 0.0;
};

struct TrialResult {
    TrainConfig config;
    std::vector<double> train_loss; ///< mean over the epoch's batches
    std::vector<double> val_loss;
    std::vector<double> val_accuracy;
    std::vector<std::size_t> stage_boundaries; ///< epoch index where each later stage starts
    double test_accuracy = 0.0;
    double test_loss = 0.0;
    std::size_t n_parameters = 0; ///< trainable weights summed over stages
    double wall_seconds = 0.0;
    bool failed = false;
    std::string message;
};

struct AeResult {
    AeConfig config;
    models::Autoencoder autoencoder;
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    double test_loss = 0.0;
    double wall_seconds = 0.0;
};

namespace detail {

inline void check_finite(double loss, std::string_view what, std::size_t epoch) {
    if (!std::isfinite(loss)) {
        throw DivergenceError(std::string(what) + " loss became non-finite in epoch " +
                              std::to_string(epoch));
    }
}

inline void check_subset(const std::vector<std::size_t> &subset, std::string_view name) {
    if (subset.empty()) {
        throw DomainError("subset '" + std::string(name) + "' is empty");
    }
}

/// Index of the largest entry, lowest index on ties.
inline Eigen::Index argmax(const Eigen::Ref<const Eigen::VectorXd> &v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

inline double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace detail

/// Accuracy (argmax, lowest index on ties) and mean cross-entropy.
inline Evaluation score_logits(const Matrix &logits, const Matrix &one_hot) {
    const auto loss = neural::cross_entropy_batch(logits, one_hot);
    std::size_t correct = 0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        if (detail::argmax(logits.col(c)) == detail::argmax(one_hot.col(c))) {
            ++correct;
        }
    }
    return {static_cast<double>(correct) / static_cast<double>(logits.cols()), loss.loss};
}

/// Evaluation on precomputed frozen features `z` (columns indexed like the
/// dataset).
inline Evaluation evaluate_features(const HybridModel &m, const Matrix &z, const Dataset &d,
                                    const std::vector<std::size_t> &subset) {
    detail::check_subset(subset, "evaluation");
    return score_logits(models::forward_head(m, data::gather(z, subset)),
                        data::gather(d.labels_one_hot, subset));
}

inline Evaluation evaluate(const HybridModel &m, const Dataset &d,
                           const std::vector<std::size_t> &subset) {
    detail::check_subset(subset, "evaluation");
    return score_logits(models::model_forward(m, data::gather(d.features, subset)),
                        data::gather(d.labels_one_hot, subset));
}

inline Evaluation evaluate(const HybridModel &m, const Dataset &d, std::string_view subset) {
    return evaluate(m, d, d.subset(subset));
}

/// Accuracy of argmax over the raw encoder output, with no trained head.
inline double encoder_argmax_accuracy(const neural::Mlp &encoder, const Dataset &d,
                                      const std::vector<std::size_t> &subset) {
    detail::check_subset(subset, "evaluation");
    const Matrix codes = neural::mlp_predict(encoder, data::gather(d.features, subset));
    std::size_t correct = 0;
    for (Eigen::Index c = 0; c < codes.cols(); ++c) {
        if (detail::argmax(codes.col(c)) == d.labels[subset[static_cast<std::size_t>(c)]]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(subset.size());
}

inline double reconstruction_loss(const models::Autoencoder &ae, const Dataset &d,
                                  const std::vector<std::size_t> &subset) {
    detail::check_subset(subset, "reconstruction");
    const Matrix x = data::gather(d.features, subset);
    const Matrix y = neural::mlp_predict(ae.decoder, neural::mlp_predict(ae.encoder, x));
    return (y - x).squaredNorm() / static_cast<double>(x.size());
}

/// Adam on the MSE reconstruction of the training split.
inline AeResult train_autoencoder(const Dataset &d, const AeConfig &cfg) {
    cfg.validate();
    detail::check_subset(d.split.train, "train");
    const auto start = std::chrono::steady_clock::now();
    AeResult out;
    out.config = cfg;
    out.autoencoder = models::Autoencoder::build(d.n_features(), d.n_classes);
    Rng init = Rng::derive(cfg.seed, "ae-init");
    out.autoencoder.encoder.initialize(init);
    out.autoencoder.decoder.initialize(init);
    auto &enc = out.autoencoder.encoder;
    auto &dec = out.autoencoder.decoder;

    neural::ParamViews params = enc.parameters();
    for (const auto v : dec.parameters()) {
        params.push_back(v);
    }
    auto opt = neural::OptimizerState::adam(cfg.learning_rate);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        double sum = 0.0;
        for (const auto &batch : data::batches(d.split.train, cfg.batch_size, cfg.seed, epoch)) {
            const Matrix x = data::gather(d.features, batch);
            auto ef = neural::mlp_forward(enc, x);
            auto df = neural::mlp_forward(dec, ef.output);
            const auto loss = neural::mse_batch(df.output, x);
            detail::check_finite(loss.loss, "autoencoder", epoch);
            const auto dg = neural::mlp_backward(dec, df.tape, loss.gradient);
            const auto eg = neural::mlp_backward(enc, ef.tape, dg.input);
            neural::GradViews grads = eg.views();
            for (const auto v : dg.views()) {
                grads.push_back(v);
            }
            neural::optimizer_step(opt, params, grads);
            sum += loss.loss * static_cast<double>(batch.size());
        }
        out.train_loss.push_back(sum / static_cast<double>(d.split.train.size()));
        if (!d.split.val.empty()) {
            out.val_loss.push_back(reconstruction_loss(out.autoencoder, d, d.split.val));
            detail::check_finite(out.val_loss.back(), "autoencoder validation", epoch);
        }
    }
    out.test_loss = reconstruction_loss(out.autoencoder, d, d.subset("test"));
    out.wall_seconds = detail::elapsed(start);
    return out;
}

namespace detail {

/// One stage of SGD on the parameters trainable in m.stage. `epoch_offset`
/// keeps batch orders distinct across stages.
inline void run_stage(HybridModel &m, const Matrix &z, const Dataset &d, const TrainConfig &cfg,
                      std::size_t epoch_offset, TrialResult &out) {
    auto params = models::trainable_parameters(m);
    out.n_parameters += models::trainable_parameter_count(m, m.stage);
    auto opt = neural::OptimizerState::make(cfg.optimizer, cfg.learning_rate);
    const bool two_stage = models::is_two_stage(m.kind);
    const bool quantum_stage = m.stage == models::Stage::Quantum;
    const std::string frozen = !two_stage          ? std::string()
                               : quantum_stage ? models::classical_checksum(m)
                                               : models::quantum_checksum(m);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        const std::size_t epoch = epoch_offset + e;
        double sum = 0.0;
        for (const auto &batch : data::batches(d.split.train, cfg.batch_size, cfg.seed, epoch)) {
            const Matrix zb = data::gather(z, batch);
            const Matrix yb = data::gather(d.labels_one_hot, batch);
            const auto loss = neural::cross_entropy_batch(models::forward_head(m, zb), yb);
            check_finite(loss.loss, "training", epoch);
            const auto grad = models::backward_head(m, zb, loss.gradient);
            neural::optimizer_step(opt, params, grad.views());
            sum += loss.loss * static_cast<double>(batch.size());
        }
        out.train_loss.push_back(sum / static_cast<double>(d.split.train.size()));
        if (two_stage) {
            const std::string now =
                quantum_stage ? models::classical_checksum(m) : models::quantum_checksum(m);
            if (now != frozen) {
                throw ConsistencyError(std::string("frozen ") +
                                       (quantum_stage ? "classical" : "quantum") +
                                       " parameters changed during training");
            }
        }
        if (!d.split.val.empty()) {
            const auto v = evaluate_features(m, z, d, d.split.val);
            check_finite(v.loss, "validation", epoch);
            out.val_loss.push_back(v.loss);
            out.val_accuracy.push_back(v.accuracy);
        }
    }
}

inline Matrix features_for(const HybridModel &m, const Dataset &d) {
    return models::frozen_features(m, d.features);
}

} // namespace detail

/// Single-stage training (ae-vqc, vqc-amplitude, nn, ae-nn).
inline TrialResult train_classifier(HybridModel &m, const Dataset &d, const TrainConfig &cfg) {
    cfg.validate();
    if (models::is_two_stage(m.kind)) {
        throw DomainError(std::string(models::to_string(m.kind)) + " trains in two stages");
    }
    detail::check_subset(d.split.train, "train");
    const auto start = std::chrono::steady_clock::now();
    TrialResult out;
    out.config = cfg;
    m.backend = cfg.backend;
    const Matrix z = detail::features_for(m, d);
    detail::run_stage(m, z, d, cfg, 0, out);
    const auto t = evaluate_features(m, z, d, d.subset("test"));
    out.test_accuracy = t.accuracy;
    out.test_loss = t.loss;
    out.wall_seconds = detail::elapsed(start);
    return out;
}

/// Classical group for `epochs`, then the VQC alone for another `epochs`.
inline TrialResult train_two_stage(HybridModel &m, const Dataset &d, const TrainConfig &cfg) {
    cfg.validate();
    if (!models::is_two_stage(m.kind)) {
        throw DomainError(std::string(models::to_string(m.kind)) + " trains in a single stage");
    }
    detail::check_subset(d.split.train, "train");
    const auto start = std::chrono::steady_clock::now();
    TrialResult out;
    out.config = cfg;
    m.backend = cfg.backend;
    m.stage = models::Stage::Classical;
    const Matrix z = detail::features_for(m, d);
    detail::run_stage(m, z, d, cfg, 0, out);
    out.stage_boundaries.push_back(out.train_loss.size());
    models::enter_quantum_stage(m);
    detail::run_stage(m, z, d, cfg, cfg.epochs, out);
    const auto t = evaluate_features(m, z, d, d.subset("test"));
    out.test_accuracy = t.accuracy;
    out.test_loss = t.loss;
    out.wall_seconds = detail::elapsed(start);
    return out;
}

struct TrialRun {
    TrialResult result;
    std::optional<HybridModel> model;
};

/// Builds the model for `cfg` and trains it. Divergence is recorded as a
/// failed trial rather than thrown.
inline TrialRun run_trial(const Dataset &d, const TrainConfig &cfg,
                          const neural::Mlp *encoder = nullptr) {
    TrialRun run;
    auto m = models::build_model(cfg.model, d.n_features(), d.n_classes, cfg.vqc_layers, encoder,
                                 cfg.seed);
    try {
        run.result = models::is_two_stage(cfg.model) ? train_two_stage(m, d, cfg)
                                                     : train_classifier(m, d, cfg);
        run.model = std::move(m);
    } catch (const DivergenceError &e) {
        run.result.config = cfg;
        run.result.failed = true;
        run.result.message = e.what();
    }
    return run;
}

inline nlohmann::json to_json(const TrialResult &r) {
    return {{"config", to_json(r.config)},
            {"train_loss", r.train_loss},
            {"val_loss", r.val_loss},
            {"val_accuracy", r.val_accuracy},
            {"stage_boundaries", r.stage_boundaries},
            {"test_accuracy", r.test_accuracy},
            {"test_loss", r.test_loss},
            {"n_parameters", r.n_parameters},
            {"wall_seconds", r.wall_seconds},
            {"failed", r.failed},
            {"message", r.message}};
}

inline TrialResult trial_from_json(const nlohmann::json &j) {
    TrialResult r;
    r.config = train_config_from_json(j.at("config"));
    r.train_loss = j.at("train_loss").get<std::vector<double>>();
    r.val_loss = j.at("val_loss").get<std::vector<double>>();
    r.val_accuracy = j.at("val_accuracy").get<std::vector<double>>();
    r.stage_boundaries = j.at("stage_boundaries").get<std::vector<std::size_t>>();
    r.test_accuracy = j.at("test_accuracy").get<double>();
    r.test_loss = j.at("test_loss").get<double>();
    r.n_parameters = j.value("n_parameters", std::size_t{0});
    r.wall_seconds = j.value("wall_seconds", 0.0);
    r.failed = j.value("failed", false);
    r.message = j.value("message", "");
    return r;
}

inline nlohmann::json to_json(const AeResult &r) {
    return {{"config", to_json(r.config)},
            {"train_loss", r.train_loss},
            {"val_loss", r.val_loss},
            {"test_loss", r.test_loss},
            {"n_parameters", r.autoencoder.parameter_count()},
            {"wall_seconds", r.wall_seconds}};
}

} // namespace hqb::experiment
