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
#include "oracles.hpp"

#include "hqb/models/architecture.hpp"
#include "hqb/models/checkpoint.hpp"
#include "hqb/models/hybrid_model.hpp"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <vector>

using namespace hqb;
using namespace hqb::models;
using Catch::Matchers::WithinAbs;

namespace {

using Dims = std::vector<std::size_t>;

struct DatasetShape {
    const char *name;
    std::size_t input_dim;
    std::size_t n_classes;
};

constexpr DatasetShape kBanknote{"banknote", 4, 2};
constexpr DatasetShape kBreastCancer{"breastcancer", 30, 2};
constexpr DatasetShape kMnist{"mnist", 784, 10};

neural::Mlp trained_encoder(std::size_t in, std::size_t k, std::uint64_t seed = 3) {
    auto ae = Autoencoder::build(in, k);
    Rng rng(seed);
    ae.encoder.initialize(rng);
    return ae.encoder;
}

HybridModel model_for(ModelKind kind, const DatasetShape &d, std::uint64_t seed = 0) {
    const auto enc = trained_encoder(d.input_dim, d.n_classes);
    return build_model(kind, d.input_dim, d.n_classes, 6, uses_encoder(kind) ? &enc : nullptr,
                       seed);
}

double weighted_logits(const HybridModel &m, const Matrix &z, const Matrix &u) {
    return (forward_head(m, z).array() * u.array()).sum();
}

Matrix head_inputs(Rng &rng, const HybridModel &m, Eigen::Index batch) {
    Matrix z(static_cast<Eigen::Index>(head_input_dim(m)), batch);
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        z.data()[i] = rng.uniform(0.05, 0.95);
    }
    return z;
}

void check_head_gradient(HybridModel m, Rng &rng) {
    const Matrix z = head_inputs(rng, m, 3);
    Matrix u(static_cast<Eigen::Index>(m.n_classes), 3);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        u.data()[i] = rng.uniform(-1, 1);
    }
    const auto g = backward_head(m, z, u);
    auto params = trainable_parameters(m);
    const auto grads = g.views();
    REQUIRE(params.size() == grads.size());
    const double h = 1e-6;
    for (std::size_t a = 0; a < params.size(); ++a) {
        REQUIRE(params[a].size() == grads[a].size());
        for (std::size_t i = 0; i < params[a].size(); ++i) {
            const double p0 = params[a][i];
            params[a][i] = p0 + h;
            const double lp = weighted_logits(m, z, u);
            params[a][i] = p0 - h;
            const double lm = weighted_logits(m, z, u);
            params[a][i] = p0;
            CHECK_THAT(grads[a][i], WithinAbs((lp - lm) / (2 * h), 1e-6));
        }
    }
}

} // namespace

TEST_CASE("encoder widths", "[models]") {
    CHECK(build_encoder_dims(4, 2) == Dims{4, 2});
    CHECK(build_encoder_dims(30, 2) == Dims{30, 15, 7, 3, 2});
    CHECK(build_encoder_dims(784, 10) == Dims{784, 392, 196, 98, 49, 24, 12, 10});
    CHECK(build_decoder_dims(30, 2) == Dims{2, 3, 7, 15, 30});
    CHECK(build_encoder_dims(5, 5) == Dims{5, 5});
    CHECK_THROWS_AS(build_encoder_dims(2, 4), DomainError);
    CHECK_THROWS_AS(build_encoder_dims(4, 0), DomainError);
}

TEST_CASE("encoder widths are monotone and end at the class count", "[models][property]") {
    for (std::size_t k = 1; k <= 12; ++k) {
        for (std::size_t in = k; in <= 900; in += 7) {
            const auto dims = build_encoder_dims(in, k);
            CHECK(dims.front() == in);
            CHECK(dims.back() == k);
            for (std::size_t i = 1; i + 1 < dims.size(); ++i) {
                CHECK(dims[i] == dims[i - 1] / 2);
                CHECK(dims[i] > k);
            }
        }
    }
}

TEST_CASE("autoencoder parameter counts", "[models]") {
    CHECK(dense_parameter_count(build_encoder_dims(4, 2)) == 10);
    CHECK(dense_parameter_count(build_decoder_dims(4, 2)) == 12);
    CHECK(autoencoder_parameter_count(30, 2) == 1246);
    CHECK(dense_parameter_count(build_encoder_dims(30, 2)) == 609);
    CHECK(dense_parameter_count(build_decoder_dims(30, 2)) == 637);
    const auto ae = Autoencoder::build(784, 10);
    CHECK(ae.parameter_count() == autoencoder_parameter_count(784, 10));
    CHECK(autoencoder_parameter_count(784, 10) + 60 == 821904);
    const auto acts = halving_activations(4);
    CHECK(acts[0] == neural::Activation::ReLU);
    CHECK(acts[3] == neural::Activation::Sigmoid);
}

TEST_CASE("matched hidden widths", "[models]") {
    CHECK(matched_hidden_width(34, 4, 2) == 5);
    CHECK(matched_hidden_width(1258, 30, 2) == 39);
    CHECK(matched_hidden_width(821904, 784, 10) == 1034);
    CHECK(matched_hidden_width(12, 2, 2) == 2);
    CHECK(matched_hidden_width(60, 10, 10) == 3);
    CHECK(matched_hidden_width(1, 4, 2) == 1);
    for (std::size_t total = 3; total < 3000; total += 13) {
        const std::size_t h = matched_hidden_width(total, 7, 3);
        CHECK(h * (7 + 3 + 1) + 3 >= total);
        if (h > 1) {
            CHECK((h - 1) * (7 + 3 + 1) + 3 < total);
        }
    }
}

TEST_CASE("model parameter counts", "[models]") {
    CHECK(model_for(ModelKind::NnUncompressed, kBanknote).n_total == 34);
    CHECK(model_for(ModelKind::NnUncompressed, kBanknote).head->layers()[0].out_dim() == 5);
    CHECK(model_for(ModelKind::AeNn, kBanknote).head->layers()[0].out_dim() == 2);
    CHECK(model_for(ModelKind::NnUncompressed, kBreastCancer).n_total == 1258);
    CHECK(model_for(ModelKind::NnUncompressed, kBreastCancer).head->layers()[0].out_dim() == 39);
    CHECK(model_for(ModelKind::AeNn, kBreastCancer).head->layers()[0].out_dim() == 2);
    const auto nn_mnist = model_for(ModelKind::NnUncompressed, kMnist);
    CHECK(nn_mnist.n_total == 821904);
    CHECK(nn_mnist.head->layers()[0].out_dim() == 1034);
    CHECK(model_for(ModelKind::AeNn, kMnist).head->layers()[0].out_dim() == 3);

    const auto amp = model_for(ModelKind::VqcAmplitude, kBreastCancer);
    CHECK(amp.circuit->n_qubits == 5);
    CHECK(trainable_parameter_count(amp, Stage::Quantum) == 30);
    CHECK(trainable_parameter_count(model_for(ModelKind::AeVqc, kBanknote), Stage::Quantum) == 12);
    CHECK(trainable_parameter_count(model_for(ModelKind::AeVqc, kMnist), Stage::Quantum) == 60);
    CHECK(trainable_parameter_count(model_for(ModelKind::AeVqc, kBreastCancer),
                                    Stage::Autoencoder) == 1246);

    CHECK(trainable_parameter_count(model_for(ModelKind::Dqc, kBanknote), Stage::Classical) == 16);
    CHECK(trainable_parameter_count(model_for(ModelKind::Dqc, kBreastCancer), Stage::Classical) ==
          68);
    CHECK(trainable_parameter_count(model_for(ModelKind::Dqc, kMnist), Stage::Classical) == 7960);
    CHECK(trainable_parameter_count(model_for(ModelKind::Sequent, kBreastCancer),
                                    Stage::Classical) == 68);
    CHECK(trainable_parameter_count(model_for(ModelKind::Sequent, kBreastCancer),
                                    Stage::Quantum) == 12);
}

TEST_CASE("model construction errors", "[models]") {
    CHECK_THROWS_AS(build_model(ModelKind::AeVqc, 30, 2), DomainError);
    const auto wrong = trained_encoder(4, 2);
    CHECK_THROWS_AS(build_model(ModelKind::AeNn, 30, 2, 6, &wrong), DimensionError);
    CHECK_THROWS_AS(build_model(ModelKind::NnUncompressed, 0, 2), DomainError);
    // Two amplitude wires cannot carry ten class readouts.
    CHECK_THROWS_AS(build_model(ModelKind::VqcAmplitude, 4, 10), DomainError);
    CHECK(model_kind_from_string("sequent") == ModelKind::Sequent);
    CHECK_THROWS_AS(model_kind_from_string("transformer"), DomainError);
    for (const auto k : kAllModelKinds) {
        CHECK(model_kind_from_string(to_string(k)) == k);
    }
}

TEST_CASE("initialization is seeded and bounded", "[models]") {
    const auto a = model_for(ModelKind::Dqc, kBreastCancer, 5);
    const auto b = model_for(ModelKind::Dqc, kBreastCancer, 5);
    const auto c = model_for(ModelKind::Dqc, kBreastCancer, 6);
    CHECK(classical_checksum(a) == classical_checksum(b));
    CHECK(quantum_checksum(a) == quantum_checksum(b));
    CHECK(classical_checksum(a) != classical_checksum(c));
    for (const double t : a.circuit->theta) {
        CHECK(std::abs(t) <= 0.1);
    }
    CHECK(a.pre->layers()[0].weights.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(30.0));
}

TEST_CASE("forward shapes", "[models]") {
    Rng rng(31);
    for (const auto kind : kAllModelKinds) {
        for (const auto &d : {kBanknote, kBreastCancer}) {
            auto m = model_for(kind, d);
            Matrix x(static_cast<Eigen::Index>(d.input_dim), 4);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x.data()[i] = rng.uniform(0.0, 1.0);
            }
            const Matrix logits = model_forward(m, x);
            CHECK(logits.rows() == static_cast<Eigen::Index>(d.n_classes));
            CHECK(logits.cols() == 4);
            CHECK(logits.allFinite());
            std::vector<double> col(x.col(0).data(), x.col(0).data() + x.rows());
            const Vector single = model_forward(m, col);
            for (Eigen::Index r = 0; r < single.size(); ++r) {
                CHECK_THAT(single[r], WithinAbs(logits(r, 0), 1e-14));
            }
            Matrix bad(static_cast<Eigen::Index>(d.input_dim + 1), 1);
            bad.setConstant(0.5);
            CHECK_THROWS_AS(model_forward(m, bad), DimensionError);
        }
    }
}

TEST_CASE("head gradients match finite differences in every stage", "[models][gradient][oracle]") {
    Rng rng(32);
    for (const auto kind : kAllModelKinds) {
        for (const auto &d : {kBanknote, kBreastCancer}) {
            auto m = model_for(kind, d, 7);
            check_head_gradient(m, rng);
            if (is_two_stage(kind)) {
                enter_quantum_stage(m);
                check_head_gradient(m, rng);
            }
        }
    }
}

TEST_CASE("sequent swaps its surrogate for the circuit", "[models]") {
    auto m = model_for(ModelKind::Sequent, kBreastCancer);
    Rng rng(33);
    const Matrix z = head_inputs(rng, m, 2);
    const Matrix a = neural::mlp_predict(*m.pre, z);
    CHECK_FALSE(m.quantum_classifier_active());
    const Matrix classical = forward_head(m, z);
    const Matrix via_surrogate = neural::mlp_predict(*m.surrogate, a);
    CHECK((classical - via_surrogate).cwiseAbs().maxCoeff() == 0.0);
    enter_quantum_stage(m);
    CHECK(m.quantum_classifier_active());
    const Matrix quantum = forward_head(m, z);
    for (Eigen::Index c = 0; c < 2; ++c) {
        std::vector<double> col(a.col(c).data(), a.col(c).data() + a.rows());
        const auto e = quantum::circuit_forward(*m.circuit, col).values;
        CHECK_THAT(quantum(0, c), WithinAbs(e[0], 1e-14));
        CHECK_THAT(quantum(1, c), WithinAbs(e[1], 1e-14));
    }
    auto nn = model_for(ModelKind::NnUncompressed, kBanknote);
    CHECK_THROWS_AS(enter_quantum_stage(nn), DomainError);
}

TEST_CASE("quantum stage exposes only the circuit weights", "[models]") {
    auto m = model_for(ModelKind::Dqc, kBreastCancer);
    const auto classical = trainable_parameters(m);
    CHECK(classical.size() == 4);
    enter_quantum_stage(m);
    const auto q = trainable_parameters(m);
    REQUIRE(q.size() == 1);
    CHECK(q[0].data() == m.circuit->theta.data());
    auto vqc = model_for(ModelKind::AeVqc, kBreastCancer);
    CHECK(trainable_parameters(vqc, Stage::Classical).empty());
}

TEST_CASE("checkpoint round trip", "[models]") {
    const auto dir = std::filesystem::path(HQB_TEST_TMP) / "models";
    std::filesystem::create_directories(dir);
    Rng rng(34);
    for (const auto kind : kAllModelKinds) {
        auto m = model_for(kind, kBreastCancer, 11);
        if (is_two_stage(kind)) {
            enter_quantum_stage(m);
        }
        m.backend = quantum::GradientBackend::ParameterShift;
        const auto path = dir / (std::string(to_string(kind)) + ".json");
        save_model(path, m);
        const auto back = load_model(path);
        CHECK(back.kind == m.kind);
        CHECK(back.stage == m.stage);
        CHECK(back.backend == m.backend);
        CHECK(back.n_total == m.n_total);
        CHECK(classical_checksum(back) == classical_checksum(m));
        CHECK(quantum_checksum(back) == quantum_checksum(m));
        Matrix x(30, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x.data()[i] = rng.uniform(0, 1);
        }
        CHECK((model_forward(back, x) - model_forward(m, x)).cwiseAbs().maxCoeff() == 0.0);
    }

    auto ae = Autoencoder::build(30, 2);
    ae.encoder.initialize(rng);
    ae.decoder.initialize(rng);
    const auto j = to_json(ae, 9);
    const auto ae2 = autoencoder_from_json(nlohmann::json::parse(j.dump()));
    CHECK(ae2.encoder.layers()[2].weights == ae.encoder.layers()[2].weights);
    CHECK(ae2.decoder.layers()[0].biases == ae.decoder.layers()[0].biases);
    CHECK_THROWS_AS(model_from_json(j), DomainError);
    CHECK_THROWS_AS(load_model(dir / "missing.json"), IoError);
}
