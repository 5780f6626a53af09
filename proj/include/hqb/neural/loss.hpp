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
#pragma once

#include "hqb/error.hpp"
#include "hqb/neural/mlp.hpp"

#include <cmath>
#include <string>

namespace hqb::neural {

struct LossResult {
    double loss = 0.0;
    Vector gradient;
};

/// Batch loss averaged over columns; `gradient` is already divided by the
/// batch size so summing per-sample backward passes yields the mean.
struct BatchLoss {
    double loss = 0.0;
    Matrix gradient;
};

inline LossResult mse_loss(const Vector &prediction, const Vector &target) {
    if (prediction.size() != target.size() || prediction.size() == 0) {
        throw DimensionError("mse_loss: lengths " + std::to_string(prediction.size()) +
                             " and " + std::to_string(target.size()));
    }
    const Vector diff = prediction - target;
    const auto n = static_cast<double>(diff.size());
    return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

inline void check_one_hot(const Vector &target) {
    int ones = 0;
    for (Eigen::Index i = 0; i < target.size(); ++i) {
        if (target[i] == 1.0) {
            ++ones;
        } else if (target[i] != 0.0) {
            throw DomainError("cross-entropy target is not one-hot");
        }
    }
    if (ones != 1) {
        throw DomainError("cross-entropy target is not one-hot");
    }
}

/// Softmax cross-entropy on raw logits with log-sum-exp stabilization.
inline LossResult cross_entropy_loss(const Vector &logits, const Vector &target_one_hot) {
    if (logits.size() != target_one_hot.size() || logits.size() == 0) {
        throw DimensionError("cross_entropy_loss: lengths " + std::to_string(logits.size()) +
                             " and " + std::to_string(target_one_hot.size()));
    }
    check_one_hot(target_one_hot);
    const double max = logits.maxCoeff();
    const Vector shifted = logits.array() - max;
    const Vector e = shifted.array().exp();
    const double sum = e.sum();
    const double log_z = std::log(sum);
    Eigen::Index label = 0;
    target_one_hot.maxCoeff(&label);
    return {log_z - shifted[label], e / sum - target_one_hot};
}

inline BatchLoss mse_batch(const Matrix &prediction, const Matrix &target) {
    if (prediction.rows() != target.rows() || prediction.cols() != target.cols()) {
        throw DimensionError("mse_batch: shape mismatch");
    }
    const Matrix diff = prediction - target;
    const auto count = static_cast<double>(diff.size());
    return {diff.squaredNorm() / count, (2.0 / count) * diff};
}

inline BatchLoss cross_entropy_batch(const Matrix &logits, const Matrix &targets) {
    if (logits.rows() != targets.rows() || logits.cols() != targets.cols()) {
        throw DimensionError("cross_entropy_batch: shape mismatch");
    }
    BatchLoss out;
    out.gradient.resize(logits.rows(), logits.cols());
    const auto b = static_cast<double>(logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const auto r = cross_entropy_loss(logits.col(c), targets.col(c));
        out.loss += r.loss;
        out.gradient.col(c) = r.gradient / b;
    }
    out.loss /= b;
    return out;
}

} // namespace hqb::neural
