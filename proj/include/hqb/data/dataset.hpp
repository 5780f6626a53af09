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
 * Normalized datasets, one-hot labels, deterministic splits and batches.
 *
 * Feature matrices are n_features x n_samples (one sample per contiguous
 * column) so that index gathers produce model-ready batches directly.
 */
#pragma once

#include "hqb/checksum.hpp"
#include "hqb/data/table.hpp"
#include "hqb/error.hpp"
#include "hqb/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::data {

using Matrix = Eigen::MatrixXd;

enum class NormalizationMode { MinMax, Pixel255 };

inline std::string_view to_string(NormalizationMode m) {
    return m == NormalizationMode::MinMax ? "minmax" : "pixel255";
}

struct Normalization {
    NormalizationMode mode = NormalizationMode::MinMax;
    std::vector<double> mins;
    std::vector<double> maxs;
};

struct NormalizedFeatures {
    Matrix features; ///< n_features x n_rows, values in [0, 1]
    Normalization bounds;
};

/// Per-feature (x - min) / (max - min) over the whole table; constant
/// features become 0.
inline NormalizedFeatures normalize_minmax(const RawTable &table) {
    if (table.n_rows() == 0) {
        throw DomainError("cannot normalize an empty table");
    }
    const auto d = static_cast<Eigen::Index>(table.n_features);
    const auto n = static_cast<Eigen::Index>(table.n_rows());
    const Eigen::Map<const Matrix> raw(table.values.data(), d, n);
    NormalizedFeatures out;
    out.bounds.mode = NormalizationMode::MinMax;
    out.features.resize(d, n);
    for (Eigen::Index f = 0; f < d; ++f) {
        const double lo = raw.row(f).minCoeff();
        const double hi = raw.row(f).maxCoeff();
        out.bounds.mins.push_back(lo);
        out.bounds.maxs.push_back(hi);
        const double range = hi - lo;
        for (Eigen::Index i = 0; i < n; ++i) {
            out.features(f, i) = range > 0.0 ? (raw(f, i) - lo) / range : 0.0;
        }
    }
    return out;
}

/// Fixed [0, 255] -> [0, 1] scaling for image-like inputs.
inline NormalizedFeatures normalize_pixels(const RawTable &table) {
    if (table.n_rows() == 0) {
        throw DomainError("cannot normalize an empty table");
    }
    const auto d = static_cast<Eigen::Index>(table.n_features);
    const auto n = static_cast<Eigen::Index>(table.n_rows());
    const Eigen::Map<const Matrix> raw(table.values.data(), d, n);
    if (raw.minCoeff() < 0.0 || raw.maxCoeff() > 255.0) {
        throw DomainError("pixel values must lie in [0, 255]");
    }
    NormalizedFeatures out;
    out.bounds.mode = NormalizationMode::Pixel255;
    out.bounds.mins.assign(table.n_features, 0.0);
    out.bounds.maxs.assign(table.n_features, 255.0);
    out.features = raw / 255.0;
    return out;
}

inline Matrix one_hot(const std::vector<int> &labels, std::size_t n_classes) {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(n_classes),
                              static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes) {
            throw DomainError("label " + std::to_string(labels[i]) + " outside [0, " +
                              std::to_string(n_classes) + ")");
        }
        out(labels[i], static_cast<Eigen::Index>(i)) = 1.0;
    }
    return out;
}

enum class SplitPolicy {
    /// Shuffle everything; floor(10%) validation, floor(10%) test, rest train.
    EightOneOne,
    /// Keep the designated test rows; shuffle the rest into train and a
    /// validation set the same size as the test set.
    MnistFiveSevenths,
};

inline std::string_view to_string(SplitPolicy p) {
    return p == SplitPolicy::EightOneOne ? "8:1:1" : "5/7:1/7:1/7";
}

inline SplitPolicy split_policy_from_string(std::string_view s) {
    if (s == "8:1:1") {
        return SplitPolicy::EightOneOne;
    }
    if (s == "5/7:1/7:1/7") {
        return SplitPolicy::MnistFiveSevenths;
    }
    throw DomainError("unknown split policy '" + std::string(s) + "'");
}

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;

    [[nodiscard]] std::string checksum() const {
        Sha256 h;
        for (const auto *part : {&train, &val, &test}) {
            const std::uint64_t n = part->size();
            h.update_values(std::span<const std::uint64_t>(&n, 1));
            for (const std::size_t i : *part) {
                const std::uint64_t v = i;
                h.update_values(std::span<const std::uint64_t>(&v, 1));
            }
        }
        return h.finish();
    }
};

inline Split split_dataset(const RawTable &table, SplitPolicy policy, std::uint64_t seed) {
    const std::size_t n = table.n_rows();
    if (n == 0) {
        throw DomainError("cannot split an empty table");
    }
    Rng rng = Rng::derive(seed, "split");
    Split s;
    if (policy == SplitPolicy::EightOneOne) {
        if (table.designated_test_start) {
            throw DomainError("8:1:1 split requested for a table with a designated test portion");
        }
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        rng.shuffle(idx);
        const std::size_t tenth = n / 10;
        const std::size_t n_train = n - 2 * tenth;
        s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                     idx.begin() + static_cast<std::ptrdiff_t>(n_train + tenth));
        s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + tenth), idx.end());
        return s;
    }
    if (!table.designated_test_start) {
        throw DomainError("5/7:1/7:1/7 split needs a designated test portion");
    }
    const std::size_t start = *table.designated_test_start;
    const std::size_t n_test = n - start;
    if (n_test == 0 || n_test >= start) {
        throw DomainError("designated test portion must be non-empty and smaller than the rest");
    }
    std::vector<std::size_t> idx(start);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    const std::size_t n_train = start - n_test;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    s.test.resize(n_test);
    std::iota(s.test.begin(), s.test.end(), start);
    return s;
}

/// Shuffled mini-batches of `subset`, reproducible per (seed, epoch). The
/// final short batch is kept.
inline std::vector<std::vector<std::size_t>> batches(const std::vector<std::size_t> &subset,
                                                     std::size_t batch_size, std::uint64_t seed,
                                                     std::uint64_t epoch) {
    if (batch_size == 0) {
        throw DomainError("batch size must be positive");
    }
    std::vector<std::size_t> order = subset;
    Rng rng = Rng::derive(seed, "batches", epoch);
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < order.size(); i += batch_size) {
        const std::size_t end = std::min(order.size(), i + batch_size);
        out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return out;
}

/// Keeps a seeded random subset of rows, in original order. For tables with
/// a designated test portion the two portions are subsampled separately.
inline RawTable subsample(const RawTable &table, std::size_t keep, std::optional<std::size_t> keep_test,
                          std::uint64_t seed) {
    const std::size_t boundary = table.designated_test_start.value_or(table.n_rows());
    auto pick = [&](std::size_t begin, std::size_t end, std::size_t count, std::string_view stream) {
        std::vector<std::size_t> idx(end - begin);
        std::iota(idx.begin(), idx.end(), begin);
        if (count < idx.size()) {
            Rng rng = Rng::derive(seed, stream);
            rng.shuffle(idx);
            idx.resize(count);
            std::sort(idx.begin(), idx.end());
        }
        return idx;
    };
    std::vector<std::size_t> rows = pick(0, boundary, keep, "subsample");
    const std::size_t new_boundary = rows.size();
    if (table.designated_test_start) {
        const auto test = pick(boundary, table.n_rows(), keep_test.value_or(table.n_rows()),
                               "subsample-test");
        rows.insert(rows.end(), test.begin(), test.end());
    }
    RawTable out;
    out.n_features = table.n_features;
    out.n_classes = table.n_classes;
    out.class_names = table.class_names;
    for (const std::size_t r : rows) {
        const auto row = table.row(r);
        out.values.insert(out.values.end(), row.begin(), row.end());
        out.labels.push_back(table.labels[r]);
    }
    if (table.designated_test_start) {
        out.designated_test_start = new_boundary;
    }
    return out;
}

struct Provenance {
    std::string source;
    std::uint64_t seed = 0;
    SplitPolicy policy = SplitPolicy::EightOneOne;
    Normalization normalization;
    std::vector<std::string> class_names;
};

struct Dataset {
    Matrix features; ///< n_features x n_samples, in [0, 1]
    std::vector<int> labels;
    Matrix labels_one_hot; ///< n_classes x n_samples
    std::size_t n_classes = 0;
    Split split;
    Provenance provenance;

    [[nodiscard]] std::size_t n_samples() const { return labels.size(); }
    [[nodiscard]] std::size_t n_features() const { return static_cast<std::size_t>(features.rows()); }

    [[nodiscard]] const std::vector<std::size_t> &subset(std::string_view name) const {
        if (name == "train") {
            return split.train;
        }
        if (name == "val") {
            return split.val;
        }
        if (name == "test") {
            return split.test;
        }
        throw DomainError("unknown subset '" + std::string(name) + "'");
    }
};

/// Columns of `m` selected by `indices`.
inline Matrix gather(const Matrix &m, const std::vector<std::size_t> &indices) {
    Matrix out(m.rows(), static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = m.col(static_cast<Eigen::Index>(indices[i]));
    }
    return out;
}

inline Dataset make_dataset(const RawTable &table, NormalizationMode mode, SplitPolicy policy,
                            std::uint64_t seed, std::string source) {
    table.validate();
    auto norm = mode == NormalizationMode::MinMax ? normalize_minmax(table) : normalize_pixels(table);
    Dataset d;
    d.features = std::move(norm.features);
    d.labels = table.labels;
    d.n_classes = table.n_classes;
    d.labels_one_hot = one_hot(table.labels, table.n_classes);
    d.split = split_dataset(table, policy, seed);
    d.provenance = {std::move(source), seed, policy, std::move(norm.bounds), table.class_names};
    return d;
}

} // namespace hqb::data
