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
 * Named dataset recipes and the `dataset.json` manifest.
 *
 * A prepared dataset directory only holds the manifest. Loading re-reads the
 * recorded sources, checks their SHA-256 and re-derives the split, which must
 * reproduce the recorded split checksum.
 */
#pragma once

#include "hqb/checksum.hpp"
#include "hqb/data/dataset.hpp"
#include "hqb/data/table.hpp"
#include "hqb/error.hpp"
#include "hqb/rng.hpp"
#include "hqb/version.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace hqb::data {

namespace fs = std::filesystem;

inline constexpr std::string_view kDatasetManifestName = "dataset.json";
inline constexpr std::string_view kDatasetFormat = "hqb-dataset";
inline constexpr int kDatasetFormatVersion = 1;

inline constexpr std::string_view kDatasetNames[] = {"banknote", "breastcancer", "mnist",
                                                     "audiomnist-csv"};

struct PrepareOptions {
    std::string dataset;
    std::vector<fs::path> inputs;
    std::uint64_t seed = 0;
    long label_column = -1;
    std::optional<std::size_t> subsample;      ///< rows kept from the train(+val) pool
    std::optional<std::size_t> subsample_test; ///< rows kept from a designated test portion
};

struct DatasetRecipe {
    std::size_t n_features;
    std::size_t n_classes;
    NormalizationMode normalization;
    SplitPolicy policy;
};

inline DatasetRecipe recipe_for(std::string_view name) {
    if (name == "banknote") {
        return {4, 2, NormalizationMode::MinMax, SplitPolicy::EightOneOne};
    }
    if (name == "breastcancer") {
        return {30, 2, NormalizationMode::MinMax, SplitPolicy::EightOneOne};
    }
    if (name == "mnist") {
        return {784, 10, NormalizationMode::Pixel255, SplitPolicy::MnistFiveSevenths};
    }
    if (name == "audiomnist-csv") {
        return {784, 10, NormalizationMode::Pixel255, SplitPolicy::EightOneOne};
    }
    throw DomainError("unknown dataset '" + std::string(name) +
                      "' (expected banknote, breastcancer, mnist or audiomnist-csv)");
}

namespace detail {

/// MNIST accepts either the four IDX paths (train images, train labels, test
/// images, test labels) or one directory holding the standard file names.
inline std::vector<fs::path> mnist_inputs(const std::vector<fs::path> &inputs) {
    if (inputs.size() == 1 && fs::is_directory(inputs[0])) {
        const auto &d = inputs[0];
        return {d / "train-images-idx3-ubyte", d / "train-labels-idx1-ubyte",
                d / "t10k-images-idx3-ubyte", d / "t10k-labels-idx1-ubyte"};
    }
    if (inputs.size() != 4) {
        throw DomainError("mnist needs 4 IDX files (train images, train labels, test images, "
                          "test labels) or one directory");
    }
    return inputs;
}

inline std::vector<fs::path> resolve_inputs(const PrepareOptions &opts) {
    std::vector<fs::path> paths =
        opts.dataset == "mnist" ? mnist_inputs(opts.inputs) : opts.inputs;
    if (opts.dataset != "mnist" && paths.size() != 1) {
        throw DomainError(opts.dataset + " takes exactly one CSV input");
    }
    for (auto &p : paths) {
        if (!fs::exists(p)) {
            throw IoError("input not found: " + p.string());
        }
        p = fs::absolute(p).lexically_normal();
    }
    return paths;
}

} // namespace detail

struct PreparedDataset {
    Dataset dataset;
    nlohmann::json manifest;
};

inline PreparedDataset prepare_dataset(const PrepareOptions &opts) {
    const auto recipe = recipe_for(opts.dataset);
    const auto paths = detail::resolve_inputs(opts);

    RawTable table;
    if (opts.dataset == "mnist") {
        table = concatenate_with_test(load_idx(paths[0], paths[1]), load_idx(paths[2], paths[3]));
    } else {
        table = load_csv(paths[0], CsvSchema{opts.label_column, HeaderMode::Auto});
    }
    if (table.n_features != recipe.n_features) {
        throw DimensionError(opts.dataset + " expects " + std::to_string(recipe.n_features) +
                             " features, input has " + std::to_string(table.n_features));
    }
    if (table.n_classes > recipe.n_classes) {
        throw DimensionError(opts.dataset + " expects " + std::to_string(recipe.n_classes) +
                             " classes, input has " + std::to_string(table.n_classes));
    }
    table.n_classes = recipe.n_classes;
    while (table.class_names.size() < table.n_classes) {
        table.class_names.push_back(std::to_string(table.class_names.size()));
    }
    if (opts.subsample || opts.subsample_test) {
        table = subsample(table, opts.subsample.value_or(table.n_rows()), opts.subsample_test,
                          opts.seed);
    }

    PreparedDataset out;
    out.dataset = make_dataset(table, recipe.normalization, recipe.policy, opts.seed, opts.dataset);
    const auto &d = out.dataset;

    nlohmann::json sources = nlohmann::json::array();
    for (const auto &p : paths) {
        sources.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    }
    auto optional_size = [](const std::optional<std::size_t> &v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    out.manifest = {
        {"format", kDatasetFormat},
        {"version", kDatasetFormatVersion},
        {"hqb_version", kVersion},
        {"dataset", opts.dataset},
        {"sources", sources},
        {"label_column", opts.label_column},
        {"subsample", optional_size(opts.subsample)},
        {"subsample_test", optional_size(opts.subsample_test)},
        {"seed", opts.seed},
        {"rng", kRngName},
        {"policy", to_string(recipe.policy)},
        {"n_samples", d.n_samples()},
        {"n_features", d.n_features()},
        {"n_classes", d.n_classes},
        {"class_names", d.provenance.class_names},
        {"split",
         {{"train", d.split.train.size()},
          {"val", d.split.val.size()},
          {"test", d.split.test.size()},
          {"sha256", d.split.checksum()}}},
        {"normalization",
         {{"mode", to_string(d.provenance.normalization.mode)},
          {"scope", "full table"},
          {"mins", d.provenance.normalization.mins},
          {"maxs", d.provenance.normalization.maxs}}},
    };
    return out;
}

inline void write_dataset_manifest(const fs::path &dir, const nlohmann::json &manifest) {
    fs::create_directories(dir);
    std::ofstream out(dir / kDatasetManifestName);
    if (!out) {
        throw IoError("cannot write " + (dir / kDatasetManifestName).string());
    }
    out << manifest.dump(1) << '\n';
}

inline PrepareOptions options_from_manifest(const nlohmann::json &m) {
    if (m.value("format", "") != kDatasetFormat) {
        throw FormatError("not an hqb dataset manifest");
    }
    if (m.value("version", 0) != kDatasetFormatVersion) {
        throw FormatError("unsupported dataset manifest version");
    }
    PrepareOptions o;
    o.dataset = m.at("dataset").get<std::string>();
    for (const auto &s : m.at("sources")) {
        o.inputs.emplace_back(s.at("path").get<std::string>());
    }
    o.seed = m.at("seed").get<std::uint64_t>();
    o.label_column = m.at("label_column").get<long>();
    if (!m.at("subsample").is_null()) {
        o.subsample = m.at("subsample").get<std::size_t>();
    }
    if (!m.at("subsample_test").is_null()) {
        o.subsample_test = m.at("subsample_test").get<std::size_t>();
    }
    return o;
}

/// Rebuilds a dataset from its manifest directory, verifying source and
/// split checksums.
inline PreparedDataset load_prepared(const fs::path &dir) {
    const fs::path path = dir / kDatasetManifestName;
    std::ifstream in(path);
    if (!in) {
        throw IoError("no dataset manifest at " + path.string());
    }
    nlohmann::json recorded;
    try {
        recorded = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    const auto opts = options_from_manifest(recorded);
    for (const auto &s : recorded.at("sources")) {
        const fs::path p = s.at("path").get<std::string>();
        if (!fs::exists(p)) {
            throw IoError("dataset source moved or deleted: " + p.string());
        }
        if (sha256_file(p) != s.at("sha256").get<std::string>()) {
            throw FormatError("checksum mismatch for " + p.string());
        }
    }
    auto prepared = prepare_dataset(opts);
    if (prepared.manifest.at("split").at("sha256") != recorded.at("split").at("sha256")) {
        throw FormatError("re-derived split differs from the recorded one");
    }
    prepared.manifest = std::move(recorded);
    return prepared;
}

} // namespace hqb::data
