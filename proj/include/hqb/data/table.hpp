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
 * Raw labelled tables and the two on-disk formats they come from: the
 * canonical CSV (features then a label column) and MNIST's IDX files.
 */
#pragma once

#include "hqb/error.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::data {

struct RawTable {
    std::vector<double> values; ///< row-major, n_rows x n_features
    std::vector<int> labels;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<std::string> class_names; ///< class id -> label as written in the source
    /// Rows at or after this index are a designated test portion (MNIST).
    std::optional<std::size_t> designated_test_start;

    [[nodiscard]] std::size_t n_rows() const noexcept { return labels.size(); }

    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features, n_features};
    }

    void validate() const {
        if (values.size() != labels.size() * n_features) {
            throw DimensionError("table holds " + std::to_string(values.size()) +
                                 " values for " + std::to_string(labels.size()) + " rows of " +
                                 std::to_string(n_features) + " features");
        }
        for (const int l : labels) {
            if (l < 0 || static_cast<std::size_t>(l) >= n_classes) {
                throw DomainError("label " + std::to_string(l) + " outside [0, " +
                                  std::to_string(n_classes) + ")");
            }
        }
    }
};

enum class HeaderMode { Auto, Present, Absent };

struct CsvSchema {
    /// Column holding the label; negative counts from the end (-1 = last).
    long label_column = -1;
    HeaderMode header = HeaderMode::Auto;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\"");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\"");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<long> parse_int(std::string_view s) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

/// Integer labels forming exactly {0..k-1} are kept as ids; anything else is
/// mapped by order of first appearance.
inline void encode_labels(const std::vector<std::string> &raw, RawTable &table) {
    std::vector<long> ints;
    bool all_int = true;
    for (const auto &s : raw) {
        const auto v = parse_int(s);
        if (!v || *v < 0) {
            all_int = false;
            break;
        }
        ints.push_back(*v);
    }
    if (all_int && !ints.empty()) {
        const long max = *std::max_element(ints.begin(), ints.end());
        std::vector<bool> seen(static_cast<std::size_t>(max) + 1, false);
        for (const long v : ints) {
            seen[static_cast<std::size_t>(v)] = true;
        }
        if (std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
            table.n_classes = seen.size();
            table.class_names.clear();
            for (std::size_t c = 0; c < seen.size(); ++c) {
                table.class_names.push_back(std::to_string(c));
            }
            table.labels.assign(ints.begin(), ints.end());
            return;
        }
    }
    std::map<std::string, int> ids;
    table.class_names.clear();
    table.labels.clear();
    for (const auto &s : raw) {
        auto [it, inserted] = ids.try_emplace(s, static_cast<int>(ids.size()));
        if (inserted) {
            table.class_names.push_back(s);
        }
        table.labels.push_back(it->second);
    }
    table.n_classes = ids.size();
}

} // namespace detail

inline RawTable parse_csv(std::istream &in, const CsvSchema &schema = {}) {
    RawTable table;
    std::vector<std::string> raw_labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t n_cols = 0;
    std::size_t label_col = 0;
    bool first_record = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (first_record) {
            n_cols = fields.size();
            if (n_cols < 2) {
                throw ParseError("need at least one feature column and a label column", line_no);
            }
            const long lc = schema.label_column < 0
                                ? static_cast<long>(n_cols) + schema.label_column
                                : schema.label_column;
            if (lc < 0 || static_cast<std::size_t>(lc) >= n_cols) {
                throw ParseError("label column " + std::to_string(schema.label_column) +
                                 " outside the " + std::to_string(n_cols) + " columns",
                                 line_no);
            }
            label_col = static_cast<std::size_t>(lc);
            table.n_features = n_cols - 1;
            first_record = false;
            bool header = schema.header == HeaderMode::Present;
            if (schema.header == HeaderMode::Auto) {
                for (std::size_t c = 0; c < n_cols; ++c) {
                    if (c != label_col && !detail::parse_double(fields[c])) {
                        header = true;
                        break;
                    }
                }
            }
            if (header) {
                continue;
            }
        }
        if (fields.size() != n_cols) {
            throw ParseError("expected " + std::to_string(n_cols) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            if (c == label_col) {
                if (fields[c].empty()) {
                    throw ParseError("empty label", line_no);
                }
                raw_labels.emplace_back(fields[c]);
                continue;
            }
            const auto v = detail::parse_double(fields[c]);
            if (!v) {
                throw ParseError("non-numeric feature '" + std::string(fields[c]) + "' in column " +
                                     std::to_string(c),
                                 line_no);
            }
            table.values.push_back(*v);
        }
    }
    if (raw_labels.empty()) {
        throw DomainError("CSV input contains no data rows");
    }
    detail::encode_labels(raw_labels, table);
    table.validate();
    return table;
}

inline RawTable load_csv(const std::filesystem::path &path, const CsvSchema &schema = {}) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return parse_csv(in, schema);
}

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

namespace detail {

inline std::vector<unsigned char> read_bytes(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::uint32_t read_be32(std::span<const unsigned char> b, std::size_t offset) {
    return (std::uint32_t{b[offset]} << 24U) | (std::uint32_t{b[offset + 1]} << 16U) |
           (std::uint32_t{b[offset + 2]} << 8U) | std::uint32_t{b[offset + 3]};
}

} // namespace detail

/// Parses an IDX image/label pair from memory. Each image is flattened row
/// by row; pixel values stay in [0, 255].
inline RawTable parse_idx(std::span<const unsigned char> images, std::span<const unsigned char> labels,
                          std::string_view what = "idx") {
    const std::string ctx(what);
    if (images.size() < 16 || detail::read_be32(images, 0) != kIdxImagesMagic) {
        throw FormatError(ctx + ": bad image magic number (expected 0x00000803)");
    }
    if (labels.size() < 8 || detail::read_be32(labels, 0) != kIdxLabelsMagic) {
        throw FormatError(ctx + ": bad label magic number (expected 0x00000801)");
    }
    const std::size_t n = detail::read_be32(images, 4);
    const std::size_t rows = detail::read_be32(images, 8);
    const std::size_t cols = detail::read_be32(images, 12);
    const std::size_t n_labels = detail::read_be32(labels, 4);
    if (n != n_labels) {
        throw FormatError(ctx + ": " + std::to_string(n) + " images but " +
                          std::to_string(n_labels) + " labels");
    }
    const std::size_t dim = rows * cols;
    if (images.size() < 16 + n * dim) {
        throw FormatError(ctx + ": image payload truncated (" + std::to_string(images.size() - 16) +
                          " of " + std::to_string(n * dim) + " bytes)");
    }
    if (labels.size() < 8 + n) {
        throw FormatError(ctx + ": label payload truncated");
    }
    RawTable t;
    t.n_features = dim;
    t.values.resize(n * dim);
    std::transform(images.begin() + 16, images.begin() + 16 + static_cast<std::ptrdiff_t>(n * dim),
                   t.values.begin(), [](unsigned char b) { return static_cast<double>(b); });
    t.labels.resize(n);
    int max_label = -1;
    for (std::size_t i = 0; i < n; ++i) {
        t.labels[i] = labels[8 + i];
        max_label = std::max(max_label, t.labels[i]);
    }
    t.n_classes = static_cast<std::size_t>(max_label + 1);
    for (std::size_t c = 0; c < t.n_classes; ++c) {
        t.class_names.push_back(std::to_string(c));
    }
    return t;
}

inline RawTable load_idx(const std::filesystem::path &images_path,
                         const std::filesystem::path &labels_path) {
    const auto images = detail::read_bytes(images_path);
    const auto labels = detail::read_bytes(labels_path);
    return parse_idx(images, labels, images_path.filename().string());
}

/// Train portion followed by a designated test portion.
inline RawTable concatenate_with_test(RawTable train, const RawTable &test) {
    if (train.n_features != test.n_features) {
        throw DimensionError("train and test portions differ in width");
    }
    const std::size_t start = train.n_rows();
    train.values.insert(train.values.end(), test.values.begin(), test.values.end());
    train.labels.insert(train.labels.end(), test.labels.begin(), test.labels.end());
    train.n_classes = std::max(train.n_classes, test.n_classes);
    train.class_names.clear();
    for (std::size_t c = 0; c < train.n_classes; ++c) {
        train.class_names.push_back(std::to_string(c));
    }
    train.designated_test_start = start;
    return train;
}

} // namespace hqb::data
