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
 * Grid search over learning rate and batch size. Every cell runs once per
 * seed; the winner has the best seed-mean of the chosen metric, ties going
 * to the cell enumerated first (learning rate outer, batch size inner).
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/experiment/workers.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hqb::experiment {

enum class Metric { TestAccuracy, TestLoss, TestReconstructionLoss };

inline std::string_view to_string(Metric m) {
    switch (m) {
    case Metric::TestAccuracy:
        return "test_accuracy";
    case Metric::TestLoss:
        return "test_loss";
    case Metric::TestReconstructionLoss:
        return "test_reconstruction_loss";
    }
    return "?";
}

inline Metric metric_from_string(std::string_view s) {
    for (const auto m : {Metric::TestAccuracy, Metric::TestLoss, Metric::TestReconstructionLoss}) {
        if (to_string(m) == s) {
            return m;
        }
    }
    throw DomainError("unknown metric '" + std::string(s) + "'");
}

inline bool maximize(Metric m) { return m == Metric::TestAccuracy; }

struct GridCell {
    double learning_rate = 0.0;
    std::size_t batch_size = 0;
};

struct GridSpec {
    std::vector<double> learning_rates;
    std::vector<std::size_t> batch_sizes;
    std::vector<std::uint64_t> seeds;
    Metric metric = Metric::TestAccuracy;

    void validate() const {
        if (learning_rates.empty() || batch_sizes.empty() || seeds.empty()) {
            throw DomainError("grid axes and seed list must be non-empty");
        }
    }

    [[nodiscard]] std::vector<GridCell> cells() const {
        std::vector<GridCell> out;
        for (const double lr : learning_rates) {
            for (const std::size_t b : batch_sizes) {
                out.push_back({lr, b});
            }
        }
        return out;
    }
};

struct CellResult {
    GridCell cell;
    std::vector<std::optional<double>> values; ///< per seed, empty on failure
    std::vector<std::string> failures;         ///< per seed, empty on success
    std::optional<double> mean;                ///< only when every seed succeeded

    [[nodiscard]] bool failed() const { return !mean.has_value(); }
};

struct GridOutcome {
    GridSpec spec;
    std::vector<CellResult> cells;
    std::optional<std::size_t> best; ///< index into cells

    [[nodiscard]] const CellResult &best_cell() const {
        if (!best) {
            throw DomainError("every grid cell failed");
        }
        return cells[*best];
    }
};

/// Index of the best successful cell, first on ties.
inline std::optional<std::size_t> select_best(const std::vector<CellResult> &cells, Metric metric) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].failed()) {
            continue;
        }
        const double v = *cells[i].mean;
        if (!best || (maximize(metric) ? v > *cells[*best].mean : v < *cells[*best].mean)) {
            best = i;
        }
    }
    return best;
}

/// `run(cell, seed)` returns the metric for one trial; any exception marks
/// that trial failed. Trials run on up to `workers` threads.
inline GridOutcome grid_search(const GridSpec &spec,
                               const std::function<double(const GridCell &, std::uint64_t)> &run,
                               std::size_t workers = 1) {
    spec.validate();
    GridOutcome out;
    out.spec = spec;
    const auto cells = spec.cells();
    const std::size_t n_seeds = spec.seeds.size();
    std::vector<std::optional<double>> values(cells.size() * n_seeds);
    std::vector<std::string> failures(cells.size() * n_seeds);
    parallel_for(values.size(), workers, [&](std::size_t i) {
        const auto &cell = cells[i / n_seeds];
        try {
            const double v = run(cell, spec.seeds[i % n_seeds]);
            if (!std::isfinite(v)) {
                failures[i] = "non-finite metric";
                return;
            }
            values[i] = v;
        } catch (const std::exception &e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellResult r;
        r.cell = cells[c];
        double sum = 0.0;
        bool ok = true;
        for (std::size_t s = 0; s < n_seeds; ++s) {
            r.values.push_back(values[c * n_seeds + s]);
            r.failures.push_back(failures[c * n_seeds + s]);
            ok = ok && r.values.back().has_value();
            sum += r.values.back().value_or(0.0);
        }
        if (ok) {
            r.mean = sum / static_cast<double>(n_seeds);
        }
        out.cells.push_back(std::move(r));
    }
    out.best = select_best(out.cells, spec.metric);
    return out;
}

inline nlohmann::json to_json(const GridOutcome &g) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto &c : g.cells) {
        nlohmann::json values = nlohmann::json::array();
        for (const auto &v : c.values) {
            values.push_back(v ? nlohmann::json(*v) : nlohmann::json(nullptr));
        }
        cells.push_back({{"lr", c.cell.learning_rate},
                         {"batch", c.cell.batch_size},
                         {"values", values},
                         {"failures", c.failures},
                         {"mean", c.mean ? nlohmann::json(*c.mean) : nlohmann::json(nullptr)}});
    }
    nlohmann::json best = nullptr;
    if (g.best) {
        best = {{"lr", g.cells[*g.best].cell.learning_rate},
                {"batch", g.cells[*g.best].cell.batch_size},
                {"mean", *g.cells[*g.best].mean}};
    }
    return {{"metric", to_string(g.spec.metric)},
            {"seeds", g.spec.seeds},
            {"cells", cells},
            {"best", best}};
}

} // namespace hqb::experiment
