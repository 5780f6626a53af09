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
 * results.csv, summary.csv and per-dataset SVG validation curves.
 *
 * Numbers are printed with std::to_chars (shortest round-trip form), so the
 * CSV bytes depend only on the metric values. Wall-clock time is left out of
 * results.csv on purpose.
 */
#pragma once

#include "hqb/error.hpp"
#include "hqb/experiment/train.hpp"
#include "hqb/models/hybrid_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace hqb::experiment {

namespace fs = std::filesystem;

inline constexpr double kEmaAlpha = 0.6;

/// s_0 = x_0, s_t = alpha x_t + (1 - alpha) s_{t-1}.
inline std::vector<double> ema_smooth(const std::vector<double> &series, double alpha = kEmaAlpha) {
    if (series.empty()) {
        throw DomainError("cannot smooth an empty series");
    }
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw DomainError("EMA alpha must lie in (0, 1]");
    }
    std::vector<double> out(series.size());
    out[0] = series[0];
    for (std::size_t t = 1; t < series.size(); ++t) {
        out[t] = alpha * series[t] + (1.0 - alpha) * out[t - 1];
    }
    return out;
}

struct Interval {
    double mean = 0.0;
    double sd = 0.0;         ///< sample standard deviation (n - 1)
    double half_width = 0.0; ///< 1.96 sd / sqrt(n)
};

/// Normal-approximation 95% interval; a single value gives width zero.
inline Interval confidence_interval(const std::vector<double> &values) {
    if (values.empty()) {
        throw DomainError("confidence interval of an empty sample");
    }
    const auto n = static_cast<double>(values.size());
    Interval ci;
    for (const double v : values) {
        ci.mean += v;
    }
    ci.mean /= n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - ci.mean) * (v - ci.mean);
        }
        ci.sd = std::sqrt(ss / (n - 1.0));
    }
    ci.half_width = 1.96 * ci.sd / std::sqrt(n);
    return ci;
}

inline std::string format_number(double v) {
    if (!std::isfinite(v)) {
        return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    }
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, ptr};
}

namespace detail {

inline std::size_t model_rank(models::ModelKind k) {
    std::size_t i = 0;
    while (models::kAllModelKinds[i] != k) {
        ++i;
    }
    return i;
}

inline auto trial_key(const TrialResult &r) {
    const auto &c = r.config;
    return std::make_tuple(c.dataset, model_rank(c.model), c.learning_rate, c.batch_size, c.epochs,
                           c.vqc_layers, quantum::to_string(c.backend), c.seed);
}

inline auto group_key(const TrainConfig &c) {
    return std::make_tuple(c.dataset, model_rank(c.model), c.learning_rate, c.batch_size, c.epochs,
                           c.vqc_layers);
}

template <typename T> std::string last_or_empty(const std::vector<T> &v) {
    return v.empty() ? std::string() : format_number(v.back());
}

inline void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace detail

inline std::vector<TrialResult> sorted_trials(std::vector<TrialResult> trials) {
    std::stable_sort(trials.begin(), trials.end(), [](const auto &a, const auto &b) {
        return detail::trial_key(a) < detail::trial_key(b);
    });
    return trials;
}

inline constexpr std::string_view kResultsHeader =
    "dataset,model,seed,lr,batch,epochs,layers,backend,n_parameters,status,"
    "final_train_loss,final_val_loss,final_val_accuracy,test_loss,test_accuracy";

inline std::string results_row(const TrialResult &r) {
    const auto &c = r.config;
    std::ostringstream s;
    s << c.dataset << ',' << models::to_string(c.model) << ',' << c.seed << ','
      << format_number(c.learning_rate) << ',' << c.batch_size << ',' << c.epochs << ','
      << c.vqc_layers << ',' << quantum::to_string(c.backend) << ',' << r.n_parameters << ','
      << (r.failed ? "failed" : "ok") << ',';
    if (r.failed) {
        s << ",,,,";
    } else {
        s << detail::last_or_empty(r.train_loss) << ',' << detail::last_or_empty(r.val_loss) << ','
          << detail::last_or_empty(r.val_accuracy) << ',' << format_number(r.test_loss) << ','
          << format_number(r.test_accuracy);
    }
    return s.str();
}

inline std::string results_csv(const std::vector<TrialResult> &trials) {
    std::string out(kResultsHeader);
    out += '\n';
    for (const auto &r : sorted_trials(trials)) {
        out += results_row(r);
        out += '\n';
    }
    return out;
}

struct SummaryRow {
    TrainConfig config; ///< seed is meaningless here
    std::size_t n = 0;
    std::size_t n_failed = 0;
    Interval accuracy;
    std::vector<const TrialResult *> members; ///< successful trials only
};

/// One row per (dataset, model, lr, batch, epochs, layers) over successful
/// seeds, in results.csv order.
inline std::vector<SummaryRow> summarize(const std::vector<TrialResult> &trials) {
    std::map<decltype(detail::group_key(TrainConfig{})), SummaryRow> groups;
    for (const auto &r : trials) {
        auto &g = groups[detail::group_key(r.config)];
        g.config = r.config;
        if (r.failed) {
            ++g.n_failed;
        } else {
            g.members.push_back(&r);
        }
    }
    std::vector<SummaryRow> out;
    for (auto &[key, g] : groups) {
        std::sort(g.members.begin(), g.members.end(),
                  [](const auto *a, const auto *b) { return a->config.seed < b->config.seed; });
        std::vector<double> acc;
        for (const auto *m : g.members) {
            acc.push_back(m->test_accuracy);
        }
        g.n = acc.size();
        if (!acc.empty()) {
            g.accuracy = confidence_interval(acc);
        }
        out.push_back(std::move(g));
    }
    return out;
}

inline constexpr std::string_view kSummaryHeader =
    "dataset,model,lr,batch,epochs,layers,n,n_failed,mean_test_accuracy,sd,ci95_half_width,"
    "ci95_low,ci95_high";

inline std::string summary_csv(const std::vector<SummaryRow> &rows) {
    std::ostringstream s;
    s << kSummaryHeader << '\n';
    for (const auto &g : rows) {
        const auto &c = g.config;
        s << c.dataset << ',' << models::to_string(c.model) << ',' << format_number(c.learning_rate)
          << ',' << c.batch_size << ',' << c.epochs << ',' << c.vqc_layers << ',' << g.n << ','
          << g.n_failed << ',';
        if (g.n == 0) {
            s << ",,,,\n";
            continue;
        }
        const auto &a = g.accuracy;
        s << format_number(a.mean) << ',' << format_number(a.sd) << ','
          << format_number(a.half_width) << ',' << format_number(a.mean - a.half_width) << ','
          << format_number(a.mean + a.half_width) << '\n';
    }
    return s.str();
}

struct ChartSeries {
    std::string label;
    std::vector<double> values; ///< EMA-smoothed mean validation accuracy
    std::vector<std::size_t> boundaries;
};

/// Per model, the configuration with the best mean test accuracy; its seeds'
/// validation curves are averaged and then smoothed.
inline std::vector<ChartSeries> chart_series(const std::vector<SummaryRow> &rows,
                                             const std::string &dataset, double alpha = kEmaAlpha) {
    std::map<std::size_t, const SummaryRow *> best;
    for (const auto &g : rows) {
        if (g.config.dataset != dataset || g.n == 0 || g.members.front()->val_accuracy.empty()) {
            continue;
        }
        const auto rank = detail::model_rank(g.config.model);
        auto it = best.find(rank);
        if (it == best.end() || g.accuracy.mean > it->second->accuracy.mean) {
            best[rank] = &g;
        }
    }
    std::vector<ChartSeries> out;
    for (const auto &[rank, g] : best) {
        std::size_t len = g->members.front()->val_accuracy.size();
        for (const auto *m : g->members) {
            len = std::min(len, m->val_accuracy.size());
        }
        std::vector<double> mean(len, 0.0);
        for (const auto *m : g->members) {
            for (std::size_t t = 0; t < len; ++t) {
                mean[t] += m->val_accuracy[t] / static_cast<double>(g->members.size());
            }
        }
        out.push_back({std::string(models::to_string(g->config.model)), ema_smooth(mean, alpha),
                       g->members.front()->stage_boundaries});
    }
    return out;
}

inline std::string svg_chart(const std::string &title, const std::vector<ChartSeries> &series) {
    static constexpr const char *colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                             "#d62728", "#9467bd", "#8c564b"};
    constexpr double w = 720, h = 420, left = 60, right = 150, top = 40, bottom = 50;
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    std::size_t max_len = 1;
    for (const auto &s : series) {
        max_len = std::max(max_len, s.values.size());
    }
    const double x_span = static_cast<double>(std::max<std::size_t>(max_len - 1, 1));
    auto x_of = [&](double t) { return left + pw * t / x_span; };
    auto y_of = [&](double v) { return top + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };

    std::ostringstream s;
    s << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << w << R"(" height=")" << h
      << R"(" font-family="sans-serif" font-size="12">)" << '\n';
    s << R"(<rect width="100%" height="100%" fill="white"/>)" << '\n';
    s << R"(<text x=")" << left << R"(" y="24" font-size="15">)" << title
      << " - validation accuracy (EMA)</text>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        s << R"(<line x1=")" << left << R"(" x2=")" << left + pw << R"(" y1=")" << y_of(v)
          << R"(" y2=")" << y_of(v) << R"(" stroke="#ddd"/>)" << '\n';
        s << R"(<text x=")" << left - 8 << R"(" y=")" << y_of(v) + 4 << R"(" text-anchor="end">)"
          << format_number(v) << "</text>\n";
    }
    s << R"(<line x1=")" << left << R"(" x2=")" << left + pw << R"(" y1=")" << top + ph
      << R"(" y2=")" << top + ph << R"(" stroke="black"/>)" << '\n';
    s << R"(<line x1=")" << left << R"(" x2=")" << left << R"(" y1=")" << top << R"(" y2=")"
      << top + ph << R"(" stroke="black"/>)" << '\n';
    s << R"(<text x=")" << left + pw / 2 << R"(" y=")" << h - 12
      << R"(" text-anchor="middle">epoch</text>)" << '\n';
    s << R"(<text x=")" << left + pw << R"(" y=")" << top + ph + 16 << R"(" text-anchor="end">)"
      << max_len << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto &ser = series[i];
        const char *color = colors[i % std::size(colors)];
        for (const auto b : ser.boundaries) {
            s << R"(<line x1=")" << x_of(static_cast<double>(b)) << R"(" x2=")"
              << x_of(static_cast<double>(b)) << R"(" y1=")" << top << R"(" y2=")" << top + ph
              << R"(" stroke=")" << color << R"(" stroke-dasharray="4 3"/>)" << '\n';
        }
        s << R"(<polyline fill="none" stroke-width="1.5" stroke=")" << color << R"(" points=")";
        for (std::size_t t = 0; t < ser.values.size(); ++t) {
            s << (t ? " " : "") << x_of(static_cast<double>(t)) << ',' << y_of(ser.values[t]);
        }
        s << R"("/>)" << '\n';
        const double ly = top + 16.0 * static_cast<double>(i) + 8;
        s << R"(<line x1=")" << left + pw + 12 << R"(" x2=")" << left + pw + 32 << R"(" y1=")"
          << ly << R"(" y2=")" << ly << R"(" stroke=")" << color << R"(" stroke-width="2"/>)"
          << '\n';
        s << R"(<text x=")" << left + pw + 38 << R"(" y=")" << ly + 4 << R"(">)" << ser.label
          << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

struct ReportFiles {
    fs::path results;
    fs::path summary;
    std::vector<fs::path> charts;
    std::vector<std::string> omitted_charts; ///< datasets without a chart
    fs::path manifest;
};

/// Writes results.csv, summary.csv, <dataset>.svg per dataset and
/// report.json. Datasets in `expected_datasets` with nothing to plot are
/// listed as omitted.
inline ReportFiles emit_report(const std::vector<TrialResult> &trials, const fs::path &out_dir,
                               const std::vector<std::string> &expected_datasets = {}) {
    if (trials.empty()) {
        throw DomainError("no trials to report");
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw IoError("cannot create report directory " + out_dir.string());
    }
    ReportFiles files;
    files.results = out_dir / "results.csv";
    files.summary = out_dir / "summary.csv";
    files.manifest = out_dir / "report.json";
    detail::write_text(files.results, results_csv(trials));
    const auto rows = summarize(trials);
    detail::write_text(files.summary, summary_csv(rows));

    std::set<std::string> datasets(expected_datasets.begin(), expected_datasets.end());
    for (const auto &r : trials) {
        datasets.insert(r.config.dataset);
    }
    nlohmann::json charts = nlohmann::json::array();
    nlohmann::json omitted = nlohmann::json::array();
    for (const auto &ds : datasets) {
        const auto series = chart_series(rows, ds);
        if (series.empty()) {
            files.omitted_charts.push_back(ds);
            omitted.push_back({{"dataset", ds}, {"reason", "no successful trials with validation curves"}});
            continue;
        }
        const auto path = out_dir / (ds + ".svg");
        detail::write_text(path, svg_chart(ds, series));
        files.charts.push_back(path);
        charts.push_back({{"dataset", ds}, {"file", path.filename().string()}, {"ema_alpha", kEmaAlpha}});
    }
    const nlohmann::json manifest = {{"results", "results.csv"},
                                     {"summary", "summary.csv"},
                                     {"n_trials", trials.size()},
                                     {"charts", charts},
                                     {"omitted_charts", omitted},
                                     {"interval", "mean +- 1.96 sd / sqrt(n), sample sd"}};
    detail::write_text(files.manifest, manifest.dump(1) + "\n");
    return files;
}

} // namespace hqb::experiment
