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
// Command-line front end: prepare, train-ae, train, grid, report.
#include "hqb/hqb.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hqb;

namespace {

constexpr const char *kTrialFile = "trial.json";

std::string dataset_name(const data::PreparedDataset &p) {
    return p.manifest.at("dataset").get<std::string>();
}

json dataset_ref(const fs::path &dir, const data::PreparedDataset &p) {
    return {{"dir", fs::absolute(dir).lexically_normal().string()},
            {"name", dataset_name(p)},
            {"split_sha256", p.manifest.at("split").at("sha256")}};
}

struct PrepareArgs {
    std::string dataset;
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    std::string out;
    long label_column = -1;
    std::optional<std::size_t> subsample;
    std::optional<std::size_t> subsample_test;
};

int cmd_prepare(const PrepareArgs &a) {
    data::PrepareOptions o;
    o.dataset = a.dataset;
    for (const auto &p : a.inputs) {
        o.inputs.emplace_back(p);
    }
    o.seed = a.seed;
    o.label_column = a.label_column;
    o.subsample = a.subsample;
    o.subsample_test = a.subsample_test;
    const auto prepared = data::prepare_dataset(o);
    const fs::path out(a.out);
    data::write_dataset_manifest(out, prepared.manifest);
    const auto dataset_json = out / data::kDatasetManifestName;
    experiment::write_run_manifest(
        out / "manifest.json",
        experiment::run_manifest("prepare", {{"dataset", a.dataset}, {"seed", a.seed}},
                                 {dataset_json}, out));
    const auto &s = prepared.manifest.at("split");
    std::cout << a.dataset << ": " << prepared.dataset.n_samples() << " rows, "
              << prepared.dataset.n_features() << " features, " << prepared.dataset.n_classes
              << " classes; split " << s.at("train") << '/' << s.at("val") << '/' << s.at("test")
              << " -> " << dataset_json.string() << '\n';
    return 0;
}

struct TrainAeArgs {
    std::string dataset;
    std::optional<double> lr;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> epochs;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_train_ae(const TrainAeArgs &a) {
    const auto prepared = data::load_prepared(a.dataset);
    auto cfg = experiment::default_ae_config(dataset_name(prepared), a.seed);
    cfg.learning_rate = a.lr.value_or(cfg.learning_rate);
    cfg.batch_size = a.batch.value_or(cfg.batch_size);
    cfg.epochs = a.epochs.value_or(cfg.epochs);
    const auto result = experiment::train_autoencoder(prepared.dataset, cfg);
    const fs::path out(a.out);
    models::write_json(out, models::to_json(result.autoencoder, cfg.seed));
    auto result_json = experiment::to_json(result);
    result_json["encoder_argmax_test_accuracy"] = experiment::encoder_argmax_accuracy(
        result.autoencoder.encoder, prepared.dataset, prepared.dataset.split.test);
    json config = experiment::to_json(cfg);
    config["dataset_ref"] = dataset_ref(a.dataset, prepared);
    auto manifest = experiment::run_manifest("train-ae", config, {out}, out.parent_path());
    manifest["result"] = result_json;
    experiment::write_run_manifest(fs::path(out.string() + ".manifest.json"), manifest);
    std::cout << "autoencoder test MSE " << experiment::format_number(result.test_loss) << " ("
              << result.autoencoder.parameter_count() << " parameters) -> " << out.string() << '\n';
    return 0;
}

struct TrainArgs {
    std::string model;
    std::string dataset;
    std::optional<double> lr;
    std::size_t batch = 5;
    std::optional<std::size_t> epochs;
    std::size_t layers = 6;
    std::uint64_t seed = 0;
    std::string encoder;
    std::string out;
    std::string backend = "adjoint";
};

int cmd_train(const TrainArgs &a) {
    const auto prepared = data::load_prepared(a.dataset);
    const auto name = dataset_name(prepared);
    const auto kind = models::model_kind_from_string(a.model);
    auto cfg = experiment::default_train_config(name, kind, a.seed);
    cfg.learning_rate = a.lr.value_or(cfg.learning_rate);
    cfg.batch_size = a.batch;
    cfg.epochs = a.epochs.value_or(cfg.epochs);
    cfg.vqc_layers = a.layers;
    cfg.backend = quantum::backend_from_string(a.backend);

    std::optional<models::Autoencoder> ae;
    if (models::uses_encoder(kind)) {
        if (a.encoder.empty()) {
            throw DomainError(a.model + " needs --encoder <checkpoint> (see train-ae)");
        }
        ae = models::autoencoder_from_json(models::read_json(a.encoder));
    }
    auto run = experiment::run_trial(prepared.dataset, cfg, ae ? &ae->encoder : nullptr);
    const fs::path out(a.out);
    fs::create_directories(out);
    std::vector<fs::path> outputs{out / kTrialFile, out / "results.csv"};
    models::write_json(outputs[0], experiment::to_json(run.result));
    {
        std::ofstream csv(outputs[1], std::ios::binary);
        csv << experiment::results_csv({run.result});
    }
    if (run.model) {
        outputs.push_back(out / "model.json");
        models::save_model(outputs.back(), *run.model);
    }
    json config = experiment::to_json(cfg);
    config["dataset_ref"] = dataset_ref(a.dataset, prepared);
    if (ae) {
        config["encoder"] = {{"path", fs::absolute(a.encoder).lexically_normal().string()},
                             {"sha256", sha256_file(a.encoder)}};
    }
    experiment::write_run_manifest(out / "manifest.json",
                                   experiment::run_manifest("train", config, outputs, out));
    if (run.result.failed) {
        std::cerr << "trial failed: " << run.result.message << '\n';
        return 2;
    }
    std::cout << a.model << " on " << name << ": test accuracy "
              << experiment::format_number(run.result.test_accuracy) << " -> " << out.string()
              << '\n';
    return 0;
}

fs::path resolve(const fs::path &base, const std::string &p) {
    const fs::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string cell_dir(double lr, std::size_t batch) {
    return "lr" + experiment::format_number(lr) + "_b" + std::to_string(batch);
}

experiment::GridSpec grid_spec_from_json(const json &j) {
    experiment::GridSpec g;
    const auto &axes = j.at("axes");
    g.learning_rates = axes.at("lr").get<std::vector<double>>();
    g.batch_sizes = axes.contains("batch") ? axes.at("batch").get<std::vector<std::size_t>>()
                                           : std::vector<std::size_t>{5};
    g.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    g.metric = experiment::metric_from_string(j.value("metric", "test_accuracy"));
    return g;
}

int cmd_grid_autoencoder(const json &cfg, const fs::path &base, const fs::path &out) {
    const fs::path dataset_dir = resolve(base, cfg.at("dataset").get<std::string>());
    const auto prepared = data::load_prepared(dataset_dir);
    auto spec = grid_spec_from_json(cfg);
    if (!cfg.contains("metric")) {
        spec.metric = experiment::Metric::TestReconstructionLoss;
    }
    const std::size_t epochs = cfg.value("epochs", std::size_t{500});
    const auto name = dataset_name(prepared);
    auto outcome = experiment::grid_search(
        spec,
        [&](const experiment::GridCell &cell, std::uint64_t seed) {
            experiment::AeConfig c{name, seed, cell.learning_rate, cell.batch_size, epochs};
            return experiment::train_autoencoder(prepared.dataset, c).test_loss;
        },
        experiment::worker_count(spec.cells().size() * spec.seeds.size()));
    fs::create_directories(out);
    const auto grid_path = out / "grid.json";
    json grid = experiment::to_json(outcome);
    grid["task"] = "autoencoder";
    grid["dataset"] = name;
    models::write_json(grid_path, grid);
    json config = cfg;
    config["dataset_ref"] = dataset_ref(dataset_dir, prepared);
    experiment::write_run_manifest(out / "manifest.json",
                                   experiment::run_manifest("grid", config, {grid_path}, out));
    if (outcome.best) {
        const auto &b = outcome.best_cell();
        std::cout << "best: lr " << experiment::format_number(b.cell.learning_rate) << ", batch "
                  << b.cell.batch_size << " (" << experiment::to_string(spec.metric) << " "
                  << experiment::format_number(*b.mean) << ")\n";
    } else {
        std::cout << "every grid cell failed\n";
    }
    return outcome.best ? 0 : 2;
}

int cmd_grid_classifier(const json &cfg, const fs::path &base, const fs::path &out) {
    const fs::path dataset_dir = resolve(base, cfg.at("dataset").get<std::string>());
    const auto prepared = data::load_prepared(dataset_dir);
    const auto name = dataset_name(prepared);
    const auto spec = grid_spec_from_json(cfg);
    std::vector<models::ModelKind> kinds;
    if (cfg.contains("models")) {
        for (const auto &m : cfg.at("models")) {
            kinds.push_back(models::model_kind_from_string(m.get<std::string>()));
        }
    } else {
        kinds.push_back(models::model_kind_from_string(cfg.at("model").get<std::string>()));
    }
    const std::size_t epochs = cfg.value("epochs", experiment::default_epochs(name));
    const std::size_t layers = cfg.value("layers", std::size_t{6});
    const auto backend = quantum::backend_from_string(cfg.value("backend", "adjoint"));

    // Encoders: one shared checkpoint, or one autoencoder trained per seed.
    std::map<std::uint64_t, models::Autoencoder> encoders;
    const bool needs_encoder = std::any_of(kinds.begin(), kinds.end(), models::uses_encoder);
    if (needs_encoder) {
        if (cfg.contains("encoder")) {
            const auto ae = models::autoencoder_from_json(
                models::read_json(resolve(base, cfg.at("encoder").get<std::string>())));
            for (const auto s : spec.seeds) {
                encoders.emplace(s, ae);
            }
        } else {
            const json ae_cfg = cfg.value("autoencoder", json::object());
            std::vector<models::Autoencoder> trained(spec.seeds.size());
            experiment::parallel_for(spec.seeds.size(), experiment::worker_count(spec.seeds.size()),
                                     [&](std::size_t i) {
                                         auto c = experiment::default_ae_config(name, spec.seeds[i]);
                                         c.learning_rate = ae_cfg.value("lr", c.learning_rate);
                                         c.batch_size = ae_cfg.value("batch", c.batch_size);
                                         c.epochs = ae_cfg.value("epochs", c.epochs);
                                         trained[i] = experiment::train_autoencoder(
                                                          prepared.dataset, c)
                                                          .autoencoder;
                                     });
            for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
                encoders.emplace(spec.seeds[i], std::move(trained[i]));
            }
        }
    }

    std::vector<experiment::TrialResult> all;
    std::mutex all_mutex;
    json grids = json::object();
    std::vector<fs::path> outputs;
    for (const auto kind : kinds) {
        const auto kind_name = std::string(models::to_string(kind));
        auto outcome = experiment::grid_search(
            spec,
            [&](const experiment::GridCell &cell, std::uint64_t seed) {
                experiment::TrainConfig c;
                c.model = kind;
                c.dataset = name;
                c.seed = seed;
                c.learning_rate = cell.learning_rate;
                c.batch_size = cell.batch_size;
                c.epochs = epochs;
                c.vqc_layers = layers;
                c.backend = backend;
                const neural::Mlp *enc =
                    models::uses_encoder(kind) ? &encoders.at(seed).encoder : nullptr;
                const auto run = experiment::run_trial(prepared.dataset, c, enc);
                const auto dir = out / "trials" / kind_name /
                                 cell_dir(cell.learning_rate, cell.batch_size) /
                                 ("seed" + std::to_string(seed));
                models::write_json(dir / kTrialFile, experiment::to_json(run.result));
                {
                    const std::lock_guard lock(all_mutex);
                    all.push_back(run.result);
                }
                if (run.result.failed) {
                    throw DivergenceError(run.result.message);
                }
                return spec.metric == experiment::Metric::TestLoss ? run.result.test_loss
                                                                   : run.result.test_accuracy;
            },
            experiment::worker_count(spec.cells().size() * spec.seeds.size()));
        grids[kind_name] = experiment::to_json(outcome);
        if (outcome.best) {
            const auto &b = outcome.best_cell();
            std::cout << kind_name << ": best lr " << experiment::format_number(b.cell.learning_rate)
                      << ", batch " << b.cell.batch_size << " (" << experiment::to_string(spec.metric)
                      << " " << experiment::format_number(*b.mean) << ")\n";
        } else {
            std::cout << kind_name << ": every grid cell failed\n";
        }
    }
    fs::create_directories(out);
    const auto grid_path = out / "grid.json";
    models::write_json(grid_path, {{"task", "classifier"}, {"dataset", name}, {"models", grids}});
    outputs.push_back(grid_path);
    const auto files = experiment::emit_report(all, out, {name});
    outputs.push_back(files.results);
    outputs.push_back(files.summary);
    outputs.insert(outputs.end(), files.charts.begin(), files.charts.end());
    outputs.push_back(files.manifest);
    json config = cfg;
    config["dataset_ref"] = dataset_ref(dataset_dir, prepared);
    experiment::write_run_manifest(out / "manifest.json",
                                   experiment::run_manifest("grid", config, outputs, out));
    return 0;
}

int cmd_grid(const std::string &config_path, const std::string &out_override) {
    const json cfg = models::read_json(config_path);
    const fs::path base = fs::absolute(config_path).parent_path();
    const fs::path out = out_override.empty() ? resolve(base, cfg.at("out").get<std::string>())
                                              : fs::path(out_override);
    if (cfg.value("task", "classifier") == "autoencoder") {
        return cmd_grid_autoencoder(cfg, base, out);
    }
    return cmd_grid_classifier(cfg, base, out);
}

int cmd_report(const std::vector<std::string> &inputs, const std::string &out_dir) {
    std::vector<fs::path> files;
    for (const auto &in : inputs) {
        const fs::path p(in);
        if (fs::is_regular_file(p)) {
            files.push_back(p);
            continue;
        }
        if (!fs::is_directory(p)) {
            throw IoError("report input not found: " + in);
        }
        for (const auto &e : fs::recursive_directory_iterator(p)) {
            if (e.is_regular_file() && e.path().filename() == kTrialFile) {
                files.push_back(e.path());
            }
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<experiment::TrialResult> trials;
    for (const auto &f : files) {
        trials.push_back(experiment::trial_from_json(models::read_json(f)));
    }
    if (trials.empty()) {
        throw DomainError("no trial.json files found under the given inputs");
    }
    const fs::path out(out_dir);
    const auto report = experiment::emit_report(trials, out);
    std::vector<fs::path> outputs{report.results, report.summary};
    outputs.insert(outputs.end(), report.charts.begin(), report.charts.end());
    outputs.push_back(report.manifest);
    json sources = json::array();
    for (const auto &f : files) {
        sources.push_back({{"path", fs::absolute(f).lexically_normal().string()},
                           {"sha256", sha256_file(f)}});
    }
    experiment::write_run_manifest(
        out / "manifest.json",
        experiment::run_manifest("report", {{"inputs", inputs}, {"trials", sources}}, outputs, out));
    std::cout << trials.size() << " trials -> " << report.results.string() << ", "
              << report.charts.size() << " chart(s)";
    if (!report.omitted_charts.empty()) {
        std::cout << ", " << report.omitted_charts.size() << " omitted";
    }
    std::cout << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical benchmark: datasets, training, grids and reports"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    int status = 0;

    PrepareArgs prep;
    auto *prepare = app.add_subcommand("prepare", "Load, normalize and split a dataset");
    prepare->add_option("--dataset", prep.dataset, "banknote|breastcancer|mnist|audiomnist-csv")
        ->required()
        ->check(CLI::IsMember({"banknote", "breastcancer", "mnist", "audiomnist-csv"}));
    prepare->add_option("--input", prep.inputs, "CSV file, or 4 IDX files / one directory for mnist")
        ->required();
    prepare->add_option("--seed", prep.seed, "Split seed");
    prepare->add_option("--out", prep.out, "Output directory")->required();
    prepare->add_option("--label-column", prep.label_column,
                        "Label column index, negative counts from the end");
    prepare->add_option("--subsample", prep.subsample, "Keep this many train/val rows");
    prepare->add_option("--subsample-test", prep.subsample_test,
                        "Keep this many rows of a designated test portion");
    prepare->callback([&] { status = cmd_prepare(prep); });

    TrainAeArgs ae;
    auto *train_ae = app.add_subcommand("train-ae", "Train the compression autoencoder");
    train_ae->add_option("--dataset", ae.dataset, "Prepared dataset directory")->required();
    train_ae->add_option("--lr", ae.lr, "Adam learning rate (dataset default if omitted)");
    train_ae->add_option("--batch", ae.batch, "Batch size (dataset default if omitted)");
    train_ae->add_option("--epochs", ae.epochs, "Epochs (default 500)");
    train_ae->add_option("--seed", ae.seed, "Seed");
    train_ae->add_option("--out", ae.out, "Checkpoint path")->required();
    train_ae->callback([&] { status = cmd_train_ae(ae); });

    TrainArgs tr;
    auto *train = app.add_subcommand("train", "Train one classifier");
    train->add_option("--model", tr.model, "ae-vqc|vqc-amplitude|dqc|sequent|nn|ae-nn")
        ->required()
        ->check(CLI::IsMember({"ae-vqc", "vqc-amplitude", "dqc", "sequent", "nn", "ae-nn"}));
    train->add_option("--dataset", tr.dataset, "Prepared dataset directory")->required();
    train->add_option("--lr", tr.lr, "SGD learning rate (dataset/model default if omitted)");
    train->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
    train->add_option("--epochs", tr.epochs, "Epochs per stage (dataset default if omitted)");
    train->add_option("--layers", tr.layers, "VQC layers")->capture_default_str();
    train->add_option("--seed", tr.seed, "Seed");
    train->add_option("--encoder", tr.encoder, "Autoencoder checkpoint for ae-vqc / ae-nn");
    train->add_option("--out", tr.out, "Output directory")->required();
    train->add_option("--backend", tr.backend, "adjoint|parameter-shift|checked")
        ->capture_default_str()
        ->check(CLI::IsMember({"adjoint", "parameter-shift", "checked"}));
    train->callback([&] { status = cmd_train(tr); });

    std::string grid_config;
    std::string grid_out;
    auto *grid = app.add_subcommand("grid", "Run a hyperparameter grid from a JSON spec");
    grid->add_option("--config", grid_config, "Grid spec JSON")->required()->check(CLI::ExistingFile);
    grid->add_option("--out", grid_out, "Output directory (overrides the spec's \"out\")");
    grid->callback([&] { status = cmd_grid(grid_config, grid_out); });

    std::vector<std::string> report_in;
    std::string report_out;
    auto *report = app.add_subcommand("report", "Summarize trial results");
    report->add_option("--in", report_in, "Directories (searched for trial.json) or files")
        ->required();
    report->add_option("--out", report_out, "Report directory")->required();
    report->callback([&] { status = cmd_report(report_in, report_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const hqb::Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: malformed JSON: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return status;
}
