// Copyright 2026 The rqnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rqnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rqnn/container.hpp"
#include "rqnn/image_io.hpp"

namespace rqnn {

namespace fs = std::filesystem;

std::uint64_t repeat_data_seed(const ExperimentConfig &config, int repeat) {
    return config.data_seed + (config.vary_data ? static_cast<std::uint64_t>(repeat) : 0);
}

ObservableTarget observable_target(const ExperimentConfig &config, std::uint64_t data_seed) {
    Rng rng(data_seed);
    return ObservableTarget::random(config.train.n_sys, rng, config.eig_lo, config.eig_hi);
}

Dataset build_dataset(const ExperimentConfig &config, std::uint64_t data_seed) {
    const TrainConfig &t = config.train;
    if (!config.dataset_path.empty()) {
        Dataset d = read_dataset(config.dataset_path);
        if (d.task != t.task || d.n_sys != t.n_sys) {
            throw std::runtime_error(config.dataset_path + ": dataset task or qubit count does not match the config");
        }
        return d;
    }
    Rng rng(data_seed);
    switch (t.task) {
        case TaskKind::Observable: {
            const auto target = ObservableTarget::random(t.n_sys, rng, config.eig_lo, config.eig_hi);
            Dataset d = make_observable_dataset(t.n_sys, target, t.n_train, t.n_validation, rng);
            d.seed = data_seed;
            return d;
        }
        case TaskKind::Renyi: {
            Dataset d = make_renyi_dataset(t.n_sys, config.n_sub, config.renyi_order, t.n_train, t.n_validation, rng);
            d.seed = data_seed;
            return d;
        }
        case TaskKind::Image: {
            if (!config.image_dir.empty()) {
                return load_image_dataset(config.image_dir, t.n_validation, data_seed);
            }
            const auto images = make_synthetic_images(t.n_train + t.n_validation, rng, config.synthetic_margin);
            std::vector<StateVector> states;
            states.reserve(images.images.size());
            Image img;
            img.width = img.height = kRawSide;
            for (const auto &pixels : images.images) {
                img.pixels = pixels;
                states.push_back(encode_image(image_features(img)));
            }
            return make_image_dataset(std::move(states), images.labels, t.n_validation, data_seed);
        }
    }
    throw std::logic_error("build_dataset: unknown task");
}

Stat Stat::of(const std::vector<double> &values) {
    Stat s;
    if (values.empty()) {
        return s;
    }
    for (double v : values) {
        s.mean += v;
    }
    s.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

SeedRun run_seed(const ExperimentConfig &config, int repeat) {
    SeedRun run;
    run.seed = config.train.seed + static_cast<std::uint64_t>(repeat);
    run.data_seed = repeat_data_seed(config, repeat);
    TrainConfig tc = config.train;
    tc.seed = run.seed;
    const Dataset data = build_dataset(config, run.data_seed);
    run.report = train(tc, data);
    const auto tr = data.train_split();
    run.train_eval = evaluate(run.report.model, tr.states, tr.targets, tc.loss);
    if (!data.validation.empty()) {
        const auto va = data.validation_split();
        run.validation_eval = evaluate(run.report.model, va.states, va.targets, tc.loss);
    }
    return run;
}

namespace {

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

fs::path seed_dir(const ExperimentConfig &config, std::uint64_t seed) {
    return fs::path(config.out_dir) / ("seed_" + std::to_string(seed));
}

nlohmann::json stat_json(const Stat &s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

}  // namespace

TaskResult run_task(const ExperimentConfig &config, std::ostream *log) {
    TaskResult result;
    result.runs.resize(config.repeats);
    std::vector<std::exception_ptr> errors(config.repeats);
    std::atomic<int> next{0};
    std::mutex log_mutex;
    const auto worker = [&] {
        for (int r = next++; r < config.repeats; r = next++) {
            try {
                result.runs[r] = run_seed(config, r);
                if (log != nullptr) {
                    const auto &run = result.runs[r];
                    std::lock_guard lock(log_mutex);
                    *log << "seed " << run.seed << ": train loss " << fmt17(run.report.final_train_loss());
                    if (run.validation_eval) {
                        *log << ", validation loss " << run.validation_eval->loss;
                        if (run.validation_eval->accuracy) {
                            *log << ", validation accuracy " << *run.validation_eval->accuracy;
                        }
                    }
                    *log << (run.report.diverged ? " (diverged)" : "") << " [" << run.report.wall_seconds << " s]\n";
                }
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const int n_workers = std::min(config.workers, config.repeats);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; w++) {
            pool.emplace_back(worker);
        }
        for (auto &th : pool) {
            th.join();
        }
    }
    for (int r = 0; r < config.repeats; r++) {
        if (errors[r]) {
            try {
                std::rethrow_exception(errors[r]);
            } catch (const std::exception &e) {
                throw std::runtime_error("repeat " + std::to_string(r) + " (seed " +
                                         std::to_string(config.train.seed + r) + "): " + e.what());
            }
        }
    }

    std::vector<double> train_loss, val_loss, log_loss, val_acc;
    for (const auto &run : result.runs) {
        const double l = run.report.final_train_loss();
        train_loss.push_back(l);
        log_loss.push_back(std::log10(std::max(l, std::numeric_limits<double>::min())));
        if (run.validation_eval) {
            val_loss.push_back(run.validation_eval->loss);
            if (run.validation_eval->accuracy) {
                val_acc.push_back(*run.validation_eval->accuracy);
            }
        }
        result.all_completed = result.all_completed && !run.report.diverged;
    }
    result.final_train_loss = Stat::of(train_loss);
    result.final_validation_loss = Stat::of(val_loss);
    result.log10_train_loss = Stat::of(log_loss);
    if (!val_acc.empty()) {
        result.validation_accuracy = Stat::of(val_acc);
    }
    if (!config.out_dir.empty()) {
        result.artifacts = write_outputs(config, result);
    }
    return result;
}

void write_loss_csv(const fs::path &path, const TrainReport &report) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot write");
    }
    const bool acc = !report.train_accuracy.empty();
    out << "epoch,train_loss,val_loss" << (acc ? ",accuracy" : "") << '\n';
    out << std::setprecision(17);
    for (std::size_t e = 0; e < report.train_loss.size(); e++) {
        out << e + 1 << ',' << report.train_loss[e] << ',';
        if (e < report.validation_loss.size()) {
            out << report.validation_loss[e];
        }
        if (acc) {
            out << ',' << report.train_accuracy[e];
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

LossCurve read_loss_csv(const fs::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open");
    }
    LossCurve c;
    std::string line;
    std::getline(in, line);
    if (line == "epoch,train_loss,val_loss,accuracy") {
        c.has_accuracy = true;
    } else if (line != "epoch,train_loss,val_loss") {
        throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (line.back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != (c.has_accuracy ? 4u : 3u)) {
            throw std::runtime_error(path.string() + ": malformed row '" + line + "'");
        }
        c.epoch.push_back(std::stoull(cells[0]));
        c.train_loss.push_back(std::stod(cells[1]));
        if (!cells[2].empty()) {
            c.validation_loss.push_back(std::stod(cells[2]));
        }
        if (c.has_accuracy) {
            c.accuracy.push_back(std::stod(cells[3]));
        }
    }
    return c;
}

nlohmann::json seed_report_json(const ExperimentConfig &config, const SeedRun &run) {
    const TrainReport &r = run.report;
    nlohmann::json j;
    j["config"] = config.echo();
    j["seed"] = run.seed;
    j["data_seed"] = run.data_seed;
    j["epochs_run"] = r.epochs_run;
    j["diverged"] = r.diverged;
    j["stopped_early"] = r.stopped_early;
    j["final_train_loss"] = r.final_train_loss();
    j["min_train_loss"] = r.train_loss.empty() ? 0.0 : *std::min_element(r.train_loss.begin(), r.train_loss.end());
    j["train_loss"] = run.train_eval.loss;
    if (run.train_eval.accuracy) {
        j["train_accuracy"] = *run.train_eval.accuracy;
    }
    if (run.validation_eval) {
        j["validation_loss"] = run.validation_eval->loss;
        if (run.validation_eval->accuracy) {
            j["validation_accuracy"] = *run.validation_eval->accuracy;
        }
    }
    j["first_epoch_below_threshold"] =
        r.first_epoch_below ? nlohmann::json(*r.first_epoch_below) : nlohmann::json(nullptr);
    j["sorted_weights"] = r.sorted_weights;
    j["head_params"] = std::vector<double>(r.model.head.params().begin(), r.model.head.params().end());
    j["wall_seconds"] = r.wall_seconds;
    j["defaults"] = {
        {"init", "theta and alpha uniform on +-init_scale, logits zero, head uniform on +-head_init_scale"},
        {"init_scale", config.train.init_scale},
        {"head_init_scale", config.train.head_init_scale},
        {"adam_beta1", config.train.adam.beta1},
        {"adam_beta2", config.train.adam.beta2},
        {"adam_epsilon", config.train.adam.epsilon},
    };
    return j;
}

nlohmann::json summary_json(const ExperimentConfig &config, const TaskResult &result) {
    nlohmann::json j;
    j["config"] = config.echo();
    j["repeats"] = result.runs.size();
    j["all_completed"] = result.all_completed;
    j["final_train_loss"] = stat_json(result.final_train_loss);
    j["log10_final_train_loss"] = stat_json(result.log10_train_loss);
    j["final_validation_loss"] = stat_json(result.final_validation_loss);
    if (result.validation_accuracy) {
        j["validation_accuracy"] = stat_json(*result.validation_accuracy);
    }
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto &run : result.runs) {
        seeds.push_back({{"seed", run.seed},
                         {"final_train_loss", run.report.final_train_loss()},
                         {"diverged", run.report.diverged}});
    }
    j["seeds"] = seeds;
    return j;
}

RunArtifacts write_outputs(const ExperimentConfig &config, TaskResult &result) {
    RunArtifacts a;
    const fs::path root(config.out_dir);
    fs::create_directories(root);
    for (const auto &run : result.runs) {
        const fs::path dir = seed_dir(config, run.seed);
        fs::create_directories(dir);
        a.loss_csv.push_back(dir / "loss.csv");
        write_loss_csv(a.loss_csv.back(), run.report);
        a.reports.push_back(dir / "report.json");
        std::ofstream(a.reports.back()) << seed_report_json(config, run).dump(2) << '\n';
        if (config.write_checkpoint) {
            Checkpoint ck;
            ck.model = run.report.model;
            ck.epoch = run.report.epochs_run;
            ck.adam_step = run.report.optimizer.t;
            ck.first_moment = run.report.optimizer.m;
            ck.second_moment = run.report.optimizer.v;
            a.checkpoints.push_back(dir / "model.ckpt");
            write_checkpoint(a.checkpoints.back(), ck);
        }
    }
    a.summary = root / "summary.json";
    std::ofstream out(a.summary);
    out << summary_json(config, result).dump(2) << '\n';
    if (!out) {
        throw std::runtime_error(a.summary.string() + ": write failed");
    }
    result.artifacts = a;
    return a;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig &base, const std::vector<int> &n_sys_values,
                                 const std::vector<int> &n_r_values, std::ostream *log) {
    const bool observable = base.train.task == TaskKind::Observable;
    if (!observable && !n_sys_values.empty() &&
        (n_sys_values.size() != 1 || n_sys_values[0] != base.train.n_sys)) {
        throw std::invalid_argument("sweep: n_sys can only be varied for the observable task");
    }
    const std::vector<int> systems = n_sys_values.empty() ? std::vector<int>{base.train.n_sys} : n_sys_values;
    std::vector<SweepCell> cells;
    for (int n_sys : systems) {
        for (int n_r : n_r_values) {
            ExperimentConfig c = base;
            if (observable && n_sys != base.train.n_sys) {
                const TrainConfig &b = base.train;
                c.train = TrainConfig::observable_defaults(n_sys);
                c.train.seed = b.seed;
                c.train.learning_rate = b.learning_rate;
                c.train.adam = b.adam;
                c.train.init_scale = b.init_scale;
                c.train.head_init_scale = b.head_init_scale;
                c.train.stop_loss = b.stop_loss;
                c.train.report_threshold = b.report_threshold;
            }
            c.train.n_r = n_r;
            if (!base.out_dir.empty()) {
                c.out_dir = (fs::path(base.out_dir) / ("nsys" + std::to_string(n_sys) + "_nr" + std::to_string(n_r)))
                                .string();
            }
            finalize_config(c);
            if (log != nullptr) {
                *log << "== n_sys " << n_sys << ", n_r " << n_r << '\n';
            }
            const TaskResult r = run_task(c, log);
            cells.push_back({n_sys, n_r, r.final_train_loss, r.log10_train_loss, r.validation_accuracy,
                             r.all_completed});
        }
    }
    if (!base.out_dir.empty()) {
        write_sweep_csv(fs::path(base.out_dir) / "sweep.csv", cells);
    }
    return cells;
}

std::string format_sweep_table(const std::vector<SweepCell> &cells) {
    std::vector<int> systems, members;
    for (const auto &c : cells) {
        if (std::find(systems.begin(), systems.end(), c.n_sys) == systems.end()) {
            systems.push_back(c.n_sys);
        }
        if (std::find(members.begin(), members.end(), c.n_r) == members.end()) {
            members.push_back(c.n_r);
        }
    }
    std::ostringstream os;
    os << "mean log10 final train loss\n" << std::setw(8) << "n_sys";
    for (int m : members) {
        os << std::setw(12) << ("n_r=" + std::to_string(m));
    }
    os << '\n' << std::fixed << std::setprecision(2);
    for (int s : systems) {
        os << std::setw(8) << s;
        for (int m : members) {
            const auto it = std::find_if(cells.begin(), cells.end(),
                                         [&](const SweepCell &c) { return c.n_sys == s && c.n_r == m; });
            os << std::setw(12);
            if (it == cells.end()) {
                os << "-";
            } else {
                os << it->log10_train_loss.mean;
            }
        }
        os << '\n';
    }
    return os.str();
}

void write_sweep_csv(const fs::path &path, const std::vector<SweepCell> &cells) {
    std::ofstream out(path);
    out << "n_sys,n_r,mean_train_loss,std_train_loss,mean_log10_train_loss,std_log10_train_loss,"
           "mean_validation_accuracy\n"
        << std::setprecision(17);
    for (const auto &c : cells) {
        out << c.n_sys << ',' << c.n_r << ',' << c.final_train_loss.mean << ',' << c.final_train_loss.stddev << ','
            << c.log10_train_loss.mean << ',' << c.log10_train_loss.stddev << ',';
        if (c.validation_accuracy) {
            out << c.validation_accuracy->mean;
        }
        out << '\n';
    }
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

}  // namespace rqnn
