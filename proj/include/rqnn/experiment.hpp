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

/**
 * @file
 * Multi-seed runs, sweeps and their files.
 *
 * Repeat r trains with seed `trainer.seed + r`. Its dataset uses
 * `task.data_seed + r` when `task.vary_data` is set, else `task.data_seed`.
 * Per-seed outputs go to `<out>/seed_<seed>/{loss.csv,report.json,model.ckpt}`
 * and the aggregate to `<out>/summary.json`.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rqnn/config.hpp"
#include "rqnn/trainer.hpp"

namespace rqnn {

/// The diagonal observable behind an observable-task dataset; it is the first
/// draw from the data seed.
ObservableTarget observable_target(const ExperimentConfig &config, std::uint64_t data_seed);

/// The dataset of one repeat: from task.dataset when set, otherwise generated.
Dataset build_dataset(const ExperimentConfig &config, std::uint64_t data_seed);

std::uint64_t repeat_data_seed(const ExperimentConfig &config, int repeat);

struct SeedRun {
    std::uint64_t seed = 0;
    std::uint64_t data_seed = 0;
    TrainReport report;
    EvalResult train_eval;
    std::optional<EvalResult> validation_eval;
};

struct RunArtifacts {
    std::vector<std::filesystem::path> loss_csv;
    std::vector<std::filesystem::path> reports;
    std::vector<std::filesystem::path> checkpoints;
    std::filesystem::path summary;
};

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for one value

    static Stat of(const std::vector<double> &values);
};

struct TaskResult {
    std::vector<SeedRun> runs;
    Stat final_train_loss;
    Stat final_validation_loss;
    Stat log10_train_loss;
    std::optional<Stat> validation_accuracy;
    bool all_completed = true;  // no run diverged
    RunArtifacts artifacts;
};

/// One training run for repeat r, without writing files.
SeedRun run_seed(const ExperimentConfig &config, int repeat);

/// Runs every repeat on `config.workers` threads. Files are written when
/// config.out_dir is non-empty. Progress lines go to `log` when given.
TaskResult run_task(const ExperimentConfig &config, std::ostream *log = nullptr);

/// CSV `epoch,train_loss,val_loss[,accuracy]` with 17 significant digits;
/// val_loss is empty without a validation split.
void write_loss_csv(const std::filesystem::path &path, const TrainReport &report);

struct LossCurve {
    std::vector<std::size_t> epoch;
    std::vector<double> train_loss;
    std::vector<double> validation_loss;
    std::vector<double> accuracy;
    bool has_accuracy = false;
};

LossCurve read_loss_csv(const std::filesystem::path &path);

nlohmann::json seed_report_json(const ExperimentConfig &config, const SeedRun &run);
nlohmann::json summary_json(const ExperimentConfig &config, const TaskResult &result);

RunArtifacts write_outputs(const ExperimentConfig &config, TaskResult &result);

struct SweepCell {
    int n_sys = 0;
    int n_r = 0;
    Stat final_train_loss;
    Stat log10_train_loss;
    std::optional<Stat> validation_accuracy;
    bool all_completed = true;
};

/// Varies n_sys (observable task only, each with its hyperparameter-table
/// defaults) and n_r; the remaining trainer settings come from `base`.
/// Cells write under `<out>/nsys<N>_nr<R>/` when base.out_dir is set.
std::vector<SweepCell> run_sweep(const ExperimentConfig &base, const std::vector<int> &n_sys_values,
                                 const std::vector<int> &n_r_values, std::ostream *log = nullptr);

/// Plain-text table of mean log10 final train loss, rows n_sys, columns n_r.
std::string format_sweep_table(const std::vector<SweepCell> &cells);
void write_sweep_csv(const std::filesystem::path &path, const std::vector<SweepCell> &cells);

}  // namespace rqnn
