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
 * Mini-batch Adam training over every model parameter.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rqnn/datasets.hpp"
#include "rqnn/gradients.hpp"

namespace rqnn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }
};

/// One bias-corrected Adam update. Entries with mask[k] == false are left
/// untouched, moments included; an empty mask updates everything.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState &state, double learning_rate,
               const AdamConfig &cfg = {}, std::span<const bool> mask = {});

struct HeadConfig {
    HeadKind kind = HeadKind::Linear;
    int order = 1;  // PolyUni degree or PolyMulti order
};

struct TrainConfig {
    TaskKind task = TaskKind::Observable;
    int n_sys = 2;
    int n_r = 3;
    std::vector<int> measured = {0};
    int l1 = 0;
    int l2 = 1;
    HeadConfig head;
    LossKind loss = LossKind::Mse;

    std::size_t n_train = 100;
    std::size_t n_validation = 200;
    std::size_t batch_size = 20;
    std::size_t epochs = 1000;
    double learning_rate = 0.01;
    AdamConfig adam;

    std::uint64_t seed = 0;
    double init_scale = 0.1;
    double head_init_scale = 0.1;
    /// When false U1 and U2 start at the identity and are never updated.
    bool train_unitaries = true;

    /// Stop once the full-batch training loss falls below this (0 disables).
    double stop_loss = 0.0;
    /// The report records the first epoch whose training loss is below this.
    double report_threshold = 1e-5;

    /// Table S1 hyperparameters of the observable task for 2 <= n_sys <= 5.
    static TrainConfig observable_defaults(int n_sys);
    /// Quadratic (order 2) or cubic (order 3) head on the central n_sub qubits.
    static TrainConfig renyi_defaults(int n_sub, int order);
    static TrainConfig image_defaults();

    /// Throws std::invalid_argument naming the first bad field.
    void validate() const;
};

/// Random model for the config: theta and alpha uniform on +-init_scale,
/// logits zero, head parameters uniform on +-head_init_scale.
Model init_params(const TrainConfig &config, Rng &rng);

/// Same shapes as init_params with every parameter, logits included, uniform
/// on +-scale. Used for gradient checks away from the symmetric start.
Model random_model(const TrainConfig &config, Rng &rng, double scale = 1.0);

struct EvalResult {
    double loss = 0.0;
    std::optional<double> accuracy;
};

EvalResult evaluate(const Model &model, std::span<const StateVector> states, std::span<const double> targets,
                    LossKind loss);

struct TrainReport {
    std::vector<double> train_loss;       // full batch, after each epoch
    std::vector<double> validation_loss;  // empty when there is no validation split
    std::vector<double> train_accuracy;   // classification only
    std::vector<double> validation_accuracy;
    std::optional<std::size_t> first_epoch_below;  // 1-based
    std::size_t epochs_run = 0;
    bool diverged = false;
    bool stopped_early = false;
    Model model;
    AdamState optimizer;
    std::vector<double> sorted_weights;  // descending
    double wall_seconds = 0.0;

    double final_train_loss() const { return train_loss.empty() ? 0.0 : train_loss.back(); }
};

/// Trains from init_params(config, Rng(config.seed)), or from `initial` when given.
TrainReport train(const TrainConfig &config, const Dataset &dataset, const Model *initial = nullptr,
                  const AdamState *initial_optimizer = nullptr);

}  // namespace rqnn
