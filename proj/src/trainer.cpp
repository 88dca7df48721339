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

#include "rqnn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace rqnn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState &state, double learning_rate,
               const AdamConfig &cfg, std::span<const bool> mask) {
    if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw std::invalid_argument("adam_step: parameter, gradient and moment sizes differ");
    }
    if (!mask.empty() && mask.size() != params.size()) {
        throw std::invalid_argument("adam_step: mask size differs from parameter count");
    }
    state.t++;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t k = 0; k < params.size(); k++) {
        if (!mask.empty() && !mask[k]) {
            continue;
        }
        const double g = grads[k];
        state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
        state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[k] / c1;
        const double v_hat = state.v[k] / c2;
        params[k] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

TrainConfig TrainConfig::observable_defaults(int n_sys) {
    struct Row {
        int l2;
        std::size_t n_train, batch, epochs;
    };
    static constexpr Row kTable[] = {
        {1, 100, 20, 1000},
        {4, 200, 40, 1500},
        {6, 500, 100, 2000},
        {8, 1500, 300, 3000},
    };
    if (n_sys < 2 || n_sys > 5) {
        throw std::invalid_argument("observable defaults exist for n_sys in 2..5, got " + std::to_string(n_sys));
    }
    const Row &r = kTable[n_sys - 2];
    TrainConfig c;
    c.task = TaskKind::Observable;
    c.n_sys = n_sys;
    c.n_r = 3;
    c.measured = {0};
    c.l1 = 0;
    c.l2 = r.l2;
    c.head = {HeadKind::Linear, 1};
    c.loss = LossKind::Mse;
    c.n_train = r.n_train;
    c.batch_size = r.batch;
    c.epochs = r.epochs;
    return c;
}

TrainConfig TrainConfig::renyi_defaults(int n_sub, int order) {
    if (n_sub != 1 && n_sub != 2) {
        throw std::invalid_argument("renyi defaults exist for n_sub 1 or 2");
    }
    if (order != 2 && order != 3) {
        throw std::invalid_argument("renyi order must be 2 or 3");
    }
    TrainConfig c;
    c.task = TaskKind::Renyi;
    c.n_sys = 5;
    c.n_r = n_sub == 1 ? 3 : 9;
    c.measured = central_qubits(5, n_sub);
    c.l1 = c.l2 = 0;
    c.train_unitaries = false;
    c.head = {HeadKind::PolyMulti, order};
    c.loss = LossKind::Mse;
    c.n_train = n_sub == 1 ? 100 : 200;
    c.batch_size = n_sub == 1 ? 20 : 40;
    c.epochs = 3000;
    return c;
}

TrainConfig TrainConfig::image_defaults() {
    TrainConfig c;
    c.task = TaskKind::Image;
    c.n_sys = kImageQubits;
    c.n_r = 4;
    c.measured = {0};
    c.l1 = c.l2 = 4;
    c.head = {HeadKind::PolyUni, 5};
    c.loss = LossKind::CrossEntropy;
    c.n_train = 1200;
    c.batch_size = 300;
    c.epochs = 300;
    return c;
}

void TrainConfig::validate() const {
    const auto bad = [](const std::string &what) { throw std::invalid_argument(what); };
    if (n_sys < 1 || n_sys > 12) {
        bad("n_sys must be in 1..12");
    }
    if (n_r < 1) {
        bad("n_r must be >= 1");
    }
    if (l1 < 0 || l2 < 0) {
        bad("l1 and l2 must be >= 0");
    }
    if ((l1 > 0 || l2 > 0) && n_sys < 2) {
        bad("deterministic layers need n_sys >= 2");
    }
    if (measured.empty()) {
        bad("at least one measured qubit is required");
    }
    if (std::set<int>(measured.begin(), measured.end()).size() != measured.size()) {
        bad("measured qubits must be distinct");
    }
    for (int q : measured) {
        if (q < 0 || q >= n_sys) {
            bad("measured qubit " + std::to_string(q) + " out of range");
        }
    }
    switch (head.kind) {
        case HeadKind::Linear:
            if (head.order != 1) {
                bad("linear head has order 1");
            }
            break;
        case HeadKind::PolyUni:
            if (head.order < 1) {
                bad("polynomial head degree must be >= 1");
            }
            break;
        case HeadKind::PolyMulti:
            if (head.order != 2 && head.order != 3) {
                bad("multivariate head order must be 2 or 3");
            }
            break;
    }
    if (loss == LossKind::CrossEntropy && task != TaskKind::Image) {
        bad("cross-entropy loss is for the image task");
    }
    if (n_train == 0) {
        bad("n_train must be >= 1");
    }
    if (batch_size == 0 || batch_size > n_train) {
        bad("batch_size must be in 1..n_train");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        bad("learning_rate must be finite and >= 0");
    }
    if (!(init_scale >= 0.0) || !(head_init_scale >= 0.0)) {
        bad("init scales must be >= 0");
    }
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0 && adam.epsilon > 0.0)) {
        bad("adam hyperparameters out of range");
    }
}

Model init_params(const TrainConfig &config, Rng &rng) {
    config.validate();
    Model m;
    CircuitSpec &c = m.circuit;
    c.n_sys = config.n_sys;
    c.u1 = DeterministicLayerSpec::brick_wall(config.n_sys, config.l1);
    c.u2 = DeterministicLayerSpec::brick_wall(config.n_sys, config.l2);
    c.ensemble = EnsembleSpec::identity(config.n_sys, config.n_r);
    c.measured = config.measured;
    switch (config.head.kind) {
        case HeadKind::Linear:
            m.head = Head::linear(0.0, 0.0);
            break;
        case HeadKind::PolyUni:
            m.head = Head::poly_uni(config.head.order);
            break;
        case HeadKind::PolyMulti:
            m.head = Head::poly_multi(config.head.order, c.num_outcomes());
            break;
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double s = config.init_scale;
    const double us = config.train_unitaries ? s : 0.0;
    for (auto *layer : {&c.u1, &c.u2}) {
        for (auto &unit : layer->units) {
            for (auto &g : unit) {
                for (auto &x : g.c) {
                    x = us * u(rng);
                }
            }
        }
    }
    for (auto &a : c.ensemble.alphas) {
        for (auto &x : a) {
            x = s * u(rng);
        }
    }
    for (auto &b : m.head.params()) {
        b = config.head_init_scale * u(rng);
    }
    return m;
}

Model random_model(const TrainConfig &config, Rng &rng, double scale) {
    TrainConfig c = config;
    c.train_unitaries = true;
    Model m = init_params(c, rng);
    std::vector<double> flat = flatten_params(m);
    std::uniform_real_distribution<double> u(-scale, scale);
    for (auto &x : flat) {
        x = u(rng);
    }
    unflatten_params(m, flat);
    return m;
}

EvalResult evaluate(const Model &model, std::span<const StateVector> states, std::span<const double> targets,
                    LossKind loss) {
    if (states.size() != targets.size() || states.empty()) {
        throw std::invalid_argument("evaluate: need equal, nonzero numbers of states and targets");
    }
    const CompiledCircuit circuit(model.circuit);
    std::vector<double> preds(states.size());
    for (std::size_t m = 0; m < states.size(); m++) {
        preds[m] = predict(circuit, model.head, states[m]).value;
    }
    EvalResult r;
    if (loss == LossKind::Mse) {
        r.loss = mse_loss(preds, targets);
    } else {
        const auto ce = cross_entropy_loss(preds, targets);
        r.loss = ce.loss;
        r.accuracy = accuracy(ce.g, targets);
    }
    return r;
}

TrainReport train(const TrainConfig &config, const Dataset &dataset, const Model *initial,
                  const AdamState *initial_optimizer) {
    config.validate();
    if (dataset.n_sys != config.n_sys) {
        throw std::invalid_argument("train: dataset qubit count does not match config");
    }
    if (dataset.train.empty()) {
        throw std::invalid_argument("train: dataset has no training samples");
    }
    const auto start = std::chrono::steady_clock::now();
    TrainReport report;
    if (initial != nullptr) {
        report.model = *initial;
    } else {
        Rng init_rng(config.seed);
        report.model = init_params(config, init_rng);
    }
    report.model.circuit.validate();
    Model &model = report.model;

    const auto train_set = dataset.train_split();
    const auto val_set = dataset.validation_split();
    const std::size_t n = train_set.states.size();
    const std::size_t batch = std::min(config.batch_size, n);

    auto params = flatten_params(model);
    report.optimizer = initial_optimizer != nullptr ? *initial_optimizer : AdamState::zeros(params.size());
    if (report.optimizer.m.size() != params.size()) {
        throw std::invalid_argument("train: optimizer state does not match model");
    }
    std::vector<bool> mask_storage;
    const auto groups = param_groups(model);
    for (auto g : groups) {
        mask_storage.push_back(config.train_unitaries || (g != ParamGroup::ThetaU1 && g != ParamGroup::ThetaU2));
    }
    const std::unique_ptr<bool[]> mask(new bool[mask_storage.size()]);
    std::copy(mask_storage.begin(), mask_storage.end(), mask.get());

    Rng shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<StateVector> bs;
    std::vector<double> bt;

    for (std::size_t epoch = 1; epoch <= config.epochs; epoch++) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t b0 = 0; b0 < n; b0 += batch) {
            const std::size_t b1 = std::min(n, b0 + batch);
            bs.clear();
            bt.clear();
            for (std::size_t k = b0; k < b1; k++) {
                bs.push_back(train_set.states[order[k]]);
                bt.push_back(train_set.targets[order[k]]);
            }
            const BatchGradient bg = loss_and_gradient(model, bs, bt, config.loss);
            const auto flat_grad = bg.grad.flatten();
            if (!std::isfinite(bg.loss) || !bg.grad.all_finite()) {
                report.diverged = true;
                break;
            }
            adam_step(params, flat_grad, report.optimizer, config.learning_rate, config.adam,
                      std::span<const bool>(mask.get(), mask_storage.size()));
            unflatten_params(model, params);
        }
        if (report.diverged) {
            break;
        }
        const EvalResult tr = evaluate(model, train_set.states, train_set.targets, config.loss);
        report.train_loss.push_back(tr.loss);
        if (tr.accuracy) {
            report.train_accuracy.push_back(*tr.accuracy);
        }
        if (!val_set.states.empty()) {
            const EvalResult va = evaluate(model, val_set.states, val_set.targets, config.loss);
            report.validation_loss.push_back(va.loss);
            if (va.accuracy) {
                report.validation_accuracy.push_back(*va.accuracy);
            }
        }
        report.epochs_run = epoch;
        if (!std::isfinite(tr.loss)) {
            report.diverged = true;
            break;
        }
        if (!report.first_epoch_below && tr.loss < config.report_threshold) {
            report.first_epoch_below = epoch;
        }
        if (config.stop_loss > 0.0 && tr.loss < config.stop_loss) {
            report.stopped_early = epoch < config.epochs;
            break;
        }
    }

    report.sorted_weights = model.circuit.ensemble.weights();
    std::sort(report.sorted_weights.begin(), report.sorted_weights.end(), std::greater<>());
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace rqnn
