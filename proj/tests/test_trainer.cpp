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

#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numeric>

#include "rqnn/container.hpp"

namespace rqnn {
namespace {

TrainConfig small_config() {
    TrainConfig c = TrainConfig::observable_defaults(2);
    c.n_train = 40;
    c.n_validation = 10;
    c.batch_size = 8;
    c.epochs = 5;
    c.seed = 3;
    return c;
}

Dataset small_dataset(const TrainConfig &c, std::uint64_t seed = 11) {
    Rng rng(seed);
    const ObservableTarget o = ObservableTarget::random(c.n_sys, rng);
    return make_observable_dataset(c.n_sys, o, c.n_train, c.n_validation, rng);
}

TEST(AdamStep, ZeroGradientLeavesParameters) {
    std::vector<double> p = {0.3, -1.2, 4.0};
    const std::vector<double> before = p;
    const std::vector<double> g(3, 0.0);
    AdamState s = AdamState::zeros(3);
    for (int i = 0; i < 5; i++) {
        adam_step(p, g, s, 0.01);
    }
    EXPECT_EQ(p, before);
}

TEST(AdamStep, FirstStepIsSignedLearningRate) {
    std::vector<double> p = {0.0, 0.0, 0.0};
    const std::vector<double> g = {3.0, -0.02, 1e-3};
    AdamState s = AdamState::zeros(3);
    adam_step(p, g, s, 0.05);
    EXPECT_NEAR(p[0], -0.05, 1e-9);
    EXPECT_NEAR(p[1], 0.05, 1e-7);
    EXPECT_NEAR(p[2], -0.05, 1e-5);
    EXPECT_EQ(s.t, 1u);
}

TEST(AdamStep, MatchesScalarReference) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    const std::size_t dim = 7;
    std::vector<double> p(dim), ref_p(dim), ref_m(dim, 0.0), ref_v(dim, 0.0);
    for (std::size_t k = 0; k < dim; k++) {
        p[k] = ref_p[k] = n(rng);
    }
    const std::vector<bool> mask_v = {true, true, false, true, true, false, true};
    const std::unique_ptr<bool[]> mask(new bool[dim]);
    std::copy(mask_v.begin(), mask_v.end(), mask.get());
    AdamState s = AdamState::zeros(dim);
    const AdamConfig cfg{0.8, 0.99, 1e-6};
    const double lr = 0.03;
    for (int t = 1; t <= 60; t++) {
        std::vector<double> g(dim);
        for (auto &x : g) {
            x = n(rng);
        }
        adam_step(p, g, s, lr, cfg, std::span<const bool>(mask.get(), dim));
        for (std::size_t k = 0; k < dim; k++) {
            if (!mask_v[k]) {
                continue;
            }
            ref_m[k] = 0.8 * ref_m[k] + 0.2 * g[k];
            ref_v[k] = 0.99 * ref_v[k] + 0.01 * g[k] * g[k];
            const double mh = ref_m[k] / (1.0 - std::pow(0.8, t));
            const double vh = ref_v[k] / (1.0 - std::pow(0.99, t));
            ref_p[k] -= lr * mh / (std::sqrt(vh) + 1e-6);
        }
    }
    for (std::size_t k = 0; k < dim; k++) {
        EXPECT_NEAR(p[k], ref_p[k], 1e-12);
        if (!mask_v[k]) {
            EXPECT_EQ(s.m[k], 0.0);
            EXPECT_EQ(s.v[k], 0.0);
        }
    }
}

TEST(InitParams, UniformWeightsAndDeterminism) {
    TrainConfig c = small_config();
    c.n_r = 4;
    Rng a(9), b(9);
    const Model m = init_params(c, a);
    EXPECT_EQ(flatten_params(m), flatten_params(init_params(c, b)));
    for (double w : m.circuit.ensemble.weights()) {
        EXPECT_DOUBLE_EQ(w, 0.25);
    }
    const auto flat = flatten_params(m);
    const auto groups = param_groups(m);
    for (std::size_t k = 0; k < flat.size(); k++) {
        const double bound = groups[k] == ParamGroup::Beta ? c.head_init_scale : c.init_scale;
        EXPECT_LE(std::abs(flat[k]), bound);
    }
}

TEST(InitParams, ZeroScaleIsIdentityCircuitAndConstantHead) {
    TrainConfig c = small_config();
    c.init_scale = 0.0;
    c.head_init_scale = 0.0;
    Rng rng(1);
    const Model m = init_params(c, rng);
    for (double x : flatten_params(m)) {
        EXPECT_EQ(x, 0.0);
    }
    const auto u = realization_unitary(m.circuit, 0);
    EXPECT_LT(u.max_abs_diff(ComplexMatrix::identity(4)), 1e-15);
}

TEST(Train, DeterministicForFixedSeed) {
    const TrainConfig c = small_config();
    const Dataset d = small_dataset(c);
    const TrainReport a = train(c, d);
    const TrainReport b = train(c, d);
    EXPECT_EQ(a.train_loss, b.train_loss);
    EXPECT_EQ(a.validation_loss, b.validation_loss);
    EXPECT_EQ(flatten_params(a.model), flatten_params(b.model));
    EXPECT_EQ(a.epochs_run, 5u);
    EXPECT_EQ(a.train_loss.size(), 5u);
}

TEST(Train, ZeroLearningRateKeepsLossConstant) {
    TrainConfig c = small_config();
    c.learning_rate = 0.0;
    c.epochs = 4;
    const Dataset d = small_dataset(c);
    const TrainReport r = train(c, d);
    for (double l : r.train_loss) {
        EXPECT_EQ(l, r.train_loss.front());
    }
}

TEST(Train, EvaluateMatchesLastRecordedLoss) {
    const TrainConfig c = small_config();
    const Dataset d = small_dataset(c);
    const TrainReport r = train(c, d);
    const auto tr = d.train_split();
    EXPECT_DOUBLE_EQ(evaluate(r.model, tr.states, tr.targets, c.loss).loss, r.train_loss.back());
    const auto va = d.validation_split();
    EXPECT_DOUBLE_EQ(evaluate(r.model, va.states, va.targets, c.loss).loss, r.validation_loss.back());
    for (double l : r.train_loss) {
        EXPECT_TRUE(std::isfinite(l));
        EXPECT_GE(l, 0.0);
    }
    const double total = std::accumulate(r.sorted_weights.begin(), r.sorted_weights.end(), 0.0);
    EXPECT_NEAR(total, 1.0, 1e-15);
    EXPECT_TRUE(std::is_sorted(r.sorted_weights.rbegin(), r.sorted_weights.rend()));
}

TEST(Evaluate, PerfectModelHasZeroLoss) {
    const TrainConfig c = small_config();
    Rng rng(5);
    const Model m = random_model(c, rng);
    const Dataset d = small_dataset(c);
    std::vector<double> targets;
    for (const auto &s : d.states) {
        targets.push_back(predict(m.circuit, m.head, s).value);
    }
    EXPECT_LE(evaluate(m, d.states, targets, LossKind::Mse).loss, 1e-20);
}

TEST(Evaluate, RenyiGhzHeavySetIsFinite) {
    TrainConfig c = TrainConfig::renyi_defaults(2, 2);
    Rng rng(6);
    const Model m = init_params(c, rng);
    std::vector<StateVector> states;
    std::vector<double> targets;
    for (int i = 0; i < 6; i++) {
        std::vector<cplx> a(32);
        a.front() = a.back() = 1.0;
        states.emplace_back(5, a);
        targets.push_back(renyi_oracle(states.back(), 2, 2));
        states.push_back(gen_random_state(5, rng));
        targets.push_back(renyi_oracle(states.back(), 2, 2));
    }
    const EvalResult e = evaluate(m, states, targets, LossKind::Mse);
    EXPECT_TRUE(std::isfinite(e.loss));
    EXPECT_FALSE(e.accuracy.has_value());
}

TEST(Train, FrozenUnitariesStayAtIdentity) {
    TrainConfig c = small_config();
    c.train_unitaries = false;
    c.l1 = 1;
    const Dataset d = small_dataset(c);
    const TrainReport r = train(c, d);
    const auto flat = flatten_params(r.model);
    const auto groups = param_groups(r.model);
    bool alpha_moved = false;
    for (std::size_t k = 0; k < flat.size(); k++) {
        if (groups[k] == ParamGroup::ThetaU1 || groups[k] == ParamGroup::ThetaU2) {
            EXPECT_EQ(flat[k], 0.0);
        }
        alpha_moved |= groups[k] == ParamGroup::Alpha && flat[k] != 0.0;
    }
    EXPECT_TRUE(alpha_moved);
}

TEST(Train, NonFiniteLossIsReportedAsDivergence) {
    const TrainConfig c = small_config();
    Dataset d = small_dataset(c);
    d.targets[d.train.front()] = std::numeric_limits<double>::quiet_NaN();
    const TrainReport r = train(c, d);
    EXPECT_TRUE(r.diverged);
    EXPECT_LT(r.epochs_run, c.epochs);
}

TEST(Train, StopLossEndsEarly) {
    TrainConfig c = small_config();
    c.stop_loss = 1e6;
    const TrainReport r = train(c, small_dataset(c));
    EXPECT_TRUE(r.stopped_early);
    EXPECT_EQ(r.epochs_run, 1u);
    EXPECT_EQ(r.first_epoch_below, std::nullopt);
}

TEST(TrainConfig, ValidationAndDefaults) {
    const TrainConfig d = TrainConfig::observable_defaults(4);
    EXPECT_EQ(d.l2, 6);
    EXPECT_EQ(d.n_train, 500u);
    EXPECT_EQ(d.batch_size, 100u);
    EXPECT_EQ(d.epochs, 2000u);
    EXPECT_DOUBLE_EQ(d.learning_rate, 0.01);
    TrainConfig bad = small_config();
    bad.learning_rate = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = small_config();
    bad.n_r = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = small_config();
    bad.measured = {2};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Checkpoint, RoundTripResumes) {
    const TrainConfig c = small_config();
    const Dataset d = small_dataset(c);
    const TrainReport r = train(c, d);
    const auto path = std::filesystem::temp_directory_path() / ("rqnn_ckpt_" + std::to_string(::getpid()));
    Checkpoint ck{r.model, r.epochs_run, r.optimizer.t, r.optimizer.m, r.optimizer.v};
    write_checkpoint(path, ck);
    const Checkpoint back = read_checkpoint(path);
    std::filesystem::remove(path);
    EXPECT_EQ(flatten_params(back.model), flatten_params(r.model));
    EXPECT_EQ(back.model.circuit.measured, r.model.circuit.measured);
    EXPECT_EQ(back.first_moment, r.optimizer.m);
    EXPECT_EQ(back.second_moment, r.optimizer.v);
    EXPECT_EQ(back.epoch, 5u);
    const auto va = d.validation_split();
    EXPECT_EQ(evaluate(back.model, va.states, va.targets, c.loss).loss, r.validation_loss.back());
}

}  // namespace
}  // namespace rqnn
