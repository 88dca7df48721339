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

#include "rqnn/gradients.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "test_util.hpp"

namespace rqnn {
namespace {

Model random_linear_model(int n, int l1, int l2, int n_r, std::vector<int> measured, std::mt19937_64 &rng) {
    Model m;
    m.circuit = testing::random_spec(n, l1, l2, n_r, std::move(measured), rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    m.head = Head::linear(u(rng), u(rng));
    return m;
}

std::vector<StateVector> states_for(int n, std::size_t count, std::mt19937_64 &rng) {
    std::vector<StateVector> out;
    for (std::size_t i = 0; i < count; i++) {
        out.push_back(testing::random_state(n, rng));
    }
    return out;
}

TEST(GradClassical, WeightGradientBeforeSoftmax) {
    const Head h = Head::linear(0.5, 0.5);
    Prediction p;
    p.member_probs = {{1.0, 0.0}, {0.0, 1.0}};
    p.member_values = {1.0, 0.0};
    p.weights = {0.5, 0.5};
    p.value = 0.5;
    const std::vector<Prediction> preds = {p};
    const std::vector<double> targets = {0.0};
    const ClassicalGradient g = grad_classical(preds, targets, LossKind::Mse, h);
    ASSERT_EQ(g.d_weights.size(), 2u);
    EXPECT_NEAR(g.d_weights[0], 1.0, 1e-15);
    EXPECT_NEAR(g.d_weights[1], 0.0, 1e-15);
    // softmax chain: w_j (g_j - sum_i w_i g_i) = 0.5 (1 - 0.5), 0.5 (0 - 0.5)
    EXPECT_NEAR(g.d_logits[0], 0.25, 1e-15);
    EXPECT_NEAR(g.d_logits[1], -0.25, 1e-15);
}

TEST(GradClassical, ZeroAtExactFit) {
    std::mt19937_64 rng(1);
    const Model m = random_linear_model(2, 0, 1, 3, {0}, rng);
    const auto states = states_for(2, 6, rng);
    std::vector<double> targets;
    for (const auto &s : states) {
        targets.push_back(predict(m.circuit, m.head, s).value);
    }
    const BatchGradient bg = loss_and_gradient(m, states, targets, LossKind::Mse);
    EXPECT_EQ(bg.loss, 0.0);
    for (double x : bg.grad.flatten()) {
        EXPECT_EQ(x, 0.0);
    }
}

TEST(GradClassical, LogitGradientIsTangentToSimplex) {
    std::mt19937_64 rng(2);
    const Model m = random_linear_model(3, 1, 1, 4, {1}, rng);
    const auto states = states_for(3, 5, rng);
    const std::vector<double> targets = {0.1, -0.4, 0.9, 0.0, 0.3};
    const BatchGradient bg = loss_and_gradient(m, states, targets, LossKind::Mse);
    EXPECT_NEAR(std::accumulate(bg.grad.d_logits.begin(), bg.grad.d_logits.end(), 0.0), 0.0, 1e-15);
}

TEST(GradCircuit, ConstantHeadHasZeroGradient) {
    std::mt19937_64 rng(3);
    Model m = random_linear_model(3, 1, 1, 2, {0}, rng);
    m.head = Head::linear(0.7, 0.0);
    const auto g = grad_circuit(m.circuit, m.head, testing::random_state(3, rng), 1.0);
    for (const auto &a : g.d_alpha) {
        for (double x : a) {
            EXPECT_EQ(x, 0.0);
        }
    }
    for (const auto &t : g.d_theta_u1) {
        for (double x : t) {
            EXPECT_EQ(x, 0.0);
        }
    }
}

TEST(GradCircuit, SingleQubitClosedForm) {
    // p+ = cos^2 a, f = p+ - p- = cos 2a, df/da = -2 sin 2a = -sqrt 2 at pi/8
    CircuitSpec s;
    s.n_sys = 1;
    s.ensemble = EnsembleSpec::identity(1, 1);
    s.ensemble.alphas[0] = {std::numbers::pi / 8, 0.0, 0.0};
    s.measured = {0};
    const auto g = grad_circuit(s, Head::linear(0.0, 1.0), StateVector::basis(1, 0), 1.0);
    EXPECT_NEAR(g.d_alpha[0][0], -std::numbers::sqrt2, 1e-13);
    EXPECT_NEAR(g.d_alpha[0][1], 0.0, 1e-13);
    EXPECT_NEAR(g.d_alpha[0][2], 0.0, 1e-13);
}

TEST(GradCircuit, FiveQubitsMatchCentralDifferences) {
    std::mt19937_64 rng(4);
    const Model m = random_linear_model(5, 1, 1, 2, {2}, rng);
    const auto states = states_for(5, 2, rng);
    const std::vector<double> targets = {0.4, -0.8};
    const FdReport r = finite_diff_check(m, states, targets, LossKind::Mse);
    EXPECT_TRUE(r.passes(1e-6, 1e-8)) << r.summary();
}

TEST(FiniteDiff, AllHeadsAndLosses) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    {
        Model m;
        m.circuit = testing::random_spec(3, 0, 0, 3, {0, 2}, rng);
        m.head = Head::poly_multi(3, 4);
        for (auto &b : m.head.params()) {
            b = u(rng);
        }
        const auto states = states_for(3, 3, rng);
        const std::vector<double> targets = {0.2, 0.5, 0.9};
        const FdReport r = finite_diff_check(m, states, targets, LossKind::Mse);
        EXPECT_TRUE(r.passes()) << r.summary();
    }
    {
        Model m;
        m.circuit = testing::random_spec(3, 1, 1, 2, {0}, rng);
        m.head = Head::poly_uni(5);
        for (auto &b : m.head.params()) {
            b = u(rng);
        }
        const auto states = states_for(3, 4, rng);
        const std::vector<double> labels = {0.0, 1.0, 1.0, 0.0};
        const FdReport r = finite_diff_check(m, states, labels, LossKind::CrossEntropy);
        EXPECT_TRUE(r.passes()) << r.summary();
    }
}

TEST(FiniteDiff, CorruptedGradientIsCaught) {
    std::mt19937_64 rng(6);
    const Model m = random_linear_model(2, 0, 1, 2, {0}, rng);
    const auto states = states_for(2, 4, rng);
    const std::vector<double> targets = {1.0, -1.0, 0.5, 0.0};
    const BatchGradient bg = loss_and_gradient(m, states, targets, LossKind::Mse);
    auto doubled = bg.grad.flatten();
    for (auto &x : doubled) {
        x *= 2.0;
    }
    const GradientBundle bad = GradientBundle::unflatten_like(m, doubled);
    const FdReport r = compare_gradients(m, bad, numeric_gradient(m, states, targets, LossKind::Mse));
    EXPECT_NEAR(r.max_rel_error(), 1.0, 1e-5);
    EXPECT_FALSE(r.passes());
}

TEST(FiniteDiff, StationaryPointUsesAbsoluteCriterion) {
    std::mt19937_64 rng(7);
    const Model m = random_linear_model(2, 0, 1, 2, {0}, rng);
    const auto states = states_for(2, 3, rng);
    std::vector<double> targets;
    for (const auto &s : states) {
        targets.push_back(predict(m.circuit, m.head, s).value);
    }
    const FdReport r = finite_diff_check(m, states, targets, LossKind::Mse);
    EXPECT_EQ(r.max_rel_error(), 0.0);
    EXPECT_LT(r.max_abs_error_small(), 1e-8);
    EXPECT_TRUE(r.passes());
}

TEST(Params, FlattenRoundTrip) {
    std::mt19937_64 rng(8);
    Model m = random_linear_model(3, 2, 1, 3, {0}, rng);
    const auto flat = flatten_params(m);
    EXPECT_EQ(flat.size(), 15u * 2 * 2 + 15u * 2 + 3u * 3 * 3 + 3 + 2);
    Model copy = m;
    std::vector<double> zeros(flat.size(), 0.0);
    unflatten_params(copy, zeros);
    unflatten_params(copy, flat);
    EXPECT_EQ(flatten_params(copy), flat);
    EXPECT_EQ(param_groups(m).size(), flat.size());
}

}  // namespace
}  // namespace rqnn
