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

#include "rqnn/heads.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"

namespace rqnn {
namespace {

TEST(EvalHead, LinearAffine) {
    EXPECT_DOUBLE_EQ(eval_head(Head::linear(0.5, 2.0), 0.25), 1.0);
}

TEST(EvalHead, QuadraticWithIdentityMatrix) {
    Head h = Head::poly_multi(2, 2);
    h.params()[0] = 1.0;
    h.set_beta2(0, 0, 1.0);
    h.set_beta2(1, 1, 1.0);
    const std::vector<double> x = {0.6, 0.4};
    EXPECT_NEAR(eval_head(h, x), 1.52, 1e-15);
}

TEST(EvalHead, QuinticUnivariate) {
    Head h = Head::poly_uni(5);
    h.params()[1] = 1.0;
    h.params()[5] = 1.0;
    EXPECT_DOUBLE_EQ(eval_head(h, 0.5), 0.53125);
}

TEST(EvalHead, CubicMatchesExplicitTripleSum) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t d = 4;
    Head h = Head::poly_multi(3, d);
    for (auto &b : h.params()) {
        b = u(rng);
    }
    const std::vector<double> x = {0.1, 0.2, 0.3, 0.4};
    double expected = h.beta0();
    for (std::size_t i = 0; i < d; i++) {
        expected += h.beta1(i) * x[i];
        for (std::size_t j = 0; j < d; j++) {
            expected += h.beta2(i, j) * x[i] * x[j];
            for (std::size_t k = 0; k < d; k++) {
                expected += h.beta3(i, j, k) * x[i] * x[j] * x[k];
            }
        }
    }
    EXPECT_NEAR(eval_head(h, x), expected, 1e-14);
    EXPECT_EQ(h.beta2(1, 3), h.beta2(3, 1));
    EXPECT_EQ(h.beta3(0, 2, 3), h.beta3(3, 0, 2));
    EXPECT_EQ(h.beta3(0, 2, 3), h.beta3(2, 3, 0));
}

TEST(EvalHead, ArityMismatchThrows) {
    const std::vector<double> x = {0.5, 0.5};
    EXPECT_THROW(eval_head(Head::linear(0, 1), x), std::invalid_argument);
    EXPECT_THROW(eval_head(Head::poly_multi(2, 2), 0.5), std::invalid_argument);
    const std::vector<double> wrong = {0.2, 0.3, 0.5};
    EXPECT_THROW(eval_head(Head::poly_multi(2, 2), wrong), std::invalid_argument);
}

TEST(Predict, SingletonEnsembleIsHeadOfProbs) {
    std::mt19937_64 rng(2);
    const CircuitSpec s = testing::random_spec(3, 1, 1, 1, {0}, rng);
    const Head h = Head::linear(0.3, -1.1);
    const StateVector psi = testing::random_state(3, rng);
    const auto p = forward_probs(s, 0, psi);
    EXPECT_NEAR(predict(s, h, psi).value, 0.3 - 1.1 * (p[0] - p[1]), 1e-14);
}

TEST(Predict, WeightedMean) {
    CircuitSpec s;
    s.n_sys = 1;
    s.ensemble = EnsembleSpec::identity(1, 2);
    s.ensemble.logits = {0.0, std::log(0.7 / 0.3)};
    // member 1 flips the qubit: <Z> = -1
    s.ensemble.alphas[1] = {std::numbers::pi / 2, 0.0, 0.0};
    s.measured = {0};
    const Head h = Head::linear(1.5, -0.5);  // member values 1.0 and 2.0
    const Prediction p = predict(s, h, StateVector::basis(1, 0));
    EXPECT_NEAR(p.member_values[0], 1.0, 1e-14);
    EXPECT_NEAR(p.member_values[1], 2.0, 1e-14);
    EXPECT_NEAR(p.value, 1.7, 1e-14);
}

TEST(Predict, MatchesDenseOracleComposition) {
    std::mt19937_64 rng(3);
    Head h = Head::poly_multi(2, 4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto &b : h.params()) {
        b = u(rng);
    }
    for (int trial = 0; trial < 5; trial++) {
        const CircuitSpec s = testing::random_spec(4, 1, 1, 3, {1, 2}, rng);
        const StateVector psi = testing::random_state(4, rng);
        const auto w = s.ensemble.weights();
        double expected = 0.0;
        for (std::size_t i = 0; i < 3; i++) {
            const auto p = testing::dense_outcome_probs(testing::oracle_realization(s, i), psi, s.measured);
            // explicit quadratic form
            double f = h.beta0();
            for (std::size_t a = 0; a < 4; a++) {
                f += h.beta1(a) * p[a];
                for (std::size_t b = 0; b < 4; b++) {
                    f += h.beta2(a, b) * p[a] * p[b];
                }
            }
            expected += w[i] * f;
        }
        EXPECT_NEAR(predict(s, h, psi).value, expected, 1e-12);
    }
}

TEST(Predict, InvariantUnderMemberPermutation) {
    std::mt19937_64 rng(4);
    CircuitSpec s = testing::random_spec(3, 1, 1, 3, {0}, rng);
    const Head h = Head::linear(0.2, 0.9);
    const StateVector psi = testing::random_state(3, rng);
    const double before = predict(s, h, psi).value;
    std::swap(s.ensemble.logits[0], s.ensemble.logits[2]);
    for (int q = 0; q < 3; q++) {
        std::swap(s.ensemble.alphas[q], s.ensemble.alphas[2 * 3 + q]);
    }
    EXPECT_NEAR(predict(s, h, psi).value, before, 1e-14);
}

TEST(MseLoss, Basics) {
    const std::vector<double> a = {0.3, -0.2};
    EXPECT_EQ(mse_loss(a, a), 0.0);
    const std::vector<double> p = {1.0, 0.0};
    const std::vector<double> t = {0.0, 0.0};
    EXPECT_DOUBLE_EQ(mse_loss(p, t), 0.5);
    const std::vector<double> empty;
    EXPECT_THROW(mse_loss(empty, empty), std::invalid_argument);
}

TEST(CrossEntropy, SymmetricPoint) {
    const std::vector<double> p = {0.0, 0.0};
    const std::vector<double> t = {1.0, 0.0};
    const auto r = cross_entropy_loss(p, t);
    EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(r.g[0], 0.5);
}

TEST(CrossEntropy, ConfidentCorrectLimit) {
    const std::vector<double> p = {30.0};
    const std::vector<double> t = {1.0};
    EXPECT_LT(cross_entropy_loss(p, t).loss, 1e-10);
}

TEST(CrossEntropy, MixedBatchByHand) {
    const std::vector<double> p = {0.7, -1.3, 2.2};
    const std::vector<double> t = {1.0, 1.0, 0.0};
    double expected = 0.0;
    for (std::size_t m = 0; m < 3; m++) {
        const double g = 1.0 / (1.0 + std::exp(-p[m]));
        expected += -(t[m] * std::log(g) + (1.0 - t[m]) * std::log(1.0 - g));
    }
    EXPECT_NEAR(cross_entropy_loss(p, t).loss, expected / 3.0, 1e-15);
}

TEST(CrossEntropy, DerivativeIsSigmoidMinusLabel) {
    const double h = 1e-6;
    for (double pred : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
        for (double label : {0.0, 1.0}) {
            const double fd = (sample_loss(LossKind::CrossEntropy, pred + h, label) -
                               sample_loss(LossKind::CrossEntropy, pred - h, label)) /
                              (2 * h);
            const double d = sample_loss_derivative(LossKind::CrossEntropy, pred, label);
            EXPECT_NEAR(d, sigmoid(pred) - label, 1e-15);
            EXPECT_NEAR(d, fd, 1e-8 * std::max(1.0, std::abs(d)));
        }
    }
}

TEST(Accuracy, Counting) {
    const std::vector<double> labels = {1, 0, 0};
    const std::vector<double> right = {0.9, 0.1, 0.2};
    const std::vector<double> wrong = {0.1, 0.9, 0.8};
    const std::vector<double> mixed = {0.9, 0.2, 0.6};
    EXPECT_DOUBLE_EQ(accuracy(right, labels), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(wrong, labels), 0.0);
    EXPECT_DOUBLE_EQ(accuracy(mixed, labels), 2.0 / 3.0);
    const std::vector<double> half = {0.5};
    const std::vector<double> one = {1.0};
    EXPECT_DOUBLE_EQ(accuracy(half, one), 1.0);
}

TEST(ReduceOnSimplex, RemovesGaugeDirection) {
    // b1 = c (1, 1) and b2 = c' 11^T are constants on the simplex
    Head h = Head::poly_multi(2, 2);
    h.set_beta1(0, 0.4);
    h.set_beta1(1, 0.4);
    h.set_beta2(0, 0, 0.7);
    h.set_beta2(0, 1, 0.7);
    h.set_beta2(1, 1, 0.7);
    const auto r = reduce_on_simplex(h);
    EXPECT_LT(r.quadratic_norm, 1e-15);
    // and the reduced polynomial reproduces f on the simplex
    Head g = Head::poly_multi(3, 4);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto &b : g.params()) {
        b = u(rng);
    }
    const auto rg = reduce_on_simplex(g);
    EXPECT_EQ(rg.free_dim, 3u);
    EXPECT_GT(rg.cubic_norm, 0.0);
}

}  // namespace
}  // namespace rqnn
