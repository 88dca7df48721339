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

#include "rqnn/linalg.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <stdexcept>
#include <vector>

#include "test_util.hpp"

namespace rqnn {
namespace {

using testing::pauli;
using testing::random_anti_hermitian;
using testing::random_hermitian;
using testing::random_state;

constexpr cplx kI{0.0, 1.0};

TEST(Kron, IdentityTimesIdentity) {
    EXPECT_LT(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)).max_abs_diff(ComplexMatrix::identity(4)),
              1e-15);
}

TEST(Kron, ZTimesIdentityIsDiagonal) {
    const std::vector<double> d = {1, 1, -1, -1};
    EXPECT_EQ(kron(pauli(3), ComplexMatrix::identity(2)).max_abs_diff(ComplexMatrix::diagonal(d)), 0.0);
}

TEST(Kron, XTimesXEntries) {
    const ComplexMatrix xx = kron(pauli(1), pauli(1));
    // (a (x) b)(2i+k, 2j+l) = a(i,j) b(k,l): only the anti-diagonal survives
    for (std::size_t r = 0; r < 4; r++) {
        for (std::size_t c = 0; c < 4; c++) {
            EXPECT_EQ(xx(r, c), (r + c == 3) ? cplx{1.0} : cplx{0.0}) << r << "," << c;
        }
    }
}

TEST(Kron, MatchesNaiveKronOnRandomFactors) {
    std::mt19937_64 rng(3);
    const auto a = testing::random_matrix(2, rng);
    const auto b = testing::random_matrix(4, rng);
    EXPECT_LT(kron(a, b).max_abs_diff(testing::naive_kron(a, b)), 1e-15);
}

TEST(Matexp, ZeroIsIdentity) {
    EXPECT_LT(matexp(ComplexMatrix(4, 4)).max_abs_diff(ComplexMatrix::identity(4)), 1e-15);
}

TEST(Matexp, HalfPiRotationAboutX) {
    const ComplexMatrix u = matexp(pauli(1) * (kI * (std::numbers::pi / 2)));
    EXPECT_LT(u.max_abs_diff(pauli(1) * kI), 1e-14);
}

TEST(Matexp, MatchesTaylorSeries) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; trial++) {
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        const ComplexMatrix a =
            (pauli(1) * (kI * u(rng))) + (pauli(2) * (kI * u(rng))) + (pauli(3) * (kI * u(rng)));
        EXPECT_LT(matexp(a).max_abs_diff(testing::taylor_exp(a)), 1e-12);
    }
    for (std::size_t n : {2u, 4u, 8u}) {
        const auto a = testing::random_matrix(n, rng, 1.5);
        EXPECT_LT(matexp(a).max_abs_diff(testing::taylor_exp(a)), 1e-11 * std::max(1.0, testing::taylor_exp(a).max_abs()));
    }
}

TEST(Matexp, AntiHermitianGivesUnitary) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10000; trial++) {
        const std::size_t n = trial % 2 == 0 ? 2 : 4;
        ASSERT_TRUE(matexp(random_anti_hermitian(n, rng, 2.0)).is_unitary(1e-12)) << trial;
    }
}

TEST(Matexp, RejectsNonSquare) { EXPECT_THROW(matexp(ComplexMatrix(2, 3)), std::invalid_argument); }

TEST(MatexpFrechet, AtZeroIsDirection) {
    std::mt19937_64 rng(1);
    const auto e = testing::random_matrix(4, rng);
    EXPECT_LT(matexp_frechet(ComplexMatrix(4, 4), e).max_abs_diff(e), 1e-14);
}

TEST(MatexpFrechet, CommutingCase) {
    const double theta = 0.7;
    const ComplexMatrix a = pauli(3) * (kI * theta);
    const ComplexMatrix e = pauli(3) * kI;
    const ComplexMatrix expected = testing::naive_mul(e, testing::taylor_exp(a));
    EXPECT_LT(matexp_frechet(a, e).max_abs_diff(expected), 1e-14);
}

TEST(MatexpFrechet, MatchesCentralDifferences) {
    std::mt19937_64 rng(5);
    const double eps = 1e-6;
    for (int trial = 0; trial < 200; trial++) {
        const std::size_t n = trial % 2 == 0 ? 2 : 4;
        const auto a = random_anti_hermitian(n, rng, 1.5);
        const auto e = random_anti_hermitian(n, rng);
        const ComplexMatrix fd = (matexp(a + e * cplx{eps}) - matexp(a - e * cplx{eps})) * cplx{0.5 / eps};
        const ComplexMatrix l = matexp_frechet(a, e);
        EXPECT_LT(l.max_abs_diff(fd) / l.max_abs(), 1e-6) << trial;
    }
}

TEST(MatexpFrechet, RejectsDimensionMismatch) {
    EXPECT_THROW(matexp_frechet(ComplexMatrix(2, 2), ComplexMatrix(4, 4)), std::invalid_argument);
}

TEST(HermitianEig, PauliZ) {
    const auto r = hermitian_eig_desc(pauli(3));
    ASSERT_EQ(r.values.size(), 2u);
    EXPECT_NEAR(r.values[0], 1.0, 1e-15);
    EXPECT_NEAR(r.values[1], -1.0, 1e-15);
}

TEST(HermitianEig, Identity) {
    for (double v : hermitian_eig_desc(ComplexMatrix::identity(4)).values) {
        EXPECT_NEAR(v, 1.0, 1e-15);
    }
}

TEST(HermitianEig, DiagonalSorted) {
    const std::vector<double> d = {0.3, -1.2, 2.5, 0.0};
    const auto r = hermitian_eig_desc(ComplexMatrix::diagonal(d));
    const std::vector<double> expected = {2.5, 0.3, 0.0, -1.2};
    for (std::size_t i = 0; i < 4; i++) {
        EXPECT_NEAR(r.values[i], expected[i], 1e-14);
    }
}

TEST(HermitianEig, ReconstructsAndSatisfiesEigenEquation) {
    std::mt19937_64 rng(9);
    for (std::size_t n : {2u, 4u, 8u, 16u, 32u}) {
        const auto a = random_hermitian(n, rng, 2.0);
        const auto r = hermitian_eig_desc(a);
        EXPECT_TRUE(std::is_sorted(r.values.rbegin(), r.values.rend()));
        ComplexMatrix lambda = ComplexMatrix::diagonal(r.values);
        const ComplexMatrix back = testing::naive_mul(testing::naive_mul(r.vectors, lambda), r.vectors.adjoint());
        EXPECT_LT(back.max_abs_diff(a), 1e-10);
        for (std::size_t k = 0; k < n; k++) {
            for (std::size_t i = 0; i < n; i++) {
                cplx av{};
                for (std::size_t j = 0; j < n; j++) {
                    av += a(i, j) * r.vectors(j, k);
                }
                EXPECT_LT(std::abs(av - r.values[k] * r.vectors(i, k)), 1e-10);
            }
        }
    }
}

TEST(HermitianEig, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eig_desc(pauli(1) * kI + pauli(3)), std::invalid_argument);
}

TEST(PartialTrace, ProductStateKeepsFactor) {
    std::mt19937_64 rng(2);
    const StateVector phi = random_state(2, rng);
    std::vector<cplx> amps(8);
    for (std::size_t i = 0; i < 4; i++) {
        amps[i] = phi[i];  // |0> (x) phi
    }
    const StateVector psi(3, amps);
    const std::vector<int> keep = {0};
    const ComplexMatrix rho = partial_trace(psi, keep);
    EXPECT_NEAR(std::abs(rho(0, 0) - 1.0), 0.0, 1e-14);
    EXPECT_LT(std::abs(rho(0, 1)) + std::abs(rho(1, 0)) + std::abs(rho(1, 1)), 1e-14);
}

TEST(PartialTrace, BellStateIsMaximallyMixed) {
    const StateVector bell(2, {1.0, 0.0, 0.0, 1.0});
    const std::vector<int> keep = {0};
    EXPECT_LT(partial_trace(bell, keep).max_abs_diff(ComplexMatrix::identity(2) * cplx{0.5}), 1e-15);
}

// rho_A[(a, a')] = sum over the rest of psi[a, r] conj(psi[a', r]) by direct index bookkeeping.
ComplexMatrix dense_reduced(const StateVector &psi, const std::vector<int> &keep) {
    const int n = psi.num_qubits();
    const ComplexMatrix rho = psi.density_matrix();
    const std::size_t dk = std::size_t{1} << keep.size();
    ComplexMatrix out(dk, dk);
    const auto sub_index = [&](std::size_t idx) {
        std::size_t s = 0;
        for (int q : keep) {
            s = 2 * s + ((idx >> (n - 1 - q)) & 1);
        }
        return s;
    };
    const auto rest_index = [&](std::size_t idx) {
        std::size_t s = 0;
        for (int q = 0; q < n; q++) {
            if (std::find(keep.begin(), keep.end(), q) == keep.end()) {
                s = 2 * s + ((idx >> (n - 1 - q)) & 1);
            }
        }
        return s;
    };
    for (std::size_t i = 0; i < psi.dim(); i++) {
        for (std::size_t j = 0; j < psi.dim(); j++) {
            if (rest_index(i) == rest_index(j)) {
                out(sub_index(i), sub_index(j)) += rho(i, j);
            }
        }
    }
    return out;
}

TEST(PartialTrace, MatchesDenseContraction) {
    std::mt19937_64 rng(4);
    for (const std::vector<int> &keep :
         {std::vector<int>{1, 2}, std::vector<int>{2}, std::vector<int>{3, 0}, std::vector<int>{0, 2, 4}}) {
        const StateVector psi = random_state(5, rng);
        const ComplexMatrix rho = partial_trace(psi, keep);
        EXPECT_LT(rho.max_abs_diff(dense_reduced(psi, keep)), 1e-14);
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
        EXPECT_TRUE(rho.is_hermitian(1e-12));
        for (double v : hermitian_eig_desc(rho).values) {
            EXPECT_GE(v, -1e-12);
        }
    }
}

TEST(PartialTrace, RejectsBadIndices) {
    std::mt19937_64 rng(1);
    const StateVector psi = random_state(3, rng);
    const std::vector<int> out_of_range = {3};
    const std::vector<int> duplicate = {1, 1};
    const std::vector<int> empty;
    EXPECT_THROW(partial_trace(psi, out_of_range), std::out_of_range);
    EXPECT_THROW(partial_trace(psi, duplicate), std::invalid_argument);
    EXPECT_THROW(partial_trace(psi, empty), std::invalid_argument);
}

TEST(StateVector, NormalizesOnConstruction) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 10000; i++) {
        ASSERT_NEAR(random_state(3, rng).norm(), 1.0, 1e-12);
    }
    EXPECT_THROW(StateVector(2, std::vector<cplx>(4)), std::invalid_argument);
    EXPECT_THROW(StateVector(2, std::vector<cplx>(3, 1.0)), std::invalid_argument);
}

}  // namespace
}  // namespace rqnn
