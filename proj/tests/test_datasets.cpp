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

#include "rqnn/datasets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <unistd.h>

#include "rqnn/container.hpp"
#include "rqnn/image_io.hpp"
#include "test_util.hpp"

namespace rqnn {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("rqnn_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

StateVector ghz(int n) {
    std::vector<cplx> a(std::size_t{1} << n);
    a.front() = a.back() = 1.0;
    return StateVector(n, a);
}

TEST(RandomState, UnitNormAndDeterministic) {
    Rng a(42), b(42);
    for (int i = 0; i < 10000; i++) {
        const StateVector s = gen_random_state(3, a);
        ASSERT_NEAR(s.norm(), 1.0, 1e-12);
        const StateVector t = gen_random_state(3, b);
        for (std::size_t k = 0; k < s.dim(); k++) {
            ASSERT_EQ(s[k], t[k]);
        }
    }
}

TEST(RandomState, FirstQubitZExpectationAveragesToZero) {
    Rng rng(7);
    const int draws = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < draws; i++) {
        const StateVector s = gen_random_state(2, rng);
        const double z = std::norm(s[0]) + std::norm(s[1]) - std::norm(s[2]) - std::norm(s[3]);
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / draws;
    const double sigma = std::sqrt((sum2 / draws - mean * mean) / draws);
    EXPECT_LT(std::abs(mean), 3.0 * sigma);
}

TEST(ObservableDataset, IdentityTargetIsOne) {
    Rng rng(1);
    ObservableTarget o{std::vector<double>(4, 1.0)};
    const Dataset d = make_observable_dataset(2, o, 20, 5, rng);
    for (double t : d.targets) {
        EXPECT_NEAR(t, 1.0, 1e-14);
    }
    EXPECT_EQ(d.train.size(), 20u);
    EXPECT_EQ(d.validation.size(), 5u);
}

TEST(ObservableDataset, BasisStatesGiveEigenvalues) {
    const ObservableTarget o{{1.0, 1.0, -1.0, -1.0}};
    for (std::size_t k = 0; k < 4; k++) {
        EXPECT_DOUBLE_EQ(o.expectation(StateVector::basis(2, k)), k < 2 ? 1.0 : -1.0);
    }
}

TEST(ObservableDataset, MatchesDenseQuadraticForm) {
    Rng rng(2);
    const ObservableTarget o = ObservableTarget::random(3, rng);
    for (double e : o.eigenvalues) {
        EXPECT_GE(e, -2.5);
        EXPECT_LE(e, 2.5);
    }
    const ComplexMatrix m = o.matrix();
    const double lo = *std::min_element(o.eigenvalues.begin(), o.eigenvalues.end());
    const double hi = *std::max_element(o.eigenvalues.begin(), o.eigenvalues.end());
    const Dataset d = make_observable_dataset(3, o, 65, 10, rng);
    for (std::size_t i = 0; i < d.size(); i++) {
        const auto mv = testing::mat_vec(m, d.states[i].amplitudes());
        cplx q{};
        for (std::size_t k = 0; k < mv.size(); k++) {
            q += std::conj(d.states[i][k]) * mv[k];
        }
        EXPECT_NEAR(d.targets[i], q.real(), 1e-13);
        EXPECT_GE(d.targets[i], lo - 1e-12);
        EXPECT_LE(d.targets[i], hi + 1e-12);
    }
}

TEST(ObservableDataset, EnforcesSizeRule) {
    Rng rng(3);
    const ObservableTarget o = ObservableTarget::random(2, rng);
    EXPECT_THROW(make_observable_dataset(2, o, 16, 0, rng), std::invalid_argument);
    EXPECT_NO_THROW(make_observable_dataset(2, o, 17, 0, rng));
}

TEST(Renyi, CentralQubits) {
    EXPECT_EQ(central_qubits(5, 1), (std::vector<int>{2}));
    EXPECT_EQ(central_qubits(5, 2), (std::vector<int>{1, 2}));
    EXPECT_EQ(central_qubits(5, 3), (std::vector<int>{1, 2, 3}));
}

TEST(Renyi, ProductStateIsPure) {
    Rng rng(4);
    const StateVector a = gen_random_state(1, rng);
    const StateVector b = gen_random_state(4, rng);
    std::vector<cplx> amps;
    for (std::size_t i = 0; i < a.dim(); i++) {
        for (std::size_t j = 0; j < b.dim(); j++) {
            amps.push_back(a[i] * b[j]);
        }
    }
    const StateVector psi(5, amps);
    // subsystem {0} of a product over {0} | {1..4}
    const std::vector<int> keep = {0};
    const ComplexMatrix rho = partial_trace(psi, keep);
    EXPECT_NEAR(renyi_trace(rho, 2), 1.0, 1e-12);
    EXPECT_NEAR(renyi_trace(rho, 3), 1.0, 1e-12);
}

TEST(Renyi, GhzValues) {
    const StateVector g = ghz(5);
    EXPECT_NEAR(renyi_oracle(g, 2, 2), 0.5, 1e-14);
    EXPECT_NEAR(renyi_oracle(g, 2, 3), 0.25, 1e-14);
    EXPECT_NEAR(renyi_oracle(g, 1, 2), 0.5, 1e-14);
}

TEST(Renyi, SingleQubitCubicClosedForm) {
    Rng rng(5);
    for (int i = 0; i < 100; i++) {
        const StateVector s = gen_random_state(5, rng);
        const std::vector<int> keep = {2};
        const ComplexMatrix rho = partial_trace(s, keep);
        const double r11 = rho(0, 0).real();
        const double closed = 1.0 - 3.0 * r11 + 3.0 * r11 * r11 + 3.0 * std::norm(rho(0, 1));
        EXPECT_NEAR(renyi_oracle(s, 1, 3), closed, 1e-12);
    }
}

TEST(Renyi, MatchesDenseDensityMatrixPowers) {
    Rng rng(6);
    for (int i = 0; i < 100; i++) {
        const StateVector s = gen_random_state(5, rng);
        const std::vector<int> keep = central_qubits(5, 2);
        const ComplexMatrix rho = partial_trace(s, keep);
        const ComplexMatrix r2 = testing::naive_mul(rho, rho);
        const ComplexMatrix r3 = testing::naive_mul(r2, rho);
        EXPECT_NEAR(renyi_oracle(s, 2, 2), r2.trace().real(), 1e-12);
        EXPECT_NEAR(renyi_oracle(s, 2, 3), r3.trace().real(), 1e-12);
    }
}

TEST(RenyiDataset, SizesRangeAndDeterminism) {
    Rng a(9), b(9);
    const Dataset d = make_renyi_dataset(5, 2, 2, 200, 20, a);
    const Dataset e = make_renyi_dataset(5, 2, 2, 200, 20, b);
    EXPECT_EQ(d.train.size(), 200u);
    for (std::size_t i = 0; i < d.size(); i++) {
        EXPECT_GT(d.targets[i], 0.0);
        EXPECT_LE(d.targets[i], 1.0 + 1e-12);
        EXPECT_EQ(d.targets[i], e.targets[i]);
    }
}

TEST(EncodeImage, ConstantImage) {
    const std::vector<double> px(64, 0.37);
    const StateVector s = encode_image(px);
    for (std::size_t k = 0; k < 32; k++) {
        EXPECT_NEAR(std::abs(s[k] - cplx{1.0 / 8, 1.0 / 8}), 0.0, 1e-15);
    }
}

TEST(EncodeImage, SinglePixel) {
    std::vector<double> px(64, 0.0);
    px[0] = 0.8;
    const StateVector s = encode_image(px);
    EXPECT_NEAR(std::abs(s[0] - cplx{1.0, 0.0}), 0.0, 1e-15);
    for (std::size_t k = 1; k < 32; k++) {
        EXPECT_EQ(s[k], cplx{});
    }
    px[0] = 0.0;
    px[3] = 0.5;  // pixel 3 is the imaginary part of amplitude 1
    EXPECT_NEAR(std::abs(encode_image(px)[1] - cplx{0.0, 1.0}), 0.0, 1e-15);
}

TEST(EncodeImage, NormalizesAndRejectsBlank) {
    Rng rng(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> px(64);
    for (auto &p : px) {
        p = u(rng);
    }
    EXPECT_NEAR(encode_image(px).norm(), 1.0, 1e-12);
    EXPECT_THROW(encode_image(std::vector<double>(64, 0.0)), std::invalid_argument);
    EXPECT_THROW(encode_image(std::vector<double>(63, 1.0)), std::invalid_argument);
}

TEST(ImageIo, GrayscaleWeights) {
    Image rgb{1, 1, 3, {1.0, 1.0, 1.0}};
    EXPECT_NEAR(to_grayscale(rgb).pixels[0], 0.9999, 1e-15);
}

TEST(ImageIo, PoolingConstantsAndCheckerboard) {
    Image c{32, 32, 1, std::vector<double>(1024, 0.25)};
    for (double v : image_features(c)) {
        EXPECT_NEAR(v, 0.25, 1e-15);
    }
    Image board{32, 32, 1, std::vector<double>(1024)};
    for (int r = 0; r < 32; r++) {
        for (int col = 0; col < 32; col++) {
            board.pixels[r * 32 + col] = (r + col) % 2;
        }
    }
    for (double v : image_features(board)) {
        EXPECT_DOUBLE_EQ(v, 0.5);
    }
}

TEST(ImageIo, PnmRoundTripAndDirectoryLoad) {
    const fs::path dir = scratch_dir("images");
    Rng rng(11);
    const SyntheticImages imgs = make_synthetic_images(12, rng);
    write_image_directory(dir, imgs);
    const ImageDirectory listing = scan_image_directory(dir);
    EXPECT_EQ(listing.class_names, (std::vector<std::string>{"class0", "class1"}));
    EXPECT_EQ(listing.files.size(), 12u);
    const Image back = read_pnm(listing.files.front());
    EXPECT_EQ(back.width, 32);
    EXPECT_EQ(back.channels, 1);
    const Dataset d = load_image_dataset(dir, 4, 3);
    EXPECT_EQ(d.train.size(), 8u);
    EXPECT_EQ(d.validation.size(), 4u);
    for (double t : d.targets) {
        EXPECT_TRUE(t == 0.0 || t == 1.0);
    }
    std::ofstream(dir / "class0" / "bad.pgm") << "P5\n32 32\n255\n";  // truncated
    EXPECT_THROW(load_image_dataset(dir, 4, 3), std::runtime_error);
    fs::create_directories(dir / "class2");
    EXPECT_THROW(scan_image_directory(dir), std::runtime_error);
    fs::remove_all(dir);
}

TEST(SyntheticImages, LabelsFollowScoreSignAndBalance) {
    Rng rng(12);
    const SyntheticImages imgs = make_synthetic_images(40, rng, 0.05);
    int ones = 0;
    for (std::size_t i = 0; i < imgs.images.size(); i++) {
        const Image img{32, 32, 1, imgs.images[i]};
        const double score = synthetic_label_score(encode_image(image_features(img)));
        EXPECT_GT(std::abs(score), 0.05);
        EXPECT_EQ(score > 0.0, imgs.labels[i] == 1.0);
        ones += imgs.labels[i] == 1.0;
    }
    EXPECT_EQ(ones, 20);
}

TEST(SyntheticImages, ScoreIsQubitZeroPurity) {
    Rng rng(14);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; trial++) {
        std::vector<double> px(64);
        for (auto &p : px) {
            p = u(rng) * u(rng);
        }
        const StateVector s = encode_image(px);
        const ComplexMatrix rho = partial_trace(s, std::vector<int>{0});
        // Tr rho^2 = (1 + |r|^2) / 2
        const double purity = testing::naive_mul(rho, rho).trace().real();
        EXPECT_NEAR(synthetic_label_score(s), 2.0 * purity - 1.0 - kSyntheticPurityThreshold, 1e-13);
    }
}

TEST(Container, DatasetRoundTrip) {
    const fs::path dir = scratch_dir("container");
    Rng rng(13);
    const Dataset d = make_renyi_dataset(5, 1, 3, 30, 10, rng);
    write_dataset(dir / "d.rqnn", d);
    const Dataset e = read_dataset(dir / "d.rqnn");
    EXPECT_EQ(e.task, d.task);
    EXPECT_EQ(e.n_sys, 5);
    EXPECT_EQ(e.train, d.train);
    EXPECT_EQ(e.validation, d.validation);
    EXPECT_EQ(e.targets, d.targets);
    for (std::size_t i = 0; i < d.size(); i++) {
        EXPECT_NEAR(e.states[i].norm(), 1.0, 1e-12);
        for (std::size_t k = 0; k < 32; k++) {
            EXPECT_LT(std::abs(e.states[i][k] - d.states[i][k]), 1e-6);  // complex64 storage
        }
    }
    std::ofstream(dir / "bad.rqnn") << "NOPE";
    EXPECT_THROW(read_dataset(dir / "bad.rqnn"), std::runtime_error);
    fs::remove_all(dir);
}

}  // namespace
}  // namespace rqnn
