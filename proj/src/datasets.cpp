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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rqnn/image_io.hpp"

namespace rqnn {

const char *task_kind_name(TaskKind kind) {
    switch (kind) {
        case TaskKind::Observable:
            return "observable";
        case TaskKind::Renyi:
            return "renyi";
        case TaskKind::Image:
            return "image";
    }
    return "?";
}

std::optional<TaskKind> parse_task_kind(std::string_view name) {
    if (name == "observable") {
        return TaskKind::Observable;
    }
    if (name == "renyi") {
        return TaskKind::Renyi;
    }
    if (name == "image") {
        return TaskKind::Image;
    }
    return std::nullopt;
}

Dataset::Split Dataset::gather(std::span<const std::size_t> indices) const {
    Split s;
    s.states.reserve(indices.size());
    s.targets.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= states.size()) {
            throw std::out_of_range("Dataset::gather: sample index out of range");
        }
        s.states.push_back(states[i]);
        s.targets.push_back(targets[i]);
    }
    return s;
}

StateVector gen_random_state(int n_sys, Rng &rng) {
    if (n_sys < 1) {
        throw std::invalid_argument("gen_random_state: n_sys must be >= 1");
    }
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> amps(std::size_t{1} << n_sys);
    for (auto &a : amps) {
        const double re = u(rng);
        const double im = u(rng);
        a = {re, im};
    }
    return StateVector(n_sys, std::move(amps));
}

ObservableTarget ObservableTarget::random(int n_sys, Rng &rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    ObservableTarget t;
    t.eigenvalues.resize(std::size_t{1} << n_sys);
    for (auto &e : t.eigenvalues) {
        e = u(rng);
    }
    return t;
}

double ObservableTarget::expectation(const StateVector &state) const {
    if (state.dim() != eigenvalues.size()) {
        throw std::invalid_argument("ObservableTarget: state dimension mismatch");
    }
    double total = 0.0;
    for (std::size_t s = 0; s < eigenvalues.size(); s++) {
        total += eigenvalues[s] * std::norm(state[s]);
    }
    return total;
}

ComplexMatrix ObservableTarget::matrix() const { return ComplexMatrix::diagonal(eigenvalues); }

namespace {

void fill_sequential_split(Dataset &d, std::size_t n_train) {
    d.train.resize(n_train);
    std::iota(d.train.begin(), d.train.end(), std::size_t{0});
    d.validation.resize(d.size() - n_train);
    std::iota(d.validation.begin(), d.validation.end(), n_train);
}

}  // namespace

Dataset make_observable_dataset(int n_sys, const ObservableTarget &target, std::size_t n_train,
                                std::size_t n_validation, Rng &rng) {
    const std::size_t dof = std::size_t{1} << (2 * n_sys);
    if (n_train <= dof) {
        throw std::invalid_argument("make_observable_dataset: need more than 4^n_sys = " + std::to_string(dof) +
                                    " training samples, got " + std::to_string(n_train));
    }
    if (target.eigenvalues.size() != (std::size_t{1} << n_sys)) {
        throw std::invalid_argument("make_observable_dataset: observable dimension does not match n_sys");
    }
    Dataset d;
    d.task = TaskKind::Observable;
    d.n_sys = n_sys;
    for (std::size_t m = 0; m < n_train + n_validation; m++) {
        d.states.push_back(gen_random_state(n_sys, rng));
        d.targets.push_back(target.expectation(d.states.back()));
    }
    fill_sequential_split(d, n_train);
    return d;
}

std::vector<int> central_qubits(int n_sys, int n_sub) {
    if (n_sub < 1 || n_sub > n_sys) {
        throw std::invalid_argument("central_qubits: need 1 <= n_sub <= n_sys");
    }
    std::vector<int> q(n_sub);
    std::iota(q.begin(), q.end(), (n_sys - n_sub) / 2);
    return q;
}

double renyi_trace(const ComplexMatrix &rho, int order) {
    if (!rho.is_square()) {
        throw std::invalid_argument("renyi_trace: density matrix must be square");
    }
    if (order == 2) {
        // Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
        double total = 0.0;
        for (const cplx &z : rho.entries()) {
            total += std::norm(z);
        }
        return total;
    }
    if (order == 3) {
        return trace_of_product(rho * rho, rho).real();
    }
    throw std::invalid_argument("renyi_trace: order must be 2 or 3");
}

double renyi_oracle(const StateVector &state, int n_sub, int order) {
    const auto keep = central_qubits(state.num_qubits(), n_sub);
    return renyi_trace(partial_trace(state, keep), order);
}

Dataset make_renyi_dataset(int n_sys, int n_sub, int order, std::size_t n_train, std::size_t n_validation,
                           Rng &rng) {
    if (order != 2 && order != 3) {
        throw std::invalid_argument("make_renyi_dataset: order must be 2 or 3");
    }
    central_qubits(n_sys, n_sub);
    Dataset d;
    d.task = TaskKind::Renyi;
    d.n_sys = n_sys;
    for (std::size_t m = 0; m < n_train + n_validation; m++) {
        d.states.push_back(gen_random_state(n_sys, rng));
        d.targets.push_back(renyi_oracle(d.states.back(), n_sub, order));
    }
    fill_sequential_split(d, n_train);
    return d;
}

StateVector encode_image(std::span<const double> pixels) {
    constexpr std::size_t n = kEncodedSide * kEncodedSide;
    if (pixels.size() != n) {
        throw std::invalid_argument("encode_image: expected 64 pixels");
    }
    std::vector<cplx> amps(n / 2);
    double norm2 = 0.0;
    for (std::size_t k = 0; k < n / 2; k++) {
        if (pixels[2 * k] < 0.0 || pixels[2 * k + 1] < 0.0) {
            throw std::invalid_argument("encode_image: pixel values must be nonnegative");
        }
        amps[k] = {pixels[2 * k], pixels[2 * k + 1]};
        norm2 += std::norm(amps[k]);
    }
    if (norm2 == 0.0) {
        throw std::invalid_argument("encode_image: all-zero image");
    }
    return StateVector(kImageQubits, std::move(amps));
}

Dataset make_image_dataset(std::vector<StateVector> states, std::vector<double> labels, std::size_t n_test,
                           std::uint64_t seed) {
    if (states.size() != labels.size()) {
        throw std::invalid_argument("make_image_dataset: states and labels differ in length");
    }
    if (n_test >= states.size()) {
        throw std::invalid_argument("make_image_dataset: test split leaves no training samples");
    }
    for (double l : labels) {
        if (l != 0.0 && l != 1.0) {
            throw std::invalid_argument("make_image_dataset: labels must be 0 or 1");
        }
    }
    Dataset d;
    d.task = TaskKind::Image;
    d.n_sys = kImageQubits;
    d.seed = seed;
    d.states = std::move(states);
    d.targets = std::move(labels);
    std::vector<std::size_t> perm(d.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    d.validation.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    d.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    return d;
}

double synthetic_label_score(const StateVector &encoded) {
    if (encoded.num_qubits() != kImageQubits) {
        throw std::invalid_argument("synthetic_label_score: expected a 5-qubit state");
    }
    // |r|^2 of qubit 0 from the Gram matrix of the top and bottom halves
    const std::size_t half = encoded.dim() / 2;
    double top = 0.0, bottom = 0.0;
    cplx overlap{};
    for (std::size_t k = 0; k < half; k++) {
        top += std::norm(encoded[k]);
        bottom += std::norm(encoded[half + k]);
        overlap += std::conj(encoded[k]) * encoded[half + k];
    }
    const double bloch2 = (top - bottom) * (top - bottom) + 4.0 * std::norm(overlap);
    return bloch2 - kSyntheticPurityThreshold;
}

SyntheticImages make_synthetic_images(std::size_t count, Rng &rng, double margin) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.02);
    SyntheticImages out;
    Image img;
    img.width = img.height = kRawSide;
    img.channels = 1;
    img.pixels.resize(kRawSide * kRawSide);
    while (out.images.size() < count) {
        const double want = static_cast<double>(out.images.size() % 2);
        const double background = 0.05 * unit(rng);
        const int blobs = 1 + static_cast<int>(unit(rng) * 3.0);
        std::vector<std::array<double, 4>> params(blobs);
        for (auto &b : params) {
            b = {unit(rng) * kRawSide, unit(rng) * kRawSide, 2.0 + 3.0 * unit(rng), 0.4 + 0.6 * unit(rng)};
        }
        for (int r = 0; r < kRawSide; r++) {
            for (int c = 0; c < kRawSide; c++) {
                double v = background + noise(rng);
                for (const auto &b : params) {
                    const double dr = r + 0.5 - b[0];
                    const double dc = c + 0.5 - b[1];
                    v += b[3] * std::exp(-(dr * dr + dc * dc) / (2.0 * b[2] * b[2]));
                }
                v = std::clamp(v, 0.0, 1.0);
                img.pixels[r * kRawSide + c] = std::round(v * 255.0) / 255.0;
            }
        }
        const double score = synthetic_label_score(encode_image(image_features(img)));
        if (std::abs(score) <= margin || (score > 0.0) != (want == 1.0)) {
            continue;
        }
        out.images.push_back(img.pixels);
        out.labels.push_back(want);
    }
    return out;
}

}  // namespace rqnn
