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
 * Task datasets: random input states with observable targets, Rényi-entropy
 * targets, and images encoded as 5-qubit states.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rqnn/linalg.hpp"

namespace rqnn {

using Rng = std::mt19937_64;

enum class TaskKind { Observable, Renyi, Image };

const char *task_kind_name(TaskKind kind);
std::optional<TaskKind> parse_task_kind(std::string_view name);

struct Dataset {
    TaskKind task = TaskKind::Observable;
    int n_sys = 0;
    std::vector<StateVector> states;
    std::vector<double> targets;
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
    std::uint64_t seed = 0;

    std::size_t size() const { return states.size(); }

    struct Split {
        std::vector<StateVector> states;
        std::vector<double> targets;
    };
    Split gather(std::span<const std::size_t> indices) const;
    Split train_split() const { return gather(train); }
    Split validation_split() const { return gather(validation); }
};

/// Amplitudes (a_s + i b_s) / N with a_s, b_s uniform on [-1, 1].
StateVector gen_random_state(int n_sys, Rng &rng);

/// Observable diagonal in the computational basis.
struct ObservableTarget {
    std::vector<double> eigenvalues;

    static ObservableTarget random(int n_sys, Rng &rng, double lo = -2.5, double hi = 2.5);

    double expectation(const StateVector &state) const;
    ComplexMatrix matrix() const;
};

/// `n_train` training samples followed by `n_validation` validation samples.
/// Throws if n_train <= 4^n_sys.
Dataset make_observable_dataset(int n_sys, const ObservableTarget &target, std::size_t n_train,
                                std::size_t n_validation, Rng &rng);

/// The n_sub central qubits, starting at (n_sys - n_sub) / 2.
std::vector<int> central_qubits(int n_sys, int n_sub);

/// Tr[rho^order] for a density matrix.
double renyi_trace(const ComplexMatrix &rho, int order);

/// Tr[rho_A^order] for the central n_sub qubits; order is 2 or 3.
double renyi_oracle(const StateVector &state, int n_sub, int order);

Dataset make_renyi_dataset(int n_sys, int n_sub, int order, std::size_t n_train, std::size_t n_validation,
                           Rng &rng);

inline constexpr int kImageQubits = 5;
inline constexpr int kEncodedSide = 8;
inline constexpr int kRawSide = 32;

/// Row-major 8x8 pixels; pixel 2k is the real part and pixel 2k+1 the
/// imaginary part of amplitude k. Throws on an all-zero or negative image.
StateVector encode_image(std::span<const double> pixels);

/// Splits samples into train and test by a seeded permutation.
Dataset make_image_dataset(std::vector<StateVector> states, std::vector<double> labels, std::size_t n_test,
                           std::uint64_t seed);

/// Bundled two-class stand-in for a real image set. Images are 32x32 grey
/// levels in [0, 1] (8-bit quantized) built from a few soft blobs over a dark
/// noisy background. The label is 1 when the squared Bloch vector of qubit 0 of the
/// encoded image (top half against bottom half) exceeds
/// kSyntheticPurityThreshold by more than `margin`, 0 when it falls short by
/// more than `margin`; ambiguous draws are rejected. Classes alternate.
inline constexpr double kSyntheticPurityThreshold = 0.7;

struct SyntheticImages {
    std::vector<std::vector<double>> images;  // 32x32 each, row-major
    std::vector<double> labels;
};

SyntheticImages make_synthetic_images(std::size_t count, Rng &rng, double margin = 0.08);

/// |r|^2 - kSyntheticPurityThreshold for qubit 0; its sign decides the synthetic label.
double synthetic_label_score(const StateVector &encoded);

}  // namespace rqnn
