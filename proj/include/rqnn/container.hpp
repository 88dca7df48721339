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
 * Binary container for datasets and training checkpoints.
 *
 * All integers and floats are little-endian. Every file starts with
 *
 *     char[4] magic = "RQNN"
 *     u32     version = 1
 *     u32     record   (1 = dataset, 2 = checkpoint)
 *
 * Dataset record:
 *     u32 task, u32 n_sys, u64 seed, u64 count, u64 n_train, u64 n_validation
 *     u64[n_train] train indices, u64[n_validation] validation indices
 *     count blocks of 2^n_sys complex64 amplitudes (float32 real, float32 imag)
 *     f64[count] targets
 * Amplitudes are renormalized in double precision on load.
 *
 * Checkpoint record:
 *     u32 n_sys, u32 u1 units, u32 u2 units, u32 members
 *     u32 k, u32[k] measured qubits
 *     u32 head kind, u32 head order, u64 head input dim
 *     u64 epoch, u64 adam step, u64 P
 *     f64[P] parameters, f64[P] first moments, f64[P] second moments
 * Parameter order is that of flatten_params.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "rqnn/datasets.hpp"
#include "rqnn/gradients.hpp"

namespace rqnn {

inline constexpr std::uint32_t kContainerVersion = 1;

void write_dataset(const std::filesystem::path &path, const Dataset &dataset);
Dataset read_dataset(const std::filesystem::path &path);

struct Checkpoint {
    Model model;
    std::uint64_t epoch = 0;
    std::uint64_t adam_step = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
};

void write_checkpoint(const std::filesystem::path &path, const Checkpoint &checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path &path);

}  // namespace rqnn
