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
 * Experiment configuration files.
 *
 * The format is `key = value` lines under `[task]`, `[circuit]`, `[trainer]`
 * and `[output]` headers; `#` and `;` start comments. Only `task.kind` is
 * required. Unset keys take the task defaults (the hyperparameter table for
 * the observable task). Qubit indices are 0-based.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rqnn/trainer.hpp"

namespace rqnn {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    TrainConfig train;

    // task
    int n_sub = 1;        // renyi
    int renyi_order = 2;  // renyi
    double eig_lo = -2.5;  // observable
    double eig_hi = 2.5;
    std::uint64_t data_seed = 0;
    /// Draw a fresh dataset (and observable) for every repeat.
    bool vary_data = true;
    std::string image_dir;     // image task: PGM/PPM class directories; empty means synthetic
    std::string dataset_path;  // optional RQNN dataset container overriding generation
    double synthetic_margin = 0.08;

    // circuit
    /// When > 0, l2 is set to fixed_cost / n_r (equal N_r * L2 comparisons).
    int fixed_cost = 0;

    // output
    std::string out_dir;
    int repeats = 1;
    int workers = 1;
    bool write_checkpoint = true;

    /// Every resolved key as text, for echoing into reports.
    std::map<std::string, std::string> echo() const;
};

/// Throws ConfigError with a line number for syntax errors, unknown keys and
/// type mismatches, and a key name for missing or invalid values.
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig parse_config(const std::filesystem::path &path);

/// Re-applies defaults and validation after programmatic edits (e.g. CLI overrides).
void finalize_config(ExperimentConfig &config);

}  // namespace rqnn
