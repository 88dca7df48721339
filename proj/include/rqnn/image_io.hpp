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
 * Binary PGM (P5) / PPM (P6) images and the image-to-state pipeline.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rqnn/datasets.hpp"

namespace rqnn {

struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;           // 1 (grey) or 3 (RGB)
    std::vector<double> pixels;  // row-major, channels interleaved, values in [0, 1]
};

/// 8-bit P5 or P6. Throws std::runtime_error on unreadable or malformed files.
Image read_pnm(const std::filesystem::path &path);
/// Writes P5 for grey images and P6 for RGB; values are rounded to 8 bits.
void write_pnm(const std::filesystem::path &path, const Image &image);

/// 0.2989 R + 0.5870 G + 0.1140 B; grey images pass through.
Image to_grayscale(const Image &image);

/// Non-overlapping factor x factor mean pooling of a grey image.
Image mean_pool(const Image &image, int factor);

/// Grey 8x8 pixels from a 32x32 or 8x8 image of either channel count.
std::vector<double> image_features(const Image &image);

struct ImageDirectory {
    std::vector<std::string> class_names;  // label 0, label 1
    std::vector<std::filesystem::path> files;
    std::vector<double> labels;
};

/// Lists `<root>/<class>/*.pgm|*.ppm`. Exactly two class directories are
/// required; label 0 goes to the lexicographically first one unless
/// `class_names` gives the order explicitly.
ImageDirectory scan_image_directory(const std::filesystem::path &root,
                                    const std::vector<std::string> &class_names = {});

Dataset load_image_dataset(const std::filesystem::path &root, std::size_t n_test, std::uint64_t seed,
                           const std::vector<std::string> &class_names = {});

/// Writes synthetic images as `<root>/class0/NNNNN.pgm` and `<root>/class1/NNNNN.pgm`.
void write_image_directory(const std::filesystem::path &root, const SyntheticImages &images);

}  // namespace rqnn
