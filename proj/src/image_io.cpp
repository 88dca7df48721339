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

#include "rqnn/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rqnn {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path &path, const std::string &what) {
    throw std::runtime_error(path.string() + ": " + what);
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream &in, const fs::path &path) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) {
                return tok;
            }
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    if (tok.empty()) {
        fail(path, "truncated header");
    }
    return tok;
}

int header_int(std::istream &in, const fs::path &path) {
    const std::string tok = header_token(in, path);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) {
            fail(path, "bad header field '" + tok + "'");
        }
        return v;
    } catch (const std::logic_error &) {
        fail(path, "bad header field '" + tok + "'");
    }
}

bool is_image_file(const fs::path &p) {
    const auto ext = p.extension().string();
    return ext == ".pgm" || ext == ".ppm";
}

}  // namespace

Image read_pnm(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(path, "cannot open");
    }
    const std::string magic = header_token(in, path);
    Image img;
    if (magic == "P5") {
        img.channels = 1;
    } else if (magic == "P6") {
        img.channels = 3;
    } else {
        fail(path, "not a binary PGM/PPM (magic '" + magic + "')");
    }
    img.width = header_int(in, path);
    img.height = header_int(in, path);
    const int maxval = header_int(in, path);
    if (img.width <= 0 || img.height <= 0) {
        fail(path, "nonpositive dimensions");
    }
    if (maxval <= 0 || maxval > 255) {
        fail(path, "only 8-bit images are supported");
    }
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * img.channels;
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        fail(path, "truncated pixel data");
    }
    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; i++) {
        img.pixels[i] = raw[i] / static_cast<double>(maxval);
    }
    return img;
}

void write_pnm(const fs::path &path, const Image &image) {
    if (image.channels != 1 && image.channels != 3) {
        throw std::invalid_argument("write_pnm: channels must be 1 or 3");
    }
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height * image.channels;
    if (image.pixels.size() != n) {
        throw std::invalid_argument("write_pnm: pixel count does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(path, "cannot open for writing");
    }
    out << (image.channels == 1 ? "P5" : "P6") << "\n" << image.width << " " << image.height << "\n255\n";
    std::vector<unsigned char> raw(n);
    for (std::size_t i = 0; i < n; i++) {
        raw[i] = static_cast<unsigned char>(std::lround(std::clamp(image.pixels[i], 0.0, 1.0) * 255.0));
    }
    out.write(reinterpret_cast<const char *>(raw.data()), static_cast<std::streamsize>(n));
    if (!out) {
        fail(path, "write failed");
    }
}

Image to_grayscale(const Image &image) {
    if (image.channels == 1) {
        return image;
    }
    if (image.channels != 3) {
        throw std::invalid_argument("to_grayscale: channels must be 1 or 3");
    }
    Image g;
    g.width = image.width;
    g.height = image.height;
    g.channels = 1;
    g.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
    for (std::size_t i = 0; i < g.pixels.size(); i++) {
        const double *rgb = &image.pixels[3 * i];
        g.pixels[i] = 0.2989 * rgb[0] + 0.5870 * rgb[1] + 0.1140 * rgb[2];
    }
    return g;
}

Image mean_pool(const Image &image, int factor) {
    if (image.channels != 1) {
        throw std::invalid_argument("mean_pool: expected a grey image");
    }
    if (factor < 1 || image.width % factor != 0 || image.height % factor != 0) {
        throw std::invalid_argument("mean_pool: dimensions must be divisible by the pooling factor");
    }
    Image p;
    p.width = image.width / factor;
    p.height = image.height / factor;
    p.channels = 1;
    p.pixels.assign(static_cast<std::size_t>(p.width) * p.height, 0.0);
    const double inv = 1.0 / (factor * factor);
    for (int r = 0; r < p.height; r++) {
        for (int c = 0; c < p.width; c++) {
            double sum = 0.0;
            for (int dr = 0; dr < factor; dr++) {
                for (int dc = 0; dc < factor; dc++) {
                    sum += image.pixels[(r * factor + dr) * image.width + c * factor + dc];
                }
            }
            p.pixels[r * p.width + c] = sum * inv;
        }
    }
    return p;
}

std::vector<double> image_features(const Image &image) {
    Image g = to_grayscale(image);
    if (g.width == kRawSide && g.height == kRawSide) {
        g = mean_pool(g, kRawSide / kEncodedSide);
    } else if (g.width != kEncodedSide || g.height != kEncodedSide) {
        throw std::invalid_argument("image_features: expected a 32x32 or 8x8 image, got " +
                                    std::to_string(g.width) + "x" + std::to_string(g.height));
    }
    return g.pixels;
}

ImageDirectory scan_image_directory(const fs::path &root, const std::vector<std::string> &class_names) {
    if (!fs::is_directory(root)) {
        throw std::runtime_error(root.string() + ": not a directory");
    }
    ImageDirectory dir;
    if (class_names.empty()) {
        for (const auto &entry : fs::directory_iterator(root)) {
            if (entry.is_directory()) {
                dir.class_names.push_back(entry.path().filename().string());
            }
        }
        std::sort(dir.class_names.begin(), dir.class_names.end());
    } else {
        dir.class_names = class_names;
    }
    if (dir.class_names.size() != 2) {
        throw std::runtime_error(root.string() + ": expected exactly two class directories, found " +
                                 std::to_string(dir.class_names.size()));
    }
    for (int label = 0; label < 2; label++) {
        const fs::path sub = root / dir.class_names[label];
        if (!fs::is_directory(sub)) {
            throw std::runtime_error(sub.string() + ": class directory missing");
        }
        std::vector<fs::path> files;
        for (const auto &entry : fs::directory_iterator(sub)) {
            if (entry.is_regular_file() && is_image_file(entry.path())) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (auto &f : files) {
            dir.files.push_back(std::move(f));
            dir.labels.push_back(label);
        }
    }
    return dir;
}

Dataset load_image_dataset(const fs::path &root, std::size_t n_test, std::uint64_t seed,
                           const std::vector<std::string> &class_names) {
    const ImageDirectory dir = scan_image_directory(root, class_names);
    std::vector<StateVector> states;
    states.reserve(dir.files.size());
    for (const auto &f : dir.files) {
        try {
            states.push_back(encode_image(image_features(read_pnm(f))));
        } catch (const std::invalid_argument &e) {
            throw std::runtime_error(f.string() + ": " + e.what());
        }
    }
    return make_image_dataset(std::move(states), dir.labels, n_test, seed);
}

void write_image_directory(const fs::path &root, const SyntheticImages &images) {
    for (const char *c : {"class0", "class1"}) {
        fs::create_directories(root / c);
    }
    Image img;
    img.width = img.height = kRawSide;
    img.channels = 1;
    for (std::size_t i = 0; i < images.images.size(); i++) {
        img.pixels = images.images[i];
        char name[32];
        std::snprintf(name, sizeof(name), "%05zu.pgm", i);
        write_pnm(root / (images.labels[i] == 1.0 ? "class1" : "class0") / name, img);
    }
}

}  // namespace rqnn
