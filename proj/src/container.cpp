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

#include "rqnn/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <type_traits>

namespace rqnn {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'Q', 'N', 'N'};
constexpr std::uint32_t kDatasetRecord = 1;
constexpr std::uint32_t kCheckpointRecord = 2;

class Writer {
public:
    explicit Writer(const fs::path &path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) {
            throw std::runtime_error(path.string() + ": cannot open for writing");
        }
    }

    template <typename T>
    void put(T v) {
        static_assert(std::is_trivially_copyable_v<T>);
        out_.write(reinterpret_cast<const char *>(&v), sizeof(T));
    }

    template <typename T>
    void put_array(const std::vector<T> &v) {
        out_.write(reinterpret_cast<const char *>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
    }

    void header(std::uint32_t record) {
        out_.write(kMagic, 4);
        put(kContainerVersion);
        put(record);
    }

    void finish() {
        out_.flush();
        if (!out_) {
            throw std::runtime_error(path_.string() + ": write failed");
        }
    }

private:
    fs::path path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const fs::path &path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) {
            throw std::runtime_error(path.string() + ": cannot open");
        }
    }

    template <typename T>
    T get() {
        T v;
        read(&v, sizeof(T));
        return v;
    }

    template <typename T>
    std::vector<T> get_array(std::uint64_t n) {
        if (n > (std::uint64_t{1} << 34) / sizeof(T)) {
            fail("implausible array length");
        }
        std::vector<T> v(n);
        read(v.data(), n * sizeof(T));
        return v;
    }

    void header(std::uint32_t record) {
        char magic[4];
        read(magic, 4);
        if (std::memcmp(magic, kMagic, 4) != 0) {
            fail("bad magic, not an RQNN container");
        }
        const auto version = get<std::uint32_t>();
        if (version != kContainerVersion) {
            fail("unsupported container version " + std::to_string(version));
        }
        const auto rec = get<std::uint32_t>();
        if (rec != record) {
            fail(rec == kDatasetRecord      ? "file holds a dataset, not a checkpoint"
                 : rec == kCheckpointRecord ? "file holds a checkpoint, not a dataset"
                                            : "unknown record type");
        }
    }

    [[noreturn]] void fail(const std::string &what) const { throw std::runtime_error(path_.string() + ": " + what); }

private:
    void read(void *dst, std::size_t n) {
        in_.read(static_cast<char *>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            fail("truncated file");
        }
    }

    fs::path path_;
    std::ifstream in_;
};

}  // namespace

void write_dataset(const fs::path &path, const Dataset &d) {
    if (d.targets.size() != d.states.size()) {
        throw std::invalid_argument("write_dataset: states and targets differ in length");
    }
    Writer w(path);
    w.header(kDatasetRecord);
    w.put(static_cast<std::uint32_t>(d.task));
    w.put(static_cast<std::uint32_t>(d.n_sys));
    w.put(static_cast<std::uint64_t>(d.seed));
    w.put(static_cast<std::uint64_t>(d.size()));
    w.put(static_cast<std::uint64_t>(d.train.size()));
    w.put(static_cast<std::uint64_t>(d.validation.size()));
    for (std::size_t i : d.train) {
        w.put(static_cast<std::uint64_t>(i));
    }
    for (std::size_t i : d.validation) {
        w.put(static_cast<std::uint64_t>(i));
    }
    std::vector<float> block;
    for (const auto &s : d.states) {
        if (s.num_qubits() != d.n_sys) {
            throw std::invalid_argument("write_dataset: state qubit count does not match dataset");
        }
        block.clear();
        for (const cplx &a : s.amplitudes()) {
            block.push_back(static_cast<float>(a.real()));
            block.push_back(static_cast<float>(a.imag()));
        }
        w.put_array(block);
    }
    w.put_array(d.targets);
    w.finish();
}

Dataset read_dataset(const fs::path &path) {
    Reader r(path);
    r.header(kDatasetRecord);
    Dataset d;
    const auto task = r.get<std::uint32_t>();
    if (task > static_cast<std::uint32_t>(TaskKind::Image)) {
        r.fail("unknown task kind");
    }
    d.task = static_cast<TaskKind>(task);
    d.n_sys = static_cast<int>(r.get<std::uint32_t>());
    if (d.n_sys < 1 || d.n_sys > 20) {
        r.fail("implausible qubit count");
    }
    d.seed = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    const auto n_train = r.get<std::uint64_t>();
    const auto n_val = r.get<std::uint64_t>();
    for (auto i : r.get_array<std::uint64_t>(n_train)) {
        if (i >= count) {
            r.fail("train index out of range");
        }
        d.train.push_back(i);
    }
    for (auto i : r.get_array<std::uint64_t>(n_val)) {
        if (i >= count) {
            r.fail("validation index out of range");
        }
        d.validation.push_back(i);
    }
    const std::size_t dim = std::size_t{1} << d.n_sys;
    for (std::uint64_t m = 0; m < count; m++) {
        const auto block = r.get_array<float>(2 * dim);
        std::vector<cplx> amps(dim);
        for (std::size_t k = 0; k < dim; k++) {
            amps[k] = {block[2 * k], block[2 * k + 1]};
        }
        try {
            d.states.emplace_back(d.n_sys, std::move(amps));
        } catch (const std::invalid_argument &) {
            r.fail("zero state vector in sample " + std::to_string(m));
        }
    }
    d.targets = r.get_array<double>(count);
    return d;
}

void write_checkpoint(const fs::path &path, const Checkpoint &ck) {
    const Model &m = ck.model;
    const auto params = flatten_params(m);
    if (ck.first_moment.size() != params.size() || ck.second_moment.size() != params.size()) {
        throw std::invalid_argument("write_checkpoint: optimizer moments do not match the parameter count");
    }
    Writer w(path);
    w.header(kCheckpointRecord);
    w.put(static_cast<std::uint32_t>(m.circuit.n_sys));
    w.put(static_cast<std::uint32_t>(m.circuit.u1.num_units()));
    w.put(static_cast<std::uint32_t>(m.circuit.u2.num_units()));
    w.put(static_cast<std::uint32_t>(m.circuit.num_members()));
    w.put(static_cast<std::uint32_t>(m.circuit.measured.size()));
    for (int q : m.circuit.measured) {
        w.put(static_cast<std::uint32_t>(q));
    }
    w.put(static_cast<std::uint32_t>(m.head.kind()));
    w.put(static_cast<std::uint32_t>(m.head.order()));
    w.put(static_cast<std::uint64_t>(m.head.input_dim()));
    w.put(ck.epoch);
    w.put(ck.adam_step);
    w.put(static_cast<std::uint64_t>(params.size()));
    w.put_array(params);
    w.put_array(ck.first_moment);
    w.put_array(ck.second_moment);
    w.finish();
}

Checkpoint read_checkpoint(const fs::path &path) {
    Reader r(path);
    r.header(kCheckpointRecord);
    Checkpoint ck;
    CircuitSpec &c = ck.model.circuit;
    c.n_sys = static_cast<int>(r.get<std::uint32_t>());
    if (c.n_sys < 1 || c.n_sys > 20) {
        r.fail("implausible qubit count");
    }
    const auto u1_units = r.get<std::uint32_t>();
    const auto u2_units = r.get<std::uint32_t>();
    const auto members = r.get<std::uint32_t>();
    if (u1_units > 10000 || u2_units > 10000 || members == 0 || members > 100000) {
        r.fail("implausible circuit shape");
    }
    c.u1 = DeterministicLayerSpec::brick_wall(c.n_sys, static_cast<int>(u1_units));
    c.u2 = DeterministicLayerSpec::brick_wall(c.n_sys, static_cast<int>(u2_units));
    c.ensemble = EnsembleSpec::identity(c.n_sys, static_cast<int>(members));
    const auto k = r.get<std::uint32_t>();
    for (auto q : r.get_array<std::uint32_t>(k)) {
        c.measured.push_back(static_cast<int>(q));
    }
    try {
        c.validate();
    } catch (const std::invalid_argument &e) {
        r.fail(e.what());
    }
    const auto kind = r.get<std::uint32_t>();
    const auto order = static_cast<int>(r.get<std::uint32_t>());
    const auto dim = r.get<std::uint64_t>();
    try {
        switch (static_cast<HeadKind>(kind)) {
            case HeadKind::Linear:
                ck.model.head = Head::linear(0.0, 0.0);
                break;
            case HeadKind::PolyUni:
                ck.model.head = Head::poly_uni(order);
                break;
            case HeadKind::PolyMulti:
                ck.model.head = Head::poly_multi(order, dim);
                break;
            default:
                r.fail("unknown head kind");
        }
    } catch (const std::invalid_argument &e) {
        r.fail(e.what());
    }
    ck.epoch = r.get<std::uint64_t>();
    ck.adam_step = r.get<std::uint64_t>();
    const auto n = r.get<std::uint64_t>();
    const auto params = r.get_array<double>(n);
    try {
        unflatten_params(ck.model, params);
    } catch (const std::invalid_argument &) {
        r.fail("parameter count does not match the stored circuit shape");
    }
    ck.first_moment = r.get_array<double>(n);
    ck.second_moment = r.get_array<double>(n);
    return ck;
}

}  // namespace rqnn
