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

#include "rqnn/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rqnn {

namespace {

constexpr cplx kI{0.0, 1.0};

std::vector<ComplexMatrix> build_su4_generators() {
    std::vector<ComplexMatrix> out;
    for (int j = 0; j < kSu4Params; j++) {
        const auto [a, b] = su4_generator_paulis(j);
        out.push_back(kI * kron(pauli_matrix(a), pauli_matrix(b)));
    }
    return out;
}

void check_layer(const DeterministicLayerSpec &layer, int n_sys, const char *name) {
    const auto layout = brick_wall_layout(n_sys);
    for (const auto &unit : layer.units) {
        if (unit.size() != layout.size()) {
            throw std::invalid_argument(std::string(name) + ": unit must hold n_sys - 1 gates");
        }
        for (std::size_t g = 0; g < unit.size(); g++) {
            if (unit[g].first_qubit != layout[g]) {
                throw std::invalid_argument(std::string(name) + ": gate layout is not a brick wall");
            }
        }
    }
}

std::vector<CompiledCircuit::Gate> compile_layer(const DeterministicLayerSpec &layer) {
    std::vector<CompiledCircuit::Gate> out;
    for (const auto &unit : layer.units) {
        for (const auto &g : unit) {
            const auto u = kernels::to_mat4(make_su4(g.c));
            out.push_back({u, kernels::adjoint_of<4>(u), g.first_qubit});
        }
    }
    return out;
}

}  // namespace

const ComplexMatrix &pauli_matrix(Pauli p) {
    static const ComplexMatrix mats[4] = {
        ComplexMatrix{{1.0, 0.0}, {0.0, 1.0}},
        ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}},
        ComplexMatrix{{0.0, -kI}, {kI, 0.0}},
        ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}},
    };
    return mats[static_cast<int>(p)];
}

char pauli_label(Pauli p) {
    return "0xyz"[static_cast<int>(p)];
}

std::pair<Pauli, Pauli> su4_generator_paulis(int j) {
    if (j < 0 || j >= kSu4Params) {
        throw std::out_of_range("su4 generator index out of range");
    }
    return {static_cast<Pauli>((j + 1) / 4), static_cast<Pauli>((j + 1) % 4)};
}

const ComplexMatrix &su4_generator(int j) {
    static const std::vector<ComplexMatrix> gens = build_su4_generators();
    if (j < 0 || j >= kSu4Params) {
        throw std::out_of_range("su4 generator index out of range");
    }
    return gens[j];
}

const ComplexMatrix &su2_generator(int a) {
    static const ComplexMatrix gens[3] = {
        kI * pauli_matrix(Pauli::X),
        kI * pauli_matrix(Pauli::Y),
        kI * pauli_matrix(Pauli::Z),
    };
    if (a < 0 || a >= 3) {
        throw std::out_of_range("su2 generator index out of range");
    }
    return gens[a];
}

ComplexMatrix su4_exponent(std::span<const double, kSu4Params> c) {
    ComplexMatrix a(4, 4);
    for (int j = 0; j < kSu4Params; j++) {
        if (c[j] != 0.0) {
            a += c[j] * su4_generator(j);
        }
    }
    return a;
}

ComplexMatrix su2_exponent(std::span<const double, kSu2Params> alpha) {
    ComplexMatrix a(2, 2);
    for (int k = 0; k < kSu2Params; k++) {
        a += alpha[k] * su2_generator(k);
    }
    return a;
}

ComplexMatrix make_su4(std::span<const double, kSu4Params> c) {
    return matexp(su4_exponent(c));
}

ComplexMatrix make_su2(std::span<const double, kSu2Params> alpha) {
    return matexp(su2_exponent(alpha));
}

std::vector<int> brick_wall_layout(int n_sys) {
    std::vector<int> out;
    for (int q = 0; q + 1 < n_sys; q += 2) {
        out.push_back(q);
    }
    for (int q = 1; q + 1 < n_sys; q += 2) {
        out.push_back(q);
    }
    return out;
}

DeterministicLayerSpec DeterministicLayerSpec::brick_wall(int n_sys, int num_units) {
    DeterministicLayerSpec layer;
    const auto layout = brick_wall_layout(n_sys);
    for (int u = 0; u < num_units; u++) {
        std::vector<TwoQubitGateParams> unit;
        for (int q : layout) {
            unit.push_back({Su4Coefficients{}, q});
        }
        layer.units.push_back(std::move(unit));
    }
    return layer;
}

std::size_t DeterministicLayerSpec::num_gates() const {
    std::size_t n = 0;
    for (const auto &u : units) {
        n += u.size();
    }
    return n;
}

EnsembleSpec EnsembleSpec::identity(int n_sys, int n_members) {
    EnsembleSpec e;
    e.logits.assign(n_members, 0.0);
    e.alphas.assign(static_cast<std::size_t>(n_members) * n_sys, Su2Coefficients{});
    return e;
}

std::vector<double> EnsembleSpec::weights() const {
    std::vector<double> w(logits.size());
    if (logits.empty()) {
        return w;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (std::size_t i = 0; i < logits.size(); i++) {
        w[i] = std::exp(logits[i] - mx);
        total += w[i];
    }
    for (auto &x : w) {
        x /= total;
    }
    return w;
}

void CircuitSpec::validate() const {
    if (n_sys < 1 || n_sys > 20) {
        throw std::invalid_argument("circuit: n_sys must be in [1, 20]");
    }
    if (ensemble.size() == 0) {
        throw std::invalid_argument("circuit: ensemble needs at least one member");
    }
    if (ensemble.alphas.size() != ensemble.size() * static_cast<std::size_t>(n_sys)) {
        throw std::invalid_argument("circuit: ensemble alphas must have n_members * n_sys entries");
    }
    if (measured.empty()) {
        throw std::invalid_argument("circuit: at least one measured qubit required");
    }
    std::vector<bool> seen(n_sys, false);
    for (int q : measured) {
        if (q < 0 || q >= n_sys) {
            throw std::invalid_argument("circuit: measured qubit out of range");
        }
        if (seen[q]) {
            throw std::invalid_argument("circuit: measured qubits must be distinct");
        }
        seen[q] = true;
    }
    check_layer(u1, n_sys, "u1");
    check_layer(u2, n_sys, "u2");
}

BrickWallUnit brick_wall_unit(std::span<const TwoQubitGateParams> gates, int n_sys) {
    const auto layout = brick_wall_layout(n_sys);
    if (gates.size() != layout.size()) {
        throw std::invalid_argument("brick_wall_unit: unit must hold n_sys - 1 gates");
    }
    BrickWallUnit unit;
    unit.dense = ComplexMatrix::identity(std::size_t{1} << n_sys);
    for (std::size_t g = 0; g < gates.size(); g++) {
        if (gates[g].first_qubit != layout[g]) {
            throw std::invalid_argument("brick_wall_unit: gate layout is not a brick wall");
        }
        ScheduledGate sg{make_su4(gates[g].c), {gates[g].first_qubit, gates[g].first_qubit + 1}};
        unit.dense = embed_operator(sg.matrix, sg.qubits, n_sys) * unit.dense;
        unit.schedule.push_back(std::move(sg));
    }
    return unit;
}

namespace {

// Basis indices of the full space touched by a gate on `qubits`: for each
// environment pattern, the 2^k indices in gate-local order.
std::vector<std::size_t> gate_index_table(std::span<const int> qubits, int n_sys) {
    const std::size_t k = qubits.size();
    std::size_t mask = 0;
    for (int q : qubits) {
        mask |= std::size_t{1} << (n_sys - 1 - q);
    }
    const std::size_t local_dim = std::size_t{1} << k;
    const std::size_t dim = std::size_t{1} << n_sys;
    std::vector<std::size_t> table;
    table.reserve(dim);
    for (std::size_t base = 0; base < dim; base++) {
        if (base & mask) {
            continue;
        }
        for (std::size_t local = 0; local < local_dim; local++) {
            std::size_t idx = base;
            for (std::size_t j = 0; j < k; j++) {
                if ((local >> (k - 1 - j)) & 1) {
                    idx |= std::size_t{1} << (n_sys - 1 - qubits[j]);
                }
            }
            table.push_back(idx);
        }
    }
    return table;
}

void check_gate_qubits(const ComplexMatrix &gate, std::span<const int> qubits, int n_sys) {
    if (!gate.is_square() || gate.rows() != (std::size_t{1} << qubits.size())) {
        throw std::invalid_argument("gate dimension must be 2^(number of target qubits)");
    }
    std::vector<bool> seen(n_sys, false);
    for (int q : qubits) {
        if (q < 0 || q >= n_sys || seen[q]) {
            throw std::invalid_argument("gate qubits must be distinct and in range");
        }
        seen[q] = true;
    }
}

}  // namespace

ComplexMatrix embed_operator(const ComplexMatrix &gate, std::span<const int> qubits, int n_sys) {
    check_gate_qubits(gate, qubits, n_sys);
    const std::size_t dim = std::size_t{1} << n_sys;
    const std::size_t local_dim = gate.rows();
    const auto table = gate_index_table(qubits, n_sys);
    ComplexMatrix out(dim, dim);
    for (std::size_t base = 0; base < table.size(); base += local_dim) {
        for (std::size_t r = 0; r < local_dim; r++) {
            for (std::size_t c = 0; c < local_dim; c++) {
                out(table[base + r], table[base + c]) = gate(r, c);
            }
        }
    }
    return out;
}

StateVector apply_gate(const StateVector &state, const ComplexMatrix &gate, std::span<const int> qubits) {
    const int n = state.num_qubits();
    check_gate_qubits(gate, qubits, n);
    const std::size_t local_dim = gate.rows();
    const auto table = gate_index_table(qubits, n);
    std::vector<cplx> out(state.amplitudes().begin(), state.amplitudes().end());
    std::vector<cplx> local(local_dim);
    for (std::size_t base = 0; base < table.size(); base += local_dim) {
        for (std::size_t r = 0; r < local_dim; r++) {
            local[r] = state[table[base + r]];
        }
        for (std::size_t r = 0; r < local_dim; r++) {
            cplx s = 0.0;
            for (std::size_t c = 0; c < local_dim; c++) {
                s += gate(r, c) * local[c];
            }
            out[table[base + r]] = s;
        }
    }
    return StateVector(n, std::move(out), StateVector::Unnormalized{});
}

std::vector<std::size_t> outcome_table(int n_sys, std::span<const int> measured) {
    const std::size_t dim = std::size_t{1} << n_sys;
    const std::size_t k = measured.size();
    std::vector<std::size_t> out(dim);
    for (std::size_t idx = 0; idx < dim; idx++) {
        std::size_t s = 0;
        for (std::size_t j = 0; j < k; j++) {
            s = (s << 1) | ((idx >> (n_sys - 1 - measured[j])) & 1);
        }
        out[idx] = s;
    }
    return out;
}

CompiledCircuit::CompiledCircuit(const CircuitSpec &spec)
    : n_sys_(spec.n_sys), num_outcomes_(spec.num_outcomes()) {
    spec.validate();
    u1_ = compile_layer(spec.u1);
    u2_ = compile_layer(spec.u2);
    random_.reserve(spec.ensemble.alphas.size());
    for (const auto &alpha : spec.ensemble.alphas) {
        const auto u = kernels::to_mat2(make_su2(alpha));
        random_.push_back(u);
        random_adj_.push_back(kernels::adjoint_of<2>(u));
    }
    weights_ = spec.ensemble.weights();
    outcome_ = outcome_table(n_sys_, spec.measured);
}

void CompiledCircuit::apply_u1(std::span<cplx> psi) const {
    for (const auto &g : u1_) {
        kernels::apply_2q(psi, n_sys_, g.first_qubit, g.u);
    }
}

void CompiledCircuit::apply_random(std::size_t member, std::span<cplx> psi) const {
    for (int q = 0; q < n_sys_; q++) {
        kernels::apply_1q(psi, n_sys_, q, random_gate(member, q));
    }
}

void CompiledCircuit::apply_u2(std::span<cplx> psi) const {
    for (const auto &g : u2_) {
        kernels::apply_2q(psi, n_sys_, g.first_qubit, g.u);
    }
}

void CompiledCircuit::accumulate_probs(std::span<const cplx> psi, std::span<double> probs) const {
    std::fill(probs.begin(), probs.end(), 0.0);
    for (std::size_t idx = 0; idx < psi.size(); idx++) {
        probs[outcome_[idx]] += std::norm(psi[idx]);
    }
}

std::vector<double> CompiledCircuit::member_probs(std::size_t member, const StateVector &state) const {
    if (member >= num_members()) {
        throw std::out_of_range("member index out of range");
    }
    if (state.num_qubits() != n_sys_) {
        throw std::invalid_argument("state qubit count does not match circuit");
    }
    std::vector<cplx> psi(state.amplitudes().begin(), state.amplitudes().end());
    apply_u1(psi);
    apply_random(member, psi);
    apply_u2(psi);
    std::vector<double> probs(num_outcomes_);
    accumulate_probs(psi, probs);
    return probs;
}

std::vector<double> forward_probs(const CircuitSpec &spec, std::size_t member, const StateVector &state) {
    return CompiledCircuit(spec).member_probs(member, state);
}

ComplexMatrix realization_unitary(const CircuitSpec &spec, std::size_t member) {
    spec.validate();
    if (spec.n_sys > 10) {
        throw std::invalid_argument("realization_unitary: n_sys > 10 is too large for dense assembly");
    }
    if (member >= spec.num_members()) {
        throw std::out_of_range("member index out of range");
    }
    const int n = spec.n_sys;
    ComplexMatrix u = ComplexMatrix::identity(std::size_t{1} << n);
    for (const auto &unit : spec.u1.units) {
        u = brick_wall_unit(unit, n).dense * u;
    }
    ComplexMatrix ur = make_su2(spec.ensemble.alphas[member * n]);
    for (int q = 1; q < n; q++) {
        ur = kron(ur, make_su2(spec.ensemble.alphas[member * n + q]));
    }
    u = ur * u;
    for (const auto &unit : spec.u2.units) {
        u = brick_wall_unit(unit, n).dense * u;
    }
    return u;
}

}  // namespace rqnn
