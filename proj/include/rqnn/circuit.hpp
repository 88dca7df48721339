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
 * Randomized circuit description and simulation.
 *
 * A realization i of the circuit is U2 * Ur_i * U1, where U1 and U2 are
 * brick-wall stacks of parametrized SU(4) gates and Ur_i is a tensor product
 * of single-qubit SU(2) gates drawn from a weighted ensemble. All generators
 * are anti-Hermitian (i times a Pauli string) so every gate is unitary.
 */

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "rqnn/kernels.hpp"
#include "rqnn/linalg.hpp"

namespace rqnn {

enum class Pauli { I = 0, X = 1, Y = 2, Z = 3 };

const ComplexMatrix &pauli_matrix(Pauli p);
char pauli_label(Pauli p);  // '0', 'x', 'y', 'z'

inline constexpr int kSu4Params = 15;
inline constexpr int kSu2Params = 3;

using Su4Coefficients = std::array<double, kSu4Params>;
using Su2Coefficients = std::array<double, kSu2Params>;

/// Pauli pair (a, b) of generator j: 4a + b = j + 1 with I=0, X=1, Y=2, Z=3.
std::pair<Pauli, Pauli> su4_generator_paulis(int j);
/// i (sigma_a (x) sigma_b) for generator j.
const ComplexMatrix &su4_generator(int j);
/// i sigma_a for a in {x, y, z}.
const ComplexMatrix &su2_generator(int a);

/// sum_j c_j g_j, the anti-Hermitian exponent of make_su4.
ComplexMatrix su4_exponent(std::span<const double, kSu4Params> c);
ComplexMatrix su2_exponent(std::span<const double, kSu2Params> alpha);

ComplexMatrix make_su4(std::span<const double, kSu4Params> c);
/// exp(i alpha . sigma)
ComplexMatrix make_su2(std::span<const double, kSu2Params> alpha);

struct TwoQubitGateParams {
    Su4Coefficients c{};
    int first_qubit = 0;  // acts on (first_qubit, first_qubit + 1)
};

/// First-qubit positions of one brick-wall unit: the even-aligned pass
/// (0,1),(2,3),... followed by the odd-aligned pass (1,2),(3,4),...
std::vector<int> brick_wall_layout(int n_sys);

struct DeterministicLayerSpec {
    std::vector<std::vector<TwoQubitGateParams>> units;

    /// `num_units` units of identity gates laid out as a brick wall.
    static DeterministicLayerSpec brick_wall(int n_sys, int num_units);

    int num_units() const { return static_cast<int>(units.size()); }
    std::size_t num_gates() const;
    bool empty() const { return units.empty(); }
};

struct EnsembleSpec {
    std::vector<double> logits;
    /// Member-major: alphas[i * n_sys + q] parametrizes the gate on qubit q of member i.
    std::vector<Su2Coefficients> alphas;

    static EnsembleSpec identity(int n_sys, int n_members);

    std::size_t size() const { return logits.size(); }
    /// softmax(logits)
    std::vector<double> weights() const;
};

struct CircuitSpec {
    int n_sys = 0;
    DeterministicLayerSpec u1;
    EnsembleSpec ensemble;
    DeterministicLayerSpec u2;
    std::vector<int> measured;

    std::size_t num_members() const { return ensemble.size(); }
    std::size_t num_outcomes() const { return std::size_t{1} << measured.size(); }
    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
};

struct ScheduledGate {
    ComplexMatrix matrix;
    std::vector<int> qubits;
};

struct BrickWallUnit {
    ComplexMatrix dense;
    std::vector<ScheduledGate> schedule;
};

/// Dense matrix (for analysis) plus the application schedule of one unit.
BrickWallUnit brick_wall_unit(std::span<const TwoQubitGateParams> gates, int n_sys);

/// `gate` acting on the listed qubits, expanded to the full 2^n_sys space.
ComplexMatrix embed_operator(const ComplexMatrix &gate, std::span<const int> qubits, int n_sys);

StateVector apply_gate(const StateVector &state, const ComplexMatrix &gate, std::span<const int> qubits);

/// Outcome probabilities of the measured qubits for ensemble member `member`.
std::vector<double> forward_probs(const CircuitSpec &spec, std::size_t member, const StateVector &state);

/// Dense U2 * Ur_member * U1. Guarded to n_sys <= 10.
ComplexMatrix realization_unitary(const CircuitSpec &spec, std::size_t member);

/// Basis index -> measurement outcome for the given measured-qubit list.
std::vector<std::size_t> outcome_table(int n_sys, std::span<const int> measured);

/// Spec with every gate materialized. This is the simulation engine behind
/// forward_probs, prediction and the adjoint gradient.
class CompiledCircuit {
public:
    struct Gate {
        kernels::Mat4 u;
        kernels::Mat4 u_adj;
        int first_qubit;
    };

    explicit CompiledCircuit(const CircuitSpec &spec);

    int n_sys() const { return n_sys_; }
    std::size_t dim() const { return std::size_t{1} << n_sys_; }
    std::size_t num_members() const { return weights_.size(); }
    std::size_t num_outcomes() const { return num_outcomes_; }
    std::span<const double> weights() const { return weights_; }
    std::span<const Gate> u1() const { return u1_; }
    std::span<const Gate> u2() const { return u2_; }
    const kernels::Mat2 &random_gate(std::size_t member, int q) const { return random_[member * n_sys_ + q]; }
    const kernels::Mat2 &random_gate_adj(std::size_t member, int q) const {
        return random_adj_[member * n_sys_ + q];
    }
    std::span<const std::size_t> outcomes() const { return outcome_; }

    void apply_u1(std::span<cplx> psi) const;
    void apply_random(std::size_t member, std::span<cplx> psi) const;
    void apply_u2(std::span<cplx> psi) const;
    void accumulate_probs(std::span<const cplx> psi, std::span<double> probs) const;

    std::vector<double> member_probs(std::size_t member, const StateVector &state) const;

private:
    int n_sys_;
    std::size_t num_outcomes_;
    std::vector<Gate> u1_;
    std::vector<Gate> u2_;
    std::vector<kernels::Mat2> random_;
    std::vector<kernels::Mat2> random_adj_;
    std::vector<double> weights_;
    std::vector<std::size_t> outcome_;
};

}  // namespace rqnn
