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
 * Expressivity analysis: majorization of spectra, the minimal linear head that
 * makes a target spectrum reachable by a mixed-unitary channel, Pauli-string
 * decompositions, and the operator a trained linear-head model computes.
 */

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rqnn/circuit.hpp"
#include "rqnn/heads.hpp"
#include "rqnn/linalg.hpp"

namespace rqnn {

struct MajorizationResult {
    bool holds = false;
    bool totals_equal = false;
    /// Length q of the first prefix with sum_{j<=q} x_j < sum_{j<=q} y_j.
    std::optional<std::size_t> first_violation;
    /// Prefix sums of the descending-sorted inputs.
    std::vector<double> prefix_y;
    std::vector<double> prefix_x;
};

/// Whether x majorizes y (y is majorized by x). Prefix comparisons allow a
/// rounding slack of 1e-12 * D * max(1, max|entry|); totals must agree within 1e-10.
MajorizationResult majorizes(std::span<const double> y, std::span<const double> x);

struct LinearHeadBound {
    double beta0;
    double beta1;
};

/// Smallest beta1 >= 0 (with beta0 the mean) such that the spectrum
/// (beta0 + beta1) x D/2, (beta0 - beta1) x D/2 majorizes `eigenvalues`.
LinearHeadBound construct_beta(std::span<const double> eigenvalues);

/// Spectrum of beta0 I + beta1 Z on one qubit of a D-dimensional space, descending.
std::vector<double> linear_head_spectrum(const LinearHeadBound &b, std::size_t dim);

/// Coefficients over n-qubit Pauli strings. String index has one base-4
/// digit per qubit (I=0, X=1, Y=2, Z=3), qubit 0 most significant.
struct PauliCoefficients {
    int num_qubits = 0;
    std::vector<cplx> coeffs;

    /// Labels use '0', 'x', 'y', 'z' per qubit, e.g. "zx".
    static std::string label(int num_qubits, std::size_t index);
    static std::size_t index(std::string_view label);

    cplx at(std::string_view label) const { return coeffs.at(index(label)); }
    double real(std::string_view label) const { return at(label).real(); }
};

/// C_s = 2^-n Tr[sigma_s^dagger O] for n <= 5.
PauliCoefficients pauli_decompose(const ComplexMatrix &op);
ComplexMatrix pauli_reconstruct(const PauliCoefficients &c);

/// U_i^dagger (beta0 I + beta1 Z...Z) U_i for every member, the parity
/// string running over the measured qubits. Requires a linear head.
std::vector<ComplexMatrix> member_operators(const CircuitSpec &spec, const Head &head);

/// sum_i w_i U_i^dagger (beta0 I + beta1 Z...Z) U_i.
ComplexMatrix predicted_operator(const CircuitSpec &spec, const Head &head);

/// In-plane rotation angles of a two-qubit operator:
///   xi_1z = atan2(C_zy, C_zx), xi_10 = atan2(C_0y, C_0x),
///   xi_2z = atan2(C_yz, C_xz), xi_20 = atan2(C_y0, C_x0).
struct BlochAngles {
    std::array<double, 4> xi{};      // order: 1z, 10, 2z, 20
    std::array<bool, 4> defined{};   // false when both coefficients are below 1e-10
    static constexpr std::array<const char *, 4> kNames = {"xi_1z", "xi_10", "xi_2z", "xi_20"};
};

BlochAngles extract_bloch_angles(const PauliCoefficients &c);

/// Wraps into (-pi, pi].
double wrap_angle(double a);

/// Gaps between consecutive angles around the circle after sorting; they sum to 2 pi.
std::vector<double> cyclic_gaps(std::vector<double> angles);

struct BlackBoxAnalysis {
    std::vector<double> weights;
    ComplexMatrix predicted;
    PauliCoefficients predicted_coefficients;
    std::vector<PauliCoefficients> members;
    std::vector<BlochAngles> angles;  // two-qubit circuits only
};

/// Operators of a linear-head model in the Pauli basis.
BlackBoxAnalysis analyze_black_box(const CircuitSpec &spec, const Head &head);

}  // namespace rqnn
