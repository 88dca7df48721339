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

#include "rqnn/operator_analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rqnn {

namespace {

std::vector<double> prefix_sums_desc(std::span<const double> v) {
    std::vector<double> s(v.begin(), v.end());
    std::sort(s.begin(), s.end(), std::greater<>());
    std::partial_sum(s.begin(), s.end(), s.begin());
    return s;
}

}  // namespace

MajorizationResult majorizes(std::span<const double> y, std::span<const double> x) {
    if (y.size() != x.size()) {
        throw std::invalid_argument("majorizes: vectors differ in length");
    }
    MajorizationResult r;
    r.prefix_y = prefix_sums_desc(y);
    r.prefix_x = prefix_sums_desc(x);
    if (y.empty()) {
        r.holds = r.totals_equal = true;
        return r;
    }
    double scale = 1.0;
    for (std::size_t j = 0; j < y.size(); j++) {
        scale = std::max({scale, std::abs(y[j]), std::abs(x[j])});
    }
    const double slack = 1e-12 * static_cast<double>(y.size()) * scale;
    for (std::size_t q = 0; q + 1 < y.size(); q++) {
        if (r.prefix_x[q] < r.prefix_y[q] - slack) {
            r.first_violation = q + 1;
            break;
        }
    }
    r.totals_equal = std::abs(r.prefix_x.back() - r.prefix_y.back()) <= 1e-10;
    r.holds = r.totals_equal && !r.first_violation;
    return r;
}

LinearHeadBound construct_beta(std::span<const double> eigenvalues) {
    const std::size_t d = eigenvalues.size();
    if (d < 2 || d % 2 != 0) {
        throw std::invalid_argument("construct_beta: dimension must be even and at least 2");
    }
    const auto prefix = prefix_sums_desc(eigenvalues);
    const double beta0 = prefix.back() / static_cast<double>(d);
    const std::size_t half = d / 2;
    double beta1 = 0.0;
    for (std::size_t q = 1; q < d; q++) {
        const double s = prefix[q - 1];
        // prefix of the head spectrum: q (b0 + b1) up to D/2, then q b0 + (D - q) b1
        const double need = q <= half ? s / static_cast<double>(q) - beta0
                                      : (s - static_cast<double>(q) * beta0) / static_cast<double>(d - q);
        beta1 = std::max(beta1, need);
    }
    return {beta0, beta1};
}

std::vector<double> linear_head_spectrum(const LinearHeadBound &b, std::size_t dim) {
    if (dim % 2 != 0) {
        throw std::invalid_argument("linear_head_spectrum: dimension must be even");
    }
    std::vector<double> s(dim, b.beta0 - b.beta1);
    std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(dim / 2), b.beta0 + b.beta1);
    return s;
}

std::string PauliCoefficients::label(int num_qubits, std::size_t index) {
    std::string s(num_qubits, '0');
    for (int q = num_qubits - 1; q >= 0; q--) {
        s[q] = pauli_label(static_cast<Pauli>(index % 4));
        index /= 4;
    }
    return s;
}

std::size_t PauliCoefficients::index(std::string_view label) {
    std::size_t idx = 0;
    for (char ch : label) {
        int digit;
        switch (ch) {
            case '0':
            case 'I':
            case 'i':
                digit = 0;
                break;
            case 'x':
            case 'X':
                digit = 1;
                break;
            case 'y':
            case 'Y':
                digit = 2;
                break;
            case 'z':
            case 'Z':
                digit = 3;
                break;
            default:
                throw std::invalid_argument("PauliCoefficients: bad label character '" + std::string(1, ch) + "'");
        }
        idx = 4 * idx + digit;
    }
    return idx;
}

namespace {

// Pauli string s has one nonzero per row: column r ^ flip, value phase(r).
struct PauliRowForm {
    std::size_t flip = 0;
    std::vector<cplx> phase;
};

PauliRowForm pauli_row_form(int n, std::size_t index) {
    const std::size_t dim = std::size_t{1} << n;
    PauliRowForm f;
    f.phase.assign(dim, cplx{1.0, 0.0});
    for (int q = n - 1; q >= 0; q--) {
        const int p = static_cast<int>(index % 4);
        index /= 4;
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        if (p == 1 || p == 2) {
            f.flip |= bit;
        }
        for (std::size_t r = 0; r < dim; r++) {
            const bool one = (r & bit) != 0;
            if (p == 2) {
                // <r|Y|r^1>: row 0 -> -i, row 1 -> +i
                f.phase[r] *= one ? cplx{0.0, 1.0} : cplx{0.0, -1.0};
            } else if (p == 3 && one) {
                f.phase[r] = -f.phase[r];
            }
        }
    }
    return f;
}

}  // namespace

PauliCoefficients pauli_decompose(const ComplexMatrix &op) {
    if (!op.is_square()) {
        throw std::invalid_argument("pauli_decompose: operator must be square");
    }
    const std::size_t dim = op.rows();
    if (dim < 2 || (dim & (dim - 1)) != 0) {
        throw std::invalid_argument("pauli_decompose: dimension must be a power of two");
    }
    const int n = std::countr_zero(dim);
    if (n > 5) {
        throw std::invalid_argument("pauli_decompose: at most 5 qubits");
    }
    PauliCoefficients c;
    c.num_qubits = n;
    c.coeffs.resize(std::size_t{1} << (2 * n));
    for (std::size_t s = 0; s < c.coeffs.size(); s++) {
        const PauliRowForm f = pauli_row_form(n, s);
        // Tr[P^dagger O] = sum_r conj(P[r, c]) O[r, c]
        cplx total{};
        for (std::size_t r = 0; r < dim; r++) {
            total += std::conj(f.phase[r]) * op(r, r ^ f.flip);
        }
        c.coeffs[s] = total / static_cast<double>(dim);
    }
    return c;
}

ComplexMatrix pauli_reconstruct(const PauliCoefficients &c) {
    const int n = c.num_qubits;
    if (c.coeffs.size() != (std::size_t{1} << (2 * n))) {
        throw std::invalid_argument("pauli_reconstruct: coefficient count does not match qubit count");
    }
    const std::size_t dim = std::size_t{1} << n;
    ComplexMatrix out(dim, dim);
    for (std::size_t s = 0; s < c.coeffs.size(); s++) {
        if (c.coeffs[s] == cplx{}) {
            continue;
        }
        const PauliRowForm f = pauli_row_form(n, s);
        for (std::size_t r = 0; r < dim; r++) {
            out(r, r ^ f.flip) += c.coeffs[s] * f.phase[r];
        }
    }
    return out;
}

std::vector<ComplexMatrix> member_operators(const CircuitSpec &spec, const Head &head) {
    if (head.kind() != HeadKind::Linear) {
        throw std::invalid_argument("predicted_operator: requires a linear head");
    }
    spec.validate();
    const std::size_t dim = std::size_t{1} << spec.n_sys;
    const auto outcomes = outcome_table(spec.n_sys, spec.measured);
    std::vector<double> diag(dim);
    for (std::size_t idx = 0; idx < dim; idx++) {
        const double parity = (std::popcount(outcomes[idx]) % 2 == 0) ? 1.0 : -1.0;
        diag[idx] = head.params()[0] + head.params()[1] * parity;
    }
    const ComplexMatrix measure = ComplexMatrix::diagonal(diag);
    std::vector<ComplexMatrix> ops;
    for (std::size_t i = 0; i < spec.num_members(); i++) {
        const ComplexMatrix u = realization_unitary(spec, i);
        ops.push_back(u.adjoint() * measure * u);
    }
    return ops;
}

ComplexMatrix predicted_operator(const CircuitSpec &spec, const Head &head) {
    const auto ops = member_operators(spec, head);
    const auto w = spec.ensemble.weights();
    const std::size_t dim = std::size_t{1} << spec.n_sys;
    ComplexMatrix total(dim, dim);
    for (std::size_t i = 0; i < ops.size(); i++) {
        total += ops[i] * cplx{w[i], 0.0};
    }
    return total;
}

BlochAngles extract_bloch_angles(const PauliCoefficients &c) {
    if (c.num_qubits != 2) {
        throw std::invalid_argument("extract_bloch_angles: expects two-qubit coefficients");
    }
    static constexpr std::array<std::array<const char *, 2>, 4> kPairs = {{
        {"zy", "zx"},
        {"0y", "0x"},
        {"yz", "xz"},
        {"y0", "x0"},
    }};
    BlochAngles out;
    for (std::size_t k = 0; k < kPairs.size(); k++) {
        const double num = c.real(kPairs[k][0]);
        const double den = c.real(kPairs[k][1]);
        out.defined[k] = std::abs(num) > 1e-10 || std::abs(den) > 1e-10;
        out.xi[k] = out.defined[k] ? std::atan2(num, den) : 0.0;
    }
    return out;
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) {
        a += two_pi;
    } else if (a > std::numbers::pi) {
        a -= two_pi;
    }
    return a;
}

std::vector<double> cyclic_gaps(std::vector<double> angles) {
    if (angles.empty()) {
        return {};
    }
    for (auto &a : angles) {
        a = wrap_angle(a);
    }
    std::sort(angles.begin(), angles.end());
    std::vector<double> gaps;
    for (std::size_t i = 0; i + 1 < angles.size(); i++) {
        gaps.push_back(angles[i + 1] - angles[i]);
    }
    gaps.push_back(2.0 * std::numbers::pi - (angles.back() - angles.front()));
    return gaps;
}

BlackBoxAnalysis analyze_black_box(const CircuitSpec &spec, const Head &head) {
    BlackBoxAnalysis a;
    a.weights = spec.ensemble.weights();
    const auto ops = member_operators(spec, head);
    a.predicted = ComplexMatrix(ops.front().rows(), ops.front().cols());
    for (std::size_t i = 0; i < ops.size(); i++) {
        a.predicted += ops[i] * cplx{a.weights[i], 0.0};
        a.members.push_back(pauli_decompose(ops[i]));
        if (spec.n_sys == 2) {
            a.angles.push_back(extract_bloch_angles(a.members.back()));
        }
    }
    a.predicted_coefficients = pauli_decompose(a.predicted);
    return a;
}

}  // namespace rqnn
