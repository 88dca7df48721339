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

// In-place statevector kernels for one-qubit and adjacent two-qubit gates.
// Qubit q addresses bit (n - 1 - q) of the basis index.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include "rqnn/linalg.hpp"

namespace rqnn::kernels {

using Mat2 = std::array<cplx, 4>;
using Mat4 = std::array<cplx, 16>;

inline Mat2 to_mat2(const ComplexMatrix &m) {
    return {m(0, 0), m(0, 1), m(1, 0), m(1, 1)};
}

inline Mat4 to_mat4(const ComplexMatrix &m) {
    Mat4 out;
    for (std::size_t r = 0; r < 4; r++) {
        for (std::size_t c = 0; c < 4; c++) {
            out[4 * r + c] = m(r, c);
        }
    }
    return out;
}

template <std::size_t N>
ComplexMatrix to_matrix(const std::array<cplx, N * N> &m) {
    return ComplexMatrix(N, N, std::vector<cplx>(m.begin(), m.end()));
}

inline void apply_1q(std::span<cplx> psi, int n, int q, const Mat2 &u) {
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    const std::size_t dim = psi.size();
    for (std::size_t hi = 0; hi < dim; hi += 2 * stride) {
        for (std::size_t lo = 0; lo < stride; lo++) {
            const std::size_t i0 = hi + lo;
            const std::size_t i1 = i0 + stride;
            const cplx a0 = psi[i0];
            const cplx a1 = psi[i1];
            psi[i0] = u[0] * a0 + u[1] * a1;
            psi[i1] = u[2] * a0 + u[3] * a1;
        }
    }
}

/// Gate on qubits (q, q + 1); the gate's row index is 2 * bit(q) + bit(q + 1).
inline void apply_2q(std::span<cplx> psi, int n, int q, const Mat4 &u) {
    const std::size_t stride = std::size_t{1} << (n - 2 - q);
    const std::size_t dim = psi.size();
    for (std::size_t hi = 0; hi < dim; hi += 4 * stride) {
        for (std::size_t lo = 0; lo < stride; lo++) {
            const std::size_t i0 = hi + lo;
            const cplx a0 = psi[i0];
            const cplx a1 = psi[i0 + stride];
            const cplx a2 = psi[i0 + 2 * stride];
            const cplx a3 = psi[i0 + 3 * stride];
            psi[i0] = u[0] * a0 + u[1] * a1 + u[2] * a2 + u[3] * a3;
            psi[i0 + stride] = u[4] * a0 + u[5] * a1 + u[6] * a2 + u[7] * a3;
            psi[i0 + 2 * stride] = u[8] * a0 + u[9] * a1 + u[10] * a2 + u[11] * a3;
            psi[i0 + 3 * stride] = u[12] * a0 + u[13] * a1 + u[14] * a2 + u[15] * a3;
        }
    }
}

/// acc(a, b) += sum_rest chi[a, rest] * conj(lam[b, rest]) on qubit q, so that
/// <lam| G |chi> = Tr[G acc] for any one-qubit G.
inline void accumulate_outer_1q(Mat2 &acc, std::span<const cplx> chi, std::span<const cplx> lam,
                                int n, int q) {
    const std::size_t stride = std::size_t{1} << (n - 1 - q);
    const std::size_t dim = chi.size();
    for (std::size_t hi = 0; hi < dim; hi += 2 * stride) {
        for (std::size_t lo = 0; lo < stride; lo++) {
            const std::size_t i0 = hi + lo;
            const std::size_t i1 = i0 + stride;
            const cplx l0 = std::conj(lam[i0]);
            const cplx l1 = std::conj(lam[i1]);
            acc[0] += chi[i0] * l0;
            acc[1] += chi[i0] * l1;
            acc[2] += chi[i1] * l0;
            acc[3] += chi[i1] * l1;
        }
    }
}

inline void accumulate_outer_2q(Mat4 &acc, std::span<const cplx> chi, std::span<const cplx> lam,
                                int n, int q) {
    const std::size_t stride = std::size_t{1} << (n - 2 - q);
    const std::size_t dim = chi.size();
    for (std::size_t hi = 0; hi < dim; hi += 4 * stride) {
        for (std::size_t lo = 0; lo < stride; lo++) {
            const std::size_t i0 = hi + lo;
            const cplx c[4] = {chi[i0], chi[i0 + stride], chi[i0 + 2 * stride], chi[i0 + 3 * stride]};
            const cplx l[4] = {std::conj(lam[i0]), std::conj(lam[i0 + stride]),
                               std::conj(lam[i0 + 2 * stride]), std::conj(lam[i0 + 3 * stride])};
            for (int a = 0; a < 4; a++) {
                for (int b = 0; b < 4; b++) {
                    acc[4 * a + b] += c[a] * l[b];
                }
            }
        }
    }
}

template <std::size_t N>
std::array<cplx, N * N> adjoint_of(const std::array<cplx, N * N> &m) {
    std::array<cplx, N * N> out;
    for (std::size_t r = 0; r < N; r++) {
        for (std::size_t c = 0; c < N; c++) {
            out[N * c + r] = std::conj(m[N * r + c]);
        }
    }
    return out;
}

}  // namespace rqnn::kernels
