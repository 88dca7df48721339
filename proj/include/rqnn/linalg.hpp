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

#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace rqnn {

using cplx = std::complex<double>;

/// Dense complex matrix stored row-major.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix diagonal(std::span<const double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    cplx &operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::span<cplx> entries() { return entries_; }
    std::span<const cplx> entries() const { return entries_; }

    ComplexMatrix adjoint() const;
    cplx trace() const;

    /// max_{ij} |a_ij - b_ij|; shapes must agree.
    double max_abs_diff(const ComplexMatrix &other) const;
    double max_abs() const;
    bool is_unitary(double tol = 1e-12) const;
    bool is_hermitian(double tol = 1e-12) const;

    ComplexMatrix &operator+=(const ComplexMatrix &other);
    ComplexMatrix &operator-=(const ComplexMatrix &other);
    ComplexMatrix &operator*=(cplx scale);

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

/// Pure state of `num_qubits` qubits. Qubit 0 is the most significant bit
/// of the basis index.
class StateVector {
public:
    StateVector() = default;
    /// Takes ownership of `amplitudes` and rescales them to unit norm.
    /// Throws if the length is not 2^num_qubits or the vector is zero.
    StateVector(int num_qubits, std::vector<cplx> amplitudes);

    struct Unnormalized {};
    /// Keeps the amplitudes as given; used for outputs of unitary maps.
    StateVector(int num_qubits, std::vector<cplx> amplitudes, Unnormalized);

    static StateVector basis(int num_qubits, std::size_t index);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amplitudes_.size(); }
    std::span<const cplx> amplitudes() const { return amplitudes_; }
    const cplx &operator[](std::size_t i) const { return amplitudes_[i]; }

    double norm() const;
    ComplexMatrix density_matrix() const;

private:
    int num_qubits_ = 0;
    std::vector<cplx> amplitudes_;
};

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b);

/// Matrix exponential by scaling and squaring around a degree-13 Padé core.
ComplexMatrix matexp(const ComplexMatrix &a);

/// Fréchet derivative d/dt exp(a + t e)|_{t=0}, read off the upper-right block
/// of exp([[a, e], [0, a]]).
ComplexMatrix matexp_frechet(const ComplexMatrix &a, const ComplexMatrix &direction);

struct HermitianEigen {
    std::vector<double> values;  // descending
    ComplexMatrix vectors;       // column k pairs with values[k]
};

HermitianEigen hermitian_eig_desc(const ComplexMatrix &a);

/// Reduced density matrix on `keep_qubits`. The first listed qubit becomes the
/// most significant bit of the reduced index.
ComplexMatrix partial_trace(const StateVector &state, std::span<const int> keep_qubits);

/// Tr[a b] without forming the product.
cplx trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b);

}  // namespace rqnn
