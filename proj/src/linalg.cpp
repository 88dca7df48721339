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

#include "rqnn/linalg.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rqnn {

namespace {

using EigenMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EigenMat to_eigen(const ComplexMatrix &m) {
    EigenMat out(m.rows(), m.cols());
    std::copy(m.entries().begin(), m.entries().end(), out.data());
    return out;
}

ComplexMatrix from_eigen(const EigenMat &m) {
    return ComplexMatrix(m.rows(), m.cols(), std::vector<cplx>(m.data(), m.data() + m.size()));
}

void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols) {
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entries length != rows * cols");
    }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto &row : rows) {
        if (row.size() != cols_) {
            throw std::invalid_argument("ComplexMatrix: ragged initializer");
        }
        entries_.insert(entries_.end(), row.begin(), row.end());
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; i++) {
        out(i, i) = 1.0;
    }
    return out;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
    ComplexMatrix out(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); i++) {
        out(i, i) = values[i];
    }
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; r++) {
        for (std::size_t c = 0; c < cols_; c++) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); i++) {
        t += (*this)(i, i);
    }
    return t;
}

double ComplexMatrix::max_abs_diff(const ComplexMatrix &other) const {
    require_same_shape(*this, other, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < entries_.size(); i++) {
        m = std::max(m, std::abs(entries_[i] - other.entries_[i]));
    }
    return m;
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto &e : entries_) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

bool ComplexMatrix::is_unitary(double tol) const {
    if (!is_square()) {
        return false;
    }
    return (adjoint() * *this).max_abs_diff(identity(rows_)) < tol;
}

bool ComplexMatrix::is_hermitian(double tol) const {
    return is_square() && max_abs_diff(adjoint()) < tol;
}

ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < entries_.size(); i++) {
        entries_[i] += other.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < entries_.size(); i++) {
        entries_[i] -= other.entries_[i];
    }
    return *this;
}

ComplexMatrix &ComplexMatrix::operator*=(cplx scale) {
    for (auto &e : entries_) {
        e *= scale;
    }
    return *this;
}

ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("matrix product: inner dimensions differ");
    }
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); r++) {
        for (std::size_t k = 0; k < a.cols(); k++) {
            const cplx v = a(r, k);
            if (v == cplx{}) {
                continue;
            }
            for (std::size_t c = 0; c < b.cols(); c++) {
                out(r, c) += v * b(k, c);
            }
        }
    }
    return out;
}

StateVector::StateVector(int num_qubits, std::vector<cplx> amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    if (num_qubits < 0 || num_qubits > 30 || amplitudes_.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("StateVector: amplitude count must be 2^num_qubits");
    }
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw std::invalid_argument("StateVector: cannot normalize a zero or non-finite vector");
    }
    for (auto &a : amplitudes_) {
        a /= n;
    }
}

StateVector::StateVector(int num_qubits, std::vector<cplx> amplitudes, Unnormalized)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    if (num_qubits < 0 || num_qubits > 30 || amplitudes_.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("StateVector: amplitude count must be 2^num_qubits");
    }
}

StateVector StateVector::basis(int num_qubits, std::size_t index) {
    std::vector<cplx> amps(std::size_t{1} << num_qubits);
    if (index >= amps.size()) {
        throw std::out_of_range("StateVector::basis: index out of range");
    }
    amps[index] = 1.0;
    return StateVector(num_qubits, std::move(amps));
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amplitudes_) {
        s += std::norm(a);
    }
    return std::sqrt(s);
}

ComplexMatrix StateVector::density_matrix() const {
    ComplexMatrix rho(dim(), dim());
    for (std::size_t r = 0; r < dim(); r++) {
        for (std::size_t c = 0; c < dim(); c++) {
            rho(r, c) = amplitudes_[r] * std::conj(amplitudes_[c]);
        }
    }
    return rho;
}

ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ar++) {
        for (std::size_t ac = 0; ac < a.cols(); ac++) {
            const cplx v = a(ar, ac);
            for (std::size_t br = 0; br < b.rows(); br++) {
                for (std::size_t bc = 0; bc < b.cols(); bc++) {
                    out(ar * b.rows() + br, ac * b.cols() + bc) = v * b(br, bc);
                }
            }
        }
    }
    return out;
}

ComplexMatrix matexp(const ComplexMatrix &a) {
    if (!a.is_square()) {
        throw std::invalid_argument("matexp: matrix must be square");
    }
    // Higham (2005) degree-13 coefficients and the matching 1-norm bound.
    static constexpr double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    static constexpr double theta13 = 5.371920351148152;

    const std::size_t n = a.rows();
    if (n == 0) {
        return a;
    }
    EigenMat A = to_eigen(a);
    const double norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
        A /= std::ldexp(1.0, squarings);
    }
    const EigenMat I = EigenMat::Identity(n, n);
    const EigenMat A2 = A * A;
    const EigenMat A4 = A2 * A2;
    const EigenMat A6 = A4 * A2;
    const EigenMat U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
                            b[3] * A2 + b[1] * I);
    const EigenMat V =
        A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    EigenMat R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < squarings; k++) {
        R = (R * R).eval();
    }
    return from_eigen(R);
}

ComplexMatrix matexp_frechet(const ComplexMatrix &a, const ComplexMatrix &direction) {
    if (!a.is_square() || !direction.is_square() || a.rows() != direction.rows()) {
        throw std::invalid_argument("matexp_frechet: a and direction must be square with equal dims");
    }
    const std::size_t n = a.rows();
    ComplexMatrix block(2 * n, 2 * n);
    for (std::size_t r = 0; r < n; r++) {
        for (std::size_t c = 0; c < n; c++) {
            block(r, c) = a(r, c);
            block(n + r, n + c) = a(r, c);
            block(r, n + c) = direction(r, c);
        }
    }
    const ComplexMatrix e = matexp(block);
    ComplexMatrix out(n, n);
    for (std::size_t r = 0; r < n; r++) {
        for (std::size_t c = 0; c < n; c++) {
            out(r, c) = e(r, n + c);
        }
    }
    return out;
}

HermitianEigen hermitian_eig_desc(const ComplexMatrix &a) {
    if (!a.is_square()) {
        throw std::invalid_argument("hermitian_eig_desc: matrix must be square");
    }
    const double scale = std::max(1.0, a.max_abs());
    if (!a.is_hermitian(1e-10 * scale)) {
        throw std::invalid_argument("hermitian_eig_desc: matrix is not Hermitian");
    }
    const std::size_t n = a.rows();
    Eigen::MatrixXcd m(n, n);
    for (std::size_t r = 0; r < n; r++) {
        for (std::size_t c = 0; c < n; c++) {
            m(r, c) = a(r, c);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eig_desc: eigensolver did not converge");
    }
    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    // Eigen sorts ascending.
    for (std::size_t k = 0; k < n; k++) {
        const std::size_t src = n - 1 - k;
        out.values[k] = solver.eigenvalues()(src);
        for (std::size_t r = 0; r < n; r++) {
            out.vectors(r, k) = solver.eigenvectors()(r, src);
        }
    }
    return out;
}

ComplexMatrix partial_trace(const StateVector &state, std::span<const int> keep_qubits) {
    const int n = state.num_qubits();
    if (keep_qubits.empty()) {
        throw std::invalid_argument("partial_trace: keep list is empty");
    }
    std::vector<bool> seen(n, false);
    for (int q : keep_qubits) {
        if (q < 0 || q >= n) {
            throw std::out_of_range("partial_trace: qubit index out of range");
        }
        if (seen[q]) {
            throw std::invalid_argument("partial_trace: duplicate qubit index");
        }
        seen[q] = true;
    }
    std::vector<int> traced;
    for (int q = 0; q < n; q++) {
        if (!seen[q]) {
            traced.push_back(q);
        }
    }
    const auto bit_of = [n](int q) { return n - 1 - q; };
    const std::size_t keep_dim = std::size_t{1} << keep_qubits.size();
    const std::size_t env_dim = std::size_t{1} << traced.size();

    // Full index for (kept pattern, environment pattern).
    const auto full_index = [&](std::size_t kept, std::size_t env) {
        std::size_t idx = 0;
        const std::size_t k = keep_qubits.size();
        for (std::size_t j = 0; j < k; j++) {
            if ((kept >> (k - 1 - j)) & 1) {
                idx |= std::size_t{1} << bit_of(keep_qubits[j]);
            }
        }
        const std::size_t t = traced.size();
        for (std::size_t j = 0; j < t; j++) {
            if ((env >> (t - 1 - j)) & 1) {
                idx |= std::size_t{1} << bit_of(traced[j]);
            }
        }
        return idx;
    };

    std::vector<std::size_t> table(keep_dim * env_dim);
    for (std::size_t kp = 0; kp < keep_dim; kp++) {
        for (std::size_t e = 0; e < env_dim; e++) {
            table[kp * env_dim + e] = full_index(kp, e);
        }
    }
    ComplexMatrix rho(keep_dim, keep_dim);
    const auto amps = state.amplitudes();
    for (std::size_t r = 0; r < keep_dim; r++) {
        for (std::size_t c = r; c < keep_dim; c++) {
            cplx s = 0.0;
            for (std::size_t e = 0; e < env_dim; e++) {
                s += amps[table[r * env_dim + e]] * std::conj(amps[table[c * env_dim + e]]);
            }
            rho(r, c) = s;
            rho(c, r) = std::conj(s);
        }
        rho(r, r) = rho(r, r).real();
    }
    return rho;
}

cplx trace_of_product(const ComplexMatrix &a, const ComplexMatrix &b) {
    if (a.cols() != b.rows() || a.rows() != b.cols()) {
        throw std::invalid_argument("trace_of_product: shape mismatch");
    }
    cplx t = 0.0;
    for (std::size_t r = 0; r < a.rows(); r++) {
        for (std::size_t k = 0; k < a.cols(); k++) {
            t += a(r, k) * b(k, r);
        }
    }
    return t;
}

}  // namespace rqnn
