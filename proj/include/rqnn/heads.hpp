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
 * Classical post-processing heads f_beta, the ensemble prediction, losses and
 * classification metrics.
 *
 * Scalar heads (Linear, PolyUni) read the parity expectation
 * <Z...Z> = sum_s (-1)^popcount(s) p_s of the measured qubits, which is
 * p_+ - p_- for a single measured qubit. PolyMulti reads the full outcome
 * probability vector.
 */

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rqnn/circuit.hpp"
#include "rqnn/linalg.hpp"

namespace rqnn {

enum class HeadKind { Linear, PolyMulti, PolyUni };

/// Parameters are stored flat. Layouts:
///   Linear:    [b0, b1]
///   PolyUni:   [b0, ..., b_degree]
///   PolyMulti: [b0 | b1 (dim) | b2 upper triangle i <= j | b3 entries i <= j <= k]
/// The symmetric b2 and b3 entries stand for every permutation of their index,
/// so f = b0 + b1.x + x^T B2 x + B3(x, x, x) with B2, B3 fully symmetric.
class Head {
public:
    static Head linear(double b0, double b1);
    static Head poly_uni(int degree);
    /// order 2 or 3 over an input vector of length `dim`.
    static Head poly_multi(int order, std::size_t dim);

    HeadKind kind() const { return kind_; }
    bool takes_scalar() const { return kind_ != HeadKind::PolyMulti; }
    /// Polynomial degree (1 for Linear).
    int order() const { return order_; }
    std::size_t input_dim() const { return dim_; }

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::size_t num_params() const { return params_.size(); }

    /// PolyMulti accessors over the symmetric storage.
    double beta0() const { return params_[0]; }
    double beta1(std::size_t i) const;
    double beta2(std::size_t i, std::size_t j) const;
    double beta3(std::size_t i, std::size_t j, std::size_t k) const;
    void set_beta1(std::size_t i, double v);
    void set_beta2(std::size_t i, std::size_t j, double v);
    void set_beta3(std::size_t i, std::size_t j, std::size_t k, double v);

    /// Head input feature from an outcome probability vector: the parity
    /// expectation for scalar heads, the vector itself otherwise.
    double scalar_feature(std::span<const double> probs) const;

    double eval_scalar(double x) const;
    double eval_vector(std::span<const double> x) const;
    /// f applied to an outcome probability vector (reducing for scalar heads).
    double eval_probs(std::span<const double> probs) const;

    /// d f / d params at the given probability vector.
    void param_gradient(std::span<const double> probs, std::span<double> out) const;
    /// d f / d p_s at the given probability vector.
    void input_gradient(std::span<const double> probs, std::span<double> out) const;

private:
    Head(HeadKind kind, int order, std::size_t dim, std::size_t num_params);

    std::size_t b2_offset() const { return 1 + dim_; }
    std::size_t b3_offset() const { return 1 + dim_ + dim_ * (dim_ + 1) / 2; }
    std::size_t b2_index(std::size_t i, std::size_t j) const;
    std::size_t b3_index(std::size_t i, std::size_t j, std::size_t k) const;

    HeadKind kind_;
    int order_;
    std::size_t dim_;
    std::vector<double> params_;
};

/// Throws std::invalid_argument when the arity does not match the head kind.
double eval_head(const Head &head, double x);
double eval_head(const Head &head, std::span<const double> x);

/// Quadratic and cubic parts of a PolyMulti head after eliminating the last
/// input through sum_s x_s = 1. These are the identifiable coefficients on
/// the probability simplex.
struct SimplexReducedHead {
    std::size_t free_dim;
    std::vector<double> quadratic;  // free_dim x free_dim, symmetric, row-major
    std::vector<double> cubic;      // free_dim^3, symmetric
    double quadratic_norm;          // Frobenius
    double cubic_norm;              // Frobenius
};

SimplexReducedHead reduce_on_simplex(const Head &head);

struct Prediction {
    std::vector<std::vector<double>> member_probs;
    std::vector<double> member_values;
    std::vector<double> weights;
    double value = 0.0;
    std::optional<double> sigmoid;
};

/// Ensemble prediction P = sum_i w_i f(p_i), reduced in member order.
Prediction predict(const CircuitSpec &spec, const Head &head, const StateVector &state);
Prediction predict(const CompiledCircuit &circuit, const Head &head, const StateVector &state);

enum class LossKind { Mse, CrossEntropy };

double sigmoid(double x);

double mse_loss(std::span<const double> preds, std::span<const double> targets);

struct CrossEntropyResult {
    double loss;
    std::vector<double> g;  // sigmoid of each prediction
};

CrossEntropyResult cross_entropy_loss(std::span<const double> preds, std::span<const double> labels);

/// Fraction of samples whose thresholded sigmoid (G >= 0.5 -> 1) equals the label.
double accuracy(std::span<const double> g, std::span<const double> labels);

/// Per-sample loss term and its derivative d/dP (before the 1/N average).
double sample_loss(LossKind kind, double pred, double target);
double sample_loss_derivative(LossKind kind, double pred, double target);

}  // namespace rqnn
