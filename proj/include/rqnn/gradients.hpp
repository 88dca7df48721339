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
 * Exact loss gradients for every trainable parameter.
 *
 * The circuit part uses reverse-mode (adjoint) accumulation: one forward pass
 * caches the state in front of every gate, one backward pass carries the
 * adjoint state. Each gate collects the gate-local outer product
 * M = sum chi lambda^dagger over samples and members; a single Fréchet
 * derivative per gate and batch then yields all of its coefficients.
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include "rqnn/circuit.hpp"
#include "rqnn/heads.hpp"

namespace rqnn {

struct Model {
    CircuitSpec circuit;
    Head head = Head::linear(0.0, 1.0);
};

enum class ParamGroup { ThetaU1 = 0, ThetaU2 = 1, Alpha = 2, Logits = 3, Beta = 4 };
inline constexpr int kNumParamGroups = 5;
const char *param_group_name(ParamGroup g);

/// Flat parameter order: U1 gates, U2 gates (15 each, schedule order), alphas
/// (member-major, 3 each), logits, head parameters.
std::vector<double> flatten_params(const Model &model);
void unflatten_params(Model &model, std::span<const double> flat);
std::vector<ParamGroup> param_groups(const Model &model);

struct GradientBundle {
    std::vector<Su4Coefficients> d_theta_u1;
    std::vector<Su4Coefficients> d_theta_u2;
    std::vector<Su2Coefficients> d_alpha;
    std::vector<double> d_logits;
    std::vector<double> d_beta;

    static GradientBundle zeros_like(const Model &model);
    /// Same order as flatten_params.
    std::vector<double> flatten() const;
    static GradientBundle unflatten_like(const Model &model, std::span<const double> flat);
    bool all_finite() const;
};

struct ClassicalGradient {
    std::vector<double> dl_dp;      // per sample, includes the 1/N average
    std::vector<double> d_weights;  // dL/dw_i before the softmax chain
    std::vector<double> d_logits;
    std::vector<double> d_beta;
    double loss = 0.0;
};

/// Gradients of the averaged loss with respect to logits and head parameters.
ClassicalGradient grad_classical(std::span<const Prediction> preds, std::span<const double> targets,
                                 LossKind loss, const Head &head);

struct CircuitGradient {
    std::vector<Su4Coefficients> d_theta_u1;
    std::vector<Su4Coefficients> d_theta_u2;
    std::vector<Su2Coefficients> d_alpha;
};

/// Accumulates circuit gradients over many samples; see file comment.
class AdjointAccumulator {
public:
    AdjointAccumulator(const CircuitSpec &spec, const Head &head);

    const CompiledCircuit &circuit() const { return circuit_; }

    /// Forward pass that caches intermediate states for the next backward().
    Prediction forward(const StateVector &state);
    /// Backpropagates dL/dP for the most recent forward().
    void backward(double dl_dp);

    CircuitGradient finalize() const;

private:
    const CircuitSpec &spec_;
    const Head &head_;
    CompiledCircuit circuit_;
    std::size_t dim_;
    std::vector<std::vector<cplx>> u1_states_;
    std::vector<std::vector<std::vector<cplx>>> random_states_;
    std::vector<std::vector<std::vector<cplx>>> u2_states_;
    Prediction last_;
    bool has_forward_ = false;
    std::vector<kernels::Mat4> acc_u1_;
    std::vector<kernels::Mat4> acc_u2_;
    std::vector<kernels::Mat2> acc_random_;
    std::vector<cplx> lambda_;
    std::vector<cplx> lambda_total_;
    std::vector<double> dfdp_;
};

/// Circuit gradient for a single sample given dL/dP for that sample.
CircuitGradient grad_circuit(const CircuitSpec &spec, const Head &head, const StateVector &state,
                             double dl_dp);

struct BatchGradient {
    double loss = 0.0;
    std::vector<double> predictions;
    GradientBundle grad;
};

/// Averaged loss over the samples and its full gradient.
BatchGradient loss_and_gradient(const Model &model, std::span<const StateVector> states,
                                std::span<const double> targets, LossKind loss);

double batch_loss(const Model &model, std::span<const StateVector> states, std::span<const double> targets,
                  LossKind loss);

GradientBundle numeric_gradient(const Model &model, std::span<const StateVector> states,
                                std::span<const double> targets, LossKind loss, double eps = 1e-5);

/// Comparison against central differences. Components whose numeric value is
/// below `small` in magnitude are judged by absolute error, the rest by
/// relative error |analytic - numeric| / |numeric|.
struct FdGroupReport {
    ParamGroup group;
    std::size_t count = 0;
    double max_rel_error = 0.0;
    double max_abs_error_small = 0.0;
};

struct FdReport {
    std::vector<FdGroupReport> groups;
    double small = 1e-6;

    double max_rel_error() const;
    double max_abs_error_small() const;
    bool passes(double rel_tol = 1e-6, double abs_tol = 1e-8) const;
    std::string summary() const;
};

FdReport compare_gradients(const Model &model, const GradientBundle &analytic, const GradientBundle &numeric,
                           double small = 1e-6);

FdReport finite_diff_check(const Model &model, std::span<const StateVector> states,
                           std::span<const double> targets, LossKind loss, double eps = 1e-5);

}  // namespace rqnn
