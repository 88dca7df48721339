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

#include "rqnn/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rqnn {

const char *param_group_name(ParamGroup g) {
    switch (g) {
        case ParamGroup::ThetaU1:
            return "theta_u1";
        case ParamGroup::ThetaU2:
            return "theta_u2";
        case ParamGroup::Alpha:
            return "alpha";
        case ParamGroup::Logits:
            return "logits";
        case ParamGroup::Beta:
            return "beta";
    }
    return "?";
}

namespace {

template <typename F>
void for_each_gate(DeterministicLayerSpec &layer, F &&f) {
    for (auto &unit : layer.units) {
        for (auto &g : unit) {
            f(g);
        }
    }
}

template <typename F>
void for_each_gate(const DeterministicLayerSpec &layer, F &&f) {
    for (const auto &unit : layer.units) {
        for (const auto &g : unit) {
            f(g);
        }
    }
}

std::size_t num_params(const Model &m) {
    return kSu4Params * (m.circuit.u1.num_gates() + m.circuit.u2.num_gates()) +
           kSu2Params * m.circuit.ensemble.alphas.size() + m.circuit.ensemble.logits.size() +
           m.head.num_params();
}

// 2 Re Tr[L(a, g_j) acc] for every generator g_j, via the adjoint identity
// Tr[L(a, e) acc] = Tr[L(a^dagger, acc^dagger)^dagger e].
template <std::size_t N, typename Gen>
void gate_gradient(const ComplexMatrix &exponent, const std::array<cplx, N * N> &acc, int num_gens, Gen &&gen,
                   double *out) {
    const ComplexMatrix k = matexp_frechet(exponent.adjoint(), kernels::to_matrix<N>(acc).adjoint()).adjoint();
    for (int j = 0; j < num_gens; j++) {
        out[j] = 2.0 * trace_of_product(k, gen(j)).real();
    }
}

}  // namespace

std::vector<double> flatten_params(const Model &model) {
    std::vector<double> flat;
    flat.reserve(num_params(model));
    const auto push_gate = [&](const TwoQubitGateParams &g) { flat.insert(flat.end(), g.c.begin(), g.c.end()); };
    for_each_gate(model.circuit.u1, push_gate);
    for_each_gate(model.circuit.u2, push_gate);
    for (const auto &a : model.circuit.ensemble.alphas) {
        flat.insert(flat.end(), a.begin(), a.end());
    }
    flat.insert(flat.end(), model.circuit.ensemble.logits.begin(), model.circuit.ensemble.logits.end());
    flat.insert(flat.end(), model.head.params().begin(), model.head.params().end());
    return flat;
}

void unflatten_params(Model &model, std::span<const double> flat) {
    if (flat.size() != num_params(model)) {
        throw std::invalid_argument("unflatten_params: length does not match model");
    }
    std::size_t p = 0;
    const auto pull_gate = [&](TwoQubitGateParams &g) {
        std::copy_n(flat.begin() + p, kSu4Params, g.c.begin());
        p += kSu4Params;
    };
    for_each_gate(model.circuit.u1, pull_gate);
    for_each_gate(model.circuit.u2, pull_gate);
    for (auto &a : model.circuit.ensemble.alphas) {
        std::copy_n(flat.begin() + p, kSu2Params, a.begin());
        p += kSu2Params;
    }
    for (auto &l : model.circuit.ensemble.logits) {
        l = flat[p++];
    }
    for (auto &b : model.head.params()) {
        b = flat[p++];
    }
}

std::vector<ParamGroup> param_groups(const Model &model) {
    std::vector<ParamGroup> groups;
    groups.insert(groups.end(), kSu4Params * model.circuit.u1.num_gates(), ParamGroup::ThetaU1);
    groups.insert(groups.end(), kSu4Params * model.circuit.u2.num_gates(), ParamGroup::ThetaU2);
    groups.insert(groups.end(), kSu2Params * model.circuit.ensemble.alphas.size(), ParamGroup::Alpha);
    groups.insert(groups.end(), model.circuit.ensemble.logits.size(), ParamGroup::Logits);
    groups.insert(groups.end(), model.head.num_params(), ParamGroup::Beta);
    return groups;
}

GradientBundle GradientBundle::zeros_like(const Model &model) {
    GradientBundle g;
    g.d_theta_u1.assign(model.circuit.u1.num_gates(), Su4Coefficients{});
    g.d_theta_u2.assign(model.circuit.u2.num_gates(), Su4Coefficients{});
    g.d_alpha.assign(model.circuit.ensemble.alphas.size(), Su2Coefficients{});
    g.d_logits.assign(model.circuit.ensemble.logits.size(), 0.0);
    g.d_beta.assign(model.head.num_params(), 0.0);
    return g;
}

std::vector<double> GradientBundle::flatten() const {
    std::vector<double> flat;
    for (const auto &g : d_theta_u1) {
        flat.insert(flat.end(), g.begin(), g.end());
    }
    for (const auto &g : d_theta_u2) {
        flat.insert(flat.end(), g.begin(), g.end());
    }
    for (const auto &a : d_alpha) {
        flat.insert(flat.end(), a.begin(), a.end());
    }
    flat.insert(flat.end(), d_logits.begin(), d_logits.end());
    flat.insert(flat.end(), d_beta.begin(), d_beta.end());
    return flat;
}

GradientBundle GradientBundle::unflatten_like(const Model &model, std::span<const double> flat) {
    GradientBundle g = zeros_like(model);
    if (flat.size() != num_params(model)) {
        throw std::invalid_argument("GradientBundle::unflatten_like: length does not match model");
    }
    std::size_t p = 0;
    for (auto &t : g.d_theta_u1) {
        std::copy_n(flat.begin() + p, kSu4Params, t.begin());
        p += kSu4Params;
    }
    for (auto &t : g.d_theta_u2) {
        std::copy_n(flat.begin() + p, kSu4Params, t.begin());
        p += kSu4Params;
    }
    for (auto &a : g.d_alpha) {
        std::copy_n(flat.begin() + p, kSu2Params, a.begin());
        p += kSu2Params;
    }
    for (auto &l : g.d_logits) {
        l = flat[p++];
    }
    for (auto &b : g.d_beta) {
        b = flat[p++];
    }
    return g;
}

bool GradientBundle::all_finite() const {
    const auto flat = flatten();
    return std::all_of(flat.begin(), flat.end(), [](double x) { return std::isfinite(x); });
}

ClassicalGradient grad_classical(std::span<const Prediction> preds, std::span<const double> targets,
                                 LossKind loss, const Head &head) {
    if (preds.size() != targets.size()) {
        throw std::invalid_argument("grad_classical: predictions and targets differ in length");
    }
    if (preds.empty()) {
        throw std::invalid_argument("grad_classical: empty batch");
    }
    const std::size_t members = preds.front().member_values.size();
    const double inv_n = 1.0 / static_cast<double>(preds.size());
    ClassicalGradient out;
    out.dl_dp.resize(preds.size());
    out.d_weights.assign(members, 0.0);
    out.d_beta.assign(head.num_params(), 0.0);
    std::vector<double> fgrad(head.num_params());
    for (std::size_t m = 0; m < preds.size(); m++) {
        const Prediction &p = preds[m];
        if (p.member_values.size() != members || p.member_probs.size() != members) {
            throw std::invalid_argument("grad_classical: predictions disagree on ensemble size");
        }
        out.loss += sample_loss(loss, p.value, targets[m]) * inv_n;
        const double g = sample_loss_derivative(loss, p.value, targets[m]) * inv_n;
        out.dl_dp[m] = g;
        for (std::size_t i = 0; i < members; i++) {
            out.d_weights[i] += g * p.member_values[i];
            head.param_gradient(p.member_probs[i], fgrad);
            for (std::size_t b = 0; b < fgrad.size(); b++) {
                out.d_beta[b] += g * p.weights[i] * fgrad[b];
            }
        }
    }
    const auto &w = preds.front().weights;
    double mean = 0.0;
    for (std::size_t i = 0; i < members; i++) {
        mean += w[i] * out.d_weights[i];
    }
    out.d_logits.resize(members);
    for (std::size_t j = 0; j < members; j++) {
        out.d_logits[j] = w[j] * (out.d_weights[j] - mean);
    }
    return out;
}

AdjointAccumulator::AdjointAccumulator(const CircuitSpec &spec, const Head &head)
    : spec_(spec), head_(head), circuit_(spec), dim_(circuit_.dim()) {
    const std::size_t members = circuit_.num_members();
    const int n = circuit_.n_sys();
    u1_states_.assign(circuit_.u1().size() + 1, std::vector<cplx>(dim_));
    random_states_.assign(members, std::vector<std::vector<cplx>>(n + 1, std::vector<cplx>(dim_)));
    u2_states_.assign(members, std::vector<std::vector<cplx>>(circuit_.u2().size() + 1, std::vector<cplx>(dim_)));
    acc_u1_.assign(circuit_.u1().size(), kernels::Mat4{});
    acc_u2_.assign(circuit_.u2().size(), kernels::Mat4{});
    acc_random_.assign(members * n, kernels::Mat2{});
    lambda_.resize(dim_);
    lambda_total_.resize(dim_);
    dfdp_.resize(circuit_.num_outcomes());
    if (!head.takes_scalar() && head.input_dim() != circuit_.num_outcomes()) {
        throw std::invalid_argument("head input dimension must equal 2^k");
    }
}

Prediction AdjointAccumulator::forward(const StateVector &state) {
    if (state.num_qubits() != circuit_.n_sys()) {
        throw std::invalid_argument("forward: state qubit count does not match circuit");
    }
    const int n = circuit_.n_sys();
    const auto u1 = circuit_.u1();
    const auto u2 = circuit_.u2();
    const std::size_t members = circuit_.num_members();

    std::copy(state.amplitudes().begin(), state.amplitudes().end(), u1_states_[0].begin());
    for (std::size_t g = 0; g < u1.size(); g++) {
        u1_states_[g + 1] = u1_states_[g];
        kernels::apply_2q(u1_states_[g + 1], n, u1[g].first_qubit, u1[g].u);
    }

    Prediction pred;
    pred.weights.assign(circuit_.weights().begin(), circuit_.weights().end());
    pred.member_probs.resize(members);
    pred.member_values.resize(members);
    for (std::size_t i = 0; i < members; i++) {
        auto &rs = random_states_[i];
        rs[0] = u1_states_.back();
        for (int q = 0; q < n; q++) {
            rs[q + 1] = rs[q];
            kernels::apply_1q(rs[q + 1], n, q, circuit_.random_gate(i, q));
        }
        auto &vs = u2_states_[i];
        vs[0] = rs.back();
        for (std::size_t g = 0; g < u2.size(); g++) {
            vs[g + 1] = vs[g];
            kernels::apply_2q(vs[g + 1], n, u2[g].first_qubit, u2[g].u);
        }
        pred.member_probs[i].resize(circuit_.num_outcomes());
        circuit_.accumulate_probs(vs.back(), pred.member_probs[i]);
        pred.member_values[i] = head_.eval_probs(pred.member_probs[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < members; i++) {
        total += pred.weights[i] * pred.member_values[i];
    }
    pred.value = total;
    last_ = pred;
    has_forward_ = true;
    return pred;
}

void AdjointAccumulator::backward(double dl_dp) {
    if (!has_forward_) {
        throw std::logic_error("backward() called without a preceding forward()");
    }
    const int n = circuit_.n_sys();
    const auto u1 = circuit_.u1();
    const auto u2 = circuit_.u2();
    const auto outcomes = circuit_.outcomes();
    std::fill(lambda_total_.begin(), lambda_total_.end(), cplx{});

    for (std::size_t i = 0; i < circuit_.num_members(); i++) {
        head_.input_gradient(last_.member_probs[i], dfdp_);
        const double scale = dl_dp * last_.weights[i];
        const auto &phi = u2_states_[i].back();
        for (std::size_t idx = 0; idx < dim_; idx++) {
            lambda_[idx] = (scale * dfdp_[outcomes[idx]]) * phi[idx];
        }
        for (std::size_t g = u2.size(); g-- > 0;) {
            kernels::accumulate_outer_2q(acc_u2_[g], u2_states_[i][g], lambda_, n, u2[g].first_qubit);
            kernels::apply_2q(lambda_, n, u2[g].first_qubit, u2[g].u_adj);
        }
        for (int q = n; q-- > 0;) {
            kernels::accumulate_outer_1q(acc_random_[i * n + q], random_states_[i][q], lambda_, n, q);
            kernels::apply_1q(lambda_, n, q, circuit_.random_gate_adj(i, q));
        }
        for (std::size_t idx = 0; idx < dim_; idx++) {
            lambda_total_[idx] += lambda_[idx];
        }
    }
    for (std::size_t g = u1.size(); g-- > 0;) {
        kernels::accumulate_outer_2q(acc_u1_[g], u1_states_[g], lambda_total_, n, u1[g].first_qubit);
        kernels::apply_2q(lambda_total_, n, u1[g].first_qubit, u1[g].u_adj);
    }
    has_forward_ = false;
}

CircuitGradient AdjointAccumulator::finalize() const {
    CircuitGradient out;
    const auto su4_gen = [](int j) -> const ComplexMatrix & { return su4_generator(j); };
    const auto su2_gen = [](int a) -> const ComplexMatrix & { return su2_generator(a); };
    const auto layer_grad = [&](const DeterministicLayerSpec &layer, const std::vector<kernels::Mat4> &acc,
                                std::vector<Su4Coefficients> &dst) {
        std::size_t g = 0;
        for_each_gate(layer, [&](const TwoQubitGateParams &p) {
            Su4Coefficients d{};
            gate_gradient<4>(su4_exponent(p.c), acc[g], kSu4Params, su4_gen, d.data());
            dst.push_back(d);
            g++;
        });
    };
    layer_grad(spec_.u1, acc_u1_, out.d_theta_u1);
    layer_grad(spec_.u2, acc_u2_, out.d_theta_u2);
    out.d_alpha.resize(spec_.ensemble.alphas.size());
    for (std::size_t k = 0; k < spec_.ensemble.alphas.size(); k++) {
        gate_gradient<2>(su2_exponent(spec_.ensemble.alphas[k]), acc_random_[k], kSu2Params, su2_gen,
                         out.d_alpha[k].data());
    }
    return out;
}

CircuitGradient grad_circuit(const CircuitSpec &spec, const Head &head, const StateVector &state, double dl_dp) {
    AdjointAccumulator acc(spec, head);
    acc.forward(state);
    acc.backward(dl_dp);
    return acc.finalize();
}

BatchGradient loss_and_gradient(const Model &model, std::span<const StateVector> states,
                                std::span<const double> targets, LossKind loss) {
    if (states.size() != targets.size() || states.empty()) {
        throw std::invalid_argument("loss_and_gradient: need equal, nonzero numbers of states and targets");
    }
    AdjointAccumulator acc(model.circuit, model.head);
    const double inv_n = 1.0 / static_cast<double>(states.size());
    const std::size_t members = acc.circuit().num_members();
    const auto w = acc.circuit().weights();

    BatchGradient out;
    out.grad = GradientBundle::zeros_like(model);
    out.predictions.resize(states.size());
    std::vector<double> d_weights(members, 0.0);
    std::vector<double> fgrad(model.head.num_params());
    for (std::size_t m = 0; m < states.size(); m++) {
        const Prediction p = acc.forward(states[m]);
        out.predictions[m] = p.value;
        out.loss += sample_loss(loss, p.value, targets[m]) * inv_n;
        const double g = sample_loss_derivative(loss, p.value, targets[m]) * inv_n;
        for (std::size_t i = 0; i < members; i++) {
            d_weights[i] += g * p.member_values[i];
            model.head.param_gradient(p.member_probs[i], fgrad);
            for (std::size_t b = 0; b < fgrad.size(); b++) {
                out.grad.d_beta[b] += g * w[i] * fgrad[b];
            }
        }
        acc.backward(g);
    }
    double mean = 0.0;
    for (std::size_t i = 0; i < members; i++) {
        mean += w[i] * d_weights[i];
    }
    for (std::size_t j = 0; j < members; j++) {
        out.grad.d_logits[j] = w[j] * (d_weights[j] - mean);
    }
    CircuitGradient cg = acc.finalize();
    out.grad.d_theta_u1 = std::move(cg.d_theta_u1);
    out.grad.d_theta_u2 = std::move(cg.d_theta_u2);
    out.grad.d_alpha = std::move(cg.d_alpha);
    return out;
}

double batch_loss(const Model &model, std::span<const StateVector> states, std::span<const double> targets,
                  LossKind loss) {
    if (states.size() != targets.size() || states.empty()) {
        throw std::invalid_argument("batch_loss: need equal, nonzero numbers of states and targets");
    }
    const CompiledCircuit circuit(model.circuit);
    double total = 0.0;
    for (std::size_t m = 0; m < states.size(); m++) {
        total += sample_loss(loss, predict(circuit, model.head, states[m]).value, targets[m]);
    }
    return total / static_cast<double>(states.size());
}

GradientBundle numeric_gradient(const Model &model, std::span<const StateVector> states,
                                std::span<const double> targets, LossKind loss, double eps) {
    if (!(eps > 0.0)) {
        throw std::invalid_argument("numeric_gradient: eps must be positive");
    }
    const auto base = flatten_params(model);
    std::vector<double> grad(base.size());
    Model probe = model;
    auto flat = base;
    for (std::size_t k = 0; k < base.size(); k++) {
        flat[k] = base[k] + eps;
        unflatten_params(probe, flat);
        const double up = batch_loss(probe, states, targets, loss);
        flat[k] = base[k] - eps;
        unflatten_params(probe, flat);
        const double down = batch_loss(probe, states, targets, loss);
        flat[k] = base[k];
        grad[k] = (up - down) / (2.0 * eps);
    }
    return GradientBundle::unflatten_like(model, grad);
}

double FdReport::max_rel_error() const {
    double m = 0.0;
    for (const auto &g : groups) {
        m = std::max(m, g.max_rel_error);
    }
    return m;
}

double FdReport::max_abs_error_small() const {
    double m = 0.0;
    for (const auto &g : groups) {
        m = std::max(m, g.max_abs_error_small);
    }
    return m;
}

bool FdReport::passes(double rel_tol, double abs_tol) const {
    return max_rel_error() < rel_tol && max_abs_error_small() < abs_tol;
}

std::string FdReport::summary() const {
    std::ostringstream os;
    for (const auto &g : groups) {
        os << param_group_name(g.group) << ": n=" << g.count << " max_rel=" << g.max_rel_error
           << " max_abs_small=" << g.max_abs_error_small << "\n";
    }
    return os.str();
}

FdReport compare_gradients(const Model &model, const GradientBundle &analytic, const GradientBundle &numeric,
                           double small) {
    const auto a = analytic.flatten();
    const auto n = numeric.flatten();
    const auto groups = param_groups(model);
    if (a.size() != groups.size() || n.size() != groups.size()) {
        throw std::invalid_argument("compare_gradients: gradient shapes do not match model");
    }
    FdReport report;
    report.small = small;
    for (int gi = 0; gi < kNumParamGroups; gi++) {
        report.groups.push_back({static_cast<ParamGroup>(gi)});
    }
    for (std::size_t k = 0; k < groups.size(); k++) {
        auto &g = report.groups[static_cast<int>(groups[k])];
        g.count++;
        const double err = std::abs(a[k] - n[k]);
        if (std::abs(n[k]) < small) {
            g.max_abs_error_small = std::max(g.max_abs_error_small, err);
        } else {
            g.max_rel_error = std::max(g.max_rel_error, err / std::abs(n[k]));
        }
    }
    std::erase_if(report.groups, [](const FdGroupReport &g) { return g.count == 0; });
    return report;
}

FdReport finite_diff_check(const Model &model, std::span<const StateVector> states,
                           std::span<const double> targets, LossKind loss, double eps) {
    const auto analytic = loss_and_gradient(model, states, targets, loss).grad;
    const auto numeric = numeric_gradient(model, states, targets, loss, eps);
    return compare_gradients(model, analytic, numeric);
}

}  // namespace rqnn
