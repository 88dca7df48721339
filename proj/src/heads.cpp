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

#include "rqnn/heads.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace rqnn {

namespace {

double parity_sign(std::size_t s) {
    return (std::popcount(s) & 1) ? -1.0 : 1.0;
}

int multiplicity2(std::size_t i, std::size_t j) {
    return i == j ? 1 : 2;
}

int multiplicity3(std::size_t i, std::size_t j, std::size_t k) {
    if (i == j && j == k) {
        return 1;
    }
    if (i == j || j == k || i == k) {
        return 3;
    }
    return 6;
}

void sort3(std::size_t &i, std::size_t &j, std::size_t &k) {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
}

}  // namespace

Head::Head(HeadKind kind, int order, std::size_t dim, std::size_t num_params)
    : kind_(kind), order_(order), dim_(dim), params_(num_params, 0.0) {
}

Head Head::linear(double b0, double b1) {
    Head h(HeadKind::Linear, 1, 1, 2);
    h.params_ = {b0, b1};
    return h;
}

Head Head::poly_uni(int degree) {
    if (degree < 1) {
        throw std::invalid_argument("poly_uni: degree must be >= 1");
    }
    return Head(HeadKind::PolyUni, degree, 1, static_cast<std::size_t>(degree) + 1);
}

Head Head::poly_multi(int order, std::size_t dim) {
    if (order != 2 && order != 3) {
        throw std::invalid_argument("poly_multi: order must be 2 or 3");
    }
    if (dim < 1) {
        throw std::invalid_argument("poly_multi: input dimension must be >= 1");
    }
    std::size_t n = 1 + dim + dim * (dim + 1) / 2;
    if (order == 3) {
        n += dim * (dim + 1) * (dim + 2) / 6;
    }
    return Head(HeadKind::PolyMulti, order, dim, n);
}

std::size_t Head::b2_index(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (j >= dim_) {
        throw std::out_of_range("beta2 index out of range");
    }
    if (kind_ != HeadKind::PolyMulti) {
        throw std::logic_error("head has no second-order coefficients");
    }
    // Rows a < i contribute dim - a entries each.
    std::size_t idx = 0;
    for (std::size_t a = 0; a < i; a++) {
        idx += dim_ - a;
    }
    return b2_offset() + idx + (j - i);
}

std::size_t Head::b3_index(std::size_t i, std::size_t j, std::size_t k) const {
    if (order_ < 3) {
        throw std::logic_error("head has no third-order coefficients");
    }
    sort3(i, j, k);
    if (k >= dim_) {
        throw std::out_of_range("beta3 index out of range");
    }
    std::size_t idx = 0;
    for (std::size_t a = 0; a < i; a++) {
        const std::size_t m = dim_ - a;
        idx += m * (m + 1) / 2;
    }
    for (std::size_t b = i; b < j; b++) {
        idx += dim_ - b;
    }
    idx += k - j;
    return b3_offset() + idx;
}

double Head::beta1(std::size_t i) const {
    if (kind_ != HeadKind::PolyMulti || i >= dim_) {
        throw std::out_of_range("beta1 index out of range");
    }
    return params_[1 + i];
}

double Head::beta2(std::size_t i, std::size_t j) const {
    return params_[b2_index(i, j)];
}

double Head::beta3(std::size_t i, std::size_t j, std::size_t k) const {
    return params_[b3_index(i, j, k)];
}

void Head::set_beta1(std::size_t i, double v) {
    if (kind_ != HeadKind::PolyMulti || i >= dim_) {
        throw std::out_of_range("beta1 index out of range");
    }
    params_[1 + i] = v;
}

void Head::set_beta2(std::size_t i, std::size_t j, double v) {
    params_[b2_index(i, j)] = v;
}

void Head::set_beta3(std::size_t i, std::size_t j, std::size_t k, double v) {
    params_[b3_index(i, j, k)] = v;
}

double Head::scalar_feature(std::span<const double> probs) const {
    double z = 0.0;
    for (std::size_t s = 0; s < probs.size(); s++) {
        z += parity_sign(s) * probs[s];
    }
    return z;
}

double Head::eval_scalar(double x) const {
    switch (kind_) {
        case HeadKind::Linear:
            return params_[0] + params_[1] * x;
        case HeadKind::PolyUni: {
            double acc = 0.0;
            for (std::size_t k = params_.size(); k-- > 0;) {
                acc = acc * x + params_[k];
            }
            return acc;
        }
        case HeadKind::PolyMulti:
            break;
    }
    throw std::invalid_argument("eval_head: PolyMulti head needs a vector input");
}

double Head::eval_vector(std::span<const double> x) const {
    if (kind_ != HeadKind::PolyMulti) {
        throw std::invalid_argument("eval_head: scalar head given a vector input");
    }
    if (x.size() != dim_) {
        throw std::invalid_argument("eval_head: input length does not match head dimension");
    }
    double f = params_[0];
    for (std::size_t i = 0; i < dim_; i++) {
        f += params_[1 + i] * x[i];
    }
    std::size_t p = b2_offset();
    for (std::size_t i = 0; i < dim_; i++) {
        for (std::size_t j = i; j < dim_; j++) {
            f += multiplicity2(i, j) * params_[p++] * x[i] * x[j];
        }
    }
    if (order_ == 3) {
        for (std::size_t i = 0; i < dim_; i++) {
            for (std::size_t j = i; j < dim_; j++) {
                for (std::size_t k = j; k < dim_; k++) {
                    f += multiplicity3(i, j, k) * params_[p++] * x[i] * x[j] * x[k];
                }
            }
        }
    }
    return f;
}

double Head::eval_probs(std::span<const double> probs) const {
    return takes_scalar() ? eval_scalar(scalar_feature(probs)) : eval_vector(probs);
}

void Head::param_gradient(std::span<const double> probs, std::span<double> out) const {
    if (out.size() != params_.size()) {
        throw std::invalid_argument("param_gradient: output has wrong length");
    }
    if (takes_scalar()) {
        const double z = scalar_feature(probs);
        double zk = 1.0;
        for (auto &o : out) {
            o = zk;
            zk *= z;
        }
        return;
    }
    if (probs.size() != dim_) {
        throw std::invalid_argument("param_gradient: input length does not match head dimension");
    }
    out[0] = 1.0;
    for (std::size_t i = 0; i < dim_; i++) {
        out[1 + i] = probs[i];
    }
    std::size_t p = b2_offset();
    for (std::size_t i = 0; i < dim_; i++) {
        for (std::size_t j = i; j < dim_; j++) {
            out[p++] = multiplicity2(i, j) * probs[i] * probs[j];
        }
    }
    if (order_ == 3) {
        for (std::size_t i = 0; i < dim_; i++) {
            for (std::size_t j = i; j < dim_; j++) {
                for (std::size_t k = j; k < dim_; k++) {
                    out[p++] = multiplicity3(i, j, k) * probs[i] * probs[j] * probs[k];
                }
            }
        }
    }
}

void Head::input_gradient(std::span<const double> probs, std::span<double> out) const {
    if (out.size() != probs.size()) {
        throw std::invalid_argument("input_gradient: output has wrong length");
    }
    if (takes_scalar()) {
        const double z = scalar_feature(probs);
        double df = 0.0;
        if (kind_ == HeadKind::Linear) {
            df = params_[1];
        } else {
            double zk = 1.0;
            for (std::size_t k = 1; k < params_.size(); k++) {
                df += static_cast<double>(k) * params_[k] * zk;
                zk *= z;
            }
        }
        for (std::size_t s = 0; s < probs.size(); s++) {
            out[s] = df * parity_sign(s);
        }
        return;
    }
    if (probs.size() != dim_) {
        throw std::invalid_argument("input_gradient: input length does not match head dimension");
    }
    for (std::size_t s = 0; s < dim_; s++) {
        double g = params_[1 + s];
        for (std::size_t j = 0; j < dim_; j++) {
            g += 2.0 * beta2(s, j) * probs[j];
        }
        if (order_ == 3) {
            for (std::size_t j = 0; j < dim_; j++) {
                for (std::size_t k = 0; k < dim_; k++) {
                    g += 3.0 * beta3(s, j, k) * probs[j] * probs[k];
                }
            }
        }
        out[s] = g;
    }
}

double eval_head(const Head &head, double x) {
    return head.eval_scalar(x);
}

double eval_head(const Head &head, std::span<const double> x) {
    return head.eval_vector(x);
}

SimplexReducedHead reduce_on_simplex(const Head &head) {
    if (head.kind() != HeadKind::PolyMulti) {
        throw std::invalid_argument("reduce_on_simplex: requires a PolyMulti head");
    }
    const std::size_t d = head.input_dim();
    if (d < 2) {
        throw std::invalid_argument("reduce_on_simplex: input dimension must be >= 2");
    }
    const std::size_t f = d - 1;
    // x = A y + e_last with A = [I_f; -1...-1].
    const auto a = [f](std::size_t s, std::size_t t) -> double { return s < f ? (s == t ? 1.0 : 0.0) : -1.0; };
    const std::size_t last = d - 1;

    SimplexReducedHead out{f, std::vector<double>(f * f, 0.0), {}, 0.0, 0.0};
    for (std::size_t t = 0; t < f; t++) {
        for (std::size_t u = 0; u < f; u++) {
            double q = 0.0;
            for (std::size_t i = 0; i < d; i++) {
                for (std::size_t j = 0; j < d; j++) {
                    double coef = head.beta2(i, j);
                    if (head.order() == 3) {
                        coef += 3.0 * head.beta3(i, j, last);
                    }
                    q += a(i, t) * coef * a(j, u);
                }
            }
            out.quadratic[t * f + u] = q;
            out.quadratic_norm += q * q;
        }
    }
    out.quadratic_norm = std::sqrt(out.quadratic_norm);
    if (head.order() == 3) {
        out.cubic.assign(f * f * f, 0.0);
        for (std::size_t t = 0; t < f; t++) {
            for (std::size_t u = 0; u < f; u++) {
                for (std::size_t v = 0; v < f; v++) {
                    double c = 0.0;
                    for (std::size_t i = 0; i < d; i++) {
                        for (std::size_t j = 0; j < d; j++) {
                            for (std::size_t k = 0; k < d; k++) {
                                c += head.beta3(i, j, k) * a(i, t) * a(j, u) * a(k, v);
                            }
                        }
                    }
                    out.cubic[(t * f + u) * f + v] = c;
                    out.cubic_norm += c * c;
                }
            }
        }
        out.cubic_norm = std::sqrt(out.cubic_norm);
    }
    return out;
}

Prediction predict(const CompiledCircuit &circuit, const Head &head, const StateVector &state) {
    if (state.num_qubits() != circuit.n_sys()) {
        throw std::invalid_argument("predict: state qubit count does not match circuit");
    }
    if (!head.takes_scalar() && head.input_dim() != circuit.num_outcomes()) {
        throw std::invalid_argument("predict: head input dimension must equal 2^k");
    }
    Prediction pred;
    const std::size_t members = circuit.num_members();
    pred.weights.assign(circuit.weights().begin(), circuit.weights().end());
    pred.member_probs.resize(members);
    pred.member_values.resize(members);

    std::vector<cplx> base(state.amplitudes().begin(), state.amplitudes().end());
    circuit.apply_u1(base);
    std::vector<cplx> psi(base.size());
    for (std::size_t i = 0; i < members; i++) {
        std::copy(base.begin(), base.end(), psi.begin());
        circuit.apply_random(i, psi);
        circuit.apply_u2(psi);
        pred.member_probs[i].resize(circuit.num_outcomes());
        circuit.accumulate_probs(psi, pred.member_probs[i]);
        pred.member_values[i] = head.eval_probs(pred.member_probs[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < members; i++) {
        total += pred.weights[i] * pred.member_values[i];
    }
    pred.value = total;
    return pred;
}

Prediction predict(const CircuitSpec &spec, const Head &head, const StateVector &state) {
    return predict(CompiledCircuit(spec), head, state);
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double mse_loss(std::span<const double> preds, std::span<const double> targets) {
    if (preds.size() != targets.size()) {
        throw std::invalid_argument("mse_loss: length mismatch");
    }
    if (preds.empty()) {
        throw std::invalid_argument("mse_loss: empty input");
    }
    double s = 0.0;
    for (std::size_t m = 0; m < preds.size(); m++) {
        const double d = preds[m] - targets[m];
        s += d * d;
    }
    return s / static_cast<double>(preds.size());
}

namespace {

void require_binary(std::span<const double> labels) {
    for (double t : labels) {
        if (t != 0.0 && t != 1.0) {
            throw std::invalid_argument("labels must be 0 or 1");
        }
    }
}

constexpr double kProbClamp = 1e-12;

double clamped_log_loss(double g, double t) {
    g = std::clamp(g, kProbClamp, 1.0 - kProbClamp);
    return -t * std::log(g) - (1.0 - t) * std::log(1.0 - g);
}

}  // namespace

CrossEntropyResult cross_entropy_loss(std::span<const double> preds, std::span<const double> labels) {
    if (preds.size() != labels.size()) {
        throw std::invalid_argument("cross_entropy_loss: length mismatch");
    }
    if (preds.empty()) {
        throw std::invalid_argument("cross_entropy_loss: empty input");
    }
    require_binary(labels);
    CrossEntropyResult r{0.0, std::vector<double>(preds.size())};
    for (std::size_t m = 0; m < preds.size(); m++) {
        r.g[m] = sigmoid(preds[m]);
        r.loss += clamped_log_loss(r.g[m], labels[m]);
    }
    r.loss /= static_cast<double>(preds.size());
    return r;
}

double accuracy(std::span<const double> g, std::span<const double> labels) {
    if (g.size() != labels.size()) {
        throw std::invalid_argument("accuracy: length mismatch");
    }
    if (g.empty()) {
        throw std::invalid_argument("accuracy: empty input");
    }
    require_binary(labels);
    std::size_t correct = 0;
    for (std::size_t m = 0; m < g.size(); m++) {
        const double cls = g[m] >= 0.5 ? 1.0 : 0.0;
        correct += cls == labels[m];
    }
    return static_cast<double>(correct) / static_cast<double>(g.size());
}

double sample_loss(LossKind kind, double pred, double target) {
    if (kind == LossKind::Mse) {
        const double d = pred - target;
        return d * d;
    }
    return clamped_log_loss(sigmoid(pred), target);
}

double sample_loss_derivative(LossKind kind, double pred, double target) {
    if (kind == LossKind::Mse) {
        return 2.0 * (pred - target);
    }
    return sigmoid(pred) - target;
}

}  // namespace rqnn
