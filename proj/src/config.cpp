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

#include "rqnn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace rqnn {

namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line;

    std::string name() const { return section + "." + key; }
};

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void error_at(int line, const std::string &what) {
    throw ConfigError("line " + std::to_string(line) + ": " + what);
}

std::vector<Entry> lex(std::string_view text) {
    std::vector<Entry> entries;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        line_no++;
        const auto comment = raw.find_first_of("#;");
        std::string_view line = trim(raw.substr(0, comment));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                error_at(line_no, "unterminated section header");
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "task" && section != "circuit" && section != "trainer" && section != "output") {
                error_at(line_no, "unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            error_at(line_no, "expected 'key = value'");
        }
        if (section.empty()) {
            error_at(line_no, "key outside of any section");
        }
        Entry e{section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), line_no};
        if (e.key.empty()) {
            error_at(line_no, "empty key");
        }
        for (const auto &prev : entries) {
            if (prev.name() == e.name()) {
                error_at(line_no, "duplicate key " + e.name() + " (first set on line " + std::to_string(prev.line) +
                                      ")");
            }
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

long long parse_int(const Entry &e, long long min_value) {
    long long v = 0;
    const auto *end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        error_at(e.line, e.name() + " expects an integer, got '" + e.value + "'");
    }
    if (v < min_value) {
        error_at(e.line, e.name() + " must be >= " + std::to_string(min_value) + ", got " + e.value);
    }
    return v;
}

std::uint64_t parse_u64(const Entry &e) {
    std::uint64_t v = 0;
    const auto *end = e.value.data() + e.value.size();
    const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        error_at(e.line, e.name() + " expects an unsigned integer, got '" + e.value + "'");
    }
    return v;
}

double parse_double(const Entry &e) {
    try {
        std::size_t used = 0;
        const double v = std::stod(e.value, &used);
        if (used == e.value.size() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::exception &) {
    }
    error_at(e.line, e.name() + " expects a number, got '" + e.value + "'");
}

double parse_nonneg(const Entry &e) {
    const double v = parse_double(e);
    if (v < 0.0) {
        error_at(e.line, e.name() + " must be >= 0");
    }
    return v;
}

bool parse_bool(const Entry &e) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") {
        return true;
    }
    if (e.value == "false" || e.value == "0" || e.value == "no") {
        return false;
    }
    error_at(e.line, e.name() + " expects true or false, got '" + e.value + "'");
}

std::vector<int> parse_int_list(const Entry &e) {
    std::vector<int> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Entry sub = e;
        sub.value = std::string(trim(item));
        out.push_back(static_cast<int>(parse_int(sub, 0)));
    }
    if (out.empty()) {
        error_at(e.line, e.name() + " expects a comma-separated list of qubit indices");
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig &, const Entry &)>;

const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = {
        // task.kind, n_sys, n_sub and order shape the defaults and are read first.
        {"task.kind", [](ExperimentConfig &, const Entry &) {}},
        {"task.n_sys", [](ExperimentConfig &c, const Entry &e) { c.train.n_sys = parse_int(e, 1); }},
        {"task.n_sub", [](ExperimentConfig &, const Entry &) {}},
        {"task.order", [](ExperimentConfig &, const Entry &) {}},
        {"task.n_train", [](ExperimentConfig &c, const Entry &e) { c.train.n_train = parse_int(e, 1); }},
        {"task.n_validation", [](ExperimentConfig &c, const Entry &e) { c.train.n_validation = parse_int(e, 0); }},
        {"task.eig_lo", [](ExperimentConfig &c, const Entry &e) { c.eig_lo = parse_double(e); }},
        {"task.eig_hi", [](ExperimentConfig &c, const Entry &e) { c.eig_hi = parse_double(e); }},
        {"task.data_seed", [](ExperimentConfig &c, const Entry &e) { c.data_seed = parse_u64(e); }},
        {"task.vary_data", [](ExperimentConfig &c, const Entry &e) { c.vary_data = parse_bool(e); }},
        {"task.image_dir", [](ExperimentConfig &c, const Entry &e) { c.image_dir = e.value; }},
        {"task.dataset", [](ExperimentConfig &c, const Entry &e) { c.dataset_path = e.value; }},
        {"task.synthetic_margin", [](ExperimentConfig &c, const Entry &e) { c.synthetic_margin = parse_nonneg(e); }},

        {"circuit.n_r", [](ExperimentConfig &c, const Entry &e) { c.train.n_r = parse_int(e, 1); }},
        {"circuit.l1", [](ExperimentConfig &c, const Entry &e) { c.train.l1 = parse_int(e, 0); }},
        {"circuit.l2", [](ExperimentConfig &c, const Entry &e) { c.train.l2 = parse_int(e, 0); }},
        {"circuit.measured", [](ExperimentConfig &c, const Entry &e) { c.train.measured = parse_int_list(e); }},
        {"circuit.head",
         [](ExperimentConfig &c, const Entry &e) {
             if (e.value == "linear") {
                 c.train.head = {HeadKind::Linear, 1};
             } else if (e.value == "poly_uni") {
                 c.train.head.kind = HeadKind::PolyUni;
             } else if (e.value == "poly_multi") {
                 c.train.head.kind = HeadKind::PolyMulti;
             } else {
                 error_at(e.line, "circuit.head must be linear, poly_uni or poly_multi");
             }
         }},
        {"circuit.head_order", [](ExperimentConfig &c, const Entry &e) { c.train.head.order = parse_int(e, 1); }},
        {"circuit.fixed_cost", [](ExperimentConfig &c, const Entry &e) { c.fixed_cost = parse_int(e, 0); }},
        {"circuit.train_unitaries",
         [](ExperimentConfig &c, const Entry &e) { c.train.train_unitaries = parse_bool(e); }},

        {"trainer.epochs", [](ExperimentConfig &c, const Entry &e) { c.train.epochs = parse_int(e, 0); }},
        {"trainer.batch_size", [](ExperimentConfig &c, const Entry &e) { c.train.batch_size = parse_int(e, 1); }},
        {"trainer.learning_rate",
         [](ExperimentConfig &c, const Entry &e) { c.train.learning_rate = parse_nonneg(e); }},
        {"trainer.seed", [](ExperimentConfig &c, const Entry &e) { c.train.seed = parse_u64(e); }},
        {"trainer.init_scale", [](ExperimentConfig &c, const Entry &e) { c.train.init_scale = parse_nonneg(e); }},
        {"trainer.head_init_scale",
         [](ExperimentConfig &c, const Entry &e) { c.train.head_init_scale = parse_nonneg(e); }},
        {"trainer.adam_beta1", [](ExperimentConfig &c, const Entry &e) { c.train.adam.beta1 = parse_nonneg(e); }},
        {"trainer.adam_beta2", [](ExperimentConfig &c, const Entry &e) { c.train.adam.beta2 = parse_nonneg(e); }},
        {"trainer.adam_epsilon",
         [](ExperimentConfig &c, const Entry &e) { c.train.adam.epsilon = parse_nonneg(e); }},
        {"trainer.stop_loss", [](ExperimentConfig &c, const Entry &e) { c.train.stop_loss = parse_nonneg(e); }},
        {"trainer.report_threshold",
         [](ExperimentConfig &c, const Entry &e) { c.train.report_threshold = parse_nonneg(e); }},
        {"trainer.loss",
         [](ExperimentConfig &c, const Entry &e) {
             if (e.value == "mse") {
                 c.train.loss = LossKind::Mse;
             } else if (e.value == "cross_entropy") {
                 c.train.loss = LossKind::CrossEntropy;
             } else {
                 error_at(e.line, "trainer.loss must be mse or cross_entropy");
             }
         }},

        {"output.dir", [](ExperimentConfig &c, const Entry &e) { c.out_dir = e.value; }},
        {"output.repeats", [](ExperimentConfig &c, const Entry &e) { c.repeats = parse_int(e, 1); }},
        {"output.workers", [](ExperimentConfig &c, const Entry &e) { c.workers = parse_int(e, 1); }},
        {"output.checkpoint", [](ExperimentConfig &c, const Entry &e) { c.write_checkpoint = parse_bool(e); }},
    };
    return table;
}

const Entry *find(const std::vector<Entry> &entries, std::string_view name) {
    for (const auto &e : entries) {
        if (e.name() == name) {
            return &e;
        }
    }
    return nullptr;
}

}  // namespace

void finalize_config(ExperimentConfig &c) {
    if (c.fixed_cost > 0) {
        if (c.fixed_cost % c.train.n_r != 0) {
            throw ConfigError("circuit.fixed_cost (" + std::to_string(c.fixed_cost) + ") is not a multiple of n_r (" +
                              std::to_string(c.train.n_r) + ")");
        }
        c.train.l2 = c.fixed_cost / c.train.n_r;
    }
    if (c.train.task == TaskKind::Image && c.train.n_sys != kImageQubits) {
        throw ConfigError("task.n_sys must be 5 for the image task");
    }
    if (c.train.task == TaskKind::Renyi && (c.renyi_order != 2 && c.renyi_order != 3)) {
        throw ConfigError("task.order must be 2 or 3");
    }
    if (c.train.task == TaskKind::Renyi && (c.n_sub < 1 || c.n_sub > c.train.n_sys)) {
        throw ConfigError("task.n_sub must be in 1..n_sys");
    }
    if (c.train.task == TaskKind::Observable && !(c.eig_lo <= c.eig_hi)) {
        throw ConfigError("task.eig_lo must not exceed task.eig_hi");
    }
    if (c.repeats < 1 || c.workers < 1) {
        throw ConfigError("output.repeats and output.workers must be >= 1");
    }
    try {
        c.train.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }
}

ExperimentConfig parse_config_text(std::string_view text) {
    const auto entries = lex(text);
    for (const auto &e : entries) {
        if (!setters().contains(e.name())) {
            error_at(e.line, "unknown key " + e.name());
        }
    }
    const Entry *kind = find(entries, "task.kind");
    if (kind == nullptr) {
        throw ConfigError("missing required key: task.kind");
    }
    const auto task = parse_task_kind(kind->value);
    if (!task) {
        error_at(kind->line, "task.kind must be observable, renyi or image, got '" + kind->value + "'");
    }

    ExperimentConfig c;
    const Entry *n_sys = find(entries, "task.n_sys");
    try {
        switch (*task) {
            case TaskKind::Observable:
                c.train = TrainConfig::observable_defaults(n_sys ? static_cast<int>(parse_int(*n_sys, 1)) : 2);
                c.vary_data = true;
                break;
            case TaskKind::Renyi: {
                const Entry *sub = find(entries, "task.n_sub");
                const Entry *order = find(entries, "task.order");
                c.n_sub = sub ? static_cast<int>(parse_int(*sub, 1)) : 1;
                c.renyi_order = order ? static_cast<int>(parse_int(*order, 2)) : 2;
                c.train = TrainConfig::renyi_defaults(c.n_sub, c.renyi_order);
                if (n_sys) {
                    c.train.n_sys = static_cast<int>(parse_int(*n_sys, 1));
                    c.train.measured = central_qubits(c.train.n_sys, c.n_sub);
                }
                c.vary_data = false;
                break;
            }
            case TaskKind::Image:
                c.train = TrainConfig::image_defaults();
                c.vary_data = false;
                break;
        }
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("invalid task parameters: ") + e.what());
    }
    for (const auto &e : entries) {
        setters().at(e.name())(c, e);
    }
    finalize_config(c);
    return c;
}

ExperimentConfig parse_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_text(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::map<std::string, std::string> ExperimentConfig::echo() const {
    const auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    std::string measured_list;
    for (std::size_t i = 0; i < train.measured.size(); i++) {
        measured_list += (i ? "," : "") + std::to_string(train.measured[i]);
    }
    const char *head = train.head.kind == HeadKind::Linear    ? "linear"
                       : train.head.kind == HeadKind::PolyUni ? "poly_uni"
                                                              : "poly_multi";
    std::map<std::string, std::string> m = {
        {"task.kind", task_kind_name(train.task)},
        {"task.n_sys", std::to_string(train.n_sys)},
        {"task.n_train", std::to_string(train.n_train)},
        {"task.n_validation", std::to_string(train.n_validation)},
        {"task.data_seed", std::to_string(data_seed)},
        {"task.vary_data", vary_data ? "true" : "false"},
        {"circuit.n_r", std::to_string(train.n_r)},
        {"circuit.l1", std::to_string(train.l1)},
        {"circuit.l2", std::to_string(train.l2)},
        {"circuit.measured", measured_list},
        {"circuit.head", head},
        {"circuit.head_order", std::to_string(train.head.order)},
        {"circuit.fixed_cost", std::to_string(fixed_cost)},
        {"circuit.train_unitaries", train.train_unitaries ? "true" : "false"},
        {"trainer.epochs", std::to_string(train.epochs)},
        {"trainer.batch_size", std::to_string(train.batch_size)},
        {"trainer.learning_rate", num(train.learning_rate)},
        {"trainer.seed", std::to_string(train.seed)},
        {"trainer.init_scale", num(train.init_scale)},
        {"trainer.head_init_scale", num(train.head_init_scale)},
        {"trainer.adam_beta1", num(train.adam.beta1)},
        {"trainer.adam_beta2", num(train.adam.beta2)},
        {"trainer.adam_epsilon", num(train.adam.epsilon)},
        {"trainer.stop_loss", num(train.stop_loss)},
        {"trainer.report_threshold", num(train.report_threshold)},
        {"trainer.loss", train.loss == LossKind::Mse ? "mse" : "cross_entropy"},
        {"output.repeats", std::to_string(repeats)},
        {"output.workers", std::to_string(workers)},
        {"output.checkpoint", write_checkpoint ? "true" : "false"},
    };
    switch (train.task) {
        case TaskKind::Observable:
            m["task.eig_lo"] = num(eig_lo);
            m["task.eig_hi"] = num(eig_hi);
            break;
        case TaskKind::Renyi:
            m["task.n_sub"] = std::to_string(n_sub);
            m["task.order"] = std::to_string(renyi_order);
            break;
        case TaskKind::Image:
            m["task.image_dir"] = image_dir;
            m["task.synthetic_margin"] = num(synthetic_margin);
            break;
    }
    if (!dataset_path.empty()) {
        m["task.dataset"] = dataset_path;
    }
    if (!out_dir.empty()) {
        m["output.dir"] = out_dir;
    }
    return m;
}

}  // namespace rqnn
