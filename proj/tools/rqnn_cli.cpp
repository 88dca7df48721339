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

// rqnn command-line front end.

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rqnn/config.hpp"
#include "rqnn/container.hpp"
#include "rqnn/experiment.hpp"
#include "rqnn/image_io.hpp"
#include "rqnn/operator_analysis.hpp"

namespace {

using namespace rqnn;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<int> repeats;
    std::optional<int> workers;
};

void add_common(CLI::App *cmd, Common &c, bool with_out) {
    cmd->add_option("--config", c.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Base training seed (overrides trainer.seed)");
    if (with_out) {
        cmd->add_option("--out", c.out, "Output directory (default: output.dir, then $RQNN_OUT_DIR)");
        cmd->add_option("--repeats", c.repeats, "Number of seeds")->check(CLI::PositiveNumber);
        cmd->add_option("--workers", c.workers, "Parallel worker slots")->check(CLI::PositiveNumber);
    }
}

ExperimentConfig load(const Common &c) {
    ExperimentConfig cfg = parse_config(c.config);
    if (c.seed) {
        cfg.train.seed = *c.seed;
    }
    if (c.repeats) {
        cfg.repeats = *c.repeats;
    }
    if (c.workers) {
        cfg.workers = *c.workers;
    }
    if (!c.out.empty()) {
        cfg.out_dir = c.out;
    } else if (cfg.out_dir.empty()) {
        const char *env = std::getenv("RQNN_OUT_DIR");
        cfg.out_dir = env != nullptr && *env != '\0' ? env : "rqnn_out";
    }
    finalize_config(cfg);
    return cfg;
}

std::vector<double> parse_doubles(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (item.find_first_not_of(" \t", used) != std::string::npos) {
            throw std::invalid_argument("not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

void print_stat(const char *name, const Stat &s) {
    std::cout << name << ": " << std::setprecision(6) << s.mean << " +- " << s.stddev << '\n';
}

int cmd_train(const Common &c) {
    const ExperimentConfig cfg = load(c);
    const TaskResult r = run_task(cfg, &std::cout);
    print_stat("final train loss", r.final_train_loss);
    print_stat("log10 final train loss", r.log10_train_loss);
    print_stat("final validation loss", r.final_validation_loss);
    if (r.validation_accuracy) {
        print_stat("validation accuracy", *r.validation_accuracy);
    }
    std::cout << "summary: " << r.artifacts.summary.string() << '\n';
    if (!r.all_completed) {
        std::cerr << "error: at least one seed diverged\n";
        return 3;
    }
    return 0;
}

int cmd_eval(const Common &c, const std::string &checkpoint) {
    const ExperimentConfig cfg = load(c);
    const Checkpoint ck = read_checkpoint(checkpoint);
    const Dataset data = build_dataset(cfg, repeat_data_seed(cfg, 0));
    const auto report = [&](const char *name, const Dataset::Split &s) {
        if (s.states.empty()) {
            return;
        }
        const EvalResult e = evaluate(ck.model, s.states, s.targets, cfg.train.loss);
        std::cout << name << " loss: " << std::setprecision(17) << e.loss;
        if (e.accuracy) {
            std::cout << ", accuracy: " << std::setprecision(6) << *e.accuracy;
        }
        std::cout << '\n';
    };
    std::cout << "checkpoint epoch " << ck.epoch << ", data seed " << data.seed << '\n';
    report("train", data.train_split());
    report("validation", data.validation_split());
    return 0;
}

int cmd_gen_data(const Common &c, const std::string &output, const std::string &images_dir) {
    const ExperimentConfig cfg = load(c);
    const std::uint64_t data_seed = repeat_data_seed(cfg, 0);
    if (!images_dir.empty()) {
        if (cfg.train.task != TaskKind::Image) {
            throw std::invalid_argument("--images is only meaningful for the image task");
        }
        Rng rng(data_seed);
        write_image_directory(images_dir, make_synthetic_images(cfg.train.n_train + cfg.train.n_validation, rng,
                                                                cfg.synthetic_margin));
        std::cout << "wrote synthetic images to " << images_dir << '\n';
    }
    if (!output.empty()) {
        const Dataset d = build_dataset(cfg, data_seed);
        write_dataset(output, d);
        std::cout << "wrote " << d.size() << " samples (" << d.train.size() << " train, " << d.validation.size()
                  << " validation) to " << output << '\n';
    }
    return 0;
}

std::vector<int> parse_ints(const std::string &text) {
    std::vector<int> out;
    for (double v : parse_doubles(text)) {
        out.push_back(static_cast<int>(v));
    }
    return out;
}

int cmd_sweep(const Common &c, const std::string &n_sys, const std::string &n_r) {
    const ExperimentConfig cfg = load(c);
    const auto cells = run_sweep(cfg, n_sys.empty() ? std::vector<int>{} : parse_ints(n_sys), parse_ints(n_r),
                                 &std::cout);
    std::cout << format_sweep_table(cells);
    bool ok = true;
    for (const auto &cell : cells) {
        ok = ok && cell.all_completed;
    }
    return ok ? 0 : 3;
}

int cmd_majorize(const std::string &eigs) {
    const auto lambda = parse_doubles(eigs);
    const LinearHeadBound b = construct_beta(lambda);
    std::cout << std::setprecision(12) << "beta0 = " << b.beta0 << "\nbeta1 = " << b.beta1 << '\n';
    const auto spectrum = linear_head_spectrum(b, lambda.size());
    const auto check = majorizes(lambda, spectrum);
    std::cout << "head spectrum majorizes target: " << (check.holds ? "yes" : "no") << '\n';
    return check.holds ? 0 : 1;
}

int cmd_blackbox(const std::string &checkpoint, const std::string &config_path, double threshold) {
    const Checkpoint ck = read_checkpoint(checkpoint);
    const BlackBoxAnalysis a = analyze_black_box(ck.model.circuit, ck.model.head);
    const int n = ck.model.circuit.n_sys;
    std::cout << std::fixed << std::setprecision(6);
    std::cout << "weights:";
    for (double w : a.weights) {
        std::cout << ' ' << w;
    }
    std::cout << "\npredicted operator diagonal:";
    for (std::size_t i = 0; i < a.predicted.rows(); i++) {
        std::cout << ' ' << a.predicted(i, i).real();
    }
    std::cout << '\n';
    if (!config_path.empty()) {
        const ExperimentConfig cfg = parse_config(config_path);
        if (cfg.train.task == TaskKind::Observable) {
            Rng rng(repeat_data_seed(cfg, 0));
            const auto target = ObservableTarget::random(cfg.train.n_sys, rng, cfg.eig_lo, cfg.eig_hi);
            double worst = 0.0;
            std::cout << "target diagonal:";
            for (std::size_t i = 0; i < target.eigenvalues.size(); i++) {
                std::cout << ' ' << target.eigenvalues[i];
                worst = std::max(worst, std::abs(target.eigenvalues[i] - a.predicted(i, i).real()));
            }
            std::cout << "\nmax diagonal deviation: " << std::scientific << worst << std::fixed << '\n';
        }
    }
    const auto print_coeffs = [&](const char *title, const PauliCoefficients &pc) {
        std::cout << title << '\n';
        for (std::size_t s = 0; s < pc.coeffs.size(); s++) {
            if (std::abs(pc.coeffs[s]) > threshold) {
                std::cout << "  " << PauliCoefficients::label(n, s) << "  " << std::setw(10) << pc.coeffs[s].real()
                          << '\n';
            }
        }
    };
    print_coeffs("predicted operator Pauli coefficients:", a.predicted_coefficients);
    for (std::size_t i = 0; i < a.members.size(); i++) {
        print_coeffs(("member " + std::to_string(i) + " Pauli coefficients:").c_str(), a.members[i]);
    }
    if (!a.angles.empty()) {
        std::cout << "xi angles (rad):\n  member";
        for (const char *name : BlochAngles::kNames) {
            std::cout << std::setw(11) << name;
        }
        std::cout << '\n';
        for (std::size_t i = 0; i < a.angles.size(); i++) {
            std::cout << "  " << std::setw(6) << i;
            for (std::size_t k = 0; k < 4; k++) {
                if (a.angles[i].defined[k]) {
                    std::cout << std::setw(11) << a.angles[i].xi[k];
                } else {
                    std::cout << std::setw(11) << "-";
                }
            }
            std::cout << '\n';
        }
        std::cout << "cyclic gaps between members (2pi/" << a.angles.size()
                  << " = " << 2.0 * std::numbers::pi / static_cast<double>(a.angles.size()) << "):\n";
        for (std::size_t k = 0; k < 4; k++) {
            std::vector<double> xs;
            for (const auto &ang : a.angles) {
                if (ang.defined[k]) {
                    xs.push_back(ang.xi[k]);
                }
            }
            std::cout << "  " << std::setw(6) << BlochAngles::kNames[k];
            for (double g : cyclic_gaps(xs)) {
                std::cout << ' ' << g;
            }
            std::cout << '\n';
        }
    }
    return 0;
}

int cmd_check_grads(const Common &c, int samples, int configs) {
    const ExperimentConfig cfg = load(c);
    const Dataset data = build_dataset(cfg, repeat_data_seed(cfg, 0));
    const auto tr = data.train_split();
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(samples), tr.states.size());
    const std::span<const StateVector> states(tr.states.data(), n);
    const std::span<const double> targets(tr.targets.data(), n);
    bool ok = true;
    for (int k = 0; k < configs; k++) {
        Rng rng(cfg.train.seed + static_cast<std::uint64_t>(k));
        const Model m = random_model(cfg.train, rng);
        const FdReport rep = finite_diff_check(m, states, targets, cfg.train.loss);
        std::cout << "model " << k << ": " << rep.summary() << (rep.passes() ? "  PASS" : "  FAIL") << '\n';
        ok = ok && rep.passes();
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Randomized quantum neural network simulator and trainer"};
    app.require_subcommand(1);

    Common train_opts, eval_opts, gen_opts, sweep_opts, grad_opts;
    std::string checkpoint, output, images_dir, n_sys_list, n_r_list = "1,2,3,4", eigs, bb_checkpoint,
                                                                                   bb_config;
    int samples = 8, grad_configs = 3;
    double bb_threshold = 1e-6;

    auto *train_cmd = app.add_subcommand("train", "Train every seed of a config and write loss curves and reports");
    add_common(train_cmd, train_opts, true);

    auto *eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the config's dataset");
    add_common(eval_cmd, eval_opts, false);
    eval_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);

    auto *gen_cmd = app.add_subcommand("gen-data", "Write the config's dataset as a container file");
    add_common(gen_cmd, gen_opts, false);
    gen_cmd->add_option("--output", output, "Dataset container to write");
    gen_cmd->add_option("--images", images_dir, "Also write synthetic images as PGM class directories");

    auto *sweep_cmd = app.add_subcommand("sweep", "Grid over n_sys and n_r; prints mean log10 train loss");
    add_common(sweep_cmd, sweep_opts, true);
    sweep_cmd->add_option("--n-sys", n_sys_list, "Comma-separated n_sys values (observable task)");
    sweep_cmd->add_option("--n-r", n_r_list, "Comma-separated n_r values")->capture_default_str();

    auto *analyze_cmd = app.add_subcommand("analyze", "Operator analyses");
    analyze_cmd->require_subcommand(1);
    auto *maj_cmd = analyze_cmd->add_subcommand("majorize", "Smallest linear head reaching a diagonal observable");
    maj_cmd->add_option("--eigs", eigs, "Comma-separated target eigenvalues")->required();
    auto *bb_cmd = analyze_cmd->add_subcommand("blackbox", "Pauli decomposition of a trained linear-head model");
    bb_cmd->add_option("--checkpoint", bb_checkpoint, "Checkpoint file")->required()->check(CLI::ExistingFile);
    bb_cmd->add_option("--config", bb_config, "Config that produced it, to compare against the target");
    bb_cmd->add_option("--threshold", bb_threshold, "Hide coefficients below this magnitude")->capture_default_str();

    auto *grad_cmd = app.add_subcommand("check-grads", "Compare analytic gradients with central differences");
    add_common(grad_cmd, grad_opts, false);
    grad_cmd->add_option("--samples", samples, "Samples per check")->capture_default_str();
    grad_cmd->add_option("--models", grad_configs, "Random models to check")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            return cmd_train(train_opts);
        }
        if (*eval_cmd) {
            return cmd_eval(eval_opts, checkpoint);
        }
        if (*gen_cmd) {
            if (output.empty() && images_dir.empty()) {
                throw std::invalid_argument("gen-data needs --output and/or --images");
            }
            return cmd_gen_data(gen_opts, output, images_dir);
        }
        if (*sweep_cmd) {
            return cmd_sweep(sweep_opts, n_sys_list, n_r_list);
        }
        if (*maj_cmd) {
            return cmd_majorize(eigs);
        }
        if (*bb_cmd) {
            return cmd_blackbox(bb_checkpoint, bb_config, bb_threshold);
        }
        if (*grad_cmd) {
            return cmd_check_grads(grad_opts, samples, grad_configs);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
