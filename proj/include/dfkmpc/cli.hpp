/*
 Copyright 2026 The dfkmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef DFKMPC_CLI_HPP
#define DFKMPC_CLI_HPP

/**
 * @file
 * @brief Command-line front end.
 *
 *   dfkmpc_cli <collect|build-rep|edmd-fit|exp-a|exp-b|simulate>
 *              [--config PATH] [--seed N] [--out DIR] [--controller hdv|dfk|edmdk]
 *              [--input CSV]   (simulate only)
 *
 * Exit codes: 0 success, 1 bad arguments, 2 unreadable or invalid config,
 * 3 a controller aborted (the diagnostics path is printed), 4 other errors.
 */

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dfkmpc/experiments.hpp"

namespace dfkmpc {

namespace detail {

struct CliOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::string controller;
    std::string input;
};

inline void add_common(CLI::App *sub, CliOptions &o, bool with_controller) {
    sub->add_option("--config", o.config, "flat key = value config file");
    sub->add_option("--seed", o.seed, "master seed (overrides the config)");
    sub->add_option("--out", o.out, "output root directory")->capture_default_str();
    if (with_controller) {
        sub->add_option("--controller", o.controller, "restrict to one controller")
            ->check(CLI::IsMember({"hdv", "dfk", "edmdk"}));
    }
}

inline void print_reports(std::ostream &os, const std::vector<RunReport> &reports) {
    for (const auto &r : reports) {
        os << r.scenario << ' ' << r.controller << ": cost=" << format_double(r.realized_cost);
        if (r.wave_ratio) os << " wave_ratio=" << format_double(*r.wave_ratio);
        if (r.aborted) os << " ABORTED at step " << r.failure_step << " (" << r.failure << ")";
        os << "  -> " << r.directory.string() << '\n';
    }
}

inline nlohmann::ordered_json summary_json(const std::vector<RunReport> &reports) {
    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto &r : reports) {
        nlohmann::ordered_json j = report_json(r);
        j["directory"] = r.directory.filename().string();
        runs.push_back(j);
    }
    return runs;
}

/// 3 when any run aborted, else 0; prints the diagnostics path of failures.
inline int finish(const std::vector<RunReport> &reports, const std::filesystem::path &summary) {
    std::filesystem::create_directories(summary.parent_path());
    std::ofstream(summary) << summary_json(reports).dump(2) << '\n';
    print_reports(std::cout, reports);
    int code = 0;
    for (const auto &r : reports) {
        if (r.aborted) {
            std::cerr << "controller aborted; diagnostics: " << (r.directory / "diagnostics.csv").string() << '\n';
            code = 3;
        }
    }
    return code;
}

inline std::vector<ControllerKind> kinds_or(const std::string &one, std::vector<ControllerKind> all) {
    if (one.empty()) return all;
    return {parse_controller(one)};
}

} // namespace detail

inline int cli_main(int argc, const char *const *argv) {
    CLI::App app{"Dictionary-free Koopman MPC for a mixed-traffic platoon"};
    app.require_subcommand(1);
    detail::CliOptions o;
    auto *collect = app.add_subcommand("collect", "generate the offline excitation record");
    auto *build = app.add_subcommand("build-rep", "identify the dictionary-free representation");
    auto *edmd = app.add_subcommand("edmd-fit", "fit the EDMD baseline model");
    auto *exp_a = app.add_subcommand("exp-a", "wave-mitigation experiment");
    auto *exp_b = app.add_subcommand("exp-b", "velocity-tracking experiment");
    auto *sim = app.add_subcommand("simulate", "one closed-loop run, or replay of an input CSV");
    for (auto *s : {collect, build, edmd}) detail::add_common(s, o, false);
    for (auto *s : {exp_a, exp_b, sim}) detail::add_common(s, o, true);
    sim->add_option("--input", o.input, "trajectory CSV whose u1,v0 columns are replayed open loop");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    ExperimentConfig cfg;
    if (!o.config.empty()) {
        if (!std::filesystem::exists(o.config)) {
            std::cerr << "error: config file not found: " << o.config << '\n';
            return 2;
        }
        try {
            cfg = load_config(o.config);
        } catch (const std::exception &e) {
            std::cerr << "error: " << o.config << ": " << e.what() << '\n';
            return 2;
        }
    }
    const std::uint64_t seed = o.seed.value_or(cfg.seed);
    const std::filesystem::path out(o.out);
    const auto art = out / "artifacts";

    try {
        Models models;
        if (collect->parsed()) {
            const Trajectory data = collect_offline_data(cfg, seed);
            std::filesystem::create_directories(art);
            const auto path = art / ("offline_data_seed" + std::to_string(seed) + ".csv");
            save_trajectory_csv(path.string(), data);
            std::cout << "wrote " << path.string() << " (" << data.length() << " samples)\n";
            return 0;
        }
        if (build->parsed()) {
            const KoopmanRepresentation rep = build_representation(cfg, seed);
            std::filesystem::create_directories(art);
            const auto path = art / ("representation_seed" + std::to_string(seed) + ".bin");
            save_representation(path.string(), rep);
            nlohmann::ordered_json j;
            j["seed"] = seed;
            j["iterations_alg1"] = rep.convergence.iterations;
            j["converged"] = rep.convergence.converged;
            j["final_relative_change"] = rep.convergence.final_relative_change;
            j["columns"] = rep.columns();
            j["n_z"] = rep.n_z;
            std::ofstream(art / ("representation_seed" + std::to_string(seed) + ".json")) << j.dump(2) << '\n';
            std::cout << "wrote " << path.string() << " (iterations " << rep.convergence.iterations
                      << ", relative change " << format_double(rep.convergence.final_relative_change)
                      << (rep.convergence.converged ? ", converged" : ", NOT converged") << ")\n";
            return rep.convergence.converged ? 0 : 3;
        }
        if (edmd->parsed()) {
            const EdmdModel model = build_edmd_model(cfg, seed);
            std::filesystem::create_directories(art);
            const auto path = art / ("edmd_model_seed" + std::to_string(seed) + ".bin");
            save_edmd_model(path.string(), model);
            std::cout << "wrote " << path.string() << " (lifted dimension " << model.lifted_dim()
                      << (model.rank_deficient ? ", rank-deficient regressor" : "") << ")\n";
            return 0;
        }
        if (exp_a->parsed()) {
            const auto kinds = detail::kinds_or(o.controller, {ControllerKind::hdv, ControllerKind::dfk,
                                                               ControllerKind::edmdk});
            return detail::finish(run_experiment_a(cfg, seed, out, models, kinds), out / "runs" / "exp-a_summary.json");
        }
        if (exp_b->parsed()) {
            const auto kinds = detail::kinds_or(o.controller, {ControllerKind::dfk, ControllerKind::edmdk});
            return detail::finish(run_experiment_b(cfg, seed, out, models, kinds), out / "runs" / "exp-b_summary.json");
        }
        if (sim->parsed()) {
            if (!o.input.empty()) {
                const Trajectory in = load_trajectory_csv(o.input, cfg.dt);
                const Trajectory t = simulate(in.state(0), in.inputs, cfg.dt, cfg.ovm, CavLimits{cfg.mpc.a_min, cfg.mpc.a_max});
                const auto dir = out / "runs" / "simulate";
                std::filesystem::create_directories(dir);
                save_trajectory_csv((dir / "trajectory.csv").string(), t);
                std::cout << "wrote " << (dir / "trajectory.csv").string() << '\n';
                return 0;
            }
            Scenario sc = wave_scenario(cfg);
            sc.name = "simulate";
            const auto kinds = detail::kinds_or(o.controller.empty() ? "hdv" : o.controller, {});
            return detail::finish(run_scenario(sc, kinds, models, cfg, seed, out), out / "runs" / "simulate_summary.json");
        }
    } catch (const DivergenceError &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 1;
}

} // namespace dfkmpc

#endif // DFKMPC_CLI_HPP
