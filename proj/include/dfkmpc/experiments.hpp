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
#ifndef DFKMPC_EXPERIMENTS_HPP
#define DFKMPC_EXPERIMENTS_HPP

/**
 * @file
 * @brief Scenario harness: head-vehicle profiles, the wave metric, flat
 * key=value configuration, artifact caching and run directories.
 *
 * A run named <name> writes <out>/runs/<name>/{trajectory.csv,
 * diagnostics.csv, report.json}. Artifacts (offline data, representation,
 * EDMD model) live in <out>/artifacts and are keyed by seed.
 *
 * Seeds are derived from one master seed:
 *   offline data / representation   seed
 *   EDMD trajectory i               seed + 1000 + i
 *   EDMD centers                    seed + 999
 *   tracking profiles, dither       seed
 */

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dfkmpc/control.hpp"
#include "dfkmpc/errors.hpp"
#include "dfkmpc/koopman_id.hpp"
#include "dfkmpc/traffic_sim.hpp"

namespace dfkmpc {

// ---------------------------------------------------------------------------
// Profiles and metric

struct SineDisturbance {
    double base = 15.0;
    double amplitude = 5.0;
    Eigen::Index start_step = 200; ///< t = 10 s at dt = 0.05
    Eigen::Index half_period = 200;
};

/// base + amplitude sin(pi (k - start) / half_period) for k in [start,
/// start + half_period], base elsewhere.
inline double sine_disturbance_profile(Eigen::Index k, const SineDisturbance &d = {}) {
    const Eigen::Index j = k - d.start_step;
    if (j < 0 || j > d.half_period) return d.base;
    return d.base + d.amplitude * std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(d.half_period));
}

/// Four seeded head-velocity profiles, 40-60 s each: a sum of 2-4 sinusoids
/// plus two tanh steps, centred at 15 m/s and rescaled so that every sample
/// lies in [10.5, 19.5] and |dv/dt| <= 1.8 m/s^2.
inline std::vector<std::vector<double>> synthetic_tracking_profiles(std::uint64_t seed, double dt = 0.05) {
    std::mt19937_64 rng(seed);
    auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
    std::vector<std::vector<double>> out;
    for (int prof = 0; prof < 4; ++prof) {
        const double duration = uni(40.0, 60.0);
        const auto n = static_cast<std::size_t>(duration / dt);
        std::vector<double> v(n, 0.0);
        const int n_sines = 2 + static_cast<int>(std::uniform_int_distribution<int>(0, 2)(rng));
        for (int s = 0; s < n_sines; ++s) {
            const double amp = uni(0.5, 2.0), period = uni(8.0, 25.0), phase = uni(0.0, 2.0 * std::numbers::pi);
            for (std::size_t k = 0; k < n; ++k) {
                v[k] += amp * std::sin(2.0 * std::numbers::pi * (static_cast<double>(k) * dt) / period + phase);
            }
        }
        for (int s = 0; s < 2; ++s) {
            const double t0 = uni(5.0, duration - 5.0), height = uni(-2.5, 2.5), tau = uni(2.0, 4.0);
            for (std::size_t k = 0; k < n; ++k) {
                v[k] += height * 0.5 * (1.0 + std::tanh((static_cast<double>(k) * dt - t0) / tau));
            }
        }
        const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
        const double mid = 0.5 * (*lo_it + *hi_it);
        const double half_range = 0.5 * (*hi_it - *lo_it);
        double slope = 0.0;
        for (std::size_t k = 1; k < n; ++k) slope = std::max(slope, std::abs(v[k] - v[k - 1]) / dt);
        double scale = 1.0;
        if (half_range > 4.5) scale = std::min(scale, 4.5 / half_range);
        if (slope > 1.8) scale = std::min(scale, 1.8 / slope);
        for (double &x : v) x = 15.0 + scale * (x - mid);
        out.push_back(std::move(v));
    }
    return out;
}

/// Peak-to-peak of a velocity series over samples [first, last), divided by
/// the peak-to-peak of the head disturbance (5 m/s by default). The
/// disturbance itself scores 1 and a constant series scores 0.
inline double oscillation_ratio(const Vector &v, Eigen::Index first, Eigen::Index last, double reference = 5.0) {
    if (first < 0 || last > v.size() || first >= last) throw ParameterError("oscillation_ratio: bad window");
    const auto seg = v.segment(first, last - first);
    return (seg.maxCoeff() - seg.minCoeff()) / reference;
}

/// Wave ratio of the last vehicle in the platoon over [t_start, t_end) seconds.
inline double wave_damping_metric(const Trajectory &traj, double t_start, double t_end, double reference = 5.0) {
    const auto first = static_cast<Eigen::Index>(std::llround(t_start / traj.dt));
    const auto last = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::llround(t_end / traj.dt)), traj.length());
    const Vector tail = traj.outputs.row(traj.outputs.rows() - 1).transpose();
    return oscillation_ratio(tail, first, last, reference);
}

// ---------------------------------------------------------------------------
// Configuration

/**
 * Flat key = value file; '#' starts a comment. Keys:
 *   dt, n_vehicles
 *   ovm.alpha ovm.beta ovm.s_st ovm.s_go ovm.v_max
 *   data.length
 *   id.n_z id.t_ini id.n_future id.epsilon id.max_iters
 *   edmd.trajectories edmd.length edmd.centers
 *   mpc.q_v mpc.w_s mpc.r mpc.s_ref mpc.v_ref mpc.a_min mpc.a_max
 *   mpc.s_min mpc.s_max mpc.qp_tol mpc.qp_max_iters
 *   scenario.dither scenario.circumference
 *   scenario.a.steps scenario.a.start_step scenario.a.half_period
 *   scenario.a.amplitude scenario.a.window_start scenario.a.window_end
 *   scenario.b.q_v scenario.b.w_s
 *   seed
 * The mpc.* weights drive the wave experiment; the tracking experiment
 * replaces q_v and w_s with scenario.b.*.
 */
struct ExperimentConfig {
    double dt = 0.05;
    int n_vehicles = 5;
    std::uint64_t seed = 0;
    OvmParams ovm;
    Eigen::Index data_length = 1200;
    IdConfig id;
    Eigen::Index edmd_trajectories = 100;
    Eigen::Index edmd_length = 1200;
    Eigen::Index edmd_centers = 30;
    MpcConfig mpc = [] {
        MpcConfig m;
        m.w_s = 0.1;
        return m;
    }();
    double dither = 0.1;
    double circumference = 140.0;
    Eigen::Index a_steps = 800;
    SineDisturbance a_disturbance;
    double a_window_start = 10.0;
    double a_window_end = 40.0;
    double b_q_v = 1.0;
    double b_w_s = 0.0;

    void validate() const {
        if (!(dt > 0.0)) throw ParameterError("config: dt must be positive");
        if (n_vehicles < 1) throw ParameterError("config: n_vehicles must be >= 1");
        ovm.validate();
        id.validate();
        mpc.validate();
        if (data_length < 1 || edmd_trajectories < 1 || edmd_length < 2 || edmd_centers < 1) {
            throw ParameterError("config: data sizes must be positive");
        }
        if (a_steps < 1 || !(a_window_start < a_window_end)) throw ParameterError("config: bad scenario.a window");
    }
};

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string &key, const std::string &value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception &) {
        pos = 0;
    }
    if (pos != value.size() || pos == 0) throw ParameterError("config: '" + key + "' is not a number: " + value);
    return v;
}

inline Eigen::Index parse_count(const std::string &key, const std::string &value) {
    const double v = parse_number(key, value);
    if (v != std::floor(v) || v < 0) throw ParameterError("config: '" + key + "' must be a non-negative integer");
    return static_cast<Eigen::Index>(v);
}

} // namespace detail

inline ExperimentConfig parse_config(std::istream &is) {
    ExperimentConfig c;
    std::map<std::string, std::function<void(const std::string &, const std::string &)>> set;
    auto num = [&set](const std::string &k, double &target) {
        set[k] = [&target](const std::string &key, const std::string &v) { target = detail::parse_number(key, v); };
    };
    auto cnt = [&set](const std::string &k, Eigen::Index &target) {
        set[k] = [&target](const std::string &key, const std::string &v) { target = detail::parse_count(key, v); };
    };
    num("dt", c.dt);
    set["n_vehicles"] = [&c](const std::string &k, const std::string &v) {
        c.n_vehicles = static_cast<int>(detail::parse_count(k, v));
    };
    set["seed"] = [&c](const std::string &k, const std::string &v) {
        c.seed = static_cast<std::uint64_t>(detail::parse_count(k, v));
    };
    num("ovm.alpha", c.ovm.alpha);
    num("ovm.beta", c.ovm.beta);
    num("ovm.s_st", c.ovm.s_st);
    num("ovm.s_go", c.ovm.s_go);
    num("ovm.v_max", c.ovm.v_max);
    cnt("data.length", c.data_length);
    cnt("id.n_z", c.id.n_z);
    cnt("id.t_ini", c.id.t_ini);
    cnt("id.n_future", c.id.n_future);
    num("id.epsilon", c.id.epsilon);
    set["id.max_iters"] = [&c](const std::string &k, const std::string &v) {
        c.id.max_iters = static_cast<int>(detail::parse_count(k, v));
    };
    cnt("edmd.trajectories", c.edmd_trajectories);
    cnt("edmd.length", c.edmd_length);
    cnt("edmd.centers", c.edmd_centers);
    num("mpc.q_v", c.mpc.q_v);
    num("mpc.w_s", c.mpc.w_s);
    num("mpc.r", c.mpc.r);
    num("mpc.s_ref", c.mpc.s_ref);
    num("mpc.v_ref", c.mpc.v_ref);
    num("mpc.a_min", c.mpc.a_min);
    num("mpc.a_max", c.mpc.a_max);
    num("mpc.s_min", c.mpc.s_min);
    num("mpc.s_max", c.mpc.s_max);
    num("mpc.qp_tol", c.mpc.qp.tol);
    set["mpc.qp_max_iters"] = [&c](const std::string &k, const std::string &v) {
        c.mpc.qp.max_iters = static_cast<int>(detail::parse_count(k, v));
    };
    num("scenario.dither", c.dither);
    num("scenario.circumference", c.circumference);
    cnt("scenario.a.steps", c.a_steps);
    cnt("scenario.a.start_step", c.a_disturbance.start_step);
    cnt("scenario.a.half_period", c.a_disturbance.half_period);
    num("scenario.a.amplitude", c.a_disturbance.amplitude);
    num("scenario.a.window_start", c.a_window_start);
    num("scenario.a.window_end", c.a_window_end);
    num("scenario.b.q_v", c.b_q_v);
    num("scenario.b.w_s", c.b_w_s);

    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto it = set.find(key);
        if (it == set.end()) throw ParameterError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        it->second(key, value);
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    return parse_config(f);
}

// ---------------------------------------------------------------------------
// Artifacts

inline Trajectory collect_offline_data(const ExperimentConfig &cfg, std::uint64_t seed) {
    return generate_offline_data(seed, cfg.data_length, cfg.dt, cfg.ovm, cfg.n_vehicles,
                                 CavLimits{cfg.mpc.a_min, cfg.mpc.a_max});
}

inline KoopmanRepresentation build_representation(const ExperimentConfig &cfg, std::uint64_t seed) {
    const Trajectory data = collect_offline_data(cfg, seed);
    return iterate(data.inputs, data.outputs, cfg.id, seed);
}

inline EdmdModel build_edmd_model(const ExperimentConfig &cfg, std::uint64_t seed) {
    std::vector<Trajectory> trajs;
    trajs.reserve(static_cast<std::size_t>(cfg.edmd_trajectories));
    for (Eigen::Index i = 0; i < cfg.edmd_trajectories; ++i) {
        trajs.push_back(generate_offline_data(seed + 1000 + static_cast<std::uint64_t>(i), cfg.edmd_length, cfg.dt,
                                              cfg.ovm, cfg.n_vehicles, CavLimits{cfg.mpc.a_min, cfg.mpc.a_max}));
    }
    return edmd_fit(trajs, sample_tps_centers(seed + 999, cfg.edmd_centers, cfg.n_vehicles));
}

/// Loads <dir>/representation_seed<seed>.bin when it matches cfg, else builds and saves it.
inline KoopmanRepresentation cached_representation(const ExperimentConfig &cfg, std::uint64_t seed,
                                                   const std::filesystem::path &dir) {
    const auto path = dir / ("representation_seed" + std::to_string(seed) + ".bin");
    if (std::filesystem::exists(path)) {
        KoopmanRepresentation rep = load_representation(path.string());
        if (rep.n_z == cfg.id.n_z && rep.t_ini == cfg.id.t_ini && rep.n_future == cfg.id.n_future &&
            rep.data_seed == seed && rep.epsilon == cfg.id.epsilon &&
            rep.columns() == cfg.data_length - cfg.id.depth() + 1) {
            return rep;
        }
    }
    KoopmanRepresentation rep = build_representation(cfg, seed);
    std::filesystem::create_directories(dir);
    save_representation(path.string(), rep);
    return rep;
}

inline EdmdModel cached_edmd_model(const ExperimentConfig &cfg, std::uint64_t seed, const std::filesystem::path &dir) {
    const auto path = dir / ("edmd_model_seed" + std::to_string(seed) + ".bin");
    if (std::filesystem::exists(path)) {
        EdmdModel model = load_edmd_model(path.string());
        if (model.centers.cols() == cfg.edmd_centers && model.centers.rows() == 2 * cfg.n_vehicles &&
            model.centers == sample_tps_centers(seed + 999, cfg.edmd_centers, cfg.n_vehicles)) {
            return model;
        }
    }
    EdmdModel model = build_edmd_model(cfg, seed);
    std::filesystem::create_directories(dir);
    save_edmd_model(path.string(), model);
    return model;
}

// ---------------------------------------------------------------------------
// Runs

enum class ControllerKind { hdv, dfk, edmdk };

inline const char *to_string(ControllerKind k) {
    switch (k) {
    case ControllerKind::hdv: return "hdv";
    case ControllerKind::dfk: return "dfk";
    case ControllerKind::edmdk: return "edmdk";
    }
    return "unknown";
}

inline ControllerKind parse_controller(const std::string &s) {
    if (s == "hdv") return ControllerKind::hdv;
    if (s == "dfk") return ControllerKind::dfk;
    if (s == "edmdk") return ControllerKind::edmdk;
    throw ParameterError("unknown controller '" + s + "' (expected hdv, dfk or edmdk)");
}

struct Scenario {
    std::string name;
    std::function<double(Eigen::Index)> head_velocity;
    Eigen::Index steps = 0;
    double duration() const { return static_cast<double>(steps) * dt; }
    double dt = 0.05;
    double initial_velocity = 15.0;
    ReferenceMode reference = ReferenceMode::fixed;
    std::optional<std::pair<double, double>> wave_window; ///< seconds, for the wave metric
    MpcConfig mpc;
};

struct RunReport {
    std::string scenario;
    std::string controller;
    std::uint64_t seed = 0;
    double realized_cost = 0.0;
    std::optional<double> wave_ratio;
    int qp_failures = 0;
    std::optional<int> iterations_alg1;
    std::optional<bool> converged;
    bool aborted = false;
    Eigen::Index failure_step = -1;
    std::string failure;
    double mean_tracking_error = 0.0; ///< mean |v_CAV - v_ref|
    double max_abs_u1 = 0.0;
    double min_predicted_s1 = 0.0; ///< over all QP solutions (s1 rows j >= 1); nan without QP
    double max_predicted_s1 = 0.0;
    double q_v = 0.0, w_s = 0.0;
    std::filesystem::path directory;
    ClosedLoopResult result;
};

inline nlohmann::ordered_json report_json(const RunReport &r) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["controller"] = r.controller;
    j["seed"] = r.seed;
    j["realized_cost"] = r.realized_cost;
    j["wave_ratio"] = r.wave_ratio ? nlohmann::ordered_json(*r.wave_ratio) : nlohmann::ordered_json(nullptr);
    j["qp_failures"] = r.qp_failures;
    j["iterations_alg1"] =
        r.iterations_alg1 ? nlohmann::ordered_json(*r.iterations_alg1) : nlohmann::ordered_json(nullptr);
    j["converged"] = r.converged ? nlohmann::ordered_json(*r.converged) : nlohmann::ordered_json(nullptr);
    j["aborted"] = r.aborted;
    j["failure_step"] = r.aborted ? nlohmann::ordered_json(r.failure_step) : nlohmann::ordered_json(nullptr);
    j["steps"] = r.result.trajectory.length();
    j["mean_tracking_error"] = r.mean_tracking_error;
    j["q_v"] = r.q_v;
    j["w_s"] = r.w_s;
    return j;
}

/// Runs one scenario with one controller and, when `out_root` is non-empty,
/// writes runs/<scenario>_<controller>/.
inline RunReport execute_run(const Scenario &sc, Controller &controller, const ExperimentConfig &cfg,
                             std::uint64_t seed, const std::filesystem::path &out_root,
                             const KoopmanRepresentation *rep = nullptr) {
    const History hist = warm_start_history(sc.initial_velocity, cfg.n_vehicles, cfg.id.t_ini, seed, sc.dt, cfg.ovm,
                                            cfg.dither);
    LoopConfig loop;
    loop.steps = sc.steps;
    loop.t_ini = cfg.id.t_ini;
    loop.dt = sc.dt;
    loop.reference = sc.reference;
    loop.v_ref = sc.mpc.v_ref;

    RunReport r;
    r.scenario = sc.name;
    r.controller = controller.name();
    r.seed = seed;
    r.q_v = sc.mpc.q_v;
    r.w_s = sc.mpc.w_s;
    r.result = receding_horizon(controller, hist, sc.head_velocity, loop, cfg.ovm, CavLimits{sc.mpc.a_min, sc.mpc.a_max});
    const ClosedLoopResult &res = r.result;
    r.aborted = res.aborted;
    r.failure_step = res.failure_step;
    r.failure = res.failure;
    r.qp_failures = res.aborted ? 1 : 0;
    r.realized_cost = realized_cost(res.trajectory, sc.mpc, res.v_ref);
    if (rep) {
        r.iterations_alg1 = rep->convergence.iterations;
        r.converged = rep->convergence.converged;
    }
    const Trajectory &t = res.trajectory;
    if (sc.wave_window && !res.aborted) {
        r.wave_ratio = wave_damping_metric(t, sc.wave_window->first, sc.wave_window->second);
    }
    double err = 0.0;
    for (Eigen::Index k = 0; k < t.length(); ++k) err += std::abs(t.outputs(1, k) - res.v_ref[k]);
    r.mean_tracking_error = t.length() ? err / static_cast<double>(t.length()) : 0.0;
    r.max_abs_u1 = t.length() ? t.inputs.row(0).cwiseAbs().maxCoeff() : 0.0;
    r.min_predicted_s1 = std::numeric_limits<double>::quiet_NaN();
    r.max_predicted_s1 = std::numeric_limits<double>::quiet_NaN();
    for (const auto &d : res.diagnostics) {
        if (std::isnan(d.predicted_s1_min)) continue;
        if (std::isnan(r.min_predicted_s1) || d.predicted_s1_min < r.min_predicted_s1) r.min_predicted_s1 = d.predicted_s1_min;
        if (std::isnan(r.max_predicted_s1) || d.predicted_s1_max > r.max_predicted_s1) r.max_predicted_s1 = d.predicted_s1_max;
    }

    if (!out_root.empty()) {
        r.directory = out_root / "runs" / (sc.name + "_" + r.controller);
        std::filesystem::create_directories(r.directory);
        save_trajectory_csv((r.directory / "trajectory.csv").string(), t);
        {
            std::ofstream f(r.directory / "diagnostics.csv");
            write_diagnostics_csv(f, res.diagnostics);
        }
        {
            const Matrix pos = platoon_positions(t, cfg.circumference);
            std::ofstream f(r.directory / "positions.csv");
            f << "k,t,x0";
            for (int i = 1; i <= t.n_vehicles(); ++i) f << ",x" << i;
            f << '\n';
            for (Eigen::Index k = 0; k < pos.cols(); ++k) {
                f << k << ',' << format_double(static_cast<double>(k) * t.dt);
                for (Eigen::Index i = 0; i < pos.rows(); ++i) f << ',' << format_double(pos(i, k));
                f << '\n';
            }
        }
        std::ofstream f(r.directory / "report.json");
        f << report_json(r).dump(2) << '\n';
    }
    return r;
}

/// Sine-wave scenario on the platoon at 15 m/s, fixed reference.
inline Scenario wave_scenario(const ExperimentConfig &cfg) {
    Scenario sc;
    sc.name = "exp-a";
    sc.dt = cfg.dt;
    sc.steps = cfg.a_steps;
    const SineDisturbance d = cfg.a_disturbance;
    sc.head_velocity = [d](Eigen::Index k) { return sine_disturbance_profile(k, d); };
    sc.initial_velocity = d.base;
    sc.reference = ReferenceMode::fixed;
    sc.wave_window = std::make_pair(cfg.a_window_start, cfg.a_window_end);
    sc.mpc = cfg.mpc;
    sc.mpc.v_ref = d.base;
    return sc;
}

inline Scenario tracking_scenario(const ExperimentConfig &cfg, const std::vector<double> &profile, int index) {
    Scenario sc;
    sc.name = "exp-b-p" + std::to_string(index);
    sc.dt = cfg.dt;
    sc.steps = static_cast<Eigen::Index>(profile.size());
    sc.head_velocity = [profile](Eigen::Index k) {
        return profile[static_cast<std::size_t>(std::min<Eigen::Index>(k, static_cast<Eigen::Index>(profile.size()) - 1))];
    };
    sc.initial_velocity = profile.front();
    sc.reference = ReferenceMode::head_mean;
    sc.mpc = cfg.mpc;
    sc.mpc.q_v = cfg.b_q_v;
    sc.mpc.w_s = cfg.b_w_s;
    return sc;
}

/// Built models shared by the runs of one experiment; missing entries are
/// built on demand (and cached under <out>/artifacts when out is set).
struct Models {
    std::optional<KoopmanRepresentation> rep;
    std::optional<EdmdModel> edmd;
};

inline void ensure_models(Models &m, const std::vector<ControllerKind> &kinds, const ExperimentConfig &cfg,
                          std::uint64_t seed, const std::filesystem::path &out_root) {
    const auto art = out_root.empty() ? std::filesystem::path() : out_root / "artifacts";
    for (ControllerKind k : kinds) {
        if (k == ControllerKind::dfk && !m.rep) {
            m.rep = art.empty() ? build_representation(cfg, seed) : cached_representation(cfg, seed, art);
        }
        if (k == ControllerKind::edmdk && !m.edmd) {
            m.edmd = art.empty() ? build_edmd_model(cfg, seed) : cached_edmd_model(cfg, seed, art);
        }
    }
}

inline std::unique_ptr<Controller> make_controller(ControllerKind k, const Models &m, const MpcConfig &mpc,
                                                   const ExperimentConfig &cfg) {
    switch (k) {
    case ControllerKind::hdv: return std::make_unique<HdvController>(cfg.ovm);
    case ControllerKind::dfk: return std::make_unique<DfkController>(*m.rep, mpc);
    case ControllerKind::edmdk: return std::make_unique<EdmdController>(*m.edmd, mpc, cfg.id.n_future);
    }
    throw ParameterError("make_controller: unknown kind");
}

inline std::vector<RunReport> run_scenario(const Scenario &sc, const std::vector<ControllerKind> &kinds, Models &models,
                                           const ExperimentConfig &cfg, std::uint64_t seed,
                                           const std::filesystem::path &out_root) {
    ensure_models(models, kinds, cfg, seed, out_root);
    std::vector<RunReport> reports;
    for (ControllerKind k : kinds) {
        auto ctrl = make_controller(k, models, sc.mpc, cfg);
        reports.push_back(execute_run(sc, *ctrl, cfg, seed, out_root,
                                      k == ControllerKind::dfk ? &*models.rep : nullptr));
    }
    return reports;
}

inline std::vector<RunReport> run_experiment_a(const ExperimentConfig &cfg, std::uint64_t seed,
                                               const std::filesystem::path &out_root, Models &models,
                                               std::vector<ControllerKind> kinds = {ControllerKind::hdv,
                                                                                    ControllerKind::dfk,
                                                                                    ControllerKind::edmdk}) {
    return run_scenario(wave_scenario(cfg), kinds, models, cfg, seed, out_root);
}

inline std::vector<RunReport> run_experiment_b(const ExperimentConfig &cfg, std::uint64_t seed,
                                               const std::filesystem::path &out_root, Models &models,
                                               std::vector<ControllerKind> kinds = {ControllerKind::dfk,
                                                                                    ControllerKind::edmdk}) {
    std::vector<RunReport> all;
    const auto profiles = synthetic_tracking_profiles(seed, cfg.dt);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        auto reps = run_scenario(tracking_scenario(cfg, profiles[i], static_cast<int>(i)), kinds, models, cfg, seed,
                                 out_root);
        all.insert(all.end(), std::make_move_iterator(reps.begin()), std::make_move_iterator(reps.end()));
    }
    return all;
}

} // namespace dfkmpc

#endif // DFKMPC_EXPERIMENTS_HPP
