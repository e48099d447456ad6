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
#ifndef DFKMPC_TRAFFIC_SIM_HPP
#define DFKMPC_TRAFFIC_SIM_HPP

/**
 * @file
 * @brief Car-following platoon plant: one CAV behind an exogenous head
 * vehicle, followed by human-driven vehicles using the optimal velocity model.
 *
 * Vehicle numbering: the head vehicle is external (its velocity v0 is an
 * input), vehicle 1 is the CAV and vehicles 2..n are HDVs. In code the
 * vehicles are 0-based, so `spacing(0)` is s1 (the CAV's gap to the head).
 * The state is laid out as (s1, v1, s2, v2, ..., sn, vn).
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dfkmpc/errors.hpp"
#include "dfkmpc/numerics.hpp"

namespace dfkmpc {

struct OvmParams {
    double alpha = 0.6;  ///< sensitivity to desired-velocity error, 1/s
    double beta = 0.9;   ///< sensitivity to relative velocity, 1/s
    double s_st = 5.0;   ///< standstill spacing, m
    double s_go = 35.0;  ///< free-flow spacing, m
    double v_max = 30.0; ///< maximum desired velocity, m/s

    void validate() const {
        if (!(alpha > 0.0) || !(beta >= 0.0) || !(s_st > 0.0) || !(s_go > s_st) || !(v_max > 0.0)) {
            throw ParameterError("OvmParams: require alpha>0, beta>=0, 0<s_st<s_go, v_max>0");
        }
    }
};

/// Physical acceleration limits of the CAV actuator.
struct CavLimits {
    double a_min = -5.0;
    double a_max = 2.0;
};

struct ControlInput {
    double u1 = 0.0; ///< CAV commanded acceleration, m/s^2
    double v0 = 0.0; ///< head-vehicle velocity, m/s
};

class TrafficState {
public:
    TrafficState() = default;
    explicit TrafficState(Vector x) : x_(std::move(x)) {
        if (x_.size() == 0 || x_.size() % 2 != 0) {
            throw ParameterError("TrafficState: dimension must be 2n with n >= 1");
        }
    }

    /// Every vehicle at spacing s and velocity v.
    static TrafficState uniform(int n_vehicles, double s, double v) {
        Vector x(2 * n_vehicles);
        for (int i = 0; i < n_vehicles; ++i) {
            x(2 * i) = s;
            x(2 * i + 1) = v;
        }
        return TrafficState(std::move(x));
    }

    int n_vehicles() const { return static_cast<int>(x_.size() / 2); }
    double spacing(int i) const { return x_(2 * i); }
    double velocity(int i) const { return x_(2 * i + 1); }
    double &spacing(int i) { return x_(2 * i); }
    double &velocity(int i) { return x_(2 * i + 1); }
    const Vector &vector() const { return x_; }

private:
    Vector x_;
};

/// Paired input/output samples; column k of `inputs` is u(k) = (u1, v0), column
/// k of `outputs` is y(k) = x(k), the state before u(k) is applied.
struct Trajectory {
    double dt = 0.05;
    Matrix inputs;  ///< 2 x T
    Matrix outputs; ///< 2n x T

    Eigen::Index length() const { return inputs.cols(); }
    int n_vehicles() const { return static_cast<int>(outputs.rows() / 2); }
    ControlInput input(Eigen::Index k) const { return {inputs(0, k), inputs(1, k)}; }
    TrafficState state(Eigen::Index k) const { return TrafficState(outputs.col(k)); }
};

/// OVM desired velocity: 0 below s_st, v_max above s_go, cosine ramp between.
inline double desired_velocity(double s, const OvmParams &p) {
    if (s <= p.s_st) return 0.0;
    if (s >= p.s_go) return p.v_max;
    return 0.5 * p.v_max * (1.0 - std::cos(std::numbers::pi * (s - p.s_st) / (p.s_go - p.s_st)));
}

inline double hdv_acceleration(double s, double v, double v_prec, const OvmParams &p) {
    return p.alpha * (desired_velocity(s, p) - v) + p.beta * (v_prec - v);
}

/// Spacing at which the OVM equilibrium velocity equals v (inverse of the ramp).
inline double equilibrium_spacing(double v, const OvmParams &p) {
    if (v <= 0.0) return p.s_st;
    if (v >= p.v_max) return p.s_go;
    return p.s_st + (p.s_go - p.s_st) / std::numbers::pi * std::acos(1.0 - 2.0 * v / p.v_max);
}

/// One forward-Euler step of the platoon. The CAV acceleration is saturated to
/// `limits`; velocities are floored at zero.
inline TrafficState step(const TrafficState &x, const ControlInput &u, double dt, const OvmParams &p,
                         const CavLimits &limits = {}) {
    if (!(dt > 0.0)) throw ParameterError("step: dt must be positive");
    const int n = x.n_vehicles();
    TrafficState next = x;
    for (int i = 0; i < n; ++i) {
        const double v_prec = (i == 0) ? u.v0 : x.velocity(i - 1);
        const double v = x.velocity(i);
        const double a = (i == 0) ? std::clamp(u.u1, limits.a_min, limits.a_max)
                                  : hdv_acceleration(x.spacing(i), v, v_prec, p);
        next.spacing(i) = x.spacing(i) + dt * (v_prec - v);
        next.velocity(i) = std::max(0.0, v + dt * a);
    }
    if (!next.vector().allFinite()) throw DivergenceError("step: non-finite state", 0);
    return next;
}

/// Runs the plant over `inputs` (2 x T). outputs[k] is the state before inputs[k].
inline Trajectory simulate(const TrafficState &x0, const Matrix &inputs, double dt, const OvmParams &p,
                           const CavLimits &limits = {}) {
    if (inputs.rows() != 2 || inputs.cols() < 1) {
        throw ParameterError("simulate: inputs must be a non-empty 2 x T matrix");
    }
    p.validate();
    Trajectory traj;
    traj.dt = dt;
    traj.inputs = inputs;
    traj.outputs.resize(x0.vector().size(), inputs.cols());
    TrafficState x = x0;
    for (Eigen::Index k = 0; k < inputs.cols(); ++k) {
        traj.outputs.col(k) = x.vector();
        try {
            x = step(x, {inputs(0, k), inputs(1, k)}, dt, p, limits);
        } catch (const DivergenceError &) {
            throw DivergenceError("simulate: non-finite state", static_cast<std::size_t>(k));
        }
    }
    return traj;
}

/// Seeded excitation data. Initial v_i ~ U[10,20], s_i ~ U[15,25]; per step the
/// head velocity is v0 ~ U[10,20] and the CAV receives its OVM car-following
/// acceleration plus an excitation xi ~ U[-5,5]. The recorded u1 is the applied
/// (saturated) acceleration.
inline Trajectory generate_offline_data(std::uint64_t seed, Eigen::Index length, double dt, const OvmParams &p,
                                        int n_vehicles = 5, const CavLimits &limits = {}) {
    if (length < 1) throw ParameterError("generate_offline_data: length must be >= 1");
    p.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> vel(10.0, 20.0);
    std::uniform_real_distribution<double> gap(15.0, 25.0);
    std::uniform_real_distribution<double> excite(-5.0, 5.0);

    Vector x0(2 * n_vehicles);
    for (int i = 0; i < n_vehicles; ++i) {
        x0(2 * i + 1) = vel(rng);
        x0(2 * i) = gap(rng);
    }
    TrafficState x(std::move(x0));

    Trajectory traj;
    traj.dt = dt;
    traj.inputs.resize(2, length);
    traj.outputs.resize(2 * n_vehicles, length);
    for (Eigen::Index k = 0; k < length; ++k) {
        const double xi = excite(rng);
        const double v0 = vel(rng);
        const double follow = hdv_acceleration(x.spacing(0), x.velocity(0), v0, p);
        const double u1 = std::clamp(follow + xi, limits.a_min, limits.a_max);
        traj.inputs(0, k) = u1;
        traj.inputs(1, k) = v0;
        traj.outputs.col(k) = x.vector();
        x = step(x, {u1, v0}, dt, p, limits);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// CSV: header k,u1,v0,s1,v1,...,sn,vn; doubles printed with 17 significant digits.

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline void write_trajectory_csv(std::ostream &os, const Trajectory &traj) {
    const int n = traj.n_vehicles();
    os << "k,u1,v0";
    for (int i = 1; i <= n; ++i) os << ",s" << i << ",v" << i;
    os << '\n';
    for (Eigen::Index k = 0; k < traj.length(); ++k) {
        os << k << ',' << format_double(traj.inputs(0, k)) << ',' << format_double(traj.inputs(1, k));
        for (Eigen::Index r = 0; r < traj.outputs.rows(); ++r) os << ',' << format_double(traj.outputs(r, k));
        os << '\n';
    }
}

inline void save_trajectory_csv(const std::string &path, const Trajectory &traj) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_trajectory_csv(f, traj);
}

inline Trajectory read_trajectory_csv(std::istream &is, double dt) {
    std::string line;
    if (!std::getline(is, line)) throw ParameterError("trajectory csv: empty input");
    const auto columns = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
    if (columns < 5 || (columns - 3) % 2 != 0 || line.rfind("k,u1,v0", 0) != 0) {
        throw ParameterError("trajectory csv: unexpected header '" + line + "'");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (static_cast<Eigen::Index>(row.size()) != columns) {
            throw ParameterError("trajectory csv: row with " + std::to_string(row.size()) + " cells");
        }
        rows.push_back(std::move(row));
    }
    Trajectory traj;
    traj.dt = dt;
    const auto T = static_cast<Eigen::Index>(rows.size());
    traj.inputs.resize(2, T);
    traj.outputs.resize(columns - 3, T);
    for (Eigen::Index k = 0; k < T; ++k) {
        traj.inputs(0, k) = rows[k][1];
        traj.inputs(1, k) = rows[k][2];
        for (Eigen::Index r = 0; r < columns - 3; ++r) traj.outputs(r, k) = rows[k][3 + r];
    }
    return traj;
}

inline Trajectory load_trajectory_csv(const std::string &path, double dt) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_trajectory_csv(f, dt);
}

/// Positions of head + platoon (rows 0..n) with the head starting at 0,
/// wrapped modulo `circumference` when it is positive.
inline Matrix platoon_positions(const Trajectory &traj, double circumference) {
    const int n = traj.n_vehicles();
    Matrix pos(n + 1, traj.length());
    double head = 0.0;
    for (Eigen::Index k = 0; k < traj.length(); ++k) {
        pos(0, k) = head;
        for (int i = 0; i < n; ++i) pos(i + 1, k) = pos(i, k) - traj.outputs(2 * i, k);
        head += traj.dt * traj.inputs(1, k);
    }
    if (circumference > 0.0) {
        pos = pos.unaryExpr([circumference](double v) {
            const double w = std::fmod(v, circumference);
            return w < 0.0 ? w + circumference : w;
        });
    }
    return pos;
}

} // namespace dfkmpc

#endif // DFKMPC_TRAFFIC_SIM_HPP
