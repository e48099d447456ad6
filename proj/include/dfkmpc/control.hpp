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
#ifndef DFKMPC_CONTROL_HPP
#define DFKMPC_CONTROL_HPP

/**
 * @file
 * @brief Predictive controllers for the CAV and the closed-loop driver.
 *
 * Dictionary-free controller. Decision variable g (one weight per library
 * column). Predictions are u_f = U_F g and y_f = Y_F* g. Cost:
 *
 *   (y_f - y_r)' Q (y_f - y_r) + r * sum_j u1_j^2
 *
 * Q puts w_s on every spacing and q_v on every velocity. Equality groups, in
 * row order:
 *   1. initial condition: col(U_P, Y_P*) g = Pi_ini col(u_ini, y_ini), imposed
 *      on the leading m*t_ini + n_z singular directions of col(U_P, Y_P*)
 *   2. head-velocity forecast: the v0 rows of U_F g equal the last measured v0
 * A Koopman model of dimension n_z has an (m*t_ini + n_z)-dimensional set of
 * initial windows. The singular values of col(U_P, Y_P*) beyond that count
 * decay smoothly to rounding level and hold weak couplings to U_F; enforcing
 * them pins the future inputs. Group 1 uses the orthonormal rows V_r' with
 * right-hand side S_r^-1 U_r' Pi_ini w, which is the same constraint as
 * U_r' col(U_P, Y_P*) g = U_r' Pi_ini w but better conditioned.
 * Group 2 is needed because v0 is an uncontrolled input. Without it the
 * optimizer would pick the head vehicle's future speed.
 * Inequalities: a_min <= u1_j <= a_max for every step, and s_min <= s1_j <=
 * s_max for j >= 1. Block j = 0 is the current output, which is fixed by the
 * initial window.
 *
 * The EDMD controller uses the same cost and constraints on a condensed
 * lifted linear predictor with u1 as the decision variable.
 */

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "dfkmpc/errors.hpp"
#include "dfkmpc/koopman_id.hpp"
#include "dfkmpc/numerics.hpp"
#include "dfkmpc/qp.hpp"
#include "dfkmpc/traffic_sim.hpp"

namespace dfkmpc {

struct MpcConfig {
    double q_v = 1.0;   ///< velocity-error weight
    double w_s = 0.5;   ///< spacing-error weight
    double r = 0.1;     ///< CAV acceleration weight
    double s_ref = 20.0;
    double v_ref = 15.0; ///< velocity reference; loops may override it per step
    double a_min = -5.0;
    double a_max = 2.0;
    double s_min = 5.0;
    double s_max = 40.0;
    QpSettings qp;

    void validate() const {
        if (!(q_v >= 0.0) || !(w_s >= 0.0) || !(r > 0.0)) {
            throw ParameterError("MpcConfig: need q_v >= 0, w_s >= 0, r > 0");
        }
        if (!(a_min < a_max) || !(s_min < s_max)) throw ParameterError("MpcConfig: empty bound interval");
        if (!(qp.tol > 0.0) || qp.max_iters < 1) throw ParameterError("MpcConfig: bad QP settings");
    }
};

/// A QP over the library weights plus the bookkeeping to read predictions back.
struct MpcProblem {
    QpProblem qp;
    Matrix u_map; ///< U_F: g -> stacked future inputs
    Matrix y_map; ///< Y_F*: g -> stacked future outputs
    Eigen::Index n_future = 0;
    Eigen::Index input_dim = 0;
    Eigen::Index output_dim = 0;
    Eigen::Index init_rows = 0; ///< equality group 1 (initial condition)
    Eigen::Index hold_rows = 0; ///< equality group 2 (head-velocity forecast)
};

struct QpSolution {
    Vector g;       ///< decision vector (library weights, or u1 for the condensed form)
    Matrix u_star;  ///< m x N planned inputs
    Matrix y_star;  ///< p x N predicted outputs
    double objective = 0.0;
    double kkt_residual = 0.0;
    QpStatus status = QpStatus::max_iter;
    int iterations = 0;
};

inline Vector project_initial(const KoopmanRepresentation &rep, const Vector &w_ini) {
    if (w_ini.size() != rep.init_projector.cols()) {
        throw ParameterError("project_initial: window has " + std::to_string(w_ini.size()) + " entries, expected " +
                             std::to_string(rep.init_projector.cols()));
    }
    return rep.init_projector * w_ini;
}

/// Per-output weights and references, stacked over the horizon, for the
/// (s_1, v_1, ..., s_n, v_n) output layout.
inline Vector output_weights(const MpcConfig &cfg, Eigen::Index p, Eigen::Index n_future) {
    Vector q(p * n_future);
    for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = (i % p) % 2 == 0 ? cfg.w_s : cfg.q_v;
    return q;
}

inline Vector output_reference(const MpcConfig &cfg, Eigen::Index p, Eigen::Index n_future) {
    Vector y(p * n_future);
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = (i % p) % 2 == 0 ? cfg.s_ref : cfg.v_ref;
    return y;
}

namespace detail {

/// Rows of a stacked (block x N) vector holding channel `ch` of blocks first..N-1.
inline Matrix select_rows(const Matrix &stacked, Eigen::Index block, Eigen::Index ch, Eigen::Index first,
                          Eigen::Index n_future) {
    Matrix out(n_future - first, stacked.cols());
    for (Eigen::Index j = first; j < n_future; ++j) out.row(j - first) = stacked.row(j * block + ch);
    return out;
}

inline Matrix reshape_blocks(const Vector &v, Eigen::Index block) {
    return Eigen::Map<const Matrix>(v.data(), block, v.size() / block);
}

/// Bounds of the stacked inequality rows [u1 rows; s1 rows for j >= 1].
inline void fill_bounds(const MpcConfig &cfg, Eigen::Index n_future, const Vector &s_offset, Vector &lo, Vector &hi) {
    lo.resize(2 * n_future - 1);
    hi.resize(2 * n_future - 1);
    lo.head(n_future).setConstant(cfg.a_min);
    hi.head(n_future).setConstant(cfg.a_max);
    lo.tail(n_future - 1) = Vector::Constant(n_future - 1, cfg.s_min) - s_offset;
    hi.tail(n_future - 1) = Vector::Constant(n_future - 1, cfg.s_max) - s_offset;
}

inline QpSolution to_solution(const QpResult &r, const Matrix &u_map, const Matrix &y_map, Eigen::Index m,
                              Eigen::Index p, const Vector &u_offset = Vector(), const Vector &y_offset = Vector()) {
    QpSolution s;
    s.g = r.x;
    Vector u = u_map * r.x;
    Vector y = y_map * r.x;
    if (u_offset.size()) u += u_offset;
    if (y_offset.size()) y += y_offset;
    s.u_star = reshape_blocks(u, m);
    s.y_star = reshape_blocks(y, p);
    s.objective = r.objective;
    s.kkt_residual = r.kkt_residual;
    s.status = r.status;
    s.iterations = r.iterations;
    return s;
}

/// Group-1 equality rows and the map from the window to their right-hand side.
struct InitialCondition {
    Matrix rows; ///< r x columns, orthonormal
    Matrix map;  ///< r x (m+p) t_ini: S_r^-1 U_r' Pi_ini
};

inline InitialCondition initial_condition(const KoopmanRepresentation &rep) {
    const numerics::SvdResult s = numerics::svd(rep.past_stack());
    const Eigen::Index r = std::min(rep.input_dim * rep.t_ini + rep.n_z,
                                    numerics::rank_from_singular_values(s.singular_values));
    InitialCondition ic;
    ic.rows = s.right_vectors.leftCols(r).transpose();
    ic.map = s.singular_values.head(r).cwiseInverse().asDiagonal() * s.left_vectors.leftCols(r).transpose() *
             rep.init_projector;
    return ic;
}

/// Data-dependent parts of the dictionary-free QP.
struct DfkData {
    Vector linear;
    double constant = 0.0;
    Vector eq_rhs;
    Vector lower, upper;
};

inline DfkData dfk_data(const KoopmanRepresentation &rep, const InitialCondition &ic, const MpcConfig &cfg,
                        const Vector &w_ini) {
    const Eigen::Index m = rep.input_dim, p = rep.output_dim, N = rep.n_future;
    if (m != 2) throw ParameterError("dictionary-free MPC expects inputs (u1, v0)");
    DfkData d;
    const Vector q = output_weights(cfg, p, N);
    const Vector y_r = output_reference(cfg, p, N);
    d.linear = -2.0 * (rep.y_future_star.transpose() * q.cwiseProduct(y_r));
    d.constant = y_r.dot(q.cwiseProduct(y_r));
    if (w_ini.size() != ic.map.cols()) throw ParameterError("dfk_data: window size mismatch");
    const Vector w = ic.map * w_ini;
    const double v0_hold = w_ini(m * rep.t_ini - 1);
    d.eq_rhs.resize(w.size() + N);
    d.eq_rhs << w, Vector::Constant(N, v0_hold);
    fill_bounds(cfg, N, Vector::Zero(N - 1), d.lower, d.upper);
    return d;
}

} // namespace detail

/// Full QP for one window w_ini = col(u_ini, y_ini).
inline MpcProblem assemble_qp(const KoopmanRepresentation &rep, const MpcConfig &cfg, const Vector &w_ini) {
    cfg.validate();
    const Eigen::Index m = rep.input_dim, p = rep.output_dim, N = rep.n_future;
    const detail::InitialCondition ic = detail::initial_condition(rep);
    const detail::DfkData d = detail::dfk_data(rep, ic, cfg, w_ini);

    MpcProblem prob;
    prob.n_future = N;
    prob.input_dim = m;
    prob.output_dim = p;
    prob.u_map = rep.u_future;
    prob.y_map = rep.y_future_star;
    prob.init_rows = ic.rows.rows();
    prob.hold_rows = N;

    const Vector q = output_weights(cfg, p, N);
    const Matrix u1 = detail::select_rows(rep.u_future, m, 0, 0, N);
    prob.qp.hessian = rep.y_future_star.transpose() * q.asDiagonal() * rep.y_future_star + cfg.r * (u1.transpose() * u1);
    prob.qp.linear = d.linear;
    prob.qp.constant = d.constant;
    prob.qp.eq_matrix = detail::vstack(ic.rows, detail::select_rows(rep.u_future, m, 1, 0, N));
    prob.qp.eq_rhs = d.eq_rhs;
    prob.qp.ineq_matrix = detail::vstack(u1, detail::select_rows(rep.y_future_star, p, 0, 1, N));
    prob.qp.ineq_lower = d.lower;
    prob.qp.ineq_upper = d.upper;
    return prob;
}

inline QpSolution solve_qp(const MpcProblem &problem, double tol = 1e-6, int max_iters = 100) {
    const QpResult r = solve_qp(problem.qp, QpSettings{tol, max_iters});
    return detail::to_solution(r, problem.u_map, problem.y_map, problem.input_dim, problem.output_dim);
}

// ---------------------------------------------------------------------------
// Controllers

/// What a controller sees at step k.
struct ControlContext {
    Matrix u_window; ///< m x T_ini past inputs
    Matrix y_window; ///< p x T_ini past outputs
    Vector x_now;    ///< current platoon state
    double v0_now = 0.0;  ///< head velocity applied at this step (HDV reaction only)
    double v0_hold = 0.0; ///< last measured head velocity, held over the horizon
    double v_ref = 15.0;
};

struct ControlDecision {
    double u1 = 0.0;
    bool uses_qp = false;
    QpSolution solution;
};

class Controller {
public:
    virtual ~Controller() = default;
    virtual std::string name() const = 0;
    virtual ControlDecision decide(const ControlContext &ctx) = 0;
};

/// The CAV drives like a human: OVM reaction to the head vehicle.
class HdvController final : public Controller {
public:
    explicit HdvController(OvmParams p = {}) : p_(p) {}
    std::string name() const override { return "hdv"; }
    ControlDecision decide(const ControlContext &ctx) override {
        ControlDecision d;
        d.u1 = hdv_acceleration(ctx.x_now(0), ctx.x_now(1), ctx.v0_now, p_);
        return d;
    }

private:
    OvmParams p_;
};

class DfkController final : public Controller {
public:
    DfkController(KoopmanRepresentation rep, MpcConfig cfg) : rep_(std::move(rep)), cfg_(cfg) {
        cfg_.validate();
        const Vector w0 = Vector::Zero(rep_.init_projector.cols());
        const MpcProblem prob = assemble_qp(rep_, cfg_, w0);
        ic_ = detail::initial_condition(rep_);
        solver_ = std::make_unique<QpSolver>(prob.qp.hessian, prob.qp.eq_matrix, prob.qp.ineq_matrix);
    }

    std::string name() const override { return "dfk"; }
    const KoopmanRepresentation &representation() const { return rep_; }

    QpSolution solve(const Vector &w_ini, double v_ref) {
        MpcConfig cfg = cfg_;
        cfg.v_ref = v_ref;
        const detail::DfkData d = detail::dfk_data(rep_, ic_, cfg, w_ini);
        const QpResult r = solver_->solve(d.linear, d.eq_rhs, d.lower, d.upper, d.constant, cfg_.qp);
        return detail::to_solution(r, rep_.u_future, rep_.y_future_star, rep_.input_dim, rep_.output_dim);
    }

    ControlDecision decide(const ControlContext &ctx) override {
        if (ctx.u_window.cols() != rep_.t_ini || ctx.y_window.cols() != rep_.t_ini) {
            throw ParameterError("DfkController: window length differs from t_ini");
        }
        Vector w(ctx.u_window.size() + ctx.y_window.size());
        w << Eigen::Map<const Vector>(ctx.u_window.data(), ctx.u_window.size()),
            Eigen::Map<const Vector>(ctx.y_window.data(), ctx.y_window.size());
        ControlDecision d;
        d.uses_qp = true;
        d.solution = solve(w, ctx.v_ref);
        d.u1 = d.solution.u_star.size() ? d.solution.u_star(0, 0) : 0.0;
        return d;
    }

private:
    KoopmanRepresentation rep_;
    MpcConfig cfg_;
    detail::InitialCondition ic_;
    std::unique_ptr<QpSolver> solver_;
};

/// Condensed MPC on the lifted model: y = f(z0, v0) + G u1.
class EdmdController final : public Controller {
public:
    EdmdController(EdmdModel model, MpcConfig cfg, Eigen::Index n_future = 50)
        : model_(std::move(model)), cfg_(cfg), n_(n_future) {
        cfg_.validate();
        if (n_ < 2) throw ParameterError("EdmdController: horizon must be >= 2");
        if (model_.b.cols() != 2) throw ParameterError("EdmdController: model inputs must be (u1, v0)");
        const Eigen::Index nz = model_.lifted_dim();
        p_ = model_.c.rows();
        free_ = Matrix::Zero(p_ * n_, nz);
        hold_ = Vector::Zero(p_ * n_);
        forced_ = Matrix::Zero(p_ * n_, n_);
        // Markov parameters C A^i b.
        Matrix ca = model_.c; // C A^j
        std::vector<Matrix> markov_u1, markov_v0;
        for (Eigen::Index j = 0; j < n_; ++j) {
            free_.middleRows(j * p_, p_) = ca;
            markov_u1.push_back(ca * model_.b.col(0));
            markov_v0.push_back(ca * model_.b.col(1));
            ca = (ca * model_.a).eval();
        }
        for (Eigen::Index j = 0; j < n_; ++j) {
            forced_.block(j * p_, j, p_, 1) = model_.d.col(0);
            Vector hv = model_.d.col(1);
            for (Eigen::Index i = 0; i < j; ++i) {
                forced_.block(j * p_, i, p_, 1) = markov_u1[j - 1 - i];
                hv += markov_v0[j - 1 - i];
            }
            hold_.segment(j * p_, p_) = hv;
        }
        q_ = output_weights(cfg_, p_, n_);
        hessian_ = forced_.transpose() * q_.asDiagonal() * forced_ + cfg_.r * Matrix::Identity(n_, n_);
        s_rows_ = detail::select_rows(forced_, p_, 0, 1, n_);
        ineq_ = detail::vstack(Matrix::Identity(n_, n_), s_rows_);
        solver_ = std::make_unique<QpSolver>(hessian_, Matrix(0, n_), ineq_);
    }

    std::string name() const override { return "edmdk"; }

    QpSolution solve(const Vector &x_now, double v0_hold, double v_ref) {
        MpcConfig cfg = cfg_;
        cfg.v_ref = v_ref;
        const Vector y_r = output_reference(cfg, p_, n_);
        const Vector f = free_ * model_.lift(x_now) + v0_hold * hold_;
        const Vector e = f - y_r;
        const Vector linear = 2.0 * (forced_.transpose() * q_.cwiseProduct(e));
        const double constant = e.dot(q_.cwiseProduct(e));
        const Vector s_off = detail::select_rows(f, p_, 0, 1, n_);
        Vector lo, hi;
        detail::fill_bounds(cfg_, n_, s_off, lo, hi);
        const QpResult r = solver_->solve(linear, Vector(0), lo, hi, constant, cfg_.qp);

        Matrix u_map = Matrix::Zero(2 * n_, n_);
        Vector u_off = Vector::Zero(2 * n_);
        for (Eigen::Index j = 0; j < n_; ++j) {
            u_map(2 * j, j) = 1.0;
            u_off(2 * j + 1) = v0_hold;
        }
        return detail::to_solution(r, u_map, forced_, 2, p_, u_off, f);
    }

    ControlDecision decide(const ControlContext &ctx) override {
        ControlDecision d;
        d.uses_qp = true;
        d.solution = solve(ctx.x_now, ctx.v0_hold, ctx.v_ref);
        d.u1 = d.solution.u_star.size() ? d.solution.u_star(0, 0) : 0.0;
        return d;
    }

private:
    EdmdModel model_;
    MpcConfig cfg_;
    Eigen::Index n_;
    Eigen::Index p_ = 0;
    Matrix free_;   // pN x nz
    Vector hold_;   // pN, response to a unit held v0
    Matrix forced_; // pN x N, response to u1
    Vector q_;
    Matrix hessian_, s_rows_, ineq_;
    std::unique_ptr<QpSolver> solver_;
};

/// One EDMD-K solve from the current state.
inline QpSolution edmd_kmpc_step(const EdmdModel &model, const MpcConfig &cfg, const Vector &x_now, double v0_hold,
                                 Eigen::Index n_future = 50) {
    EdmdController c(model, cfg, n_future);
    return c.solve(x_now, v0_hold, cfg.v_ref);
}

// ---------------------------------------------------------------------------
// Closed loop

/// Initial window: `length` steps at the equilibrium of velocity v_eq with a
/// seeded +-dither on u1 so that the window is not degenerate.
struct History {
    Trajectory window;
    TrafficState state; ///< state after the window
};

inline History warm_start_history(double v_eq, int n_vehicles, Eigen::Index length, std::uint64_t seed, double dt,
                                  const OvmParams &p, double dither = 0.1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-dither, dither);
    Matrix u(2, length);
    for (Eigen::Index k = 0; k < length; ++k) {
        u(0, k) = d(rng);
        u(1, k) = v_eq;
    }
    History h;
    const TrafficState x0 = TrafficState::uniform(n_vehicles, equilibrium_spacing(v_eq, p), v_eq);
    h.window = simulate(x0, u, dt, p);
    h.state = step(h.window.state(length - 1), h.window.input(length - 1), dt, p);
    return h;
}

enum class ReferenceMode { fixed, head_mean };

struct LoopConfig {
    Eigen::Index steps = 800;
    Eigen::Index t_ini = 40;
    double dt = 0.05;
    ReferenceMode reference = ReferenceMode::fixed;
    double v_ref = 15.0; ///< used in fixed mode
};

struct StepDiagnostics {
    Eigen::Index k = 0;
    bool uses_qp = false;
    QpStatus status = QpStatus::optimal;
    double objective = 0.0;
    double kkt_residual = 0.0;
    double solve_ms = 0.0;
    double u1_applied = 0.0;
    /// Range of the planned CAV spacing over blocks j >= 1 (nan without a QP).
    double predicted_s1_min = std::numeric_limits<double>::quiet_NaN();
    double predicted_s1_max = std::numeric_limits<double>::quiet_NaN();
};

struct ClosedLoopResult {
    Trajectory trajectory; ///< closed-loop samples only, k = 0..steps-1
    std::vector<double> v_ref;
    std::vector<StepDiagnostics> diagnostics;
    bool aborted = false;
    Eigen::Index failure_step = -1;
    std::string failure;
};

/// Runs `controller` on the plant for cfg.steps steps after the history window.
/// A QP that does not return optimal stops the loop: the result carries the
/// samples up to the failing step and aborted = true. No fallback input is
/// substituted.
inline ClosedLoopResult receding_horizon(Controller &controller, const History &history,
                                         const std::function<double(Eigen::Index)> &head_velocity,
                                         const LoopConfig &cfg, const OvmParams &p, const CavLimits &limits = {}) {
    const Eigen::Index t_ini = cfg.t_ini;
    if (history.window.length() < t_ini) throw InsufficientDataError("receding_horizon: history shorter than t_ini");
    const Eigen::Index nx = history.window.outputs.rows();
    const Eigen::Index total = history.window.length() + cfg.steps;
    Matrix u_all(2, total), y_all(nx, total);
    u_all.leftCols(history.window.length()) = history.window.inputs;
    y_all.leftCols(history.window.length()) = history.window.outputs;

    ClosedLoopResult res;
    res.trajectory.dt = cfg.dt;
    TrafficState x = history.state;
    Eigen::Index filled = history.window.length();
    Eigen::Index done = 0;
    for (Eigen::Index k = 0; k < cfg.steps; ++k) {
        ControlContext ctx;
        ctx.u_window = u_all.middleCols(filled - t_ini, t_ini);
        ctx.y_window = y_all.middleCols(filled - t_ini, t_ini);
        ctx.x_now = x.vector();
        ctx.v0_now = head_velocity(k);
        ctx.v0_hold = u_all(1, filled - 1);
        ctx.v_ref = cfg.reference == ReferenceMode::fixed ? cfg.v_ref : ctx.u_window.row(1).mean();

        const auto t0 = std::chrono::steady_clock::now();
        const ControlDecision dec = controller.decide(ctx);
        const auto t1 = std::chrono::steady_clock::now();

        StepDiagnostics diag;
        diag.k = k;
        diag.uses_qp = dec.uses_qp;
        diag.solve_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (dec.uses_qp) {
            diag.status = dec.solution.status;
            diag.objective = dec.solution.objective;
            diag.kkt_residual = dec.solution.kkt_residual;
            const Matrix &ys = dec.solution.y_star;
            if (ys.cols() > 1) {
                diag.predicted_s1_min = ys.row(0).tail(ys.cols() - 1).minCoeff();
                diag.predicted_s1_max = ys.row(0).tail(ys.cols() - 1).maxCoeff();
            }
        }
        if (dec.uses_qp && dec.solution.status != QpStatus::optimal) {
            res.diagnostics.push_back(diag);
            res.aborted = true;
            res.failure_step = k;
            res.failure = std::string("QP status ") + to_string(dec.solution.status) + " at step " + std::to_string(k);
            break;
        }
        const double u1 = std::clamp(dec.u1, limits.a_min, limits.a_max);
        diag.u1_applied = u1;
        res.diagnostics.push_back(diag);
        res.v_ref.push_back(ctx.v_ref);

        u_all(0, filled) = u1;
        u_all(1, filled) = ctx.v0_now;
        y_all.col(filled) = x.vector();
        ++filled;
        ++done;
        try {
            x = step(x, {u1, ctx.v0_now}, cfg.dt, p, limits);
        } catch (const DivergenceError &) {
            throw DivergenceError("receding_horizon: plant state became non-finite", static_cast<std::size_t>(k));
        }
    }
    const Eigen::Index start = history.window.length();
    res.trajectory.inputs = u_all.middleCols(start, done);
    res.trajectory.outputs = y_all.middleCols(start, done);
    return res;
}

/// Sum over the run of w_s (s_i - s_ref)^2 + q_v (v_i - v_ref(k))^2 over all
/// vehicles, plus r u1(k)^2.
inline double realized_cost(const Trajectory &traj, const MpcConfig &cfg, const std::vector<double> &v_ref) {
    if (static_cast<Eigen::Index>(v_ref.size()) < traj.length()) {
        throw ParameterError("realized_cost: reference shorter than trajectory");
    }
    double cost = 0.0;
    const int n = traj.n_vehicles();
    for (Eigen::Index k = 0; k < traj.length(); ++k) {
        for (int i = 0; i < n; ++i) {
            const double es = traj.outputs(2 * i, k) - cfg.s_ref;
            const double ev = traj.outputs(2 * i + 1, k) - v_ref[k];
            cost += cfg.w_s * es * es + cfg.q_v * ev * ev;
        }
        cost += cfg.r * traj.inputs(0, k) * traj.inputs(0, k);
    }
    return cost;
}

/// Columns k,status,objective,kkt_residual,solve_ms,u1_applied. Steps without a
/// QP report status "none" and nan for the QP fields.
inline void write_diagnostics_csv(std::ostream &os, const std::vector<StepDiagnostics> &diags) {
    os << "k,status,objective,kkt_residual,solve_ms,u1_applied\n";
    for (const auto &d : diags) {
        os << d.k << ',' << (d.uses_qp ? to_string(d.status) : "none") << ','
           << (d.uses_qp ? format_double(d.objective) : "nan") << ','
           << (d.uses_qp ? format_double(d.kkt_residual) : "nan") << ',' << format_double(d.solve_ms) << ','
           << format_double(d.u1_applied) << '\n';
    }
}

} // namespace dfkmpc

#endif // DFKMPC_CONTROL_HPP
