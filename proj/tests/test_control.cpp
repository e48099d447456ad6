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
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dfkmpc/control.hpp"
#include "test_util.hpp"

using namespace dfkmpc;

namespace {

constexpr Eigen::Index kTini = 4, kN = 6, kN_z = 4;

// Two-input, four-output LTI plant read as (u1, v0) -> (s1, v1, s2, v2).
struct Fixture {
    testutil::Lti sys;
    KoopmanRepresentation rep;
    Vector w_ini;  // col(u_ini, y_ini), time-major
    Vector x_next; // true state after the window
    double v0_hold = 0.0;
};

Fixture make_fixture(std::uint64_t seed) {
    Fixture f;
    f.sys = testutil::random_lti(kN_z, 2, 4, seed, 0.8);
    const Matrix u = testutil::random_matrix(2, 300, seed + 20);
    const Matrix y = testutil::simulate_lti(f.sys, testutil::random_matrix(kN_z, 1, seed + 21), u);
    IdConfig cfg;
    cfg.n_z = kN_z;
    cfg.t_ini = kTini;
    cfg.n_future = kN;
    f.rep = iterate(u, y, cfg);

    const Matrix u_ini = testutil::random_matrix(2, kTini, seed + 22);
    Vector x = testutil::random_matrix(kN_z, 1, seed + 23);
    Matrix y_ini(4, kTini);
    for (Eigen::Index k = 0; k < kTini; ++k) {
        y_ini.col(k) = f.sys.c * x + f.sys.d * u_ini.col(k);
        x = f.sys.a * x + f.sys.b * u_ini.col(k);
    }
    f.x_next = x;
    f.v0_hold = u_ini(1, kTini - 1);
    f.w_ini.resize(6 * kTini);
    f.w_ini << Eigen::Map<const Vector>(u_ini.data(), u_ini.size()), Eigen::Map<const Vector>(y_ini.data(), y_ini.size());
    return f;
}

// Condensed true-system prediction: y = free + forced * u1 (v0 held).
struct Condensed {
    Vector free;
    Matrix forced;
};

Condensed condense(const Fixture &f) {
    Condensed c;
    c.free.resize(4 * kN);
    c.forced = Matrix::Zero(4 * kN, kN);
    Vector x = f.x_next;
    for (Eigen::Index j = 0; j < kN; ++j) {
        c.free.segment(4 * j, 4) = f.sys.c * x + f.sys.d.col(1) * f.v0_hold;
        x = f.sys.a * x + f.sys.b.col(1) * f.v0_hold;
    }
    for (Eigen::Index i = 0; i < kN; ++i) {
        Vector x_u = f.sys.b.col(0);
        c.forced.block(4 * i, i, 4, 1) = f.sys.d.col(0);
        for (Eigen::Index j = i + 1; j < kN; ++j) {
            c.forced.block(4 * j, i, 4, 1) = f.sys.c * x_u;
            x_u = f.sys.a * x_u;
        }
    }
    return c;
}

struct Cost {
    Matrix hessian; // of 1/2 u'Hu + h'u
    Vector linear;
};

Cost condensed_cost(const Condensed &c, const MpcConfig &cfg) {
    Vector q(4 * kN), yr(4 * kN);
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        const bool spacing = (i % 4) % 2 == 0;
        q(i) = spacing ? cfg.w_s : cfg.q_v;
        yr(i) = spacing ? cfg.s_ref : cfg.v_ref;
    }
    Cost k;
    k.hessian = 2.0 * (c.forced.transpose() * q.asDiagonal() * c.forced + cfg.r * Matrix::Identity(kN, kN));
    k.linear = 2.0 * c.forced.transpose() * q.cwiseProduct(c.free - yr);
    return k;
}

MpcConfig wide_config() {
    MpcConfig cfg;
    cfg.w_s = 0.3;
    cfg.s_ref = 0.5;
    cfg.v_ref = -0.2;
    cfg.a_min = -1e3;
    cfg.a_max = 1e3;
    cfg.s_min = -1e3;
    cfg.s_max = 1e3;
    cfg.qp.tol = 1e-9;
    return cfg;
}

} // namespace

TEST(MpcConfig, Validation) {
    MpcConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.r = 0.0;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = {};
    cfg.a_min = 3.0;
    EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(OutputLayout, AlternatesSpacingAndVelocity) {
    MpcConfig cfg;
    cfg.w_s = 0.25;
    const Vector q = output_weights(cfg, 4, 2);
    const Vector y = output_reference(cfg, 4, 2);
    for (Eigen::Index i = 0; i < 8; ++i) {
        EXPECT_EQ(q(i), i % 2 == 0 ? 0.25 : cfg.q_v);
        EXPECT_EQ(y(i), i % 2 == 0 ? cfg.s_ref : cfg.v_ref);
    }
}

TEST(AssembleQp, Shapes) {
    const Fixture f = make_fixture(1);
    const MpcProblem prob = assemble_qp(f.rep, MpcConfig{}, f.w_ini);
    EXPECT_EQ(prob.init_rows, 2 * kTini + kN_z);
    EXPECT_EQ(prob.hold_rows, kN);
    EXPECT_EQ(prob.qp.eq_matrix.rows(), prob.init_rows + prob.hold_rows);
    EXPECT_EQ(prob.qp.eq_matrix.cols(), f.rep.columns());
    EXPECT_EQ(prob.qp.ineq_matrix.rows(), kN + kN - 1);
    EXPECT_EQ(prob.qp.hessian.rows(), f.rep.columns());
    EXPECT_THROW(assemble_qp(f.rep, MpcConfig{}, Vector::Zero(3)), ParameterError);
}

TEST(DfkQp, UnconstrainedOptimumMatchesTrueSystem) {
    const Fixture f = make_fixture(2);
    const MpcConfig cfg = wide_config();
    const QpSolution sol = solve_qp(assemble_qp(f.rep, cfg, f.w_ini), 1e-9);
    ASSERT_EQ(sol.status, QpStatus::optimal);

    const Condensed c = condense(f);
    const Cost k = condensed_cost(c, cfg);
    const Vector u_opt = k.hessian.ldlt().solve(-k.linear);
    const Vector u_plan = sol.u_star.row(0).transpose();
    EXPECT_LT((u_plan - u_opt).norm(), 1e-6 * std::max(1.0, u_opt.norm()));
    for (Eigen::Index j = 0; j < kN; ++j) EXPECT_NEAR(sol.u_star(1, j), f.v0_hold, 1e-8);

    const Vector y_true = c.free + c.forced * u_plan;
    const Vector y_plan = Eigen::Map<const Vector>(sol.y_star.data(), sol.y_star.size());
    EXPECT_LT((y_plan - y_true).norm(), 1e-6 * std::max(1.0, y_true.norm()));
    EXPECT_LE(sol.kkt_residual, 1e-6);
}

TEST(DfkQp, InputBoxMatchesProjectedGradientOracle) {
    const Fixture f = make_fixture(3);
    MpcConfig cfg = wide_config();
    const Cost k = condensed_cost(condense(f), cfg);
    const Vector free_opt = k.hessian.ldlt().solve(-k.linear);
    // Clip the unconstrained plan so at least one bound is active.
    cfg.a_max = 0.5 * free_opt.maxCoeff() + 0.5 * free_opt.minCoeff();
    cfg.a_min = free_opt.minCoeff() + 0.1 * (cfg.a_max - free_opt.minCoeff());

    Vector u = Vector::Constant(kN, 0.5 * (cfg.a_min + cfg.a_max));
    const double step = 1.0 / k.hessian.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff();
    for (int it = 0; it < 200000; ++it) {
        u = (u - step * (k.hessian * u + k.linear)).cwiseMax(cfg.a_min).cwiseMin(cfg.a_max);
    }

    const QpSolution sol = solve_qp(assemble_qp(f.rep, cfg, f.w_ini), 1e-9);
    ASSERT_EQ(sol.status, QpStatus::optimal);
    const Vector u_plan = sol.u_star.row(0).transpose();
    EXPECT_LT((u_plan - u).cwiseAbs().maxCoeff(), 1e-5);
    EXPECT_LE(u_plan.maxCoeff(), cfg.a_max + 1e-7);
    EXPECT_GE(u_plan.minCoeff(), cfg.a_min - 1e-7);
}

TEST(DfkQp, UnreachableSpacingBandIsNotOptimal) {
    const Fixture f = make_fixture(4);
    MpcConfig cfg = wide_config();
    cfg.a_min = -1e-3;
    cfg.a_max = 1e-3;
    cfg.s_min = 1e4;
    cfg.s_max = 1e4 + 1.0;
    const QpSolution sol = solve_qp(assemble_qp(f.rep, cfg, f.w_ini));
    EXPECT_NE(sol.status, QpStatus::optimal);
}

TEST(DfkController, CachedSolverMatchesFreshAssembly) {
    const Fixture f = make_fixture(5);
    MpcConfig cfg = wide_config();
    cfg.a_min = -0.3;
    cfg.a_max = 0.3;
    DfkController ctl(f.rep, cfg);
    const QpSolution a = ctl.solve(f.w_ini, cfg.v_ref);
    const QpSolution b = solve_qp(assemble_qp(f.rep, cfg, f.w_ini), cfg.qp.tol);
    ASSERT_EQ(a.status, QpStatus::optimal);
    EXPECT_LT((a.u_star - b.u_star).norm(), 1e-6);
    EXPECT_NEAR(a.objective, b.objective, 1e-6 * std::max(1.0, std::abs(b.objective)));
}

namespace {

// Linear kinematics on the raw state. The single spline feature is carried
// in the lift but decoupled from the dynamics and the outputs.
EdmdModel kinematic_model(double dt) {
    EdmdModel m;
    m.centers = Matrix::Zero(4, 1);
    m.a = Matrix::Zero(5, 5);
    m.a.topLeftCorner(4, 4).setIdentity();
    m.a(0, 1) = -dt;
    m.a(2, 1) = dt;
    m.a(2, 3) = -dt;
    m.b = Matrix::Zero(5, 2);
    m.b(1, 0) = dt;
    m.b(0, 1) = dt;
    m.c = Matrix::Zero(4, 5);
    m.c.leftCols(4).setIdentity();
    m.d = Matrix::Zero(4, 2);
    return m;
}

} // namespace

TEST(EdmdKmpc, AccelerationBoundBindsForAFarReference) {
    const EdmdModel model = kinematic_model(0.05);
    MpcConfig cfg;
    cfg.v_ref = 25.0;
    Vector x(4);
    x << 20.0, 15.0, 20.0, 15.0;
    const QpSolution sol = edmd_kmpc_step(model, cfg, x, 15.0, 10);
    ASSERT_EQ(sol.status, QpStatus::optimal);
    EXPECT_NEAR(sol.u_star(0, 0), cfg.a_max, 1e-6);
    EXPECT_LE(sol.u_star.row(0).maxCoeff(), cfg.a_max + 1e-7);
    EXPECT_LE(sol.kkt_residual, 1e-6);

    // Predictions are the model rolled out under the plan.
    const Matrix y = edmd_predict(model, x, sol.u_star);
    EXPECT_LT((y - sol.y_star).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EdmdKmpc, SpacingBoundBindsWhenClosingIn) {
    const EdmdModel model = kinematic_model(0.05);
    MpcConfig cfg;
    cfg.v_ref = 20.0;
    cfg.w_s = 0.0;
    Vector x(4);
    x << 5.5, 16.0, 20.0, 16.0;
    // Full acceleration would close the gap to about 4.9 m within the horizon.
    const QpSolution sol = edmd_kmpc_step(model, cfg, x, 15.0, 10);
    ASSERT_EQ(sol.status, QpStatus::optimal);
    const double s_low = sol.y_star.row(0).tail(9).minCoeff();
    EXPECT_GE(s_low, cfg.s_min - 1e-6);
    EXPECT_NEAR(s_low, cfg.s_min, 1e-5);
}

TEST(WarmStart, NoDitherStaysAtEquilibrium) {
    const OvmParams p;
    const History h = warm_start_history(15.0, 3, 40, 7, 0.05, p, 0.0);
    const double s_eq = equilibrium_spacing(15.0, p);
    for (Eigen::Index k = 0; k < 40; ++k) {
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(h.window.outputs(2 * i, k), s_eq, 1e-9);
            EXPECT_NEAR(h.window.outputs(2 * i + 1, k), 15.0, 1e-9);
        }
    }
}

TEST(ClosedLoop, HdvAtEquilibriumHasZeroRealizedCost) {
    const OvmParams p;
    const History h = warm_start_history(15.0, 3, 40, 7, 0.05, p, 0.0);
    HdvController ctl(p);
    LoopConfig lc;
    lc.steps = 100;
    const ClosedLoopResult res = receding_horizon(ctl, h, [](Eigen::Index) { return 15.0; }, lc, p);
    ASSERT_FALSE(res.aborted);
    EXPECT_EQ(res.trajectory.length(), 100);
    MpcConfig cfg;
    cfg.s_ref = equilibrium_spacing(15.0, p);
    EXPECT_NEAR(realized_cost(res.trajectory, cfg, res.v_ref), 0.0, 1e-12);
}

TEST(RealizedCost, HandComputed) {
    Trajectory t;
    t.inputs.resize(2, 2);
    t.inputs << 1.0, -2.0, 0.0, 0.0;
    t.outputs.resize(2, 2);
    t.outputs << 21.0, 20.0, 14.0, 17.0;
    MpcConfig cfg;
    cfg.w_s = 0.5;
    cfg.q_v = 2.0;
    cfg.r = 0.1;
    // k=0: 0.5*1 + 2*1 + 0.1*1; k=1: 0 + 2*1 + 0.1*4 (v_ref 16).
    EXPECT_NEAR(realized_cost(t, cfg, {15.0, 16.0}), 2.6 + 2.4, 1e-12);
    EXPECT_THROW(realized_cost(t, cfg, {15.0}), ParameterError);
}

TEST(ClosedLoop, InfeasibleQpAbortsAtTheFirstStep) {
    Fixture f = make_fixture(6);
    MpcConfig cfg = wide_config();
    cfg.a_min = -1e-3;
    cfg.a_max = 1e-3;
    cfg.s_min = 1e4;
    cfg.s_max = 1e4 + 1.0;
    DfkController ctl(f.rep, cfg);
    const OvmParams p;
    const History h = warm_start_history(15.0, 2, kTini, 3, 0.05, p);
    LoopConfig lc;
    lc.steps = 20;
    lc.t_ini = kTini;
    const ClosedLoopResult res = receding_horizon(ctl, h, [](Eigen::Index) { return 15.0; }, lc, p);
    EXPECT_TRUE(res.aborted);
    EXPECT_EQ(res.failure_step, 0);
    EXPECT_EQ(res.trajectory.length(), 0);
    ASSERT_EQ(res.diagnostics.size(), 1u);
    EXPECT_NE(res.diagnostics[0].status, QpStatus::optimal);
}

TEST(ClosedLoop, WindowLengthMismatchThrows) {
    Fixture f = make_fixture(7);
    DfkController ctl(f.rep, wide_config());
    const OvmParams p;
    const History h = warm_start_history(15.0, 2, 10, 3, 0.05, p);
    LoopConfig lc;
    lc.steps = 2;
    lc.t_ini = 10;
    EXPECT_THROW(receding_horizon(ctl, h, [](Eigen::Index) { return 15.0; }, lc, p), ParameterError);
}

TEST(Diagnostics, CsvHeaderAndNoQpRows) {
    StepDiagnostics a;
    a.k = 0;
    a.u1_applied = 0.5;
    std::ostringstream os;
    write_diagnostics_csv(os, {a});
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    EXPECT_EQ(header, "k,status,objective,kkt_residual,solve_ms,u1_applied");
    EXPECT_EQ(row.substr(0, 16), "0,none,nan,nan,0");
}
