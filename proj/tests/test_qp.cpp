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

#include <limits>

#include "dfkmpc/qp.hpp"
#include "qp_oracle.hpp"
#include "test_util.hpp"

using namespace dfkmpc;
using namespace qporacle;

TEST(Qp, EqualityOnlyMatchesKktSolve) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        QpProblem p = random_problem(100 * s, 6, 2, 0);
        const QpResult r = solve_qp(p);
        ASSERT_EQ(r.status, QpStatus::optimal);
        const Vector oracle = kkt_solve(p.hessian, p.linear, p.eq_matrix, p.eq_rhs);
        EXPECT_LT((r.x - oracle).norm(), 1e-8);
        EXPECT_LE(r.kkt_residual, 1e-6);
    }
}

TEST(Qp, InequalityProblemsMatchActiveSetEnumeration) {
    int active_seen = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        const QpProblem p = random_problem(1000 + 17 * s, 4, s % 2, 4);
        const Vector oracle = enumerate(p);
        ASSERT_GT(oracle.size(), 0) << "seed " << s;
        const QpResult r = solve_qp(p);
        ASSERT_EQ(r.status, QpStatus::optimal) << "seed " << s;
        EXPECT_LT((r.x - oracle).norm(), 1e-6) << "seed " << s;
        EXPECT_NEAR(r.objective, objective(p, oracle), 1e-6);
        if (r.ineq_multipliers.cwiseAbs().maxCoeff() > 1e-6) ++active_seen;
    }
    EXPECT_GT(active_seen, 10);
}

TEST(Qp, MultiplierSignsAndKktResidual) {
    // min (x-2)^2 s.t. -1 <= x <= 1: x = 1, upper bound active with mu = 2.
    QpProblem p;
    p.hessian = Matrix::Identity(1, 1);
    p.linear = Vector::Constant(1, -4.0);
    p.constant = 4.0;
    p.ineq_matrix = Matrix::Identity(1, 1);
    p.ineq_lower = Vector::Constant(1, -1.0);
    p.ineq_upper = Vector::Constant(1, 1.0);
    const QpResult r = solve_qp(p);
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_NEAR(r.x(0), 1.0, 1e-8);
    EXPECT_NEAR(r.ineq_multipliers(0), 2.0, 1e-6);
    EXPECT_NEAR(r.objective, 1.0, 1e-8);

    p.linear(0) = 8.0; // minimizer at -4, clipped to the lower bound
    const QpResult q = solve_qp(p);
    EXPECT_NEAR(q.x(0), -1.0, 1e-8);
    EXPECT_LT(q.ineq_multipliers(0), 0.0);
}

TEST(Qp, RedundantEqualityRowsAreAccepted) {
    QpProblem p = random_problem(7, 5, 2, 0);
    Matrix e(3, 5);
    e << p.eq_matrix, 2.0 * p.eq_matrix.row(0);
    Vector b(3);
    b << p.eq_rhs, 2.0 * p.eq_rhs(0);
    const Vector oracle = kkt_solve(p.hessian, p.linear, p.eq_matrix, p.eq_rhs);
    p.eq_matrix = e;
    p.eq_rhs = b;
    const QpResult r = solve_qp(p);
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_LT((r.x - oracle).norm(), 1e-8);
}

TEST(Qp, InconsistentEqualitiesAreInfeasible) {
    QpProblem p = random_problem(8, 4, 1, 0);
    Matrix e(2, 4);
    e << p.eq_matrix, p.eq_matrix;
    Vector b(2);
    b << p.eq_rhs(0), p.eq_rhs(0) + 1.0;
    p.eq_matrix = e;
    p.eq_rhs = b;
    EXPECT_EQ(solve_qp(p).status, QpStatus::infeasible);
}

TEST(Qp, EmptyFeasibleBoxIsInfeasible) {
    // x1 + x2 >= 3 with x1 <= 1, x2 <= 1.
    QpProblem p;
    p.hessian = Matrix::Identity(2, 2);
    p.linear = Vector::Zero(2);
    p.ineq_matrix.resize(3, 2);
    p.ineq_matrix << 1, 1, 1, 0, 0, 1;
    p.ineq_lower = Vector::Constant(3, -kInf);
    p.ineq_lower(0) = 3.0;
    p.ineq_upper = Vector::Constant(3, 1.0);
    p.ineq_upper(0) = kInf;
    const QpResult r = solve_qp(p);
    EXPECT_NE(r.status, QpStatus::optimal);
    EXPECT_GT(r.primal_residual, 1e-3);
}

TEST(Qp, LinearObjectiveWithoutBoundIsUnbounded) {
    QpProblem p;
    p.hessian = Matrix::Zero(2, 2);
    p.hessian(0, 0) = 1.0;
    p.linear = Vector::Zero(2);
    p.linear(1) = 1.0;
    EXPECT_EQ(solve_qp(p).status, QpStatus::unbounded);
}

TEST(Qp, SemidefiniteHessianWithBoxAttainsVertex) {
    // min x1 over 0 <= x <= 1, plus a curvature-free direction.
    QpProblem p;
    p.hessian = Matrix::Zero(2, 2);
    p.linear = Vector::Zero(2);
    p.linear(0) = 1.0;
    p.ineq_matrix = Matrix::Identity(2, 2);
    p.ineq_lower = Vector::Zero(2);
    p.ineq_upper = Vector::Ones(2);
    const QpResult r = solve_qp(p);
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_NEAR(r.x(0), 0.0, 1e-7);
    EXPECT_NEAR(r.objective, 0.0, 1e-7);
}

TEST(Qp, DirectionsOutsideTheDataAreDropped) {
    // Cost and constraints only see x1 + x2; the optimizer is minimum-norm.
    QpProblem p;
    Matrix a(1, 3);
    a << 1.0, 1.0, 0.0;
    p.hessian = a.transpose() * a;
    p.linear = -2.0 * a.transpose();
    const QpSolver solver(p.hessian, Matrix(0, 3), Matrix(0, 3));
    EXPECT_EQ(solver.reduced_dimension(), 1);
    const QpResult r = solver.solve(p.linear, Vector(0), Vector(0), Vector(0));
    ASSERT_EQ(r.status, QpStatus::optimal);
    EXPECT_NEAR(r.x(0), 0.5, 1e-10);
    EXPECT_NEAR(r.x(1), 0.5, 1e-10);
    EXPECT_NEAR(r.x(2), 0.0, 1e-12);
}

TEST(Qp, CachedStructureMatchesFreshSolves) {
    const QpProblem base = random_problem(55, 6, 2, 5);
    const QpSolver solver(base.hessian, base.eq_matrix, base.ineq_matrix);
    for (std::uint64_t s = 0; s < 5; ++s) {
        QpProblem p = base;
        p.linear = testutil::random_matrix(6, 1, 200 + s, -3.0, 3.0);
        p.eq_rhs = testutil::random_matrix(2, 1, 300 + s, -0.5, 0.5);
        const QpResult a = solver.solve(p.linear, p.eq_rhs, p.ineq_lower, p.ineq_upper);
        const QpResult b = solve_qp(p);
        ASSERT_EQ(a.status, b.status);
        EXPECT_LT((a.x - b.x).norm(), 1e-10);
    }
}

TEST(Qp, ShapeMismatchThrows) {
    const QpSolver solver(Matrix::Identity(2, 2), Matrix(0, 2), Matrix::Identity(2, 2));
    EXPECT_THROW(solver.solve(Vector::Zero(3), Vector(0), Vector::Zero(2), Vector::Zero(2)), ParameterError);
    EXPECT_THROW(QpSolver(Matrix::Identity(2, 3), Matrix(0, 3), Matrix(0, 3)), ParameterError);
}
