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
#ifndef DFKMPC_QP_HPP
#define DFKMPC_QP_HPP

/**
 * @file
 * @brief Dense convex QP solver.
 *
 *   minimize    x' H x + c' x + constant
 *   subject to  E x  = b
 *               lo <= G x <= hi       (entries of lo/hi may be +-infinity)
 *
 * H must be symmetric positive semidefinite. The solver is split in a
 * structure phase (H, E, G fixed) and a data phase (c, b, lo, hi), so
 * receding-horizon loops factor the matrices once.
 *
 * Structure phase:
 *  1. Every quantity the problem can see lies in the row space of [H; E; G];
 *     the decision vector is restricted to an orthonormal basis V of it.
 *     Directions outside V change neither the cost nor the constraints, and
 *     dropping them yields the minimum-norm optimizer.
 *  2. The reduced equality matrix E V is factored by SVD, which absorbs
 *     redundant equality rows and gives a null-space basis Z.
 * Data phase: a particular equality solution is fixed, the remaining QP over
 * Z is solved by a Mehrotra predictor-corrector interior-point method, and
 * multipliers plus KKT residuals are reported in the original coordinates.
 *
 * Reported residuals are relative: stationarity is divided by the largest
 * term of 2Hx + c + E'lambda + G'mu, primal infeasibility by the largest of
 * |b| and |Gx|, complementarity by the largest multiplier, each floored at 1.
 * For unit-scale data they are plain absolute residuals.
 *
 * Everything is single-threaded with a fixed operation order.
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dfkmpc/errors.hpp"
#include "dfkmpc/numerics.hpp"

namespace dfkmpc {

enum class QpStatus { optimal, infeasible, max_iter, unbounded };

inline const char *to_string(QpStatus s) {
    switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::infeasible: return "infeasible";
    case QpStatus::max_iter: return "max-iter";
    case QpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

struct QpProblem {
    Matrix hessian;   ///< H (n x n), cost x'Hx
    Vector linear;    ///< c
    double constant = 0.0;
    Matrix eq_matrix; ///< E (n_eq x n); may have zero rows
    Vector eq_rhs;
    Matrix ineq_matrix; ///< G (n_in x n)
    Vector ineq_lower;
    Vector ineq_upper;
};

struct QpSettings {
    double tol = 1e-6;   ///< bound on each reported KKT residual
    int max_iters = 100; ///< interior-point iterations
};

struct QpResult {
    Vector x;
    Vector eq_multipliers;   ///< lambda, stationarity 2Hx + c + E'lambda + G'mu = 0
    Vector ineq_multipliers; ///< mu, >= 0 at an active upper bound, <= 0 at an active lower bound
    double objective = 0.0;
    double stationarity = 0.0;
    double primal_residual = 0.0;
    double complementarity = 0.0;
    double kkt_residual = 0.0; ///< max of the three residuals above
    QpStatus status = QpStatus::max_iter;
    int iterations = 0;
};

class QpSolver {
public:
    QpSolver(const Matrix &hessian, const Matrix &eq_matrix, const Matrix &ineq_matrix)
        : h_(hessian), e_(eq_matrix), g_(ineq_matrix) {
        n_ = h_.cols();
        if (h_.rows() != n_) throw ParameterError("QpSolver: Hessian must be square");
        if (e_.size() == 0) e_.resize(0, n_);
        if (g_.size() == 0) g_.resize(0, n_);
        if (e_.cols() != n_ || g_.cols() != n_) throw ParameterError("QpSolver: constraint column count mismatch");
        numerics::require_finite(h_, "QpSolver hessian");
        numerics::require_finite(e_, "QpSolver equality matrix");
        numerics::require_finite(g_, "QpSolver inequality matrix");
        build_structure();
    }

    Eigen::Index variables() const { return n_; }
    /// Dimension of the row space the solver works in.
    Eigen::Index reduced_dimension() const { return v_.cols(); }
    /// Free dimension left after the equalities.
    Eigen::Index null_dimension() const { return z_.cols(); }

    QpResult solve(const Vector &linear, const Vector &eq_rhs, const Vector &lower, const Vector &upper,
                   double constant = 0.0, const QpSettings &settings = {}) const {
        if (linear.size() != n_ || eq_rhs.size() != e_.rows() || lower.size() != g_.rows() ||
            upper.size() != g_.rows()) {
            throw ParameterError("QpSolver::solve: vector sizes do not match the structure");
        }
        QpResult res;
        res.eq_multipliers = Vector::Zero(e_.rows());
        res.ineq_multipliers = Vector::Zero(g_.rows());

        const Vector c_red = v_.transpose() * linear;
        const double c_scale = std::max(1.0, linear.cwiseAbs().maxCoeff());
        if ((linear - v_ * c_red).cwiseAbs().maxCoeff() > 1e-9 * c_scale) {
            res.x = Vector::Zero(n_);
            res.status = QpStatus::unbounded;
            return res;
        }

        // Particular solution of the equalities in the reduced space.
        Vector xi_p = Vector::Zero(v_.cols());
        if (e_.rows() > 0) {
            if (eq_rank_ > 0) {
                xi_p = eq_w1_ * (eq_s1_.cwiseInverse().asDiagonal() * (eq_u1_.transpose() * eq_rhs));
            }
            const double eq_err = (e_ * (v_ * xi_p) - eq_rhs).cwiseAbs().maxCoeff() /
                                  std::max(1.0, eq_rhs.cwiseAbs().maxCoeff());
            if (eq_err > settings.tol) {
                res.x = v_ * xi_p;
                res.primal_residual = eq_err;
                res.kkt_residual = eq_err;
                res.status = QpStatus::infeasible;
                return res;
            }
        }

        // Reduced inequality rows: one-sided A eta <= h.
        const Vector g_xi = g_red_ * xi_p;
        std::vector<Eigen::Index> rows;
        std::vector<double> signs;
        for (Eigen::Index i = 0; i < g_.rows(); ++i) {
            if (lower(i) > upper(i)) {
                res.x = v_ * xi_p;
                res.status = QpStatus::infeasible;
                return res;
            }
            if (std::isfinite(upper(i))) {
                rows.push_back(i);
                signs.push_back(1.0);
            }
            if (std::isfinite(lower(i))) {
                rows.push_back(i);
                signs.push_back(-1.0);
            }
        }
        const auto k = static_cast<Eigen::Index>(rows.size());
        Matrix a(k, z_.cols());
        Vector h(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            const Eigen::Index i = rows[j];
            a.row(j) = signs[j] * gz_.row(i);
            h(j) = signs[j] > 0 ? upper(i) - g_xi(i) : -(lower(i) - g_xi(i));
        }
        const Vector q = z_.transpose() * (2.0 * (h_red_ * xi_p) + c_red);

        Vector eta = Vector::Zero(z_.cols());
        Vector zmul = Vector::Zero(k);
        const Inner inner = solve_inner(p_, q, a, h, settings, eta, zmul);
        res.iterations = inner.iterations;

        const Vector xi = xi_p + z_ * eta;
        res.x = v_ * xi;
        for (Eigen::Index j = 0; j < k; ++j) res.ineq_multipliers(rows[j]) += signs[j] * zmul(j);

        // Equality multipliers by least squares on the reduced stationarity.
        const Vector grad = 2.0 * (h_ * res.x) + linear + g_.transpose() * res.ineq_multipliers;
        if (e_.rows() > 0 && eq_rank_ > 0) {
            const Vector grad_red = v_.transpose() * grad;
            res.eq_multipliers = -(eq_u1_ * (eq_s1_.cwiseInverse().asDiagonal() * (eq_w1_.transpose() * grad_red)));
        }
        fill_residuals(res, linear, eq_rhs, lower, upper, constant);

        if (inner.unbounded) {
            res.status = QpStatus::unbounded;
        } else if (inner.infeasible) {
            res.status = QpStatus::infeasible;
        } else if (inner.converged && res.kkt_residual <= settings.tol) {
            res.status = QpStatus::optimal;
        } else {
            res.status = QpStatus::max_iter;
        }
        return res;
    }

private:
    struct Inner {
        int iterations = 0;
        bool converged = false;
        bool infeasible = false;
        bool unbounded = false;
    };

    void build_structure() {
        // Row-normalized stack so that differently scaled blocks all count.
        const Eigen::Index total = h_.rows() + e_.rows() + g_.rows();
        Matrix stack(total, n_);
        Eigen::Index r = 0;
        auto add_rows = [&](const Matrix &m) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                const double nrm = m.row(i).norm();
                if (nrm > 0.0) stack.row(r++) = m.row(i) / nrm;
            }
        };
        add_rows(h_);
        add_rows(e_);
        add_rows(g_);
        if (r == 0) {
            v_.resize(n_, 0);
        } else {
            v_ = numerics::row_space_basis(stack.topRows(r));
        }
        const Eigen::Index d = v_.cols();
        h_red_ = v_.transpose() * h_ * v_;
        h_red_ = 0.5 * (h_red_ + h_red_.transpose()).eval();
        const Matrix e_red = e_ * v_;
        g_red_ = g_ * v_;

        if (e_.rows() > 0 && d > 0) {
            Eigen::JacobiSVD<Matrix> dec(e_red, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Vector sv = dec.singularValues();
            eq_rank_ = numerics::rank_from_singular_values(sv);
            eq_u1_ = dec.matrixU().leftCols(eq_rank_);
            eq_s1_ = sv.head(eq_rank_);
            eq_w1_ = dec.matrixV().leftCols(eq_rank_);
            z_ = dec.matrixV().rightCols(d - eq_rank_);
        } else {
            eq_rank_ = 0;
            eq_u1_.resize(e_.rows(), 0);
            eq_s1_.resize(0);
            eq_w1_.resize(d, 0);
            z_ = Matrix::Identity(d, d);
        }
        p_ = 2.0 * (z_.transpose() * h_red_ * z_);
        p_ = 0.5 * (p_ + p_.transpose()).eval();
        gz_ = g_red_ * z_;
    }

    void fill_residuals(QpResult &res, const Vector &linear, const Vector &eq_rhs, const Vector &lower,
                        const Vector &upper, double constant) const {
        auto inf_norm = [](const Vector &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
        const Vector &x = res.x;
        const Vector hx2 = 2.0 * (h_ * x);
        res.objective = 0.5 * x.dot(hx2) + linear.dot(x) + constant;
        const Vector e_term = e_.transpose() * res.eq_multipliers;
        const Vector g_term = g_.transpose() * res.ineq_multipliers;
        const double stat_scale =
            std::max({1.0, inf_norm(hx2), inf_norm(linear), inf_norm(e_term), inf_norm(g_term)});
        res.stationarity = inf_norm(hx2 + linear + e_term + g_term) / stat_scale;

        const Vector gx = g_ * x;
        const double primal_scale = std::max({1.0, inf_norm(eq_rhs), inf_norm(gx)});
        double primal = 0.0;
        if (e_.rows() > 0) primal = (e_ * x - eq_rhs).cwiseAbs().maxCoeff();
        double comp = 0.0;
        if (g_.rows() > 0) {
            for (Eigen::Index i = 0; i < g_.rows(); ++i) {
                if (std::isfinite(upper(i))) primal = std::max(primal, gx(i) - upper(i));
                if (std::isfinite(lower(i))) primal = std::max(primal, lower(i) - gx(i));
                const double mu = res.ineq_multipliers(i);
                if (mu > 0.0) comp = std::max(comp, std::abs(mu * (upper(i) - gx(i))));
                if (mu < 0.0) comp = std::max(comp, std::abs(mu * (gx(i) - lower(i))));
            }
        }
        res.primal_residual = primal / primal_scale;
        res.complementarity = comp / std::max(1.0, inf_norm(res.ineq_multipliers));
        res.kkt_residual = std::max({res.stationarity, res.primal_residual, res.complementarity});
    }

    /// min 1/2 eta'P eta + q'eta  s.t.  A eta <= h, Mehrotra predictor-corrector.
    static Inner solve_inner(const Matrix &p, const Vector &q, const Matrix &a, const Vector &h,
                             const QpSettings &settings, Vector &eta, Vector &zmul) {
        Inner out;
        const Eigen::Index d = p.rows();
        const Eigen::Index k = a.rows();
        if (d == 0) {
            eta.resize(0);
            zmul = Vector::Zero(k);
            out.converged = k == 0 || h.minCoeff() >= -settings.tol;
            out.infeasible = !out.converged;
            return out;
        }
        if (k == 0) {
            // Unconstrained: P eta = -q, minimum-norm; inconsistency means unbounded.
            eta = numerics::least_squares(p, -q);
            out.unbounded = (p * eta + q).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, q.cwiseAbs().maxCoeff());
            out.converged = !out.unbounded;
            return out;
        }

        const double inner_tol = std::min(1e-10, 1e-3 * settings.tol);
        const double q_scale = 1.0 + q.cwiseAbs().maxCoeff();
        const double h_scale = 1.0 + h.cwiseAbs().maxCoeff();

        // Initial point from the regularized least-squares system.
        Matrix m0 = p + a.transpose() * a;
        Eigen::LDLT<Matrix> ldlt0(m0);
        eta = ldlt0.solve(-q + a.transpose() * h);
        if (!eta.allFinite()) eta.setZero();
        Vector s = h - a * eta;
        const double smin = s.minCoeff();
        if (smin <= 0.0) s.array() += 1.0 - smin;
        zmul = Vector::Ones(k);

        for (int it = 0; it < settings.max_iters; ++it) {
            out.iterations = it + 1;
            const Vector rd = p * eta + q + a.transpose() * zmul;
            const Vector rp = a * eta + s - h;
            const double mu = s.dot(zmul) / static_cast<double>(k);
            const bool primal_ok = rp.cwiseAbs().maxCoeff() <= inner_tol * h_scale;
            if (rd.cwiseAbs().maxCoeff() <= inner_tol * q_scale && primal_ok && mu <= inner_tol) {
                out.converged = true;
                return out;
            }
            // The barrier has vanished but stationarity has not: a weakly active
            // bound lost its multiplier. Further steps stall, so polish now.
            if (primal_ok && mu <= 1e-3 * inner_tol) break;
            if (zmul.maxCoeff() > 1e14 || !eta.allFinite()) {
                out.infeasible = rp.cwiseAbs().maxCoeff() > settings.tol;
                return out;
            }

            const Vector w = zmul.cwiseQuotient(s);
            Matrix m = p + a.transpose() * w.asDiagonal() * a;
            const Eigen::LDLT<Matrix> ldlt(m);

            auto direction = [&](const Vector &rc, Vector &dx, Vector &ds, Vector &dz) {
                const Vector rhs = -rd + a.transpose() * (rc - zmul.cwiseProduct(rp)).cwiseQuotient(s);
                dx = ldlt.solve(rhs);
                ds = -rp - a * dx;
                dz = (-rc - zmul.cwiseProduct(ds)).cwiseQuotient(s);
            };
            auto max_step = [](const Vector &v, const Vector &dv) {
                double alpha = 1.0;
                for (Eigen::Index i = 0; i < v.size(); ++i) {
                    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
                }
                return alpha;
            };

            Vector dx, ds, dz;
            const Vector rc_aff = s.cwiseProduct(zmul);
            direction(rc_aff, dx, ds, dz);
            const double a_aff = std::min(max_step(s, ds), max_step(zmul, dz));
            const double mu_aff = (s + a_aff * ds).dot(zmul + a_aff * dz) / static_cast<double>(k);
            const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

            const Vector rc = rc_aff + ds.cwiseProduct(dz) - Vector::Constant(k, sigma * mu);
            direction(rc, dx, ds, dz);
            const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(zmul, dz)));
            eta += alpha * dx;
            s += alpha * ds;
            zmul += alpha * dz;
        }
        if (polish(p, q, a, h, inner_tol, eta, s, zmul)) {
            out.converged = true;
            return out;
        }
        const Vector rp = a * eta + s - h;
        out.infeasible = rp.cwiseAbs().maxCoeff() > 1e3 * settings.tol && zmul.maxCoeff() > 1e8;
        return out;
    }

    /// Exact solve on the active set guessed from the interior iterate
    /// (s_i < z_i). Kept only if the multipliers have the right sign and the
    /// point is primal feasible.
    static bool polish(const Matrix &p, const Vector &q, const Matrix &a, const Vector &h, double tol, Vector &eta,
                       Vector &s, Vector &zmul) {
        const Eigen::Index d = p.rows();
        std::vector<Eigen::Index> act;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (s(i) < zmul(i)) act.push_back(i);
        }
        const Eigen::Index na = static_cast<Eigen::Index>(act.size());
        Matrix kkt = Matrix::Zero(d + na, d + na);
        Vector rhs(d + na);
        kkt.topLeftCorner(d, d) = p;
        rhs.head(d) = -q;
        for (Eigen::Index j = 0; j < na; ++j) {
            kkt.block(d + j, 0, 1, d) = a.row(act[j]);
            kkt.block(0, d + j, d, 1) = a.row(act[j]).transpose();
            rhs(d + j) = h(act[j]);
        }
        const Vector sol = Eigen::CompleteOrthogonalDecomposition<Matrix>(kkt).solve(rhs);
        if (!sol.allFinite()) return false;
        const double q_scale = 1.0 + q.cwiseAbs().maxCoeff();
        const double h_scale = 1.0 + h.cwiseAbs().maxCoeff();
        Vector z = Vector::Zero(a.rows());
        for (Eigen::Index j = 0; j < na; ++j) z(act[j]) = sol(d + j);
        const Vector x = sol.head(d);
        const Vector slack = h - a * x;
        const double z_scale = std::max(1.0, z.cwiseAbs().maxCoeff());
        if (z.minCoeff() < -tol * z_scale || slack.minCoeff() < -tol * h_scale) return false;
        if ((p * x + q + a.transpose() * z).cwiseAbs().maxCoeff() > tol * q_scale) return false;
        eta = x;
        s = slack.cwiseMax(0.0);
        zmul = z.cwiseMax(0.0);
        return true;
    }

    Eigen::Index n_ = 0;
    Matrix h_, e_, g_;
    Matrix v_;       // n x d row-space basis
    Matrix h_red_;   // d x d
    Matrix g_red_;   // n_in x d
    Eigen::Index eq_rank_ = 0;
    Matrix eq_u1_;   // n_eq x r_e
    Vector eq_s1_;
    Matrix eq_w1_;   // d x r_e
    Matrix z_;       // d x (d - r_e)
    Matrix p_;       // reduced Hessian (1/2 convention)
    Matrix gz_;      // n_in x (d - r_e)
};

inline QpResult solve_qp(const QpProblem &problem, const QpSettings &settings = {}) {
    const QpSolver solver(problem.hessian, problem.eq_matrix, problem.ineq_matrix);
    const Eigen::Index n_eq = problem.eq_matrix.rows();
    const Eigen::Index n_in = problem.ineq_matrix.rows();
    const Vector b = problem.eq_rhs.size() ? problem.eq_rhs : Vector::Zero(n_eq);
    const Vector lo = problem.ineq_lower.size() ? problem.ineq_lower
                                                : Vector::Constant(n_in, -std::numeric_limits<double>::infinity());
    const Vector hi = problem.ineq_upper.size() ? problem.ineq_upper
                                                : Vector::Constant(n_in, std::numeric_limits<double>::infinity());
    return solver.solve(problem.linear, b, lo, hi, problem.constant, settings);
}

} // namespace dfkmpc

#endif // DFKMPC_QP_HPP
