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
#ifndef DFKMPC_KOOPMAN_ID_HPP
#define DFKMPC_KOOPMAN_ID_HPP

/**
 * @file
 * @brief Koopman model identification.
 *
 * Two routes live here:
 *  - the dictionary-free representation: the output rows of an input/output
 *    Hankel library are refined by alternating three projections (rank
 *    truncation, causal regression, Hankel averaging) until they settle;
 *  - the EDMD baseline: least-squares (A, B, C, D) over an explicit lifting
 *    made of the raw state and thin-plate-spline radial functions.
 *
 * The stacked library is always ordered col(U_P, Y_P, U_F, Y_F). The input
 * rows are never modified.
 */

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "dfkmpc/errors.hpp"
#include "dfkmpc/hankel.hpp"
#include "dfkmpc/numerics.hpp"
#include "dfkmpc/traffic_sim.hpp"

namespace dfkmpc {

struct IdConfig {
    Eigen::Index n_z = 40;      ///< hidden Koopman dimension
    Eigen::Index t_ini = 40;    ///< past horizon
    Eigen::Index n_future = 50; ///< prediction horizon N
    double epsilon = 1e-4;      ///< relative convergence tolerance
    int max_iters = 500;

    Eigen::Index depth() const { return t_ini + n_future; }

    void validate() const {
        if (n_z < 1) throw ParameterError("IdConfig: n_z must be >= 1");
        if (t_ini < n_z) throw ParameterError("IdConfig: t_ini must be >= n_z");
        if (n_future < 1) throw ParameterError("IdConfig: n_future must be >= 1");
        if (!(epsilon > 0.0)) throw ParameterError("IdConfig: epsilon must be positive");
        if (max_iters < 1) throw ParameterError("IdConfig: max_iters must be >= 1");
    }
};

struct ConvergenceInfo {
    int iterations = 0;
    double final_relative_change = std::numeric_limits<double>::infinity();
    bool converged = false;
    /// ||H_y1 - H_y3||_F / ||H_y1||_F per iteration.
    std::vector<double> history;
};

struct KoopmanRepresentation {
    Matrix u_past;        ///< U_P, m*t_ini rows
    Matrix u_future;      ///< U_F, m*n_future rows
    Matrix y_past_star;   ///< Y_P*, p*t_ini rows
    Matrix y_future_star; ///< Y_F*, p*n_future rows
    Eigen::Index t_ini = 0;
    Eigen::Index n_future = 0;
    Eigen::Index n_z = 0;
    Eigen::Index input_dim = 0;  ///< m
    Eigen::Index output_dim = 0; ///< p
    /// Orthogonal projector onto range(col(U_P, Y_P*)); square, (m+p)*t_ini.
    Matrix init_projector;
    ConvergenceInfo convergence;
    double epsilon = 0.0;
    std::uint64_t data_seed = 0;

    Eigen::Index columns() const { return u_past.cols(); }

    /// col(U_P, Y_P*)
    Matrix past_stack() const {
        Matrix m(u_past.rows() + y_past_star.rows(), columns());
        m << u_past, y_past_star;
        return m;
    }

    /// H-bar* = col(U_P, Y_P*, U_F, Y_F*)
    Matrix stacked() const {
        Matrix m(u_past.rows() + y_past_star.rows() + u_future.rows() + y_future_star.rows(), columns());
        m << u_past, y_past_star, u_future, y_future_star;
        return m;
    }
};

namespace detail {

inline Matrix vstack(const Matrix &a, const Matrix &b) {
    Matrix m(a.rows() + b.rows(), a.cols());
    m << a, b;
    return m;
}

inline Matrix vstack(const Matrix &a, const Matrix &b, const Matrix &c) {
    Matrix m(a.rows() + b.rows() + c.rows(), a.cols());
    m << a, b, c;
    return m;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Low-rank projection

/// Closest output rows (Frobenius) such that the stack with the exact input
/// rows has rank at most `rank_target`. The input row space is kept; the
/// component of the outputs orthogonal to it is truncated to
/// rank_target - rank(inputs). Construct once per input library and reuse.
class LowRankProjector {
public:
    LowRankProjector(const Matrix &inputs, Eigen::Index rank_target)
        : input_basis_(numerics::row_space_basis(inputs)), rank_target_(rank_target),
          stack_rows_(inputs.rows()) {}

    Eigen::Index input_rank() const { return input_basis_.cols(); }

    struct Result {
        Matrix outputs;
        bool target_reached = true;
    };

    Result operator()(const Matrix &h_y) const {
        const Eigen::Index rows = stack_rows_ + h_y.rows();
        if (rank_target_ >= std::min(rows, h_y.cols())) return {h_y, false};
        const Matrix in_span = (h_y * input_basis_) * input_basis_.transpose();
        const Matrix residual = h_y - in_span;
        const Eigen::Index keep = rank_target_ - input_rank();
        if (keep <= 0) return {in_span, keep == 0};
        if (keep >= std::min(residual.rows(), residual.cols())) return {h_y, false};
        return {in_span + numerics::truncate_rank(residual, keep), true};
    }

private:
    Matrix input_basis_;
    Eigen::Index rank_target_;
    Eigen::Index stack_rows_;
};

/// One low-rank step on the library col(U_P, Y_P, U_F, Y_F); h_y = col(Y_P, Y_F).
inline LowRankProjector::Result low_rank_step(const Matrix &u_past, const Matrix &u_future, const Matrix &h_y,
                                              Eigen::Index rank_target) {
    if (u_past.cols() != h_y.cols() || u_future.cols() != h_y.cols()) {
        throw ParameterError("low_rank_step: column counts differ");
    }
    return LowRankProjector(detail::vstack(u_past, u_future), rank_target)(h_y);
}

// ---------------------------------------------------------------------------
// Causal projection

struct CausalResult {
    Matrix y_future; ///< Y_F2 = K col(U_P, Y_P1, U_F)
    Matrix predictor; ///< K = [K_p K_f], K_f block lower triangular
};

/// Block row i of Y_F1 regressed (minimum-norm least squares) onto
/// col(U_P, Y_P1, first i+1 block rows of U_F).
inline CausalResult causal_step(const Matrix &u_past, const Matrix &y_past1, const Matrix &u_future,
                                const Matrix &y_future1, Eigen::Index n_future) {
    if (n_future < 1 || u_future.rows() % n_future != 0 || y_future1.rows() % n_future != 0) {
        throw ParameterError("causal_step: future blocks are not divisible by n_future");
    }
    const Eigen::Index m = u_future.rows() / n_future;
    const Eigen::Index p = y_future1.rows() / n_future;
    const Matrix past = detail::vstack(u_past, y_past1);
    const Eigen::Index np = past.rows();
    const Matrix full = detail::vstack(past, u_future);

    CausalResult out;
    out.predictor = Matrix::Zero(p * n_future, full.rows());
    for (Eigen::Index i = 0; i < n_future; ++i) {
        const Eigen::Index used = np + (i + 1) * m;
        const Matrix regressor = full.topRows(used);
        const Matrix target = y_future1.middleRows(i * p, p);
        const Matrix k_i = numerics::least_squares(regressor.transpose(), target.transpose()).transpose();
        out.predictor.block(i * p, 0, p, used) = k_i;
    }
    out.y_future = out.predictor * full;
    return out;
}

/// Same map as causal_step(...).y_future without forming K: the nested row
/// spaces of the regressors are built once by Gram-Schmidt and each block row
/// is projected onto its own prefix of the basis.
inline Matrix causal_project(const Matrix &u_past, const Matrix &y_past1, const Matrix &u_future,
                             const Matrix &y_future1, Eigen::Index n_future) {
    if (n_future < 1 || u_future.rows() % n_future != 0 || y_future1.rows() % n_future != 0) {
        throw ParameterError("causal_project: future blocks are not divisible by n_future");
    }
    const Eigen::Index m = u_future.rows() / n_future;
    const Eigen::Index p = y_future1.rows() / n_future;
    const Eigen::Index cols = y_future1.cols();

    const Matrix past_basis = numerics::row_space_basis(detail::vstack(u_past, y_past1));
    Matrix basis(cols, past_basis.cols() + u_future.rows());
    basis.leftCols(past_basis.cols()) = past_basis;
    Eigen::Index used = past_basis.cols();
    std::vector<Eigen::Index> prefix(n_future);

    const double row_scale = u_future.rowwise().norm().maxCoeff();
    for (Eigen::Index i = 0; i < n_future; ++i) {
        for (Eigen::Index r = 0; r < m; ++r) {
            Vector v = u_future.row(i * m + r).transpose();
            for (int pass = 0; pass < 2; ++pass) {
                if (used > 0) v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
            }
            const double nv = v.norm();
            if (nv > numerics::kDefaultCutoff * std::max(row_scale, 1e-300)) {
                basis.col(used++) = v / nv;
            }
        }
        prefix[i] = used;
    }
    Matrix coeffs = y_future1 * basis.leftCols(used);
    for (Eigen::Index i = 0; i < n_future; ++i) {
        if (prefix[i] < used) coeffs.block(i * p, prefix[i], p, used - prefix[i]).setZero();
    }
    return coeffs * basis.leftCols(used).transpose();
}

// ---------------------------------------------------------------------------
// Alternating projections

/// Builds the dictionary-free representation from one input/output record
/// (u_d: m x T, y_d: p x T). Iterates
///   H_y1 = low-rank(H_y3), H_y2 = causal(H_y1), H_y3 = hankel(H_y2)
/// from H_y3 = H_y until ||H_y1 - H_y3|| <= epsilon ||H_y1||, and keeps H_y1.
/// On hitting max_iters the iterate with the smallest relative change is
/// returned with converged = false.
inline KoopmanRepresentation iterate(const Matrix &u_d, const Matrix &y_d, const IdConfig &cfg,
                                     std::uint64_t data_seed = 0) {
    cfg.validate();
    if (u_d.cols() != y_d.cols()) throw ParameterError("iterate: input and output lengths differ");
    const Eigen::Index m = u_d.rows();
    const Eigen::Index p = y_d.rows();
    const Eigen::Index depth = cfg.depth();
    const Eigen::Index rank_target = m * depth + cfg.n_z;

    const BlockHankel hu = build_hankel(u_d, depth);
    const BlockHankel hy = build_hankel(y_d, depth);
    if (hu.width < rank_target) {
        throw InsufficientDataError("iterate: " + std::to_string(hu.width) + " Hankel columns < m*L + n_z = " +
                                    std::to_string(rank_target));
    }
    const HankelPartition up = partition(hu, cfg.t_ini, cfg.n_future);
    const LowRankProjector low_rank(hu.matrix, rank_target);
    if (low_rank.input_rank() < hu.matrix.rows()) {
        throw ParameterError("iterate: input data is not persistently exciting of order " + std::to_string(depth));
    }

    const Eigen::Index past_rows = p * cfg.t_ini;
    KoopmanRepresentation rep;
    rep.t_ini = cfg.t_ini;
    rep.n_future = cfg.n_future;
    rep.n_z = cfg.n_z;
    rep.input_dim = m;
    rep.output_dim = p;
    rep.epsilon = cfg.epsilon;
    rep.data_seed = data_seed;
    rep.u_past = up.past;
    rep.u_future = up.future;

    Matrix h3 = hy.matrix;
    Matrix best;
    double best_change = std::numeric_limits<double>::infinity();
    ConvergenceInfo &info = rep.convergence;
    for (int it = 0; it < cfg.max_iters; ++it) {
        const Matrix h1 = low_rank(h3).outputs;
        Matrix h2 = h1;
        h2.bottomRows(h1.rows() - past_rows) = causal_project(up.past, h1.topRows(past_rows), up.future,
                                                              h1.bottomRows(h1.rows() - past_rows), cfg.n_future);
        h3 = hankel_project(h2, p);
        const double change = (h1 - h3).norm() / std::max(h1.norm(), std::numeric_limits<double>::min());
        info.history.push_back(change);
        info.iterations = it + 1;
        if (change < best_change) {
            best_change = change;
            best = h1;
        }
        if (change <= cfg.epsilon) {
            info.converged = true;
            break;
        }
    }
    info.final_relative_change = info.converged ? info.history.back() : best_change;
    rep.y_past_star = best.topRows(past_rows);
    rep.y_future_star = best.bottomRows(best.rows() - past_rows);

    const Matrix past = rep.past_stack();
    rep.init_projector = past * numerics::pseudoinverse(past);
    return rep;
}

/// Output prediction from the representation: least-squares g with
/// col(U_P, Y_P*, U_F) g = col(u_ini, y_ini, u_f), then y_f = Y_F* g.
inline Vector predict_outputs(const KoopmanRepresentation &rep, const Vector &u_ini, const Vector &y_ini,
                              const Vector &u_f) {
    const Matrix a = detail::vstack(rep.u_past, rep.y_past_star, rep.u_future);
    Vector rhs(a.rows());
    if (u_ini.size() + y_ini.size() + u_f.size() != a.rows()) {
        throw ParameterError("predict_outputs: window sizes do not match the representation");
    }
    rhs << u_ini, y_ini, u_f;
    const Matrix g = numerics::least_squares(a, rhs);
    return rep.y_future_star * g;
}

// ---------------------------------------------------------------------------
// EDMD baseline

/// Thin-plate spline r^2 log r, continuous extension 0 at r = 0.
inline double thin_plate_spline(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

/// col(x, phi(||x - c_1||), ..., phi(||x - c_k||)); centers are columns.
inline Vector tps_lift(const Vector &x, const Matrix &centers) {
    if (centers.cols() < 1) throw ParameterError("tps_lift: no centers");
    if (centers.rows() != x.size()) throw ParameterError("tps_lift: center dimension mismatch");
    Vector z(x.size() + centers.cols());
    z.head(x.size()) = x;
    for (Eigen::Index j = 0; j < centers.cols(); ++j) {
        z(x.size() + j) = thin_plate_spline((x - centers.col(j)).norm());
    }
    return z;
}

/// Centers for the platoon state layout: spacing coordinates ~ U[5,15],
/// velocity coordinates ~ U[10,20].
inline Matrix sample_tps_centers(std::uint64_t seed, Eigen::Index count, int n_vehicles) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(5.0, 15.0);
    std::uniform_real_distribution<double> vel(10.0, 20.0);
    Matrix c(2 * n_vehicles, count);
    for (Eigen::Index j = 0; j < count; ++j) {
        for (int i = 0; i < n_vehicles; ++i) {
            c(2 * i, j) = gap(rng);
            c(2 * i + 1, j) = vel(rng);
        }
    }
    return c;
}

struct EdmdModel {
    Matrix a, b, c, d;
    Matrix centers;
    bool includes_state = true;
    bool rank_deficient = false;

    Eigen::Index lifted_dim() const { return a.rows(); }
    Vector lift(const Vector &x) const { return tps_lift(x, centers); }
};

/// Least-squares (A, B) and (C, D) over snapshot pairs taken within each
/// trajectory (never across trajectory boundaries).
inline EdmdModel edmd_fit(const std::vector<Trajectory> &trajectories, const Matrix &centers) {
    if (trajectories.empty()) throw ParameterError("edmd_fit: no trajectories");
    const Eigen::Index nx = trajectories.front().outputs.rows();
    const Eigen::Index m = trajectories.front().inputs.rows();
    const Eigen::Index nz = nx + centers.cols();
    Eigen::Index samples = 0;
    for (const auto &t : trajectories) {
        if (t.outputs.rows() != nx || t.inputs.rows() != m) throw ParameterError("edmd_fit: mixed dimensions");
        samples += std::max<Eigen::Index>(t.length() - 1, 0);
    }
    if (samples < nz + m) throw InsufficientDataError("edmd_fit: too few snapshot pairs");

    // Regressor rows are samples: [z(k)^T u(k)^T] -> [z(k+1)^T y(k)^T].
    Matrix regressor(samples, nz + m);
    Matrix targets(samples, nz + nx);
    Eigen::Index row = 0;
    for (const auto &t : trajectories) {
        if (t.length() < 2) continue;
        Vector z = tps_lift(t.outputs.col(0), centers);
        for (Eigen::Index k = 0; k + 1 < t.length(); ++k, ++row) {
            const Vector z_next = tps_lift(t.outputs.col(k + 1), centers);
            regressor.row(row).head(nz) = z.transpose();
            regressor.row(row).tail(m) = t.inputs.col(k).transpose();
            targets.row(row).head(nz) = z_next.transpose();
            targets.row(row).tail(nx) = t.outputs.col(k).transpose();
            z = z_next;
        }
    }

    const numerics::SvdResult s = numerics::svd(regressor);
    const Eigen::Index r = numerics::rank_from_singular_values(s.singular_values);
    EdmdModel model;
    model.centers = centers;
    model.rank_deficient = r < regressor.cols();
    const Matrix coef = s.right_vectors.leftCols(r) *
                        (s.singular_values.head(r).cwiseInverse().asDiagonal() *
                         (s.left_vectors.leftCols(r).transpose() * targets));
    // coef: (nz+m) x (nz+nx); transpose gives [A B] and [C D] stacked.
    const Matrix t = coef.transpose();
    model.a = t.topLeftCorner(nz, nz);
    model.b = t.topRightCorner(nz, m);
    model.c = t.bottomLeftCorner(nx, nz);
    model.d = t.bottomRightCorner(nx, m);
    return model;
}

/// Rolls the lifted linear model forward from z(0) = lift(x0); returns y(0..T-1).
inline Matrix edmd_predict(const EdmdModel &model, const Vector &x0, const Matrix &u_seq) {
    if (u_seq.cols() < 1) throw ParameterError("edmd_predict: empty input sequence");
    Vector z = model.lift(x0);
    Matrix y(model.c.rows(), u_seq.cols());
    for (Eigen::Index k = 0; k < u_seq.cols(); ++k) {
        y.col(k) = model.c * z + model.d * u_seq.col(k);
        z = model.a * z + model.b * u_seq.col(k);
    }
    return y;
}

// ---------------------------------------------------------------------------
// Binary containers. Little-endian host layout, column-major doubles; loading
// restores every matrix bit for bit.

namespace detail {

inline void put_u64(std::ostream &os, std::uint64_t v) { os.write(reinterpret_cast<const char *>(&v), sizeof v); }
inline void put_f64(std::ostream &os, double v) { os.write(reinterpret_cast<const char *>(&v), sizeof v); }
inline void put_matrix(std::ostream &os, const Matrix &m) {
    put_u64(os, static_cast<std::uint64_t>(m.rows()));
    put_u64(os, static_cast<std::uint64_t>(m.cols()));
    os.write(reinterpret_cast<const char *>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
}

inline std::uint64_t get_u64(std::istream &is) {
    std::uint64_t v = 0;
    if (!is.read(reinterpret_cast<char *>(&v), sizeof v)) throw ParameterError("container: truncated file");
    return v;
}
inline double get_f64(std::istream &is) {
    double v = 0;
    if (!is.read(reinterpret_cast<char *>(&v), sizeof v)) throw ParameterError("container: truncated file");
    return v;
}
inline Matrix get_matrix(std::istream &is) {
    const auto rows = static_cast<Eigen::Index>(get_u64(is));
    const auto cols = static_cast<Eigen::Index>(get_u64(is));
    if (rows < 0 || cols < 0 || rows > (1 << 24) || cols > (1 << 24)) throw ParameterError("container: bad shape");
    Matrix m(rows, cols);
    if (!is.read(reinterpret_cast<char *>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()))) {
        throw ParameterError("container: truncated matrix");
    }
    return m;
}

inline constexpr char kRepMagic[8] = {'D', 'F', 'K', 'R', 'E', 'P', '0', '1'};
inline constexpr char kEdmdMagic[8] = {'D', 'F', 'K', 'E', 'D', 'M', '0', '1'};

inline void check_magic(std::istream &is, const char (&magic)[8], const std::string &what) {
    char buf[8] = {};
    if (!is.read(buf, 8) || !std::equal(buf, buf + 8, magic)) throw ParameterError(what + ": bad magic");
}

} // namespace detail

inline void write_representation(std::ostream &os, const KoopmanRepresentation &rep) {
    using namespace detail;
    os.write(kRepMagic, 8);
    put_u64(os, static_cast<std::uint64_t>(rep.t_ini));
    put_u64(os, static_cast<std::uint64_t>(rep.n_future));
    put_u64(os, static_cast<std::uint64_t>(rep.n_z));
    put_u64(os, static_cast<std::uint64_t>(rep.input_dim));
    put_u64(os, static_cast<std::uint64_t>(rep.output_dim));
    put_u64(os, rep.data_seed);
    put_f64(os, rep.epsilon);
    put_u64(os, static_cast<std::uint64_t>(rep.convergence.iterations));
    put_u64(os, rep.convergence.converged ? 1u : 0u);
    put_f64(os, rep.convergence.final_relative_change);
    put_u64(os, rep.convergence.history.size());
    for (double h : rep.convergence.history) put_f64(os, h);
    put_matrix(os, rep.u_past);
    put_matrix(os, rep.y_past_star);
    put_matrix(os, rep.u_future);
    put_matrix(os, rep.y_future_star);
    put_matrix(os, rep.init_projector);
}

inline KoopmanRepresentation read_representation(std::istream &is) {
    using namespace detail;
    check_magic(is, kRepMagic, "representation");
    KoopmanRepresentation rep;
    rep.t_ini = static_cast<Eigen::Index>(get_u64(is));
    rep.n_future = static_cast<Eigen::Index>(get_u64(is));
    rep.n_z = static_cast<Eigen::Index>(get_u64(is));
    rep.input_dim = static_cast<Eigen::Index>(get_u64(is));
    rep.output_dim = static_cast<Eigen::Index>(get_u64(is));
    rep.data_seed = get_u64(is);
    rep.epsilon = get_f64(is);
    rep.convergence.iterations = static_cast<int>(get_u64(is));
    rep.convergence.converged = get_u64(is) != 0;
    rep.convergence.final_relative_change = get_f64(is);
    const auto n_hist = get_u64(is);
    if (n_hist > (1u << 24)) throw ParameterError("representation: bad history length");
    rep.convergence.history.resize(n_hist);
    for (auto &h : rep.convergence.history) h = get_f64(is);
    rep.u_past = get_matrix(is);
    rep.y_past_star = get_matrix(is);
    rep.u_future = get_matrix(is);
    rep.y_future_star = get_matrix(is);
    rep.init_projector = get_matrix(is);
    const Eigen::Index cols = rep.u_past.cols();
    if (rep.y_past_star.cols() != cols || rep.u_future.cols() != cols || rep.y_future_star.cols() != cols ||
        rep.u_past.rows() != rep.input_dim * rep.t_ini || rep.y_future_star.rows() != rep.output_dim * rep.n_future) {
        throw ParameterError("representation: inconsistent block shapes");
    }
    return rep;
}

inline void save_representation(const std::string &path, const KoopmanRepresentation &rep) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_representation(f, rep);
}

inline KoopmanRepresentation load_representation(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_representation(f);
}

inline void write_edmd_model(std::ostream &os, const EdmdModel &model) {
    using namespace detail;
    os.write(kEdmdMagic, 8);
    put_u64(os, model.includes_state ? 1u : 0u);
    put_u64(os, model.rank_deficient ? 1u : 0u);
    put_matrix(os, model.a);
    put_matrix(os, model.b);
    put_matrix(os, model.c);
    put_matrix(os, model.d);
    put_matrix(os, model.centers);
}

inline EdmdModel read_edmd_model(std::istream &is) {
    using namespace detail;
    check_magic(is, kEdmdMagic, "edmd model");
    EdmdModel model;
    model.includes_state = get_u64(is) != 0;
    model.rank_deficient = get_u64(is) != 0;
    model.a = get_matrix(is);
    model.b = get_matrix(is);
    model.c = get_matrix(is);
    model.d = get_matrix(is);
    model.centers = get_matrix(is);
    return model;
}

inline void save_edmd_model(const std::string &path, const EdmdModel &model) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    write_edmd_model(f, model);
}

inline EdmdModel load_edmd_model(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    return read_edmd_model(f);
}

} // namespace dfkmpc

#endif // DFKMPC_KOOPMAN_ID_HPP
