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
#ifndef DFKMPC_HANKEL_HPP
#define DFKMPC_HANKEL_HPP

/**
 * @file
 * @brief Block-Hankel trajectory libraries.
 *
 * Sequences are passed as d x T matrices, one sample per column. A depth-L
 * block-Hankel matrix holds sample w(i + j) in block row i, column j.
 *
 * Excitation checks are rank tests on floating-point data and therefore use
 * the relative singular-value cutoff of the numerics module.
 */

#include <functional>
#include <string>

#include "dfkmpc/errors.hpp"
#include "dfkmpc/numerics.hpp"

namespace dfkmpc {

struct BlockHankel {
    Matrix matrix;
    Eigen::Index block_size = 0; ///< rows per time step
    Eigen::Index depth = 0;      ///< number of block rows L
    Eigen::Index width = 0;      ///< T - L + 1 columns

    /// Rows of block row i (a view).
    auto block_row(Eigen::Index i) const { return matrix.middleRows(i * block_size, block_size); }
};

struct HankelPartition {
    Matrix past;   ///< first t_ini block rows
    Matrix future; ///< last n_future block rows
    Eigen::Index t_ini = 0;
    Eigen::Index n_future = 0;
};

inline BlockHankel build_hankel(const Matrix &w, Eigen::Index depth) {
    const Eigen::Index T = w.cols();
    if (depth < 1) throw ParameterError("build_hankel: depth must be >= 1");
    if (T < depth) {
        throw InsufficientDataError("build_hankel: sequence of length " + std::to_string(T) +
                                    " is shorter than depth " + std::to_string(depth));
    }
    BlockHankel h;
    h.block_size = w.rows();
    h.depth = depth;
    h.width = T - depth + 1;
    h.matrix.resize(h.block_size * depth, h.width);
    for (Eigen::Index i = 0; i < depth; ++i) {
        h.matrix.middleRows(i * h.block_size, h.block_size) = w.middleCols(i, h.width);
    }
    return h;
}

/// Inverse of build_hankel: reads w back along the first column and last block row.
inline Matrix unhankel(const BlockHankel &h) {
    Matrix w(h.block_size, h.depth + h.width - 1);
    for (Eigen::Index i = 0; i < h.depth; ++i) w.col(i) = h.matrix.block(i * h.block_size, 0, h.block_size, 1);
    for (Eigen::Index j = 1; j < h.width; ++j) {
        w.col(h.depth - 1 + j) = h.matrix.block((h.depth - 1) * h.block_size, j, h.block_size, 1);
    }
    return w;
}

/// True iff the depth-L Hankel matrix of w has full row rank.
inline bool is_persistently_exciting(const Matrix &w, Eigen::Index order,
                                     double cutoff = numerics::kDefaultCutoff) {
    const BlockHankel h = build_hankel(w, order);
    if (h.width < h.matrix.rows()) return false;
    return numerics::numerical_rank(h.matrix, cutoff) == h.matrix.rows();
}

inline HankelPartition partition(const BlockHankel &h, Eigen::Index t_ini, Eigen::Index n_future) {
    if (t_ini < 0 || n_future < 0 || t_ini + n_future != h.depth) {
        throw ParameterError("partition: t_ini + n_future must equal the Hankel depth " +
                             std::to_string(h.depth));
    }
    return {h.matrix.topRows(t_ini * h.block_size), h.matrix.bottomRows(n_future * h.block_size), t_ini,
            n_future};
}

using LiftFunction = std::function<Vector(const Vector &)>;

/// Rank test on col(H_L(u_d), [lift(x(0)) ... lift(x(T-L))]).
inline bool check_lifted_excitation(const Matrix &u_d, const Matrix &x_d, const LiftFunction &lift,
                                    Eigen::Index depth, double cutoff = numerics::kDefaultCutoff) {
    if (u_d.cols() != x_d.cols()) throw ParameterError("check_lifted_excitation: sequences not aligned");
    const BlockHankel hu = build_hankel(u_d, depth);
    const Vector z0 = lift(x_d.col(0));
    Matrix stacked(hu.matrix.rows() + z0.size(), hu.width);
    stacked.topRows(hu.matrix.rows()) = hu.matrix;
    for (Eigen::Index j = 0; j < hu.width; ++j) {
        stacked.bottomRows(z0.size()).col(j) = (j == 0) ? z0 : lift(x_d.col(j));
    }
    if (stacked.cols() < stacked.rows()) return false;
    return numerics::numerical_rank(stacked, cutoff) == stacked.rows();
}

/// Relative residual of the best approximation of `traj` = col(u, y) by the
/// column span of col(H_u, H_y). Near zero certifies a valid trajectory.
inline double membership_residual(const BlockHankel &h_u, const BlockHankel &h_y, const Vector &traj) {
    if (h_u.width != h_y.width || h_u.depth != h_y.depth) {
        throw ParameterError("membership_residual: Hankel matrices have different shapes");
    }
    const Eigen::Index rows = h_u.matrix.rows() + h_y.matrix.rows();
    if (traj.size() != rows) {
        throw ParameterError("membership_residual: trajectory length " + std::to_string(traj.size()) +
                             " != " + std::to_string(rows));
    }
    Matrix stacked(rows, h_u.width);
    stacked << h_u.matrix, h_y.matrix;
    const Matrix g = numerics::least_squares(stacked, traj);
    return (stacked * g - traj).norm() / std::max(traj.norm(), 1.0);
}

/// Orthogonal projection onto block-Hankel matrices with block size p:
/// every block anti-diagonal is replaced by the mean of its blocks.
inline Matrix hankel_project(const Matrix &h, Eigen::Index p) {
    if (p < 1 || h.rows() % p != 0) {
        throw ParameterError("hankel_project: row count is not a multiple of the block size");
    }
    const Eigen::Index depth = h.rows() / p;
    const Eigen::Index width = h.cols();
    const Eigen::Index len = depth + width - 1;
    Matrix sums = Matrix::Zero(p, len);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(len);
    for (Eigen::Index i = 0; i < depth; ++i) {
        sums.middleCols(i, width) += h.middleRows(i * p, p);
        counts.segment(i, width).array() += 1;
    }
    for (Eigen::Index t = 0; t < len; ++t) sums.col(t) /= static_cast<double>(counts(t));
    Matrix out(h.rows(), width);
    for (Eigen::Index i = 0; i < depth; ++i) out.middleRows(i * p, p) = sums.middleCols(i, width);
    return out;
}

} // namespace dfkmpc

#endif // DFKMPC_HANKEL_HPP
