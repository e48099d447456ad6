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
#ifndef DFKMPC_NUMERICS_HPP
#define DFKMPC_NUMERICS_HPP

/**
 * @file
 * @brief Dense linear-algebra kernels shared by every other module.
 *
 * All rank decisions in the library go through one policy: a singular value
 * counts as zero when it is at most `cutoff * sigma_max`, with
 * kDefaultCutoff = 1e-10. Everything is double precision.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "dfkmpc/errors.hpp"

namespace dfkmpc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace numerics {

/// Relative singular-value cutoff used for every rank judgment.
inline constexpr double kDefaultCutoff = 1e-10;

struct SvdResult {
    Matrix left_vectors;     ///< rows x k, orthonormal columns
    Vector singular_values;  ///< k entries, non-increasing
    Matrix right_vectors;    ///< cols x k, orthonormal columns
};

inline bool all_finite(const Matrix &a) { return a.allFinite(); }

inline void require_finite(const Matrix &a, const char *what) {
    if (!a.allFinite()) {
        throw ParameterError(std::string(what) + ": matrix has non-finite entries");
    }
}

/// Thin SVD, k = min(rows, cols).
inline SvdResult svd(const Matrix &a) {
    require_finite(a, "svd");
    if (a.size() == 0) {
        return {Matrix(a.rows(), 0), Vector(0), Matrix(a.cols(), 0)};
    }
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        throw ConvergenceError("svd: decomposition of " + std::to_string(a.rows()) + "x" +
                               std::to_string(a.cols()) +
                               " matrix did not converge (Eigen info " +
                               std::to_string(static_cast<int>(dec.info())) + ")");
    }
    return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

/// Number of singular values above cutoff * sigma_max.
inline Eigen::Index rank_from_singular_values(const Vector &sv, double cutoff = kDefaultCutoff) {
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double thresh = cutoff * sv(0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > thresh) ++r;
    return r;
}

inline Eigen::Index numerical_rank(const Matrix &a, double cutoff = kDefaultCutoff) {
    return rank_from_singular_values(svd(a).singular_values, cutoff);
}

/// Best rank-r approximation in Frobenius norm (Eckart-Young).
inline Matrix truncate_rank(const Matrix &a, Eigen::Index r) {
    const Eigen::Index kmax = std::min(a.rows(), a.cols());
    if (r < 1 || r > kmax) {
        throw ParameterError("truncate_rank: r=" + std::to_string(r) + " outside [1, " +
                             std::to_string(kmax) + "]");
    }
    const SvdResult s = svd(a);
    return s.left_vectors.leftCols(r) * s.singular_values.head(r).asDiagonal() *
           s.right_vectors.leftCols(r).transpose();
}

/// Moore-Penrose pseudoinverse; singular values <= tol * sigma_max are dropped.
inline Matrix pseudoinverse(const Matrix &a, double tol = kDefaultCutoff) {
    const SvdResult s = svd(a);
    const Eigen::Index r = rank_from_singular_values(s.singular_values, tol);
    if (r == 0) return Matrix::Zero(a.cols(), a.rows());
    const Vector inv = s.singular_values.head(r).cwiseInverse();
    return s.right_vectors.leftCols(r) * inv.asDiagonal() * s.left_vectors.leftCols(r).transpose();
}

/// Minimum-norm minimizer of ||A X - B||_F.
inline Matrix least_squares(const Matrix &a, const Matrix &b, double tol = kDefaultCutoff) {
    if (a.rows() != b.rows()) {
        throw ParameterError("least_squares: A has " + std::to_string(a.rows()) +
                             " rows but B has " + std::to_string(b.rows()));
    }
    require_finite(b, "least_squares");
    const SvdResult s = svd(a);
    const Eigen::Index r = rank_from_singular_values(s.singular_values, tol);
    if (r == 0) return Matrix::Zero(a.cols(), b.cols());
    const Matrix utb = s.left_vectors.leftCols(r).transpose() * b;
    return s.right_vectors.leftCols(r) *
           (s.singular_values.head(r).cwiseInverse().asDiagonal() * utb);
}

/// Orthonormal basis (as columns) of the column space of a.
inline Matrix range_basis(const Matrix &a, double tol = kDefaultCutoff) {
    const SvdResult s = svd(a);
    return s.left_vectors.leftCols(rank_from_singular_values(s.singular_values, tol));
}

/// Orthonormal basis (as columns) of the row space of a.
inline Matrix row_space_basis(const Matrix &a, double tol = kDefaultCutoff) {
    const SvdResult s = svd(a);
    return s.right_vectors.leftCols(rank_from_singular_values(s.singular_values, tol));
}

} // namespace numerics
} // namespace dfkmpc

#endif // DFKMPC_NUMERICS_HPP
