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

#include "dfkmpc/hankel.hpp"
#include "test_util.hpp"

using namespace dfkmpc;

TEST(BuildHankel, MatchesDefinition) {
    const Matrix w = testutil::random_matrix(2, 9, 3);
    const BlockHankel h = build_hankel(w, 4);
    EXPECT_EQ(h.block_size, 2);
    EXPECT_EQ(h.depth, 4);
    EXPECT_EQ(h.width, 6);
    EXPECT_EQ(h.matrix, testutil::hankel_oracle(w, 4));
    EXPECT_EQ(Matrix(h.block_row(2)), w.middleCols(2, 6));
}

TEST(BuildHankel, ScalarExample) {
    Matrix w(1, 5);
    w << 1, 2, 3, 4, 5;
    Matrix expected(3, 3);
    expected << 1, 2, 3, 2, 3, 4, 3, 4, 5;
    EXPECT_EQ(build_hankel(w, 3).matrix, expected);
}

TEST(BuildHankel, TooShortThrows) {
    EXPECT_THROW(build_hankel(Matrix::Ones(2, 3), 4), InsufficientDataError);
    EXPECT_THROW(build_hankel(Matrix::Ones(2, 3), 0), ParameterError);
}

TEST(Unhankel, InvertsBuild) {
    const Matrix w = testutil::random_matrix(3, 12, 4);
    EXPECT_EQ(unhankel(build_hankel(w, 5)), w);
}

TEST(Excitation, RandomIsPersistentConstantIsNot) {
    EXPECT_TRUE(is_persistently_exciting(testutil::random_matrix(2, 60, 5), 10));
    EXPECT_FALSE(is_persistently_exciting(Matrix::Ones(2, 60), 10));
    // Too short to have enough columns.
    EXPECT_FALSE(is_persistently_exciting(testutil::random_matrix(2, 20, 6), 10));
}

TEST(Partition, SplitsPastAndFuture) {
    const Matrix w = testutil::random_matrix(2, 20, 7);
    const BlockHankel h = build_hankel(w, 7);
    const HankelPartition part = partition(h, 3, 4);
    EXPECT_EQ(part.past, h.matrix.topRows(6));
    EXPECT_EQ(part.future, h.matrix.bottomRows(8));
    EXPECT_THROW(partition(h, 3, 3), ParameterError);
}

TEST(Membership, LtiTrajectoryIsInTheSpan) {
    // Depth-L Hankel of a PE input from a 3-state system spans every length-L
    // trajectory when the data is long enough.
    const auto sys = testutil::random_lti(3, 1, 2, 11);
    const Eigen::Index depth = 6;
    const Matrix u = testutil::random_matrix(1, 80, 12);
    const Matrix y = testutil::simulate_lti(sys, testutil::random_matrix(3, 1, 13), u);
    const BlockHankel hu = build_hankel(u, depth);
    const BlockHankel hy = build_hankel(y, depth);

    const Matrix u_new = testutil::random_matrix(1, depth, 14);
    const Matrix y_new = testutil::simulate_lti(sys, testutil::random_matrix(3, 1, 15), u_new);
    Vector traj(3 * depth);
    traj << Eigen::Map<const Vector>(u_new.data(), depth), Eigen::Map<const Vector>(y_new.data(), 2 * depth);
    EXPECT_LT(membership_residual(hu, hy, traj), 1e-9);

    Vector junk = testutil::random_matrix(3 * depth, 1, 16);
    EXPECT_GT(membership_residual(hu, hy, junk), 1e-3);
}

TEST(HankelProject, FixesHankelMatricesAndIsIdempotent) {
    const Matrix w = testutil::random_matrix(2, 10, 17);
    const Matrix h = testutil::hankel_oracle(w, 4);
    EXPECT_LT((hankel_project(h, 2) - h).norm(), 1e-14);

    const Matrix a = testutil::random_matrix(8, 7, 18);
    const Matrix pa = hankel_project(a, 2);
    EXPECT_LT((hankel_project(pa, 2) - pa).norm(), 1e-14);
    // Result is block Hankel: block (i, j) equals block (i+1, j-1).
    for (Eigen::Index i = 0; i + 1 < 4; ++i)
        for (Eigen::Index j = 1; j < 7; ++j)
            EXPECT_LT((pa.block(2 * i, j, 2, 1) - pa.block(2 * i + 2, j - 1, 2, 1)).norm(), 1e-14);
}

TEST(HankelProject, ResidualOrthogonalToHankelSubspace) {
    // Orthogonal projection: <A - P(A), K> = 0 for every block-Hankel K.
    const Matrix a = testutil::random_matrix(6, 5, 19);
    const Matrix r = a - hankel_project(a, 2);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Matrix k = testutil::hankel_oracle(testutil::random_matrix(2, 7, 100 + s), 3);
        EXPECT_NEAR((r.array() * k.array()).sum(), 0.0, 1e-12);
    }
}

TEST(HankelProject, AntiDiagonalMeanByHand) {
    Matrix a(2, 2);
    a << 1, 2, 3, 4; // scalar blocks: anti-diagonal {2, 3} -> 2.5
    Matrix expected(2, 2);
    expected << 1, 2.5, 2.5, 4;
    EXPECT_LT((hankel_project(a, 1) - expected).norm(), 1e-15);
    EXPECT_THROW(hankel_project(Matrix::Ones(3, 2), 2), ParameterError);
}

TEST(LiftedExcitation, LinearLiftOfRandomData) {
    const Matrix u = testutil::random_matrix(1, 50, 20);
    const Matrix x = testutil::random_matrix(2, 50, 21);
    const LiftFunction lift = [](const Vector &v) { return v; };
    EXPECT_TRUE(check_lifted_excitation(u, x, lift, 5));
    const LiftFunction dup = [](const Vector &v) {
        Vector z(3);
        z << v(0), v(1), v(0) + v(1);
        return z;
    };
    EXPECT_FALSE(check_lifted_excitation(u, x, dup, 5));
}
