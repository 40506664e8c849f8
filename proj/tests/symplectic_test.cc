// Copyright 2026 The QRL Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qrl/symplectic.h"

#include <cmath>
#include <gtest/gtest.h>
#include <random>

#include "qrl/errors.h"

using namespace qrl;

TEST(symplectic, rotation_matrix_values) {
    EXPECT_LT(max_abs_diff(rotation_matrix(0), Eigen::Matrix2d::Identity()), 1e-15);
    Eigen::Matrix2d quarter;
    quarter << 0, -1, 1, 0;
    EXPECT_LT(max_abs_diff(rotation_matrix(M_PI / 2), quarter), 1e-15);
    EXPECT_LT(max_abs_diff(rotation_matrix(0.3) * rotation_matrix(0.7), rotation_matrix(1.0)), 1e-15);
    EXPECT_NEAR(rotation_matrix(1.234).determinant(), 1, 1e-15);
    EXPECT_THROW(rotation_matrix(NAN), InvalidArgument);
    EXPECT_THROW(rotation_matrix(INFINITY), InvalidArgument);
}

TEST(symplectic, squeeze_matrix_values) {
    EXPECT_LT(max_abs_diff(squeeze_matrix(1), Eigen::Matrix2d::Identity()), 1e-15);
    Eigen::Matrix2d two;
    two << 2, 0, 0, 0.5;
    EXPECT_LT(max_abs_diff(squeeze_matrix(2), two), 1e-15);
    EXPECT_LT(max_abs_diff(squeeze_matrix(3) * squeeze_matrix(1.0 / 3), Eigen::Matrix2d::Identity()), 1e-15);
    EXPECT_THROW(squeeze_matrix(0), SingularParameter);
}

TEST(symplectic, bs2_values) {
    Eigen::Matrix2d b0 = bs2();
    EXPECT_LT(max_abs_diff(b0 * b0.transpose(), Eigen::Matrix2d::Identity()), 1e-15);
    EXPECT_NEAR(b0.determinant(), 1, 1e-15);
    Eigen::Vector2d v(M_SQRT1_2, M_SQRT1_2);
    Eigen::Vector2d out = b0 * v;
    EXPECT_NEAR(out[0], 0, 1e-15);
    EXPECT_NEAR(out[1], 1, 1e-15);
}

TEST(symplectic, four_splitter_matches_literal) {
    Eigen::Matrix4d lit;
    lit << 1, 1, -1, -1, -1, 1, 1, -1, 1, 1, 1, 1, -1, 1, -1, 1;
    lit /= 2;
    Eigen::Matrix4d b = four_splitter();
    EXPECT_LT(max_abs_diff(b, lit), 1e-15);
    EXPECT_LT(max_abs_diff(b * b.transpose(), Eigen::Matrix4d::Identity()), 1e-15);
    EXPECT_LT(max_abs_diff(b.inverse(), b.transpose()), 1e-12);
    Eigen::Vector4d ones = Eigen::Vector4d::Ones();
    EXPECT_LT(max_abs_diff(b * ones, Eigen::Vector4d(0, 0, 2, 0)), 1e-15);
    EXPECT_TRUE(is_symplectic(lift_quadratures(b), 1e-12));
}

TEST(symplectic, is_symplectic_cases) {
    EXPECT_TRUE(is_symplectic(Eigen::Matrix4d::Identity(), 1e-12));
    EXPECT_TRUE(is_symplectic(rotation_matrix(0.4), 1e-12));
    Eigen::Matrix2d bad;
    bad << 2, 0, 0, 1;
    EXPECT_FALSE(is_symplectic(bad, 1e-12));
    EXPECT_THROW(is_symplectic(Eigen::Matrix3d::Identity(), 1e-12), InvalidArgument);
}

TEST(symplectic, form_properties) {
    PhaseSpaceMatrix om = symplectic_form(3);
    EXPECT_LT(max_abs_diff(om * om, -PhaseSpaceMatrix::Identity(6, 6)), 1e-15);
    EXPECT_LT(max_abs_diff(om.transpose(), -om), 1e-15);
}

TEST(symplectic, random_rotations_symplectic) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    for (int i = 0; i < 1000; i++) {
        ASSERT_TRUE(is_symplectic(rotation_matrix(u(rng)), 1e-12));
    }
}

TEST(symplectic, squeeze_log_grid_symplectic) {
    for (int i = 0; i <= 20; i++) {
        double t = std::pow(10.0, -1 + 0.1 * i);
        ASSERT_TRUE(is_symplectic(squeeze_matrix(t), 1e-12)) << t;
    }
}

TEST(symplectic, direct_sum_and_kron) {
    EXPECT_EQ(max_abs_diff(direct_sum(Eigen::Matrix2d::Identity(), Eigen::Matrix2d::Identity()),
                           Eigen::Matrix4d::Identity()), 0);
    Eigen::Matrix2d b0 = bs2();
    PhaseSpaceMatrix k = kron(b0, Eigen::Matrix2d::Identity());
    ASSERT_EQ(k.rows(), 4);
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            EXPECT_EQ(k(2 * i, 2 * j), b0(i, j));
            EXPECT_EQ(k(2 * i + 1, 2 * j + 1), b0(i, j));
            EXPECT_EQ(k(2 * i, 2 * j + 1), 0);
        }
    }
    PhaseSpaceMatrix k8 = kron(lift_quadratures(b0), Eigen::Matrix2d::Identity());
    EXPECT_EQ(k8.rows(), 8);
    PhaseSpaceMatrix prod = kron(Eigen::Matrix2d::Identity(), b0.inverse()) * kron(Eigen::Matrix2d::Identity(), b0);
    EXPECT_LT(max_abs_diff(prod, Eigen::Matrix4d::Identity()), 1e-15);
}
