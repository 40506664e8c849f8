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

#ifndef QRL_SYMPLECTIC_H
#define QRL_SYMPLECTIC_H

#include <Eigen/Dense>

namespace qrl {

// Quadratures are ordered (x1, p1, x2, p2, ...) everywhere. hbar = 1, vacuum variance 1/2.
using PhaseSpaceMatrix = Eigen::MatrixXd;
using PhaseSpaceVector = Eigen::VectorXd;

constexpr double kVacuumVariance = 0.5;

Eigen::Matrix2d rotation_matrix(double theta);
Eigen::Matrix2d squeeze_matrix(double t);

/// 50:50 beam splitter on two mode amplitudes.
Eigen::Matrix2d bs2();

/// Four-splitter acting on mode labels (a, b, c, d). Use lift_quadratures for the 8x8 form.
Eigen::Matrix4d four_splitter();

/// M (x) I2: applies a mode-label matrix to both quadratures.
PhaseSpaceMatrix lift_quadratures(const Eigen::MatrixXd &m);

PhaseSpaceMatrix symplectic_form(int n_modes);
bool is_symplectic(const PhaseSpaceMatrix &m, double tol);

PhaseSpaceMatrix direct_sum(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);
PhaseSpaceMatrix kron(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);

/// Exchanges the two modes of a 4x4 quadrature matrix: X (x) I2.
Eigen::Matrix4d mode_swap();

double max_abs_diff(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b);
bool all_finite(const Eigen::MatrixXd &m);

}  // namespace qrl

#endif
