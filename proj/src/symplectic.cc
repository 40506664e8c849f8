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

#include "qrl/errors.h"

namespace qrl {

Eigen::Matrix2d rotation_matrix(double theta) {
    if (!std::isfinite(theta)) {
        throw InvalidArgument("rotation angle must be finite");
    }
    double c = std::cos(theta);
    double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, -s, s, c;
    return r;
}

Eigen::Matrix2d squeeze_matrix(double t) {
    if (!std::isfinite(t)) {
        throw InvalidArgument("squeeze ratio must be finite");
    }
    if (t == 0) {
        throw SingularParameter("squeeze ratio t=0 is singular");
    }
    Eigen::Matrix2d m;
    m << t, 0, 0, 1 / t;
    return m;
}

Eigen::Matrix2d bs2() {
    Eigen::Matrix2d b;
    b << 1, -1, 1, 1;
    return b * M_SQRT1_2;
}

Eigen::Matrix4d four_splitter() {
    // (B0 (x) I2)(I2 (x) B0^-1), built from the pieces rather than typed in.
    Eigen::Matrix2d b0 = bs2();
    Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
    Eigen::Matrix4d b = kron(b0, i2) * kron(i2, b0.transpose());
    return b;
}

PhaseSpaceMatrix lift_quadratures(const Eigen::MatrixXd &m) {
    return kron(m, Eigen::Matrix2d::Identity());
}

PhaseSpaceMatrix symplectic_form(int n_modes) {
    if (n_modes <= 0) {
        throw InvalidArgument("symplectic form needs at least one mode");
    }
    PhaseSpaceMatrix omega = PhaseSpaceMatrix::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; k++) {
        omega(2 * k, 2 * k + 1) = 1;
        omega(2 * k + 1, 2 * k) = -1;
    }
    return omega;
}

bool is_symplectic(const PhaseSpaceMatrix &m, double tol) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0) {
        throw InvalidArgument("is_symplectic needs a square matrix of even dimension");
    }
    if (!all_finite(m)) {
        return false;
    }
    PhaseSpaceMatrix omega = symplectic_form((int)m.rows() / 2);
    return max_abs_diff(m * omega * m.transpose(), omega) <= tol;
}

PhaseSpaceMatrix direct_sum(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
    PhaseSpaceMatrix out = PhaseSpaceMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

PhaseSpaceMatrix kron(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
    PhaseSpaceMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Eigen::Matrix4d mode_swap() {
    Eigen::Matrix2d x;
    x << 0, 1, 1, 0;
    return lift_quadratures(x);
}

double max_abs_diff(const Eigen::MatrixXd &a, const Eigen::MatrixXd &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidArgument("shape mismatch");
    }
    if (a.size() == 0) {
        return 0;
    }
    return (a - b).cwiseAbs().maxCoeff();
}

bool all_finite(const Eigen::MatrixXd &m) {
    return m.allFinite();
}

}  // namespace qrl
