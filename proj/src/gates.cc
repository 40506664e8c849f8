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

#include "qrl/gates.h"

#include <cmath>

#include "qrl/errors.h"

namespace qrl {

namespace {

void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw InvalidArgument(std::string(what) + " must be finite");
    }
}

void check_pair(double diff, const char *what) {
    if (std::abs(std::sin(diff)) < kDegeneracyEps) {
        throw DegenerateTeleportation(std::string(what) + ": angle difference is 0 mod pi");
    }
}

Eigen::Matrix4d block_diag(const Eigen::Matrix2d &a, const Eigen::Matrix2d &b) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.topLeftCorner<2, 2>() = a;
    m.bottomRightCorner<2, 2>() = b;
    return m;
}

// Angles (A, B, A, B) that make both teleportations apply V(phi_plus, phi_minus).
MacronodeAngles crossed_single_mode(double phi_plus, double phi_minus) {
    double a = (phi_plus - phi_minus) / 2;
    double b = (phi_plus + phi_minus) / 2;
    return MacronodeAngles(a, b, a, b);
}

MacronodeAngles with_variant(const MacronodeAngles &angles, Variant v) {
    return v == Variant::Twisted ? angles.swapped_outputs() : angles;
}

void check_params(const GateSpec &gate) {
    if (gate.params.size() != gate_param_count(gate.kind)) {
        throw InvalidArgument(
            "gate '" + std::string(gate_kind_name(gate.kind)) + "' expects " +
            std::to_string(gate_param_count(gate.kind)) + " parameters");
    }
    for (double p : gate.params) {
        require_finite(p, "gate parameter");
    }
    switch (gate.kind) {
        case GateKind::SqueezeNeg90:
        case GateKind::Squeeze45:
            if (gate.params[0] == 0) {
                throw SingularParameter("squeezing ratio t must be nonzero");
            }
            break;
        case GateKind::BeamSplitter:
            if (std::abs(gate.params[0]) > 1) {
                throw InvalidArgument("beam splitter amplitude r must lie in [-1, 1]");
            }
            break;
        default:
            break;
    }
}

}  // namespace

double normalize_angle(double theta) {
    require_finite(theta, "angle");
    double r = std::remainder(theta, 2 * M_PI);
    if (r <= -M_PI) {
        r += 2 * M_PI;
    }
    return r;
}

MacronodeAngles::MacronodeAngles(double a, double b, double c, double d)
    : theta{normalize_angle(a), normalize_angle(b), normalize_angle(c), normalize_angle(d)} {
}

MacronodeAngles MacronodeAngles::shared(double t) {
    return MacronodeAngles(t, t, t, t);
}

bool MacronodeAngles::is_degenerate() const {
    return std::abs(std::sin(theta[1] - theta[0])) < kDegeneracyEps ||
           std::abs(std::sin(theta[3] - theta[2])) < kDegeneracyEps;
}

void MacronodeAngles::check_non_degenerate() const {
    check_pair(theta[1] - theta[0], "thetaB - thetaA");
    check_pair(theta[3] - theta[2], "thetaD - thetaC");
}

MacronodeAngles MacronodeAngles::swapped_outputs() const {
    return MacronodeAngles(theta[1], theta[0], theta[2], theta[3]);
}

Eigen::Matrix2d v_matrix(double phi_plus, double phi_minus) {
    require_finite(phi_plus, "phi_plus");
    require_finite(phi_minus, "phi_minus");
    check_pair(phi_minus, "phi_minus");
    double sp = std::sin(phi_plus);
    double cp = std::cos(phi_plus);
    double cm = std::cos(phi_minus);
    Eigen::Matrix2d v;
    v << sp, cm + cp, cm - cp, sp;
    return v / std::sin(phi_minus);
}

Eigen::Matrix2d l_matrix(double theta1, double theta2) {
    require_finite(theta1, "theta1");
    require_finite(theta2, "theta2");
    check_pair(theta2 - theta1, "theta2 - theta1");
    Eigen::Matrix2d l;
    l << std::cos(theta2), std::cos(theta1), std::sin(theta2), std::sin(theta1);
    return l * (M_SQRT2 / std::sin(theta2 - theta1));
}

Eigen::Matrix4d s_of_theta(const MacronodeAngles &angles) {
    angles.check_non_degenerate();
    const auto &t = angles.theta;
    Eigen::Matrix4d b0 = lift_quadratures(bs2());
    Eigen::Matrix4d mid = block_diag(v_matrix(t[1] + t[0], t[1] - t[0]), v_matrix(t[3] + t[2], t[3] - t[2]));
    return b0.transpose() * mid * b0;
}

Eigen::Matrix4d t_of_theta(const MacronodeAngles &angles) {
    angles.check_non_degenerate();
    const auto &t = angles.theta;
    Eigen::Matrix4d b0 = lift_quadratures(bs2());
    return b0.transpose() * block_diag(l_matrix(t[0], t[1]), l_matrix(t[2], t[3]));
}

Eigen::Matrix4d init_feedforward(double theta) {
    require_finite(theta, "theta");
    Eigen::Matrix2d m;
    m << -std::sin(theta), 0, std::cos(theta), 0;
    Eigen::Matrix4d k = kron(Eigen::Matrix2d::Identity(), m);
    return k * four_splitter().transpose();
}

namespace {

// diag(sin th) B e_j e_i^T + diag(cos th) B e_j e_{i+1}^T, with i = 2*rail, j = 2*rail+1.
Eigen::Matrix4d rail_projector(const MacronodeAngles &current, int rail) {
    Eigen::Matrix4d b = four_splitter();
    Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
    int mode = 2 * rail + 1;  // b or d in (a, b, c, d)
    for (int port = 0; port < 4; port++) {
        out(port, 2 * rail) = std::sin(current.theta[port]) * b(port, mode);
        out(port, 2 * rail + 1) = std::cos(current.theta[port]) * b(port, mode);
    }
    return out;
}

}  // namespace

Eigen::Matrix4d displacement_matrix(const MacronodeAngles &current) {
    return rail_projector(current, 0) + rail_projector(current, 1);
}

FeedforwardSet feedforward_matrices(
    const MacronodeAngles &current, const Eigen::Matrix4d *e_prev1, const Eigen::Matrix4d *e_prevN) {
    if (e_prev1 == nullptr || e_prevN == nullptr) {
        throw ScheduleOrderError("feedforward source macronode has no resolved E matrix");
    }
    FeedforwardSet ff;
    Eigen::Matrix4d p1 = rail_projector(current, 0);
    Eigen::Matrix4d p2 = rail_projector(current, 1);
    ff.F = p1 * *e_prev1;
    ff.G = p2 * *e_prevN;
    ff.H = p1 + p2;
    return ff;
}

GateSpec GateSpec::rotation(double psi, Variant v) {
    return GateSpec{GateKind::Rotation, {psi}, v};
}
GateSpec GateSpec::x_shear(double kappa, Variant v) {
    return GateSpec{GateKind::XShear, {kappa}, v};
}
GateSpec GateSpec::p_shear(double eta, Variant v) {
    return GateSpec{GateKind::PShear, {eta}, v};
}
GateSpec GateSpec::squeeze_neg90(double t, Variant v) {
    return GateSpec{GateKind::SqueezeNeg90, {t}, v};
}
GateSpec GateSpec::squeeze45(double t, Variant v) {
    return GateSpec{GateKind::Squeeze45, {t}, v};
}
GateSpec GateSpec::beam_splitter(double r, double psi) {
    return GateSpec{GateKind::BeamSplitter, {r, psi}, Variant::Crossed};
}
GateSpec GateSpec::generalized_cz(double g, double h) {
    return GateSpec{GateKind::GeneralizedCZ, {g, h}, Variant::Crossed};
}
GateSpec GateSpec::crossed_teleport() {
    return GateSpec{GateKind::CrossedTeleport, {}, Variant::Crossed};
}
GateSpec GateSpec::twisted_teleport() {
    return GateSpec{GateKind::TwistedTeleport, {}, Variant::Twisted};
}
GateSpec GateSpec::arbitrary_single_mode(double alpha, double lambda, double beta, Variant v) {
    return GateSpec{GateKind::ArbitrarySingleMode, {alpha, lambda, beta}, v};
}

bool GateSpec::is_single_mode() const {
    return kind != GateKind::BeamSplitter && kind != GateKind::GeneralizedCZ;
}

int GateSpec::n_macronodes() const {
    return kind == GateKind::ArbitrarySingleMode ? 2 : 1;
}

std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::Rotation:
            return "rotation";
        case GateKind::XShear:
            return "xshear";
        case GateKind::PShear:
            return "pshear";
        case GateKind::SqueezeNeg90:
            return "squeeze_neg90";
        case GateKind::Squeeze45:
            return "squeeze45";
        case GateKind::BeamSplitter:
            return "bs";
        case GateKind::GeneralizedCZ:
            return "gcz";
        case GateKind::CrossedTeleport:
            return "crossed";
        case GateKind::TwistedTeleport:
            return "twisted";
        case GateKind::ArbitrarySingleMode:
            return "arbitrary";
    }
    throw InvalidArgument("unknown gate kind");
}

GateKind gate_kind_from_name(std::string_view name) {
    for (GateKind k : {GateKind::Rotation, GateKind::XShear, GateKind::PShear, GateKind::SqueezeNeg90,
                       GateKind::Squeeze45, GateKind::BeamSplitter, GateKind::GeneralizedCZ,
                       GateKind::CrossedTeleport, GateKind::TwistedTeleport, GateKind::ArbitrarySingleMode}) {
        if (gate_kind_name(k) == name) {
            return k;
        }
    }
    throw InvalidArgument("unknown gate name '" + std::string(name) + "'");
}

std::vector<std::string> gate_param_names(GateKind kind) {
    switch (kind) {
        case GateKind::Rotation:
            return {"psi"};
        case GateKind::XShear:
            return {"kappa"};
        case GateKind::PShear:
            return {"eta"};
        case GateKind::SqueezeNeg90:
        case GateKind::Squeeze45:
            return {"t"};
        case GateKind::BeamSplitter:
            return {"r", "psi"};
        case GateKind::GeneralizedCZ:
            return {"g", "h"};
        case GateKind::CrossedTeleport:
        case GateKind::TwistedTeleport:
            return {};
        case GateKind::ArbitrarySingleMode:
            return {"alpha", "lambda", "beta"};
    }
    throw InvalidArgument("unknown gate kind");
}

size_t gate_param_count(GateKind kind) {
    return gate_param_names(kind).size();
}

std::vector<MacronodeAngles> angles_for(const GateSpec &gate) {
    check_params(gate);
    const auto &p = gate.params;
    MacronodeAngles base;
    switch (gate.kind) {
        case GateKind::Rotation:
            base = crossed_single_mode(p[0] + M_PI / 2, M_PI / 2);
            break;
        case GateKind::XShear: {
            double a = std::atan(p[0]);
            base = crossed_single_mode(M_PI / 2 + a, M_PI / 2 - a);
            break;
        }
        case GateKind::PShear: {
            double c = std::atan2(1.0, p[0]);
            base = crossed_single_mode(c, c);
            break;
        }
        case GateKind::SqueezeNeg90:
            base = crossed_single_mode(0, 2 * std::atan(p[0]));
            break;
        case GateKind::Squeeze45:
            base = crossed_single_mode(M_PI / 2, 2 * std::atan(p[0]));
            break;
        case GateKind::BeamSplitter: {
            double u = p[1] / 2 + std::acos(p[0]) / 2;
            double w = p[1] / 2 - std::acos(p[0]) / 2;
            base = MacronodeAngles(u, u + M_PI / 2, w, w + M_PI / 2);
            break;
        }
        case GateKind::GeneralizedCZ:
            base = MacronodeAngles(std::atan(p[1] - p[0] / 2), M_PI / 2, std::atan(p[1] + p[0] / 2), M_PI / 2);
            break;
        case GateKind::CrossedTeleport:
            return {crossed_single_mode(M_PI / 2, M_PI / 2)};
        case GateKind::TwistedTeleport:
            return {crossed_single_mode(M_PI / 2, M_PI / 2).swapped_outputs()};
        case GateKind::ArbitrarySingleMode: {
            double alpha = p[0];
            double lambda = p[1];
            double beta = p[2];
            MacronodeAngles first = crossed_single_mode(beta - alpha, M_PI / 2);
            MacronodeAngles second = crossed_single_mode(2 * alpha + M_PI, 2 * std::atan(std::exp(lambda)));
            return {with_variant(first, gate.variant), with_variant(second, gate.variant)};
        }
    }
    return {with_variant(base, gate.variant)};
}

Eigen::Matrix2d analytic_single_mode_matrix(const GateSpec &gate) {
    check_params(gate);
    const auto &p = gate.params;
    Eigen::Matrix2d m;
    switch (gate.kind) {
        case GateKind::Rotation:
            return rotation_matrix(p[0]);
        case GateKind::XShear:
            m << 1, 0, 2 * p[0], 1;
            return m;
        case GateKind::PShear:
            m << 1, 2 * p[0], 0, 1;
            return m;
        case GateKind::SqueezeNeg90:
            m << 0, 1 / p[0], -p[0], 0;
            return m;
        case GateKind::Squeeze45: {
            double t = p[0];
            m << t + 1 / t, -t + 1 / t, -t + 1 / t, t + 1 / t;
            return m / 2;
        }
        case GateKind::CrossedTeleport:
        case GateKind::TwistedTeleport:
            return Eigen::Matrix2d::Identity();
        case GateKind::ArbitrarySingleMode:
            return rotation_matrix(p[0]) * squeeze_matrix(std::exp(p[1])) * rotation_matrix(p[2]);
        default:
            throw InvalidArgument("gate '" + std::string(gate_kind_name(gate.kind)) + "' is not single-mode");
    }
}

Eigen::Matrix4d analytic_gate_matrix(const GateSpec &gate) {
    check_params(gate);
    const auto &p = gate.params;
    Eigen::Matrix4d m;
    switch (gate.kind) {
        case GateKind::BeamSplitter: {
            double r = p[0];
            double s = std::sqrt(1 - r * r);
            Eigen::Matrix2d b2;
            b2 << r, -s, s, r;
            Eigen::Matrix2d i2 = Eigen::Matrix2d::Identity();
            Eigen::Matrix2d rot = rotation_matrix(p[1]);
            m = block_diag(rot, rot) * block_diag(i2, rotation_matrix(-M_PI / 2)) * lift_quadratures(b2) *
                block_diag(i2, rotation_matrix(M_PI / 2));
            break;
        }
        case GateKind::GeneralizedCZ: {
            double g = p[0];
            double h = p[1];
            m << 1, 0, 0, 0, 2 * h, 1, g, 0, 0, 0, 1, 0, g, 0, 2 * h, 1;
            break;
        }
        case GateKind::TwistedTeleport:
            return mode_swap();
        case GateKind::ArbitrarySingleMode: {
            // Both macronodes carry the variant, so any output swaps cancel.
            Eigen::Matrix2d s = analytic_single_mode_matrix(gate);
            return block_diag(s, s);
        }
        default: {
            Eigen::Matrix2d s = analytic_single_mode_matrix(gate);
            m = block_diag(s, s);
            break;
        }
    }
    return gate.variant == Variant::Twisted ? Eigen::Matrix4d(mode_swap() * m) : m;
}

}  // namespace qrl
