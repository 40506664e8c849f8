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

#ifndef QRL_GATES_H
#define QRL_GATES_H

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qrl/symplectic.h"

namespace qrl {

constexpr double kDegeneracyEps = 1e-6;

/// Maps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Homodyne angles (A, B, C, D) of one macronode. Stored normalized.
struct MacronodeAngles {
    std::array<double, 4> theta{};

    MacronodeAngles() = default;
    MacronodeAngles(double a, double b, double c, double d);

    /// All four ports at one angle, as used by readout and initialization.
    static MacronodeAngles shared(double t);

    bool is_degenerate() const;
    /// Throws DegenerateTeleportation unless both pairs are usable for an operation.
    void check_non_degenerate() const;
    /// The same angles with A and B exchanged, which swaps the two outputs.
    MacronodeAngles swapped_outputs() const;

    bool operator==(const MacronodeAngles &other) const = default;
};

Eigen::Matrix2d v_matrix(double phi_plus, double phi_minus);
Eigen::Matrix2d l_matrix(double theta1, double theta2);
Eigen::Matrix4d s_of_theta(const MacronodeAngles &angles);
Eigen::Matrix4d t_of_theta(const MacronodeAngles &angles);

/// Feedforward E of an initialization macronode measured at one shared angle.
Eigen::Matrix4d init_feedforward(double theta);

struct FeedforwardSet {
    Eigen::Matrix4d F = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d H = Eigen::Matrix4d::Zero();
};

/// F_k, G_k, H_k for a macronode measured at `current`, given the feedforward E of its two
/// source macronodes (k-1 and k-N). A null source pointer means the source was never resolved.
FeedforwardSet feedforward_matrices(
    const MacronodeAngles &current, const Eigen::Matrix4d *e_prev1, const Eigen::Matrix4d *e_prevN);

/// H_k alone (depends only on the current angles).
Eigen::Matrix4d displacement_matrix(const MacronodeAngles &current);

enum class GateKind {
    Rotation,
    XShear,
    PShear,
    SqueezeNeg90,
    Squeeze45,
    BeamSplitter,
    GeneralizedCZ,
    CrossedTeleport,
    TwistedTeleport,
    ArbitrarySingleMode,
};

enum class Variant { Crossed, Twisted };

struct GateSpec {
    GateKind kind = GateKind::CrossedTeleport;
    // Rotation: psi. XShear: kappa. PShear: eta. SqueezeNeg90 / Squeeze45: t.
    // BeamSplitter: r, psi. GeneralizedCZ: g, h. ArbitrarySingleMode: alpha, lambda, beta.
    std::vector<double> params;
    Variant variant = Variant::Crossed;

    static GateSpec rotation(double psi, Variant v = Variant::Crossed);
    static GateSpec x_shear(double kappa, Variant v = Variant::Crossed);
    static GateSpec p_shear(double eta, Variant v = Variant::Crossed);
    static GateSpec squeeze_neg90(double t, Variant v = Variant::Crossed);
    static GateSpec squeeze45(double t, Variant v = Variant::Crossed);
    static GateSpec beam_splitter(double r, double psi);
    static GateSpec generalized_cz(double g, double h);
    static GateSpec crossed_teleport();
    static GateSpec twisted_teleport();
    static GateSpec arbitrary_single_mode(double alpha, double lambda, double beta, Variant v = Variant::Crossed);

    bool is_single_mode() const;
    int n_macronodes() const;
};

/// Stable lowercase names used by the text formats ("rotation", "gcz", ...).
std::string_view gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(std::string_view name);
size_t gate_param_count(GateKind kind);
std::vector<std::string> gate_param_names(GateKind kind);

/// Homodyne angles realizing the gate; two entries for ArbitrarySingleMode (apply [0] first).
std::vector<MacronodeAngles> angles_for(const GateSpec &gate);

/// The 2x2 single-mode matrix of a single-mode gate, from its closed form.
Eigen::Matrix2d analytic_single_mode_matrix(const GateSpec &gate);

/// Closed-form 4x4 matrix the gate's macronode(s) should realize, including the output swap of
/// the twisted variant. Independent of angles_for.
Eigen::Matrix4d analytic_gate_matrix(const GateSpec &gate);

}  // namespace qrl

#endif
