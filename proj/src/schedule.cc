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

#include "qrl/schedule.h"

#include <algorithm>

#include "qrl/errors.h"

namespace qrl {

MacronodeRole MacronodeRole::operate(const MacronodeAngles &angles, const Eigen::Vector4d &disp) {
    angles.check_non_degenerate();
    return MacronodeRole{Role::Operate, angles, disp};
}

MacronodeRole MacronodeRole::readout(double theta, const Eigen::Vector4d &disp) {
    return MacronodeRole{Role::Readout, MacronodeAngles::shared(theta), disp};
}

MacronodeRole MacronodeRole::initialize(double theta, const Eigen::Vector4d &disp) {
    return MacronodeRole{Role::Initialize, MacronodeAngles::shared(theta), disp};
}

Eigen::Matrix4d MacronodeRole::feedforward_E() const {
    switch (role) {
        case Role::Operate:
            return t_of_theta(angles);
        case Role::Initialize:
            return init_feedforward(angles.theta[0]);
        case Role::Readout:
            break;
    }
    return Eigen::Matrix4d::Zero();
}

double MacronodeRole::shared_theta() const {
    if (role == Role::Operate) {
        throw MisuseError("operate macronodes have no shared angle");
    }
    return angles.theta[0];
}

bool MacronodeRole::operator==(const MacronodeRole &other) const {
    return role == other.role && angles == other.angles && displacement == other.displacement;
}

void AngleSchedule::validate() const {
    if (N < 2) {
        throw InvalidArgument("schedule N must be at least 2");
    }
    if (!provenance.empty() && provenance.size() != roles.size()) {
        throw InvalidArgument("provenance list length differs from the macronode count");
    }
    for (size_t k = 0; k < roles.size(); k++) {
        const auto &r = roles[k];
        if (r.role == Role::Operate) {
            if (r.angles.is_degenerate()) {
                throw DegenerateTeleportation("macronode " + std::to_string(k) + " has degenerate angles");
            }
        } else {
            const auto &t = r.angles.theta;
            if (t[0] != t[1] || t[0] != t[2] || t[0] != t[3]) {
                throw InvalidArgument("macronode " + std::to_string(k) + ": readout/initialize needs one shared angle");
            }
        }
        if (!r.displacement.allFinite()) {
            throw InvalidArgument("macronode " + std::to_string(k) + ": displacement must be finite");
        }
    }
    for (const auto &tap : inputs) {
        if (tap.macronode < 0 || tap.macronode >= size() || roles[tap.macronode].role != Role::Initialize) {
            throw InvalidArgument("input tap at macronode " + std::to_string(tap.macronode) + " is not an initialization");
        }
    }
    for (const auto &tap : outputs) {
        if (tap.macronode < 0 || tap.macronode >= size() || roles[tap.macronode].role != Role::Readout) {
            throw InvalidArgument("output tap at macronode " + std::to_string(tap.macronode) + " is not a readout");
        }
    }
}

void AngleSchedule::push(const MacronodeRole &role, std::string prov) {
    roles.push_back(role);
    if (!prov.empty() && provenance.size() < roles.size() - 1) {
        provenance.resize(roles.size() - 1);
    }
    if (!provenance.empty() || !prov.empty()) {
        provenance.push_back(std::move(prov));
    }
}

bool AngleSchedule::operator==(const AngleSchedule &other) const {
    auto prov_equal = [&]() {
        size_t n = std::max(provenance.size(), other.provenance.size());
        for (size_t k = 0; k < n; k++) {
            const std::string &a = k < provenance.size() ? provenance[k] : std::string();
            const std::string &b = k < other.provenance.size() ? other.provenance[k] : std::string();
            if (a != b) {
                return false;
            }
        }
        return true;
    };
    return N == other.N && roles == other.roles && inputs == other.inputs && outputs == other.outputs && prov_equal();
}

}  // namespace qrl
