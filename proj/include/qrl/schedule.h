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

#ifndef QRL_SCHEDULE_H
#define QRL_SCHEDULE_H

#include <cstdint>
#include <string>
#include <vector>

#include "qrl/gates.h"

namespace qrl {

enum class Role { Operate, Readout, Initialize };

/// What one macronode does. The displacement is added to the modes this macronode feeds,
/// (b, k+1) and (d, k+N), in the order (x_b, p_b, x_d, p_d).
struct MacronodeRole {
    Role role = Role::Readout;
    MacronodeAngles angles = MacronodeAngles::shared(0);
    Eigen::Vector4d displacement = Eigen::Vector4d::Zero();

    static MacronodeRole operate(const MacronodeAngles &angles, const Eigen::Vector4d &disp = Eigen::Vector4d::Zero());
    static MacronodeRole readout(double theta, const Eigen::Vector4d &disp = Eigen::Vector4d::Zero());
    static MacronodeRole initialize(double theta, const Eigen::Vector4d &disp = Eigen::Vector4d::Zero());

    /// Feedforward coefficient matrix E of this macronode.
    Eigen::Matrix4d feedforward_E() const;
    /// The common angle of a readout or initialization macronode.
    double shared_theta() const;
    bool operator==(const MacronodeRole &other) const;
};

enum class Rail { B = 1, D = 3 };

/// A logical mode's attachment to the lattice. For inputs: the initialization macronode and the
/// rail it feeds ((b, k+1) or (d, k+N)). For outputs: the readout macronode and the computational
/// mode read there.
struct ModeTap {
    int64_t macronode = 0;
    Rail rail = Rail::B;
    bool operator==(const ModeTap &other) const = default;
};

struct AngleSchedule {
    int N = 2;
    std::vector<MacronodeRole> roles;
    /// Free-form provenance per macronode (program op that produced it); may be empty strings.
    std::vector<std::string> provenance;
    std::vector<ModeTap> inputs;
    std::vector<ModeTap> outputs;

    int64_t size() const {
        return (int64_t)roles.size();
    }
    /// Checks operate roles are non-degenerate and taps point at compatible roles.
    void validate() const;
    void push(const MacronodeRole &role, std::string prov = {});
    bool operator==(const AngleSchedule &other) const;
};

}  // namespace qrl

#endif
