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

#ifndef QRL_PROGRAM_H
#define QRL_PROGRAM_H

#include <cstdint>
#include <string>
#include <vector>

#include "qrl/lattice.h"

namespace qrl {

struct ProgramOp {
    enum class Kind { Init, Gate, Measure };
    Kind kind = Kind::Init;
    std::vector<int> modes;
    double theta = 0;
    Eigen::Vector2d displacement = Eigen::Vector2d::Zero();
    GateSpec gate;

    static ProgramOp init(int mode, double theta = 0, Eigen::Vector2d disp = Eigen::Vector2d::Zero());
    static ProgramOp apply(const GateSpec &gate, std::vector<int> modes);
    static ProgramOp measure(int mode, double theta);
    bool operator==(const ProgramOp &other) const;
};

struct CircuitProgram {
    std::string name;
    uint64_t seed = 1;
    int n_modes = 0;
    std::vector<ProgramOp> ops;

    /// Throws InvalidArgument naming the offending op index.
    void validate() const;
    bool operator==(const CircuitProgram &other) const;
};

/// Ring frame used by the compiler. With R = N + 1 positions, the mode b_k sits at position
/// (k - 1) mod R and d_k at k mod R, so macronode k acts on positions (k - 1, k). A twisted
/// identity leaves both positions alone and a crossed identity exchanges them.
struct RingLayout {
    int N = 2;

    int positions() const {
        return N + 1;
    }
    /// First macronode of sweep s (sweeps follow the N initialization macronodes).
    int64_t sweep_start(int64_t s) const {
        return N + s * positions();
    }
    /// Macronode acting on positions (p - 1, p) in sweep s; p = 0 is the wrap pair (R - 1, 0).
    int64_t macronode(int64_t sweep, int p) const;
    /// Input tap (initialization macronode and rail) holding position p.
    ModeTap input_tap(int p) const;
    /// Output tap of position p for a readout block starting at macronode j0 (j0 = N - 1 mod R).
    ModeTap output_tap(int64_t j0, int p) const;
    int tap_position(const ModeTap &tap, bool output) const;
    int64_t total_macronodes(int64_t sweeps) const {
        return 2 * (int64_t)N + sweeps * positions();
    }
};

/// Lowers a program onto the lattice. Mode i lives at ring position 2i; single-mode gates use
/// twisted variants on the pair (2i, 2i + 1); a two-mode gate on (i, i + 1) first moves mode i + 1
/// next to mode i with a crossed identity, applies the gate, then moves it back.
AngleSchedule compile(const CircuitProgram &program, const LatticeConfig &config);

/// Largest number of logical modes compile() accepts for this N.
int compile_capacity(int N);

struct RoutingRequest {
    enum class Order { Ascending, Descending, Explicit };
    Order order = Order::Ascending;
    /// Programmed input displacements; the x values are the sort keys.
    std::vector<double> x_amplitudes;
    std::vector<double> p_amplitudes;
    /// For Order::Explicit: permutation[i] = output slot of input mode i.
    std::vector<int> permutation;
    double init_theta = 0;
    double readout_theta = M_PI / 2;

    int n_modes() const;
    /// permutation[i] = output slot of input mode i (stable sort for the amplitude orders).
    std::vector<int> target_permutation() const;
};

struct RoutedSchedule {
    AngleSchedule schedule;
    std::vector<int> permutation;
    /// Odd-even rounds kept (rounds without any exchange are dropped, at least one remains).
    int depth = 0;
    /// Pass/exchange pattern per round: swaps[r][j] exchanges slots j and j + 1.
    std::vector<std::vector<bool>> swaps;
};

/// Odd-even transposition network on slots 0..n-1 realizing the requested permutation.
std::vector<std::vector<bool>> odd_even_network(const std::vector<int> &permutation);
/// Applies a network to an index vector: returns slot -> input index.
std::vector<int> apply_network(const std::vector<std::vector<bool>> &swaps, int n);

RoutedSchedule compile_routing(const RoutingRequest &req, const LatticeConfig &config);

struct RoutingTrace {
    /// permutation[i] = output index reached by input i.
    std::vector<int> permutation;
    /// Teleportations each input went through.
    std::vector<int> transits;
};

/// Symbolic trace of a schedule made only of identity teleports (crossed or twisted), using its
/// input and output taps. Any other operation on a tracked mode raises MisuseError.
RoutingTrace realized_permutation(const AngleSchedule &schedule);

/// Copy of the schedule with every output readout set to theta.
AngleSchedule with_output_readout_angle(const AngleSchedule &schedule, double theta);

std::string serialize_program(const CircuitProgram &program);
CircuitProgram parse_program(const std::string &text);
std::string serialize_schedule(const AngleSchedule &schedule);
AngleSchedule parse_schedule(const std::string &text);
/// JSON map macronode -> role and program op, for visualization.
std::string provenance_json(const AngleSchedule &schedule);

}  // namespace qrl

#endif
