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

#include "qrl/program.h"

#include <algorithm>
#include <cstdlib>
#include <json.hpp>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "qrl/errors.h"
#include "qrl/util.h"

namespace qrl {

ProgramOp ProgramOp::init(int mode, double theta, Eigen::Vector2d disp) {
    ProgramOp op;
    op.kind = Kind::Init;
    op.modes = {mode};
    op.theta = theta;
    op.displacement = disp;
    return op;
}

ProgramOp ProgramOp::apply(const GateSpec &gate, std::vector<int> modes) {
    ProgramOp op;
    op.kind = Kind::Gate;
    op.gate = gate;
    op.modes = std::move(modes);
    return op;
}

ProgramOp ProgramOp::measure(int mode, double theta) {
    ProgramOp op;
    op.kind = Kind::Measure;
    op.modes = {mode};
    op.theta = theta;
    return op;
}

bool ProgramOp::operator==(const ProgramOp &o) const {
    if (kind != o.kind || modes != o.modes) {
        return false;
    }
    if (kind == Kind::Gate) {
        return gate.kind == o.gate.kind && gate.params == o.gate.params;
    }
    return theta == o.theta && displacement == o.displacement;
}

bool CircuitProgram::operator==(const CircuitProgram &o) const {
    return name == o.name && seed == o.seed && n_modes == o.n_modes && ops == o.ops;
}

void CircuitProgram::validate() const {
    if (n_modes < 1) {
        throw InvalidArgument("program needs at least one mode");
    }
    enum class State { Fresh, Live, Measured };
    std::vector<State> st(n_modes, State::Fresh);
    for (size_t i = 0; i < ops.size(); i++) {
        const auto &op = ops[i];
        std::string where = "op " + std::to_string(i) + ": ";
        for (int m : op.modes) {
            if (m < 0 || m >= n_modes) {
                throw InvalidArgument(where + "mode " + std::to_string(m) + " out of range");
            }
        }
        switch (op.kind) {
            case ProgramOp::Kind::Init:
                if (op.modes.size() != 1) {
                    throw InvalidArgument(where + "init takes one mode");
                }
                if (st[op.modes[0]] != State::Fresh) {
                    throw InvalidArgument(where + "mode " + std::to_string(op.modes[0]) + " initialized twice");
                }
                if (!std::isfinite(op.theta) || !op.displacement.allFinite()) {
                    throw InvalidArgument(where + "init parameters must be finite");
                }
                st[op.modes[0]] = State::Live;
                break;
            case ProgramOp::Kind::Gate: {
                size_t want = op.gate.is_single_mode() ? 1 : 2;
                if (op.modes.size() != want) {
                    throw InvalidArgument(
                        where + std::string(gate_kind_name(op.gate.kind)) + " acts on " + std::to_string(want) +
                        " mode(s)");
                }
                if (want == 2 && op.modes[0] == op.modes[1]) {
                    throw InvalidArgument(where + "two-mode gate needs two distinct modes");
                }
                if (op.gate.params.size() != gate_param_count(op.gate.kind)) {
                    throw InvalidArgument(where + "wrong parameter count for " + std::string(gate_kind_name(op.gate.kind)));
                }
                if (op.gate.kind == GateKind::TwistedTeleport) {
                    throw InvalidArgument(where + "mode exchanges belong to routing requests, not programs");
                }
                for (int m : op.modes) {
                    if (st[m] != State::Live) {
                        throw InvalidArgument(
                            where + "mode " + std::to_string(m) + (st[m] == State::Fresh ? " used before init" : " used after measure"));
                    }
                }
                try {
                    angles_for(op.gate);
                } catch (const std::exception &e) {
                    throw InvalidArgument(where + e.what());
                }
                break;
            }
            case ProgramOp::Kind::Measure:
                if (op.modes.size() != 1) {
                    throw InvalidArgument(where + "measure takes one mode");
                }
                if (st[op.modes[0]] != State::Live) {
                    throw InvalidArgument(where + "mode " + std::to_string(op.modes[0]) + " is not live");
                }
                if (!std::isfinite(op.theta)) {
                    throw InvalidArgument(where + "measurement angle must be finite");
                }
                st[op.modes[0]] = State::Measured;
                break;
        }
    }
    for (int m = 0; m < n_modes; m++) {
        if (st[m] != State::Measured) {
            throw InvalidArgument("mode " + std::to_string(m) + " is never measured");
        }
    }
}

namespace {

int mod(int64_t a, int64_t m) {
    return (int)(((a % m) + m) % m);
}

MacronodeAngles crossed_identity() {
    return angles_for(GateSpec::crossed_teleport())[0];
}

MacronodeAngles twisted_identity() {
    return angles_for(GateSpec::twisted_teleport())[0];
}

}  // namespace

int64_t RingLayout::macronode(int64_t sweep, int p) const {
    return sweep_start(sweep) + mod(p + 1, positions());
}

ModeTap RingLayout::input_tap(int p) const {
    if (p == N - 1) {
        return {N - 1, Rail::B};
    }
    return {mod(p + 1, positions()), Rail::D};
}

ModeTap RingLayout::output_tap(int64_t j0, int p) const {
    if (p == N - 1) {
        return {j0, Rail::B};
    }
    return {j0 + mod(p + 1, positions()), Rail::D};
}

int RingLayout::tap_position(const ModeTap &tap, bool output) const {
    int R = positions();
    if (output) {
        return tap.rail == Rail::B ? mod(tap.macronode - 1, R) : mod(tap.macronode, R);
    }
    return tap.rail == Rail::B ? mod(tap.macronode, R) : mod(tap.macronode - 1, R);
}

int compile_capacity(int N) {
    return (N + 1) / 2;
}

namespace {

struct Placement {
    MacronodeAngles angles;
    std::string prov;
};

// Initialization block, sweeps of operations (idle pairs get twisted identities) and readout block.
AngleSchedule assemble(
    const RingLayout &lay, int64_t sweeps, const std::map<std::pair<int64_t, int>, Placement> &placed,
    const std::vector<int> &mode_position, const std::vector<double> &init_theta,
    const std::vector<Eigen::Vector2d> &init_disp, const std::vector<double> &measure_theta) {
    int N = lay.N;
    int R = lay.positions();
    AngleSchedule s;
    s.N = N;
    std::vector<int> at(R, -1);
    for (size_t i = 0; i < mode_position.size(); i++) {
        at[mode_position[i]] = (int)i;
    }
    for (int k = 0; k < N; k++) {
        // Macronode k feeds position k through b (last one only) and position k - 1 through d.
        double theta = 0;
        Eigen::Vector4d disp = Eigen::Vector4d::Zero();
        std::string prov = "init";
        int pd = mod(k - 1, R);
        if (at[pd] >= 0) {
            theta = init_theta[at[pd]];
            disp.tail<2>() = init_disp[at[pd]];
            prov += " mode " + std::to_string(at[pd]);
        }
        if (k == N - 1 && at[k] >= 0) {
            theta = init_theta[at[k]];
            disp.head<2>() = init_disp[at[k]];
            prov += " mode " + std::to_string(at[k]);
        }
        s.push(MacronodeRole::initialize(theta, disp), prov);
    }
    MacronodeAngles idle = twisted_identity();
    for (int64_t sw = 0; sw < sweeps; sw++) {
        for (int o = 0; o < R; o++) {
            int p = mod(o - 1, R);
            auto it = placed.find({sw, p});
            if (it == placed.end()) {
                s.push(MacronodeRole::operate(idle), "idle");
            } else {
                s.push(MacronodeRole::operate(it->second.angles), it->second.prov);
            }
        }
    }
    int64_t j0 = lay.sweep_start(sweeps);
    for (int i = 0; i < N; i++) {
        double theta = 0;
        std::string prov = "readout";
        std::vector<int> ps;
        if (i == 0) {
            ps = {N - 1, N};
        } else {
            ps = {i - 1};
        }
        for (int p : ps) {
            if (at[p] >= 0) {
                theta = measure_theta[at[p]];
                prov += " mode " + std::to_string(at[p]);
            }
        }
        s.push(MacronodeRole::readout(theta), prov);
    }
    for (size_t i = 0; i < mode_position.size(); i++) {
        s.inputs.push_back(lay.input_tap(mode_position[i]));
        s.outputs.push_back(lay.output_tap(j0, mode_position[i]));
    }
    return s;
}

void check_total(const AngleSchedule &s, const LatticeConfig &config) {
    if (config.total_macronodes != 0 && s.size() > config.total_macronodes) {
        throw CapacityError(
            "compiled schedule needs " + std::to_string(s.size()) + " macronodes but the lattice has " +
            std::to_string(config.total_macronodes));
    }
}

}  // namespace

AngleSchedule compile(const CircuitProgram &program, const LatticeConfig &config) {
    config.validate();
    program.validate();
    RingLayout lay{config.N};
    int n = program.n_modes;
    if (n > compile_capacity(config.N)) {
        throw CapacityError(
            std::to_string(n) + " modes exceed the compile capacity " + std::to_string(compile_capacity(config.N)) +
            " for N=" + std::to_string(config.N));
    }
    std::vector<double> init_theta(n, 0), measure_theta(n, 0);
    std::vector<Eigen::Vector2d> init_disp(n, Eigen::Vector2d::Zero());
    std::vector<int64_t> ready(n, 0);
    std::set<std::pair<int64_t, int>> used;
    std::map<std::pair<int64_t, int>, Placement> placed;
    int64_t sweeps = 1;

    for (size_t oi = 0; oi < program.ops.size(); oi++) {
        const auto &op = program.ops[oi];
        if (op.kind == ProgramOp::Kind::Init) {
            init_theta[op.modes[0]] = op.theta;
            init_disp[op.modes[0]] = op.displacement;
            continue;
        }
        if (op.kind == ProgramOp::Kind::Measure) {
            measure_theta[op.modes[0]] = op.theta;
            continue;
        }
        std::string prov = "op " + std::to_string(oi) + " " + std::string(gate_kind_name(op.gate.kind));
        // (sweep offset, pair) -> angles
        std::vector<std::tuple<int64_t, int, MacronodeAngles>> need;
        if (op.gate.is_single_mode()) {
            int i = op.modes[0];
            if (op.gate.kind == GateKind::CrossedTeleport) {
                need.emplace_back(0, 2 * i + 1, twisted_identity());
            } else {
                GateSpec g = op.gate;
                g.variant = Variant::Twisted;
                auto a = angles_for(g);
                if (a.size() == 1) {
                    need.emplace_back(0, 2 * i + 1, a[0]);
                } else {
                    // Pair R - 1 opens each sweep, so the second half then waits a sweep.
                    int64_t later = 2 * i + 1 == lay.positions() - 1 ? 1 : 0;
                    need.emplace_back(0, 2 * i, a[0]);
                    need.emplace_back(later, 2 * i + 1, a[1]);
                }
            }
        } else {
            int i = op.modes[0], j = op.modes[1];
            if (std::abs(i - j) != 1) {
                throw AdjacencyError(
                    "op " + std::to_string(oi) + ": modes " + std::to_string(i) + " and " + std::to_string(j) +
                    " are not adjacent");
            }
            if (i > j && op.gate.kind != GateKind::GeneralizedCZ) {
                throw InvalidArgument(
                    "op " + std::to_string(oi) + ": " + std::string(gate_kind_name(op.gate.kind)) +
                    " operands must be in ascending mode order");
            }
            int lo = std::min(i, j);
            MacronodeAngles gate = angles_for(op.gate)[0].swapped_outputs();
            need.emplace_back(0, 2 * lo + 2, crossed_identity());
            need.emplace_back(1, 2 * lo + 1, gate);
            need.emplace_back(1, 2 * lo + 2, crossed_identity());
        }
        int64_t s = 0;
        for (int m : op.modes) {
            s = std::max(s, ready[m]);
        }
        while (true) {
            bool ok = true;
            for (const auto &[off, p, a] : need) {
                if (used.count({s + off, p})) {
                    ok = false;
                }
            }
            if (ok) {
                break;
            }
            s++;
        }
        int64_t span = 0;
        for (const auto &[off, p, a] : need) {
            used.insert({s + off, p});
            placed[{s + off, p}] = Placement{a, prov};
            span = std::max(span, off + 1);
        }
        for (int m : op.modes) {
            ready[m] = s + span;
        }
        sweeps = std::max(sweeps, s + span);
    }
    std::vector<int> pos(n);
    for (int i = 0; i < n; i++) {
        pos[i] = 2 * i;
    }
    AngleSchedule out = assemble(lay, sweeps, placed, pos, init_theta, init_disp, measure_theta);
    out.validate();
    check_total(out, config);
    return out;
}

int RoutingRequest::n_modes() const {
    if (order == Order::Explicit) {
        return (int)permutation.size();
    }
    return (int)x_amplitudes.size();
}

std::vector<int> RoutingRequest::target_permutation() const {
    int n = n_modes();
    if (n < 1) {
        throw InvalidArgument("routing request has no modes");
    }
    if (order == Order::Explicit) {
        std::vector<int> seen(n, 0);
        for (int t : permutation) {
            if (t < 0 || t >= n || seen[t]++) {
                throw InvalidArgument("routing permutation is not a bijection");
            }
        }
        return permutation;
    }
    for (double x : x_amplitudes) {
        if (!std::isfinite(x)) {
            throw InvalidArgument("routing amplitudes must be finite");
        }
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (order == Order::Ascending) {
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x_amplitudes[a] < x_amplitudes[b]; });
    } else {
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x_amplitudes[a] > x_amplitudes[b]; });
    }
    std::vector<int> perm(n);
    for (int j = 0; j < n; j++) {
        perm[idx[j]] = j;
    }
    return perm;
}

std::vector<std::vector<bool>> odd_even_network(const std::vector<int> &permutation) {
    int n = (int)permutation.size();
    std::vector<int> a = permutation;
    std::vector<std::vector<bool>> rounds;
    for (int r = 0; r < n; r++) {
        std::vector<bool> sw(std::max(0, n - 1), false);
        bool any = false;
        for (int j = r % 2; j + 1 < n; j += 2) {
            if (a[j] > a[j + 1]) {
                std::swap(a[j], a[j + 1]);
                sw[j] = true;
                any = true;
            }
        }
        if (any) {
            rounds.push_back(sw);
        }
    }
    if (rounds.empty()) {
        rounds.emplace_back(std::max(0, n - 1), false);
    }
    return rounds;
}

std::vector<int> apply_network(const std::vector<std::vector<bool>> &swaps, int n) {
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (const auto &round : swaps) {
        for (int j = 0; j + 1 < n; j++) {
            if (round[j]) {
                std::swap(idx[j], idx[j + 1]);
            }
        }
    }
    return idx;
}

RoutedSchedule compile_routing(const RoutingRequest &req, const LatticeConfig &config) {
    config.validate();
    RingLayout lay{config.N};
    int n = req.n_modes();
    if (n > lay.positions()) {
        throw CapacityError(
            std::to_string(n) + " routed modes exceed the " + std::to_string(lay.positions()) + " ring positions");
    }
    RoutedSchedule out;
    out.permutation = req.target_permutation();
    out.swaps = odd_even_network(out.permutation);
    out.depth = (int)out.swaps.size();
    std::map<std::pair<int64_t, int>, Placement> placed;
    MacronodeAngles cross = crossed_identity();
    for (int r = 0; r < out.depth; r++) {
        for (int j = 0; j + 1 < n; j++) {
            if (out.swaps[r][j]) {
                placed[{r, j + 1}] = Placement{cross, "round " + std::to_string(r) + " exchange " + std::to_string(j)};
            }
        }
    }
    std::vector<int> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    std::vector<Eigen::Vector2d> disp(n, Eigen::Vector2d::Zero());
    for (int i = 0; i < n; i++) {
        if (i < (int)req.x_amplitudes.size()) {
            disp[i][0] = req.x_amplitudes[i];
        }
        if (i < (int)req.p_amplitudes.size()) {
            disp[i][1] = req.p_amplitudes[i];
        }
    }
    std::vector<double> init_theta(n, req.init_theta), measure_theta(n, req.readout_theta);
    out.schedule = assemble(lay, out.depth, placed, pos, init_theta, disp, measure_theta);
    // Outputs are listed by destination slot.
    std::vector<ModeTap> by_slot(n);
    int64_t j0 = lay.sweep_start(out.depth);
    for (int j = 0; j < n; j++) {
        by_slot[j] = lay.output_tap(j0, j);
    }
    out.schedule.outputs = by_slot;
    out.schedule.validate();
    check_total(out.schedule, config);
    return out;
}

RoutingTrace realized_permutation(const AngleSchedule &schedule) {
    schedule.validate();
    int R = schedule.N + 1;
    std::map<std::pair<int64_t, int>, int> in_tap, out_tap;
    for (size_t i = 0; i < schedule.inputs.size(); i++) {
        in_tap[{schedule.inputs[i].macronode, (int)schedule.inputs[i].rail}] = (int)i;
    }
    for (size_t i = 0; i < schedule.outputs.size(); i++) {
        out_tap[{schedule.outputs[i].macronode, (int)schedule.outputs[i].rail}] = (int)i;
    }
    auto lookup = [](const std::map<std::pair<int64_t, int>, int> &m, int64_t k, Rail r) {
        auto it = m.find({k, (int)r});
        return it == m.end() ? -1 : it->second;
    };
    RoutingTrace tr;
    int n = (int)schedule.inputs.size();
    tr.permutation.assign(n, -1);
    tr.transits.assign(n, 0);
    std::vector<int> label(R, -1);
    const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
    const Eigen::Matrix4d X = mode_swap();
    for (int64_t k = 0; k < schedule.size(); k++) {
        const auto &role = schedule.roles[k];
        int pb = mod(k - 1, R), pd = mod(k, R);
        std::string where = "macronode " + std::to_string(k) + ": ";
        switch (role.role) {
            case Role::Initialize:
                if (label[pb] >= 0 || label[pd] >= 0) {
                    throw MisuseError(where + "initialization discards a routed mode");
                }
                label[pd] = lookup(in_tap, k, Rail::B);
                label[pb] = lookup(in_tap, k, Rail::D);
                break;
            case Role::Readout:
                for (auto [p, rail] : {std::pair{pb, Rail::B}, std::pair{pd, Rail::D}}) {
                    int o = lookup(out_tap, k, rail);
                    if (o >= 0) {
                        if (label[p] < 0) {
                            throw MisuseError(where + "output tap reads no routed mode");
                        }
                        tr.permutation[label[p]] = o;
                    } else if (label[p] >= 0) {
                        throw MisuseError(where + "routed mode measured without an output tap");
                    }
                    label[p] = -1;
                }
                break;
            case Role::Operate: {
                Eigen::Matrix4d S = s_of_theta(role.angles);
                if (max_abs_diff(S, I) < 1e-9) {
                    std::swap(label[pb], label[pd]);
                } else if (max_abs_diff(S, X) >= 1e-9) {
                    throw MisuseError(where + "not an identity teleport; schedule is not a routing schedule");
                }
                for (int p : {pb, pd}) {
                    if (label[p] >= 0) {
                        tr.transits[label[p]]++;
                    }
                }
                break;
            }
        }
    }
    for (int i = 0; i < n; i++) {
        if (tr.permutation[i] < 0) {
            throw MisuseError("input " + std::to_string(i) + " never reaches an output");
        }
    }
    return tr;
}

AngleSchedule with_output_readout_angle(const AngleSchedule &schedule, double theta) {
    AngleSchedule s = schedule;
    for (const auto &tap : s.outputs) {
        auto &r = s.roles.at(tap.macronode);
        r = MacronodeRole::readout(theta, r.displacement);
    }
    return s;
}

// ---- text formats ----

namespace {

struct Token {
    std::string text;
    size_t column;
};

std::vector<Token> tokenize(const std::string &line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace((unsigned char)line[i])) {
            i++;
        }
        if (i >= line.size() || line[i] == '#') {
            break;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace((unsigned char)line[i])) {
            i++;
        }
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

double parse_real(const Token &t, size_t line) {
    const char *s = t.text.c_str();
    char *end = nullptr;
    double v = std::strtod(s, &end);
    if (end == s || *end != '\0' || !std::isfinite(v)) {
        throw ParseError("expected a finite number, got '" + t.text + "'", line, t.column);
    }
    return v;
}

int64_t parse_int(const Token &t, size_t line) {
    const char *s = t.text.c_str();
    char *end = nullptr;
    long long v = std::strtoll(s, &end, 10);
    if (end == s || *end != '\0') {
        throw ParseError("expected an integer, got '" + t.text + "'", line, t.column);
    }
    return v;
}

uint64_t parse_uint(const Token &t, size_t line) {
    const char *s = t.text.c_str();
    char *end = nullptr;
    if (t.text.empty() || t.text[0] == '-') {
        throw ParseError("expected an unsigned integer, got '" + t.text + "'", line, t.column);
    }
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end == s || *end != '\0') {
        throw ParseError("expected an unsigned integer, got '" + t.text + "'", line, t.column);
    }
    return v;
}

void expect_count(const std::vector<Token> &tok, size_t n, size_t line, const std::string &what) {
    if (tok.size() != n) {
        size_t col = tok.size() > n ? tok[n].column : (tok.empty() ? 1 : tok.back().column);
        throw ParseError(what + " expects " + std::to_string(n - 1) + " field(s)", line, col);
    }
}

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) {
        if (!l.empty() && l.back() == '\r') {
            l.pop_back();
        }
        lines.push_back(l);
    }
    return lines;
}

void check_header(const std::vector<std::string> &lines, const std::string &magic) {
    if (lines.empty()) {
        throw ParseError("empty input", 1, 1);
    }
    auto tok = tokenize(lines[0]);
    if (tok.size() != 2 || tok[0].text != magic) {
        throw ParseError("expected header '" + magic + " v1'", 1, 1);
    }
    if (tok[1].text != "v1") {
        throw ParseError("unsupported version " + tok[1].text, 1, tok[1].column);
    }
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

std::string serialize_program(const CircuitProgram &program) {
    std::ostringstream out;
    out << "qrl-program v1\n";
    out << "name " << one_line(program.name) << "\n";
    out << "seed " << program.seed << "\n";
    out << "modes " << program.n_modes << "\n";
    for (const auto &op : program.ops) {
        switch (op.kind) {
            case ProgramOp::Kind::Init:
                out << "init " << op.modes[0] << ' ' << format_real(op.theta) << ' ' << format_real(op.displacement[0])
                    << ' ' << format_real(op.displacement[1]) << "\n";
                break;
            case ProgramOp::Kind::Measure:
                out << "measure " << op.modes[0] << ' ' << format_real(op.theta) << "\n";
                break;
            case ProgramOp::Kind::Gate:
                out << "gate " << gate_kind_name(op.gate.kind) << ' ';
                for (size_t i = 0; i < op.modes.size(); i++) {
                    out << (i ? "," : "") << op.modes[i];
                }
                for (double p : op.gate.params) {
                    out << ' ' << format_real(p);
                }
                out << "\n";
                break;
        }
    }
    return out.str();
}

CircuitProgram parse_program(const std::string &text) {
    auto lines = split_lines(text);
    check_header(lines, "qrl-program");
    CircuitProgram p;
    bool have_modes = false;
    for (size_t li = 1; li < lines.size(); li++) {
        size_t ln = li + 1;
        if (lines[li].rfind("name", 0) == 0 && (lines[li].size() == 4 || lines[li][4] == ' ')) {
            p.name = lines[li].size() > 5 ? lines[li].substr(5) : "";
            continue;
        }
        auto tok = tokenize(lines[li]);
        if (tok.empty()) {
            continue;
        }
        const std::string &kw = tok[0].text;
        if (kw == "seed") {
            expect_count(tok, 2, ln, "seed");
            p.seed = parse_uint(tok[1], ln);
        } else if (kw == "modes") {
            expect_count(tok, 2, ln, "modes");
            p.n_modes = (int)parse_int(tok[1], ln);
            have_modes = true;
        } else if (kw == "init") {
            expect_count(tok, 5, ln, "init");
            p.ops.push_back(ProgramOp::init(
                (int)parse_int(tok[1], ln), parse_real(tok[2], ln),
                Eigen::Vector2d(parse_real(tok[3], ln), parse_real(tok[4], ln))));
        } else if (kw == "measure") {
            expect_count(tok, 3, ln, "measure");
            p.ops.push_back(ProgramOp::measure((int)parse_int(tok[1], ln), parse_real(tok[2], ln)));
        } else if (kw == "gate") {
            if (tok.size() < 3) {
                throw ParseError("gate expects a kind and modes", ln, tok.back().column);
            }
            GateKind kind;
            try {
                kind = gate_kind_from_name(tok[1].text);
            } catch (const InvalidArgument &) {
                throw ParseError("unknown gate '" + tok[1].text + "'", ln, tok[1].column);
            }
            std::vector<int> modes;
            std::stringstream ms(tok[2].text);
            std::string part;
            while (std::getline(ms, part, ',')) {
                modes.push_back((int)parse_int(Token{part, tok[2].column}, ln));
            }
            expect_count(tok, 3 + gate_param_count(kind), ln, "gate " + tok[1].text);
            GateSpec g;
            g.kind = kind;
            for (size_t i = 3; i < tok.size(); i++) {
                g.params.push_back(parse_real(tok[i], ln));
            }
            p.ops.push_back(ProgramOp::apply(g, modes));
        } else {
            throw ParseError("unknown keyword '" + kw + "'", ln, tok[0].column);
        }
    }
    if (!have_modes) {
        throw ParseError("missing 'modes' line", lines.size(), 1);
    }
    return p;
}

namespace {

const char *role_name(Role r) {
    switch (r) {
        case Role::Operate:
            return "operate";
        case Role::Readout:
            return "readout";
        case Role::Initialize:
            return "init";
    }
    return "?";
}

}  // namespace

std::string serialize_schedule(const AngleSchedule &schedule) {
    std::ostringstream out;
    out << "qrl-schedule v1\n";
    out << "N " << schedule.N << "\n";
    out << "macronodes " << schedule.size() << "\n";
    for (const auto &t : schedule.inputs) {
        out << "input " << t.macronode << ' ' << (t.rail == Rail::B ? 'b' : 'd') << "\n";
    }
    for (const auto &t : schedule.outputs) {
        out << "output " << t.macronode << ' ' << (t.rail == Rail::B ? 'b' : 'd') << "\n";
    }
    for (int64_t k = 0; k < schedule.size(); k++) {
        const auto &r = schedule.roles[k];
        out << k << ' ' << role_name(r.role);
        if (r.role == Role::Operate) {
            for (double t : r.angles.theta) {
                out << ' ' << format_real(t);
            }
        } else {
            out << ' ' << format_real(r.shared_theta());
        }
        for (int i = 0; i < 4; i++) {
            out << ' ' << format_real(r.displacement[i]);
        }
        if (k < (int64_t)schedule.provenance.size() && !schedule.provenance[k].empty()) {
            out << " | " << one_line(schedule.provenance[k]);
        }
        out << "\n";
    }
    out << "end\n";
    return out.str();
}

AngleSchedule parse_schedule(const std::string &text) {
    auto lines = split_lines(text);
    check_header(lines, "qrl-schedule");
    AngleSchedule s;
    int64_t expected = -1;
    bool have_n = false, ended = false;
    bool any_prov = false;
    for (size_t li = 1; li < lines.size(); li++) {
        size_t ln = li + 1;
        std::string body = lines[li];
        std::string prov;
        auto bar = body.find(" | ");
        if (bar != std::string::npos) {
            prov = body.substr(bar + 3);
            body = body.substr(0, bar);
        }
        auto tok = tokenize(body);
        if (tok.empty()) {
            continue;
        }
        if (ended) {
            throw ParseError("content after 'end'", ln, tok[0].column);
        }
        const std::string &kw = tok[0].text;
        if (kw == "N") {
            expect_count(tok, 2, ln, "N");
            s.N = (int)parse_int(tok[1], ln);
            have_n = true;
        } else if (kw == "macronodes") {
            expect_count(tok, 2, ln, "macronodes");
            expected = parse_int(tok[1], ln);
            if (expected < 0) {
                throw ParseError("negative macronode count", ln, tok[1].column);
            }
            s.roles.reserve(expected);
        } else if (kw == "input" || kw == "output") {
            expect_count(tok, 3, ln, kw);
            ModeTap t;
            t.macronode = parse_int(tok[1], ln);
            if (tok[2].text == "b") {
                t.rail = Rail::B;
            } else if (tok[2].text == "d") {
                t.rail = Rail::D;
            } else {
                throw ParseError("rail must be b or d", ln, tok[2].column);
            }
            (kw == "input" ? s.inputs : s.outputs).push_back(t);
        } else if (kw == "end") {
            ended = true;
        } else {
            int64_t k = parse_int(tok[0], ln);
            if (k != s.size()) {
                throw ParseError("macronodes must be listed in order; expected " + std::to_string(s.size()), ln, tok[0].column);
            }
            if (tok.size() < 2) {
                throw ParseError("missing role", ln, tok[0].column);
            }
            const std::string &role = tok[1].text;
            MacronodeRole r;
            try {
                if (role == "operate") {
                    expect_count(tok, 10, ln, "operate");
                    MacronodeAngles a(parse_real(tok[2], ln), parse_real(tok[3], ln), parse_real(tok[4], ln), parse_real(tok[5], ln));
                    Eigen::Vector4d d(parse_real(tok[6], ln), parse_real(tok[7], ln), parse_real(tok[8], ln), parse_real(tok[9], ln));
                    r = MacronodeRole::operate(a, d);
                } else if (role == "readout" || role == "init") {
                    expect_count(tok, 7, ln, role);
                    double th = parse_real(tok[2], ln);
                    Eigen::Vector4d d(parse_real(tok[3], ln), parse_real(tok[4], ln), parse_real(tok[5], ln), parse_real(tok[6], ln));
                    r = role == "readout" ? MacronodeRole::readout(th, d) : MacronodeRole::initialize(th, d);
                } else {
                    throw ParseError("unknown role '" + role + "'", ln, tok[1].column);
                }
            } catch (const DegenerateTeleportation &e) {
                throw ParseError(e.what(), ln, tok[1].column);
            }
            any_prov = any_prov || !prov.empty();
            s.push(r, prov);
        }
    }
    if (!have_n || expected < 0) {
        throw ParseError("missing N or macronodes line", lines.size(), 1);
    }
    if (!ended) {
        throw ParseError("truncated schedule: no 'end' line", lines.size(), 1);
    }
    if (s.size() != expected) {
        throw ParseError(
            "expected " + std::to_string(expected) + " macronodes, found " + std::to_string(s.size()), lines.size(), 1);
    }
    if (!any_prov) {
        s.provenance.clear();
    }
    try {
        s.validate();
    } catch (const std::exception &e) {
        throw ParseError(e.what(), lines.size(), 1);
    }
    return s;
}

std::string provenance_json(const AngleSchedule &schedule) {
    nlohmann::ordered_json j;
    j["N"] = schedule.N;
    j["macronodes"] = schedule.size();
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (int64_t k = 0; k < schedule.size(); k++) {
        nlohmann::ordered_json e;
        e["k"] = k;
        e["role"] = role_name(schedule.roles[k].role);
        e["op"] = k < (int64_t)schedule.provenance.size() ? schedule.provenance[k] : "";
        list.push_back(e);
    }
    j["entries"] = list;
    nlohmann::ordered_json ins = nlohmann::ordered_json::array(), outs = nlohmann::ordered_json::array();
    for (const auto &t : schedule.inputs) {
        ins.push_back({{"macronode", t.macronode}, {"rail", t.rail == Rail::B ? "b" : "d"}});
    }
    for (const auto &t : schedule.outputs) {
        outs.push_back({{"macronode", t.macronode}, {"rail", t.rail == Rail::B ? "b" : "d"}});
    }
    j["inputs"] = ins;
    j["outputs"] = outs;
    return j.dump(1) + "\n";
}

}  // namespace qrl
