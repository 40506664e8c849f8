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
#include <cmath>
#include <gtest/gtest.h>
#include <numeric>
#include <random>

#include "qrl/errors.h"

using namespace qrl;

namespace {

GateSpec random_gate(std::mt19937_64 &rng, bool two_mode) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_real_distribution<double> ang(-M_PI, M_PI);
    auto away = [&](double lo, double hi) {
        double v = lo + (hi - lo) * (u(rng) + 1) / 2;
        return u(rng) < 0 ? -v : v;
    };
    if (two_mode) {
        if (rng() % 2) {
            return GateSpec::beam_splitter(0.9 * u(rng), ang(rng));
        }
        return GateSpec::generalized_cz(away(0.2, 1.5), away(0.2, 1.5));
    }
    switch (rng() % 7) {
        case 0:
            return GateSpec::rotation(ang(rng));
        case 1:
            return GateSpec::x_shear(away(0.2, 1));
        case 2:
            return GateSpec::p_shear(away(0.2, 1));
        case 3:
            return GateSpec::squeeze_neg90(away(0.5, 2));
        case 4:
            return GateSpec::squeeze45(away(0.5, 2));
        case 5:
            return GateSpec::crossed_teleport();
        default:
            return GateSpec::arbitrary_single_mode(ang(rng), u(rng), ang(rng));
    }
}

struct Random {
    CircuitProgram program;
    Eigen::MatrixXd S;  // composed 2n x 2n map, (x0, p0, x1, p1, ...)
    Eigen::VectorXd in;
};

Random random_program(int n, int n_gates, std::mt19937_64 &rng) {
    Random r;
    r.program.n_modes = n;
    r.program.name = "random";
    r.S = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    r.in.resize(2 * n);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < n; i++) {
        Eigen::Vector2d d(u(rng), u(rng));
        r.in.segment<2>(2 * i) = d;
        r.program.ops.push_back(ProgramOp::init(i, 0, d));
    }
    for (int g = 0; g < n_gates; g++) {
        bool two = n > 1 && rng() % 3 == 0;
        GateSpec gate = random_gate(rng, two);
        Eigen::MatrixXd step = Eigen::MatrixXd::Identity(2 * n, 2 * n);
        if (two) {
            int lo = (int)(rng() % (n - 1));
            std::vector<int> modes{lo, lo + 1};
            if (gate.kind == GateKind::GeneralizedCZ && rng() % 2) {
                std::swap(modes[0], modes[1]);
            }
            step.block<4, 4>(2 * lo, 2 * lo) = analytic_gate_matrix(gate);
            r.program.ops.push_back(ProgramOp::apply(gate, modes));
        } else {
            int i = (int)(rng() % n);
            step.block<2, 2>(2 * i, 2 * i) = analytic_single_mode_matrix(gate);
            r.program.ops.push_back(ProgramOp::apply(gate, {i}));
        }
        r.S = step * r.S;
    }
    return r;
}

std::vector<double> exact_means(const AngleSchedule &s, const LatticeConfig &config) {
    StreamingSampler sampler(s, config);
    std::vector<double> proc(4 * s.size());
    sampler.run_mean(proc.data());
    return proc;
}

double output_value(const std::vector<double> &proc, const ModeTap &tap) {
    Eigen::Vector4d m(proc.data() + 4 * tap.macronode);
    return (four_splitter().transpose() * m)[(int)tap.rail];
}

CircuitProgram with_measure(CircuitProgram p, double theta) {
    for (int i = 0; i < p.n_modes; i++) {
        p.ops.push_back(ProgramOp::measure(i, theta));
    }
    return p;
}

}  // namespace

TEST(RingLayout, tapsAgreeWithPositions) {
    for (int N : {2, 3, 5, 8}) {
        RingLayout lay{N};
        int64_t j0 = lay.sweep_start(3);
        for (int p = 0; p < lay.positions(); p++) {
            EXPECT_EQ(lay.tap_position(lay.input_tap(p), false), p);
            EXPECT_EQ(lay.tap_position(lay.output_tap(j0, p), true), p);
            int64_t k = lay.macronode(1, p);
            EXPECT_EQ(((k - 1) % lay.positions() + lay.positions()) % lay.positions(), (p - 1 + lay.positions()) % lay.positions());
        }
        EXPECT_EQ(lay.total_macronodes(3), j0 + N);
    }
}

TEST(Compile, exactMeansMatchComposedGates) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; trial++) {
        int n = 1 + trial % 3;
        int N = std::max(2, 2 * n - 1) + (int)(rng() % 4);
        Random r = random_program(n, 1 + (int)(rng() % 6), rng);
        LatticeConfig config = LatticeConfig::with_squeezing(N, 4.5);
        Eigen::VectorXd want = r.S * r.in;
        for (int q = 0; q < 2; q++) {
            double theta = q == 0 ? M_PI / 2 : 0;
            AngleSchedule s = compile(with_measure(r.program, theta), config);
            ASSERT_EQ(s.outputs.size(), (size_t)n);
            auto proc = exact_means(s, config);
            for (int i = 0; i < n; i++) {
                double got = output_value(proc, s.outputs[i]);
                double w = want[2 * i + q];
                EXPECT_NEAR(got, w, 1e-9 * std::max(1.0, std::abs(w))) << serialize_program(r.program) << "N=" << N << " trial " << trial << " mode " << i << " q " << q;
            }
        }
    }
}

TEST(Compile, mapAgreesWithStreamingMean) {
    std::mt19937_64 rng(5);
    Random r = random_program(2, 5, rng);
    LatticeConfig config = LatticeConfig::with_squeezing(4, 6);
    AngleSchedule s = compile(with_measure(r.program, M_PI / 2), config);
    auto map = build_outcome_map(s, config);
    auto proc = exact_means(s, config);
    for (int64_t i = 0; i < map.d.size(); i++) {
        EXPECT_NEAR(map.d[i], proc[i], 1e-9);
    }
}

TEST(Compile, idleProgramIsAllIdentities) {
    CircuitProgram p;
    p.n_modes = 2;
    p.ops = {ProgramOp::init(0), ProgramOp::init(1), ProgramOp::measure(0, 0), ProgramOp::measure(1, 0)};
    AngleSchedule s = compile(p, LatticeConfig::with_squeezing(3, 4.5));
    RingLayout lay{3};
    EXPECT_EQ(s.size(), lay.total_macronodes(1));
    auto tr = realized_permutation(s);
    EXPECT_EQ(tr.permutation, (std::vector<int>{0, 1}));
}

TEST(Compile, errors) {
    LatticeConfig config = LatticeConfig::with_squeezing(5, 4.5);
    CircuitProgram p;
    p.n_modes = 3;
    for (int i = 0; i < 3; i++) {
        p.ops.push_back(ProgramOp::init(i));
    }
    auto finish = [](CircuitProgram q) { return with_measure(q, 0); };

    CircuitProgram far = p;
    far.ops.push_back(ProgramOp::apply(GateSpec::generalized_cz(1, 0), {0, 2}));
    EXPECT_THROW(compile(finish(far), config), AdjacencyError);

    CircuitProgram rev = p;
    rev.ops.push_back(ProgramOp::apply(GateSpec::beam_splitter(0.5, 0.1), {1, 0}));
    EXPECT_THROW(compile(finish(rev), config), InvalidArgument);

    CircuitProgram rev_cz = p;
    rev_cz.ops.push_back(ProgramOp::apply(GateSpec::generalized_cz(0.5, 0.1), {1, 0}));
    EXPECT_NO_THROW(compile(finish(rev_cz), config));

    CircuitProgram tw = p;
    tw.ops.push_back(ProgramOp::apply(GateSpec::twisted_teleport(), {1}));
    EXPECT_THROW(compile(finish(tw), config), InvalidArgument);

    EXPECT_THROW(compile(finish(p), LatticeConfig::with_squeezing(4, 4.5)), CapacityError);
    EXPECT_EQ(compile_capacity(5), 3);

    LatticeConfig short_config = config;
    short_config.total_macronodes = 10;
    EXPECT_THROW(compile(finish(p), short_config), CapacityError);

    CircuitProgram unmeasured = p;
    EXPECT_THROW(compile(unmeasured, config), InvalidArgument);

    CircuitProgram late = finish(p);
    late.ops.push_back(ProgramOp::apply(GateSpec::rotation(1), {0}));
    EXPECT_THROW(compile(late, config), InvalidArgument);
}

TEST(Compile, nonRoutingScheduleIsMisuse) {
    CircuitProgram p;
    p.n_modes = 1;
    p.ops = {ProgramOp::init(0), ProgramOp::apply(GateSpec::rotation(0.7), {0}), ProgramOp::measure(0, 0)};
    AngleSchedule s = compile(p, LatticeConfig::with_squeezing(3, 4.5));
    EXPECT_THROW(realized_permutation(s), MisuseError);
}

TEST(Routing, randomPermutationsRealized) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; t++) {
        int N = 2 + (int)(rng() % 9);
        int n = 1 + (int)(rng() % (N + 1));
        RoutingRequest req;
        req.order = RoutingRequest::Order::Explicit;
        req.permutation.resize(n);
        std::iota(req.permutation.begin(), req.permutation.end(), 0);
        std::shuffle(req.permutation.begin(), req.permutation.end(), rng);
        LatticeConfig config = LatticeConfig::with_squeezing(N, 4.5);
        RoutedSchedule rs = compile_routing(req, config);
        EXPECT_LE(rs.depth, std::max(1, n));
        auto slot_to_input = apply_network(rs.swaps, n);
        for (int i = 0; i < n; i++) {
            EXPECT_EQ(slot_to_input[req.permutation[i]], i);
        }
        auto tr = realized_permutation(rs.schedule);
        EXPECT_EQ(tr.permutation, req.permutation) << "N=" << N << " n=" << n;
        EXPECT_EQ(rs.schedule.size(), RingLayout{N}.total_macronodes(rs.depth));
    }
}

TEST(Routing, exactMeansFollowThePermutation) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int t = 0; t < 20; t++) {
        int N = 3 + (int)(rng() % 6);
        int n = N + 1;
        RoutingRequest req;
        req.order = t % 2 ? RoutingRequest::Order::Descending : RoutingRequest::Order::Ascending;
        for (int i = 0; i < n; i++) {
            req.x_amplitudes.push_back(u(rng));
            req.p_amplitudes.push_back(5);
        }
        LatticeConfig config = LatticeConfig::with_squeezing(N, 4.5);
        RoutedSchedule rs = compile_routing(req, config);
        auto proc = exact_means(rs.schedule, config);
        std::vector<double> sorted = req.x_amplitudes;
        std::sort(sorted.begin(), sorted.end());
        if (req.order == RoutingRequest::Order::Descending) {
            std::reverse(sorted.begin(), sorted.end());
        }
        for (int j = 0; j < n; j++) {
            EXPECT_NEAR(output_value(proc, rs.schedule.outputs[j]), sorted[j], 1e-9);
        }
        auto p_sched = with_output_readout_angle(rs.schedule, 0);
        auto pp = exact_means(p_sched, config);
        for (int j = 0; j < n; j++) {
            EXPECT_NEAR(output_value(pp, p_sched.outputs[j]), 5, 1e-9);
        }
    }
}

TEST(Routing, reverseThreeModes) {
    RoutingRequest req;
    req.order = RoutingRequest::Order::Explicit;
    req.permutation = {2, 1, 0};
    RoutedSchedule rs = compile_routing(req, LatticeConfig::with_squeezing(3, 4.5));
    EXPECT_EQ(rs.depth, 3);
    EXPECT_EQ(realized_permutation(rs.schedule).permutation, req.permutation);
}

TEST(Routing, identityUsesNoExchanges) {
    RoutingRequest req;
    req.order = RoutingRequest::Order::Explicit;
    req.permutation = {0, 1, 2, 3};
    RoutedSchedule rs = compile_routing(req, LatticeConfig::with_squeezing(3, 4.5));
    EXPECT_EQ(rs.depth, 1);
    for (bool b : rs.swaps[0]) {
        EXPECT_FALSE(b);
    }
}

TEST(Routing, stableTiesAndErrors) {
    RoutingRequest req;
    req.x_amplitudes = {1, 0, 1, 0};
    EXPECT_EQ(req.target_permutation(), (std::vector<int>{2, 0, 3, 1}));
    req.order = RoutingRequest::Order::Descending;
    EXPECT_EQ(req.target_permutation(), (std::vector<int>{0, 2, 1, 3}));
    RoutingRequest bad;
    bad.order = RoutingRequest::Order::Explicit;
    bad.permutation = {0, 0};
    EXPECT_THROW(bad.target_permutation(), InvalidArgument);
    RoutingRequest big;
    big.x_amplitudes.assign(5, 0);
    EXPECT_THROW(compile_routing(big, LatticeConfig::with_squeezing(3, 4.5)), CapacityError);
}

TEST(Serialization, scheduleRoundTripIsExact) {
    std::mt19937_64 rng(21);
    Random r = random_program(3, 200, rng);
    AngleSchedule s = compile(with_measure(r.program, M_PI / 2), LatticeConfig::with_squeezing(5, 4.5));
    ASSERT_GE(s.size(), 1000);
    std::string text = serialize_schedule(s);
    AngleSchedule back = parse_schedule(text);
    EXPECT_TRUE(back == s);
    EXPECT_EQ(serialize_schedule(back), text);
    for (int64_t k = 0; k < s.size(); k++) {
        ASSERT_EQ(back.roles[k].angles.theta, s.roles[k].angles.theta);
        ASSERT_EQ(back.roles[k].displacement, s.roles[k].displacement);
    }
}

TEST(Serialization, truncatedScheduleIsParseError) {
    RoutingRequest req;
    req.order = RoutingRequest::Order::Explicit;
    req.permutation = {1, 0};
    std::string text = serialize_schedule(compile_routing(req, LatticeConfig::with_squeezing(2, 4.5)).schedule);
    std::string cut = text.substr(0, text.size() / 2);
    cut = cut.substr(0, cut.rfind('\n') + 1);
    EXPECT_THROW(parse_schedule(cut), ParseError);
    EXPECT_THROW(parse_schedule(""), ParseError);
    std::string garbled = text;
    garbled.replace(garbled.find("operate"), 7, "operat");
    try {
        parse_schedule(garbled);
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_GT(e.line, 1u);
        EXPECT_GT(e.column, 1u);
    }
}

TEST(Serialization, programFixture) {
    std::string text =
        "qrl-program v1\n"
        "# two modes\n"
        "name bell pair\n"
        "seed 42\n"
        "modes 2\n"
        "init 0 0 1.5 -2\n"
        "init 1 1.5707963267948966 0 0\n"
        "gate squeeze45 0 0.5\n"
        "gate bs 0,1 0.5 0.25\n"
        "gate gcz 1,0 1 -0.5\n"
        "measure 0 1.5707963267948966\n"
        "measure 1 0\n";
    CircuitProgram p = parse_program(text);
    EXPECT_EQ(p.name, "bell pair");
    EXPECT_EQ(p.seed, 42u);
    EXPECT_EQ(p.n_modes, 2);
    ASSERT_EQ(p.ops.size(), 7u);
    EXPECT_EQ(p.ops[0].displacement, Eigen::Vector2d(1.5, -2));
    EXPECT_EQ(p.ops[3].gate.kind, GateKind::BeamSplitter);
    EXPECT_EQ(p.ops[4].modes, (std::vector<int>{1, 0}));
    EXPECT_NO_THROW(p.validate());
    EXPECT_TRUE(parse_program(serialize_program(p)) == p);
    EXPECT_THROW(parse_program("qrl-program v1\nmodes 1\ngate nope 0\n"), ParseError);
    EXPECT_THROW(parse_program("qrl-program v2\n"), ParseError);
    EXPECT_THROW(parse_program("qrl-program v1\nmodes 1\ngate rotation 0\n"), ParseError);
}

TEST(Serialization, provenanceNamesOps) {
    CircuitProgram p;
    p.n_modes = 1;
    p.ops = {ProgramOp::init(0), ProgramOp::apply(GateSpec::rotation(0.3), {0}), ProgramOp::measure(0, 0)};
    AngleSchedule s = compile(p, LatticeConfig::with_squeezing(2, 4.5));
    std::string j = provenance_json(s);
    EXPECT_NE(j.find("op 1 rotation"), std::string::npos);
}
