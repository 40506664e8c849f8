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

#include "qrl/lattice.h"

#include <cmath>
#include <gtest/gtest.h>
#include <random>
#include <sstream>

#include "qrl/errors.h"

using namespace qrl;

namespace {

MacronodeAngles random_operate_angles(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    while (true) {
        MacronodeAngles a(u(rng), u(rng), u(rng), u(rng));
        if (std::abs(std::sin(a.theta[1] - a.theta[0])) > 0.1 && std::abs(std::sin(a.theta[3] - a.theta[2])) > 0.1) {
            return a;
        }
    }
}

AngleSchedule random_schedule(int N, int T, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    std::uniform_real_distribution<double> du(-2, 2);
    std::uniform_int_distribution<int> pick(0, 2);
    AngleSchedule s;
    s.N = N;
    for (int k = 0; k < T; k++) {
        Eigen::Vector4d disp(du(rng), du(rng), du(rng), du(rng));
        switch (pick(rng)) {
            case 0:
                s.push(MacronodeRole::operate(random_operate_angles(rng), disp));
                break;
            case 1:
                s.push(MacronodeRole::readout(u(rng), disp));
                break;
            default:
                s.push(MacronodeRole::initialize(u(rng), disp));
                break;
        }
    }
    return s;
}

LatticeConfig config_for(int N, std::array<double, 4> db, double eta_s = 1, double eta_l = 1) {
    LatticeConfig c;
    c.N = N;
    c.squeezing_db = db;
    c.eta_short = eta_s;
    c.eta_long = eta_l;
    c.seed = 99;
    return c;
}

double quad_var(const Eigen::RowVectorXd &row, const Eigen::VectorXd &var) {
    return (row.array().square() * var.transpose().array()).sum();
}

}  // namespace

TEST(lattice, squeezing_conversion) {
    EXPECT_NEAR(10 * std::log10(std::exp(-2 * squeezing_r_from_db(4.5))), -4.5, 1e-12);
    EXPECT_EQ(squeezing_r_from_db(0), 0);
}

TEST(lattice, config_validation_and_hash) {
    LatticeConfig c;
    EXPECT_NO_THROW(c.validate());
    LatticeConfig bad = c;
    bad.N = 1;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.eta_long = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = c;
    bad.squeezing_db[2] = -1;
    EXPECT_THROW(bad.validate(), ConfigError);
    LatticeConfig d = c;
    EXPECT_EQ(c.hash(), d.hash());
    EXPECT_EQ(c.hash().size(), 16u);
    d.seed = 2;
    EXPECT_NE(c.hash(), d.hash());
}

TEST(lattice, feedforward_routes_agree) {
    for (uint64_t seed = 1; seed <= 6; seed++) {
        for (bool lossy : {false, true}) {
            int N = 2 + (int)(seed % 3);
            AngleSchedule s = random_schedule(N, 14, seed);
            LatticeConfig c = config_for(N, {3, 4, 5, 6}, lossy ? 0.9 : 1, lossy ? 0.8 : 1);
            LinearOutcomeMap num = build_outcome_map(s, c, FeedforwardMode::Numerical);
            LinearOutcomeMap phys = build_outcome_map(s, c, FeedforwardMode::Physical);
            double scale = std::max(1.0, phys.M.cwiseAbs().maxCoeff());
            ASSERT_LT((num.M - phys.M).cwiseAbs().maxCoeff(), 1e-10 * scale) << seed << " " << lossy;
            ASSERT_LT((num.d - phys.d).cwiseAbs().maxCoeff(), 1e-10 * scale) << seed << " " << lossy;
        }
    }
}

TEST(lattice, numerical_feedforward_matches_map) {
    AngleSchedule s = random_schedule(3, 12, 21);
    LatticeConfig c = config_for(3, {4, 4, 4, 4});
    LinearOutcomeMap map = build_outcome_map(s, c);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    Eigen::VectorXd z(map.layout.n_columns());
    for (auto &v : z) {
        v = nd(rng);
    }
    Eigen::VectorXd raw = map.M_raw * z;
    std::vector<Eigen::Vector4d> rv(s.size());
    for (int64_t k = 0; k < s.size(); k++) {
        rv[k] = raw.segment<4>(4 * k);
    }
    auto out = apply_numerical_feedforward(rv, s);
    Eigen::VectorXd proc = map.M * z + map.d;
    for (int64_t k = 0; k < s.size(); k++) {
        ASSERT_LT((out[k] - proc.segment<4>(4 * k)).cwiseAbs().maxCoeff(), 1e-10);
    }
    rv.pop_back();
    EXPECT_THROW(apply_numerical_feedforward(rv, s), ScheduleOrderError);
}

TEST(lattice, raw_outcomes_are_banded) {
    int N = 4;
    AngleSchedule s = random_schedule(N, 16, 3);
    LinearOutcomeMap map = build_outcome_map(s, config_for(N, {4, 4, 4, 4}));
    const auto &lay = map.layout;
    for (int64_t k = 0; k < lay.T; k++) {
        for (int64_t j = -N; j < lay.T; j++) {
            bool allowed = j == k || j == k - 1 || j == k - N;
            double mass = map.M_raw.block(4 * k, lay.column(j, 0, 0), 4, lay.stride()).cwiseAbs().sum();
            if (!allowed) {
                ASSERT_EQ(mass, 0) << k << " " << j;
            }
        }
    }
}

TEST(lattice, vacuum_readouts_are_shot_noise) {
    AngleSchedule s;
    s.N = 3;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    for (int k = 0; k < 9; k++) {
        s.push(MacronodeRole::readout(u(rng)));
    }
    LinearOutcomeMap map = build_outcome_map(s, config_for(3, {0, 0, 0, 0}));
    Eigen::MatrixXd cov = map.covariance();
    EXPECT_LT((cov - 0.5 * Eigen::MatrixXd::Identity(cov.rows(), cov.cols())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(lattice, p_nullifiers) {
    double db = 5;
    int N = 3;
    AngleSchedule s;
    s.N = N;
    for (int k = 0; k < 10; k++) {
        s.push(MacronodeRole::readout(0));
    }
    LinearOutcomeMap map = build_outcome_map(s, config_for(N, {db, db, db, db}));
    double r = squeezing_r_from_db(db);
    for (int k = 0; k + N < 10; k++) {
        Eigen::MatrixXd now = map.readout_rows(k);
        Eigen::MatrixXd next = map.readout_rows(k + 1);
        Eigen::MatrixXd far = map.readout_rows(k + N);
        // (p_a + p_b)/sqrt2 recovers p of source A, (p_c + p_d)/sqrt2 that of C.
        EXPECT_NEAR(quad_var((now.row(0) + next.row(1)) * M_SQRT1_2, map.source_variance), std::exp(-2 * r) / 2, 1e-12);
        EXPECT_NEAR(quad_var((now.row(2) + far.row(3)) * M_SQRT1_2, map.source_variance), std::exp(-2 * r) / 2, 1e-12);
        EXPECT_NEAR(quad_var((now.row(0) - next.row(1)) * M_SQRT1_2, map.source_variance), std::exp(2 * r) / 2, 1e-12);
    }
}

TEST(lattice, x_nullifiers) {
    double db = 4;
    int N = 2;
    AngleSchedule s;
    s.N = N;
    for (int k = 0; k < 8; k++) {
        s.push(MacronodeRole::readout(M_PI / 2));
    }
    LinearOutcomeMap map = build_outcome_map(s, config_for(N, {db, db, db, db}));
    double r = squeezing_r_from_db(db);
    for (int k = 0; k + N < 8; k++) {
        Eigen::MatrixXd now = map.readout_rows(k);
        Eigen::MatrixXd next = map.readout_rows(k + 1);
        Eigen::MatrixXd far = map.readout_rows(k + N);
        // x_b - x_a = sqrt2 x_B.
        EXPECT_NEAR(quad_var((next.row(1) - now.row(0)) * M_SQRT1_2, map.source_variance), std::exp(-2 * r) / 2, 1e-12);
        EXPECT_NEAR(quad_var((far.row(3) - now.row(2)) * M_SQRT1_2, map.source_variance), std::exp(-2 * r) / 2, 1e-12);
    }
}

TEST(lattice, initialization_moments) {
    int N = 2;
    std::array<double, 4> db{3, 4.5, 5, 6};
    LatticeConfig c = config_for(N, db);
    for (double theta : {0.0, 0.3, -1.1, M_PI / 2, 2.5}) {
        InitMoments m = initialization_feedforward(theta, c.r());
        for (int q = 0; q < 2; q++) {
            // Readout angle pi/2 - theta picks x(-theta), -theta picks p(-theta).
            double ro = q == 0 ? M_PI / 2 - theta : -theta;
            AngleSchedule s;
            s.N = N;
            s.push(MacronodeRole::readout(0));
            s.push(MacronodeRole::initialize(theta));
            s.push(MacronodeRole::readout(ro));
            s.push(MacronodeRole::readout(ro));
            LinearOutcomeMap map = build_outcome_map(s, c);
            double vb = quad_var(map.readout_rows(2).row(1), map.source_variance);
            double vd = quad_var(map.readout_rows(3).row(3), map.source_variance);
            EXPECT_NEAR(vb, m.variances[q], 1e-12) << theta << " " << q;
            EXPECT_NEAR(vd, m.variances[2 + q], 1e-12) << theta << " " << q;
        }
    }
}

TEST(lattice, initialization_moment_formula_limits) {
    std::array<double, 4> r{0.5, 0.5, 0.5, 0.5};
    InitMoments m = initialization_feedforward(0, r);
    EXPECT_NEAR(m.variances[1], std::exp(-1.0), 1e-15);
    EXPECT_NEAR(m.variances[0], std::cosh(1.0) / 2, 1e-15);
}

TEST(lattice, operate_noise_law) {
    // Input modes b_k, d_k are fixed linear functions of the sources; the output after an
    // operation equals S applied to them plus noise from the operating macronode's sources.
    int N = 2;
    int k = 2;
    std::array<double, 4> db{3, 4, 5, 6};
    LatticeConfig c = config_for(N, db);
    auto r = c.r();
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; trial++) {
        MacronodeAngles a = random_operate_angles(rng);
        Eigen::Matrix4d S = s_of_theta(a);
        Eigen::MatrixXd out(4, 0), in(4, 0);
        Eigen::VectorXd var;
        for (int q = 0; q < 2; q++) {
            double ro = q == 0 ? M_PI / 2 : 0;
            AngleSchedule s;
            s.N = N;
            for (int j = 0; j < 6; j++) {
                s.push(j == k ? MacronodeRole::operate(a) : MacronodeRole::readout(ro));
            }
            LinearOutcomeMap map = build_outcome_map(s, c);
            const auto &lay = map.layout;
            var = map.source_variance;
            if (out.cols() == 0) {
                out = Eigen::MatrixXd::Zero(4, lay.n_columns());
                in = Eigen::MatrixXd::Zero(4, lay.n_columns());
                for (int qq = 0; qq < 2; qq++) {
                    in(qq, lay.column(k - 1, 0, qq)) = M_SQRT1_2;
                    in(qq, lay.column(k - 1, 1, qq)) = M_SQRT1_2;
                    in(2 + qq, lay.column(k - N, 2, qq)) = M_SQRT1_2;
                    in(2 + qq, lay.column(k - N, 3, qq)) = M_SQRT1_2;
                }
            }
            out.row(q) = map.readout_rows(k + 1).row(1);
            out.row(2 + q) = map.readout_rows(k + N).row(3);
        }
        Eigen::MatrixXd noise = out - S * in;
        Eigen::MatrixXd cross = noise * var.asDiagonal() * in.transpose();
        ASSERT_LT(cross.cwiseAbs().maxCoeff(), 1e-10);
        Eigen::MatrixXd ncov = noise * var.asDiagonal() * noise.transpose();
        Eigen::Matrix4d expected = Eigen::Vector4d(
            std::exp(-2 * r[1]), std::exp(-2 * r[0]), std::exp(-2 * r[3]), std::exp(-2 * r[2])).asDiagonal();
        ASSERT_LT((ncov - expected).cwiseAbs().maxCoeff(), 1e-10) << ncov;
    }
}

TEST(lattice, readout_values_rejects_operate) {
    EXPECT_THROW(readout_values(Eigen::Vector4d::Zero(), MacronodeRole::operate(MacronodeAngles(0, 1, 0, 1))),
                 MisuseError);
    Eigen::Vector4d m(1, 2, 3, 4);
    Eigen::Vector4d v = readout_values(m, MacronodeRole::readout(0));
    EXPECT_LT((four_splitter() * v - m).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(lattice, padding_and_capacity) {
    AngleSchedule s;
    s.N = 2;
    s.push(MacronodeRole::readout(0));
    LatticeConfig c = config_for(2, {1, 1, 1, 1});
    c.total_macronodes = 5;
    EXPECT_EQ(padded_schedule(s, c).size(), 5);
    LinearOutcomeMap map = build_outcome_map(s, c);
    EXPECT_EQ(map.n_macronodes(), 5);
    c.N = 3;
    EXPECT_THROW(padded_schedule(s, c), ConfigError);
    LatticeConfig big = config_for(2, {1, 1, 1, 1});
    AngleSchedule many;
    many.N = 2;
    for (int k = 0; k < 200; k++) {
        many.push(MacronodeRole::readout(0));
    }
    EXPECT_THROW(build_outcome_map(many, big, FeedforwardMode::Numerical, 1000), CapacityError);
}

TEST(lattice, streaming_matches_map_sampler) {
    for (bool lossy : {false, true}) {
        AngleSchedule s = random_schedule(3, 12, 41);
        LatticeConfig c = config_for(3, {3, 4, 5, 6}, lossy ? 0.85 : 1, lossy ? 0.7 : 1);
        LinearOutcomeMap map = build_outcome_map(s, c);
        auto recs = sample_trials(map, c, 10, 5);
        StreamingSampler sampler(s, c);
        for (const auto &rec : recs) {
            TrialRecord st = sampler.record(rec.trial_index);
            ASSERT_EQ(st.processed.size(), rec.processed.size());
            for (size_t i = 0; i < rec.processed.size(); i++) {
                ASSERT_NEAR(st.processed[i], rec.processed[i], 1e-9);
                ASSERT_NEAR(st.raw[i], rec.raw[i], 1e-9);
            }
        }
    }
}

TEST(lattice, streaming_observed_subset) {
    AngleSchedule s = random_schedule(2, 10, 5);
    LatticeConfig c = config_for(2, {4, 4, 4, 4});
    StreamingSampler full(s, c);
    StreamingSampler part(s, c);
    part.set_observed({7, 3, 3});
    ASSERT_EQ(part.observed().size(), 2u);
    TrialRecord a = full.record(4);
    TrialRecord b = part.record(4);
    for (int J = 0; J < 4; J++) {
        EXPECT_EQ(b.processed[J], a.processed[4 * 3 + J]);
        EXPECT_EQ(b.processed[4 + J], a.processed[4 * 7 + J]);
    }
    EXPECT_THROW(part.set_observed({10}), InvalidArgument);
}

TEST(lattice, trials_are_deterministic) {
    AngleSchedule s = random_schedule(3, 8, 2);
    LatticeConfig c = config_for(3, {4, 4, 4, 4});
    StreamingSampler sampler(s, c);
    EXPECT_EQ(sampler.record(3).processed, sampler.record(3).processed);
    EXPECT_NE(sampler.record(3).processed, sampler.record(4).processed);
    LatticeConfig c2 = c;
    c2.seed = 100;
    StreamingSampler other(s, c2);
    EXPECT_NE(sampler.record(3).processed, other.record(3).processed);
    // Trial t does not depend on which trials ran before it.
    std::vector<double> seen;
    sampler.run(2, 3, [&](uint64_t t, const double *proc, const double *) {
        if (t == 3) {
            seen.assign(proc, proc + 4 * sampler.observed().size());
        }
    });
    EXPECT_EQ(seen, sampler.record(3).processed);
}

TEST(lattice, streaming_moments) {
    // Sample variances of a p nullifier and of a vacuum readout against exact values.
    int N = 3;
    AngleSchedule s;
    s.N = N;
    for (int k = 0; k < 6; k++) {
        s.push(MacronodeRole::readout(0));
    }
    double db = 6;
    LatticeConfig c = config_for(N, {db, db, db, db});
    StreamingSampler sampler(s, c);
    double sum = 0, sum2 = 0;
    int n = 20000;
    sampler.run(0, n, [&](uint64_t, const double *proc, const double *) {
        Eigen::Vector4d m0(proc), m1(proc + 4);
        Eigen::Vector4d v0 = four_splitter().transpose() * m0;
        Eigen::Vector4d v1 = four_splitter().transpose() * m1;
        double nul = (v0[0] + v1[1]) * M_SQRT1_2;
        sum += nul;
        sum2 += nul * nul;
    });
    double var = sum2 / n - (sum / n) * (sum / n);
    double expect = std::exp(-2 * squeezing_r_from_db(db)) / 2;
    EXPECT_NEAR(var, expect, 5 * expect * std::sqrt(2.0 / n));
}

TEST(lattice, binary_frame_round_trip) {
    AngleSchedule s = random_schedule(2, 6, 9);
    LatticeConfig c = config_for(2, {4, 4, 4, 4});
    StreamingSampler sampler(s, c);
    sampler.set_observed({1, 4});
    std::vector<TrialRecord> recs;
    for (uint64_t t = 0; t < 3; t++) {
        recs.push_back(sampler.record(t));
    }
    std::stringstream ss;
    write_records_binary(ss, recs, c.hash_value());
    uint64_t h = 0;
    auto back = read_records_binary(ss, &h);
    EXPECT_EQ(h, c.hash_value());
    ASSERT_EQ(back.size(), 3u);
    for (size_t i = 0; i < 3; i++) {
        EXPECT_EQ(back[i].trial_index, recs[i].trial_index);
        EXPECT_EQ(back[i].macronodes, recs[i].macronodes);
        EXPECT_EQ(back[i].processed, recs[i].processed);
        EXPECT_EQ(back[i].raw, recs[i].raw);
    }
    std::stringstream bad("QRLX");
    EXPECT_THROW(read_records_binary(bad), ParseError);
    std::stringstream ss2;
    write_records_binary(ss2, recs, 1);
    std::stringstream cut(ss2.str().substr(0, 40));
    EXPECT_THROW(read_records_binary(cut), ParseError);
}

TEST(lattice, csv_records_round_trip_values) {
    AngleSchedule s = random_schedule(2, 4, 1);
    LatticeConfig c = config_for(2, {4, 4, 4, 4});
    StreamingSampler sampler(s, c);
    sampler.set_observed({2});
    std::vector<TrialRecord> recs{sampler.record(0)};
    std::stringstream ss;
    write_records_csv(ss, recs);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "trial,macronode,port,raw,processed");
    for (int J = 0; J < 4; J++) {
        ASSERT_TRUE(std::getline(ss, line));
        std::stringstream ls(line);
        std::string f[5];
        for (auto &x : f) {
            std::getline(ls, x, ',');
        }
        EXPECT_EQ(f[1], "2");
        EXPECT_EQ(std::stod(f[4]), recs[0].processed[J]);
    }
}
