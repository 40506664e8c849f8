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

#include "qrl/estimator.h"

#include <cmath>
#include <gtest/gtest.h>
#include <random>
#include <sstream>

#include "qrl/errors.h"

using namespace qrl;

namespace {

MacronodeAngles random_angles(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-M_PI, M_PI);
    while (true) {
        MacronodeAngles a(u(rng), u(rng), u(rng), u(rng));
        if (!a.is_degenerate() && std::abs(std::sin(a.theta[1] - a.theta[0])) > 0.2 &&
            std::abs(std::sin(a.theta[3] - a.theta[2])) > 0.2) {
            return a;
        }
    }
}

AngleSchedule all_readout(int N, int T, Basis b) {
    AngleSchedule s;
    s.N = N;
    for (int k = 0; k < T; k++) {
        s.push(MacronodeRole::readout(basis_angle(b)));
    }
    return s;
}

// Reference a at k0 - 1, then m crossed identities, output b at k0 + m.
AngleSchedule helical(int N, int k0, int m, Basis b) {
    AngleSchedule s = all_readout(N, k0 + m + 1, b);
    s.roles[k0 - 1].displacement = Eigen::Vector4d(5, 5, 0, 0);
    for (int i = 0; i < m; i++) {
        s.roles[k0 + i] = MacronodeRole::operate(angles_for(GateSpec::crossed_teleport())[0]);
    }
    return s;
}

}  // namespace

TEST(MomentAccumulator, mergeMatchesSinglePass) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    MomentAccumulator all(3), a(3), b(3);
    for (int i = 0; i < 1000; i++) {
        double x[3] = {g(rng), 2 * g(rng) + 1, g(rng)};
        x[2] += x[0];
        all.add(x);
        (i < 377 ? a : b).add(x);
    }
    a.merge(b);
    EXPECT_EQ(a.count(), 1000u);
    EXPECT_LT((a.mean() - all.mean()).norm(), 1e-12);
    EXPECT_LT((a.covariance() - all.covariance()).norm(), 1e-12);
    EXPECT_THROW(a.merge(MomentAccumulator(3, 7)), InvalidArgument);
    EXPECT_THROW(a.merge(MomentAccumulator(2)), InvalidArgument);
}

TEST(MomentAccumulator, foldIsThreadIndependent) {
    auto fn = [](uint64_t first, uint64_t n, MomentAccumulator &acc) {
        for (uint64_t t = first; t < first + n; t++) {
            auto rng = trial_rng(3, t);
            std::normal_distribution<double> g;
            double x[2] = {g(rng), g(rng)};
            acc.add(x);
        }
    };
    auto one = fold_trial_blocks(10000, MomentAccumulator(2), fn, 1000, 1);
    auto four = fold_trial_blocks(10000, MomentAccumulator(2), fn, 1000, 4);
    EXPECT_EQ(one.mean(), four.mean());
    EXPECT_EQ(one.covariance(), four.covariance());
}

TEST(Estimator, decibels) {
    EXPECT_NEAR(db(0.355), -4.4977, 1e-3);
    EXPECT_NEAR(db(2), 3.0103, 1e-4);
    EXPECT_NEAR(inverse_db(db(0.7)), 0.7, 1e-12);
    EXPECT_NEAR(db(std::exp(-2 * squeezing_r_from_db(4.5))), -4.5, 1e-12);
}

TEST(Estimator, frobenius) {
    Eigen::Matrix4d S = s_of_theta(MacronodeAngles(0.3, 1.2, -0.4, 0.9));
    EXPECT_NEAR(frobenius_error(1.1 * S, S), 0.1, 1e-12);
    EXPECT_EQ(frobenius_error(S, S), 0);
    EXPECT_THROW(frobenius_error(S, Eigen::Matrix4d::Zero()), InvalidArgument);
}

TEST(Estimator, recoversGateFromExactCorrelations) {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; t++) {
        Eigen::Matrix4d S = s_of_theta(random_angles(rng));
        Eigen::Matrix4d A;
        for (int i = 0; i < 16; i++) {
            A.data()[i] = g(rng);
        }
        CorrelationMatrix in, out;
        in.value = A + 4 * Eigen::Matrix4d::Identity();
        in.stderr_ = Eigen::Matrix4d::Zero();
        in.samples = out.samples = 1000;
        out.value = S * in.value;
        out.stderr_ = Eigen::Matrix4d::Zero();
        MatrixEstimate e = estimate_S(out, in);
        EXPECT_LT((e.value - S).cwiseAbs().maxCoeff(), 1e-9 * std::max(1.0, S.cwiseAbs().maxCoeff()));
    }
    CorrelationMatrix sing, out;
    sing.value = Eigen::Matrix4d::Zero();
    sing.stderr_ = Eigen::Matrix4d::Zero();
    sing.samples = 1000;
    out = sing;
    EXPECT_THROW(estimate_S(out, sing), EstimationSingularity);
}

TEST(Estimator, tomographyPlan) {
    auto plan = measurement_plan_for_tomography(2);
    ASSERT_EQ(plan.size(), 4u);
    for (Basis r : {Basis::X, Basis::P}) {
        for (Basis o : {Basis::X, Basis::P}) {
            EXPECT_EQ(std::count(plan.begin(), plan.end(), BasisConfig{r, o}), 1);
        }
    }
    EXPECT_EQ(plan_index_for_trial(plan, 9), 1u);
    EXPECT_THROW(measurement_plan_for_tomography(0), InvalidArgument);
}

TEST(Estimator, correlationAssembly) {
    auto plan = measurement_plan_for_tomography(1);
    std::vector<MomentAccumulator> acc(4, MomentAccumulator(2));
    for (size_t i = 0; i < 4; i++) {
        double v = (double)i + 1;
        double a[2] = {v, 1}, b[2] = {-v, -1};
        acc[i].add(a);
        acc[i].add(b);
    }
    CorrelationMatrix c = correlation_from_configs(plan, acc, 1, 1);
    for (size_t i = 0; i < 4; i++) {
        int qo = plan[i].out == Basis::X ? 0 : 1;
        int qr = plan[i].ref == Basis::X ? 0 : 1;
        EXPECT_DOUBLE_EQ(c.value(qo, qr), (double)i + 1);
    }
    EXPECT_THROW(correlation_from_configs({plan[0]}, {acc[0]}, 1, 1), InvalidArgument);
}

TEST(Nullifier, monteCarloMatchesSqueezing) {
    LatticeConfig config = LatticeConfig::with_squeezing(5, 4.5);
    config.squeezing_db = {4.5, 3, 6, 5};
    for (Basis b : {Basis::P, Basis::X}) {
        AngleSchedule s = all_readout(5, 20, b);
        StreamingSampler sampler(s, config);
        auto acc = fold_trial_blocks(
            20000, NullifierAccumulator(s, b),
            [&](uint64_t first, uint64_t n, NullifierAccumulator &a) {
                sampler.run(first, n, [&](uint64_t, const double *p, const double *) { a.add(p); });
            },
            2048);
        NullifierReport rep = acc.report();
        ASSERT_EQ(rep.ratio.size(), 3u);
        for (size_t m = 0; m < rep.ratio.size(); m++) {
            for (int j = 0; j < 4; j++) {
                bool squeezed = (b == Basis::P) == (j == 0 || j == 2);
                double want = squeezed ? -config.squeezing_db[j] : config.squeezing_db[j];
                EXPECT_NEAR(rep.db[m][j], want, 0.1) << basis_char(b) << " m " << m << " j " << j;
                EXPECT_LT(rep.db_stderr[m][j], 0.05);
            }
        }
    }
    AngleSchedule mixed = all_readout(5, 20, Basis::P);
    mixed.roles[3] = MacronodeRole::readout(M_PI / 2);
    EXPECT_THROW(NullifierAccumulator(mixed, Basis::P), MisuseError);
    NullifierAccumulator a(all_readout(5, 20, Basis::P), Basis::P, 1), b(all_readout(5, 20, Basis::P), Basis::P, 2);
    EXPECT_THROW(a.merge(b), InvalidArgument);
}

TEST(Teleport, witnessGrowsWithTeleports) {
    LatticeConfig config = LatticeConfig::with_squeezing(3, 4.5);
    double e = std::exp(-2 * squeezing_r_from_db(4.5));
    for (int m : {0, 1, 2}) {
        int k0 = 4;
        TeleportProbe probe;
        probe.step = m;
        probe.ref_macronode = k0 - 1;
        probe.ref_mode = 0;
        probe.out_macronode = k0 + m;
        probe.out_mode = 1;
        probe.input_mean = Eigen::Vector2d(5, 5);
        TeleportAccumulator acc({probe});
        for (Basis b : {Basis::X, Basis::P}) {
            StreamingSampler sampler(helical(3, k0, m, b), config);
            sampler.set_observed(acc.observed());
            sampler.run(b == Basis::X ? 0 : 1000000, 20000, [&](uint64_t, const double *p, const double *) {
                acc.add(b, p);
            });
        }
        TeleportPoint pt = acc.metrics().points[0];
        EXPECT_NEAR(pt.noise, (1 + m) * e, 5 * pt.noise_se) << "m " << m;
        EXPECT_NEAR(pt.gain_x, 1, 5 * pt.gain_x_se);
        EXPECT_NEAR(pt.gain_p, 1, 5 * pt.gain_p_se);
        EXPECT_EQ(pt.classical_benchmark, 1 + m);
    }
    TeleportProbe zero;
    zero.ref_macronode = 0;
    zero.out_macronode = 1;
    TeleportAccumulator z({zero});
    double v[8] = {1, 2, 3, 4, 5, 6, 7, 8}, w[8] = {0, 1, 0, 1, 0, 1, 0, 1};
    z.add(Basis::X, v);
    z.add(Basis::X, w);
    z.add(Basis::P, v);
    z.add(Basis::P, w);
    EXPECT_THROW(z.metrics(true), IllConditionedGain);
}

TEST(MetricsTable, csvRoundTripAndHashGuard) {
    LatticeConfig config = LatticeConfig::with_squeezing(4, 4.5);
    NullifierReport rep;
    rep.basis = Basis::P;
    rep.N = 4;
    rep.trials = 10;
    rep.ratio = {{0.35, 2.8, 0.36, 2.7}};
    rep.ratio_stderr = {{0.01, 0.1, 0.01, 0.1}};
    rep.db = {{db(0.35), db(2.8), db(0.36), db(2.7)}};
    rep.db_stderr = {{0.1, 0.1, 0.1, 0.1}};
    MetricsTable t = metrics_table(rep, "nullifiers", config);
    std::stringstream ss;
    t.write_csv(ss);
    MetricsTable back = MetricsTable::read_csv(ss);
    EXPECT_EQ(back.config_hash, config.hash());
    EXPECT_EQ(back.rows.size(), t.rows.size());
    for (size_t i = 0; i < t.rows.size(); i++) {
        EXPECT_EQ(back.rows[i].quantity, t.rows[i].quantity);
        EXPECT_EQ(back.rows[i].value, t.rows[i].value);
    }
    MetricsTable other = metrics_table(rep, "nullifiers", LatticeConfig::with_squeezing(4, 5));
    EXPECT_THROW(t.append(other), InvalidArgument);
    std::stringstream js;
    t.write_json(js);
    EXPECT_NE(js.str().find("\"config_hash\""), std::string::npos);
}
