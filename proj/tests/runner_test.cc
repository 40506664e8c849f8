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

#include "qrl/runner.h"

#include <gtest/gtest.h>

#include "qrl/errors.h"

using namespace qrl;

TEST(RunConfig, flatKeysAndComments) {
    RunConfig rc = parse_run_config(
        "# sweep\n"
        "N = 7\n"
        "squeezing_db = 4.5, 3, 6, 5\n"
        "seed=9   # trailing\n"
        "\n"
        "kind = helical\n"
        "family = cz\n"
        "u_points = 3\n");
    EXPECT_EQ(rc.lattice.N, 7);
    EXPECT_EQ(rc.lattice.squeezing_db[2], 6);
    EXPECT_EQ(rc.lattice.seed, 9u);
    EXPECT_EQ(rc.kind, TeleportKind::Helical);
    TomographyGrid g = rc.grid();
    EXPECT_EQ(g.family, TomographyFamily::GeneralizedCZ);
    EXPECT_EQ(g.u_points, 3);
    EXPECT_EQ(g.u_min, -2);
    EXPECT_NO_THROW(rc.validate());
    rc.set("squeezing_db", "5");
    EXPECT_EQ(rc.lattice.squeezing_db[3], 5);
}

TEST(RunConfig, rejectsBadInput) {
    EXPECT_THROW(parse_run_config("N 7\n"), ConfigError);
    EXPECT_THROW(parse_run_config("colour = red\n"), ConfigError);
    EXPECT_THROW(parse_run_config("trials = many\n"), ConfigError);
    EXPECT_THROW(parse_run_config("basis = q\n"), ConfigError);
    EXPECT_THROW(parse_run_config("squeezing_db = 1,2\n"), ConfigError);
    EXPECT_THROW(parse_run_config("trials = 0\n").validate(), ConfigError);
    EXPECT_THROW(parse_run_config("v_points = 0\n").validate(), ConfigError);
    EXPECT_THROW(parse_run_config("N = 1\n").validate(), ConfigError);
    EXPECT_THROW(parse_run_config("format = xml\n").validate(), ConfigError);
}

TEST(Runner, commandsAreReproducible) {
    RunConfig rc = parse_run_config("N = 3\ntrials = 500\nkind = helical\nsteps = 2\nseed = 4\n");
    std::string a = table_text(cmd_teleport(rc), "csv");
    rc.threads = 1;
    EXPECT_EQ(a, table_text(cmd_teleport(rc), "csv"));
    rc.lattice.seed = 5;
    EXPECT_NE(a, table_text(cmd_teleport(rc), "csv"));
}

TEST(Runner, nonStreamingGuard) {
    RunConfig rc = parse_run_config("N = 3\ntrials = 400\nkind = helical\nsteps = 3\nstreaming = false\n");
    MetricsTable t = cmd_teleport(rc);
    EXPECT_EQ(t.get(3, 0, "classical_benchmark"), 4);
    double g = t.get(3, 0, "gain_x");
    EXPECT_NEAR(g, 1, 0.2);
    rc.steps = kMaxNonStreamingSteps + 1;
    EXPECT_THROW(cmd_teleport(rc), ConfigError);
}

TEST(Runner, compileAndSimulate) {
    RunConfig rc = parse_run_config("N = 3\ntrials = 3\n");
    std::string sched = cmd_compile("qrl-program v1\nmodes 1\ninit 0 0 1 2\ngate rotation 0 0.3\nmeasure 0 0\n", rc);
    EXPECT_EQ(sched.rfind("qrl-schedule v1\n", 0), 0u);
    auto recs = cmd_simulate(sched, rc);
    ASSERT_EQ(recs.size(), 3u);
    std::string bin = records_text(recs, "bin", rc.lattice.hash_value());
    std::istringstream in(bin);
    uint64_t h = 0;
    auto back = read_records_binary(in, &h);
    EXPECT_EQ(h, rc.lattice.hash_value());
    EXPECT_EQ(back[2].processed, recs[2].processed);
    EXPECT_NE(records_text(recs, "json", 0).find("\"processed\""), std::string::npos);
    EXPECT_THROW(cmd_compile("qrl-program v1\nmodes 1\ngate nope 0\n", rc), ParseError);
}

TEST(Runner, tomographyOracleTable) {
    RunConfig rc = parse_run_config("N = 2\noracle = true\nu_points = 2\nv_points = 2\n");
    int skipped = -1;
    MetricsTable t = cmd_tomography(rc, &skipped);
    EXPECT_EQ(skipped, 0);
    EXPECT_LT(t.get(-1, -1, "mean_frobenius_error"), 1e-9);
    EXPECT_EQ(t.get(0, 0, "S_theory"), t.get(0, 0, "S_theory"));
}
