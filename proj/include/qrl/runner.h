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

#ifndef QRL_RUNNER_H
#define QRL_RUNNER_H

#include <optional>
#include <string>
#include <vector>

#include "qrl/experiments.h"

namespace qrl {

/// Everything a command needs. Built from a flat `key = value` file, then overridden by flags.
struct RunConfig {
    LatticeConfig lattice;
    uint64_t trials = 10000;
    unsigned threads = 0;
    std::string format = "csv";

    // nullifiers
    int steps = 10;
    Basis basis = Basis::P;

    // tomography
    TomographyFamily family = TomographyFamily::SingleMode;
    std::optional<double> u_min, u_max, v_min, v_max;
    std::optional<int> u_points, v_points;
    /// 0 means 4 * trials.
    uint64_t reference_trials = 0;
    bool oracle = false;

    // teleport
    TeleportKind kind = TeleportKind::Parallel;
    bool streaming = true;
    uint64_t first_trial = 0;

    // route
    RoutingRequest::Order order = RoutingRequest::Order::Ascending;
    int modes = 8;
    uint64_t route_seed = 1;

    /// Throws ConfigError for unknown keys or bad values.
    void set(const std::string &key, const std::string &value);
    void validate() const;
    TomographyGrid grid() const;
};

/// Lines of `key = value`; blank lines and `#` comments are ignored.
RunConfig parse_run_config(const std::string &text, RunConfig base = {});

/// Non-streaming teleport runs store every outcome; refused beyond this many steps.
constexpr int kMaxNonStreamingSteps = 10000;

MetricsTable cmd_nullifiers(const RunConfig &rc);
/// Grid points inside the degeneracy band are skipped; their count goes to *skipped.
MetricsTable cmd_tomography(const RunConfig &rc, int *skipped = nullptr);
MetricsTable cmd_teleport(const RunConfig &rc);
MetricsTable cmd_route(const RunConfig &rc);
/// Program text to schedule text.
std::string cmd_compile(const std::string &program_text, const RunConfig &rc);
/// Schedule text to records for trials [first_trial, first_trial + trials).
std::vector<TrialRecord> cmd_simulate(const std::string &schedule_text, const RunConfig &rc);

std::string experiment_name(TeleportKind kind);
std::string table_text(const MetricsTable &t, const std::string &format);
/// csv, json or bin.
std::string records_text(const std::vector<TrialRecord> &records, const std::string &format, uint64_t config_hash);

}  // namespace qrl

#endif
