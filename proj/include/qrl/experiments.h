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

#ifndef QRL_EXPERIMENTS_H
#define QRL_EXPERIMENTS_H

#include <string>
#include <vector>

#include "qrl/estimator.h"
#include "qrl/program.h"

namespace qrl {

/// Shared drivers behind the CLI subcommands, the acceptance binary and the Python module.
/// threads = 0 uses every hardware thread; results do not depend on it.

// ---- nullifiers ----

/// All-readout schedule of N * (steps + 1) macronodes in one basis.
AngleSchedule nullifier_schedule(int N, int steps, Basis basis);
NullifierReport run_nullifiers(const LatticeConfig &config, int steps, Basis basis, uint64_t trials, unsigned threads = 0);

// ---- tomography ----

/// Crossed single-mode teleportation V(phi_plus, phi_minus) on both rails.
MacronodeAngles single_mode_angles(double phi_plus, double phi_minus);

/// Block of 2N + 1 macronodes: references c_0 (macronode 0) and a_{N-1} (macronode N - 1), the gate
/// at macronode N, outputs b_{N+1} and d_{2N}. With gate == nullptr macronode N is read instead
/// (inputs b_N, d_N).
AngleSchedule tomography_schedule(int N, const MacronodeAngles *gate, BasisConfig cfg);

struct TomographyCorrelations {
    CorrelationMatrix out_ref;
    CorrelationMatrix in_ref;
};

/// <q_in q_ref^T>, measured once ahead of the gate runs (trials [first, first + n)).
CorrelationMatrix measure_input_correlation(
    const LatticeConfig &config, uint64_t first_trial, uint64_t trials, unsigned threads = 0);
CorrelationMatrix measure_output_correlation(
    const LatticeConfig &config, const MacronodeAngles &gate, uint64_t first_trial, uint64_t trials,
    unsigned threads = 0);
/// Exact correlations from the outcome maps of the four configurations.
TomographyCorrelations oracle_correlations(const LatticeConfig &config, const MacronodeAngles &gate);

enum class TomographyFamily { SingleMode, GeneralizedCZ };

struct TomographyGrid {
    TomographyFamily family = TomographyFamily::SingleMode;
    /// phi_plus / phi_minus for SingleMode, g / h for GeneralizedCZ; inclusive ranges.
    double u_min = -M_PI, u_max = M_PI;
    int u_points = 8;
    double v_min = M_PI / 6, v_max = 5 * M_PI / 6;
    int v_points = 6;
    /// Drop the upper end of u (periodic angle grids).
    bool u_periodic = true;

    static TomographyGrid single_mode(int u_points = 8, int v_points = 6);
    static TomographyGrid generalized_cz(int points = 5);
    std::vector<std::pair<double, double>> points() const;
};

struct TomographyPoint {
    double u = 0, v = 0;
    Eigen::Matrix4d theory = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d estimate = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d stderr_ = Eigen::Matrix4d::Zero();
    double error = 0;
};

struct TomographyResult {
    std::vector<TomographyPoint> points;
    /// Points dropped for touching the degeneracy band.
    int skipped = 0;
    double mean_error() const;
    double stddev_error() const;
};

/// MacronodeAngles and closed-form matrix for one grid point.
std::pair<MacronodeAngles, Eigen::Matrix4d> tomography_target(TomographyFamily family, double u, double v);

/// oracle = true uses exact correlations instead of Monte Carlo.
TomographyResult run_tomography(
    const LatticeConfig &config, const TomographyGrid &grid, uint64_t trials_per_point, uint64_t reference_trials,
    bool oracle = false, unsigned threads = 0);

// ---- teleportation ----

enum class TeleportKind {
    /// Every column teleported `steps` times along +N.
    Parallel,
    /// Column c read after c teleports (steps = N - 1 gives one mode per step 0..N-1).
    Staggered,
    /// One mode teleported `steps` times along +1.
    Helical,
};

struct TeleportSetup {
    AngleSchedule schedule;
    std::vector<TeleportProbe> probes;
};

constexpr double kTeleportInputAmplitude = 5;

TeleportSetup teleport_setup(TeleportKind kind, int N, int steps, Basis basis);

/// x-configuration trials [first, first + n), p-configuration [first + n, first + 2n).
TeleportMetrics run_teleport(
    const LatticeConfig &config, TeleportKind kind, int steps, uint64_t trials, uint64_t first_trial = 0,
    unsigned threads = 0);

/// Least-squares line through (step, noise); returns slope, intercept and max |residual| / fit.
/// With standard errors the fit is weighted by 1 / se^2.
struct LineFit {
    double slope = 0, intercept = 0, max_rel_residual = 0;
};
LineFit fit_noise_line(
    const std::vector<double> &steps, const std::vector<double> &noise, const std::vector<double> &stderr_ = {});

// ---- initialization ----

struct InitMomentCheck {
    double theta = 0;
    /// x(-theta), p(-theta) of (b, k+1) then (d, k+N).
    std::array<double, 4> sampled{}, stderr_{}, theory{};
    uint64_t trials = 0;
    double max_z() const;
};
InitMomentCheck run_init_moments(const LatticeConfig &config, double theta, uint64_t trials, unsigned threads = 0);

// ---- routing ----

struct RouteDemo {
    RoutedSchedule routed;
    std::vector<double> input_x, input_p;
    /// Per output slot.
    std::vector<double> exact_x, exact_p;
    std::vector<double> mean_x, mean_p, se_x, se_p, var_x, var_x_se;
    /// Closed-form x variance of the initialized input that reached each slot.
    std::vector<double> input_var_x;
    std::vector<int> transits;
    uint64_t trials = 0;
    bool exact_sorted = false;
};

/// Random keys x uniform in [-5, 5] and p = 5 from the seed.
RoutingRequest random_route_request(RoutingRequest::Order order, int n_modes, uint64_t seed);
RouteDemo run_route_demo(const LatticeConfig &config, const RoutingRequest &req, uint64_t trials, unsigned threads = 0);

// ---- oracle equivalence ----

struct OracleCheck {
    uint64_t trials = 0;
    int entries = 0;
    double max_z = 0;
};
/// Streaming sample covariance of every processed outcome vs M Sigma0 M^T.
OracleCheck run_oracle_equivalence(
    const LatticeConfig &config, const AngleSchedule &schedule, uint64_t trials, unsigned threads = 0);

// ---- simulation records ----

std::vector<TrialRecord> simulate_records(
    const AngleSchedule &schedule, const LatticeConfig &config, uint64_t first_trial, uint64_t trials,
    const std::vector<int64_t> &observed = {});

// ---- metric tables ----

MetricsTable tomography_table(const TomographyResult &r, const TomographyGrid &grid, const LatticeConfig &config);
MetricsTable route_table(const RouteDemo &d, const LatticeConfig &config);

}  // namespace qrl

#endif
