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

#ifndef QRL_ESTIMATOR_H
#define QRL_ESTIMATOR_H

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <thread>
#include <vector>

#include "qrl/lattice.h"

namespace qrl {

/// Streaming mean and covariance of a fixed-size vector. Merging is exact (pairwise update),
/// so folding fixed blocks in a fixed order gives results independent of thread count.
class MomentAccumulator {
   public:
    explicit MomentAccumulator(int dim = 0, uint64_t tag = 0);

    void add(const double *x);
    void add(const Eigen::VectorXd &x) {
        add(x.data());
    }
    /// Throws InvalidArgument when dimensions or tags (config hashes) differ.
    void merge(const MomentAccumulator &other);

    int dim() const {
        return (int)mean_.size();
    }
    uint64_t count() const {
        return n_;
    }
    uint64_t tag() const {
        return tag_;
    }
    const Eigen::VectorXd &mean() const {
        return mean_;
    }
    /// Unbiased sample covariance.
    Eigen::MatrixXd covariance() const;
    /// <x x^T> about zero.
    Eigen::MatrixXd second_moment() const;
    Eigen::VectorXd mean_stderr() const;
    /// Standard error of each unbiased covariance entry, Gaussian approximation.
    Eigen::MatrixXd covariance_stderr() const;

   private:
    uint64_t n_ = 0;
    uint64_t tag_ = 0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd m2_;
};

/// Folds trials [0, n) in fixed-size blocks, possibly on several threads, merging in block order.
/// fn(first, count, acc) must fill acc from that block only.
template <typename Acc, typename Fn>
Acc fold_trial_blocks(uint64_t n_trials, const Acc &proto, Fn &&fn, uint64_t block = 4096, unsigned threads = 0) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    uint64_t n_blocks = (n_trials + block - 1) / block;
    std::vector<Acc> parts(n_blocks, proto);
    auto worker = [&](unsigned w) {
        for (uint64_t b = w; b < n_blocks; b += threads) {
            uint64_t first = b * block;
            fn(first, std::min(block, n_trials - first), parts[b]);
        }
    };
    if (threads <= 1 || n_blocks <= 1) {
        threads = 1;
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; w++) {
            pool.emplace_back(worker, w);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    Acc out = proto;
    for (const auto &p : parts) {
        out.merge(p);
    }
    return out;
}

/// Symmetric-ordered quadrature products <q_a q_b> with per-entry standard errors.
struct CorrelationMatrix {
    Eigen::MatrixXd value;
    Eigen::MatrixXd stderr_;
    uint64_t samples = 0;

    void validate() const;
};

enum class Basis { X, P };
/// Readout angle measuring x (pi/2) or p (0).
double basis_angle(Basis b);
char basis_char(Basis b);

/// One tomography basis configuration: every reference readout in ref, every output in out.
struct BasisConfig {
    Basis ref = Basis::X;
    Basis out = Basis::X;
    bool operator==(const BasisConfig &other) const = default;
};

/// Configurations needed to fill all xx, xp, px, pp entries. Ports are read jointly, so the same
/// four configurations serve any number of mode pairs.
std::vector<BasisConfig> measurement_plan_for_tomography(int n_mode_pairs);
/// Round-robin assignment of trials to configurations.
size_t plan_index_for_trial(const std::vector<BasisConfig> &plan, uint64_t trial);

/// Per-configuration accumulators over the vector (out modes..., ref modes...), one value per
/// mode in that configuration's basis. Assembles <q_out q_ref^T> in (x, p) interleaved order.
CorrelationMatrix correlation_from_configs(
    const std::vector<BasisConfig> &plan, const std::vector<MomentAccumulator> &per_config, int n_out_modes,
    int n_ref_modes);

struct MatrixEstimate {
    Eigen::MatrixXd value;
    Eigen::MatrixXd stderr_;
};

/// S = C_out_ref C_in_ref^-1 with first-order error propagation.
MatrixEstimate estimate_S(const CorrelationMatrix &out_ref, const CorrelationMatrix &in_ref);

double frobenius_error(const Eigen::MatrixXd &estimate, const Eigen::MatrixXd &theory);

double db(double ratio);
double inverse_db(double decibels);
/// Standard error in dB of a ratio with standard error se.
double db_stderr(double ratio, double se);

/// Nullifier variances per step m and source j (A..D), as ratios to the vacuum value and in dB.
struct NullifierReport {
    Basis basis = Basis::P;
    int N = 0;
    std::vector<std::array<double, 4>> ratio, ratio_stderr, db, db_stderr;
    uint64_t trials = 0;
};

/// Accumulates the squeezed-source combinations of an all-x or all-p readout run. In the p basis
/// these are (p_a,k + p_b,k+1)/sqrt2 = p_A,k and (p_c,k + p_d,k+N)/sqrt2 = p_C,k plus the
/// anti-squeezed differences giving p_B,k and p_D,k; the x basis gives x_B, x_D and x_A, x_C.
/// Each combination has vacuum variance 1/2.
class NullifierAccumulator {
   public:
    NullifierAccumulator() = default;
    NullifierAccumulator(const AngleSchedule &schedule, Basis basis, uint64_t tag = 0);

    /// processed: 4 values per macronode for the whole schedule.
    void add(const double *processed);
    void merge(const NullifierAccumulator &other);
    NullifierReport report() const;

   private:
    Basis basis_ = Basis::P;
    int N_ = 0;
    int64_t T_ = 0;
    uint64_t tag_ = 0;
    uint64_t n_ = 0;
    // Per macronode k, per source j: sum and sum of squares.
    std::vector<double> sum_, sum2_;
};

NullifierReport nullifier_variances(const std::vector<TrialRecord> &trials, const AngleSchedule &schedule, Basis basis);

/// A teleported mode: reference read at one macronode, output at a later one.
struct TeleportProbe {
    int step = 0;
    int mode = 0;
    int64_t ref_macronode = 0;
    int ref_mode = 0;  // 0 = a, 2 = c
    int64_t out_macronode = 0;
    int out_mode = 1;  // 1 = b, 3 = d
    Eigen::Vector2d input_mean = Eigen::Vector2d::Zero();
};

struct TeleportPoint {
    int step = 0;
    int mode = 0;
    double gain_x = NAN, gain_p = NAN, gain_x_se = NAN, gain_p_se = NAN;
    /// Var(x_ref - x_out) and Var(p_ref + p_out), each normalized by its vacuum value 1.
    double noise_x = NAN, noise_p = NAN, noise_x_se = NAN, noise_p_se = NAN;
    /// Their mean: the two-quadrature witness normalized by 2.
    double noise = NAN, noise_se = NAN, noise_db = NAN;
    double classical_benchmark = NAN;
    uint64_t trials_x = 0, trials_p = 0;
};

struct TeleportMetrics {
    std::vector<TeleportPoint> points;
};

/// Witness and gain statistics for a set of probes, from x-configuration and p-configuration
/// trials. processed: 4 values per observed macronode, in the order of observed().
class TeleportAccumulator {
   public:
    TeleportAccumulator() = default;
    TeleportAccumulator(std::vector<TeleportProbe> probes, uint64_t tag = 0);

    /// Macronodes that must be observed, sorted.
    const std::vector<int64_t> &observed() const {
        return observed_;
    }
    void add(Basis config, const double *processed);
    void merge(const TeleportAccumulator &other);
    TeleportMetrics metrics(bool want_gains = true) const;

   private:
    std::vector<TeleportProbe> probes_;
    std::vector<int64_t> observed_;
    std::vector<size_t> ref_slot_, out_slot_;
    uint64_t tag_ = 0;
    // Per probe and basis: accumulator over (witness combination, output).
    std::vector<MomentAccumulator> acc_x_, acc_p_;
};

TeleportMetrics teleport_metrics(
    const std::vector<TrialRecord> &x_trials, const std::vector<TrialRecord> &p_trials,
    const std::vector<TeleportProbe> &probes, bool want_gains = true);

/// Long-format metric table: step, mode, quantity, value, stderr.
struct MetricRow {
    int64_t step = 0;
    int64_t mode = 0;
    std::string quantity;
    double value = 0;
    double stderr_ = NAN;
};

struct MetricsTable {
    std::string experiment;
    std::string config_hash;
    std::string config_text;
    uint64_t trials = 0;
    std::vector<MetricRow> rows;

    void add(int64_t step, int64_t mode, const std::string &quantity, double value, double se = NAN);
    /// Throws InvalidArgument on a config hash or experiment mismatch.
    void append(const MetricsTable &other);
    /// First value for (step, mode, quantity); NaN if absent.
    double get(int64_t step, int64_t mode, const std::string &quantity) const;

    void write_csv(std::ostream &out) const;
    void write_json(std::ostream &out) const;
    static MetricsTable read_csv(std::istream &in);
};

MetricsTable metrics_table(const TeleportMetrics &m, const std::string &experiment, const LatticeConfig &config);
MetricsTable metrics_table(const NullifierReport &r, const std::string &experiment, const LatticeConfig &config);

}  // namespace qrl

#endif
