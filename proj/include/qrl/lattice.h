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

#ifndef QRL_LATTICE_H
#define QRL_LATTICE_H

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "qrl/schedule.h"

namespace qrl {

struct LatticeConfig {
    int N = 101;
    /// 0 means "as long as the schedule". Otherwise the schedule is padded with p-readouts.
    int64_t total_macronodes = 0;
    /// Nullifier suppression of sources A, B, C, D in dB (positive numbers).
    std::array<double, 4> squeezing_db{4.5, 4.5, 4.5, 4.5};
    double eta_short = 1;
    double eta_long = 1;
    uint64_t seed = 1;

    void validate() const;
    /// Squeezing parameters r_j with 10 log10(e^{-2 r_j}) = -squeezing_db[j].
    std::array<double, 4> r() const;
    bool lossy() const {
        return eta_short < 1 || eta_long < 1;
    }
    /// Deterministic key=value rendering (17 significant digits).
    std::string canonical_text() const;
    /// FNV-1a of canonical_text, as 16 hex digits.
    std::string hash() const;
    uint64_t hash_value() const;

    static LatticeConfig with_squeezing(int N, double db);
};

double squeezing_r_from_db(double db);

/// Column layout of the initial-source vector: per time step (k = -N .. T-1) the quadratures
/// (x, p) of sources A, B, C, D, followed by 4 loss-vacuum quadratures when losses are on.
struct SourceLayout {
    int N = 0;
    int64_t T = 0;
    bool lossy = false;

    int stride() const {
        return lossy ? 12 : 8;
    }
    int64_t n_columns() const {
        return stride() * (T + N);
    }
    int64_t column(int64_t k, int source, int quad) const {
        return stride() * (k + N) + 2 * source + quad;
    }
    int64_t loss_column(int64_t k, Rail rail, int quad) const {
        return stride() * (k + N) + 8 + (rail == Rail::B ? 0 : 2) + quad;
    }
    /// Variance of each column for the given squeezing.
    Eigen::VectorXd variances(const LatticeConfig &config) const;
};

enum class FeedforwardMode { Numerical, Physical };

/// Processed outcomes = M * sources + d, row 4k+j is port j of macronode k.
struct LinearOutcomeMap {
    SourceLayout layout;
    Eigen::MatrixXd M;
    Eigen::VectorXd d;
    /// Raw (pre-feedforward) outcomes = M_raw * sources; only filled by the numerical route.
    Eigen::MatrixXd M_raw;
    Eigen::VectorXd source_variance;

    int64_t n_macronodes() const {
        return layout.T;
    }
    Eigen::MatrixXd covariance() const;
    /// Rows of the computational modes (a, b, c, d) seen by a readout at macronode k: B^-1 m_k.
    Eigen::MatrixXd readout_rows(int64_t k) const;
    Eigen::Vector4d readout_offset(int64_t k) const;
};

/// Guard against dense maps that would not fit in memory.
constexpr int64_t kDefaultMaxMapEntries = 60'000'000;

LinearOutcomeMap build_outcome_map(
    const AngleSchedule &schedule,
    const LatticeConfig &config,
    FeedforwardMode mode = FeedforwardMode::Numerical,
    int64_t max_entries = kDefaultMaxMapEntries);

/// Schedule with config.total_macronodes padding applied.
AngleSchedule padded_schedule(const AngleSchedule &schedule, const LatticeConfig &config);

/// Per-macronode numerical feedforward: F, G and the constant H * displacement term.
struct FeedforwardPlan {
    std::vector<FeedforwardSet> sets;
    std::vector<Eigen::Vector4d> offsets;
};
FeedforwardPlan plan_feedforward(const AngleSchedule &schedule);

/// m_k = m'_k + F_k m_{k-1} + G_k m_{k-N} + H_k disp_k, resolved in time order.
std::vector<Eigen::Vector4d> apply_numerical_feedforward(
    const std::vector<Eigen::Vector4d> &raw, const AngleSchedule &schedule);

/// B^-1 m for a macronode measured at one shared angle.
Eigen::Vector4d readout_values(const Eigen::Vector4d &m, const MacronodeRole &role);

struct InitMoments {
    Eigen::Matrix4d E;
    /// Variances of x(-theta), p(-theta) for (b, k+1) and (d, k+N), in that order.
    std::array<double, 4> variances;
};
InitMoments initialization_feedforward(double theta, const std::array<double, 4> &r);

/// One trial's outcomes at the observed macronodes, 4 values per macronode.
struct TrialRecord {
    uint64_t trial_index = 0;
    uint64_t seed_used = 0;
    std::vector<int64_t> macronodes;
    std::vector<double> raw;
    std::vector<double> processed;
};

/// Generator for trial t: mt19937_64 seeded from (seed, t) only.
std::mt19937_64 trial_rng(uint64_t seed, uint64_t trial);

/// Draws the source vector for one trial in layout order.
void draw_sources(std::mt19937_64 &rng, const Eigen::VectorXd &stddev, Eigen::VectorXd &out);

/// Monte Carlo through the exact map: outcomes = M * draw + d.
std::vector<TrialRecord> sample_trials(
    const LinearOutcomeMap &map, const LatticeConfig &config, uint64_t first_trial, uint64_t n_trials);

/// Constant-memory Monte Carlo: simulates the lattice step by step keeping only a window of
/// N+1 macronodes, with numerical feedforward applied as outcomes arrive.
class StreamingSampler {
   public:
    StreamingSampler(const AngleSchedule &schedule, const LatticeConfig &config);

    /// Macronodes whose outcomes are reported (sorted, unique). Defaults to all.
    void set_observed(std::vector<int64_t> macronodes);
    const std::vector<int64_t> &observed() const {
        return observed_;
    }
    int64_t n_macronodes() const {
        return T_;
    }
    /// Number of macronode outcome vectors retained per trial.
    int window_macronodes() const {
        return N_ + 1;
    }

    /// Simulates one trial; writes 4 values per observed macronode into processed (and raw if
    /// non-null).
    void run_trial(uint64_t trial, double *processed, double *raw = nullptr) const;
    /// Exact outcome means: the same recursion with every source set to zero.
    void run_mean(double *processed) const;

    /// Calls fn(trial, processed, raw) for trials [first, first + n).
    template <typename Fn>
    void run(uint64_t first, uint64_t n, Fn &&fn) const {
        std::vector<double> proc(4 * observed_.size());
        std::vector<double> raw(4 * observed_.size());
        for (uint64_t t = first; t < first + n; t++) {
            run_trial(t, proc.data(), raw.data());
            fn(t, (const double *)proc.data(), (const double *)raw.data());
        }
    }

    TrialRecord record(uint64_t trial) const;

   private:
    void simulate(uint64_t trial, bool noiseless, double *processed, double *raw) const;

    int N_;
    int64_t T_;
    uint64_t seed_;
    bool lossy_;
    double sqrt_eta_short_, sqrt_loss_short_, sqrt_eta_long_, sqrt_loss_long_;
    std::array<double, 4> sd_x_, sd_p_;
    std::vector<std::array<double, 4>> sin_, cos_;
    std::vector<Eigen::Matrix4d> F_, G_;
    std::vector<Eigen::Vector4d> offset_;
    std::vector<bool> has_f_, has_g_;
    std::vector<int64_t> observed_;
    std::vector<int> observed_slot_;  // -1 or index into observed_ for each macronode
};

/// CSV: trial,macronode,port,raw,processed (ports A-D).
void write_records_csv(std::ostream &out, const std::vector<TrialRecord> &records);
/// Binary frame: magic "QRLF", u32 version, u64 config hash, u64 n_trials, u64 n_observed,
/// i64 macronode list, then per trial: u64 trial index, n_observed*4 raw f64, n_observed*4 processed f64.
/// All little-endian.
void write_records_binary(std::ostream &out, const std::vector<TrialRecord> &records, uint64_t config_hash);
std::vector<TrialRecord> read_records_binary(std::istream &in, uint64_t *config_hash = nullptr);

}  // namespace qrl

#endif
