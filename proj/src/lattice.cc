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

#include <algorithm>
#include <bit>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "qrl/errors.h"
#include "qrl/util.h"

namespace qrl {

static_assert(std::endian::native == std::endian::little, "binary frames assume a little-endian host");

double squeezing_r_from_db(double db) {
    return db * std::log(10.0) / 20.0;
}

void LatticeConfig::validate() const {
    if (N < 2) {
        throw ConfigError("N must be at least 2");
    }
    if (total_macronodes < 0) {
        throw ConfigError("total_macronodes must be non-negative");
    }
    for (double s : squeezing_db) {
        if (!std::isfinite(s) || s < 0) {
            throw ConfigError("squeezing levels must be finite and >= 0 dB");
        }
    }
    for (double e : {eta_short, eta_long}) {
        if (!(e > 0 && e <= 1)) {
            throw ConfigError("path efficiencies must lie in (0, 1]");
        }
    }
}

std::array<double, 4> LatticeConfig::r() const {
    std::array<double, 4> out{};
    for (int j = 0; j < 4; j++) {
        out[j] = squeezing_r_from_db(squeezing_db[j]);
    }
    return out;
}

std::string LatticeConfig::canonical_text() const {
    std::string s;
    s += "N=" + std::to_string(N) + "\n";
    s += "total_macronodes=" + std::to_string(total_macronodes) + "\n";
    s += "squeezing_db=";
    for (int j = 0; j < 4; j++) {
        s += (j ? "," : "") + format_real(squeezing_db[j]);
    }
    s += "\n";
    s += "eta_short=" + format_real(eta_short) + "\n";
    s += "eta_long=" + format_real(eta_long) + "\n";
    s += "seed=" + std::to_string(seed) + "\n";
    return s;
}

uint64_t LatticeConfig::hash_value() const {
    return fnv1a64(canonical_text());
}

std::string LatticeConfig::hash() const {
    return hex64(hash_value());
}

LatticeConfig LatticeConfig::with_squeezing(int N, double db) {
    LatticeConfig c;
    c.N = N;
    c.squeezing_db = {db, db, db, db};
    return c;
}

Eigen::VectorXd SourceLayout::variances(const LatticeConfig &config) const {
    auto r = config.r();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n_columns(), kVacuumVariance);
    for (int64_t k = -N; k < T; k++) {
        for (int j = 0; j < 4; j++) {
            // A and C are squeezed in p, B and D in x.
            double s = (j == 0 || j == 2) ? r[j] : -r[j];
            v[column(k, j, 0)] = std::exp(2 * s) / 2;
            v[column(k, j, 1)] = std::exp(-2 * s) / 2;
        }
    }
    return v;
}

Eigen::MatrixXd LinearOutcomeMap::covariance() const {
    return M * source_variance.asDiagonal() * M.transpose();
}

Eigen::MatrixXd LinearOutcomeMap::readout_rows(int64_t k) const {
    return four_splitter().transpose() * M.middleRows(4 * k, 4);
}

Eigen::Vector4d LinearOutcomeMap::readout_offset(int64_t k) const {
    return four_splitter().transpose() * d.segment<4>(4 * k);
}

AngleSchedule padded_schedule(const AngleSchedule &schedule, const LatticeConfig &config) {
    if (schedule.N != config.N) {
        throw ConfigError(
            "schedule was built for N=" + std::to_string(schedule.N) + " but the lattice has N=" +
            std::to_string(config.N));
    }
    if (config.total_macronodes != 0 && config.total_macronodes < schedule.size()) {
        throw CapacityError("schedule has more macronodes than total_macronodes");
    }
    AngleSchedule out = schedule;
    while (config.total_macronodes != 0 && out.size() < config.total_macronodes) {
        out.push(MacronodeRole::readout(0));
    }
    return out;
}

FeedforwardPlan plan_feedforward(const AngleSchedule &schedule) {
    int64_t T = schedule.size();
    int N = schedule.N;
    std::vector<Eigen::Matrix4d> E(T);
    for (int64_t k = 0; k < T; k++) {
        E[k] = schedule.roles[k].feedforward_E();
    }
    Eigen::Matrix4d zero = Eigen::Matrix4d::Zero();
    FeedforwardPlan plan;
    plan.sets.resize(T);
    plan.offsets.resize(T);
    for (int64_t k = 0; k < T; k++) {
        const auto &role = schedule.roles[k];
        const Eigen::Matrix4d *e1 = k >= 1 ? &E[k - 1] : &zero;
        const Eigen::Matrix4d *eN = k >= N ? &E[k - N] : &zero;
        plan.sets[k] = feedforward_matrices(role.angles, e1, eN);
        Eigen::Vector4d disp = Eigen::Vector4d::Zero();
        if (k >= 1) {
            disp.head<2>() = schedule.roles[k - 1].displacement.head<2>();
        }
        if (k >= N) {
            disp.tail<2>() = schedule.roles[k - N].displacement.tail<2>();
        }
        plan.offsets[k] = plan.sets[k].H * disp;
    }
    return plan;
}

std::vector<Eigen::Vector4d> apply_numerical_feedforward(
    const std::vector<Eigen::Vector4d> &raw, const AngleSchedule &schedule) {
    if ((int64_t)raw.size() != schedule.size()) {
        throw ScheduleOrderError("raw outcomes missing for some scheduled macronodes");
    }
    FeedforwardPlan plan = plan_feedforward(schedule);
    int N = schedule.N;
    std::vector<Eigen::Vector4d> out(raw.size());
    for (size_t k = 0; k < raw.size(); k++) {
        Eigen::Vector4d m = raw[k] + plan.offsets[k];
        if (k >= 1) {
            m += plan.sets[k].F * out[k - 1];
        }
        if (k >= (size_t)N) {
            m += plan.sets[k].G * out[k - N];
        }
        out[k] = m;
    }
    return out;
}

Eigen::Vector4d readout_values(const Eigen::Vector4d &m, const MacronodeRole &role) {
    if (role.role == Role::Operate) {
        throw MisuseError("readout_values needs a macronode measured at one shared angle");
    }
    return four_splitter().transpose() * m;
}

InitMoments initialization_feedforward(double theta, const std::array<double, 4> &r) {
    InitMoments out;
    out.E = init_feedforward(theta);
    double c2 = std::cos(theta) * std::cos(theta);
    double s2 = std::sin(theta) * std::sin(theta);
    for (int rail = 0; rail < 2; rail++) {
        double r1 = r[2 * rail];
        double r2 = r[2 * rail + 1];
        out.variances[2 * rail] = c2 / 4 * (std::exp(2 * r1) + std::exp(-2 * r2)) +
                                  s2 / 4 * (std::exp(-2 * r1) + std::exp(2 * r2));
        out.variances[2 * rail + 1] = c2 * std::exp(-2 * r1) + s2 * std::exp(-2 * r2);
    }
    return out;
}

namespace {

struct Term {
    int64_t col;
    double coef;
};

// Quadrature q of computational mode i (0=a .. 3=d) at macronode k, before any feedforward.
void comp_terms(const SourceLayout &lay, const LatticeConfig &c, int64_t k, int i, int q, std::vector<Term> &out) {
    out.clear();
    const double s = M_SQRT1_2;
    switch (i) {
        case 0:
            out.push_back({lay.column(k, 0, q), s});
            out.push_back({lay.column(k, 1, q), -s});
            break;
        case 1: {
            double e = std::sqrt(c.eta_short);
            out.push_back({lay.column(k - 1, 0, q), s * e});
            out.push_back({lay.column(k - 1, 1, q), s * e});
            if (lay.lossy) {
                out.push_back({lay.loss_column(k - 1, Rail::B, q), std::sqrt(1 - c.eta_short)});
            }
            break;
        }
        case 2:
            out.push_back({lay.column(k, 2, q), s});
            out.push_back({lay.column(k, 3, q), -s});
            break;
        case 3: {
            double e = std::sqrt(c.eta_long);
            out.push_back({lay.column(k - c.N, 2, q), s * e});
            out.push_back({lay.column(k - c.N, 3, q), s * e});
            if (lay.lossy) {
                out.push_back({lay.loss_column(k - c.N, Rail::D, q), std::sqrt(1 - c.eta_long)});
            }
            break;
        }
    }
}

// 4x8 projection from computational quadratures (xa, pa, ..., xd, pd) to homodyne outcomes.
Eigen::Matrix<double, 4, 8> homodyne_projection(const MacronodeAngles &angles) {
    Eigen::Matrix4d b = four_splitter();
    Eigen::Matrix<double, 4, 8> p;
    for (int J = 0; J < 4; J++) {
        for (int i = 0; i < 4; i++) {
            p(J, 2 * i) = std::sin(angles.theta[J]) * b(J, i);
            p(J, 2 * i + 1) = std::cos(angles.theta[J]) * b(J, i);
        }
    }
    return p;
}

}  // namespace

LinearOutcomeMap build_outcome_map(
    const AngleSchedule &schedule_in, const LatticeConfig &config, FeedforwardMode mode, int64_t max_entries) {
    config.validate();
    AngleSchedule schedule = padded_schedule(schedule_in, config);
    schedule.validate();
    LinearOutcomeMap map;
    map.layout = SourceLayout{config.N, schedule.size(), config.lossy()};
    const SourceLayout &lay = map.layout;
    int64_t T = lay.T;
    int64_t ns = lay.n_columns();
    int64_t copies = mode == FeedforwardMode::Numerical ? 2 : 1;
    if (copies * 4 * T * ns > max_entries) {
        throw CapacityError(
            "exact outcome map would need " + std::to_string(copies * 4 * T * ns) +
            " entries; use the streaming sampler for runs this large");
    }
    map.source_variance = lay.variances(config);
    map.M = Eigen::MatrixXd::Zero(4 * T, ns);
    map.d = Eigen::VectorXd::Zero(4 * T);
    if (mode == FeedforwardMode::Numerical) {
        map.M_raw = Eigen::MatrixXd::Zero(4 * T, ns);
    }

    std::vector<Eigen::Matrix4d> E(T);
    for (int64_t k = 0; k < T; k++) {
        E[k] = schedule.roles[k].feedforward_E();
    }
    FeedforwardPlan plan;
    if (mode == FeedforwardMode::Numerical) {
        plan = plan_feedforward(schedule);
    }

    std::vector<Term> terms;
    Eigen::MatrixXd comp(8, ns);
    Eigen::VectorXd comp_off(8);
    for (int64_t k = 0; k < T; k++) {
        comp.setZero();
        comp_off.setZero();
        for (int i = 0; i < 4; i++) {
            for (int q = 0; q < 2; q++) {
                comp_terms(lay, config, k, i, q, terms);
                for (const auto &t : terms) {
                    comp(2 * i + q, t.col) += t.coef;
                }
            }
        }
        if (mode == FeedforwardMode::Physical) {
            // The displacement E m + disp lands on (b, k) from k-1 and on (d, k) from k-N.
            if (k >= 1) {
                comp.middleRows(2, 2) += (E[k - 1] * map.M.middleRows(4 * (k - 1), 4)).topRows(2);
                comp_off.segment<2>(2) += (E[k - 1] * map.d.segment<4>(4 * (k - 1))).head<2>() +
                                          schedule.roles[k - 1].displacement.head<2>();
            }
            if (k >= config.N) {
                comp.middleRows(6, 2) += (E[k - config.N] * map.M.middleRows(4 * (k - config.N), 4)).bottomRows(2);
                comp_off.segment<2>(6) += (E[k - config.N] * map.d.segment<4>(4 * (k - config.N))).tail<2>() +
                                          schedule.roles[k - config.N].displacement.tail<2>();
            }
        }
        Eigen::Matrix<double, 4, 8> proj = homodyne_projection(schedule.roles[k].angles);
        auto rows = map.M.middleRows(4 * k, 4);
        rows = proj * comp;
        map.d.segment<4>(4 * k) = proj * comp_off;
        if (mode == FeedforwardMode::Numerical) {
            map.M_raw.middleRows(4 * k, 4) = rows;
            const auto &ff = plan.sets[k];
            if (k >= 1) {
                rows += ff.F * map.M.middleRows(4 * (k - 1), 4);
                map.d.segment<4>(4 * k) += ff.F * map.d.segment<4>(4 * (k - 1));
            }
            if (k >= config.N) {
                rows += ff.G * map.M.middleRows(4 * (k - config.N), 4);
                map.d.segment<4>(4 * k) += ff.G * map.d.segment<4>(4 * (k - config.N));
            }
            map.d.segment<4>(4 * k) += plan.offsets[k];
        }
    }
    return map;
}

std::mt19937_64 trial_rng(uint64_t seed, uint64_t trial) {
    std::seed_seq seq{
        (uint32_t)seed, (uint32_t)(seed >> 32), (uint32_t)trial, (uint32_t)(trial >> 32), 0x51524cu};
    return std::mt19937_64(seq);
}

void draw_sources(std::mt19937_64 &rng, const Eigen::VectorXd &stddev, Eigen::VectorXd &out) {
    boost::random::normal_distribution<double> nd;
    out.resize(stddev.size());
    for (Eigen::Index i = 0; i < stddev.size(); i++) {
        out[i] = stddev[i] * nd(rng);
    }
}

std::vector<TrialRecord> sample_trials(
    const LinearOutcomeMap &map, const LatticeConfig &config, uint64_t first_trial, uint64_t n_trials) {
    if (n_trials < 1) {
        throw InvalidArgument("n_trials must be at least 1");
    }
    Eigen::VectorXd sd = map.source_variance.cwiseSqrt();
    Eigen::VectorXd z;
    std::vector<TrialRecord> out;
    out.reserve(n_trials);
    std::vector<int64_t> all(map.n_macronodes());
    for (int64_t k = 0; k < map.n_macronodes(); k++) {
        all[k] = k;
    }
    for (uint64_t t = first_trial; t < first_trial + n_trials; t++) {
        auto rng = trial_rng(config.seed, t);
        draw_sources(rng, sd, z);
        TrialRecord rec;
        rec.trial_index = t;
        rec.seed_used = config.seed;
        rec.macronodes = all;
        Eigen::VectorXd proc = map.M * z + map.d;
        rec.processed.assign(proc.data(), proc.data() + proc.size());
        if (map.M_raw.size() != 0) {
            Eigen::VectorXd raw = map.M_raw * z;
            rec.raw.assign(raw.data(), raw.data() + raw.size());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

StreamingSampler::StreamingSampler(const AngleSchedule &schedule_in, const LatticeConfig &config) {
    config.validate();
    AngleSchedule schedule = padded_schedule(schedule_in, config);
    schedule.validate();
    N_ = config.N;
    T_ = schedule.size();
    seed_ = config.seed;
    lossy_ = config.lossy();
    sqrt_eta_short_ = std::sqrt(config.eta_short);
    sqrt_loss_short_ = std::sqrt(1 - config.eta_short);
    sqrt_eta_long_ = std::sqrt(config.eta_long);
    sqrt_loss_long_ = std::sqrt(1 - config.eta_long);
    auto r = config.r();
    for (int j = 0; j < 4; j++) {
        double s = (j == 0 || j == 2) ? r[j] : -r[j];
        sd_x_[j] = std::sqrt(std::exp(2 * s) / 2);
        sd_p_[j] = std::sqrt(std::exp(-2 * s) / 2);
    }
    FeedforwardPlan plan = plan_feedforward(schedule);
    sin_.resize(T_);
    cos_.resize(T_);
    F_.resize(T_);
    G_.resize(T_);
    has_f_.resize(T_);
    has_g_.resize(T_);
    offset_ = plan.offsets;
    for (int64_t k = 0; k < T_; k++) {
        for (int j = 0; j < 4; j++) {
            sin_[k][j] = std::sin(schedule.roles[k].angles.theta[j]);
            cos_[k][j] = std::cos(schedule.roles[k].angles.theta[j]);
        }
        F_[k] = plan.sets[k].F;
        G_[k] = plan.sets[k].G;
        has_f_[k] = !F_[k].isZero(0);
        has_g_[k] = !G_[k].isZero(0);
    }
    std::vector<int64_t> all(T_);
    for (int64_t k = 0; k < T_; k++) {
        all[k] = k;
    }
    set_observed(std::move(all));
}

void StreamingSampler::set_observed(std::vector<int64_t> macronodes) {
    std::sort(macronodes.begin(), macronodes.end());
    macronodes.erase(std::unique(macronodes.begin(), macronodes.end()), macronodes.end());
    for (int64_t k : macronodes) {
        if (k < 0 || k >= T_) {
            throw InvalidArgument("observed macronode " + std::to_string(k) + " is outside the schedule");
        }
    }
    observed_ = std::move(macronodes);
    observed_slot_.assign(T_, -1);
    for (size_t i = 0; i < observed_.size(); i++) {
        observed_slot_[observed_[i]] = (int)i;
    }
}

void StreamingSampler::run_trial(uint64_t trial, double *processed, double *raw) const {
    simulate(trial, false, processed, raw);
}

void StreamingSampler::run_mean(double *processed) const {
    simulate(0, true, processed, nullptr);
}

void StreamingSampler::simulate(uint64_t trial, bool noiseless, double *processed, double *raw) const {
    auto rng = trial_rng(seed_, noiseless ? 0 : trial);
    boost::random::normal_distribution<double> nd;
    const double s = M_SQRT1_2;
    const int N = N_;
    // Pending inputs: b for the next macronode, d for each of the next N macronodes.
    double pend_bx = 0, pend_bp = 0;
    std::vector<double> ring_d(2 * N, 0.0);
    // Processed outcomes of the last N+1 macronodes.
    std::vector<Eigen::Vector4d> window(N + 1, Eigen::Vector4d::Zero());

    for (int64_t k = -N; k < T_; k++) {
        double sx[4] = {0, 0, 0, 0}, sp[4] = {0, 0, 0, 0};
        for (int j = 0; j < 4 && !noiseless; j++) {
            sx[j] = sd_x_[j] * nd(rng);
            sp[j] = sd_p_[j] * nd(rng);
        }
        double vb[2] = {0, 0}, vd[2] = {0, 0};
        if (lossy_ && !noiseless) {
            vb[0] = nd(rng) * M_SQRT1_2;
            vb[1] = nd(rng) * M_SQRT1_2;
            vd[0] = nd(rng) * M_SQRT1_2;
            vd[1] = nd(rng) * M_SQRT1_2;
        }
        size_t slot = (size_t)(((k % N) + N) % N);
        if (k >= 0) {
            double x[4], p[4];
            x[0] = s * (sx[0] - sx[1]);
            p[0] = s * (sp[0] - sp[1]);
            x[1] = pend_bx;
            p[1] = pend_bp;
            x[2] = s * (sx[2] - sx[3]);
            p[2] = s * (sp[2] - sp[3]);
            x[3] = ring_d[2 * slot];
            p[3] = ring_d[2 * slot + 1];
            // Four-splitter rows: (1,1,-1,-1), (-1,1,1,-1), (1,1,1,1), (-1,1,-1,1), all / 2.
            double X[4] = {
                0.5 * (x[0] + x[1] - x[2] - x[3]),
                0.5 * (-x[0] + x[1] + x[2] - x[3]),
                0.5 * (x[0] + x[1] + x[2] + x[3]),
                0.5 * (-x[0] + x[1] - x[2] + x[3]),
            };
            double P[4] = {
                0.5 * (p[0] + p[1] - p[2] - p[3]),
                0.5 * (-p[0] + p[1] + p[2] - p[3]),
                0.5 * (p[0] + p[1] + p[2] + p[3]),
                0.5 * (-p[0] + p[1] - p[2] + p[3]),
            };
            Eigen::Vector4d mraw;
            for (int J = 0; J < 4; J++) {
                mraw[J] = sin_[k][J] * X[J] + cos_[k][J] * P[J];
            }
            Eigen::Vector4d m = mraw + offset_[k];
            if (has_f_[k]) {
                m += F_[k] * window[(size_t)((k - 1) % (N + 1))];
            }
            if (has_g_[k]) {
                m += G_[k] * window[(size_t)((k - N) % (N + 1))];
            }
            window[(size_t)(k % (N + 1))] = m;
            int obs = observed_slot_[k];
            if (obs >= 0) {
                for (int J = 0; J < 4; J++) {
                    processed[4 * obs + J] = m[J];
                    if (raw != nullptr) {
                        raw[4 * obs + J] = mraw[J];
                    }
                }
            }
        }
        pend_bx = sqrt_eta_short_ * s * (sx[0] + sx[1]) + sqrt_loss_short_ * vb[0];
        pend_bp = sqrt_eta_short_ * s * (sp[0] + sp[1]) + sqrt_loss_short_ * vb[1];
        ring_d[2 * slot] = sqrt_eta_long_ * s * (sx[2] + sx[3]) + sqrt_loss_long_ * vd[0];
        ring_d[2 * slot + 1] = sqrt_eta_long_ * s * (sp[2] + sp[3]) + sqrt_loss_long_ * vd[1];
    }
}

TrialRecord StreamingSampler::record(uint64_t trial) const {
    TrialRecord rec;
    rec.trial_index = trial;
    rec.seed_used = seed_;
    rec.macronodes = observed_;
    rec.processed.resize(4 * observed_.size());
    rec.raw.resize(4 * observed_.size());
    run_trial(trial, rec.processed.data(), rec.raw.data());
    return rec;
}

void write_records_csv(std::ostream &out, const std::vector<TrialRecord> &records) {
    out << "trial,macronode,port,raw,processed\n";
    const char ports[] = "ABCD";
    for (const auto &rec : records) {
        for (size_t i = 0; i < rec.macronodes.size(); i++) {
            for (int J = 0; J < 4; J++) {
                double raw = rec.raw.empty() ? NAN : rec.raw[4 * i + J];
                out << rec.trial_index << ',' << rec.macronodes[i] << ',' << ports[J] << ',' << format_real(raw)
                    << ',' << format_real(rec.processed[4 * i + J]) << '\n';
            }
        }
    }
}

namespace {

template <typename T>
void put(std::ostream &out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream &in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) {
        throw ParseError("binary frame truncated", 0, (size_t)in.gcount());
    }
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

constexpr uint32_t kFrameVersion = 1;

}  // namespace

void write_records_binary(std::ostream &out, const std::vector<TrialRecord> &records, uint64_t config_hash) {
    out.write("QRLF", 4);
    put<uint32_t>(out, kFrameVersion);
    put<uint64_t>(out, config_hash);
    put<uint64_t>(out, records.size());
    const std::vector<int64_t> empty;
    const auto &macros = records.empty() ? empty : records.front().macronodes;
    put<uint64_t>(out, macros.size());
    for (int64_t k : macros) {
        put<int64_t>(out, k);
    }
    for (const auto &rec : records) {
        if (rec.macronodes != macros) {
            throw InvalidArgument("all records in a frame must observe the same macronodes");
        }
        put<uint64_t>(out, rec.trial_index);
        for (size_t i = 0; i < 4 * macros.size(); i++) {
            put<double>(out, rec.raw.empty() ? NAN : rec.raw[i]);
        }
        for (size_t i = 0; i < 4 * macros.size(); i++) {
            put<double>(out, rec.processed[i]);
        }
    }
}

std::vector<TrialRecord> read_records_binary(std::istream &in, uint64_t *config_hash) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "QRLF", 4) != 0) {
        throw ParseError("not a QRLF binary frame", 0, 0);
    }
    uint32_t version = get<uint32_t>(in);
    if (version != kFrameVersion) {
        throw ParseError("unsupported frame version " + std::to_string(version), 0, 4);
    }
    uint64_t hash = get<uint64_t>(in);
    if (config_hash != nullptr) {
        *config_hash = hash;
    }
    uint64_t n_trials = get<uint64_t>(in);
    uint64_t n_obs = get<uint64_t>(in);
    std::vector<int64_t> macros(n_obs);
    for (auto &k : macros) {
        k = get<int64_t>(in);
    }
    std::vector<TrialRecord> out(n_trials);
    for (auto &rec : out) {
        rec.trial_index = get<uint64_t>(in);
        rec.macronodes = macros;
        rec.raw.resize(4 * n_obs);
        rec.processed.resize(4 * n_obs);
        for (auto &v : rec.raw) {
            v = get<double>(in);
        }
        for (auto &v : rec.processed) {
            v = get<double>(in);
        }
    }
    return out;
}

}  // namespace qrl
