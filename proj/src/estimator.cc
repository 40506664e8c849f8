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

#include <istream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <sstream>

#include "qrl/errors.h"
#include "qrl/util.h"

namespace qrl {

MomentAccumulator::MomentAccumulator(int dim, uint64_t tag)
    : tag_(tag), mean_(Eigen::VectorXd::Zero(dim)), m2_(Eigen::MatrixXd::Zero(dim, dim)) {
}

void MomentAccumulator::add(const double *x) {
    Eigen::Map<const Eigen::VectorXd> v(x, mean_.size());
    n_++;
    Eigen::VectorXd delta = v - mean_;
    mean_ += delta / (double)n_;
    m2_.noalias() += ((double)(n_ - 1) / (double)n_) * delta * delta.transpose();
}

void MomentAccumulator::merge(const MomentAccumulator &other) {
    if (other.tag_ != tag_) {
        throw InvalidArgument(
            "refusing to merge statistics from different configurations (hash " + hex64(tag_) + " vs " +
            hex64(other.tag_) + ")");
    }
    if (other.dim() != dim()) {
        throw InvalidArgument("accumulator dimensions differ");
    }
    if (other.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = other;
        return;
    }
    double na = (double)n_, nb = (double)other.n_, n = na + nb;
    Eigen::VectorXd delta = other.mean_ - mean_;
    mean_ += delta * (nb / n);
    m2_ += other.m2_ + delta * delta.transpose() * (na * nb / n);
    n_ += other.n_;
}

Eigen::MatrixXd MomentAccumulator::covariance() const {
    if (n_ < 2) {
        throw EstimationSingularity("need at least 2 samples for a covariance");
    }
    return m2_ / (double)(n_ - 1);
}

Eigen::MatrixXd MomentAccumulator::second_moment() const {
    if (n_ < 1) {
        throw EstimationSingularity("no samples");
    }
    return m2_ / (double)n_ + mean_ * mean_.transpose();
}

Eigen::VectorXd MomentAccumulator::mean_stderr() const {
    return (covariance().diagonal() / (double)n_).cwiseSqrt();
}

Eigen::MatrixXd MomentAccumulator::covariance_stderr() const {
    Eigen::MatrixXd c = covariance();
    Eigen::MatrixXd se(dim(), dim());
    for (int a = 0; a < dim(); a++) {
        for (int b = 0; b < dim(); b++) {
            se(a, b) = std::sqrt((c(a, a) * c(b, b) + c(a, b) * c(a, b)) / (double)(n_ - 1));
        }
    }
    return se;
}

void CorrelationMatrix::validate() const {
    if (samples < 2) {
        throw EstimationSingularity("correlation matrix needs at least 2 samples");
    }
    if (!value.allFinite()) {
        throw EstimationSingularity("correlation matrix has non-finite entries");
    }
    if (stderr_.size() != 0 && (stderr_.rows() != value.rows() || stderr_.cols() != value.cols())) {
        throw InvalidArgument("standard-error matrix shape differs from the value");
    }
}

double basis_angle(Basis b) {
    return b == Basis::X ? M_PI / 2 : 0.0;
}

char basis_char(Basis b) {
    return b == Basis::X ? 'x' : 'p';
}

std::vector<BasisConfig> measurement_plan_for_tomography(int n_mode_pairs) {
    if (n_mode_pairs < 1) {
        throw InvalidArgument("tomography needs at least one mode pair");
    }
    return {{Basis::X, Basis::X}, {Basis::X, Basis::P}, {Basis::P, Basis::X}, {Basis::P, Basis::P}};
}

size_t plan_index_for_trial(const std::vector<BasisConfig> &plan, uint64_t trial) {
    if (plan.empty()) {
        throw InvalidArgument("empty measurement plan");
    }
    return (size_t)(trial % plan.size());
}

CorrelationMatrix correlation_from_configs(
    const std::vector<BasisConfig> &plan, const std::vector<MomentAccumulator> &per_config, int n_out_modes,
    int n_ref_modes) {
    if (plan.size() != per_config.size()) {
        throw InvalidArgument("one accumulator per configuration expected");
    }
    CorrelationMatrix c;
    c.value = Eigen::MatrixXd::Constant(2 * n_out_modes, 2 * n_ref_modes, NAN);
    c.stderr_ = Eigen::MatrixXd::Constant(2 * n_out_modes, 2 * n_ref_modes, NAN);
    c.samples = UINT64_MAX;
    for (size_t i = 0; i < plan.size(); i++) {
        const auto &acc = per_config[i];
        if (acc.dim() != n_out_modes + n_ref_modes) {
            throw InvalidArgument("accumulator dimension must equal out + ref modes");
        }
        Eigen::MatrixXd m = acc.second_moment();
        double n = (double)acc.count();
        int qo = plan[i].out == Basis::X ? 0 : 1;
        int qr = plan[i].ref == Basis::X ? 0 : 1;
        for (int o = 0; o < n_out_modes; o++) {
            for (int r = 0; r < n_ref_modes; r++) {
                int ri = n_out_modes + r;
                c.value(2 * o + qo, 2 * r + qr) = m(o, ri);
                c.stderr_(2 * o + qo, 2 * r + qr) = std::sqrt((m(o, o) * m(ri, ri) + m(o, ri) * m(o, ri)) / n);
            }
        }
        c.samples = std::min<uint64_t>(c.samples, acc.count());
    }
    if (!c.value.allFinite()) {
        throw InvalidArgument("measurement plan does not cover every basis pair");
    }
    return c;
}

MatrixEstimate estimate_S(const CorrelationMatrix &out_ref, const CorrelationMatrix &in_ref) {
    out_ref.validate();
    in_ref.validate();
    if (in_ref.value.rows() != in_ref.value.cols() || out_ref.value.cols() != in_ref.value.rows()) {
        throw InvalidArgument("correlation shapes do not compose");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(in_ref.value);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 1e-9 * std::max(1.0, smax))) {
        throw EstimationSingularity("input-reference correlation is singular (no squeezing?)");
    }
    Eigen::MatrixXd inv = in_ref.value.inverse();
    MatrixEstimate est;
    est.value = out_ref.value * inv;
    Eigen::MatrixXd se_o = out_ref.stderr_.size() ? out_ref.stderr_ : Eigen::MatrixXd::Zero(out_ref.value.rows(), out_ref.value.cols());
    Eigen::MatrixXd se_i = in_ref.stderr_.size() ? in_ref.stderr_ : Eigen::MatrixXd::Zero(in_ref.value.rows(), in_ref.value.cols());
    // dS = dC_o C_i^-1 - S dC_i C_i^-1, entries treated as independent.
    Eigen::MatrixXd var = se_o.array().square().matrix() * inv.array().square().matrix();
    var += est.value.array().square().matrix() * se_i.array().square().matrix() * inv.array().square().matrix();
    est.stderr_ = var.cwiseSqrt();
    return est;
}

double frobenius_error(const Eigen::MatrixXd &estimate, const Eigen::MatrixXd &theory) {
    if (estimate.rows() != theory.rows() || estimate.cols() != theory.cols()) {
        throw InvalidArgument("matrix shapes differ");
    }
    double norm = theory.norm();
    if (norm == 0) {
        throw InvalidArgument("theory matrix has zero norm");
    }
    return (theory - estimate).norm() / norm;
}

double db(double ratio) {
    if (!(ratio > 0)) {
        throw InvalidArgument("dB of a non-positive ratio");
    }
    return 10 * std::log10(ratio);
}

double inverse_db(double decibels) {
    return std::pow(10.0, decibels / 10);
}

double db_stderr(double ratio, double se) {
    return 10 / std::log(10.0) * se / ratio;
}

NullifierAccumulator::NullifierAccumulator(const AngleSchedule &schedule, Basis basis, uint64_t tag)
    : basis_(basis), N_(schedule.N), T_(schedule.size()), tag_(tag) {
    double want = basis_angle(basis);
    for (int64_t k = 0; k < T_; k++) {
        const auto &role = schedule.roles[k];
        if (role.role != Role::Readout || std::abs(std::sin(role.shared_theta() - want)) > 1e-12) {
            throw MisuseError(
                std::string("nullifier trials must read every macronode in the ") + basis_char(basis) +
                " basis; macronode " + std::to_string(k) + " does not");
        }
    }
    if (T_ <= N_) {
        throw InvalidArgument("nullifier run needs more than N macronodes");
    }
    sum_.assign(4 * (T_ - N_), 0.0);
    sum2_.assign(4 * (T_ - N_), 0.0);
}

void NullifierAccumulator::add(const double *processed) {
    const Eigen::Matrix4d bt = four_splitter().transpose();
    auto comp = [&](int64_t k) {
        return Eigen::Vector4d(bt * Eigen::Map<const Eigen::Vector4d>(processed + 4 * k));
    };
    for (int64_t k = 0; k + N_ < T_; k++) {
        Eigen::Vector4d now = comp(k), next = comp(k + 1), far = comp(k + N_);
        double d[4];
        if (basis_ == Basis::P) {
            d[0] = (now[0] + next[1]) * M_SQRT1_2;
            d[1] = (now[0] - next[1]) * M_SQRT1_2;
            d[2] = (now[2] + far[3]) * M_SQRT1_2;
            d[3] = (now[2] - far[3]) * M_SQRT1_2;
        } else {
            d[0] = (now[0] + next[1]) * M_SQRT1_2;
            d[1] = (next[1] - now[0]) * M_SQRT1_2;
            d[2] = (now[2] + far[3]) * M_SQRT1_2;
            d[3] = (far[3] - now[2]) * M_SQRT1_2;
        }
        for (int j = 0; j < 4; j++) {
            sum_[4 * k + j] += d[j];
            sum2_[4 * k + j] += d[j] * d[j];
        }
    }
    n_++;
}

void NullifierAccumulator::merge(const NullifierAccumulator &other) {
    if (other.tag_ != tag_) {
        throw InvalidArgument("refusing to merge nullifier statistics from different configurations");
    }
    if (other.T_ != T_ || other.N_ != N_ || other.basis_ != basis_) {
        throw InvalidArgument("nullifier accumulators describe different runs");
    }
    for (size_t i = 0; i < sum_.size(); i++) {
        sum_[i] += other.sum_[i];
        sum2_[i] += other.sum2_[i];
    }
    n_ += other.n_;
}

NullifierReport NullifierAccumulator::report() const {
    if (n_ < 2) {
        throw EstimationSingularity("need at least 2 trials for nullifier variances");
    }
    NullifierReport rep;
    rep.basis = basis_;
    rep.N = N_;
    rep.trials = n_;
    double n = (double)n_;
    int64_t steps = (T_ - N_) / N_;
    for (int64_t m = 0; m < steps; m++) {
        std::array<double, 4> ratio{}, se{}, d{}, dse{};
        for (int j = 0; j < 4; j++) {
            double acc = 0, acc_se2 = 0;
            for (int64_t k = m * N_; k < (m + 1) * N_; k++) {
                double s = sum_[4 * k + j], s2 = sum2_[4 * k + j];
                double var = (s2 - s * s / n) / (n - 1);
                acc += var;
                acc_se2 += var * var * 2 / (n - 1);
            }
            ratio[j] = acc / N_ / kVacuumVariance;
            se[j] = std::sqrt(acc_se2) / N_ / kVacuumVariance;
            d[j] = db(ratio[j]);
            dse[j] = db_stderr(ratio[j], se[j]);
        }
        rep.ratio.push_back(ratio);
        rep.ratio_stderr.push_back(se);
        rep.db.push_back(d);
        rep.db_stderr.push_back(dse);
    }
    return rep;
}

namespace {

// Rearranges a record's processed values into the order of a sorted macronode list.
std::vector<double> values_for(const TrialRecord &rec, const std::vector<int64_t> &wanted) {
    std::vector<double> out(4 * wanted.size());
    for (size_t i = 0; i < wanted.size(); i++) {
        auto it = std::lower_bound(rec.macronodes.begin(), rec.macronodes.end(), wanted[i]);
        if (it == rec.macronodes.end() || *it != wanted[i]) {
            throw InvalidArgument("trial record lacks macronode " + std::to_string(wanted[i]));
        }
        size_t s = (size_t)(it - rec.macronodes.begin());
        for (int J = 0; J < 4; J++) {
            out[4 * i + J] = rec.processed[4 * s + J];
        }
    }
    return out;
}

}  // namespace

NullifierReport nullifier_variances(const std::vector<TrialRecord> &trials, const AngleSchedule &schedule, Basis basis) {
    NullifierAccumulator acc(schedule, basis);
    std::vector<int64_t> all(schedule.size());
    for (int64_t k = 0; k < schedule.size(); k++) {
        all[k] = k;
    }
    for (const auto &rec : trials) {
        acc.add(values_for(rec, all).data());
    }
    return acc.report();
}

TeleportAccumulator::TeleportAccumulator(std::vector<TeleportProbe> probes, uint64_t tag)
    : probes_(std::move(probes)), tag_(tag) {
    for (const auto &p : probes_) {
        if ((p.ref_mode != 0 && p.ref_mode != 2) || (p.out_mode != 1 && p.out_mode != 3)) {
            throw InvalidArgument("references are a or c modes, outputs b or d modes");
        }
        if (p.out_macronode <= p.ref_macronode) {
            throw ScheduleOrderError("teleport output must be read after its reference");
        }
        observed_.push_back(p.ref_macronode);
        observed_.push_back(p.out_macronode);
    }
    std::sort(observed_.begin(), observed_.end());
    observed_.erase(std::unique(observed_.begin(), observed_.end()), observed_.end());
    auto slot = [&](int64_t k) {
        return (size_t)(std::lower_bound(observed_.begin(), observed_.end(), k) - observed_.begin());
    };
    for (const auto &p : probes_) {
        ref_slot_.push_back(slot(p.ref_macronode));
        out_slot_.push_back(slot(p.out_macronode));
    }
    acc_x_.assign(probes_.size(), MomentAccumulator(2, tag));
    acc_p_.assign(probes_.size(), MomentAccumulator(2, tag));
}

void TeleportAccumulator::add(Basis config, const double *processed) {
    const Eigen::Matrix4d bt = four_splitter().transpose();
    double v[2];
    for (size_t i = 0; i < probes_.size(); i++) {
        double ref = bt.row(probes_[i].ref_mode).dot(Eigen::Map<const Eigen::Vector4d>(processed + 4 * ref_slot_[i]));
        double out = bt.row(probes_[i].out_mode).dot(Eigen::Map<const Eigen::Vector4d>(processed + 4 * out_slot_[i]));
        if (config == Basis::X) {
            v[0] = ref - out;
            v[1] = out;
            acc_x_[i].add(v);
        } else {
            v[0] = ref + out;
            v[1] = out;
            acc_p_[i].add(v);
        }
    }
}

void TeleportAccumulator::merge(const TeleportAccumulator &other) {
    if (other.tag_ != tag_) {
        throw InvalidArgument("refusing to merge teleport statistics from different configurations");
    }
    if (other.probes_.size() != probes_.size()) {
        throw InvalidArgument("teleport accumulators describe different probe sets");
    }
    for (size_t i = 0; i < probes_.size(); i++) {
        acc_x_[i].merge(other.acc_x_[i]);
        acc_p_[i].merge(other.acc_p_[i]);
    }
}

TeleportMetrics TeleportAccumulator::metrics(bool want_gains) const {
    TeleportMetrics out;
    for (size_t i = 0; i < probes_.size(); i++) {
        const auto &p = probes_[i];
        TeleportPoint pt;
        pt.step = p.step;
        pt.mode = p.mode;
        pt.classical_benchmark = 1.0 + p.step;
        pt.trials_x = acc_x_[i].count();
        pt.trials_p = acc_p_[i].count();
        Eigen::MatrixXd cx = acc_x_[i].covariance();
        Eigen::MatrixXd cp = acc_p_[i].covariance();
        double nx = (double)pt.trials_x, np = (double)pt.trials_p;
        // Vacuum value of each combination: 1/2 + 1/2.
        pt.noise_x = cx(0, 0) / (2 * kVacuumVariance);
        pt.noise_p = cp(0, 0) / (2 * kVacuumVariance);
        pt.noise_x_se = pt.noise_x * std::sqrt(2 / (nx - 1));
        pt.noise_p_se = pt.noise_p * std::sqrt(2 / (np - 1));
        pt.noise = (pt.noise_x + pt.noise_p) / 2;
        pt.noise_se = std::sqrt(pt.noise_x_se * pt.noise_x_se + pt.noise_p_se * pt.noise_p_se) / 2;
        pt.noise_db = db(pt.noise);
        if (want_gains) {
            if (std::abs(p.input_mean[0]) < 1e-12 || std::abs(p.input_mean[1]) < 1e-12) {
                throw IllConditionedGain(
                    "gain of mode " + std::to_string(p.mode) + " needs a non-zero input mean in both quadratures");
            }
            pt.gain_x = acc_x_[i].mean()[1] / p.input_mean[0];
            pt.gain_p = acc_p_[i].mean()[1] / p.input_mean[1];
            pt.gain_x_se = std::sqrt(cx(1, 1) / nx) / std::abs(p.input_mean[0]);
            pt.gain_p_se = std::sqrt(cp(1, 1) / np) / std::abs(p.input_mean[1]);
        }
        out.points.push_back(pt);
    }
    return out;
}

TeleportMetrics teleport_metrics(
    const std::vector<TrialRecord> &x_trials, const std::vector<TrialRecord> &p_trials,
    const std::vector<TeleportProbe> &probes, bool want_gains) {
    TeleportAccumulator acc(probes);
    for (const auto &rec : x_trials) {
        acc.add(Basis::X, values_for(rec, acc.observed()).data());
    }
    for (const auto &rec : p_trials) {
        acc.add(Basis::P, values_for(rec, acc.observed()).data());
    }
    return acc.metrics(want_gains);
}

void MetricsTable::add(int64_t step, int64_t mode, const std::string &quantity, double value, double se) {
    rows.push_back({step, mode, quantity, value, se});
}

void MetricsTable::append(const MetricsTable &other) {
    if (other.config_hash != config_hash) {
        throw InvalidArgument("refusing to merge metrics with config hash " + other.config_hash + " into " + config_hash);
    }
    if (other.experiment != experiment) {
        throw InvalidArgument("refusing to merge metrics of different experiments");
    }
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    trials += other.trials;
}

double MetricsTable::get(int64_t step, int64_t mode, const std::string &quantity) const {
    for (const auto &r : rows) {
        if (r.step == step && r.mode == mode && r.quantity == quantity) {
            return r.value;
        }
    }
    return NAN;
}

void MetricsTable::write_csv(std::ostream &out) const {
    out << "# experiment=" << experiment << "\n";
    out << "# config_hash=" << config_hash << "\n";
    out << "# trials=" << trials << "\n";
    std::istringstream cfg(config_text);
    std::string line;
    while (std::getline(cfg, line)) {
        if (!line.empty()) {
            out << "# config." << line << "\n";
        }
    }
    out << "step,mode,quantity,value,stderr\n";
    for (const auto &r : rows) {
        out << r.step << ',' << r.mode << ',' << r.quantity << ',' << format_real(r.value) << ','
            << format_real(r.stderr_) << '\n';
    }
}

void MetricsTable::write_json(std::ostream &out) const {
    nlohmann::ordered_json j;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["trials"] = trials;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    std::istringstream cs(config_text);
    std::string line;
    while (std::getline(cs, line)) {
        auto eq = line.find('=');
        if (eq != std::string::npos) {
            cfg[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    j["config"] = cfg;
    nlohmann::ordered_json q = nlohmann::ordered_json::object();
    for (const auto &r : rows) {
        auto &e = q[r.quantity];
        if (e.is_null()) {
            e = {{"step", nlohmann::json::array()},
                 {"mode", nlohmann::json::array()},
                 {"value", nlohmann::json::array()},
                 {"stderr", nlohmann::json::array()}};
        }
        e["step"].push_back(r.step);
        e["mode"].push_back(r.mode);
        e["value"].push_back(r.value);
        e["stderr"].push_back(r.stderr_);
    }
    j["quantities"] = q;
    out << j.dump(1) << "\n";
}

MetricsTable MetricsTable::read_csv(std::istream &in) {
    MetricsTable t;
    std::string line;
    size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        lineno++;
        if (line.rfind("# ", 0) == 0) {
            std::string kv = line.substr(2);
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                continue;
            }
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "experiment") {
                t.experiment = val;
            } else if (key == "config_hash") {
                t.config_hash = val;
            } else if (key == "trials") {
                t.trials = std::stoull(val);
            } else if (key.rfind("config.", 0) == 0) {
                t.config_text += key.substr(7) + "=" + val + "\n";
            }
            continue;
        }
        if (!header) {
            if (line != "step,mode,quantity,value,stderr") {
                throw ParseError("expected metrics header", lineno, 1);
            }
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string f[5];
        for (int i = 0; i < 5; i++) {
            if (!std::getline(ls, f[i], ',')) {
                throw ParseError("expected 5 fields", lineno, 1);
            }
        }
        try {
            t.add(std::stoll(f[0]), std::stoll(f[1]), f[2], std::stod(f[3]), std::stod(f[4]));
        } catch (const std::logic_error &) {
            throw ParseError("malformed number", lineno, 1);
        }
    }
    if (!header) {
        throw ParseError("missing metrics header", lineno, 1);
    }
    return t;
}

MetricsTable metrics_table(const TeleportMetrics &m, const std::string &experiment, const LatticeConfig &config) {
    MetricsTable t;
    t.experiment = experiment;
    t.config_hash = config.hash();
    t.config_text = config.canonical_text();
    uint64_t trials = 0;
    for (const auto &p : m.points) {
        trials = std::max<uint64_t>(trials, p.trials_x + p.trials_p);
        if (!std::isnan(p.gain_x)) {
            t.add(p.step, p.mode, "gain_x", p.gain_x, p.gain_x_se);
            t.add(p.step, p.mode, "gain_p", p.gain_p, p.gain_p_se);
        }
        t.add(p.step, p.mode, "noise_x", p.noise_x, p.noise_x_se);
        t.add(p.step, p.mode, "noise_p", p.noise_p, p.noise_p_se);
        t.add(p.step, p.mode, "noise", p.noise, p.noise_se);
        t.add(p.step, p.mode, "noise_db", p.noise_db, db_stderr(p.noise, p.noise_se));
        t.add(p.step, p.mode, "classical_benchmark", p.classical_benchmark, 0);
        double e2r = std::exp(-2 * config.r()[0]);
        t.add(p.step, p.mode, "theory", e2r * (1 + p.step), 0);
    }
    t.trials = trials;
    return t;
}

MetricsTable metrics_table(const NullifierReport &r, const std::string &experiment, const LatticeConfig &config) {
    MetricsTable t;
    t.experiment = experiment;
    t.config_hash = config.hash();
    t.config_text = config.canonical_text();
    t.trials = r.trials;
    const char *names[] = {"A", "B", "C", "D"};
    for (size_t m = 0; m < r.db.size(); m++) {
        for (int j = 0; j < 4; j++) {
            t.add((int64_t)m, j, std::string(names[j]) + "_" + basis_char(r.basis) + "_db", r.db[m][j], r.db_stderr[m][j]);
        }
    }
    return t;
}

}  // namespace qrl
