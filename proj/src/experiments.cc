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

#include "qrl/experiments.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "qrl/errors.h"

namespace qrl {

namespace {

Eigen::Vector4d modes_of(const double *processed) {
    return four_splitter().transpose() * Eigen::Map<const Eigen::Vector4d>(processed);
}

size_t slot_of(const std::vector<int64_t> &observed, int64_t k) {
    return (size_t)(std::lower_bound(observed.begin(), observed.end(), k) - observed.begin());
}

std::vector<int64_t> sorted_unique(std::vector<int64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct AccumulatorSet {
    std::vector<MomentAccumulator> parts;
    void merge(const AccumulatorSet &o) {
        for (size_t i = 0; i < parts.size(); i++) {
            parts[i].merge(o.parts[i]);
        }
    }
};

void require_trials(uint64_t n, uint64_t min = 2) {
    if (n < min) {
        throw InvalidArgument("need at least " + std::to_string(min) + " trials");
    }
}

MacronodeAngles crossed_identity() {
    return angles_for(GateSpec::crossed_teleport())[0];
}

}  // namespace

// ---- nullifiers ----

AngleSchedule nullifier_schedule(int N, int steps, Basis basis) {
    if (steps < 1) {
        throw InvalidArgument("nullifier run needs at least one step");
    }
    AngleSchedule s;
    s.N = N;
    for (int64_t k = 0; k < (int64_t)N * (steps + 1); k++) {
        s.push(MacronodeRole::readout(basis_angle(basis)));
    }
    return s;
}

NullifierReport run_nullifiers(const LatticeConfig &config, int steps, Basis basis, uint64_t trials, unsigned threads) {
    config.validate();
    require_trials(trials);
    AngleSchedule s = nullifier_schedule(config.N, steps, basis);
    StreamingSampler sampler(s, config);
    auto acc = fold_trial_blocks(
        trials, NullifierAccumulator(s, basis, config.hash_value()),
        [&](uint64_t first, uint64_t n, NullifierAccumulator &a) {
            sampler.run(first, n, [&](uint64_t, const double *p, const double *) { a.add(p); });
        },
        1024, threads);
    return acc.report();
}

// ---- tomography ----

MacronodeAngles single_mode_angles(double phi_plus, double phi_minus) {
    double a = (phi_plus - phi_minus) / 2;
    double b = (phi_plus + phi_minus) / 2;
    return MacronodeAngles(a, b, a, b);
}

namespace {

struct TomographyLayout {
    int N;
    int64_t ref_c() const {
        return 0;
    }
    int64_t ref_a() const {
        return N - 1;
    }
    int64_t gate() const {
        return N;
    }
    int64_t out_b() const {
        return N + 1;
    }
    int64_t out_d() const {
        return 2 * N;
    }
    std::vector<int64_t> observed() const {
        return sorted_unique({ref_c(), ref_a(), gate(), out_b(), out_d()});
    }
};

// (out b, out d, ref a, ref c); without a gate the "outputs" are b_N and d_N read at the gate slot.
void tomography_values(const std::vector<int64_t> &obs, const TomographyLayout &L, bool gate, const double *proc, double *v) {
    auto m = [&](int64_t k) { return modes_of(proc + 4 * slot_of(obs, k)); };
    if (gate) {
        v[0] = m(L.out_b())[1];
        v[1] = m(L.out_d())[3];
    } else {
        Eigen::Vector4d g = m(L.gate());
        v[0] = g[1];
        v[1] = g[3];
    }
    v[2] = m(L.ref_a())[0];
    v[3] = m(L.ref_c())[2];
}

CorrelationMatrix measure_correlation(
    const LatticeConfig &config, const MacronodeAngles *gate, uint64_t first_trial, uint64_t trials, unsigned threads) {
    config.validate();
    require_trials(trials, 8);
    TomographyLayout L{config.N};
    auto plan = measurement_plan_for_tomography(2);
    auto obs = L.observed();
    std::vector<StreamingSampler> samplers;
    for (const auto &cfg : plan) {
        samplers.emplace_back(tomography_schedule(config.N, gate, cfg), config);
        samplers.back().set_observed(obs);
    }
    AccumulatorSet proto{std::vector<MomentAccumulator>(plan.size(), MomentAccumulator(4, config.hash_value()))};
    auto acc = fold_trial_blocks(
        trials, proto,
        [&](uint64_t first, uint64_t n, AccumulatorSet &a) {
            std::vector<double> proc(4 * obs.size());
            double v[4];
            for (uint64_t t = first_trial + first; t < first_trial + first + n; t++) {
                size_t c = plan_index_for_trial(plan, t);
                samplers[c].run_trial(t, proc.data());
                tomography_values(obs, L, gate != nullptr, proc.data(), v);
                a.parts[c].add(v);
            }
        },
        4096, threads);
    return correlation_from_configs(plan, acc.parts, 2, 2);
}

CorrelationMatrix exact_correlation(const LatticeConfig &config, const MacronodeAngles *gate) {
    TomographyLayout L{config.N};
    auto plan = measurement_plan_for_tomography(2);
    CorrelationMatrix c;
    c.value = Eigen::Matrix4d::Zero();
    c.stderr_ = Eigen::Matrix4d::Zero();
    c.samples = uint64_t(1) << 62;
    for (const auto &cfg : plan) {
        LinearOutcomeMap map = build_outcome_map(tomography_schedule(config.N, gate, cfg), config);
        Eigen::RowVectorXd out[2], ref[2];
        if (gate) {
            out[0] = map.readout_rows(L.out_b()).row(1);
            out[1] = map.readout_rows(L.out_d()).row(3);
        } else {
            out[0] = map.readout_rows(L.gate()).row(1);
            out[1] = map.readout_rows(L.gate()).row(3);
        }
        ref[0] = map.readout_rows(L.ref_a()).row(0);
        ref[1] = map.readout_rows(L.ref_c()).row(2);
        int qo = cfg.out == Basis::X ? 0 : 1;
        int qr = cfg.ref == Basis::X ? 0 : 1;
        for (int o = 0; o < 2; o++) {
            for (int r = 0; r < 2; r++) {
                c.value(2 * o + qo, 2 * r + qr) = (out[o].array() * map.source_variance.transpose().array() * ref[r].array()).sum();
            }
        }
    }
    return c;
}

}  // namespace

AngleSchedule tomography_schedule(int N, const MacronodeAngles *gate, BasisConfig cfg) {
    TomographyLayout L{N};
    AngleSchedule s;
    s.N = N;
    for (int64_t k = 0; k <= L.out_d(); k++) {
        if (k == L.gate() && gate != nullptr) {
            s.push(MacronodeRole::operate(*gate), "gate");
        } else {
            s.push(MacronodeRole::readout(basis_angle(k < L.gate() ? cfg.ref : cfg.out)));
        }
    }
    return s;
}

CorrelationMatrix measure_input_correlation(const LatticeConfig &config, uint64_t first_trial, uint64_t trials, unsigned threads) {
    return measure_correlation(config, nullptr, first_trial, trials, threads);
}

CorrelationMatrix measure_output_correlation(
    const LatticeConfig &config, const MacronodeAngles &gate, uint64_t first_trial, uint64_t trials, unsigned threads) {
    return measure_correlation(config, &gate, first_trial, trials, threads);
}

TomographyCorrelations oracle_correlations(const LatticeConfig &config, const MacronodeAngles &gate) {
    config.validate();
    return {exact_correlation(config, &gate), exact_correlation(config, nullptr)};
}

TomographyGrid TomographyGrid::single_mode(int u_points, int v_points) {
    TomographyGrid g;
    g.u_points = u_points;
    g.v_points = v_points;
    return g;
}

TomographyGrid TomographyGrid::generalized_cz(int points) {
    TomographyGrid g;
    g.family = TomographyFamily::GeneralizedCZ;
    g.u_min = g.v_min = -2;
    g.u_max = g.v_max = 2;
    g.u_points = g.v_points = points;
    g.u_periodic = false;
    return g;
}

std::vector<std::pair<double, double>> TomographyGrid::points() const {
    if (u_points < 1 || v_points < 1) {
        throw InvalidArgument("tomography grid must be non-empty");
    }
    auto axis = [](double lo, double hi, int n, bool periodic) {
        std::vector<double> a;
        for (int i = 0; i < n; i++) {
            double denom = periodic ? n : std::max(1, n - 1);
            a.push_back(n == 1 && !periodic ? lo : lo + (hi - lo) * i / denom);
        }
        return a;
    };
    std::vector<std::pair<double, double>> out;
    for (double u : axis(u_min, u_max, u_points, u_periodic)) {
        for (double v : axis(v_min, v_max, v_points, false)) {
            out.emplace_back(u, v);
        }
    }
    return out;
}

double TomographyResult::mean_error() const {
    if (points.empty()) {
        return NAN;
    }
    double s = 0;
    for (const auto &p : points) {
        s += p.error;
    }
    return s / points.size();
}

double TomographyResult::stddev_error() const {
    if (points.size() < 2) {
        return NAN;
    }
    double m = mean_error(), s = 0;
    for (const auto &p : points) {
        s += (p.error - m) * (p.error - m);
    }
    return std::sqrt(s / (points.size() - 1));
}

std::pair<MacronodeAngles, Eigen::Matrix4d> tomography_target(TomographyFamily family, double u, double v) {
    if (family == TomographyFamily::SingleMode) {
        MacronodeAngles a = single_mode_angles(u, v);
        Eigen::Matrix2d V = v_matrix(u, v);
        Eigen::Matrix4d S = Eigen::Matrix4d::Zero();
        S.block<2, 2>(0, 0) = V;
        S.block<2, 2>(2, 2) = V;
        return {a, S};
    }
    GateSpec g = GateSpec::generalized_cz(u, v);
    return {angles_for(g)[0], analytic_gate_matrix(g)};
}

TomographyResult run_tomography(
    const LatticeConfig &config, const TomographyGrid &grid, uint64_t trials_per_point, uint64_t reference_trials,
    bool oracle, unsigned threads) {
    config.validate();
    TomographyResult res;
    CorrelationMatrix in_ref;
    if (oracle) {
        in_ref = exact_correlation(config, nullptr);
    } else {
        in_ref = measure_input_correlation(config, 0, reference_trials, threads);
    }
    uint64_t next = reference_trials;
    for (auto [u, v] : grid.points()) {
        std::pair<MacronodeAngles, Eigen::Matrix4d> target;
        try {
            target = tomography_target(grid.family, u, v);
            target.first.check_non_degenerate();
        } catch (const DegenerateTeleportation &) {
            res.skipped++;
            continue;
        } catch (const SingularParameter &) {
            res.skipped++;
            continue;
        }
        CorrelationMatrix out_ref = oracle ? exact_correlation(config, &target.first)
                                           : measure_output_correlation(config, target.first, next, trials_per_point, threads);
        next += trials_per_point;
        MatrixEstimate est = estimate_S(out_ref, in_ref);
        TomographyPoint p;
        p.u = u;
        p.v = v;
        p.theory = target.second;
        p.estimate = est.value;
        p.stderr_ = est.stderr_;
        p.error = frobenius_error(est.value, target.second);
        res.points.push_back(p);
    }
    return res;
}

// ---- teleportation ----

TeleportSetup teleport_setup(TeleportKind kind, int N, int steps, Basis basis) {
    if (N < 2) {
        throw InvalidArgument("N must be at least 2");
    }
    if (steps < 0) {
        throw InvalidArgument("steps must be non-negative");
    }
    double th = basis_angle(basis);
    TeleportSetup t;
    t.schedule.N = N;
    Eigen::Vector2d in(kTeleportInputAmplitude, kTeleportInputAmplitude);
    switch (kind) {
        case TeleportKind::Parallel:
        case TeleportKind::Staggered: {
            if (kind == TeleportKind::Staggered && steps > N - 1) {
                throw InvalidArgument("staggered run has at most N - 1 steps");
            }
            // Turn 0 reads the references and displaces d_{c+N}; column c is read at turn m_c + 1.
            int turns = steps + 2;
            std::vector<int> m(N);
            for (int c = 0; c < N; c++) {
                m[c] = kind == TeleportKind::Parallel ? steps : c % (steps + 1);
            }
            for (int turn = 0; turn < turns; turn++) {
                for (int c = 0; c < N; c++) {
                    if (turn == 0) {
                        t.schedule.push(MacronodeRole::readout(th, Eigen::Vector4d(0, 0, in[0], in[1])), "reference");
                    } else if (turn <= m[c]) {
                        t.schedule.push(MacronodeRole::operate(crossed_identity()), "teleport");
                    } else {
                        t.schedule.push(MacronodeRole::readout(th), turn == m[c] + 1 ? "output" : "");
                    }
                }
            }
            for (int c = 0; c < N; c++) {
                TeleportProbe p;
                p.step = m[c];
                p.mode = c;
                p.ref_macronode = c;
                p.ref_mode = 2;
                p.out_macronode = c + (int64_t)(m[c] + 1) * N;
                p.out_mode = 3;
                p.input_mean = in;
                t.probes.push_back(p);
            }
            break;
        }
        case TeleportKind::Helical: {
            int64_t k0 = N;
            for (int64_t k = 0; k <= k0 + steps; k++) {
                if (k == k0 - 1) {
                    t.schedule.push(MacronodeRole::readout(th, Eigen::Vector4d(in[0], in[1], 0, 0)), "reference");
                } else if (k >= k0 && k < k0 + steps) {
                    t.schedule.push(MacronodeRole::operate(crossed_identity()), "teleport");
                } else {
                    t.schedule.push(MacronodeRole::readout(th), k == k0 + steps ? "output" : "");
                }
            }
            TeleportProbe p;
            p.step = steps;
            p.ref_macronode = k0 - 1;
            p.ref_mode = 0;
            p.out_macronode = k0 + steps;
            p.out_mode = 1;
            p.input_mean = in;
            t.probes.push_back(p);
            break;
        }
    }
    return t;
}

TeleportMetrics run_teleport(
    const LatticeConfig &config, TeleportKind kind, int steps, uint64_t trials, uint64_t first_trial, unsigned threads) {
    config.validate();
    require_trials(trials);
    TeleportAccumulator acc;
    for (Basis b : {Basis::X, Basis::P}) {
        TeleportSetup setup = teleport_setup(kind, config.N, steps, b);
        TeleportAccumulator proto(setup.probes, config.hash_value());
        StreamingSampler sampler(setup.schedule, config);
        sampler.set_observed(proto.observed());
        uint64_t base = first_trial + (b == Basis::X ? 0 : trials);
        auto part = fold_trial_blocks(
            trials, proto,
            [&](uint64_t first, uint64_t n, TeleportAccumulator &a) {
                sampler.run(base + first, n, [&](uint64_t, const double *p, const double *) { a.add(b, p); });
            },
            256, threads);
        if (b == Basis::X) {
            acc = part;
        } else {
            acc.merge(part);
        }
    }
    return acc.metrics(true);
}

LineFit fit_noise_line(
    const std::vector<double> &steps, const std::vector<double> &noise, const std::vector<double> &stderr_) {
    if (steps.size() != noise.size() || steps.size() < 2 || (!stderr_.empty() && stderr_.size() != steps.size())) {
        throw InvalidArgument("line fit needs at least two matching points");
    }
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < steps.size(); i++) {
        double w = 1;
        if (!stderr_.empty()) {
            if (!(stderr_[i] > 0)) {
                throw InvalidArgument("line fit weights need positive standard errors");
            }
            w = 1 / (stderr_[i] * stderr_[i]);
        }
        n += w;
        sx += w * steps[i];
        sy += w * noise[i];
        sxx += w * steps[i] * steps[i];
        sxy += w * steps[i] * noise[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0) {
        throw InvalidArgument("line fit needs distinct steps");
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    for (size_t i = 0; i < steps.size(); i++) {
        double fit = f.intercept + f.slope * steps[i];
        f.max_rel_residual = std::max(f.max_rel_residual, std::abs(noise[i] - fit) / std::abs(fit));
    }
    return f;
}

// ---- initialization ----

double InitMomentCheck::max_z() const {
    double z = 0;
    for (int i = 0; i < 4; i++) {
        z = std::max(z, std::abs(sampled[i] - theory[i]) / stderr_[i]);
    }
    return z;
}

InitMomentCheck run_init_moments(const LatticeConfig &config, double theta, uint64_t trials, unsigned threads) {
    config.validate();
    require_trials(trials, 3);
    int N = config.N;
    InitMomentCheck out;
    out.theta = theta;
    out.trials = trials;
    out.theory = initialization_feedforward(theta, config.r()).variances;
    // Init at macronode 1; b_2 is read at 2 and d_{1+N} at 1 + N.
    for (int q = 0; q < 2; q++) {
        double ro = q == 0 ? M_PI / 2 - theta : -theta;
        AngleSchedule s;
        s.N = N;
        for (int k = 0; k <= 1 + N; k++) {
            s.push(k == 1 ? MacronodeRole::initialize(theta) : MacronodeRole::readout(k == 0 ? 0 : ro));
        }
        std::vector<int64_t> obs = sorted_unique({2, 1 + N});
        StreamingSampler sampler(s, config);
        sampler.set_observed(obs);
        auto acc = fold_trial_blocks(
            trials, MomentAccumulator(2, config.hash_value()),
            [&](uint64_t first, uint64_t n, MomentAccumulator &a) {
                sampler.run(q * trials + first, n, [&](uint64_t, const double *p, const double *) {
                    double v[2] = {modes_of(p + 4 * slot_of(obs, 2))[1], modes_of(p + 4 * slot_of(obs, 1 + N))[3]};
                    a.add(v);
                });
            },
            4096, threads);
        Eigen::MatrixXd c = acc.covariance();
        double n = (double)trials;
        for (int rail = 0; rail < 2; rail++) {
            double var = c(rail, rail);
            out.sampled[2 * rail + q] = var;
            out.stderr_[2 * rail + q] = out.theory[2 * rail + q] * std::sqrt(2 / (n - 1));
        }
    }
    return out;
}

// ---- routing ----

RoutingRequest random_route_request(RoutingRequest::Order order, int n_modes, uint64_t seed) {
    if (n_modes < 1) {
        throw InvalidArgument("routing demo needs at least one mode");
    }
    RoutingRequest req;
    req.order = order;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < n_modes; i++) {
        req.x_amplitudes.push_back(u(rng));
        req.p_amplitudes.push_back(kTeleportInputAmplitude);
    }
    if (order == RoutingRequest::Order::Explicit) {
        req.permutation.resize(n_modes);
        for (int i = 0; i < n_modes; i++) {
            req.permutation[i] = i;
        }
        std::shuffle(req.permutation.begin(), req.permutation.end(), rng);
    }
    return req;
}

RouteDemo run_route_demo(const LatticeConfig &config, const RoutingRequest &req, uint64_t trials, unsigned threads) {
    config.validate();
    RouteDemo d;
    d.routed = compile_routing(req, config);
    int n = req.n_modes();
    d.input_x = req.x_amplitudes;
    d.input_p = req.p_amplitudes;
    d.input_x.resize(n, 0.0);
    d.input_p.resize(n, 0.0);
    RoutingTrace tr = realized_permutation(d.routed.schedule);
    if (tr.permutation != d.routed.permutation) {
        throw MisuseError("routed schedule does not realize the requested permutation");
    }
    std::vector<int> from(n);
    for (int i = 0; i < n; i++) {
        from[tr.permutation[i]] = i;
    }
    d.transits.resize(n);
    d.input_var_x.resize(n);
    auto init = initialization_feedforward(req.init_theta, config.r());
    for (int j = 0; j < n; j++) {
        int i = from[j];
        d.transits[j] = tr.transits[i];
        d.input_var_x[j] = d.routed.schedule.inputs[i].rail == Rail::B ? init.variances[0] : init.variances[2];
    }

    const auto &outs = d.routed.schedule.outputs;
    std::vector<int64_t> obs;
    for (const auto &t : outs) {
        obs.push_back(t.macronode);
    }
    obs = sorted_unique(obs);
    auto values = [&](const double *p, std::vector<double> &v) {
        for (int j = 0; j < n; j++) {
            v[j] = modes_of(p + 4 * slot_of(obs, outs[j].macronode))[(int)outs[j].rail];
        }
    };

    AngleSchedule sx = with_output_readout_angle(d.routed.schedule, M_PI / 2);
    AngleSchedule sp = with_output_readout_angle(d.routed.schedule, 0);
    for (int q = 0; q < 2; q++) {
        StreamingSampler sampler(q == 0 ? sx : sp, config);
        sampler.set_observed(obs);
        std::vector<double> mean(4 * obs.size()), v(n);
        sampler.run_mean(mean.data());
        values(mean.data(), v);
        (q == 0 ? d.exact_x : d.exact_p) = v;
        if (trials == 0) {
            continue;
        }
        require_trials(trials);
        auto acc = fold_trial_blocks(
            trials, MomentAccumulator(n, config.hash_value()),
            [&](uint64_t first, uint64_t cnt, MomentAccumulator &a) {
                std::vector<double> w(n);
                sampler.run(q * trials + first, cnt, [&](uint64_t, const double *p, const double *) {
                    values(p, w);
                    a.add(w.data());
                });
            },
            1024, threads);
        Eigen::VectorXd se = acc.mean_stderr();
        Eigen::MatrixXd cov = acc.covariance();
        std::vector<double> m(acc.mean().data(), acc.mean().data() + n), s(se.data(), se.data() + n);
        if (q == 0) {
            d.mean_x = m;
            d.se_x = s;
            d.var_x.resize(n);
            d.var_x_se.resize(n);
            for (int j = 0; j < n; j++) {
                d.var_x[j] = cov(j, j);
                d.var_x_se[j] = cov(j, j) * std::sqrt(2.0 / (trials - 1));
            }
        } else {
            d.mean_p = m;
            d.se_p = s;
        }
    }
    d.trials = trials;

    std::vector<double> want(n);
    for (int i = 0; i < n; i++) {
        want[tr.permutation[i]] = d.input_x[i];
    }
    d.exact_sorted = true;
    for (int j = 0; j < n; j++) {
        d.exact_sorted = d.exact_sorted && std::abs(d.exact_x[j] - want[j]) <= 1e-9;
        if (j > 0 && req.order == RoutingRequest::Order::Ascending) {
            d.exact_sorted = d.exact_sorted && d.exact_x[j] >= d.exact_x[j - 1];
        }
        if (j > 0 && req.order == RoutingRequest::Order::Descending) {
            d.exact_sorted = d.exact_sorted && d.exact_x[j] <= d.exact_x[j - 1];
        }
    }
    return d;
}

// ---- oracle equivalence ----

OracleCheck run_oracle_equivalence(const LatticeConfig &config, const AngleSchedule &schedule, uint64_t trials, unsigned threads) {
    config.validate();
    require_trials(trials, 3);
    LinearOutcomeMap map = build_outcome_map(schedule, config);
    Eigen::MatrixXd cov = map.covariance();
    int dim = (int)map.d.size();
    StreamingSampler sampler(padded_schedule(schedule, config), config);
    auto acc = fold_trial_blocks(
        trials, MomentAccumulator(dim, config.hash_value()),
        [&](uint64_t first, uint64_t n, MomentAccumulator &a) {
            sampler.run(first, n, [&](uint64_t, const double *p, const double *) { a.add(p); });
        },
        8192, threads);
    Eigen::MatrixXd c = acc.covariance();
    OracleCheck out;
    out.trials = trials;
    double n = (double)trials;
    for (int i = 0; i < dim; i++) {
        double se_mean = std::sqrt(cov(i, i) / n);
        if (se_mean > 0) {
            out.max_z = std::max(out.max_z, std::abs(acc.mean()[i] - map.d[i]) / se_mean);
            out.entries++;
        }
        for (int j = 0; j <= i; j++) {
            double se = std::sqrt((cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j)) / (n - 1));
            if (se == 0) {
                continue;
            }
            out.max_z = std::max(out.max_z, std::abs(c(i, j) - cov(i, j)) / se);
            out.entries++;
        }
    }
    return out;
}

// ---- records ----

std::vector<TrialRecord> simulate_records(
    const AngleSchedule &schedule, const LatticeConfig &config, uint64_t first_trial, uint64_t trials,
    const std::vector<int64_t> &observed) {
    config.validate();
    StreamingSampler sampler(padded_schedule(schedule, config), config);
    if (!observed.empty()) {
        sampler.set_observed(sorted_unique(observed));
    }
    std::vector<TrialRecord> out;
    out.reserve(trials);
    for (uint64_t t = first_trial; t < first_trial + trials; t++) {
        out.push_back(sampler.record(t));
    }
    return out;
}

// ---- tables ----

namespace {

MetricsTable table_for(const std::string &experiment, const LatticeConfig &config, uint64_t trials) {
    MetricsTable t;
    t.experiment = experiment;
    t.config_hash = config.hash();
    t.config_text = config.canonical_text();
    t.trials = trials;
    return t;
}

}  // namespace

MetricsTable tomography_table(const TomographyResult &r, const TomographyGrid &grid, const LatticeConfig &config) {
    MetricsTable t = table_for(
        grid.family == TomographyFamily::SingleMode ? "tomography_single_mode" : "tomography_gcz", config, 0);
    const char *un = grid.family == TomographyFamily::SingleMode ? "phi_plus" : "g";
    const char *vn = grid.family == TomographyFamily::SingleMode ? "phi_minus" : "h";
    for (size_t i = 0; i < r.points.size(); i++) {
        const auto &p = r.points[i];
        t.add((int64_t)i, -1, un, p.u);
        t.add((int64_t)i, -1, vn, p.v);
        t.add((int64_t)i, -1, "frobenius_error", p.error);
        for (int e = 0; e < 16; e++) {
            int row = e / 4, col = e % 4;
            t.add((int64_t)i, e, "S_est", p.estimate(row, col), p.stderr_(row, col));
            t.add((int64_t)i, e, "S_theory", p.theory(row, col), 0);
        }
    }
    t.add(-1, -1, "mean_frobenius_error", r.mean_error(), r.stddev_error());
    t.add(-1, -1, "skipped_points", r.skipped);
    return t;
}

MetricsTable route_table(const RouteDemo &d, const LatticeConfig &config) {
    MetricsTable t = table_for("route", config, d.trials);
    int n = (int)d.exact_x.size();
    std::vector<int> from(n);
    for (int i = 0; i < n; i++) {
        from[d.routed.permutation[i]] = i;
    }
    for (int j = 0; j < n; j++) {
        int i = from[j];
        t.add(j, i, "input_x", d.input_x[i]);
        t.add(j, i, "input_p", d.input_p[i]);
        t.add(j, i, "exact_x", d.exact_x[j]);
        t.add(j, i, "exact_p", d.exact_p[j]);
        if (!d.mean_x.empty()) {
            t.add(j, i, "mean_x", d.mean_x[j], d.se_x[j]);
            t.add(j, i, "mean_p", d.mean_p[j], d.se_p[j]);
            t.add(j, i, "var_x", d.var_x[j], d.var_x_se[j]);
        }
        t.add(j, i, "transits", d.transits[j]);
    }
    t.add(-1, -1, "depth", d.routed.depth);
    t.add(-1, -1, "sorted", d.exact_sorted ? 1 : 0);
    return t;
}

}  // namespace qrl
