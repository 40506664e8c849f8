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

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <json.hpp>
#include <sstream>

#include "qrl/errors.h"

namespace qrl {

namespace {

template <typename T>
T number(const std::string &key, const std::string &value) {
    try {
        return boost::lexical_cast<T>(value);
    } catch (const boost::bad_lexical_cast &) {
        throw ConfigError("bad value for " + key + ": '" + value + "'");
    }
}

bool boolean(const std::string &key, const std::string &v) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("bad value for " + key + ": '" + v + "'");
}

template <typename E>
E choice(const std::string &key, const std::string &v, std::initializer_list<std::pair<const char *, E>> options) {
    std::string all;
    for (const auto &[name, e] : options) {
        if (v == name) {
            return e;
        }
        all += all.empty() ? name : std::string("|") + name;
    }
    throw ConfigError("bad value for " + key + ": '" + v + "' (expected " + all + ")");
}

}  // namespace

void RunConfig::set(const std::string &key, const std::string &value) {
    std::string v = boost::trim_copy(value);
    if (key == "N") {
        lattice.N = number<int>(key, v);
    } else if (key == "total_macronodes") {
        lattice.total_macronodes = number<int64_t>(key, v);
    } else if (key == "squeezing_db") {
        std::vector<std::string> parts;
        boost::split(parts, v, boost::is_any_of(","));
        if (parts.size() == 1) {
            lattice.squeezing_db.fill(number<double>(key, parts[0]));
        } else if (parts.size() == 4) {
            for (int j = 0; j < 4; j++) {
                lattice.squeezing_db[j] = number<double>(key, boost::trim_copy(parts[j]));
            }
        } else {
            throw ConfigError("squeezing_db takes one value or four (A,B,C,D)");
        }
    } else if (key == "eta_short") {
        lattice.eta_short = number<double>(key, v);
    } else if (key == "eta_long") {
        lattice.eta_long = number<double>(key, v);
    } else if (key == "seed") {
        lattice.seed = number<uint64_t>(key, v);
    } else if (key == "trials") {
        trials = number<uint64_t>(key, v);
    } else if (key == "threads") {
        threads = number<unsigned>(key, v);
    } else if (key == "format") {
        format = v;
    } else if (key == "steps") {
        steps = number<int>(key, v);
    } else if (key == "basis") {
        basis = choice<Basis>(key, v, {{"x", Basis::X}, {"p", Basis::P}});
    } else if (key == "family") {
        family = choice<TomographyFamily>(
            key, v, {{"single", TomographyFamily::SingleMode}, {"cz", TomographyFamily::GeneralizedCZ}});
    } else if (key == "u_min") {
        u_min = number<double>(key, v);
    } else if (key == "u_max") {
        u_max = number<double>(key, v);
    } else if (key == "v_min") {
        v_min = number<double>(key, v);
    } else if (key == "v_max") {
        v_max = number<double>(key, v);
    } else if (key == "u_points") {
        u_points = number<int>(key, v);
    } else if (key == "v_points") {
        v_points = number<int>(key, v);
    } else if (key == "reference_trials") {
        reference_trials = number<uint64_t>(key, v);
    } else if (key == "oracle") {
        oracle = boolean(key, v);
    } else if (key == "kind") {
        kind = choice<TeleportKind>(
            key, v,
            {{"parallel", TeleportKind::Parallel},
             {"staggered", TeleportKind::Staggered},
             {"helical", TeleportKind::Helical}});
    } else if (key == "streaming") {
        streaming = boolean(key, v);
    } else if (key == "first_trial") {
        first_trial = number<uint64_t>(key, v);
    } else if (key == "order") {
        order = choice<RoutingRequest::Order>(
            key, v, {{"ascending", RoutingRequest::Order::Ascending}, {"descending", RoutingRequest::Order::Descending}});
    } else if (key == "modes") {
        modes = number<int>(key, v);
    } else if (key == "route_seed") {
        route_seed = number<uint64_t>(key, v);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

TomographyGrid RunConfig::grid() const {
    TomographyGrid g =
        family == TomographyFamily::SingleMode ? TomographyGrid::single_mode() : TomographyGrid::generalized_cz();
    g.u_min = u_min.value_or(g.u_min);
    g.u_max = u_max.value_or(g.u_max);
    g.v_min = v_min.value_or(g.v_min);
    g.v_max = v_max.value_or(g.v_max);
    g.u_points = u_points.value_or(g.u_points);
    g.v_points = v_points.value_or(g.v_points);
    return g;
}

void RunConfig::validate() const {
    lattice.validate();
    if (trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    if (steps < 0) {
        throw ConfigError("steps must be non-negative");
    }
    if (format != "csv" && format != "json" && format != "bin") {
        throw ConfigError("format must be csv or json (bin for records)");
    }
    TomographyGrid g = grid();
    if (g.u_points < 1 || g.v_points < 1 || !(g.u_min <= g.u_max) || !(g.v_min <= g.v_max)) {
        throw ConfigError("tomography grid is empty");
    }
    if (modes < 1) {
        throw ConfigError("modes must be at least 1");
    }
}

RunConfig parse_run_config(const std::string &text, RunConfig base) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        n++;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        boost::trim(line);
        if (line.empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(n) + ": expected key = value");
        }
        try {
            base.set(boost::trim_copy(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ConfigError("config line " + std::to_string(n) + ": " + e.what());
        }
    }
    return base;
}

MetricsTable cmd_nullifiers(const RunConfig &rc) {
    rc.validate();
    NullifierReport r = run_nullifiers(rc.lattice, rc.steps, rc.basis, rc.trials, rc.threads);
    return metrics_table(r, std::string("nullifiers-") + basis_char(rc.basis), rc.lattice);
}

MetricsTable cmd_tomography(const RunConfig &rc, int *skipped) {
    rc.validate();
    TomographyGrid g = rc.grid();
    uint64_t ref = rc.reference_trials ? rc.reference_trials : 4 * rc.trials;
    TomographyResult r = rc.oracle ? run_tomography(rc.lattice, g, 0, 0, true, rc.threads)
                                   : run_tomography(rc.lattice, g, rc.trials, ref, false, rc.threads);
    if (skipped) {
        *skipped = r.skipped;
    }
    MetricsTable t = tomography_table(r, g, rc.lattice);
    t.trials = rc.oracle ? 0 : rc.trials;
    return t;
}

std::string experiment_name(TeleportKind kind) {
    switch (kind) {
        case TeleportKind::Parallel:
            return "teleport-parallel";
        case TeleportKind::Staggered:
            return "teleport-staggered";
        case TeleportKind::Helical:
            return "teleport-helical";
    }
    return "teleport";
}

MetricsTable cmd_teleport(const RunConfig &rc) {
    rc.validate();
    TeleportMetrics m;
    if (rc.streaming) {
        m = run_teleport(rc.lattice, rc.kind, rc.steps, rc.trials, rc.first_trial, rc.threads);
    } else {
        if (rc.steps > kMaxNonStreamingSteps) {
            throw ConfigError(
                "non-streaming teleport limited to " + std::to_string(kMaxNonStreamingSteps) +
                " steps; use streaming = true");
        }
        std::vector<TrialRecord> recs[2];
        std::vector<TeleportProbe> probes;
        for (Basis b : {Basis::X, Basis::P}) {
            TeleportSetup s = teleport_setup(rc.kind, rc.lattice.N, rc.steps, b);
            probes = s.probes;
            LinearOutcomeMap map = build_outcome_map(s.schedule, rc.lattice);
            uint64_t base = rc.first_trial + (b == Basis::X ? 0 : rc.trials);
            recs[b == Basis::X ? 0 : 1] = sample_trials(map, rc.lattice, base, rc.trials);
        }
        m = teleport_metrics(recs[0], recs[1], probes);
    }
    return metrics_table(m, experiment_name(rc.kind), rc.lattice);
}

MetricsTable cmd_route(const RunConfig &rc) {
    rc.validate();
    RoutingRequest req = random_route_request(rc.order, rc.modes, rc.route_seed);
    return route_table(run_route_demo(rc.lattice, req, rc.trials, rc.threads), rc.lattice);
}

std::string cmd_compile(const std::string &program_text, const RunConfig &rc) {
    rc.lattice.validate();
    return serialize_schedule(compile(parse_program(program_text), rc.lattice));
}

std::vector<TrialRecord> cmd_simulate(const std::string &schedule_text, const RunConfig &rc) {
    rc.validate();
    return simulate_records(parse_schedule(schedule_text), rc.lattice, rc.first_trial, rc.trials);
}

std::string table_text(const MetricsTable &t, const std::string &format) {
    std::ostringstream out;
    if (format == "json") {
        t.write_json(out);
    } else if (format == "csv") {
        t.write_csv(out);
    } else {
        throw ConfigError("metric tables are written as csv or json");
    }
    return out.str();
}

std::string records_text(const std::vector<TrialRecord> &records, const std::string &format, uint64_t config_hash) {
    std::ostringstream out;
    if (format == "csv") {
        write_records_csv(out, records);
    } else if (format == "bin") {
        write_records_binary(out, records, config_hash);
    } else {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto &r : records) {
            j.push_back(
                {{"trial", r.trial_index},
                 {"macronodes", r.macronodes},
                 {"raw", r.raw},
                 {"processed", r.processed}});
        }
        out << j.dump() << "\n";
    }
    return out.str();
}

}  // namespace qrl
