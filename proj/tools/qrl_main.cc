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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "qrl/errors.h"
#include "qrl/runner.h"

namespace fs = std::filesystem;
using namespace qrl;

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string &out_dir, const std::string &name, const std::string &bytes) {
    if (out_dir.empty()) {
        std::cout << bytes;
        return;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    fs::path p = fs::path(out_dir) / name;
    std::ofstream f(p, std::ios::binary);
    f << bytes;
    if (!f) {
        throw IoError("cannot write " + p.string());
    }
    std::cerr << "wrote " << p.string() << "\n";
}

// Flag values are kept as text and applied through RunConfig::set after the config file, so flags win.
struct Overrides {
    std::map<std::string, std::string> values;

    void add(CLI::App *app, const std::string &flag, const std::string &key, const std::string &help) {
        app->add_option_function<std::string>(
            flag, [this, key](const std::string &v) { values[key] = v; }, help);
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Time-domain cluster-state lattice simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    Overrides common;
    app.add_option("--config", config_path, "flat key = value config file");
    app.add_option("--out", out_dir, "output directory (default: stdout)");
    common.add(&app, "--seed", "seed", "master seed");
    common.add(&app, "--trials", "trials", "Monte Carlo trials");
    common.add(&app, "--format", "format", "csv | json (simulate also: bin)");
    common.add(&app, "--threads", "threads", "worker threads, 0 = all");
    common.add(&app, "--N", "N", "macronodes per turn");
    common.add(&app, "--squeezing-db", "squeezing_db", "source squeezing in dB, one value or A,B,C,D");
    common.add(&app, "--eta-short", "eta_short", "short-path efficiency");
    common.add(&app, "--eta-long", "eta_long", "long-path efficiency");
    common.add(&app, "--total-macronodes", "total_macronodes", "pad schedules to this length");
    app.fallthrough();

    auto *nul = app.add_subcommand("nullifiers", "nullifier variances per step and source");
    common.add(nul, "--steps", "steps", "turns after the first");
    common.add(nul, "--basis", "basis", "x | p");

    auto *tomo = app.add_subcommand("tomography", "gate tomography over a parameter grid");
    common.add(tomo, "--family", "family", "single | cz");
    common.add(tomo, "--u-min", "u_min", "phi+ or g lower bound");
    common.add(tomo, "--u-max", "u_max", "phi+ or g upper bound");
    common.add(tomo, "--u-points", "u_points", "points along u");
    common.add(tomo, "--v-min", "v_min", "phi- or h lower bound");
    common.add(tomo, "--v-max", "v_max", "phi- or h upper bound");
    common.add(tomo, "--v-points", "v_points", "points along v");
    common.add(tomo, "--reference-trials", "reference_trials", "trials for the input correlation");
    common.add(tomo, "--oracle", "oracle", "exact correlations instead of sampling (true|false)");

    auto *tel = app.add_subcommand("teleport", "teleportation gains and witness");
    common.add(tel, "--kind", "kind", "parallel | staggered | helical");
    common.add(tel, "--steps", "steps", "teleportation steps");
    common.add(tel, "--streaming", "streaming", "constant-memory sampling (true|false)");
    common.add(tel, "--first-trial", "first_trial", "first trial index");

    auto *route = app.add_subcommand("route", "sort seeded displacements through the lattice");
    common.add(route, "--order", "order", "ascending | descending");
    common.add(route, "--modes", "modes", "number of modes");
    common.add(route, "--route-seed", "route_seed", "seed of the random displacements");

    std::string input_path;
    auto *comp = app.add_subcommand("compile", "program text to schedule text");
    comp->add_option("program", input_path, "program file")->required();

    auto *sim = app.add_subcommand("simulate", "schedule text to trial records");
    sim->add_option("schedule", input_path, "schedule file")->required();
    common.add(sim, "--first-trial", "first_trial", "first trial index");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    try {
        RunConfig rc;
        if (!config_path.empty()) {
            rc = parse_run_config(read_file(config_path));
        }
        for (const auto &[k, v] : common.values) {
            rc.set(k, v);
        }
        rc.validate();

        if (nul->parsed()) {
            MetricsTable t = cmd_nullifiers(rc);
            emit(out_dir, t.experiment + "." + rc.format, table_text(t, rc.format));
        } else if (tomo->parsed()) {
            int skipped = 0;
            MetricsTable t = cmd_tomography(rc, &skipped);
            if (skipped) {
                std::cerr << "warning: skipped " << skipped << " grid points inside the degeneracy band\n";
            }
            emit(out_dir, t.experiment + "." + rc.format, table_text(t, rc.format));
        } else if (tel->parsed()) {
            MetricsTable t = cmd_teleport(rc);
            emit(out_dir, t.experiment + "." + rc.format, table_text(t, rc.format));
        } else if (route->parsed()) {
            MetricsTable t = cmd_route(rc);
            emit(out_dir, t.experiment + "." + rc.format, table_text(t, rc.format));
        } else if (comp->parsed()) {
            std::string sched = cmd_compile(read_file(input_path), rc);
            emit(out_dir, "schedule.txt", sched);
            if (!out_dir.empty()) {
                emit(out_dir, "provenance.json", provenance_json(parse_schedule(sched)));
            }
        } else if (sim->parsed()) {
            auto recs = cmd_simulate(read_file(input_path), rc);
            emit(out_dir, "records." + rc.format, records_text(recs, rc.format, rc.lattice.hash_value()));
        }
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const ParseError &e) {
        std::cerr << "parse error in " << input_path << ": " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
