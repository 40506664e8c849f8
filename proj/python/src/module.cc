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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <sstream>

#include "qrl/errors.h"
#include "qrl/runner.h"

namespace py = pybind11;
using namespace qrl;

namespace {

// Everything crosses as text; the Python side never sees core structs.
RunConfig make_config(const std::map<std::string, std::string> &keys) {
    RunConfig rc;
    for (const auto &[k, v] : keys) {
        rc.set(k, v);
    }
    return rc;
}

std::string table(const std::string &name, const std::map<std::string, std::string> &keys) {
    RunConfig rc = make_config(keys);
    MetricsTable t;
    if (name == "nullifiers") {
        t = cmd_nullifiers(rc);
    } else if (name == "tomography") {
        t = cmd_tomography(rc);
    } else if (name == "teleport") {
        t = cmd_teleport(rc);
    } else if (name == "route") {
        t = cmd_route(rc);
    } else {
        throw ConfigError("unknown experiment '" + name + "'");
    }
    return table_text(t, rc.format);
}

py::dict record_dict(const TrialRecord &r) {
    py::dict d;
    d["trial"] = r.trial_index;
    d["seed"] = r.seed_used;
    d["macronodes"] = r.macronodes;
    d["raw"] = r.raw;
    d["processed"] = r.processed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "qrl core bindings";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<AdjacencyError>(m, "AdjacencyError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def(
        "normalize_program", [](const std::string &text) { return serialize_program(parse_program(text)); },
        "Parses, validates and re-serializes program text.");
    m.def(
        "validate_program", [](const std::string &text) { parse_program(text).validate(); }, py::arg("text"));
    m.def(
        "compile", [](const std::string &text, const std::map<std::string, std::string> &keys) {
            return cmd_compile(text, make_config(keys));
        },
        py::arg("program"), py::arg("config") = std::map<std::string, std::string>{});
    m.def(
        "provenance", [](const std::string &schedule) { return provenance_json(parse_schedule(schedule)); },
        py::arg("schedule"));
    m.def("run", &table, py::arg("experiment"), py::arg("config") = std::map<std::string, std::string>{},
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "simulate",
        [](const std::string &schedule, const std::map<std::string, std::string> &keys) {
            RunConfig rc = make_config(keys);
            std::vector<TrialRecord> recs;
            {
                py::gil_scoped_release release;
                recs = cmd_simulate(schedule, rc);
            }
            py::list out;
            for (const auto &r : recs) {
                out.append(record_dict(r));
            }
            return out;
        },
        py::arg("schedule"), py::arg("config") = std::map<std::string, std::string>{});
    m.def(
        "simulate_text",
        [](const std::string &schedule, const std::map<std::string, std::string> &keys) {
            RunConfig rc = make_config(keys);
            return py::bytes(records_text(cmd_simulate(schedule, rc), rc.format, rc.lattice.hash_value()));
        },
        py::arg("schedule"), py::arg("config") = std::map<std::string, std::string>{});
    m.def(
        "load_records_binary",
        [](const py::bytes &data) {
            std::istringstream in(std::string(data), std::ios::binary);
            uint64_t hash = 0;
            auto recs = read_records_binary(in, &hash);
            py::list out;
            for (const auto &r : recs) {
                out.append(record_dict(r));
            }
            return py::make_tuple(hash, out);
        },
        py::arg("data"));
    m.def(
        "config_hash", [](const std::map<std::string, std::string> &keys) { return make_config(keys).lattice.hash(); },
        py::arg("config") = std::map<std::string, std::string>{});
}
