# Copyright 2026 The QRL Simulator Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Circuit builder and runners for the qrl lattice simulator."""

from qrl import _core
from qrl._core import AdjacencyError, CapacityError, ConfigError, InvalidArgument, ParseError
from qrl.builder import CircuitBuilder, ProgramError
from qrl.metrics import Metrics, load_metrics_csv, load_records_binary, load_records_csv
from qrl.run import compile_program, provenance, run, simulate

__all__ = [
    "AdjacencyError",
    "CapacityError",
    "CircuitBuilder",
    "ConfigError",
    "InvalidArgument",
    "Metrics",
    "ParseError",
    "ProgramError",
    "compile_program",
    "load_metrics_csv",
    "load_records_binary",
    "load_records_csv",
    "provenance",
    "run",
    "simulate",
]
