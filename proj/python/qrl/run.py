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

from qrl import _core
from qrl._config import config_keys
from qrl.metrics import Metrics


def run(experiment, config=None, **kwargs):
    """nullifiers | tomography | teleport | route. Keys match the CLI config file."""
    keys = config_keys(config, **kwargs)
    keys["format"] = "csv"
    return Metrics(_core.run(experiment, keys))


def compile_program(program, config=None, **kwargs):
    if hasattr(program, "build"):
        program = program.build()
    return _core.compile(program, config_keys(config, **kwargs))


def simulate(schedule, config=None, **kwargs):
    """List of {trial, seed, macronodes, raw, processed} dicts."""
    return _core.simulate(schedule, config_keys(config, **kwargs))


def provenance(schedule):
    return _core.provenance(schedule)
