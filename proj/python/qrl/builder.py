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
from qrl._config import _text, config_keys


class ProgramError(ValueError):
    """A core error, with the program name attached."""


class CircuitBuilder:
    """Fluent construction of program text. Validation happens in the core on build()."""

    def __init__(self, n_modes, name="", seed=0):
        self.n_modes = n_modes
        self.name = name
        self.seed = seed
        self._lines = []

    def init(self, mode, theta=0.0, x=0.0, p=0.0):
        self._lines.append(f"init {mode} {_text(float(theta))} {_text(float(x))} {_text(float(p))}")
        return self

    def measure(self, mode, theta):
        self._lines.append(f"measure {mode} {_text(float(theta))}")
        return self

    def gate(self, kind, modes, *params):
        if isinstance(modes, int):
            modes = [modes]
        line = f"gate {kind} " + ",".join(str(m) for m in modes)
        for x in params:
            line += " " + _text(float(x))
        self._lines.append(line)
        return self

    def rotation(self, mode, phi):
        return self.gate("rotation", mode, phi)

    def x_shear(self, mode, kappa):
        return self.gate("xshear", mode, kappa)

    def p_shear(self, mode, eta):
        return self.gate("pshear", mode, eta)

    def squeeze45(self, mode, c):
        return self.gate("squeeze45", mode, c)

    def squeeze_neg90(self, mode, c):
        return self.gate("squeeze_neg90", mode, c)

    def arbitrary(self, mode, *params):
        return self.gate("arbitrary", mode, *params)

    def beam_splitter(self, a, b, sqrt_r, theta):
        return self.gate("bs", [a, b], sqrt_r, theta)

    def cz(self, a, b, g, h=0.0):
        return self.gate("gcz", [a, b], g, h)

    def teleport(self, mode):
        return self.gate("crossed", mode)

    def text(self):
        head = ["qrl-program v1", f"name {self.name}", f"seed {self.seed}", f"modes {self.n_modes}"]
        return "\n".join(head + self._lines) + "\n"

    def _core_call(self, fn, *args):
        try:
            return fn(*args)
        except ValueError as e:
            raise ProgramError(f"program '{self.name}': {e}") from e

    def build(self):
        """Validated, canonical program text (the core serializer's bytes)."""
        canonical = self._core_call(_core.normalize_program, self.text())
        self._core_call(_core.validate_program, canonical)
        return canonical

    def compile(self, config=None, **kwargs):
        """Schedule text, byte-identical to `qrl compile`."""
        return self._core_call(_core.compile, self.build(), config_keys(config, **kwargs))
