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

import csv
import io

import numpy as np

from qrl import _core


class Metrics:
    """Long-format metric table (step, mode, quantity, value, stderr) as numpy arrays."""

    def __init__(self, text):
        self.text = text
        self.header = {}
        body = []
        for line in text.splitlines():
            if line.startswith("# "):
                k, _, v = line[2:].partition("=")
                self.header[k] = v
            else:
                body.append(line)
        rows = list(csv.DictReader(io.StringIO("\n".join(body))))
        self.step = np.array([int(r["step"]) for r in rows], dtype=np.int64)
        self.mode = np.array([int(r["mode"]) for r in rows], dtype=np.int64)
        self.quantity = np.array([r["quantity"] for r in rows])
        self.value = np.array([float(r["value"]) for r in rows])
        self.stderr = np.array([float(r["stderr"]) if r["stderr"] else np.nan for r in rows])

    @property
    def experiment(self):
        return self.header.get("experiment")

    @property
    def config_hash(self):
        return self.header.get("config_hash")

    def select(self, quantity):
        m = self.quantity == quantity
        return self.step[m], self.mode[m], self.value[m], self.stderr[m]

    def get(self, step, mode, quantity):
        m = (self.step == step) & (self.mode == mode) & (self.quantity == quantity)
        return float(self.value[m][0]) if m.any() else float("nan")


def load_metrics_csv(path):
    with open(path) as f:
        return Metrics(f.read())


def load_records_csv(path):
    """trial, macronode, port index (A..D -> 0..3), raw, processed as a structured array."""
    dtype = [("trial", np.int64), ("macronode", np.int64), ("port", np.int64), ("raw", float), ("processed", float)]
    out = []
    with open(path) as f:
        for r in csv.DictReader(f):
            out.append((int(r["trial"]), int(r["macronode"]), "ABCD".index(r["port"]), float(r["raw"]),
                        float(r["processed"])))
    return np.array(out, dtype=dtype)


def load_records_binary(path_or_bytes):
    """(config_hash, list of record dicts) from the binary frame format."""
    data = path_or_bytes
    if not isinstance(data, (bytes, bytearray)):
        with open(path_or_bytes, "rb") as f:
            data = f.read()
    return _core.load_records_binary(bytes(data))
