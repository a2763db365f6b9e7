# Copyright 2026 The adaptq Authors
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

"""Python bindings for the adaptq adaptive-circuit simulator."""

import json
import os
from pathlib import Path

_packaged_device = Path(__file__).with_name("data") / "device_8ring.json"
if "ADAPTQ_DEVICE" not in os.environ and _packaged_device.is_file():
    os.environ["ADAPTQ_DEVICE"] = str(_packaged_device)

from ._adaptq import (  # noqa: E402
    AdaptqError,
    Circuit,
    Protocol,
    __version__,
    build_protocol,
    default_device_path,
    device_warnings,
    ef_from_r,
    enumerate_branches,
    execute,
    ghz_fidelity,
    r_from_ef,
    truth_table_fidelity,
    tvd,
)
from ._adaptq import run_json as _run_json  # noqa: E402

__all__ = [
    "AdaptqError",
    "Circuit",
    "Protocol",
    "__version__",
    "build_protocol",
    "default_device_path",
    "device_warnings",
    "ef_from_r",
    "enumerate_branches",
    "execute",
    "ghz_fidelity",
    "r_from_ef",
    "run",
    "truth_table_fidelity",
    "tvd",
]


def run(protocol, output_dir, **options):
    """Run one experiment and return its manifest as a dict.

    Options mirror ``adaptq run``: n, input, placement, bell_mode, reuse_reset,
    engine, noise, shots, seed, dd.
    """
    config = dict(options, protocol=protocol, output_dir=str(output_dir))
    return json.loads(_run_json(json.dumps(config)))
