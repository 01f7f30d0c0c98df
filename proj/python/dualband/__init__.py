# SPDX-License-Identifier: Apache-2.0
"""Python access to the dualband simulator.

The compiled ``_core`` module wraps the C++ library. ``formats`` reads and writes the
dataset container and model packages with numpy alone, and has a reference forward pass.
"""

from ._core import (
    ConfigError,
    Model,
    ModelError,
    generate_dataset,
    load_model,
    make_model,
    mrc_weight,
    read_dataset,
    run_cli,
    sample_layout,
    sample_record_floats,
    waterfill,
    write_parity,
    write_samples,
)
from . import formats

__all__ = [
    "ConfigError",
    "Model",
    "ModelError",
    "formats",
    "generate_dataset",
    "load_model",
    "make_model",
    "mrc_weight",
    "read_dataset",
    "run_cli",
    "sample_layout",
    "sample_record_floats",
    "waterfill",
    "write_parity",
    "write_samples",
]
