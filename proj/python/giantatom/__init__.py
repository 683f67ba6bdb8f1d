"""Photon scattering off small and giant atoms on a 2-D coupled-resonator lattice."""

import json as _json

from ._core import (
    Coupling,
    InvalidInput,
    Lattice,
    NumericalError,
    dispersion,
    dispersion_grid,
    emission,
    optimize_line,
    presets,
    q_value,
    resolvent,
    self_energy,
    shell_amplitude,
    to_momentum,
    to_position,
    transmission,
    transmission_sweep,
    xi,
)
from ._core import run as _run

__version__ = "0.1.0"


def run(subcommand, config, output=""):
    """Run a workflow like the command-line tool and return the report as a dict."""
    return _json.loads(_run(subcommand, str(config), str(output)))


__all__ = [
    "Coupling",
    "InvalidInput",
    "Lattice",
    "NumericalError",
    "dispersion",
    "dispersion_grid",
    "emission",
    "optimize_line",
    "presets",
    "q_value",
    "resolvent",
    "run",
    "self_energy",
    "shell_amplitude",
    "to_momentum",
    "to_position",
    "transmission",
    "transmission_sweep",
    "xi",
]
