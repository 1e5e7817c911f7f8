"""Polar PIC Vlasov-Poisson solver with instantaneous feedback control."""

import json

from . import _core
from ._core import (
    ConfigError,
    DomainError,
    IntegrationError,
    NumericalFailure,
    Simulation as _Simulation,
    boundary_thermal_energy,
    deposit_density,
    efield,
    mode_amplitude,
    sample_diocotron,
    set_threads,
    solve_poisson,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "IntegrationError",
    "NumericalFailure",
    "Simulation",
    "boundary_thermal_energy",
    "config",
    "convergence_study",
    "deposit_density",
    "efield",
    "mode_amplitude",
    "presets",
    "run",
    "sample_diocotron",
    "set_threads",
    "solve_poisson",
    "strategy_two_pointwise",
]


def presets():
    return list(_core.preset_names())


def config(preset=None, **overrides):
    """Resolved configuration dict: defaults or a preset, then overrides."""
    base = json.loads(_core.preset_json(preset) if preset else _core.default_json())
    base.update(overrides)
    return json.loads(_core.normalize_json(json.dumps(base)))


def _doc(cfg):
    return json.dumps(cfg if isinstance(cfg, dict) else config(cfg))


def run(cfg, out_dir=None):
    return _core.run(_doc(cfg), str(out_dir) if out_dir else "")


def convergence_study(cfg, steps, reference_steps):
    return _core.convergence_study(_doc(cfg), list(steps), int(reference_steps))


def strategy_two_pointwise(state, e_r, weights, h):
    """weights: dict of weight keys, e.g. {"alpha_r": 100, "gamma": 1e-4}."""
    return _core.strategy_two_pointwise(
        state["r"], state["theta"], state["v_r"], state["v_theta"], e_r, json.dumps(weights), h
    )


class Simulation(_Simulation):
    def __init__(self, cfg):
        super().__init__(_doc(cfg))
