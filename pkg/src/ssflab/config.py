"""Experiment configuration: one JSON document, validated before any work.

Every tolerance default is imported from the module that owns it, so the CLI
and the library can never disagree.  Unknown keys are rejected rather than
ignored; silent typos in tolerance names would otherwise weaken experiments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import ptf, suspension, witten
from .errors import ConfigurationError
from .fixtures import FIXTURE_NAMES, fixture_endpoints, fixture_grid
from .linalg import HermitianOperator
from .models import PROFILE_KINDS, PerturbationPath, make_profile
from .suspension import TimeGrid

DEFAULT_TOLERANCES = {
    "ptf_residual": 5e-3,
    "quadrature": ptf.QUADRATURE_TOL,
    "krein_residual": 1e-10,
    "pushnitski_residual": 0.1,
    "laplace_residual": 5e-3,
    "chain": witten.CHAIN_TOL,
    "saturation": suspension.SATURATION_TOL,
    "cutoff_gap_final": 1e-12,
}

_TOP_KEYS = {
    "model",
    "profile",
    "grid",
    "t_grid",
    "lambda_grid",
    "resolvent_lambda_grid",
    "s_nodes",
    "cutoff_levels",
    "ssf_weight_p",
    "tolerances",
    "seed",
    "threads",
    "output",
    "dirac",
}

_DIRAC_KEYS = {"d", "m", "box", "modes", "potential", "potential_params", "p"}


def _parse_matrix(data) -> HermitianOperator:
    """Nested lists; complex entries are [re, im] pairs, bare numbers are real."""
    rows = []
    for row in data:
        out = []
        for cell in row:
            if isinstance(cell, (list, tuple)):
                if len(cell) != 2:
                    raise ConfigurationError(
                        f"complex entries are [re, im] pairs, got {cell!r}"
                    )
                out.append(complex(cell[0], cell[1]))
            else:
                out.append(complex(cell))
        rows.append(out)
    M = np.asarray(rows)
    if np.allclose(M.imag, 0.0):
        M = M.real
    return HermitianOperator(M)


@dataclass
class ExperimentConfig:
    model: str | dict = "FIX-SCALAR"
    profile_kind: str = "tanh"
    profile_scale: float = 1.0
    grid_half_width: float | None = None
    grid_points: int | None = None
    t_grid: tuple = (0.5, 1.0, 2.0)
    lambda_grid: tuple = (0.25, 0.5, 4.0)
    resolvent_lambda_grid: tuple = witten.DEFAULT_LAMBDA_GRID
    s_nodes: int = ptf.QUADRATURE_NODES
    cutoff_levels: tuple | None = None
    ssf_weight_p: int = 1
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    seed: int = 1234
    threads: int = 1
    out_path: str = "out"
    out_format: str = "csv"
    plots: bool = False
    dirac: dict = field(
        default_factory=lambda: {
            "d": 1,
            "m": 1.0,
            "box": 20.0,
            "modes": 33,
            "potential": "gaussian",
            "potential_params": {},
            "p": 1,
        }
    )

    def path(self) -> PerturbationPath:
        if isinstance(self.model, str):
            a_minus, b_plus = fixture_endpoints(self.model)
        else:
            a_minus = _parse_matrix(self.model["a_minus"])
            b_plus = _parse_matrix(self.model["b_plus"])
        return PerturbationPath(
            a_minus, b_plus, make_profile(self.profile_kind, self.profile_scale)
        )

    def grid(self) -> TimeGrid:
        if self.grid_half_width is None or self.grid_points is None:
            base = (
                fixture_grid(self.model)
                if isinstance(self.model, str)
                else TimeGrid(suspension.DEFAULT_HALF_WIDTH, suspension.DEFAULT_POINTS)
            )
            T = self.grid_half_width if self.grid_half_width is not None else base.half_width
            N = self.grid_points if self.grid_points is not None else base.points
            return TimeGrid(T, N)
        return TimeGrid(self.grid_half_width, self.grid_points)

    def echo(self) -> dict:
        return {
            "model": self.model,
            "profile": {"kind": self.profile_kind, "scale": self.profile_scale},
            "grid": {"half_width": self.grid().half_width, "points": self.grid().points},
            "t_grid": list(self.t_grid),
            "lambda_grid": list(self.lambda_grid),
            "resolvent_lambda_grid": list(self.resolvent_lambda_grid),
            "s_nodes": self.s_nodes,
            "cutoff_levels": list(self.cutoff_levels) if self.cutoff_levels else None,
            "ssf_weight_p": self.ssf_weight_p,
            "tolerances": dict(sorted(self.tolerances.items())),
            "seed": self.seed,
            "threads": self.threads,
            "dirac": dict(sorted(self.dirac.items(), key=lambda kv: kv[0])),
        }


def _require(cond: bool, msg: str):
    if not cond:
        raise ConfigurationError(msg)


def load_config(path: str | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Load, validate and normalise a configuration document."""
    raw = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {path!r}: {exc}") from exc
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}

    unknown = set(raw) - _TOP_KEYS
    _require(not unknown, f"unknown configuration keys: {sorted(unknown)}")

    cfg = ExperimentConfig()

    model = raw.get("model", cfg.model)
    if isinstance(model, str):
        _require(model in FIXTURE_NAMES, f"unknown fixture {model!r}; choose from {FIXTURE_NAMES}")
    else:
        _require(
            isinstance(model, dict) and {"a_minus", "b_plus"} <= set(model),
            "inline models need 'a_minus' and 'b_plus' matrices",
        )
    cfg.model = model

    profile = raw.get("profile", {})
    _require(isinstance(profile, dict), "'profile' must be an object")
    _require(set(profile) <= {"kind", "scale"}, f"unknown profile keys: {sorted(set(profile) - {'kind', 'scale'})}")
    cfg.profile_kind = profile.get("kind", cfg.profile_kind)
    _require(cfg.profile_kind in PROFILE_KINDS, f"profile kind must be one of {PROFILE_KINDS}")
    cfg.profile_scale = float(profile.get("scale", cfg.profile_scale))
    _require(cfg.profile_scale > 0, "profile scale must be positive")

    grid = raw.get("grid", {})
    _require(isinstance(grid, dict), "'grid' must be an object")
    _require(set(grid) <= {"half_width", "points"}, f"unknown grid keys: {sorted(set(grid) - {'half_width', 'points'})}")
    if "half_width" in grid:
        cfg.grid_half_width = float(grid["half_width"])
    if "points" in grid:
        cfg.grid_points = int(grid["points"])

    for key, attr in (
        ("t_grid", "t_grid"),
        ("lambda_grid", "lambda_grid"),
        ("resolvent_lambda_grid", "resolvent_lambda_grid"),
        ("cutoff_levels", "cutoff_levels"),
    ):
        if key in raw:
            vals = raw[key]
            _require(
                isinstance(vals, (list, tuple)) and all(isinstance(v, (int, float)) for v in vals),
                f"'{key}' must be a list of numbers",
            )
            setattr(cfg, attr, tuple(float(v) for v in vals))

    if "s_nodes" in raw:
        cfg.s_nodes = int(raw["s_nodes"])
        _require(cfg.s_nodes >= 4, "s_nodes must be at least 4")
    if "ssf_weight_p" in raw:
        cfg.ssf_weight_p = int(raw["ssf_weight_p"])
        _require(cfg.ssf_weight_p >= 1, "ssf_weight_p must be a positive integer")
    if "seed" in raw:
        cfg.seed = int(raw["seed"])
    if "threads" in raw:
        cfg.threads = int(raw["threads"])
        _require(cfg.threads >= 1, "threads must be at least 1")

    tols = raw.get("tolerances", {})
    _require(isinstance(tols, dict), "'tolerances' must be an object")
    unknown_tols = set(tols) - set(DEFAULT_TOLERANCES)
    _require(not unknown_tols, f"unknown tolerance keys: {sorted(unknown_tols)}")
    cfg.tolerances.update({k: float(v) for k, v in tols.items()})

    output = raw.get("output", {})
    _require(isinstance(output, dict), "'output' must be an object")
    _require(set(output) <= {"path", "format", "plots"}, f"unknown output keys: {sorted(set(output) - {'path', 'format', 'plots'})}")
    cfg.out_path = str(output.get("path", cfg.out_path))
    cfg.out_format = str(output.get("format", cfg.out_format))
    _require(cfg.out_format in ("csv", "json"), "output format must be 'csv' or 'json'")
    cfg.plots = bool(output.get("plots", cfg.plots))

    dirac_cfg = raw.get("dirac", {})
    _require(isinstance(dirac_cfg, dict), "'dirac' must be an object")
    unknown_dirac = set(dirac_cfg) - _DIRAC_KEYS
    _require(not unknown_dirac, f"unknown dirac keys: {sorted(unknown_dirac)}")
    cfg.dirac.update(dirac_cfg)

    return cfg


__all__ = ["ExperimentConfig", "load_config", "DEFAULT_TOLERANCES"]
