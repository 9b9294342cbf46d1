"""Frozen model fixtures and seeded random generators.

The named fixtures are part of the CLI surface and must never change:
reports are regression-tested bit for bit against them.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .linalg import HermitianOperator, diagonal
from .models import PerturbationPath, make_profile
from .suspension import TimeGrid

RAND8_SEED = 8


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> HermitianOperator:
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return HermitianOperator(scale * (M + M.conj().T) / 2)


def random_real_symmetric(rng: np.random.Generator, n: int, scale: float = 1.0) -> HermitianOperator:
    M = rng.standard_normal((n, n))
    return HermitianOperator(scale * (M + M.T) / 2)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(M)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _rand8_pair():
    rng = np.random.default_rng(RAND8_SEED)
    return random_hermitian(rng, 8), random_hermitian(rng, 8, scale=0.5)


_FIXTURES = {
    "FIX-SCALAR": lambda: (diagonal([-1.0]), diagonal([2.0])),
    "FIX-DIAG2": lambda: (diagonal([-2.0, -1.0]), diagonal([3.0, 2.0])),
    "FIX-HALFCROSS": lambda: (diagonal([-1.0]), diagonal([1.0])),
    "FIX-RAND8": _rand8_pair,
}

FIXTURE_NAMES = tuple(sorted(_FIXTURES))


def fixture_endpoints(name: str):
    """(a_minus, b_plus) for a named fixture."""
    if name not in _FIXTURES:
        raise ParameterError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")
    return _FIXTURES[name]()


def fixture_path(name: str, profile_kind: str = "tanh", profile_scale: float = 1.0) -> PerturbationPath:
    a_minus, b_plus = fixture_endpoints(name)
    return PerturbationPath(a_minus, b_plus, make_profile(profile_kind, profile_scale))


def fixture_grid(name: str) -> TimeGrid:
    """Default time grid: the half-crossing fixture needs the doubled axis."""
    if name == "FIX-HALFCROSS":
        return TimeGrid(24.0, 1601)
    return TimeGrid(12.0, 801)
