"""Operator model builders.

Switching profiles, straight-line perturbation paths, spectral cutoff
projections and the resolvent Taylor expansion used by the convergence
experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import erf as _erf

from .errors import ContractError, ParameterError
from .linalg import HermitianOperator, eigh, resolvent_power

PROFILE_KINDS = ("tanh", "erf", "smoothstep-compact")


@dataclass(frozen=True)
class ProfileFunction:
    """Smooth switching function with limits 0 at -inf and 1 at +inf.

    Centered: theta(-t) + theta(t) = 1.  The derivative is analytic, not a
    finite difference, so suspension assembly introduces no quadrature error.
    """

    kind: str
    scale: float
    _f: object = field(repr=False)
    _fp: object = field(repr=False)

    def __call__(self, t):
        return self._f(np.asarray(t, dtype=float))

    def deriv(self, t):
        return self._fp(np.asarray(t, dtype=float))


def _bump(u):
    """exp(-1/u) extended by 0 for u <= 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    with np.errstate(over="ignore", under="ignore"):
        out[pos] = np.exp(-1.0 / u[pos])
    return out


def _bump_d(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    pos = u > 0
    with np.errstate(over="ignore", under="ignore"):
        out[pos] = np.exp(-1.0 / u[pos]) / u[pos] ** 2
    return out


def _smoothstep(u):
    a = _bump(u)
    b = _bump(1.0 - u)
    return np.where(u >= 1.0, 1.0, np.where(u <= 0.0, 0.0, a / (a + b)))


def _smoothstep_d(u):
    a = _bump(u)
    b = _bump(1.0 - u)
    da = _bump_d(u)
    db = _bump_d(1.0 - u)
    denom = (a + b) ** 2
    inside = (u > 0.0) & (u < 1.0)
    out = np.zeros_like(np.asarray(u, dtype=float))
    out[inside] = ((da * b + a * db) / denom)[inside]
    return out


def make_profile(kind: str, scale: float = 1.0) -> ProfileFunction:
    """Build a profile from the fixed three-family catalogue."""
    if not scale > 0:
        raise ParameterError(f"profile scale must be positive, got {scale}")
    s = float(scale)
    if kind == "tanh":
        f = lambda t: 0.5 * (1.0 + np.tanh(t / s))
        fp = lambda t: 0.5 / (s * np.cosh(t / s) ** 2)
    elif kind == "erf":
        f = lambda t: 0.5 * (1.0 + _erf(t / s))
        fp = lambda t: np.exp(-((t / s) ** 2)) / (s * np.sqrt(np.pi))
    elif kind == "smoothstep-compact":
        # theta' is supported on [-scale, scale]; saturation is exact outside.
        f = lambda t: _smoothstep((t / s + 1.0) / 2.0)
        fp = lambda t: _smoothstep_d((t / s + 1.0) / 2.0) / (2.0 * s)
    else:
        raise ParameterError(f"unknown profile kind {kind!r}; choose from {PROFILE_KINDS}")
    return ProfileFunction(kind=kind, scale=s, _f=f, _fp=fp)


@dataclass(frozen=True)
class PerturbationPath:
    """The family A(t) = a_minus + theta(t) * b_plus.

    Only the product form theta(t) B is supported; the left asymptote of the
    perturbation is normalised to zero.
    """

    a_minus: HermitianOperator
    b_plus: HermitianOperator
    profile: ProfileFunction

    def __post_init__(self):
        if self.a_minus.dim != self.b_plus.dim:
            raise ContractError(
                f"endpoint dimension mismatch: {self.a_minus.dim} vs {self.b_plus.dim}"
            )

    @property
    def dim(self) -> int:
        return self.a_minus.dim

    @property
    def a_plus(self) -> HermitianOperator:
        return HermitianOperator(self.a_minus.entries + self.b_plus.entries)

    def at_parameter(self, s: float) -> HermitianOperator:
        """Straight-line interpolant A_s = a_minus + s * b_plus."""
        return HermitianOperator(self.a_minus.entries + s * self.b_plus.entries)


def path_at(path: PerturbationPath, t: float):
    """Return (A(t), B(t), B'(t)) at time t."""
    th = float(path.profile(t))
    thp = float(path.profile.deriv(t))
    A = HermitianOperator(path.a_minus.entries + th * path.b_plus.entries)
    B = HermitianOperator(th * path.b_plus.entries)
    Bp = HermitianOperator(thp * path.b_plus.entries)
    return A, B, Bp


@dataclass(frozen=True)
class CutoffProjection:
    """Spectral projection of a_minus onto eigenvalues with |lambda| <= level."""

    level: float
    projector: np.ndarray

    @property
    def rank(self) -> int:
        return int(round(float(np.real(np.trace(self.projector)))))


def cutoff(a_minus: HermitianOperator, level: float) -> CutoffProjection:
    w, U = eigh(a_minus)
    sel = np.abs(w) <= level
    Usel = U[:, sel]
    P = Usel @ Usel.conj().T
    P = (P + P.conj().T) / 2
    return CutoffProjection(level=float(level), projector=P)


def reduce(B: HermitianOperator, P: CutoffProjection) -> HermitianOperator:
    """The reduced perturbation P B P."""
    if P.projector.shape[0] != B.dim:
        raise ContractError(
            f"projector dimension {P.projector.shape[0]} does not match operator dimension {B.dim}"
        )
    return HermitianOperator(P.projector @ B.entries @ P.projector)


def cutoff_levels(a_minus: HermitianOperator, merge_tol: float = 1e-12) -> np.ndarray:
    """Sorted distinct absolute eigenvalue levels of a_minus.

    Sweeping these levels visits every distinct cutoff projection; integer
    levels would waste sweep points at matrix scale.
    """
    mags = np.sort(np.abs(a_minus.eigenvalues))
    scale = max(1.0, mags[-1])
    levels = [mags[0]]
    for m in mags[1:]:
        if m - levels[-1] > merge_tol * scale:
            levels.append(m)
    return np.asarray(levels)


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    for cut in combinations(range(total + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def taylor_expansion(a0: HermitianOperator, b: HermitianOperator, z: complex, j: int):
    """Resolvent-power Taylor expansion.

    Returns ``(terms, remainder)`` with

        (a0 + b - z)^{-j} - (a0 - z)^{-j} = sum(terms) + remainder

    holding exactly (to rounding) at finite dimension.  ``terms[i-1]`` is the
    order-i term, a sum over compositions of resolvent powers of a0 with i
    insertions of b and sign (-1)^i; the remainder carries one leading
    resolvent of a0 + b and sign (-1)^(j+1).
    """
    if j < 1 or int(j) != j:
        raise ParameterError(f"expansion order must be a positive integer, got {j}")
    j = int(j)
    a1 = HermitianOperator(a0.entries + b.entries)
    B = b.entries
    # Resolvent powers; raises SingularityError when z touches a spectrum.
    r0 = [None] + [resolvent_power(a0, z, m) for m in range(1, j + 1)]
    r1 = [None] + [resolvent_power(a1, z, m) for m in range(1, j + 1)]

    def order_term(i: int) -> np.ndarray:
        acc = np.zeros_like(r0[1])
        for ks in _compositions(j - 1, i + 1):
            prod = r0[ks[0] + 1]
            for k in ks[1:]:
                prod = prod @ B @ r0[k + 1]
            acc = acc + prod
        return (-1.0) ** i * acc

    terms = [order_term(i) for i in range(1, j + 1)]

    rem = np.zeros_like(r0[1])
    for ks in _compositions(j - 1, j + 2):
        prod = r1[ks[0] + 1]
        for k in ks[1:]:
            prod = prod @ B @ r0[k + 1]
        rem = rem + prod
    remainder = (-1.0) ** (j + 1) * rem
    return terms, remainder
