"""Spectral shift functions for pairs of Hermitian matrices.

At matrix scale the spectral shift function of a pair is the difference of
eigenvalue counting functions,

    xi(lam; A_plus, A_minus) = #{eig(A_minus) <= lam} - #{eig(A_plus) <= lam},

a compactly supported integer step function.  Everything downstream (trace
formulas, Abel transforms, Laplace transforms, window averages) integrates
step functions in closed form, so no quadrature error enters these checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ParameterError
from .linalg import HermitianOperator
from .models import CutoffProjection, cutoff, reduce as reduce_perturbation

MERGE_TOL = 1e-12
CLAMP_TOL = 1e-8
REJECT_TOL = 1e-6


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous piecewise-constant function on the real line.

    ``values[i]`` is the value on ``[breakpoints[i], breakpoints[i+1])``;
    ``left_tail`` rules on ``(-inf, breakpoints[0])`` and ``right_tail`` on
    ``[breakpoints[-1], inf)``.  An empty breakpoint list denotes the constant
    ``left_tail`` (which must then equal ``right_tail``).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    left_tail: float = 0.0
    right_tail: float = 0.0

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if bp.size:
            if np.any(np.diff(bp) <= 0):
                raise ContractError("breakpoints must be strictly increasing")
            if vals.size != bp.size - 1:
                raise ContractError(
                    f"need one value per interior interval: "
                    f"{bp.size} breakpoints require {bp.size - 1} values, got {vals.size}"
                )
        else:
            if vals.size:
                raise ContractError("a step function without breakpoints takes no values")
            if self.left_tail != self.right_tail:
                raise ContractError("constant step function needs equal tails")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.breakpoints.size == 0:
            out = np.full_like(x, self.left_tail)
            return out if out.ndim else float(out)
        levels = np.concatenate(([self.left_tail], self.values, [self.right_tail]))
        idx = np.searchsorted(self.breakpoints, x, side="right")
        out = levels[idx]
        return out if out.ndim else float(out)

    def is_compactly_supported(self) -> bool:
        return self.left_tail == 0.0 and self.right_tail == 0.0

    def jumps(self):
        """(positions, jump sizes); requires zero tails so jumps determine f."""
        if not self.is_compactly_supported():
            raise ContractError("jump representation requires zero tails")
        if self.breakpoints.size == 0:
            return self.breakpoints, np.array([])
        levels = np.concatenate(([0.0], self.values, [0.0]))
        return self.breakpoints, np.diff(levels)

    def total_variation(self) -> float:
        if self.breakpoints.size == 0:
            return 0.0
        levels = np.concatenate(([self.left_tail], self.values, [self.right_tail]))
        return float(np.abs(np.diff(levels)).sum())

    def integrate_against(self, antideriv, a: float, b: float) -> float:
        """Exact integral of f * w over [a, b] where antideriv' = w.

        ``antideriv`` must be finite at a and b (infinite endpoints are fine
        when the antiderivative has finite limits there).
        """
        if not b >= a:
            raise ParameterError(f"empty integration range [{a}, {b}]")
        cuts = [a] + [float(x) for x in self.breakpoints if a < x < b] + [b]
        levels = np.concatenate(([self.left_tail], self.values, [self.right_tail]))
        total = 0.0
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            if hi == lo:
                continue
            # value on (lo, hi): breakpoints are only at the cut ends
            idx = int(np.searchsorted(self.breakpoints, lo, side="right"))
            total += float(levels[idx]) * (float(antideriv(hi)) - float(antideriv(lo)))
        return total

    def integral(self, a: float, b: float) -> float:
        return self.integrate_against(lambda x: x, a, b)

    def to_rows(self):
        """CSV rows (breakpoint, value to the right of it)."""
        if self.breakpoints.size == 0:
            return []
        right = np.concatenate((self.values, [self.right_tail]))
        return [(float(b), float(v)) for b, v in zip(self.breakpoints, right)]


def step_from_jumps(positions, jumps, merge_tol: float = MERGE_TOL) -> StepFunction:
    """Compactly supported step function from signed jumps.

    Positions closer than ``merge_tol * scale`` are merged; cancelled jumps
    are dropped.
    """
    positions = np.asarray(positions, dtype=float)
    jumps = np.asarray(jumps, dtype=float)
    if positions.size == 0:
        return StepFunction(np.array([]), np.array([]))
    order = np.argsort(positions, kind="stable")
    positions, jumps = positions[order], jumps[order]
    scale = max(1.0, float(np.abs(positions).max()))
    tol = merge_tol * scale

    merged_pos, merged_jump = [positions[0]], [jumps[0]]
    for p, jmp in zip(positions[1:], jumps[1:]):
        if p - merged_pos[-1] <= tol:
            merged_jump[-1] += jmp
        else:
            merged_pos.append(p)
            merged_jump.append(jmp)
    pos = np.asarray(merged_pos)
    jmp = np.asarray(merged_jump)
    keep = np.abs(jmp) > 1e-13
    pos, jmp = pos[keep], jmp[keep]
    if pos.size == 0:
        return StepFunction(np.array([]), np.array([]))
    cum = np.cumsum(jmp)
    if abs(cum[-1]) > 1e-13:
        raise ContractError("jumps do not cancel: the function would have a nonzero tail")
    return StepFunction(pos, cum[:-1])


def step_difference(f: StepFunction, g: StepFunction) -> StepFunction:
    """f - g for compactly supported step functions."""
    pf, jf = f.jumps()
    pg, jg = g.jumps()
    return step_from_jumps(np.concatenate((pf, pg)), np.concatenate((jf, -jg)))


def ssf_pair(
    a_plus: HermitianOperator,
    a_minus: HermitianOperator,
    merge_tol: float = MERGE_TOL,
) -> StepFunction:
    """Counting-function difference for a pair of equal-dimension matrices."""
    if a_plus.dim != a_minus.dim:
        raise ContractError(f"dimension mismatch: {a_plus.dim} vs {a_minus.dim}")
    pos = np.concatenate((a_minus.eigenvalues, a_plus.eigenvalues))
    jmp = np.concatenate((np.ones(a_minus.dim), -np.ones(a_plus.dim)))
    return step_from_jumps(pos, jmp, merge_tol)


def ssf_nonneg_pair(
    h2: HermitianOperator,
    h1: HermitianOperator,
    clamp_tol: float = CLAMP_TOL,
    reject_tol: float = REJECT_TOL,
) -> StepFunction:
    """Spectral shift function of a pair of nonnegative operators.

    Eigenvalue dust in ``[-reject_tol, 0)`` is clamped to zero, which makes
    the result vanish on the negative half line by construction; anything
    more negative is treated as a contract violation.  Pairs coming from the
    suspension discretisation carry near-zero modes at -O(h^2) and should
    pass the grid-aware ``psd_defect`` as ``reject_tol``.
    """
    if h2.dim != h1.dim:
        raise ContractError(f"dimension mismatch: {h2.dim} vs {h1.dim}")
    low = min(float(h1.eigenvalues[0]), float(h2.eigenvalues[0]))
    if low < -max(reject_tol, clamp_tol):
        raise ContractError(
            f"input is significantly indefinite: lowest eigenvalue {low:.3e} "
            f"< -{max(reject_tol, clamp_tol):.1e}"
        )
    w1 = np.clip(h1.eigenvalues, 0.0, None)
    w2 = np.clip(h2.eigenvalues, 0.0, None)
    pos = np.concatenate((w1, w2))
    jmp = np.concatenate((np.ones(w1.size), -np.ones(w2.size)))
    return step_from_jumps(pos, jmp)


def krein_check(a_plus: HermitianOperator, a_minus: HermitianOperator, f):
    """Both sides of the trace formula tr(f(A+) - f(A-)) = int f' xi.

    The right-hand side is evaluated in closed form: for a step function the
    integral telescopes into values times increments of f at the breakpoints.
    Returns (lhs, rhs, residual).
    """
    lhs = float(np.sum(f(a_plus.eigenvalues)) - np.sum(f(a_minus.eigenvalues)))
    xi = ssf_pair(a_plus, a_minus)
    rhs = 0.0
    if xi.breakpoints.size:
        fb = np.asarray(f(xi.breakpoints), dtype=float)
        rhs = float(np.sum(xi.values * np.diff(fb)))
    return lhs, rhs, abs(lhs - rhs)


def _weight_antiderivative(p0: int):
    """Odd antiderivative of the weight 1 / (|x|^(p0+1) + 1), p0 odd.

    The even power n = p0 + 1 factors over conjugate root pairs of
    x^n = -1, giving a closed form in logs and arctangents.
    """
    if p0 < 1 or p0 % 2 == 0:
        raise ParameterError(f"weight exponent p0 must be odd and >= 1, got {p0}")
    n = p0 + 1
    m = n // 2
    ks = np.arange(m)
    phi = (2 * ks + 1) * np.pi / (2 * m)
    c, s = np.cos(phi), np.sin(phi)
    a = -c / m
    b = np.full(m, 1.0 / m)

    def anti_pos(x: float) -> float:
        x = float(x)
        quad = x * x - 2.0 * c * x + 1.0
        val = 0.5 * a * np.log(quad) + ((b + a * c) / s) * (
            np.arctan((x - c) / s) - np.arctan(-c / s)
        )
        return float(np.sum(val))

    def anti(x: float) -> float:
        return anti_pos(x) if x >= 0 else -anti_pos(-x)

    return anti


def weighted_l1_distance(f: StepFunction, g: StepFunction, p0: int = 1) -> float:
    """Exact L1 distance in the weight (|x|^(p0+1) + 1)^{-1} dx."""
    diff = step_difference(f, g)
    if diff.breakpoints.size == 0:
        return 0.0
    anti = _weight_antiderivative(p0)
    total = 0.0
    bp = diff.breakpoints
    for i, v in enumerate(diff.values):
        if v != 0.0:
            total += abs(v) * (anti(bp[i + 1]) - anti(bp[i]))
    return total


def ssf_cutoff_limit(
    a_minus: HermitianOperator,
    b_plus: HermitianOperator,
    levels,
    p: int = 1,
):
    """Spectral shift functions of the cutoff-reduced pairs along a level sweep.

    For each level n the perturbation is reduced to P_n B P_n with P_n the
    spectral projection of a_minus onto [-n, n].  Returns ``(per_level,
    limit, gaps)`` where ``gaps[i]`` is the weighted-L1 distance between the
    level-i shift function and the unreduced one; the weight exponent is
    p0 = 2 floor(p/2) + 1.
    """
    levels = np.asarray(levels, dtype=float)
    if levels.size == 0:
        raise ParameterError("need at least one cutoff level")
    if np.any(np.diff(levels) <= 0):
        raise ParameterError("cutoff levels must be increasing")
    p0 = 2 * (int(p) // 2) + 1
    limit = ssf_pair(
        HermitianOperator(a_minus.entries + b_plus.entries), a_minus
    )
    per_level = []
    gaps = np.empty(levels.size)
    for i, lvl in enumerate(levels):
        proj: CutoffProjection = cutoff(a_minus, lvl)
        reduced = reduce_perturbation(b_plus, proj)
        xi_n = ssf_pair(
            HermitianOperator(a_minus.entries + reduced.entries), a_minus
        )
        per_level.append(xi_n)
        gaps[i] = weighted_l1_distance(xi_n, limit, p0)
    return per_level, limit, gaps
