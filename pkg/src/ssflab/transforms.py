"""Integral transforms connecting the two spectral shift functions.

The Abel transform maps the shift function of the endpoint pair to the shift
function of the suspension pair; a Laplace transform identity ties both to
the heat-trace gap; and one-sided Lebesgue points at zero produce the Witten
index.  All transforms of step functions are evaluated in closed form
(arcsine, power and error-function antiderivatives), never by quadrature:
the identities are exact, so the only error left is the suspension
discretisation itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf as _erf

from .errors import ParameterError
from .ssf import StepFunction, ssf_nonneg_pair
from .suspension import SuspensionPair, heat_trace_gap

# Window-average width for comparing the discrete (integer-stepped) shift
# function of a suspension pair against its almost-everywhere continuum
# prediction, in units of the local eigenvalue spacing.
WINDOW_SPACINGS = 3.0
LEBESGUE_TOL = 1e-10


@dataclass(frozen=True)
class LebesguePointReport:
    side: str
    value: float
    windows: tuple
    converged: bool


@dataclass(frozen=True)
class PushnitskiReport:
    lambda_grid: np.ndarray
    averaged: np.ndarray
    predicted: np.ndarray
    residuals: np.ndarray
    window_halfwidths: np.ndarray


@dataclass(frozen=True)
class LaplaceReport:
    t_grid: np.ndarray
    discrete: np.ndarray
    continuum: np.ndarray
    residuals: np.ndarray


def pushnitski_abel(xi_small: StepFunction, lam: float) -> float:
    """Abel average (1/pi) int_{-sqrt(lam)}^{sqrt(lam)} xi(nu) (lam - nu^2)^{-1/2} dnu.

    Substituting nu = sqrt(lam) sin(phi) turns the weight into arcsine
    increments, which telescope exactly for a step function.  A plateau of
    height c covering [-sqrt(lam), sqrt(lam)] contributes exactly c.
    """
    if not lam > 0:
        raise ParameterError(f"Abel parameter must be positive, got {lam}")
    r = float(np.sqrt(lam))

    def anti(x: float) -> float:
        return float(np.arcsin(np.clip(x / r, -1.0, 1.0)))

    return xi_small.integrate_against(anti, -r, r) / np.pi


def eigenvalue_resolution(pair: SuspensionPair, lam: float) -> float:
    """Local eigenvalue spacing of the discretised suspension at energy lam.

    The time-axis branch of either operator contributes one eigenvalue per
    half-wavelength on [-T, T]; near energy lam that gives a spacing of
    pi sqrt(lam) / T per internal channel.  Realised gaps are unreliable in
    spectral gaps, so the density-of-states formula is used directly.
    """
    if not lam > 0:
        raise ParameterError(f"energy must be positive, got {lam}")
    return float(np.pi * np.sqrt(lam) / pair.grid.half_width)


def default_lambda_window(pair: SuspensionPair):
    """Reliable energy window [pi^2/T^2, (pi/h)^2/4] of the discretisation.

    Below the lower edge the truncated time axis cannot resolve the spectrum;
    above the upper edge the stencil's dispersion error dominates.
    """
    T = pair.grid.half_width
    h = pair.grid.step
    return (np.pi / T) ** 2, (np.pi / h) ** 2 / 4.0


def pushnitski_verify(
    pair: SuspensionPair,
    xi_small: StepFunction,
    lambda_grid,
    window_spacings: float = WINDOW_SPACINGS,
    lambda_window=None,
) -> PushnitskiReport:
    """Window-averaged discrete shift function against the Abel prediction.

    The discrete xi(.; H2, H1) is integer stepped, while the continuum one is
    defined almost everywhere, so the comparison averages the discrete
    function over ``window_spacings`` local eigenvalue spacings around each
    energy (clipped so the window stays inside (0, inf)).
    """
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    lo, hi = lambda_window if lambda_window is not None else default_lambda_window(pair)
    if np.any(lambda_grid < lo) or np.any(lambda_grid > hi):
        raise ParameterError(
            f"lambda grid leaves the reliable window [{lo:.4g}, {hi:.4g}] of "
            f"this discretisation"
        )
    xi_big = ssf_nonneg_pair(
        pair.h2, pair.h1, reject_tol=max(1e-6, 2.0 * pair.psd_defect)
    )
    averaged = np.empty(lambda_grid.size)
    predicted = np.empty(lambda_grid.size)
    halfwidths = np.empty(lambda_grid.size)
    for i, lam in enumerate(lambda_grid):
        hw = min(0.5 * window_spacings * eigenvalue_resolution(pair, lam), lam)
        averaged[i] = xi_big.integral(lam - hw, lam + hw) / (2.0 * hw)
        predicted[i] = pushnitski_abel(xi_small, lam)
        halfwidths[i] = hw
    return PushnitskiReport(
        lambda_grid=lambda_grid,
        averaged=averaged,
        predicted=predicted,
        residuals=np.abs(averaged - predicted),
        window_halfwidths=halfwidths,
    )


def t_k_apply(f: StepFunction, k: int, lam: float) -> float:
    """Resolvent-smoothing average k lam^k int_0^inf (nu + lam)^{-k-1} f(nu) dnu.

    Evaluated exactly through the antiderivative -(nu + lam)^{-k} / k per
    plateau.  With this sign choice constants are fixed points and the value
    converges to the right-hand limit f(0+) as lam decreases to zero.
    """
    if not lam > 0:
        raise ParameterError(f"smoothing parameter must be positive, got {lam}")
    if k < 1 or int(k) != k:
        raise ParameterError(f"order must be a positive integer, got {k}")
    k = int(k)

    def anti(nu: float) -> float:
        return -((nu + lam) ** (-k)) / k

    return float(k * lam**k * f.integrate_against(anti, 0.0, np.inf))


def laplace_consistency(
    pair: SuspensionPair, xi_small: StepFunction, t_grid, t_window=(0.25, 8.0)
) -> LaplaceReport:
    """Laplace-transform identity between the heat gap and the endpoint SSF.

    Compares -heat_trace_gap(t)/t (the Laplace transform of the suspension
    shift function) with (pi t)^{-1/2} int xi(s) e^{-t s^2} ds, the latter in
    closed form through error-function increments.  Times must stay in the
    discretisation's validity window.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    lo, hi = t_window
    if np.any(t_grid < lo) or np.any(t_grid > hi):
        raise ParameterError(
            f"Laplace times must lie in the validity window [{lo}, {hi}] of "
            f"the discretisation (configurable)"
        )
    discrete = np.empty(t_grid.size)
    continuum = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        discrete[i] = -heat_trace_gap(pair, t) / t

        def anti(x: float, t=t) -> float:
            return float(_erf(np.sqrt(t) * x)) / (2.0 * t)

        continuum[i] = xi_small.integrate_against(anti, -np.inf, np.inf)
    return LaplaceReport(
        t_grid=t_grid,
        discrete=discrete,
        continuum=continuum,
        residuals=np.abs(discrete - continuum),
    )


def lebesgue_point(
    f: StepFunction,
    x: float,
    side: str,
    h0: float = 0.5,
    shrink: float = 0.5,
    max_windows: int = 48,
    tol: float = LEBESGUE_TOL,
) -> LebesguePointReport:
    """One-sided window averages over a geometrically shrinking sweep.

    Converged when the last three window averages agree pairwise within
    ``tol``; the reported value is the final average.  For step functions the
    averages stabilise exactly once the window clears the nearest breakpoint.
    """
    if side not in ("left", "right"):
        raise ParameterError(f"side must be 'left' or 'right', got {side!r}")
    windows = []
    h = float(h0)
    for _ in range(max_windows):
        if side == "right":
            avg = f.integral(x, x + h) / h
        else:
            avg = f.integral(x - h, x) / h
        windows.append((h, avg))
        if len(windows) >= 3:
            tail = [w[1] for w in windows[-3:]]
            if max(tail) - min(tail) <= tol:
                return LebesguePointReport(side, float(tail[-1]), tuple(windows), True)
        h *= shrink
    return LebesguePointReport(side, float(windows[-1][1]), tuple(windows), False)
