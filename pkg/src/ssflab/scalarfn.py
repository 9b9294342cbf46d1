"""Scalar test functions with analytic derivatives.

The trace-formula checks all integrate derivatives of smooth functions
against spectral data, so each catalogue entry carries its derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy.special import erf as _erf


@dataclass(frozen=True)
class ScalarFunction:
    fn: object
    deriv: object
    label: str

    def __call__(self, x):
        return self.fn(x)

    def d(self, x):
        return self.deriv(x)


def identity() -> ScalarFunction:
    return ScalarFunction(lambda x: np.asarray(x, dtype=float),
                          lambda x: np.ones_like(np.asarray(x, dtype=float)),
                          "x")


def constant(c: float) -> ScalarFunction:
    return ScalarFunction(lambda x, c=c: np.full_like(np.asarray(x, dtype=float), c),
                          lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                          f"{c}")


def polynomial(coeffs) -> ScalarFunction:
    p = Polynomial(coeffs)
    dp = p.deriv()
    return ScalarFunction(p, dp, f"poly{tuple(np.round(coeffs, 6))}")


def exponential(rate: float = 1.0) -> ScalarFunction:
    return ScalarFunction(lambda x, r=rate: np.exp(r * np.asarray(x, dtype=float)),
                          lambda x, r=rate: r * np.exp(r * np.asarray(x, dtype=float)),
                          f"exp({rate}x)")


def gaussian(t: float) -> ScalarFunction:
    """x -> exp(-t x^2)."""
    return ScalarFunction(
        lambda x, t=t: np.exp(-t * np.asarray(x, dtype=float) ** 2),
        lambda x, t=t: -2.0 * t * np.asarray(x, dtype=float) * np.exp(-t * np.asarray(x, dtype=float) ** 2),
        f"exp(-{t}x^2)",
    )


def erf_scaled(t: float) -> ScalarFunction:
    """x -> erf(sqrt(t) x), derivative 2 sqrt(t/pi) exp(-t x^2)."""
    rt = np.sqrt(t)
    c = 2.0 * np.sqrt(t / np.pi)
    return ScalarFunction(
        lambda x, rt=rt: _erf(rt * np.asarray(x, dtype=float)),
        lambda x, t=t, c=c: c * np.exp(-t * np.asarray(x, dtype=float) ** 2),
        f"erf(sqrt({t})x)",
    )


def krein_catalog(t_values=(0.5, 1.0, 2.0)):
    """The function families exercised by the trace-formula checks."""
    fns = [identity(), polynomial([0.0, 1.0, 0.5]), polynomial([1.0, -2.0, 0.0, 1.0, 0.25])]
    for t in t_values:
        fns.append(gaussian(t))
        fns.append(erf_scaled(t))
    return fns
