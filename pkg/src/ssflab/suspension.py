"""Discretised suspension operator d/dt + A(t) on a truncated time axis.

The pair of nonnegative operators associated with the suspension are

    H1 = -d^2/dt^2 + A(t)^2 - A'(t)      (from  D* D)
    H2 = -d^2/dt^2 + A(t)^2 + A'(t)      (from  D D*)

and the object of interest is the heat-trace gap tr(e^{-t H2} - e^{-t H1}).

A finite square matrix D forces M^H M and M M^H to be isospectral (they share
singular values), so any discretisation that builds H1 and H2 as exact
products of one matrix has a heat-trace gap that is identically zero.  The
two Schroedinger forms above are therefore discretised directly and
independently: a three-point Dirichlet Laplacian plus the block potentials
A(t_i)^2 -/+ A'(t_i).  The price is that positive semidefiniteness holds only
up to the O(h^2) consistency error of the scheme (the near-zero modes of H1
may dip slightly below zero), which the assembly gate accounts for.

The first-order matrix D itself (central differences, exactly antisymmetric,
plus block diagonal A(t_i)) is still assembled and stored: it is the discrete
suspension operator, and its adjoint is exactly -d/dt + A(t).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ParameterError
from .linalg import HermitianOperator
from .models import PerturbationPath

SATURATION_TOL = 1e-8
# Discrete near-zero modes of H1/H2 sit at -O(h^2); this gate only guards
# against gross assembly errors, not rounding at the 1e-10 level.
PSD_TOL = 1e-3

DEFAULT_HALF_WIDTH = 12.0
DEFAULT_POINTS = 801


@dataclass(frozen=True)
class TimeGrid:
    """Uniform symmetric grid on [-T, T] with an odd number of nodes."""

    half_width: float
    points: int

    def __post_init__(self):
        if not self.half_width > 0:
            raise ParameterError(f"half_width must be positive, got {self.half_width}")
        if self.points < 3 or self.points % 2 == 0:
            raise ParameterError(
                f"points must be odd and >= 3 so that t=0 is a node, got {self.points}"
            )

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / (self.points - 1)

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(-self.half_width, self.half_width, self.points)

    def refined(self) -> "TimeGrid":
        """Grid with halved step (N -> 2N - 1)."""
        return TimeGrid(self.half_width, 2 * self.points - 1)


def build_ddt(grid: TimeGrid) -> np.ndarray:
    """Central-difference first derivative with Dirichlet truncation.

    Exactly antisymmetric: values outside [-T, T] are treated as zero, so the
    boundary rows just lose one neighbour.
    """
    N = grid.points
    c = 1.0 / (2.0 * grid.step)
    M = np.zeros((N, N))
    idx = np.arange(N - 1)
    M[idx, idx + 1] = c
    M[idx + 1, idx] = -c
    return M


def build_laplacian(grid: TimeGrid) -> np.ndarray:
    """Three-point -d^2/dt^2 with Dirichlet boundary conditions."""
    N = grid.points
    h2 = grid.step**2
    L = np.zeros((N, N))
    idx = np.arange(N)
    L[idx, idx] = 2.0 / h2
    L[idx[:-1], idx[:-1] + 1] = -1.0 / h2
    L[idx[:-1] + 1, idx[:-1]] = -1.0 / h2
    return L


@dataclass(frozen=True)
class SuspensionPair:
    """Discretised (D, H1, H2) for a perturbation path on a time grid."""

    grid: TimeGrid
    path: PerturbationPath
    D: np.ndarray
    h1: HermitianOperator
    h2: HermitianOperator

    @property
    def dim(self) -> int:
        return self.D.shape[0]

    @property
    def psd_defect(self) -> float:
        """How far below zero the lowest eigenvalue of H1 or H2 dips."""
        low = min(float(self.h1.eigenvalues[0]), float(self.h2.eigenvalues[0]))
        return max(0.0, -low)


def assemble(
    grid: TimeGrid,
    path: PerturbationPath,
    saturation_tol: float = SATURATION_TOL,
    psd_tol: float = PSD_TOL,
) -> SuspensionPair:
    """Assemble D, H1 and H2 for the path on the grid.

    The profile must have saturated at the grid ends, otherwise the Dirichlet
    truncation would couple the two asymptotes.
    """
    theta_l = float(path.profile(-grid.half_width))
    theta_r = float(path.profile(grid.half_width))
    if abs(theta_l) > saturation_tol or abs(theta_r - 1.0) > saturation_tol:
        raise ConfigurationError(
            f"profile has not saturated on [-T, T]: theta(-T)={theta_l:.3e}, "
            f"1-theta(T)={1.0 - theta_r:.3e}; raise the grid half_width or "
            f"lower the profile scale"
        )

    k = path.dim
    N = grid.points
    nodes = grid.nodes
    theta = path.profile(nodes)
    theta_p = path.profile.deriv(nodes)

    am = path.a_minus.entries
    bp = path.b_plus.entries
    real_model = not (np.iscomplexobj(am) or np.iscomplexobj(bp))
    dtype = np.float64 if real_model else np.complex128

    ident = np.eye(k, dtype=dtype)
    D = np.kron(build_ddt(grid), ident).astype(dtype)
    H1 = np.kron(build_laplacian(grid), ident).astype(dtype)
    H2 = H1.copy()
    for i in range(N):
        A = (am + theta[i] * bp).astype(dtype)
        Ap = (theta_p[i] * bp).astype(dtype)
        Asq = A @ A
        blk = slice(i * k, (i + 1) * k)
        D[blk, blk] += A
        H1[blk, blk] += Asq - Ap
        H2[blk, blk] += Asq + Ap

    pair = SuspensionPair(
        grid=grid,
        path=path,
        D=D,
        h1=HermitianOperator(H1),
        h2=HermitianOperator(H2),
    )
    if pair.psd_defect > psd_tol:
        raise ConfigurationError(
            f"assembled H1/H2 are indefinite beyond the O(h^2) budget: lowest "
            f"eigenvalue {-pair.psd_defect:.3e} < -{psd_tol:.1e}; the grid is "
            f"too coarse for this model"
        )
    return pair


def refine(pair: SuspensionPair) -> SuspensionPair:
    """Reassemble the pair on the step-halved grid."""
    return assemble(pair.grid.refined(), pair.path)


def heat_trace_gap(pair: SuspensionPair, t: float) -> float:
    """tr(e^{-t H2}) - tr(e^{-t H1}) from the cached eigendecompositions."""
    if not t > 0:
        raise ParameterError(f"heat time must be positive, got {t}")
    w1 = pair.h1.eigenvalues
    w2 = pair.h2.eigenvalues
    return float(np.sum(np.exp(-t * w2)) - np.sum(np.exp(-t * w1)))


def resolvent_trace_gap(pair: SuspensionPair, z: float, k: int = 1) -> float:
    """tr((H2 - z)^{-k} - (H1 - z)^{-k}) for z < 0."""
    if not z < 0:
        raise ParameterError(
            f"resolvent parameter must be negative (the spectra fill [0, inf)), got {z}"
        )
    if k < 1 or int(k) != k:
        raise ParameterError(f"resolvent power must be a positive integer, got {k}")
    w1 = pair.h1.eigenvalues
    w2 = pair.h2.eigenvalues
    return float(np.sum((w2 - z) ** (-int(k))) - np.sum((w1 - z) ** (-int(k))))
