"""Dense Hermitian linear algebra.

Eigendecompositions, matrix functions, Schatten norms, traces and resolvent
powers for moderate dense Hermitian matrices.  A single cached
eigendecomposition per operator backs every matrix function; heat kernels,
error functions and resolvents all reuse it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ContractError,
    DomainError,
    EigensolverError,
    ParameterError,
    SingularityError,
)

HERMITICITY_TOL = 1e-8


class HermitianOperator:
    """A dense Hermitian matrix with a write-once eigendecomposition cache.

    Construction symmetrises the input via ``(M + M^H) / 2`` and rejects
    matrices whose relative symmetrisation defect exceeds ``hermiticity_tol``.
    Real symmetric input is kept in float64; everything else is complex128.
    The cache is computed at most once and never mutated afterwards, so
    instances may be shared across threads after construction.
    """

    __slots__ = ("entries", "_eigenvalues", "_eigenvectors")

    def __init__(self, entries, hermiticity_tol: float = HERMITICITY_TOL):
        M = np.asarray(entries)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
            raise ContractError(f"expected a square matrix, got shape {M.shape}")
        if np.iscomplexobj(M):
            M = M.astype(np.complex128, copy=False)
        else:
            M = M.astype(np.float64, copy=False)
        defect = np.linalg.norm(M - M.conj().T)
        scale = 1.0 + np.linalg.norm(M)
        if defect > hermiticity_tol * scale:
            raise ContractError(
                f"matrix is not Hermitian: symmetrisation defect {defect:.3e} "
                f"exceeds {hermiticity_tol:.1e} * (1 + |M|_F)"
            )
        self.entries = (M + M.conj().T) / 2
        self.entries.setflags(write=False)
        self._eigenvalues = None
        self._eigenvectors = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eig()[0]

    @property
    def eigenvectors(self) -> np.ndarray:
        return self.eig()[1]

    def eig(self):
        if self._eigenvalues is None:
            try:
                w, U = np.linalg.eigh(self.entries)
            except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
                raise EigensolverError(
                    f"eigh failed to converge on a {self.dim}x{self.dim} "
                    f"matrix: {exc}"
                ) from exc
            w.setflags(write=False)
            U.setflags(write=False)
            self._eigenvalues = w
            self._eigenvectors = U
        return self._eigenvalues, self._eigenvectors

    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max())

    def __repr__(self):
        return f"HermitianOperator(dim={self.dim})"


@dataclass(frozen=True)
class SchattenReport:
    """Schatten p-norm of a matrix together with its singular values."""

    p: float
    value: float
    terms: np.ndarray | None = None


def diagonal(values) -> HermitianOperator:
    """Diagonal Hermitian operator from a real vector."""
    return HermitianOperator(np.diag(np.asarray(values, dtype=float)))


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator(np.eye(dim))


def eigh(op: HermitianOperator):
    """Ascending eigenvalues and a unitary of eigenvectors, cached on ``op``."""
    return op.eig()


def matrix_function(op: HermitianOperator, f) -> HermitianOperator:
    """Apply a real scalar function through the spectral theorem.

    Raises :class:`DomainError` naming the offending eigenvalue when ``f``
    is non-finite somewhere on the spectrum.
    """
    w, U = op.eig()
    fw = np.asarray(f(w), dtype=float)
    bad = ~np.isfinite(fw)
    if bad.any():
        lam = w[bad][0]
        raise DomainError(f"function is not finite at eigenvalue {lam!r}")
    out = (U * fw) @ U.conj().T
    return HermitianOperator((out + out.conj().T) / 2)


def schatten_norm(M, p: float) -> SchattenReport:
    """Schatten p-norm (l^p norm of the singular values), p >= 1."""
    if not p >= 1:
        raise ParameterError(f"Schatten order must satisfy p >= 1, got {p}")
    sv = np.linalg.svd(np.asarray(M), compute_uv=False)
    if np.isinf(p):
        value = float(sv.max()) if sv.size else 0.0
    else:
        value = float(np.sum(sv**p) ** (1.0 / p))
    return SchattenReport(p=float(p), value=value, terms=sv)


def trace(M) -> complex:
    """Sum of the diagonal entries."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"trace needs a square matrix, got shape {M.shape}")
    return complex(np.trace(M))


def resolvent_power(op: HermitianOperator, z: complex, k: int):
    """(M - z)^{-k} through the cached eigendecomposition.

    ``z`` must stay clear of the spectrum; a collision within
    ``1e-12 * max(1, spectral radius)`` raises :class:`SingularityError`.
    """
    if k < 1 or int(k) != k:
        raise ParameterError(f"resolvent power must be a positive integer, got {k}")
    w, U = op.eig()
    dist = np.abs(w - z)
    tol = 1e-12 * max(1.0, float(np.abs(w).max()))
    if dist.min() <= tol:
        lam = w[int(np.argmin(dist))]
        raise SingularityError(
            f"resolvent parameter z={z!r} is within {tol:.1e} of eigenvalue {lam!r}"
        )
    vals = (w - z) ** (-int(k))
    return (U * vals) @ U.conj().T


def trace_norm_difference(A: HermitianOperator, B: HermitianOperator) -> float:
    """Trace norm of A - B, a recurring diagnostic."""
    return schatten_norm(A.entries - B.entries, 1).value
