"""Dirac operators on a periodic box with Clifford generator construction.

The operator gamma . grad + m gamma_0 is assembled in the Fourier basis of a
d-dimensional periodic box, where its symbol is exact: each momentum kappa on
the dual lattice carries the block sum_a kappa_a gamma_a + m gamma_0 with
eigenvalues +-sqrt(|kappa|^2 + m^2).  Matrix potentials act by multiplication
on the spatial grid and are conjugated into the Fourier basis by the unitary
discrete Fourier transform.

The perturbation-theory hypotheses behind the trace formulas are not
absolute statements at matrix scale (every finite matrix is trace class);
what is falsifiable is stability under grid refinement, so the diagnostics
report Schatten profiles and repeated-commutator norms at two resolutions
and their ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ContractError, ParameterError
from .linalg import HermitianOperator, resolvent_power, schatten_norm

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

MAX_DIMENSION = 8
STABLE_RATIO = (0.8, 1.25)


@dataclass(frozen=True)
class CliffordSet:
    """Anticommuting Hermitian involutions gamma_0 ... gamma_d.

    Entries are exactly 0, +-1 or +-i, so the algebra relations hold in
    exact arithmetic.
    """

    d: int
    size: int
    gammas: tuple

    @property
    def gamma0(self) -> np.ndarray:
        return self.gammas[0]

    def spatial(self):
        """gamma_1 ... gamma_d, the generators contracted with momentum."""
        return self.gammas[1:]


def clifford(d: int) -> CliffordSet:
    """Recursive tensor construction of d + 1 generators of size 2^ceil(d/2).

    Base cases use the three Pauli matrices; each step d -> d + 2 tensors the
    existing set with sigma_x and appends sigma_y (x) 1 and sigma_z (x) 1.
    """
    if d < 1 or d > MAX_DIMENSION or int(d) != d:
        raise ParameterError(
            f"spatial dimension must be an integer in [1, {MAX_DIMENSION}], got {d}"
        )
    d = int(d)
    if d % 2 == 1:
        gammas = [SIGMA_Z, SIGMA_X]
        current = 1
    else:
        gammas = [SIGMA_Z, SIGMA_X, SIGMA_Y]
        current = 2
    while current < d:
        eye = np.eye(gammas[0].shape[0], dtype=complex)
        gammas = [np.kron(SIGMA_X, g) for g in gammas]
        gammas.append(np.kron(SIGMA_Y, eye))
        gammas.append(np.kron(SIGMA_Z, eye))
        current += 2
    size = gammas[0].shape[0]
    return CliffordSet(d=d, size=size, gammas=tuple(g.copy() for g in gammas))


def momentum_lattice(d: int, box: float, modes: int) -> np.ndarray:
    """Dual lattice (2 pi / L) {-(M-1)/2 ... (M-1)/2}^d in C order."""
    half = (modes - 1) // 2
    axis = 2.0 * np.pi / box * np.arange(-half, half + 1)
    return np.array(list(product(axis, repeat=d)))


def spatial_grid(d: int, box: float, modes: int) -> np.ndarray:
    """Centered spatial grid with spacing L / M, matching the Fourier matrix."""
    axis = (np.arange(modes) - (modes - 1) / 2.0) * (box / modes)
    return np.array(list(product(axis, repeat=d)))


def fourier_matrix(d: int, box: float, modes: int) -> np.ndarray:
    """Unitary map from spatial samples to the momentum lattice."""
    kappa = momentum_lattice(d, box, modes)
    x = spatial_grid(d, box, modes)
    phase = kappa @ x.T
    return np.exp(-1j * phase) / np.sqrt(float(modes**d))


@dataclass(frozen=True)
class DiracModel:
    """Assembled Dirac operator, optionally with a potential, in Fourier basis."""

    d: int
    m: float
    box: float
    modes: int
    clifford_set: CliffordSet
    momenta: np.ndarray
    D: HermitianOperator
    V: HermitianOperator | None
    potential_fn: object | None

    @property
    def spinor_dim(self) -> int:
        return self.clifford_set.size

    @property
    def dim(self) -> int:
        return self.D.dim

    def full_operator(self) -> HermitianOperator:
        if self.V is None:
            return self.D
        return HermitianOperator(self.D.entries + self.V.entries)

    def symbol_spectrum(self) -> np.ndarray:
        """Closed-form free spectrum: +-sqrt(|kappa|^2 + m^2) per momentum,
        each sign with half the spinor multiplicity."""
        energies = np.sqrt(np.sum(self.momenta**2, axis=1) + self.m**2)
        half = self.spinor_dim // 2
        spect = np.concatenate([np.repeat(energies, half), np.repeat(-energies, half)])
        return np.sort(spect)


def build_dirac(
    d: int,
    m: float,
    box: float,
    modes: int,
    potential=None,
    hermiticity_tol: float = 1e-8,
) -> DiracModel:
    """Assemble the Dirac operator with exact Fourier symbols.

    ``potential`` is a callable mapping a point of R^d to either a scalar or
    a Hermitian spinor_dim x spinor_dim matrix; it is sampled on the M^d
    spatial grid and conjugated into the Fourier basis.
    """
    if m < 0:
        raise ParameterError(f"mass must be nonnegative, got {m}")
    if not box > 0:
        raise ParameterError(f"box length must be positive, got {box}")
    if modes < 3 or modes % 2 == 0:
        raise ParameterError(f"modes per axis must be odd and >= 3, got {modes}")
    cl = clifford(d)
    n = cl.size
    kappa = momentum_lattice(d, box, modes)
    n_sites = kappa.shape[0]

    free = np.zeros((n_sites * n, n_sites * n), dtype=complex)
    spatial_gammas = cl.spatial()
    for i, k in enumerate(kappa):
        block = m * cl.gamma0.astype(complex)
        for a in range(d):
            block = block + k[a] * spatial_gammas[a]
        free[i * n : (i + 1) * n, i * n : (i + 1) * n] = block

    V_op = None
    if potential is not None:
        x_grid = spatial_grid(d, box, modes)
        blocks = np.zeros((n_sites * n, n_sites * n), dtype=complex)
        for j, x in enumerate(x_grid):
            val = potential(x)
            val = np.asarray(val, dtype=complex)
            if val.ndim == 0:
                val = val * np.eye(n, dtype=complex)
            if val.shape != (n, n):
                raise ContractError(
                    f"potential must return a scalar or a {n}x{n} matrix, got shape {val.shape}"
                )
            defect = np.linalg.norm(val - val.conj().T)
            if defect > hermiticity_tol * (1.0 + np.linalg.norm(val)):
                raise ContractError(
                    f"potential sample at x={x} is not a Hermitian matrix "
                    f"(defect {defect:.3e})"
                )
            blocks[j * n : (j + 1) * n, j * n : (j + 1) * n] = (val + val.conj().T) / 2
        F = np.kron(fourier_matrix(d, box, modes), np.eye(n, dtype=complex))
        V_op = HermitianOperator(F @ blocks @ F.conj().T)

    return DiracModel(
        d=int(d),
        m=float(m),
        box=float(box),
        modes=int(modes),
        clifford_set=cl,
        momenta=kappa,
        D=HermitianOperator(free),
        V=V_op,
        potential_fn=potential,
    )


def refine_model(model: DiracModel) -> DiracModel:
    """Rebuild with 2M + 1 modes per axis (same box, same potential)."""
    return build_dirac(
        model.d, model.m, model.box, 2 * model.modes + 1, potential=model.potential_fn
    )


def l1l2_norm(f, d: int, radius: int = 6, quad_order: int = 8, tail_bound=None):
    """Sum over unit lattice cubes of the per-cube L2 norm of f.

    Each cube integral uses tensor Gauss-Legendre of the given order.  A tail
    bound for the uncovered cubes must either be supplied or be justified by
    decay: the outermost shell contribution is required to be negligible
    against the total, and is reported as the tail estimate.
    """
    if radius < 1:
        raise ParameterError(f"cube radius must be >= 1, got {radius}")
    xs, ws = leggauss(int(quad_order))
    xs = 0.5 * xs  # nodes on (-1/2, 1/2)
    ws = 0.5 * ws
    node_pts = np.array(list(product(*(list(xs) for _ in range(d)))))
    node_wts = np.prod(np.array(list(product(*(list(ws) for _ in range(d))))), axis=1)

    total = 0.0
    shell_total = 0.0
    for n_idx in product(range(-radius, radius + 1), repeat=d):
        center = np.asarray(n_idx, dtype=float)
        pts = node_pts + center
        samples = np.array([abs(f(p if d > 1 else p[0])) ** 2 for p in pts])
        cube_l2 = float(np.sqrt(np.sum(node_wts * samples)))
        total += cube_l2
        if max(abs(i) for i in n_idx) == radius:
            shell_total += cube_l2

    if tail_bound is not None:
        tail = float(tail_bound)
    else:
        if shell_total > 1e-8 * max(total, 1.0):
            raise ContractError(
                "no tail bound was supplied and the outermost cube shell does "
                f"not decay (shell contribution {shell_total:.3e}); enlarge "
                "the radius or provide a bound"
            )
        tail = shell_total
    return total, tail


@dataclass(frozen=True)
class DiracDiagnostics:
    """Two-resolution stability report for the perturbation hypotheses."""

    p: int
    modes_coarse: int
    modes_fine: int
    schatten_orders: tuple
    schatten_coarse: np.ndarray
    schatten_fine: np.ndarray
    schatten_ratio: np.ndarray
    commutator_orders: tuple
    commutator_coarse: np.ndarray
    commutator_fine: np.ndarray
    commutator_ratio: np.ndarray

    def schatten_stable(self, bounds=STABLE_RATIO) -> bool:
        lo, hi = bounds
        return bool(np.all((self.schatten_ratio >= lo) & (self.schatten_ratio <= hi)))

    def commutator_stable(self, bounds=STABLE_RATIO) -> bool:
        lo, hi = bounds
        return bool(np.all((self.commutator_ratio >= lo) & (self.commutator_ratio <= hi)))


def _schatten_profile(model: DiracModel, p: int) -> np.ndarray:
    out = np.empty(p + 1)
    for j in range(1, p + 2):
        res = resolvent_power(model.D, -1j, j)
        out[j - 1] = schatten_norm(model.V.entries @ res, (p + 1) / j).value
    return out


def _commutator_norms(model: DiracModel, p: int) -> np.ndarray:
    """Operator norms of (1 + D^2)^{-k/2} [D^2, V]^(k) for k = 1 .. 2p.

    D^2 is scalar per momentum block, so the repeated commutator is an
    entrywise multiplier (d2_a - d2_b)^k on the potential's Fourier matrix.
    """
    n = model.spinor_dim
    d2 = np.repeat(np.sum(model.momenta**2, axis=1) + model.m**2, n)
    gapmat = d2[:, None] - d2[None, :]
    soften = (1.0 + d2) ** (-0.5)
    out = np.empty(2 * p)
    comm = model.V.entries.copy()
    for k in range(1, 2 * p + 1):
        comm = gapmat * comm
        weighted = (soften**k)[:, None] * comm
        out[k - 1] = float(np.linalg.norm(weighted, 2))
    return out


def hypothesis_diagnostics(model: DiracModel, p: int) -> DiracDiagnostics:
    """Schatten profile and repeated-commutator norms at two resolutions.

    Stability of the ratios under refinement is the matrix-scale evidence for
    the relative-trace-class and smoothness hypotheses; growth flags failure.
    """
    if model.V is None:
        raise ContractError("hypothesis diagnostics need a model with a potential")
    if p < 1 or int(p) != p:
        raise ParameterError(f"relative order p must be a positive integer, got {p}")
    p = int(p)
    fine = refine_model(model)

    sc = _schatten_profile(model, p)
    sf = _schatten_profile(fine, p)
    cc = _commutator_norms(model, p)
    cf = _commutator_norms(fine, p)

    def ratio(fine_vals, coarse_vals):
        safe = np.where(coarse_vals > 1e-14, coarse_vals, 1.0)
        return np.where(coarse_vals > 1e-14, fine_vals / safe, 1.0)

    return DiracDiagnostics(
        p=p,
        modes_coarse=model.modes,
        modes_fine=fine.modes,
        schatten_orders=tuple(range(1, p + 2)),
        schatten_coarse=sc,
        schatten_fine=sf,
        schatten_ratio=ratio(sf, sc),
        commutator_orders=tuple(range(1, 2 * p + 1)),
        commutator_coarse=cc,
        commutator_fine=cf,
        commutator_ratio=ratio(cf, cc),
    )


def gaussian_potential(cl: CliffordSet, amplitude: float = 1.0, width: float = 1.0):
    """Smooth scalar potential amplitude * exp(-|x|^2 / width^2) on the identity."""

    def pot(x):
        r2 = float(np.sum(np.square(np.atleast_1d(x))))
        return amplitude * np.exp(-r2 / width**2) * np.eye(cl.size, dtype=complex)

    return pot


def sharp_box_potential(cl: CliffordSet, amplitude: float = 1.0, half_side: float = 1.0):
    """Indicator-type potential, the negative control: not twice differentiable."""

    def pot(x):
        inside = bool(np.all(np.abs(np.atleast_1d(x)) <= half_side))
        return (amplitude if inside else 0.0) * np.eye(cl.size, dtype=complex)

    return pot


def magnetic_potential(cl: CliffordSet, amplitude: float = 1.0, width: float = 1.0):
    """Gamma-weighted vector potential sum_j gamma_j a_j(x) with Gaussian decay.

    Shipped as a d=3 fixture; Hermitian because each component is real.
    """
    if cl.d != 3:
        raise ParameterError("the magnetic fixture is defined for d = 3")
    spatial = cl.spatial()

    def pot(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        damp = amplitude * np.exp(-float(np.sum(x**2)) / width**2)
        out = np.zeros((cl.size, cl.size), dtype=complex)
        for j in range(3):
            out = out + damp * x[j] * spatial[j]
        return out

    return pot


POTENTIALS = {
    "gaussian": gaussian_potential,
    "sharp-box": sharp_box_potential,
    "magnetic": magnetic_potential,
    "none": None,
}


def make_potential(name: str, cl: CliffordSet, **params):
    if name not in POTENTIALS:
        raise ParameterError(f"unknown potential {name!r}; choose from {sorted(POTENTIALS)}")
    factory = POTENTIALS[name]
    return None if factory is None else factory(cl, **params)
