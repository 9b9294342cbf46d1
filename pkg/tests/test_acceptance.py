"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every criterion prints a pass/fail line in the terminal summary and carries
its runtime budget as an assertion.  Expected values come from closed forms
or from the independent oracles in ``oracles.py``, never from the code paths
under test.
"""

import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import erf_oracle

from ssflab import dirac as dirac_mod
from ssflab import models, ptf, ssf, suspension, transforms, witten
from ssflab.fixtures import fixture_path, random_hermitian
from ssflab.linalg import HermitianOperator, matrix_function, schatten_norm
from ssflab.models import PerturbationPath, make_profile
from ssflab.scalarfn import erf_scaled, exponential, gaussian, polynomial
from ssflab.ssf import StepFunction


class _Criterion:
    def __init__(self, number: int, label: str, budget_s: float):
        self.number = number
        self.label = label
        self.budget = budget_s
        self.t0 = time.perf_counter()

    def finish(self, failed: list):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if not failed else "FAIL"
        detail = "" if not failed else f" [{'; '.join(failed)}]"
        ACCEPTANCE_LINES.append(
            f"[{status}] criterion {self.number:2d}: {self.label} "
            f"({elapsed:.1f}s / {self.budget:.0f}s){detail}"
        )
        assert not failed, f"criterion {self.number}: {failed}"
        assert elapsed <= self.budget, (
            f"criterion {self.number} exceeded its runtime budget: "
            f"{elapsed:.1f}s > {self.budget}s"
        )


def test_criterion_01_principal_trace_formula():
    crit = _Criterion(1, "principal trace formula on the scalar crossing", 30.0)
    failed = []
    path = fixture_path("FIX-SCALAR")
    coarse = suspension.assemble(suspension.TimeGrid(12.0, 801), path)
    rep = ptf.verify(coarse, [0.5, 1.0, 2.0], refine=True)
    for t, gap in zip(rep.t_values, rep.lhs):
        target = -erf_oracle(np.sqrt(t))
        if abs(gap - target) > 5e-3:
            failed.append(f"t={t}: |{gap:.6f} - ({target:.6f})| > 5e-3")
    for t, ratio in zip(rep.t_values, rep.refined["improvement"]):
        if ratio < 1.5:
            failed.append(f"t={t}: refinement gain {ratio:.2f} < 1.5")
    crit.finish(failed)


def test_criterion_02_daletskii_krein_erf_identity():
    crit = _Criterion(2, "quadrature and erf forms of the right-hand side", 5.0)
    failed = []
    rng = np.random.default_rng(2024)
    checked = 0
    while checked < 20:
        n = int(rng.integers(1, 9))
        path = PerturbationPath(
            random_hermitian(rng, n),
            random_hermitian(rng, n, 0.7),
            make_profile("tanh"),
        )
        for t in (0.5, 1.0, 2.0):
            gap = abs(ptf.rhs_erf(path, t) - ptf.rhs_quadrature(path, t))
            if gap > 1e-8:
                failed.append(f"model {checked} t={t}: {gap:.2e} > 1e-8")
        checked += 1
    crit.finish(failed)


def test_criterion_03_krein_trace_formula():
    crit = _Criterion(3, "Krein trace formula residuals", 2.0)
    failed = []
    rng = np.random.default_rng(303)
    fns = [
        polynomial([0.0, 1.0]),
        polynomial([1.0, 0.5, -1.0]),
        polynomial([0.0, 0.0, 0.0, 1.0]),
        polynomial([1.0, -2.0, 0.0, 0.5, 0.125]),
        gaussian(0.5),
        gaussian(1.0),
        gaussian(2.0),
        erf_scaled(0.5),
        erf_scaled(1.0),
        erf_scaled(2.0),
    ]
    for i in range(20):
        n = int(rng.integers(2, 9))
        am = random_hermitian(rng, n)
        ap = HermitianOperator(am.entries + random_hermitian(rng, n, 0.6).entries)
        _, _, res = ssf.krein_check(ap, am, fns[i % len(fns)])
        if res > 1e-10:
            failed.append(f"combination {i}: residual {res:.2e} > 1e-10")
    crit.finish(failed)


def test_criterion_04_pushnitski_formula(scalar_pair):
    crit = _Criterion(4, "Abel-transform relation for the scalar crossing", 60.0)
    failed = []
    xi_small = StepFunction(np.array([-1.0, 1.0]), np.array([1.0]))
    for lam in (0.25, 0.5, 0.9, 1.0):
        got = transforms.pushnitski_abel(xi_small, lam)
        if abs(got - 1.0) > 1e-12:
            failed.append(f"closed form at {lam}: {got!r} != 1")
    got = transforms.pushnitski_abel(xi_small, 4.0)
    if abs(got - 1.0 / 3.0) > 1e-12:
        failed.append(f"closed form at 4: {got!r} != 1/3")
    rep = transforms.pushnitski_verify(scalar_pair, xi_small, [0.25, 0.5, 4.0])
    for lam, res in zip(rep.lambda_grid, rep.residuals):
        if res > 0.1:
            failed.append(f"windowed xi at {lam}: residual {res:.3f} > 0.1")
    crit.finish(failed)


def test_criterion_05_witten_index_chain(scalar_pair, diag2_pair, halfcross_pair):
    crit = _Criterion(5, "Witten index equality chain", 90.0)
    failed = []

    rep = witten.index_report(scalar_pair.path, pair=scalar_pair)
    for name, value in rep.chain_values():
        if abs(value - 1.0) > 2e-2:
            failed.append(f"scalar {name}={value:.4f} not within 2e-2 of 1")
    if rep.spectral_flow != 1 or rep.fredholm_index != 1:
        failed.append("scalar integer quantities not exactly 1")

    rep2 = witten.index_report(diag2_pair.path, pair=diag2_pair)
    for name, value in rep2.chain_values():
        if abs(value - 2.0) > 2e-2:
            failed.append(f"diag2 {name}={value:.4f} not within 2e-2 of 2")
    if rep2.spectral_flow != 2 or rep2.fredholm_index != 2:
        failed.append("diag2 integer quantities not exactly 2")

    rep3 = witten.index_report(halfcross_pair.path, pair=halfcross_pair)
    if abs(rep3.w_s.value - 0.5) > 5e-2:
        failed.append(f"half-crossing w_s={rep3.w_s.value:.4f} not within 5e-2 of 1/2")
    if rep3.fredholm_index is not None:
        failed.append("half-crossing Fredholm index should be absent")
    crit.finish(failed)


def test_criterion_06_resolvent_smoothing_limit():
    crit = _Criterion(6, "resolvent smoothing recovers the right edge value", 1.0)
    failed = []
    plateau = StepFunction(np.array([0.0, 1.0]), np.array([1.0]))
    errs = [abs(transforms.t_k_apply(plateau, 1, lam) - 1.0) for lam in (0.1, 0.01, 0.001)]
    if not (5.0 <= errs[0] / errs[1] <= 20.0 and 5.0 <= errs[1] / errs[2] <= 20.0):
        failed.append(f"rate not O(lambda): errors {errs}")
    const = StepFunction(np.array([]), np.array([]), left_tail=2.5, right_tail=2.5)
    for k in (1, 2, 3):
        for lam in (0.01, 1.0, 10.0):
            if abs(transforms.t_k_apply(const, k, lam) - 2.5) > 1e-14:
                failed.append(f"constant not fixed at k={k}, lam={lam}")
    crit.finish(failed)


def test_criterion_07_taylor_expansion_exactness():
    crit = _Criterion(7, "resolvent Taylor expansion closes exactly", 1.0)
    failed = []
    rng = np.random.default_rng(707)
    a0 = random_hermitian(rng, 6)
    b = random_hermitian(rng, 6, 0.7)
    z = 2j
    n = 6
    scale = 1 + np.linalg.norm(a0.entries) + np.linalg.norm(b.entries)
    for j in range(1, 5):
        terms, remainder = models.taylor_expansion(a0, b, z, j)
        direct = np.linalg.matrix_power(
            np.linalg.inv(a0.entries + b.entries - z * np.eye(n)), j
        ) - np.linalg.matrix_power(np.linalg.inv(a0.entries - z * np.eye(n)), j)
        res = np.linalg.norm(sum(terms) + remainder - direct)
        if res > 1e-10 * scale:
            failed.append(f"j={j}: residual {res:.2e}")
    crit.finish(failed)


def test_criterion_08_cutoff_scheme():
    crit = _Criterion(8, "cutoff sweeps close at full level", 10.0)
    failed = []
    rng = np.random.default_rng(808)
    for i in range(10):
        n = int(rng.integers(4, 9))
        a0 = random_hermitian(rng, n)
        b = random_hermitian(rng, n, 0.6)
        levels = models.cutoff_levels(a0)
        z, j = 1j, 2
        full = np.linalg.matrix_power(
            np.linalg.inv(a0.entries + b.entries - z * np.eye(n)), j
        ) - np.linalg.matrix_power(np.linalg.inv(a0.entries - z * np.eye(n)), j)
        trace_gaps = []
        for lvl in levels:
            bn = models.reduce(b, models.cutoff(a0, float(lvl)))
            red = np.linalg.matrix_power(
                np.linalg.inv(a0.entries + bn.entries - z * np.eye(n)), j
            ) - np.linalg.matrix_power(np.linalg.inv(a0.entries - z * np.eye(n)), j)
            trace_gaps.append(schatten_norm(red - full, 1).value)
        if trace_gaps[-1] > 1e-12:
            failed.append(f"model {i}: final trace-norm gap {trace_gaps[-1]:.2e}")
        if len(trace_gaps) >= 2 and trace_gaps[-1] > trace_gaps[-2] + 1e-15:
            failed.append(f"model {i}: trace-norm gap increased at the end")
        _, _, ssf_gaps = ssf.ssf_cutoff_limit(a0, b, levels)
        if ssf_gaps[-1] > 1e-12:
            failed.append(f"model {i}: final SSF gap {ssf_gaps[-1]:.2e}")
        if len(ssf_gaps) >= 2 and ssf_gaps[-1] > ssf_gaps[-2] + 1e-15:
            failed.append(f"model {i}: SSF gap increased at the end")
    crit.finish(failed)


def test_criterion_09_doi_perturbation_formula():
    crit = _Criterion(9, "double-operator-integral perturbation formula", 2.0)
    failed = []
    from ssflab.doi import doi_apply

    rng = np.random.default_rng(909)
    families = [
        polynomial([0.5, 1.0, -0.5, 0.25]),
        exponential(0.8),
        gaussian(1.0),
        erf_scaled(1.0),
    ]
    for f in families:
        a = random_hermitian(rng, 8)
        b = random_hermitian(rng, 8)
        lhs = matrix_function(a, f.fn).entries - matrix_function(b, f.fn).entries
        rhs = doi_apply(a, b, f, a.entries - b.entries)
        res = np.linalg.norm(lhs - rhs)
        if res > 1e-10 * (1 + np.linalg.norm(lhs)):
            failed.append(f"{f.label}: residual {res:.2e}")
    crit.finish(failed)


def test_criterion_10_dirac_example():
    crit = _Criterion(10, "Dirac assembly, symbols and hypothesis diagnostics", 60.0)
    failed = []
    eyecheck = 0.0
    for d in range(1, 7):
        cl = dirac_mod.clifford(d)
        eye = np.eye(cl.size)
        for i, g in enumerate(cl.gammas):
            eyecheck = max(eyecheck, float(np.abs(g @ g - eye).max()))
            for h in cl.gammas[i + 1 :]:
                eyecheck = max(eyecheck, float(np.abs(g @ h + h @ g).max()))
    if eyecheck != 0.0:
        failed.append(f"Clifford relations defect {eyecheck:.2e}")

    for d, modes in ((1, 33), (2, 9), (3, 5)):
        model = dirac_mod.build_dirac(d, 0.5, 15.0, modes)
        err = float(np.max(np.abs(model.D.eigenvalues - model.symbol_spectrum())))
        if err > 1e-10:
            failed.append(f"(d={d}, M={modes}): spectrum error {err:.2e}")

    cl1 = dirac_mod.clifford(1)
    smooth = dirac_mod.build_dirac(
        1, 1.0, 20.0, 33, potential=dirac_mod.gaussian_potential(cl1)
    )
    diag = dirac_mod.hypothesis_diagnostics(smooth, 1)
    ratios = np.concatenate([diag.schatten_ratio, diag.commutator_ratio])
    if not np.all((ratios >= 0.8) & (ratios <= 1.25)):
        failed.append(f"smooth potential unstable: ratios {np.round(ratios, 3)}")

    sharp = dirac_mod.build_dirac(
        1, 1.0, 20.0, 33, potential=dirac_mod.sharp_box_potential(cl1)
    )
    diag_sharp = dirac_mod.hypothesis_diagnostics(sharp, 1)
    if float(np.max(diag_sharp.commutator_ratio)) < 2.0:
        failed.append("sharp potential not flagged by commutator growth")
    crit.finish(failed)
