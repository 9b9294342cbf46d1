import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from oracles import counting_ssf, erf_oracle

from ssflab.errors import ContractError, ParameterError
from ssflab.fixtures import (
    fixture_endpoints,
    fixture_path,
    random_hermitian,
    random_unitary,
)
from ssflab.linalg import HermitianOperator, diagonal
from ssflab.scalarfn import constant, erf_scaled, gaussian, identity, polynomial
from ssflab.ssf import (
    StepFunction,
    _weight_antiderivative,
    krein_check,
    ssf_cutoff_limit,
    ssf_nonneg_pair,
    ssf_pair,
    step_difference,
    step_from_jumps,
    weighted_l1_distance,
)


class TestStepFunction:
    def test_validation(self):
        with pytest.raises(ContractError):
            StepFunction(np.array([1.0, 1.0]), np.array([2.0]))
        with pytest.raises(ContractError):
            StepFunction(np.array([1.0, 2.0]), np.array([1.0, 2.0]))
        with pytest.raises(ContractError):
            StepFunction(np.array([]), np.array([]), left_tail=1.0, right_tail=0.0)

    def test_right_continuous_evaluation(self):
        f = StepFunction(np.array([0.0, 1.0]), np.array([3.0]))
        assert f(-0.5) == 0.0
        assert f(0.0) == 3.0
        assert f(0.999) == 3.0
        assert f(1.0) == 0.0

    def test_integral_exact(self):
        f = StepFunction(np.array([0.0, 2.0]), np.array([1.5]))
        assert f.integral(-1.0, 3.0) == pytest.approx(3.0, abs=1e-15)
        assert f.integral(1.0, 1.5) == pytest.approx(0.75, abs=1e-15)

    def test_total_variation(self):
        f = StepFunction(np.array([-1.0, 0.0, 1.0]), np.array([1.0, 2.0]))
        assert f.total_variation() == pytest.approx(1 + 1 + 2)

    def test_csv_rows(self):
        f = StepFunction(np.array([-1.0, 1.0]), np.array([1.0]))
        assert f.to_rows() == [(-1.0, 1.0), (1.0, 0.0)]

    def test_constant_function(self):
        f = StepFunction(np.array([]), np.array([]), left_tail=5.0, right_tail=5.0)
        assert f(123.0) == 5.0
        assert f.integral(0.0, 2.0) == pytest.approx(10.0)


@settings(max_examples=50, deadline=None)
@given(
    jumps=st.lists(
        st.tuples(st.floats(-5, 5), st.sampled_from([-1.0, 1.0])),
        min_size=2,
        max_size=10,
    )
)
def test_step_from_jumps_balances(jumps):
    pos = [p for p, _ in jumps]
    jmp = [j for _, j in jumps]
    # balance the jump budget so tails close
    pos.append(6.0)
    jmp.append(-sum(jmp))
    f = step_from_jumps(np.array(pos), np.array(jmp))
    assert f.is_compactly_supported()
    assert f(7.0) == 0.0 and f(-7.0) == 0.0


@settings(max_examples=60, deadline=None)
@given(
    a=st.floats(-4, 4, allow_nan=False),
    span1=st.floats(0.0, 3.0, allow_nan=False),
    span2=st.floats(0.0, 3.0, allow_nan=False),
)
def test_step_integral_additive_over_adjacent_ranges(a, span1, span2):
    f = StepFunction(np.array([-1.0, 0.5, 2.0]), np.array([2.0, -1.0]))
    b = a + span1
    c = b + span2
    whole = f.integral(a, c)
    split = f.integral(a, b) + f.integral(b, c)
    assert whole == pytest.approx(split, abs=1e-12)


class TestSsfPair:
    def test_equal_pair_is_zero(self):
        rng = np.random.default_rng(101)
        op = random_hermitian(rng, 5)
        xi = ssf_pair(op, op)
        assert xi.breakpoints.size == 0
        assert xi(0.0) == 0.0

    def test_scalar_plateau(self):
        am, bp = fixture_endpoints("FIX-SCALAR")
        xi = ssf_pair(HermitianOperator(am.entries + bp.entries), am)
        assert xi.to_rows() == [(-1.0, 1.0), (1.0, 0.0)]
        assert xi(0.0) == 1.0
        assert xi(-1.5) == 0.0

    def test_diag2_staircase(self):
        path = fixture_path("FIX-DIAG2")
        xi = ssf_pair(path.a_plus, path.a_minus)
        assert xi(-1.5) == 1.0
        assert xi(0.0) == 2.0
        assert xi(1.5) == 0.0

    def test_matches_counting_oracle_pointwise(self):
        rng = np.random.default_rng(103)
        am = random_hermitian(rng, 6)
        ap = HermitianOperator(am.entries + random_hermitian(rng, 6, 0.7).entries)
        xi = ssf_pair(ap, am)
        for lam in rng.uniform(-4, 4, size=25):
            assert xi(float(lam)) == counting_ssf(
                am.eigenvalues, ap.eigenvalues, float(lam)
            )

    def test_integer_values_and_variation_bound(self):
        rng = np.random.default_rng(107)
        am = random_hermitian(rng, 8)
        ap = HermitianOperator(am.entries + random_hermitian(rng, 8).entries)
        xi = ssf_pair(ap, am)
        assert np.allclose(xi.values, np.round(xi.values))
        assert xi.total_variation() <= 2 * 8

    def test_unitary_invariance(self):
        rng = np.random.default_rng(109)
        am = random_hermitian(rng, 5)
        ap = HermitianOperator(am.entries + random_hermitian(rng, 5, 0.5).entries)
        U = random_unitary(rng, 5)
        xi = ssf_pair(ap, am)
        xi_u = ssf_pair(
            HermitianOperator(U @ ap.entries @ U.conj().T),
            HermitianOperator(U @ am.entries @ U.conj().T),
        )
        assert np.allclose(xi.breakpoints, xi_u.breakpoints, atol=1e-10)
        assert np.array_equal(xi.values, xi_u.values)

    def test_shift_covariance(self):
        rng = np.random.default_rng(113)
        am = random_hermitian(rng, 4)
        ap = HermitianOperator(am.entries + random_hermitian(rng, 4, 0.5).entries)
        c = 0.7
        xi = ssf_pair(ap, am)
        xi_shift = ssf_pair(
            HermitianOperator(ap.entries + c * np.eye(4)),
            HermitianOperator(am.entries + c * np.eye(4)),
        )
        for lam in np.linspace(-3, 3, 13):
            assert xi_shift(lam + c) == xi(lam)

    def test_dim_mismatch(self):
        with pytest.raises(ContractError):
            ssf_pair(diagonal([1.0]), diagonal([1.0, 2.0]))


class TestSsfNonnegPair:
    def test_equal(self):
        h = diagonal([0.0, 2.0])
        assert ssf_nonneg_pair(h, h).breakpoints.size == 0

    def test_simple_counting(self):
        xi = ssf_nonneg_pair(diagonal([1.0, 2.0]), diagonal([0.0, 2.0]))
        assert xi(0.5) == 1.0
        assert xi(-0.5) == 0.0
        assert xi(1.5) == 0.0

    def test_vanishes_on_negative_axis(self, scalar_pair):
        xi = ssf_nonneg_pair(
            scalar_pair.h2, scalar_pair.h1, reject_tol=2 * scalar_pair.psd_defect
        )
        assert xi(-1e-6) == 0.0
        assert np.all(xi.breakpoints >= 0.0)

    def test_rejects_indefinite(self):
        with pytest.raises(ContractError, match="indefinite"):
            ssf_nonneg_pair(diagonal([-0.5, 1.0]), diagonal([0.0, 1.0]))

    def test_suspension_plateau_matches_abel_oracle(self, scalar_pair):
        xi = ssf_nonneg_pair(
            scalar_pair.h2, scalar_pair.h1, reject_tol=2 * scalar_pair.psd_defect
        )
        # window average over the interior of (0, 1) is the plateau value 1
        assert xi.integral(0.2, 0.8) / 0.6 == pytest.approx(1.0, abs=0.05)


class TestKreinCheck:
    def test_constant_function(self):
        path = fixture_path("FIX-DIAG2")
        lhs, rhs, res = krein_check(path.a_plus, path.a_minus, constant(3.0))
        assert lhs == 0.0 and rhs == 0.0 and res == 0.0

    def test_scalar_identity_function(self):
        path = fixture_path("FIX-SCALAR")
        lhs, rhs, res = krein_check(path.a_plus, path.a_minus, identity())
        assert lhs == pytest.approx(2.0, abs=1e-14)
        assert rhs == pytest.approx(2.0, abs=1e-14)

    def test_diag2_gaussian(self):
        path = fixture_path("FIX-DIAG2")
        _, _, res = krein_check(path.a_plus, path.a_minus, gaussian(1.0))
        assert res <= 1e-12

    def test_twenty_seeded_combinations(self):
        rng = np.random.default_rng(127)
        fns = [
            polynomial([0.0, 1.0]),
            polynomial([1.0, -1.0, 2.0]),
            polynomial([0.0, 0.0, 1.0, 0.5]),
            polynomial([2.0, 0.0, -1.0, 0.0, 0.25]),
            gaussian(0.5),
            gaussian(1.0),
            gaussian(2.0),
            erf_scaled(0.5),
            erf_scaled(1.0),
            erf_scaled(2.0),
        ]
        count = 0
        while count < 20:
            n = int(rng.integers(2, 9))
            am = random_hermitian(rng, n)
            ap = HermitianOperator(am.entries + random_hermitian(rng, n, 0.6).entries)
            f = fns[count % len(fns)]
            _, _, res = krein_check(ap, am, f)
            assert res <= 1e-10
            count += 1


class TestWeightedMetric:
    @pytest.mark.parametrize("p0", [1, 3, 5])
    def test_antiderivative_against_quadrature(self, p0):
        anti = _weight_antiderivative(p0)
        for a, b in ((-2.0, 1.0), (0.5, 4.0), (-3.0, -0.25)):
            num, _ = quad(lambda x: 1.0 / (abs(x) ** (p0 + 1) + 1.0), a, b)
            assert anti(b) - anti(a) == pytest.approx(num, abs=1e-10)

    def test_distance_of_equal_functions_is_zero(self):
        f = StepFunction(np.array([0.0, 1.0]), np.array([2.0]))
        assert weighted_l1_distance(f, f) == 0.0

    def test_simple_distance(self):
        f = StepFunction(np.array([0.0, 1.0]), np.array([1.0]))
        g = StepFunction(np.array([]), np.array([]))
        expected = np.arctan(1.0) - np.arctan(0.0)
        assert weighted_l1_distance(f, g, 1) == pytest.approx(expected, abs=1e-14)


class TestCutoffLimit:
    def test_single_full_level(self):
        rng = np.random.default_rng(131)
        am = random_hermitian(rng, 5)
        bp = random_hermitian(rng, 5, 0.5)
        radius = am.spectral_radius() + 1
        per_level, limit, gaps = ssf_cutoff_limit(am, bp, [radius])
        assert gaps[0] == 0.0
        assert np.allclose(per_level[0].breakpoints, limit.breakpoints, atol=1e-9)

    def test_diag2_levels_end_at_zero(self):
        am, bp = fixture_endpoints("FIX-DIAG2")
        _, _, gaps = ssf_cutoff_limit(am, bp, [0.5, 1.5, 3.0])
        assert gaps[-1] == 0.0

    def test_seeded_sweep_nonincreasing_tail(self):
        rng = np.random.default_rng(137)
        am = random_hermitian(rng, 8)
        bp = random_hermitian(rng, 8, 0.5)
        from ssflab.models import cutoff_levels

        levels = cutoff_levels(am)[-6:]
        _, _, gaps = ssf_cutoff_limit(am, bp, levels)
        assert gaps[-1] <= 1e-12
        assert gaps[-1] <= gaps[-2] + 1e-15

    def test_rejects_unsorted_levels(self):
        am, bp = fixture_endpoints("FIX-DIAG2")
        with pytest.raises(ParameterError):
            ssf_cutoff_limit(am, bp, [2.0, 1.0])


def test_step_difference_cancels():
    f = StepFunction(np.array([0.0, 1.0]), np.array([2.0]))
    d = step_difference(f, f)
    assert d.breakpoints.size == 0


def test_laplace_weight_erf_consistency():
    # closed-form erf increments against quadrature for one plateau
    f = StepFunction(np.array([-1.0, 1.0]), np.array([1.0]))
    t = 0.8

    def anti(x):
        return erf_oracle(np.sqrt(t) * x) / (2.0 * t)

    exact = f.integrate_against(anti, -np.inf, np.inf)
    num, _ = quad(lambda s: np.exp(-t * s**2) / np.sqrt(np.pi * t), -1, 1)
    assert exact == pytest.approx(num, abs=1e-12)
