import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvfaraday.dynamics import apply, transit, transit_op
from cvfaraday.errors import MeasurementError, ModeError
from cvfaraday.gaussian import (
    GaussianState,
    atomic,
    check_physicality,
    light,
    tensor,
    thermal_state,
    vacuum_state,
)
from cvfaraday.homodyne import OutcomePolicy, conditional_update, measure_homodyne
from oracles import gamma_fin, gamma_out


def _out_state(n1, n2, k):
    return GaussianState((atomic("A1"), atomic("A2"), light("L")), gamma_out(n1, n2, k))


def test_zero_correlation_is_noop():
    gA = np.diag([2.0, 3.0])
    cov, shift = conditional_update(gA, np.eye(2), np.zeros((2, 2)), "x", 1.7)
    np.testing.assert_array_equal(cov, gA)
    np.testing.assert_array_equal(shift, [0, 0])


@pytest.mark.parametrize("n1, n2, k", [(1, 1, 1), (1.5, 2, 0.7), (3, 1, 2)])
def test_blocks_give_printed_gamma_fin(n1, n2, k):
    g = gamma_out(n1, n2, k)
    cov, _ = conditional_update(g[:4, :4], g[4:, 4:], g[:4, 4:], "x", 0.0)
    np.testing.assert_allclose(cov, gamma_fin(n1, n2, k), atol=1e-12)


def test_measure_vacuum_paper_example():
    s, rec = measure_homodyne(_out_state(1, 1, 1), "L", "x", OutcomePolicy.fixed(1.0))
    np.testing.assert_allclose(s.disp, [0, 1 / 3, 0, 1 / 3], atol=1e-15)
    np.testing.assert_allclose(s.cov, gamma_fin(1, 1, 1), atol=1e-12)
    assert s.ids == ("A1", "A2")
    assert rec.outcome == 1.0 and rec.measured_mode == "L" and rec.step_index == 0


def test_displacement_general_occupations():
    # conditional mean of p_i given x_L: n_i k x / ((n1+n2)k^2+1)
    n1, n2, k, x = 1.5, 2.0, 0.7, 2.0
    s, _ = measure_homodyne(_out_state(n1, n2, k), "L", "x", OutcomePolicy.fixed(x))
    den = (n1 + n2) * k**2 + 1
    np.testing.assert_allclose(s.disp, [0, n1 * k * x / den, 0, n2 * k * x / den], atol=1e-14)


def test_affine_in_outcome():
    s = _out_state(1.5, 2, 0.7)
    base, _ = measure_homodyne(s, "L", "x", OutcomePolicy.fixed(0.0))
    one, _ = measure_homodyne(s, "L", "x", OutcomePolicy.fixed(1.0))
    g = s.cov
    gain = g[:4, 4] / g[4, 4]
    for x in (-2.0, 3.7):
        out, _ = measure_homodyne(s, "L", "x", OutcomePolicy.fixed(x))
        np.testing.assert_allclose(out.disp - base.disp, x * gain, atol=1e-13)
    np.testing.assert_allclose(one.disp - base.disp, gain, atol=1e-14)


def test_measuring_p_uses_exchange():
    # p measurement of a beam correlated through its p quadrature with the atom
    cov = np.array([
        [2.0, 0, 0, 1.0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [1.0, 0, 0, 1.0],
    ])
    s = GaussianState((atomic("A"), light("L")), cov)
    out, rec = measure_homodyne(s, "L", "p", OutcomePolicy.fixed(0.5))
    np.testing.assert_allclose(out.cov, [[1.0, 0], [0, 1]], atol=1e-14)
    np.testing.assert_allclose(out.disp, [0.5, 0], atol=1e-14)
    assert rec.quadrature == "p"


def test_measure_rejects_atomic_and_unknown():
    s = _out_state(1, 1, 1)
    with pytest.raises(ModeError):
        measure_homodyne(s, "A1", "x", OutcomePolicy.fixed(0))
    with pytest.raises(ModeError):
        measure_homodyne(s, "Z", "x", OutcomePolicy.fixed(0))


def test_ill_conditioned_measurement():
    gA = np.eye(2)
    gL = np.diag([0.0, 1.0])
    with pytest.raises(MeasurementError):
        conditional_update(gA, gL, np.array([[0.5, 0.0], [0.0, 0.0]]), "x", 0.0)


def test_outcome_policy_validation():
    with pytest.raises(ValueError):
        OutcomePolicy()
    with pytest.raises(ValueError):
        OutcomePolicy(value=1.0, seed=2)
    with pytest.raises(ValueError):
        OutcomePolicy.fixed(float("inf"))


def test_sampled_outcome_is_deterministic():
    s = _out_state(1, 1, 1)
    a, ra = measure_homodyne(s, "L", "x", OutcomePolicy.sampled(42), step_index=3)
    b, rb = measure_homodyne(s, "L", "x", OutcomePolicy.sampled(42), step_index=3)
    c, rc = measure_homodyne(s, "L", "x", OutcomePolicy.sampled(42), step_index=4)
    assert ra.outcome == rb.outcome != rc.outcome
    np.testing.assert_array_equal(a.disp, b.disp)
    np.testing.assert_array_equal(a.cov, c.cov)


def test_sampled_outcome_statistics():
    pol = OutcomePolicy.sampled(2024)
    draws = np.array([pol.draw(0.5, 1.5, i) for i in range(4000)])
    assert draws.mean() == pytest.approx(0.5, abs=0.1)
    assert draws.var() == pytest.approx(1.5, rel=0.1)


def _pure_random_state(k1, a1, k2, a2, d):
    modes = (atomic("A1"), atomic("A2"), light("L"))
    s = GaussianState(modes, np.eye(6), d)
    t = transit("L", [("A1", k1, a1), ("A2", k2, a2)])
    return apply(transit_op(t, s.ids), s)


angles = st.floats(-math.pi, math.pi, exclude_min=True)
couplings = st.floats(-3, 3)


@settings(max_examples=100, deadline=None)
@given(k1=couplings, a1=angles, k2=couplings, a2=angles, x=st.floats(-5, 5), seed=st.integers(0, 2**64 - 1))
def test_purity_physicality_outcome_independence(k1, a1, k2, a2, x, seed):
    s = _pure_random_state(k1, a1, k2, a2, np.zeros(6))
    fixed, _ = measure_homodyne(s, "L", "x", OutcomePolicy.fixed(x))
    sampled, _ = measure_homodyne(s, "L", "x", OutcomePolicy.sampled(seed))
    assert np.max(np.abs(fixed.cov - sampled.cov)) <= 1e-12
    assert abs(np.linalg.det(fixed.cov) - 1.0) <= 1e-9
    assert check_physicality(fixed)


def test_sampled_measurement_uses_half_the_covariance_entry():
    # outcome variance in hbar units is gamma_xx / 2
    s = tensor(vacuum_state([atomic("A")]), GaussianState((light("L"),), np.diag([6.0, 1 / 6])))
    draws = [measure_homodyne(s, "L", "x", OutcomePolicy.sampled(5), i)[1].outcome for i in range(3000)]
    assert np.var(draws) == pytest.approx(3.0, rel=0.1)


def test_unentangled_beam_leaves_atoms_alone():
    s = tensor(thermal_state(atomic("A"), 2.0), vacuum_state([light("L")]))
    out, _ = measure_homodyne(s, "L", "x", OutcomePolicy.fixed(4.0))
    np.testing.assert_array_equal(out.cov, np.diag([2.0, 2.0]))
    np.testing.assert_array_equal(out.disp, [0, 0])
