import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvfaraday.errors import (
    DegenerateStateError,
    DimensionError,
    ModeError,
    UnphysicalStateError,
)
from cvfaraday.gaussian import (
    GaussianState,
    ModeKind,
    atomic,
    check_physicality,
    discard_mode,
    light,
    occupation_from_temperature,
    quadrature_vector,
    symplectic_form,
    tensor,
    thermal_state,
    vacuum_state,
    variance_of,
    wigner_density,
)
from oracles import gamma_fin, gamma_out


def test_vacuum_single_mode():
    s = vacuum_state([atomic("A1")])
    np.testing.assert_array_equal(s.cov, np.eye(2))
    np.testing.assert_array_equal(s.disp, np.zeros(2))


def test_vacuum_two_modes():
    s = vacuum_state([atomic("A1"), light("L1")])
    np.testing.assert_array_equal(s.cov, np.eye(4))
    assert s.modes[1].kind is ModeKind.LIGHT


def test_vacuum_rejects_empty_and_duplicates():
    with pytest.raises(ModeError, match="empty mode list"):
        vacuum_state([])
    with pytest.raises(ModeError, match="A1"):
        vacuum_state([atomic("A1"), light("A1")])


def test_thermal_state():
    np.testing.assert_array_equal(thermal_state(atomic("A"), 1).cov, np.eye(2))
    np.testing.assert_array_equal(thermal_state(atomic("A"), 1.5).cov, np.diag([1.5, 1.5]))
    with pytest.raises(UnphysicalStateError):
        thermal_state(atomic("A"), 0.5)


def test_occupation_from_temperature():
    assert occupation_from_temperature(1.0) == pytest.approx(1.313035, abs=1e-6)
    assert occupation_from_temperature(0.1) == pytest.approx(10.0333, abs=1e-4)
    # series check 1/tanh(x) ~ 1/x + x/3
    assert occupation_from_temperature(0.1) == pytest.approx(1 / 0.1 + 0.1 / 3, abs=1e-4)
    assert occupation_from_temperature(50.0) == 1.0
    for bad in (0.0, -1.0):
        with pytest.raises(ValueError):
            occupation_from_temperature(bad)


def test_tensor_block_diagonal():
    s = tensor(thermal_state(atomic("A"), 2), vacuum_state([light("L")]))
    np.testing.assert_array_equal(s.cov, np.diag([2.0, 2.0, 1.0, 1.0]))
    assert s.ids == ("A", "L")
    with pytest.raises(ModeError):
        tensor(s, vacuum_state([atomic("A")]))


def test_discard_mode():
    s = discard_mode(vacuum_state([atomic("A"), light("L")]), "L")
    assert s.ids == ("A",)
    np.testing.assert_array_equal(s.cov, np.eye(2))
    with pytest.raises(ModeError):
        discard_mode(s, "nope")


def test_discard_from_printed_gamma_out():
    g = gamma_out(1.5, 2.0, 0.7)
    modes = (atomic("A1"), atomic("A2"), light("L"))
    s = GaussianState(modes, g)
    reduced = discard_mode(s, "A1")
    np.testing.assert_array_equal(reduced.cov, g[2:, 2:])
    assert reduced.ids == ("A2", "L")


def test_variance_of():
    assert variance_of(vacuum_state([atomic("A")]), [1, 0]) == 0.5
    s = GaussianState((atomic("A1"), atomic("A2")), gamma_fin(1, 1, 1))
    assert variance_of(s, [0, 1, 0, 1]) == pytest.approx(1 / 3, abs=1e-15)
    assert variance_of(s, [1, 0, -1, 0]) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DimensionError):
        variance_of(s, [1, 0])


def test_quadrature_vector():
    s = vacuum_state([atomic("A1"), atomic("A2")])
    h = quadrature_vector(s, [("p", "A1", 1.0), ("x", "A2", -2.0), ("p", "A1", 0.5)])
    np.testing.assert_array_equal(h, [0, 1.5, -2, 0])
    with pytest.raises(ValueError):
        quadrature_vector(s, [("y", "A1", 1.0)])


@pytest.mark.parametrize(
    "cov, ok",
    [(np.eye(2), True), (np.diag([0.5, 0.5]), False), (np.diag([0.5, 2.0]), True)],
)
def test_check_physicality(cov, ok):
    assert bool(check_physicality(cov)) is ok


def test_state_construction_validates():
    with pytest.raises(DimensionError):
        GaussianState((atomic("A"),), np.eye(4))
    with pytest.raises(UnphysicalStateError):
        GaussianState((atomic("A"),), np.array([[1.0, 0.5], [0.0, 1.0]]))
    s = GaussianState((atomic("A"),), np.array([[1.0, 1e-13], [0.0, 1.0]]))
    assert np.array_equal(s.cov, s.cov.T)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 3.0


def test_wigner_point_values():
    vac = vacuum_state([atomic("A")])
    assert wigner_density(vac, [0, 0]) == pytest.approx(1 / math.pi)
    assert wigner_density(vac, [1, 0]) == pytest.approx(math.exp(-1) / math.pi)
    two = vacuum_state([atomic("A"), atomic("B")])
    assert wigner_density(two, [0, 0, 0, 0]) == pytest.approx(1 / math.pi**2)


def test_wigner_normalisation_midpoint_rule():
    s = GaussianState((atomic("A"),), np.array([[1.4, 0.3], [0.3, 0.9]]), [0.4, -0.2])
    step = 0.05
    grid = np.arange(-8 + step / 2, 8, step)
    total = sum(wigner_density(s, [x, p]) for x in grid for p in grid) * step**2
    assert total == pytest.approx(1.0, abs=1e-4)


def test_wigner_rejects_singular():
    s = GaussianState((atomic("A"),), np.diag([1.0, 0.0]))
    with pytest.raises(DegenerateStateError):
        wigner_density(s, [0, 0])


def test_symplectic_form():
    J = symplectic_form(2)
    np.testing.assert_array_equal(J @ J, -np.eye(4))
    assert J[0, 1] == 1 and J[1, 0] == -1


@settings(max_examples=50, deadline=None)
@given(
    n=st.floats(1.0, 10.0),
    c=st.floats(-5.0, 5.0),
    h=st.lists(st.floats(-3, 3), min_size=2, max_size=2),
)
def test_variance_is_quadratic(n, c, h):
    s = thermal_state(atomic("A"), n)
    assert variance_of(s, c * np.array(h)) == pytest.approx(c**2 * variance_of(s, h), rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(n1=st.floats(1.0, 10.0), n2=st.floats(1.0, 10.0))
def test_tensor_then_discard_is_identity(n1, n2):
    a = thermal_state(atomic("A"), n1)
    back = discard_mode(tensor(a, thermal_state(atomic("B"), n2)), "B")
    np.testing.assert_array_equal(back.cov, a.cov)
    np.testing.assert_array_equal(back.disp, a.disp)
