import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cvfaraday.dynamics import (
    PRIMED_ROTATION,
    Direction,
    FrameRotation,
    PassSpec,
    SymplecticOp,
    Transit,
    apply,
    convert_to_symplectic,
    heisenberg_matrix,
    normalize_angle,
    rotate_frame,
    symplectic_deviation,
    transit,
    transit_op,
)
from cvfaraday.entanglement import symplectic_spectrum
from cvfaraday.errors import DimensionError, ModeError, SymplecticError
from cvfaraday.gaussian import (
    GaussianState,
    atomic,
    check_physicality,
    light,
    tensor,
    thermal_state,
    vacuum_state,
)
from cvfaraday.protocols import cluster_passes
from oracles import gamma_out, s_cluster_1, s_cluster_2, s_int, s_int_eraser

PAIR = [atomic("A1"), atomic("A2"), light("L")]
CLUSTER = [atomic(f"A{i}") for i in range(1, 5)] + [light("L")]


def _thermal_pair_with_beam(n1, n2):
    return tensor(
        tensor(thermal_state(atomic("A1"), n1), thermal_state(atomic("A2"), n2)),
        vacuum_state([light("L")]),
    )


def test_normalize_angle():
    assert normalize_angle(math.pi) == math.pi
    assert normalize_angle(-math.pi) == math.pi
    assert normalize_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert normalize_angle(0.3) == 0.3


def test_single_pass_heisenberg_matrix():
    k = 0.8
    K = heisenberg_matrix(transit("L", [("A", k, 0.0)]), [atomic("A"), light("L")])
    expected = np.array([
        [1, 0, 0, -k],
        [0, 1, 0, 0],
        [0, -k, 1, 0],
        [0, 0, 0, 1],
    ])
    np.testing.assert_allclose(K, expected, atol=1e-15)


def test_single_pass_heisenberg_at_angle():
    k, a = 0.6, 0.4
    K = heisenberg_matrix(transit("L", [("A", k, a)]), ["A", "L"])
    assert K[0, 3] == pytest.approx(-k * math.cos(a))
    assert K[1, 3] == pytest.approx(k * math.sin(a))
    assert K[2, 0] == pytest.approx(-k * math.sin(a))
    assert K[2, 1] == pytest.approx(-k * math.cos(a))
    assert K[3, 3] == 1.0


def test_zero_coupling_is_identity():
    t = transit("L", [("A1", 0.0), ("A2", 1.1)], kappa=0.0)
    np.testing.assert_array_equal(heisenberg_matrix(t, PAIR), np.eye(6))
    np.testing.assert_array_equal(transit_op(t, PAIR).matrix, np.eye(6))


def test_two_sample_heisenberg_accumulates():
    k = 1.3
    K = heisenberg_matrix(transit("L", [("A1", 0.0), ("A2", 0.0)], kappa=k), PAIR)
    assert K[4, 1] == -k and K[4, 3] == -k


@pytest.mark.parametrize("k", [0.3, 1.0, 2.5])
def test_printed_s_int(k):
    op = transit_op(transit("L", [("A1", 0.0), ("A2", 0.0)], kappa=k), PAIR)
    np.testing.assert_allclose(op.matrix, s_int(k), atol=1e-14)


@pytest.mark.parametrize("eta", [0.2, 1 / math.sqrt(3), 1.7])
def test_printed_eraser_matrix(eta):
    op = transit_op(transit("L", [("A1", math.pi / 2), ("A2", math.pi / 2)], kappa=eta), PAIR)
    np.testing.assert_allclose(op.matrix, s_int_eraser(eta), atol=1e-14)


def _primed(S):
    Q = np.eye(10)
    for i in range(4):
        Q[2 * i:2 * i + 2, 2 * i:2 * i + 2] = PRIMED_ROTATION
    return Q @ S @ Q.T


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_cluster_steps_in_primed_frame(k):
    for center, oracle in ((0, s_cluster_1), (1, s_cluster_2)):
        t = Transit(tuple(PassSpec("L", s, kk, a) for s, kk, a in cluster_passes(center, k)))
        np.testing.assert_allclose(_primed(transit_op(t, CLUSTER).matrix), oracle(k), atol=1e-10)


def test_convert_is_inverse_transpose():
    t = transit("L", [("A1", 0.3), ("A2", -1.2)], kappa=0.9)
    K = heisenberg_matrix(t, PAIR)
    op = convert_to_symplectic(K, ["A1", "A2", "L"])
    np.testing.assert_allclose(op.matrix @ K.T, np.eye(6), atol=1e-14)


def test_convert_rejects_singular():
    with pytest.raises(SymplecticError):
        convert_to_symplectic(np.zeros((2, 2)), ["A"])


def test_transit_validation():
    with pytest.raises(ModeError, match="duplicate sample"):
        transit("L", [("A1", 0.0), ("A1", 0.0)], kappa=1.0)
    with pytest.raises(ModeError):
        Transit((PassSpec("L", "A1", 1.0), PassSpec("M", "A2", 1.0)))
    with pytest.raises(ModeError):
        heisenberg_matrix(transit("L", [("A9", 0.0)], kappa=1.0), PAIR)
    with pytest.raises(ModeError):
        PassSpec(atomic("A1"), "A2", 1.0)
    with pytest.raises(ValueError):
        PassSpec("L", "A1", float("nan"))


def test_symplectic_op_certificate():
    with pytest.raises(SymplecticError):
        SymplecticOp(np.diag([2.0, 2.0]), ["A"])
    with pytest.raises(DimensionError):
        SymplecticOp(np.eye(2), ["A", "B"])
    assert symplectic_deviation(np.diag([2.0, 0.5])) == 0.0


def test_apply_identity():
    s = _thermal_pair_with_beam(1.5, 2.0)
    out = apply(SymplecticOp(np.eye(6), s.ids), s)
    np.testing.assert_array_equal(out.cov, s.cov)


@pytest.mark.parametrize("n1, n2, k", [(1, 1, 1), (1.5, 2, 0.7), (3, 1, 2)])
def test_apply_reproduces_printed_gamma_out(n1, n2, k):
    s = _thermal_pair_with_beam(n1, n2)
    out = apply(transit_op(transit("L", [("A1", 0.0), ("A2", 0.0)], kappa=k), s.ids), s)
    np.testing.assert_allclose(out.cov, gamma_out(n1, n2, k), atol=1e-10)


def test_gamma_out_xl_entry():
    s = _thermal_pair_with_beam(1, 1)
    out = apply(transit_op(transit("L", [("A1", 0.0), ("A2", 0.0)], kappa=1.0), s.ids), s)
    assert out.cov[4, 4] == pytest.approx(3.0, abs=1e-14)


def test_apply_on_subset_of_modes():
    s = tensor(_thermal_pair_with_beam(1, 1), vacuum_state([atomic("A3")]))
    op = transit_op(transit("L", [("A1", 0.0)], kappa=1.0), ["A1", "L"])
    out = apply(op, s)
    np.testing.assert_array_equal(out.cov[6:, 6:], np.eye(2))
    assert out.cov[0, 0] == pytest.approx(2.0)


def test_apply_rejects_unknown_modes():
    op = transit_op(transit("L", [("A1", 0.0)], kappa=1.0), ["A1", "L"])
    with pytest.raises(DimensionError):
        apply(op, vacuum_state([atomic("A1")]))
    with pytest.raises(ModeError):
        apply(op, vacuum_state([atomic("A1"), light("M")]))


def test_rotate_frame_examples():
    vac = vacuum_state([atomic("A")])
    out = rotate_frame(FrameRotation(("A",), Direction.TO_PRIMED), vac)
    np.testing.assert_allclose(out.cov, np.eye(2), atol=1e-15)
    s = GaussianState((atomic("A"),), np.diag([3.0, 0.5]))
    out = rotate_frame(FrameRotation(("A",), Direction.TO_PRIMED), s)
    assert out.cov[0, 0] == pytest.approx(1.75)


def test_rotate_frame_moves_means():
    s = GaussianState((atomic("A"),), np.eye(2), [1.0, 0.0])
    out = rotate_frame(FrameRotation(("A",), "to_primed"), s)
    # x' = (x - p)/sqrt2, p' = (x + p)/sqrt2
    np.testing.assert_allclose(out.disp, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


def test_rotate_frame_unknown_id():
    with pytest.raises(ModeError):
        rotate_frame(FrameRotation(("Z",), "to_primed"), vacuum_state([atomic("A")]))


def _random_state(rng, n):
    """Random mixed physical state: thermal noise through a random symplectic map."""
    modes = [atomic(f"A{i}") for i in range(n - 1)] + [light("L")]
    s = GaussianState(tuple(modes), np.diag(np.repeat(rng.uniform(1, 3, n), 2)), rng.normal(size=2 * n))
    t = Transit(tuple(PassSpec("L", f"A{i}", rng.uniform(-2, 2), rng.uniform(-3, 3)) for i in range(n - 1)))
    return apply(transit_op(t, s.ids), s)


def test_to_then_from_primed_is_identity():
    rng = np.random.default_rng(7)
    s = _random_state(rng, 3)
    ids = s.ids[:2]
    back = rotate_frame(
        FrameRotation(ids, "from_primed"), rotate_frame(FrameRotation(ids, "to_primed"), s)
    )
    np.testing.assert_allclose(back.cov, s.cov, atol=1e-12)
    np.testing.assert_allclose(back.disp, s.disp, atol=1e-12)


def test_local_rotation_preserves_spectrum():
    rng = np.random.default_rng(11)
    s = _random_state(rng, 4)
    out = rotate_frame(FrameRotation(("A0", "A2"), "to_primed"), s)
    np.testing.assert_allclose(symplectic_spectrum(out.cov), symplectic_spectrum(s.cov), atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(
    couplings=st.lists(
        st.tuples(st.floats(-3, 3), st.floats(-math.pi, math.pi, exclude_min=True)),
        min_size=1,
        max_size=5,
    )
)
def test_random_transits_are_symplectic_and_physical(couplings):
    modes = [atomic(f"A{i}") for i in range(len(couplings))] + [light("L")]
    t = Transit(tuple(PassSpec("L", f"A{i}", k, a) for i, (k, a) in enumerate(couplings)))
    op = transit_op(t, modes)
    assert symplectic_deviation(op.matrix) <= 1e-10 * max(1.0, np.max(np.abs(op.matrix)) ** 2)
    out = apply(op, vacuum_state(modes))
    assert check_physicality(out)
    assert np.max(np.abs(out.cov - out.cov.T)) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(k=st.floats(0.05, 2.0), perm=st.permutations([0, 1, 2]))
def test_pass_order_inside_transit_is_irrelevant(k, perm):
    passes = cluster_passes(1, k)
    ordered = Transit(tuple(PassSpec("L", s, kk, a) for s, kk, a in passes))
    shuffled = Transit(tuple(PassSpec("L", *passes[i]) for i in perm))
    np.testing.assert_allclose(
        transit_op(ordered, CLUSTER).matrix, transit_op(shuffled, CLUSTER).matrix, atol=1e-12
    )
