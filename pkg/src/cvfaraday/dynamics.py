"""Faraday (QND) atom-light interaction as symplectic maps on Gaussian states.

A light beam crossing atomic sample ``n`` at angle ``alpha_n`` (measured from
the z axis) transforms the quadratures in the Heisenberg picture as::

    x_A,n -> x_A,n - kappa_n p_L cos(alpha_n)
    p_A,n -> p_A,n + kappa_n p_L sin(alpha_n)
    x_L   -> x_L - sum_n kappa_n (p_A,n cos(alpha_n) + x_A,n sin(alpha_n))
    p_L   -> p_L

:func:`heisenberg_matrix` builds this linear map ``K`` and
:func:`convert_to_symplectic` turns it into the matrix ``S`` that acts on
covariance matrices as ``gamma -> S^T gamma S``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionError, ModeError, SymplecticError
from .gaussian import (
    GaussianState,
    ModeKind,
    ModeLabel,
    symmetrize,
    symplectic_form,
)

SYMPLECTIC_TOL = 1e-10


def normalize_angle(alpha: float) -> float:
    """Map ``alpha`` into ``(-pi, pi]``; values already inside are returned untouched."""
    if -math.pi < alpha <= math.pi:
        return alpha
    wrapped = math.remainder(alpha, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def _mode_id(mode) -> str:
    return mode.id if isinstance(mode, ModeLabel) else str(mode)


@dataclass(frozen=True)
class PassSpec:
    """One crossing of ``beam`` through ``sample`` with coupling ``kappa`` at angle ``alpha``."""

    beam: ModeLabel | str
    sample: ModeLabel | str
    kappa: float
    alpha: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.kappa):
            raise ValueError(f"coupling must be finite, got {self.kappa}")
        if not math.isfinite(self.alpha):
            raise ValueError(f"angle must be finite, got {self.alpha}")
        if isinstance(self.beam, ModeLabel) and self.beam.kind is not ModeKind.LIGHT:
            raise ModeError(f"beam {self.beam.id!r} is not a light mode")
        if isinstance(self.sample, ModeLabel) and self.sample.kind is not ModeKind.ATOMIC:
            raise ModeError(f"sample {self.sample.id!r} is not an atomic mode")
        object.__setattr__(self, "alpha", normalize_angle(float(self.alpha)))
        object.__setattr__(self, "kappa", float(self.kappa))

    @property
    def beam_id(self) -> str:
        return _mode_id(self.beam)

    @property
    def sample_id(self) -> str:
        return _mode_id(self.sample)


@dataclass(frozen=True)
class Transit:
    """Ordered passes of a single beam through distinct samples."""

    passes: tuple[PassSpec, ...]

    def __post_init__(self):
        passes = tuple(self.passes)
        if not passes:
            raise ValueError("a transit needs at least one pass")
        beams = {p.beam_id for p in passes}
        if len(beams) != 1:
            raise ModeError(f"all passes of a transit must share one beam, got {sorted(beams)}")
        samples = [p.sample_id for p in passes]
        if len(set(samples)) != len(samples):
            raise ModeError(f"duplicate sample in transit: {samples}")
        object.__setattr__(self, "passes", passes)

    @property
    def beam_id(self) -> str:
        return self.passes[0].beam_id


def transit(beam, couplings: Sequence[tuple], kappa: float | None = None) -> Transit:
    """Shorthand: ``transit("L", [("A1", 0.0), ("A2", 0.0)], kappa=1.0)``.

    Each entry of ``couplings`` is ``(sample, alpha)`` when ``kappa`` is given,
    otherwise ``(sample, kappa, alpha)``.
    """
    passes = []
    for entry in couplings:
        if kappa is None:
            sample, k, alpha = entry
        else:
            (sample, alpha), k = entry, kappa
        passes.append(PassSpec(beam, sample, k, alpha))
    return Transit(tuple(passes))


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """A symplectic matrix together with the ordered modes it acts on."""

    matrix: np.ndarray
    acts_on: tuple[str, ...]

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        acts_on = tuple(_mode_id(m) for m in self.acts_on)
        dim = 2 * len(acts_on)
        if matrix.shape != (dim, dim):
            raise DimensionError(f"expected a {dim}x{dim} matrix, got {matrix.shape}")
        deviation = symplectic_deviation(matrix)
        scale = max(1.0, float(np.max(np.abs(matrix))) ** 2)
        if deviation > SYMPLECTIC_TOL * scale:
            raise SymplecticError(f"matrix is not symplectic (max |S^T J S - J| = {deviation:.3g})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "acts_on", acts_on)


def symplectic_deviation(matrix: np.ndarray) -> float:
    """``max |S^T J S - J|`` entrywise."""
    J = symplectic_form(matrix.shape[0] // 2)
    return float(np.max(np.abs(matrix.T @ J @ matrix - J)))


def heisenberg_matrix(t: Transit, state_modes: Sequence) -> np.ndarray:
    """Heisenberg-picture map ``R_out = K R_in`` of a transit, embedded in ``state_modes``."""
    ids = [_mode_id(m) for m in state_modes]
    position = {mode_id: i for i, mode_id in enumerate(ids)}
    if len(position) != len(ids):
        raise ModeError(f"duplicate mode ids in {ids}")
    for mode_id in [t.beam_id] + [p.sample_id for p in t.passes]:
        if mode_id not in position:
            raise ModeError(f"unknown mode id {mode_id!r}")

    K = np.eye(2 * len(ids))
    xl = 2 * position[t.beam_id]
    pl = xl + 1
    for p in t.passes:
        xa = 2 * position[p.sample_id]
        pa = xa + 1
        if xa == xl:
            raise ModeError(f"mode {p.sample_id!r} used as both beam and sample")
        c, s = math.cos(p.alpha), math.sin(p.alpha)
        K[xa, pl] -= p.kappa * c
        K[pa, pl] += p.kappa * s
        K[xl, pa] -= p.kappa * c
        K[xl, xa] -= p.kappa * s
    return K


def convert_to_symplectic(K: np.ndarray, acts_on: Sequence) -> SymplecticOp:
    """Covariance-picture symplectic matrix ``S = (K^T)^{-1}`` for a Heisenberg map ``K``.

    For a QND transit ``K^{-1}`` is ``K`` with every coupling negated, so the
    result equals the transpose of the sign-flipped map.
    """
    K = np.asarray(K, dtype=float)
    try:
        K_inv = np.linalg.solve(K, np.eye(K.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise SymplecticError("Heisenberg matrix is singular") from exc
    return SymplecticOp(K_inv.T, tuple(acts_on))


def transit_op(t: Transit, state_modes: Sequence) -> SymplecticOp:
    return convert_to_symplectic(heisenberg_matrix(t, state_modes), state_modes)


def _embed(op: SymplecticOp, ids: Sequence[str]) -> np.ndarray:
    if tuple(op.acts_on) == tuple(ids):
        return op.matrix
    position = {mode_id: i for i, mode_id in enumerate(ids)}
    missing = [m for m in op.acts_on if m not in position]
    if missing:
        raise ModeError(f"unknown mode ids {missing}")
    idx = []
    for mode_id in op.acts_on:
        idx.extend((2 * position[mode_id], 2 * position[mode_id] + 1))
    S = np.eye(2 * len(ids))
    S[np.ix_(idx, idx)] = op.matrix
    return S


def apply(op: SymplecticOp, s: GaussianState) -> GaussianState:
    """Evolve ``s``: ``gamma -> S^T gamma S`` and ``d -> S^T d``.

    ``op`` may act on a subset of the state's modes; it is padded with the
    identity on the others.
    """
    if len(op.acts_on) > s.n_modes:
        raise DimensionError(
            f"operation on {len(op.acts_on)} modes applied to a {s.n_modes}-mode state"
        )
    S = _embed(op, s.ids)
    return s.replace(cov=symmetrize(S.T @ s.cov @ S), disp=S.T @ s.disp)


class Direction(str, enum.Enum):
    TO_PRIMED = "to_primed"
    FROM_PRIMED = "from_primed"


#: (x, p) -> (x', p') = ((x - p) / sqrt 2, (x + p) / sqrt 2)
PRIMED_ROTATION = np.array([[1.0, -1.0], [1.0, 1.0]]) / math.sqrt(2)


@dataclass(frozen=True)
class FrameRotation:
    targets: tuple[str, ...]
    direction: Direction = Direction.TO_PRIMED

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(_mode_id(m) for m in self.targets))
        object.__setattr__(self, "direction", Direction(self.direction))
        if len(set(self.targets)) != len(self.targets):
            raise ModeError(f"duplicate rotation targets {self.targets}")

    def op(self) -> SymplecticOp:
        Q = PRIMED_ROTATION if self.direction is Direction.TO_PRIMED else PRIMED_ROTATION.T
        # apply() maps R -> S^T R, so S = Q^T realises R' = Q R
        return SymplecticOp(np.kron(np.eye(len(self.targets)), Q.T), self.targets)


def rotate_frame(r: FrameRotation, s: GaussianState) -> GaussianState:
    for mode_id in r.targets:
        s.index(mode_id)
    return apply(r.op(), s)
