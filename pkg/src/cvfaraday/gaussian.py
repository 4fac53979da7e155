"""Gaussian states of canonical modes in the covariance-matrix picture.

Conventions used throughout the package:

* quadratures are interleaved, ``R = (x_1, p_1, ..., x_N, p_N)``;
* covariance matrices are normalised so that the vacuum is the identity and
  ``Var(h . R) / hbar = h^T gamma h / 2``;
* ``[R_i, R_j] = i hbar J_ij`` with ``J`` the block-diagonal symplectic form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateStateError,
    DimensionError,
    ModeError,
    UnphysicalStateError,
)

#: eigenvalue threshold for ``gamma + iJ >= 0``
PHYSICALITY_TOL = 1e-9
#: asymmetry tolerated (and removed) when a covariance matrix is stored
SYMMETRY_TOL = 1e-9


class ModeKind(str, enum.Enum):
    ATOMIC = "atomic"
    LIGHT = "light"


@dataclass(frozen=True)
class ModeLabel:
    id: str
    kind: ModeKind = ModeKind.ATOMIC

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ModeError(f"mode id must be a non-empty string, got {self.id!r}")
        object.__setattr__(self, "kind", ModeKind(self.kind))

    def __str__(self) -> str:
        return self.id


def atomic(mode_id: str) -> ModeLabel:
    return ModeLabel(mode_id, ModeKind.ATOMIC)


def light(mode_id: str) -> ModeLabel:
    return ModeLabel(mode_id, ModeKind.LIGHT)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return ``J_N``, the direct sum of ``n_modes`` copies of ``[[0, 1], [-1, 0]]``."""
    if n_modes < 1:
        raise DimensionError(f"n_modes must be positive, got {n_modes}")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _check_unique(modes: Sequence[ModeLabel]) -> None:
    seen = set()
    for mode in modes:
        if mode.id in seen:
            raise ModeError(f"duplicate mode id {mode.id!r}")
        seen.add(mode.id)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Covariance matrix, displacement vector and the modes they refer to.

    Instances are immutable; every operation in the package returns a new
    state. The covariance matrix is re-symmetrised on construction.
    """

    modes: tuple[ModeLabel, ...]
    cov: np.ndarray
    disp: np.ndarray = field(default=None)

    def __post_init__(self):
        modes = tuple(self.modes)
        if not modes:
            raise ModeError("empty mode list")
        _check_unique(modes)
        dim = 2 * len(modes)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (dim, dim):
            raise DimensionError(f"covariance must be {dim}x{dim}, got {cov.shape}")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise UnphysicalStateError("covariance matrix is not symmetric")
        disp = np.zeros(dim) if self.disp is None else np.asarray(self.disp, dtype=float)
        if disp.shape != (dim,):
            raise DimensionError(f"displacement must have length {dim}, got {disp.shape}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "cov", _frozen(symmetrize(cov)))
        object.__setattr__(self, "disp", _frozen(disp))

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(m.id for m in self.modes)

    def index(self, mode: ModeLabel | str) -> int:
        """Position of ``mode`` in the mode list (its x quadrature sits at ``2 * index``)."""
        mode_id = mode.id if isinstance(mode, ModeLabel) else mode
        for i, m in enumerate(self.modes):
            if m.id == mode_id:
                return i
        raise ModeError(f"unknown mode id {mode_id!r}")

    def label(self, mode_id: str) -> ModeLabel:
        return self.modes[self.index(mode_id)]

    def quadrature_indices(self, mode_ids: Iterable[str]) -> list[int]:
        idx = []
        for mode_id in mode_ids:
            i = self.index(mode_id)
            idx.extend((2 * i, 2 * i + 1))
        return idx

    def replace(self, cov=None, disp=None, modes=None) -> "GaussianState":
        return GaussianState(
            self.modes if modes is None else modes,
            self.cov if cov is None else cov,
            self.disp if disp is None else disp,
        )

    def __repr__(self) -> str:
        return f"GaussianState(modes={list(self.ids)})"


def vacuum_state(labels: Sequence[ModeLabel]) -> GaussianState:
    labels = tuple(labels)
    if not labels:
        raise ModeError("empty mode list")
    return GaussianState(labels, np.eye(2 * len(labels)))


def thermal_state(label: ModeLabel, n: float) -> GaussianState:
    """Single-mode thermal state with covariance ``n * 1``."""
    if not np.isfinite(n) or n < 1:
        raise UnphysicalStateError(f"thermal occupation n must be >= 1, got {n}")
    return GaussianState((label,), n * np.eye(2))


def occupation_from_temperature(ratio: float) -> float:
    """Return ``1 / tanh(ratio)`` where ``ratio = hbar omega / (2 k_B T)``."""
    if not ratio > 0:
        raise ValueError(f"ratio must be positive, got {ratio}")
    return 1.0 / math.tanh(ratio)


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    """Direct sum of two states: block-diagonal covariance, concatenated modes."""
    clash = set(a.ids) & set(b.ids)
    if clash:
        raise ModeError(f"mode ids present in both states: {sorted(clash)}")
    dim_a = 2 * a.n_modes
    dim = dim_a + 2 * b.n_modes
    cov = np.zeros((dim, dim))
    cov[:dim_a, :dim_a] = a.cov
    cov[dim_a:, dim_a:] = b.cov
    return GaussianState(a.modes + b.modes, cov, np.concatenate([a.disp, b.disp]))


def select_modes(s: GaussianState, mode_ids: Sequence[str]) -> GaussianState:
    """Reduced state on ``mode_ids``, in the order given."""
    idx = s.quadrature_indices(mode_ids)
    modes = tuple(s.label(m) for m in mode_ids)
    return GaussianState(modes, s.cov[np.ix_(idx, idx)], s.disp[idx])


def discard_mode(s: GaussianState, mode: ModeLabel | str) -> GaussianState:
    """Partial trace over one mode."""
    mode_id = mode.id if isinstance(mode, ModeLabel) else mode
    s.index(mode_id)
    keep = [m for m in s.ids if m != mode_id]
    if not keep:
        raise ModeError("cannot discard the last mode of a state")
    return select_modes(s, keep)


def variance_of(s: GaussianState, h: Sequence[float]) -> float:
    """Variance of ``h . R`` in units of hbar."""
    h = np.asarray(h, dtype=float)
    if h.shape != (2 * s.n_modes,):
        raise DimensionError(
            f"coefficient vector must have length {2 * s.n_modes}, got {h.shape}"
        )
    return 0.5 * float(h @ s.cov @ h)


@dataclass(frozen=True)
class Physicality:
    """Outcome of :func:`check_physicality`; truthy when the state is physical."""

    ok: bool
    min_eig: float

    def __bool__(self) -> bool:
        return self.ok


def check_physicality(s: GaussianState | np.ndarray) -> Physicality:
    cov = s.cov if isinstance(s, GaussianState) else np.asarray(s, dtype=float)
    n = cov.shape[0] // 2
    min_eig = float(np.linalg.eigvalsh(cov + 1j * symplectic_form(n))[0])
    return Physicality(min_eig >= -PHYSICALITY_TOL, min_eig)


def wigner_density(s: GaussianState, point: Sequence[float]) -> float:
    point = np.asarray(point, dtype=float)
    if point.shape != s.disp.shape:
        raise DimensionError(f"phase-space point must have length {s.disp.size}")
    det = float(np.linalg.det(s.cov))
    if det <= 1e-12:
        raise DegenerateStateError(f"covariance matrix is singular (det={det:.3g})")
    delta = point - s.disp
    exponent = float(delta @ np.linalg.solve(s.cov, delta))
    return math.exp(-exponent) / (math.pi ** s.n_modes * math.sqrt(det))


def quadrature_vector(s: GaussianState, terms: Iterable[tuple[str, str, float]]) -> np.ndarray:
    """Coefficient vector ``h`` of ``sum c * q_mode`` for ``terms = [(q, mode_id, c), ...]``.

    ``q`` is ``"x"`` or ``"p"``; repeated terms accumulate.
    """
    h = np.zeros(2 * s.n_modes)
    for quad, mode_id, coeff in terms:
        if quad not in ("x", "p"):
            raise ValueError(f"quadrature must be 'x' or 'p', got {quad!r}")
        h[2 * s.index(mode_id) + (quad == "p")] += coeff
    return h
