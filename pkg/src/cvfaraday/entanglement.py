"""Entanglement certification from covariance matrices.

Two families of tests are provided:

* the PPT test: flip the momenta of one side of a bipartition and check
  whether the result is still a valid covariance matrix (it is necessary and
  sufficient for ``1 x N`` splits of Gaussian states, sufficient otherwise);
* variance inequalities on joint quadratures: the two-mode sum of Duan et
  al. and the multimode bound of van Loock and Furusawa.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CriterionError, DimensionError
from .gaussian import GaussianState, quadrature_vector, symplectic_form, variance_of

PPT_TOL = 1e-9


@dataclass(frozen=True)
class Bipartition:
    side_a: frozenset
    side_b: frozenset

    def __post_init__(self):
        a, b = frozenset(self.side_a), frozenset(self.side_b)
        if not a or not b:
            raise CriterionError("both sides of a bipartition must be non-empty")
        if a & b:
            raise CriterionError(f"sides overlap on {sorted(a & b)}")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)

    @classmethod
    def of(cls, side_a: Iterable[str], side_b: Iterable[str]) -> "Bipartition":
        return cls(frozenset(side_a), frozenset(side_b))

    def swapped(self) -> "Bipartition":
        return Bipartition(self.side_b, self.side_a)

    def validate(self, s: GaussianState) -> None:
        if self.side_a | self.side_b != set(s.ids):
            raise CriterionError(
                f"bipartition {self} does not cover the modes {list(s.ids)} exactly"
            )

    def __str__(self) -> str:
        return ",".join(sorted(self.side_a)) + "|" + ",".join(sorted(self.side_b))


def all_bipartitions(mode_ids: Sequence[str]) -> list[Bipartition]:
    """Every unordered bipartition; ``2**(N-1) - 1`` of them."""
    ids = list(mode_ids)
    first, rest = ids[0], ids[1:]
    parts = []
    for r in range(len(rest) + 1):
        for combo in itertools.combinations(rest, r):
            side_a = {first, *combo}
            side_b = set(ids) - side_a
            if side_b:
                parts.append(Bipartition.of(side_a, side_b))
    return parts


def partial_time_reversal(s: GaussianState, part: Bipartition) -> np.ndarray:
    part.validate(s)
    signs = np.ones(2 * s.n_modes)
    for mode_id in part.side_b:
        signs[2 * s.index(mode_id) + 1] = -1.0
    return s.cov * np.outer(signs, signs)


def symplectic_spectrum(gamma) -> np.ndarray:
    """Symplectic eigenvalues of ``gamma`` (moduli of the eigenvalues of ``iJ gamma``), ascending."""
    gamma = np.asarray(gamma, dtype=float)
    if gamma.ndim != 2 or gamma.shape[0] != gamma.shape[1] or gamma.shape[0] % 2:
        raise DimensionError(f"expected a 2N x 2N matrix, got {gamma.shape}")
    scale = max(1.0, float(np.max(np.abs(gamma))))
    if np.max(np.abs(gamma - gamma.T)) > 1e-9 * scale:
        raise CriterionError("matrix is not symmetric")
    if np.linalg.eigvalsh(gamma)[0] <= 0:
        raise CriterionError("matrix is not positive definite")
    J = symplectic_form(gamma.shape[0] // 2)
    moduli = np.sort(np.abs(np.linalg.eigvals(J @ gamma)))
    return moduli[::2]


@dataclass(frozen=True)
class EntanglementVerdict:
    partition: Bipartition
    min_pt_symplectic_eig: float
    log_negativity: float
    entangled: bool
    boundary: bool = False

    @property
    def npt_only(self) -> bool:
        """True for multi-vs-multi splits, where PPT is sufficient but not necessary."""
        return min(len(self.partition.side_a), len(self.partition.side_b)) > 1


def ppt_test(s: GaussianState, part: Bipartition) -> EntanglementVerdict:
    spectrum = symplectic_spectrum(partial_time_reversal(s, part))
    nu_min = float(spectrum[0])
    log_neg = float(sum(-math.log(nu) for nu in spectrum if nu < 1.0))
    return EntanglementVerdict(
        partition=part,
        min_pt_symplectic_eig=nu_min,
        log_negativity=max(log_neg, 0.0),
        entangled=nu_min < 1.0 - PPT_TOL,
        boundary=abs(nu_min - 1.0) <= PPT_TOL,
    )


def fully_inseparable(s: GaussianState) -> bool:
    return all(ppt_test(s, p).entangled for p in all_bipartitions(s.ids))


def duan_sum(s: GaussianState, pair: tuple[str, str], lam: float = 1.0) -> float:
    """``Var(|l| p1 + p2 / l) + Var(|l| x1 - x2 / l)`` in units of hbar.

    Separable states give at least 2.
    """
    if lam == 0:
        raise CriterionError("lambda must be non-zero")
    first, second = pair
    a = abs(lam)
    v = quadrature_vector(s, [("p", first, a), ("p", second, 1.0 / lam)])
    u = quadrature_vector(s, [("x", first, a), ("x", second, -1.0 / lam)])
    return variance_of(s, v) + variance_of(s, u)


@dataclass(frozen=True)
class VarianceCriterion:
    """Coefficients of ``u = sum h_k x_k`` and ``v = sum g_k p_k``.

    Mode indices refer to positions in the state. ``l`` and ``m`` are the two
    distinguished modes, ``group_l`` and ``group_m`` the sets joined to each of
    them. Modes listed in ``exchanged`` are first mapped ``(x, p) -> (p, -x)``
    (a local operation), so that combinations mixing positions and momenta of
    the same mode can be expressed.
    """

    h: tuple[float, ...]
    g: tuple[float, ...]
    l: int
    m: int
    group_l: frozenset = field(default_factory=frozenset)
    group_m: frozenset = field(default_factory=frozenset)
    exchanged: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        h = tuple(float(c) for c in self.h)
        g = tuple(float(c) for c in self.g)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "g", g)
        for name in ("group_l", "group_m", "exchanged"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        n = len(h)
        if len(g) != n:
            raise CriterionError(f"h and g differ in length ({n} vs {len(g)})")
        if self.l == self.m:
            raise CriterionError("distinguished modes l and m must differ")
        side_l = {self.l} | self.group_l
        side_m = {self.m} | self.group_m
        if side_l & side_m:
            raise CriterionError(f"groups overlap on {sorted(side_l & side_m)}")
        if side_l | side_m != set(range(n)):
            raise CriterionError(f"groups must cover mode indices 0..{n - 1}")
        if not self.exchanged <= set(range(n)):
            raise CriterionError("exchanged indices out of range")

    @property
    def n_modes(self) -> int:
        return len(self.h)

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        """Phase-space coefficient vectors of ``u`` and ``v`` in the interleaved layout."""
        u = np.zeros(2 * self.n_modes)
        v = np.zeros(2 * self.n_modes)
        for k, (hk, gk) in enumerate(zip(self.h, self.g)):
            if k in self.exchanged:
                u[2 * k + 1] = hk
                v[2 * k] = -gk
            else:
                u[2 * k] = hk
                v[2 * k + 1] = gk
        return u, v


def vlf_bound(c: VarianceCriterion) -> float:
    hg = [hk * gk for hk, gk in zip(c.h, c.g)]
    return abs(hg[c.l] + sum(hg[r] for r in c.group_l)) + abs(
        hg[c.m] + sum(hg[s] for s in c.group_m)
    )


@dataclass(frozen=True)
class VarianceTestResult:
    lhs: float
    bound: float

    @property
    def violation(self) -> float:
        return max(self.bound - self.lhs, 0.0)

    @property
    def entangled(self) -> bool:
        return self.lhs < self.bound


def vlf_lhs(s: GaussianState, c: VarianceCriterion) -> float:
    if c.n_modes != s.n_modes:
        raise DimensionError(f"criterion for {c.n_modes} modes, state has {s.n_modes}")
    u, v = c.vectors()
    return variance_of(s, u) + variance_of(s, v)


def vlf_test(s: GaussianState, c: VarianceCriterion) -> VarianceTestResult:
    return VarianceTestResult(vlf_lhs(s, c), vlf_bound(c))


def duan_criterion(n_modes: int = 2, first: int = 0, second: int = 1) -> VarianceCriterion:
    """``Var(x_first - x_second) + Var(p_first + p_second) >= 2`` as a variance criterion."""
    h = [0.0] * n_modes
    g = [0.0] * n_modes
    h[first], h[second] = 1.0, -1.0
    g[first], g[second] = 1.0, 1.0
    others = [k for k in range(n_modes) if k not in (first, second)]
    return VarianceCriterion(h, g, first, second, frozenset(others), frozenset())


# Four-mode linear cluster, primed-frame quadratures, modes 0..3 along the chain:
#   delta1 = Var(p1 - x2) + Var(p2 - x1 - x3)
#   delta2 = Var(p3 - x2 - x4) + Var(p2 - x1 - x3)
#   delta3 = Var(p4 - x3) + Var(p3 - x2 - x4)
CLUSTER_CRITERIA = {
    "delta1": VarianceCriterion(
        h=(1, -1, 0, 0), g=(1, 1, 1, 0), l=0, m=1,
        group_l=frozenset({2}), group_m=frozenset({3}), exchanged=frozenset({0, 2}),
    ),
    "delta2": VarianceCriterion(
        h=(0, -1, 1, -1), g=(1, 1, 1, 0), l=1, m=2,
        group_l=frozenset({0}), group_m=frozenset({3}), exchanged=frozenset({0, 2}),
    ),
    "delta3": VarianceCriterion(
        h=(0, 0, -1, 1), g=(0, 1, 1, 1), l=2, m=3,
        group_l=frozenset({0}), group_m=frozenset({1}), exchanged=frozenset({1, 3}),
    ),
}
