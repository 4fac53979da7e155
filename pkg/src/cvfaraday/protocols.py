"""End-to-end atom-light protocols and parameter sweeps.

Every protocol is assembled from the generic pipeline
(:func:`~cvfaraday.dynamics.heisenberg_matrix` ->
:func:`~cvfaraday.dynamics.convert_to_symplectic` -> :func:`~cvfaraday.dynamics.apply`
-> :func:`~cvfaraday.homodyne.measure_homodyne`); no protocol hard-codes a
covariance or symplectic matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import bisect

from . import reports
from .dynamics import (
    Direction,
    FrameRotation,
    PassSpec,
    Transit,
    apply,
    rotate_frame,
    transit_op,
)
from .entanglement import Bipartition, all_bipartitions
from .gaussian import (
    GaussianState,
    atomic,
    light,
    tensor,
    thermal_state,
    vacuum_state,
)
from .homodyne import MeasurementRecord, OutcomePolicy, measure_homodyne

BEAM = "L"
ZERO = OutcomePolicy.fixed(0.0)


@dataclass
class ProtocolResult:
    final_state: GaussianState
    records: list[MeasurementRecord] = field(default_factory=list)
    reports: dict[str, float | bool] = field(default_factory=dict)
    snapshots: list[tuple[str, GaussianState]] = field(default_factory=list)


def _outcomes(policies, count: int) -> list[OutcomePolicy]:
    if policies is None:
        return [ZERO] * count
    if isinstance(policies, OutcomePolicy):
        return [policies] * count
    policies = list(policies)
    if len(policies) != count:
        raise ValueError(f"expected {count} outcome policies, got {len(policies)}")
    return policies


def beam_step(
    state: GaussianState,
    passes: Sequence[tuple[str, float, float]],
    policy: OutcomePolicy,
    step_index: int,
    beam: str = BEAM,
) -> tuple[GaussianState, MeasurementRecord]:
    """Append a vacuum beam, send it through ``passes`` and measure its x quadrature.

    ``passes`` holds ``(sample, kappa, alpha)`` triples.
    """
    state = tensor(state, vacuum_state([light(beam)]))
    t = Transit(tuple(PassSpec(beam, sample, k, a) for sample, k, a in passes))
    state = apply(transit_op(t, state.ids), state)
    return measure_homodyne(state, beam, "x", policy, step_index)


def thermal_pair(n1: float, n2: float) -> GaussianState:
    return tensor(thermal_state(atomic("A1"), n1), thermal_state(atomic("A2"), n2))


def epr_threshold(n1: float, n2: float) -> Optional[float]:
    """Smallest coupling at which the single-beam EPR state violates the Duan bound.

    ``None`` when no coupling works (``n1 + n2 >= 4``).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError(f"thermal occupations must be >= 1, got {n1}, {n2}")
    total = n1 + n2
    if total >= 4:
        return None
    return math.sqrt(2) * math.sqrt(total - 2) / math.sqrt((4 - total) * total)


def enhanced_threshold(n1: float, n2: float) -> float:
    if n1 < 1 or n2 < 1:
        raise ValueError(f"thermal occupations must be >= 1, got {n1}, {n2}")
    total = n1 + n2
    return math.sqrt((total - 2) / (2 * total))


def _pair_reports(state: GaussianState) -> dict:
    out = {}
    out.update(reports.variance_report(state, [("p", "A1", 1.0), ("p", "A2", 1.0)]))
    out.update(reports.variance_report(state, [("x", "A1", 1.0), ("x", "A2", -1.0)]))
    out.update(reports.duan_report(state, ("A1", "A2"), 1.0))
    out.update(reports.ppt_report(state, Bipartition.of(["A1"], ["A2"])))
    return out


def run_epr(n1: float, n2: float, kappa: float, outcome: OutcomePolicy = ZERO) -> ProtocolResult:
    """One beam through both samples at normal incidence, then an x measurement."""
    state = thermal_pair(n1, n2)
    state, rec = beam_step(state, [("A1", kappa, 0.0), ("A2", kappa, 0.0)], outcome, 0)
    return ProtocolResult(state, [rec], _pair_reports(state))


def run_epr_enhanced(n1: float, n2: float, kappa: float, outcomes=None) -> ProtocolResult:
    """EPR generation followed by a second beam at +-90 degrees squeezing ``x1 - x2``."""
    first, second = _outcomes(outcomes, 2)
    state = thermal_pair(n1, n2)
    state, r1 = beam_step(state, [("A1", kappa, 0.0), ("A2", kappa, 0.0)], first, 0)
    half = math.pi / 2
    state, r2 = beam_step(state, [("A1", kappa, half), ("A2", kappa, -half)], second, 1)
    out = _pair_reports(state)
    out["threshold"] = enhanced_threshold(n1, n2)
    return ProtocolResult(state, [r1, r2], out)


def eraser_eta(kappa: float) -> float:
    """Second-beam coupling that undoes the EPR correlations of vacuum inputs."""
    return abs(kappa) / math.sqrt(1 + 2 * kappa**2)


def run_eraser(kappa: float, eta: float, outcomes=None) -> ProtocolResult:
    """EPR generation from vacuum, then a second beam at +90 degrees on both samples."""
    first, second = _outcomes(outcomes, 2)
    state = thermal_pair(1.0, 1.0)
    state, r1 = beam_step(state, [("A1", kappa, 0.0), ("A2", kappa, 0.0)], first, 0)
    half = math.pi / 2
    state, r2 = beam_step(state, [("A1", eta, half), ("A2", eta, half)], second, 1)
    return ProtocolResult(state, [r1, r2], _pair_reports(state))


CLUSTER_MODES = ("A1", "A2", "A3", "A4")


def cluster_passes(center: int, kappa: float, n_modes: int = 4) -> list[tuple[str, float, float]]:
    """Passes squeezing ``p'_center - sum_neighbours x'_b`` on a linear chain.

    In the primed frame ``p cos(pi/4) + x sin(pi/4) = p'`` and
    ``p cos(-pi/4) + x sin(-pi/4) = -x'``.
    """
    ids = [f"A{k + 1}" for k in range(n_modes)]
    passes = [(ids[center], kappa, math.pi / 4)]
    for b in (center - 1, center + 1):
        if 0 <= b < n_modes:
            passes.append((ids[b], kappa, -math.pi / 4))
    return passes


def cluster_variance_terms() -> dict[str, list[tuple[str, str, float]]]:
    return {
        "p1-x2": [("p", "A1", 1.0), ("x", "A2", -1.0)],
        "p2-x1-x3": [("p", "A2", 1.0), ("x", "A1", -1.0), ("x", "A3", -1.0)],
        "p3-x2-x4": [("p", "A3", 1.0), ("x", "A2", -1.0), ("x", "A4", -1.0)],
        "p4-x3": [("p", "A4", 1.0), ("x", "A3", -1.0)],
    }


def run_cluster(kappa: float, outcomes=None, order: Sequence[int] = (0, 1, 2, 3)) -> ProtocolResult:
    """Four beams building the linear cluster; the final state is in the primed frame."""
    policies = _outcomes(outcomes, 4)
    if sorted(order) != [0, 1, 2, 3]:
        raise ValueError(f"order must be a permutation of 0..3, got {order}")
    state = vacuum_state([atomic(m) for m in CLUSTER_MODES])
    records = []
    for step, center in enumerate(order):
        state, rec = beam_step(state, cluster_passes(center, kappa), policies[step], step)
        records.append(rec)
    state = rotate_frame(FrameRotation(CLUSTER_MODES, Direction.TO_PRIMED), state)

    out = {}
    for terms in cluster_variance_terms().values():
        out.update(reports.variance_report(state, terms))
    for name in ("delta1", "delta2", "delta3"):
        out.update(reports.vlf_report(state, name))
    for part in all_bipartitions(state.ids):
        out.update(reports.ppt_report(state, part))
    return ProtocolResult(state, records, out)


# --- sweeps ---------------------------------------------------------------

PROTOCOLS: dict[str, tuple[Callable[..., ProtocolResult], dict[str, float]]] = {
    "epr": (run_epr, {"n1": 1.0, "n2": 1.0, "kappa": 1.0}),
    "epr_enhanced": (run_epr_enhanced, {"n1": 1.0, "n2": 1.0, "kappa": 1.0}),
    "eraser": (run_eraser, {"kappa": 1.0, "eta": 1.0}),
    "cluster": (run_cluster, {"kappa": 1.0}),
}

SWEEP_PARAMETERS = ("kappa", "eta", "n1", "n2")


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    step: float
    observables: tuple[str, ...] = ()

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"unknown sweep parameter {self.parameter!r}")
        if not self.step > 0:
            raise ValueError(f"sweep step must be positive, got {self.step}")
        object.__setattr__(self, "observables", tuple(self.observables))

    def grid(self) -> list[float]:
        return grid_points(self.start, self.stop, self.step)


def grid_points(start: float, stop: float, step: float) -> list[float]:
    """Points ``start + i * step`` up to ``stop`` (inclusive); empty when ``start > stop``."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if start > stop:
        return []
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


@dataclass
class Table:
    columns: list[str]
    rows: list[list[float]]

    def column(self, name: str) -> np.ndarray:
        return np.array([row[self.columns.index(name)] for row in self.rows], dtype=float)


def sweep(protocol: str, spec: SweepSpec, fixed: Mapping[str, float] | None = None) -> Table:
    """Run ``protocol`` once per grid point and collect the requested report values."""
    try:
        fn, defaults = PROTOCOLS[protocol]
    except KeyError:
        raise ValueError(f"unknown protocol {protocol!r}") from None
    params = dict(defaults)
    params.update(fixed or {})
    unknown = set(params) - set(defaults)
    if spec.parameter not in defaults or unknown:
        raise ValueError(f"protocol {protocol!r} takes parameters {sorted(defaults)}")

    table = Table([spec.parameter, *spec.observables], [])
    for value in spec.grid():
        params[spec.parameter] = value
        result = fn(**params)
        row = [value]
        for name in spec.observables:
            if name not in result.reports:
                raise KeyError(f"unknown observable {name!r} for protocol {protocol!r}")
            row.append(float(result.reports[name]))
        table.rows.append(row)
    return table


def bisect_threshold(fn: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-9) -> float:
    """Root of ``fn`` in ``[lo, hi]`` by bisection; ``fn`` must change sign on the bracket."""
    return bisect(fn, lo, hi, xtol=xtol)
