"""Run a parsed scenario against the library."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

from .. import reports
from ..dynamics import FrameRotation, PassSpec, Transit, apply, rotate_frame, transit_op
from ..entanglement import Bipartition, VarianceCriterion
from ..errors import CVFaradayError
from ..gaussian import GaussianState, atomic, light, select_modes, tensor, thermal_state, vacuum_state
from ..homodyne import OutcomePolicy, measure_homodyne
from ..protocols import ProtocolResult, Table
from .ast import (
    Beam,
    Ensemble,
    Measure,
    Param,
    Pass,
    ReportDuan,
    ReportPPT,
    ReportState,
    ReportVariance,
    ReportVLF,
    Rotate,
    Scenario,
    Span,
    Sweep,
)


class ScenarioRuntimeError(Exception):
    def __init__(self, message: str, span: Optional[Span] = None):
        self.message = message
        self.span = span
        prefix = f"line {span.line}, column {span.column}: " if span else ""
        super().__init__(prefix + message)


def resolve_params(ast: Scenario, overrides: Optional[Mapping[str, float]] = None) -> dict[str, float]:
    params = {name: num.resolve({}) for name, num in ast.params.items()}
    for name, value in (overrides or {}).items():
        if name not in params:
            raise ScenarioRuntimeError(f"unknown parameter {name!r}; declare it with 'param {name}=...'")
        params[name] = float(value)
    return params


def _append(state: Optional[GaussianState], new: GaussianState) -> GaussianState:
    return new if state is None else tensor(state, new)


def _report(state: GaussianState, node) -> dict:
    if isinstance(node, ReportPPT):
        return reports.ppt_report(state, Bipartition.of(node.side_a, node.side_b), node.name)
    if isinstance(node, ReportVariance):
        return reports.variance_report(state, node.terms, node.name)
    if isinstance(node, ReportVLF):
        if node.criterion != "custom":
            modes = node.modes or state.ids
            sub = state if tuple(modes) == state.ids else select_modes(state, modes)
            return reports.vlf_report(sub, node.criterion, node.name)
        h = dict(node.h)
        g = dict(node.g)
        index = {mode_id: i for i, mode_id in enumerate(state.ids)}
        criterion = VarianceCriterion(
            h=[h.get(m, 0.0) for m in state.ids],
            g=[g.get(m, 0.0) for m in state.ids],
            l=index[node.l],
            m=index[node.m],
            group_l=frozenset(index[m] for m in node.group_l),
            group_m=frozenset(index[m] for m in node.group_m),
            exchanged=frozenset(index[m] for m in node.swap),
        )
        return reports.vlf_report(state, criterion, node.name)
    raise TypeError(f"not a scalar report: {node!r}")


def execute(
    ast: Scenario, seed: int = 0, params: Optional[Mapping[str, float]] = None
) -> ProtocolResult:
    """Apply the scenario's statements in order and evaluate reports where they appear.

    Consecutive ``pass`` lines of one beam form a single transit. Outcomes of
    ``measure ... sample`` are drawn from ``seed`` and the measurement index.
    """
    values = resolve_params(ast, params)
    state: Optional[GaussianState] = None
    result = ProtocolResult(final_state=None)
    statements = ast.statements
    i = 0
    n_measured = 0
    while i < len(statements):
        node = statements[i]
        i += 1
        try:
            if isinstance(node, Ensemble):
                state = _append(state, thermal_state(atomic(node.id), node.n.resolve(values)))
            elif isinstance(node, Beam):
                state = _append(state, vacuum_state([light(node.id)]))
            elif isinstance(node, Pass):
                group = [node]
                while (
                    i < len(statements)
                    and isinstance(statements[i], Pass)
                    and statements[i].beam == node.beam
                ):
                    group.append(statements[i])
                    i += 1
                t = Transit(tuple(
                    PassSpec(p.beam, p.sample, p.kappa.resolve(values), p.alpha.resolve(values))
                    for p in group
                ))
                state = apply(transit_op(t, state.ids), state)
            elif isinstance(node, Measure):
                policy = (
                    OutcomePolicy.sampled(seed)
                    if node.fixed is None
                    else OutcomePolicy.fixed(node.fixed.resolve(values))
                )
                state, record = measure_homodyne(state, node.beam, node.quad, policy, n_measured)
                result.records.append(record)
                n_measured += 1
            elif isinstance(node, Rotate):
                state = rotate_frame(FrameRotation(node.targets, node.direction), state)
            elif isinstance(node, ReportState):
                result.snapshots.append((node.name or f"state{len(result.snapshots)}", state))
            elif isinstance(node, (ReportPPT, ReportDuan, ReportVariance, ReportVLF)):
                if isinstance(node, ReportDuan):
                    new = reports.duan_report(
                        state, (node.first, node.second), node.lam.resolve(values), node.name
                    )
                else:
                    new = _report(state, node)
                clash = set(new) & set(result.reports)
                if clash:
                    raise ScenarioRuntimeError(
                        f"duplicate report name {sorted(clash)[0]!r}; rename with as=", node.span
                    )
                result.reports.update(new)
            elif isinstance(node, (Param, Sweep)):
                pass
        except ScenarioRuntimeError:
            raise
        except (CVFaradayError, ValueError, KeyError) as exc:
            raise ScenarioRuntimeError(str(exc), node.span) from exc
    result.final_state = state
    return result


def sweep_spec(ast: Scenario) -> Optional[Sweep]:
    sweeps = ast.sweeps
    return sweeps[-1] if sweeps else None


def run_sweep(
    ast: Scenario,
    parameter: str,
    grid: Sequence[float],
    seed: int = 0,
    observables: Sequence[str] = (),
    params: Optional[Mapping[str, float]] = None,
) -> Table:
    """Execute the scenario once per grid value of ``parameter``; one row per point."""
    values = dict(params or {})
    columns = list(observables)
    table = Table([parameter], [])
    for k, value in enumerate(grid):
        values[parameter] = value
        result = execute(ast, seed, values)
        if k == 0:
            if not columns:
                columns = list(result.reports)
            table.columns += columns
        row = [value]
        for name in columns:
            if name not in result.reports:
                raise ScenarioRuntimeError(f"unknown observable {name!r}")
            row.append(float(result.reports[name]))
        table.rows.append(row)
    if not table.rows:
        table.columns += columns
    return table
