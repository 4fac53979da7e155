"""Named scalar reports shared by the protocols and the scenario runner.

Both paths build report names and values through these helpers, which keeps
their outputs identical key-for-key and bit-for-bit.
"""

from __future__ import annotations

from typing import Sequence

from .entanglement import (
    CLUSTER_CRITERIA,
    Bipartition,
    VarianceCriterion,
    duan_sum,
    ppt_test,
    vlf_test,
)
from .gaussian import GaussianState, quadrature_vector, variance_of


def _coeff(c: float) -> str:
    return f"{c:.17g}"


def format_terms(terms: Sequence[tuple[str, str, float]]) -> str:
    """``[("p", "A1", 1), ("x", "A2", -1)]`` -> ``"p:A1-x:A2"``."""
    parts = []
    for i, (quad, mode_id, c) in enumerate(terms):
        sign = "-" if c < 0 else ("+" if i else "")
        mag = abs(c)
        body = f"{quad}:{mode_id}" if mag == 1 else f"{_coeff(mag)}*{quad}:{mode_id}"
        parts.append(sign + body)
    return "".join(parts)


def variance_name(terms) -> str:
    return f"var({format_terms(terms)})"


def partition_tag(part: Bipartition) -> str:
    return "+".join(sorted(part.side_a)) + "|" + "+".join(sorted(part.side_b))


def variance_report(s: GaussianState, terms, name: str | None = None) -> dict:
    return {name or variance_name(terms): variance_of(s, quadrature_vector(s, terms))}


def duan_report(s: GaussianState, pair: tuple[str, str], lam: float, name: str | None = None) -> dict:
    return {name or f"duan_lambda{lam:g}": duan_sum(s, pair, lam)}


def ppt_report(s: GaussianState, part: Bipartition, name: str | None = None) -> dict:
    base = name or f"ppt({partition_tag(part)})"
    verdict = ppt_test(s, part)
    return {
        f"{base}.min_eig": verdict.min_pt_symplectic_eig,
        f"{base}.logneg": verdict.log_negativity,
        f"{base}.entangled": verdict.entangled,
    }


def vlf_report(
    s: GaussianState, criterion: str | VarianceCriterion, name: str | None = None
) -> dict:
    if isinstance(criterion, str):
        base = name or criterion
        criterion = CLUSTER_CRITERIA[criterion]
    else:
        base = name or "vlf"
    result = vlf_test(s, criterion)
    return {base: result.lhs, f"{base}.entangled": result.entangled}
