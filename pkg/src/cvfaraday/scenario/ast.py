"""Syntax tree of the scenario language and its canonical printer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union


@dataclass(frozen=True)
class Span:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Num:
    """Numeric literal or ``$name`` parameter reference, kept as source text."""

    text: str

    @property
    def param(self) -> Optional[str]:
        return self.text[1:] if self.text.startswith("$") else None

    def resolve(self, params: Mapping[str, float]) -> float:
        if self.param is not None:
            return float(params[self.param])
        return float(self.text)

    def __str__(self) -> str:
        return self.text


_EXACT_ANGLES = {
    "pi": math.pi,
    "-pi": -math.pi,
    "pi/2": math.pi / 2,
    "-pi/2": -(math.pi / 2),
    "pi/4": math.pi / 4,
    "-pi/4": -(math.pi / 4),
}


@dataclass(frozen=True)
class Angle:
    """Angle in radians; also ``<num>deg``, ``[-]pi``, ``[-]pi/2``, ``[-]pi/4`` or ``$name``."""

    text: str

    def resolve(self, params: Mapping[str, float]) -> float:
        if self.text in _EXACT_ANGLES:
            return _EXACT_ANGLES[self.text]
        if self.text.endswith("deg"):
            return math.radians(float(self.text[:-3]))
        return Num(self.text).resolve(params)

    @property
    def param(self) -> Optional[str]:
        return None if self.text.endswith("deg") else Num(self.text).param

    def __str__(self) -> str:
        return self.text


def _suffix(name: Optional[str]) -> str:
    return f" as={name}" if name else ""


@dataclass(frozen=True)
class Param:
    name: str
    value: Num
    span: Span = _span()

    def __str__(self):
        return f"param {self.name}={self.value}"


@dataclass(frozen=True)
class Ensemble:
    id: str
    n: Num
    span: Span = _span()

    def __str__(self):
        return f"ensemble {self.id} n={self.n}"


@dataclass(frozen=True)
class Beam:
    id: str
    span: Span = _span()

    def __str__(self):
        return f"beam {self.id}"


@dataclass(frozen=True)
class Pass:
    beam: str
    sample: str
    kappa: Num
    alpha: Angle
    span: Span = _span()

    def __str__(self):
        return f"pass {self.beam} {self.sample} kappa={self.kappa} alpha={self.alpha}"


@dataclass(frozen=True)
class Measure:
    beam: str
    quad: str
    fixed: Optional[Num] = None
    span: Span = _span()

    def __str__(self):
        policy = "sample" if self.fixed is None else f"fixed={self.fixed}"
        return f"measure {self.beam} {self.quad} {policy}"


@dataclass(frozen=True)
class Rotate:
    direction: str
    targets: tuple[str, ...]
    span: Span = _span()

    def __str__(self):
        return f"rotate {self.direction} {' '.join(self.targets)}"


@dataclass(frozen=True)
class ReportState:
    name: Optional[str] = None
    span: Span = _span()

    def __str__(self):
        return "report state" + _suffix(self.name)


@dataclass(frozen=True)
class ReportPPT:
    side_a: tuple[str, ...]
    side_b: tuple[str, ...]
    name: Optional[str] = None
    span: Span = _span()

    def __str__(self):
        return f"report ppt {','.join(self.side_a)}|{','.join(self.side_b)}" + _suffix(self.name)


@dataclass(frozen=True)
class ReportDuan:
    first: str
    second: str
    lam: Num
    name: Optional[str] = None
    span: Span = _span()

    def __str__(self):
        return f"report duan {self.first} {self.second} lambda={self.lam}" + _suffix(self.name)


@dataclass(frozen=True)
class ReportVariance:
    terms: tuple[tuple[str, str, float], ...]
    name: Optional[str] = None
    span: Span = _span()

    def __str__(self):
        from ..reports import format_terms

        return f"report variance {format_terms(self.terms)}" + _suffix(self.name)


@dataclass(frozen=True)
class ReportVLF:
    """Named cluster criterion (``delta1``..``delta3``) or an explicit one (``custom``)."""

    criterion: str
    modes: tuple[str, ...] = ()
    h: tuple[tuple[str, float], ...] = ()
    g: tuple[tuple[str, float], ...] = ()
    l: Optional[str] = None
    m: Optional[str] = None
    group_l: tuple[str, ...] = ()
    group_m: tuple[str, ...] = ()
    swap: tuple[str, ...] = ()
    name: Optional[str] = None
    span: Span = _span()

    def __str__(self):
        parts = ["report vlf", self.criterion]
        if self.criterion != "custom":
            parts.extend(self.modes)
        else:
            coeffs = lambda pairs: ",".join(f"{m}:{c:.17g}" for m, c in pairs)
            parts += [f"h={coeffs(self.h)}", f"g={coeffs(self.g)}", f"l={self.l}", f"m={self.m}"]
            if self.group_l:
                parts.append("gl=" + ",".join(self.group_l))
            if self.group_m:
                parts.append("gm=" + ",".join(self.group_m))
            if self.swap:
                parts.append("swap=" + ",".join(self.swap))
        return " ".join(parts) + _suffix(self.name)


@dataclass(frozen=True)
class Sweep:
    parameter: str
    start: Num
    stop: Num
    step: Num
    observables: tuple[str, ...] = ()
    span: Span = _span()

    def __str__(self):
        head = f"sweep {self.parameter} {self.start}:{self.stop}:{self.step}"
        return " ".join([head, *self.observables])


Declaration = Union[Ensemble, Beam]
Step = Union[Pass, Measure, Rotate]
Report = Union[ReportState, ReportPPT, ReportDuan, ReportVariance, ReportVLF]
Statement = Union[Param, Declaration, Step, Report, Sweep]

REPORT_TYPES = (ReportState, ReportPPT, ReportDuan, ReportVariance, ReportVLF)


@dataclass(frozen=True)
class Scenario:
    statements: tuple[Statement, ...] = ()

    @property
    def params(self) -> dict[str, Num]:
        return {s.name: s.value for s in self.statements if isinstance(s, Param)}

    @property
    def declarations(self) -> list[Declaration]:
        return [s for s in self.statements if isinstance(s, (Ensemble, Beam))]

    @property
    def steps(self) -> list[Step]:
        return [s for s in self.statements if isinstance(s, (Pass, Measure, Rotate))]

    @property
    def reports(self) -> list[Report]:
        return [s for s in self.statements if isinstance(s, REPORT_TYPES)]

    @property
    def sweeps(self) -> list[Sweep]:
        return [s for s in self.statements if isinstance(s, Sweep)]


def pretty_print(ast: Scenario) -> str:
    """Canonical text of ``ast``; ``parse(pretty_print(ast)) == ast``."""
    return "".join(f"{stmt}\n" for stmt in ast.statements)
