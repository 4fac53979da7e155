"""Line-oriented parser for scenario files.

One statement per line, ``#`` starts a comment::

    param kappa=1
    ensemble A1 n=1
    beam L
    pass L A1 kappa=$kappa alpha=pi/4
    measure L x fixed=0
    rotate to_primed A1
    report ppt A1|A2
    sweep kappa 0:2:0.01

Parsing is total: any input yields either a :class:`Scenario` or a
:class:`ParseError` carrying the line, column and offending token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

from .ast import (
    Angle,
    Beam,
    Ensemble,
    Measure,
    Num,
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

ID_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
NUM_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
PARAM_RE = re.compile(r"\$[A-Za-z_][A-Za-z0-9_]*\Z")
TOKEN_CHARS = re.compile(r"[A-Za-z0-9_.:+\-*/=$,|']+\Z")
TERM_RE = re.compile(
    r"([+-]?)(?:((?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)\*)?([xp]):([A-Za-z_][A-Za-z0-9_]*)"
)
EXACT_ANGLES = {"pi", "-pi", "pi/2", "-pi/2", "pi/4", "-pi/4"}
VLF_NAMES = {
    "delta1": "delta1", "delta2": "delta2", "delta3": "delta3",
    "Δ1": "delta1", "Δ2": "delta2", "Δ3": "delta3",
}
MAX_INPUT = 1 << 20


class ParseError(Exception):
    def __init__(self, message: str, span: Span, token: str = ""):
        self.message = message
        self.span = span
        self.token = token
        where = f"line {span.line}, column {span.column}"
        super().__init__(f"{where}: {message}" + (f" (at {token!r})" if token else ""))


@dataclass
class _Token:
    text: str
    span: Span


def _tokenize(line: str, lineno: int) -> list[_Token]:
    tokens = []
    for match in re.finditer(r"\S+", line):
        text = match.group()
        span = Span(lineno, match.start() + 1)
        if text in ("Δ1", "Δ2", "Δ3"):
            text = VLF_NAMES[text]
        elif not TOKEN_CHARS.match(text):
            bad = next(ch for ch in text if not TOKEN_CHARS.match(ch))
            raise ParseError(f"unexpected character {bad!r}", Span(lineno, match.start() + 1 + text.index(bad)), text)
        tokens.append(_Token(text, span))
    return tokens


class _Line:
    """Cursor over the tokens of one statement."""

    def __init__(self, tokens: list[_Token], lineno: int):
        self.tokens = tokens
        self.pos = 1
        self.lineno = lineno

    @property
    def head(self) -> _Token:
        return self.tokens[0]

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        if tok is None:
            if self.pos < len(self.tokens):
                tok = self.tokens[self.pos]
            else:
                last = self.tokens[-1]
                return ParseError(message, Span(last.span.line, last.span.column + len(last.text)))
        return ParseError(message, tok.span, tok.text)

    def more(self) -> bool:
        return self.pos < len(self.tokens)

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.pos] if self.more() else None

    def next(self, what: str) -> _Token:
        if not self.more():
            raise self.error(f"expected {what}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def ident(self, what: str = "identifier") -> str:
        tok = self.next(what)
        if not ID_RE.match(tok.text):
            raise self.error(f"expected {what}", tok)
        return tok.text

    def keyword(self, *choices: str) -> str:
        tok = self.next(" or ".join(repr(c) for c in choices))
        if tok.text not in choices:
            raise self.error(f"expected one of {', '.join(choices)}", tok)
        return tok.text

    def keyed(self, key: str) -> tuple[str, _Token]:
        tok = self.next(f"{key}=<value>")
        if not tok.text.startswith(key + "="):
            raise self.error(f"expected {key}=<value>", tok)
        return tok.text[len(key) + 1:], tok

    def num(self, key: str, allow_param: bool = True) -> Num:
        text, tok = self.keyed(key)
        return self.check_num(text, tok, allow_param)

    def check_num(self, text: str, tok: _Token, allow_param: bool = True) -> Num:
        if (NUM_RE.match(text) and _finite(text)) or (allow_param and PARAM_RE.match(text)):
            return Num(text)
        raise self.error(f"expected a number, got {text!r}", tok)

    def name_suffix(self) -> Optional[str]:
        tok = self.peek()
        if tok is not None and tok.text.startswith("as="):
            self.pos += 1
            name = tok.text[3:]
            if not name or not re.fullmatch(r"[A-Za-z0-9_.()|+\-:]+", name):
                raise self.error("invalid report name", tok)
            return name
        return None

    def end(self) -> None:
        if self.more():
            raise self.error("unexpected extra token")


def _id_list(text: str, cur: _Line, tok: _Token, allow_empty: bool = False) -> tuple[str, ...]:
    if not text and allow_empty:
        return ()
    ids = tuple(text.split(","))
    for mode_id in ids:
        if not ID_RE.match(mode_id):
            raise cur.error(f"invalid mode id {mode_id!r}", tok)
    return ids


def _single_id(text: str, cur: _Line, tok: _Token) -> str:
    if not ID_RE.match(text):
        raise cur.error(f"expected a single mode id, got {text!r}", tok)
    return text


def _finite(text: str) -> bool:
    return math.isfinite(float(text))


def _parse_terms(text: str, cur: _Line, tok: _Token) -> tuple[tuple[str, str, float], ...]:
    terms = []
    pos = 0
    while pos < len(text):
        match = TERM_RE.match(text, pos)
        if not match or (pos > 0 and not match.group(1)):
            raise cur.error("malformed quadrature combination (expected e.g. p:A1+p:A2)", tok)
        sign, coeff, quad, mode_id = match.groups()
        if coeff and not _finite(coeff):
            raise cur.error("coefficient overflows", tok)
        value = float(coeff) if coeff else 1.0
        terms.append((quad, mode_id, -value if sign == "-" else value))
        pos = match.end()
    if not terms:
        raise cur.error("empty quadrature combination", tok)
    return tuple(terms)


def _parse_coeffs(text: str, cur: _Line, tok: _Token) -> tuple[tuple[str, float], ...]:
    pairs = []
    for item in text.split(","):
        mode_id, sep, value = item.partition(":")
        if not sep or not ID_RE.match(mode_id) or not NUM_RE.match(value) or not _finite(value):
            raise cur.error(f"expected <mode>:<number>, got {item!r}", tok)
        pairs.append((mode_id, float(value)))
    return tuple(pairs)


def _parse_angle(cur: _Line) -> Angle:
    text, tok = cur.keyed("alpha")
    if text in EXACT_ANGLES:
        return Angle(text)
    if text.endswith("deg"):
        cur.check_num(text[:-3], tok, allow_param=False)
    else:
        cur.check_num(text, tok)
    return Angle(text)


def _parse_report(cur: _Line):
    kind = cur.keyword("state", "ppt", "duan", "vlf", "variance")
    span = cur.head.span
    if kind == "state":
        node = ReportState(cur.name_suffix(), span=span)
    elif kind == "ppt":
        tok = cur.next("partition <ids>|<ids>")
        a, sep, b = tok.text.partition("|")
        if not sep:
            raise cur.error("expected partition of the form A1,A2|A3", tok)
        node = ReportPPT(_id_list(a, cur, tok), _id_list(b, cur, tok), cur.name_suffix(), span=span)
    elif kind == "duan":
        first = cur.ident("mode id")
        second = cur.ident("mode id")
        node = ReportDuan(first, second, cur.num("lambda"), cur.name_suffix(), span=span)
    elif kind == "variance":
        tok = cur.next("quadrature combination")
        node = ReportVariance(_parse_terms(tok.text, cur, tok), cur.name_suffix(), span=span)
    else:
        node = _parse_vlf(cur, span)
    cur.end()
    return node


def _parse_vlf(cur: _Line, span: Span) -> ReportVLF:
    tok = cur.next("criterion name")
    if tok.text in VLF_NAMES:
        modes = []
        while cur.more() and not cur.peek().text.startswith("as="):
            modes.append(cur.ident("mode id"))
        return ReportVLF(VLF_NAMES[tok.text], tuple(modes), name=cur.name_suffix(), span=span)
    if tok.text != "custom":
        raise cur.error("unknown criterion (expected delta1, delta2, delta3 or custom)", tok)
    h_text, h_tok = cur.keyed("h")
    g_text, g_tok = cur.keyed("g")
    l_text, l_tok = cur.keyed("l")
    m_text, m_tok = cur.keyed("m")
    fields = {}
    while cur.more() and not cur.peek().text.startswith("as="):
        opt = cur.next("option")
        key, sep, value = opt.text.partition("=")
        if not sep or key not in ("gl", "gm", "swap") or key in fields:
            raise cur.error("expected gl=, gm= or swap=", opt)
        fields[key] = _id_list(value, cur, opt)
    return ReportVLF(
        "custom",
        h=_parse_coeffs(h_text, cur, h_tok),
        g=_parse_coeffs(g_text, cur, g_tok),
        l=_single_id(l_text, cur, l_tok),
        m=_single_id(m_text, cur, m_tok),
        group_l=fields.get("gl", ()),
        group_m=fields.get("gm", ()),
        swap=fields.get("swap", ()),
        name=cur.name_suffix(),
        span=span,
    )


def _parse_statement(cur: _Line):
    head = cur.head
    span = head.span
    kw = head.text
    if kw == "param":
        tok = cur.next("name=<number>")
        name, sep, value = tok.text.partition("=")
        if not sep or not ID_RE.match(name):
            raise cur.error("expected name=<number>", tok)
        node = Param(name, cur.check_num(value, tok, allow_param=False), span=span)
    elif kw == "ensemble":
        node = Ensemble(cur.ident("ensemble id"), cur.num("n"), span=span)
    elif kw == "beam":
        node = Beam(cur.ident("beam id"), span=span)
    elif kw == "pass":
        beam = cur.ident("beam id")
        sample = cur.ident("sample id")
        kappa = cur.num("kappa")
        node = Pass(beam, sample, kappa, _parse_angle(cur), span=span)
    elif kw == "measure":
        beam = cur.ident("beam id")
        quad = cur.keyword("x", "p")
        tok = cur.next("fixed=<number> or sample")
        if tok.text == "sample":
            fixed = None
        elif tok.text.startswith("fixed="):
            fixed = cur.check_num(tok.text[6:], tok)
        else:
            raise cur.error("expected fixed=<number> or sample", tok)
        node = Measure(beam, quad, fixed, span=span)
    elif kw == "rotate":
        direction = cur.keyword("to_primed", "from_primed")
        targets = []
        while cur.more():
            targets.append(cur.ident("mode id"))
        if not targets:
            raise cur.error("rotate needs at least one mode")
        node = Rotate(direction, tuple(targets), span=span)
    elif kw == "report":
        return _parse_report(cur)
    elif kw == "sweep":
        param = cur.ident("parameter name")
        tok = cur.next("range start:stop:step")
        parts = tok.text.split(":")
        if len(parts) != 3:
            raise cur.error("expected range start:stop:step", tok)
        start, stop, step = (cur.check_num(p, tok, allow_param=False) for p in parts)
        if not float(step.text) > 0:
            raise cur.error("sweep step must be positive", tok)
        observables = []
        while cur.more():
            observables.append(cur.next("observable").text)
        node = Sweep(param, start, stop, step, tuple(observables), span=span)
    else:
        raise ParseError(f"unknown keyword {kw!r}", span, kw)
    cur.end()
    return node


class _Checker:
    """Declaration-before-use and beam-lifetime rules."""

    def __init__(self):
        self.live: dict[str, str] = {}
        self.measured: set[str] = set()
        self.params: set[str] = set()
        self.transit_beam: Optional[str] = None
        self.transit_samples: set[str] = set()

    def num(self, value, span: Span) -> None:
        param = getattr(value, "param", None)
        if param is not None and param not in self.params:
            raise ParseError(f"use of undeclared parameter ${param}", span, value.text)

    def use(self, mode_id: str, span: Span, kind: Optional[str] = None) -> None:
        if mode_id not in self.live:
            if mode_id in self.measured:
                raise ParseError(f"beam {mode_id!r} was measured and must be re-declared", span, mode_id)
            raise ParseError(f"use of undeclared mode {mode_id!r}", span, mode_id)
        if kind and self.live[mode_id] != kind:
            raise ParseError(f"mode {mode_id!r} is not {kind}", span, mode_id)

    def declare(self, mode_id: str, kind: str, span: Span) -> None:
        if mode_id in self.live:
            raise ParseError(f"mode {mode_id!r} is already declared", span, mode_id)
        self.live[mode_id] = kind
        self.measured.discard(mode_id)

    def cover(self, ids, span: Span, what: str) -> None:
        if set(ids) != set(self.live) or len(set(ids)) != len(ids):
            raise ParseError(f"{what} must list every live mode exactly once {sorted(self.live)}", span)

    def check(self, node) -> None:
        span = node.span
        if not isinstance(node, Pass):
            self.transit_beam = None
        if isinstance(node, Param):
            if node.name in self.params:
                raise ParseError(f"parameter {node.name!r} declared twice", span, node.name)
            self.params.add(node.name)
        elif isinstance(node, Ensemble):
            self.num(node.n, span)
            self.declare(node.id, "atomic", span)
        elif isinstance(node, Beam):
            self.declare(node.id, "light", span)
        elif isinstance(node, Pass):
            self.use(node.beam, span, "light")
            self.use(node.sample, span, "atomic")
            self.num(node.kappa, span)
            self.num(node.alpha, span)
            if self.transit_beam != node.beam:
                self.transit_beam, self.transit_samples = node.beam, set()
            if node.sample in self.transit_samples:
                raise ParseError(f"sample {node.sample!r} crossed twice by one transit", span, node.sample)
            self.transit_samples.add(node.sample)
        elif isinstance(node, Measure):
            self.use(node.beam, span, "light")
            if node.fixed is not None:
                self.num(node.fixed, span)
            if len(self.live) < 2:
                raise ParseError("measuring the only live mode", span, node.beam)
            del self.live[node.beam]
            self.measured.add(node.beam)
        elif isinstance(node, Rotate):
            for mode_id in node.targets:
                self.use(mode_id, span)
            if len(set(node.targets)) != len(node.targets):
                raise ParseError("duplicate rotation target", span)
        elif isinstance(node, Sweep):
            if node.parameter not in self.params:
                raise ParseError(f"sweep over undeclared parameter {node.parameter!r}", span, node.parameter)
        else:
            self.check_report(node)

    def check_report(self, node) -> None:
        span = node.span
        if not self.live:
            raise ParseError("report on an empty state", span)
        if isinstance(node, ReportPPT):
            if not node.side_a or not node.side_b:
                raise ParseError("both sides of a partition must be non-empty", span)
            self.cover(node.side_a + node.side_b, span, "partition")
        elif isinstance(node, ReportDuan):
            self.use(node.first, span)
            self.use(node.second, span)
            self.num(node.lam, span)
            if node.first == node.second:
                raise ParseError("duan needs two distinct modes", span)
            if node.lam.param is None and float(node.lam.text) == 0:
                raise ParseError("lambda must be non-zero", span, node.lam.text)
        elif isinstance(node, ReportVariance):
            for _, mode_id, _ in node.terms:
                self.use(mode_id, span)
        elif isinstance(node, ReportVLF):
            if node.criterion != "custom":
                modes = node.modes or tuple(self.live)
                for mode_id in modes:
                    self.use(mode_id, span)
                if len(modes) != 4 or len(set(modes)) != 4:
                    raise ParseError(f"{node.criterion} needs four distinct modes", span)
            else:
                ids = [m for m, _ in node.h + node.g] + [node.l, node.m]
                ids += list(node.group_l + node.group_m + node.swap)
                for mode_id in ids:
                    self.use(mode_id, span)
                self.cover((node.l, node.m) + node.group_l + node.group_m, span, "l, m, gl and gm")


def parse(text) -> Scenario:
    """Parse scenario source (``str`` or UTF-8 ``bytes``)."""
    if isinstance(text, (bytes, bytearray)):
        if len(text) > MAX_INPUT:
            raise ParseError("input larger than 1 MiB", Span(1, 1))
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = bytes(text)[: exc.start]
            line = prefix.count(b"\n") + 1
            column = exc.start - (prefix.rfind(b"\n") + 1) + 1
            raise ParseError("input is not valid UTF-8", Span(line, column)) from None
    elif len(text) > MAX_INPUT:
        raise ParseError("input larger than 1 MiB", Span(1, 1))

    statements = []
    checker = _Checker()
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].rstrip("\r")
        tokens = _tokenize(line, lineno)
        if not tokens:
            continue
        node = _parse_statement(_Line(tokens, lineno))
        checker.check(node)
        statements.append(node)
    return Scenario(tuple(statements))
