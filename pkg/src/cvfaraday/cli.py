"""Command line entry point: ``cvfaraday run | sweep | figures``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import CVFaradayError
from .figures import FIGURES
from .protocols import grid_points
from .scenario import ParseError, ScenarioRuntimeError, emit, execute, parse, run_sweep
from .scenario.execute import resolve_params, sweep_spec

EXIT_OK, EXIT_PARSE, EXIT_RUNTIME = 0, 1, 2


def _assignment(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    try:
        if not sep:
            raise ValueError
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NAME=NUMBER, got {text!r}") from None


def _range(text: str) -> tuple[float, float, float]:
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:STOP:STEP, got {text!r}") from None
    if not step > 0:
        raise argparse.ArgumentTypeError("range step must be positive")
    return start, stop, step


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvfaraday", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def output_options(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path, help="write here instead of stdout")

    def scenario_options(p):
        p.add_argument("file", type=Path, help="scenario file")
        p.add_argument("--seed", type=int, default=0, help="seed for sampled outcomes")
        p.add_argument("--set", dest="overrides", type=_assignment, action="append", default=[],
                       metavar="NAME=VALUE", help="override a declared param")
        output_options(p)

    run = sub.add_parser("run", help="execute a scenario once")
    scenario_options(run)

    sweep = sub.add_parser("sweep", help="execute a scenario over a parameter grid")
    scenario_options(sweep)
    sweep.add_argument("--param", help="param to sweep (default: the file's sweep line)")
    sweep.add_argument("--range", dest="grid", type=_range, metavar="START:STOP:STEP")
    sweep.add_argument("--observable", dest="observables", action="append", default=[],
                       help="report column to keep; repeatable")

    figures = sub.add_parser("figures", help="regenerate a plot dataset")
    figures.add_argument("figure", choices=sorted(FIGURES))
    output_options(figures)
    return parser


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out.write_bytes(data)


def _sweep(args, ast, params):
    spec = sweep_spec(ast)
    parameter = args.param or (spec.parameter if spec else None)
    if parameter is None:
        raise ScenarioRuntimeError("no sweep parameter: pass --param or add a sweep line")
    if args.grid is not None:
        start, stop, step = args.grid
    elif spec is not None and spec.parameter == parameter:
        resolved = resolve_params(ast, params)
        start, stop, step = (n.resolve(resolved) for n in (spec.start, spec.stop, spec.step))
    else:
        raise ScenarioRuntimeError("no sweep range: pass --range")
    observables = args.observables or (list(spec.observables) if spec else [])
    grid = grid_points(start, stop, step)
    return run_sweep(ast, parameter, grid, args.seed, observables, params)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "figures":
        _write(emit(FIGURES[args.figure](), args.format), args.out)
        return EXIT_OK
    try:
        ast = parse(args.file.read_bytes())
    except OSError as exc:
        print(f"cvfaraday: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
        return EXIT_RUNTIME
    except ParseError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_PARSE
    params = dict(args.overrides)
    try:
        if args.command == "run":
            data = emit(execute(ast, args.seed, params), args.format)
        else:
            data = emit(_sweep(args, ast, params), args.format)
    except (ScenarioRuntimeError, CVFaradayError, ValueError) as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_RUNTIME
    _write(data, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
