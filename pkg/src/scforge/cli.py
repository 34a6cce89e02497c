"""``scforge`` command line: validate, transform, simulate, equiv, verify, export.

Exit codes: 0 success (valid, equivalent, all properties hold), 1 a property
or equivalence failure, 2 usage or validation errors, 3 I/O errors.
Option defaults can be set through ``SCFORGE_<OPTION>`` environment
variables; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from importlib import resources
from pathlib import Path

from .automata import network_text
from .dsl import parse_network, validate
from .equivalence import check_model_equivalence, project, random_schedules
from .errors import DSLError, ScforgeError
from .export import ExportReport, write_queries, write_uppaal_xml
from .sc_semantics import EventEnv, parse_schedule, run
from .status import ExecutionTrace, SystemStatus
from .ta_semantics import ta_run
from .transform import transform_all, transform_stages
from .verify import DEFAULT_BUDGET, check_invariant, parse_properties

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FIXTURE_PREFIX = "fixture:"


class UsageError(Exception):
    pass


def _env(name: str, default, cast=str):
    raw = os.environ.get(f"SCFORGE_{name.upper()}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"SCFORGE_{name.upper()}={raw!r} is not a valid {cast.__name__}") from None


def read_text(path: str) -> str:
    """Read a file, or a packaged fixture when ``path`` is ``fixture:<name>``."""
    if path.startswith(FIXTURE_PREFIX):
        name = path[len(FIXTURE_PREFIX):]
        res = resources.files("scforge") / "fixtures" / name
        if not res.is_file():
            raise FileNotFoundError(f"no packaged fixture named {name!r}")
        return res.read_text(encoding="utf-8")
    return Path(path).read_text(encoding="utf-8")


def _load(path: str):
    net = parse_network(read_text(path))
    diags = validate(net)
    if diags:
        raise DSLError(diags)
    return net


def _emit(args, text: str, data) -> None:
    if args.format == "json":
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _positive(name: str):
    def check(raw: str) -> int:
        value = int(raw)
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} must be at least 1")
        return value
    return check


def _non_negative(raw: str) -> int:
    value = int(raw)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


# -- commands -----------------------------------------------------------------

def cmd_validate(args) -> int:
    net = parse_network(read_text(args.path))
    diags = validate(net)
    if args.format == "json":
        _emit(args, "", {"path": args.path, "valid": not diags, "diagnostics": [d.as_dict() for d in diags]})
    else:
        for d in diags:
            print(f"{args.path}:{d}", file=sys.stderr)
        if not diags:
            print(f"{args.path}: ok ({len(net.charts)} statecharts, {len(net.variables)} declarations)")
    return EXIT_OK if not diags else EXIT_USAGE


def cmd_transform(args) -> int:
    net = _load(args.path)
    stages, _ = transform_stages(net, args.skip_rule)
    text = network_text(stages[args.emit_stage - 1])
    _emit(args, text, {"stage": args.emit_stage, "text": text.splitlines()})
    return EXIT_OK


def _projected_trace(trace: ExecutionTrace, ta, tmap) -> ExecutionTrace:
    """Statechart-shaped view of a lockstep trace: chart images and source variables only."""
    keep = [i for i, m in enumerate(trace.marks) if i == 0 or m[1] != 0]
    views = project(trace, ta, tmap)
    statuses = [SystemStatus(v.states, v.valuation, trace.statuses[i].valuation[ta.alpha])
                for v, i in zip(views, keep)]
    labels = [trace.labels[i - 1] for i in keep[1:]]
    return ExecutionTrace(statuses, labels, [trace.marks[i] for i in keep],
                          tuple(c for c in tmap.charts))


def cmd_simulate(args) -> int:
    net = _load(args.path)
    schedule = parse_schedule(read_text(args.schedule)) if args.schedule else {}
    env = EventEnv(schedule, args.cycle_period)
    env.check(net)
    if args.side == "sc":
        trace = run(net, env, args.horizon)
    else:
        ta, tmap = transform_all(net)
        trace = ta_run(ta, env, args.horizon)
        if args.project:
            trace = _projected_trace(trace, ta, tmap)
    text = trace.dump()
    _emit(args, text, {"side": args.side, "horizon": args.horizon, "trace": text.splitlines()})
    return EXIT_OK


def cmd_equiv(args) -> int:
    net = _load(args.path)
    seed = args.seed if args.seed is not None else random.SystemRandom().randrange(2 ** 32)
    print(f"seed: {seed}", file=sys.stderr)
    ta, tmap = transform_all(net, args.skip_rule)
    schedules = random_schedules(net.events, args.horizon, args.schedules, seed)
    report = check_model_equivalence(net, ta, tmap, schedules, args.horizon, args.cycle_period,
                                     seed=seed, jobs=args.jobs)
    _emit(args, report.to_text(), report.as_dict())
    return EXIT_OK if report.equivalent else EXIT_FAIL


def cmd_verify(args) -> int:
    net = _load(args.path)
    props = parse_properties(read_text(args.props), net)
    results = [check_invariant(net, p, args.max_cycles, budget=args.budget,
                               cycle_period=args.cycle_period, side=args.side) for p in props]
    lines = []
    for r in results:
        verdict = "holds" if r.holds else "VIOLATED"
        extent = "fixpoint" if r.complete else f"bound {r.max_cycles} cycles"
        lines.append(f"{r.property.name}: {verdict} ({r.explored} statuses, {extent}, {r.side} side)")
        lines.append(f"  {r.property.query}")
        if r.counterexample is not None:
            lines += ["  " + l for l in r.counterexample.dump().splitlines()]
    _emit(args, "\n".join(lines) + "\n", {"results": [r.as_dict() for r in results]})
    return EXIT_OK if all(r.holds for r in results) else EXIT_FAIL


def _default_props(path: str) -> str | None:
    candidate = path[: -len(".scn")] + ".q" if path.endswith(".scn") else None
    if candidate is None:
        return None
    if candidate.startswith(FIXTURE_PREFIX):
        name = candidate[len(FIXTURE_PREFIX):]
        return candidate if (resources.files("scforge") / "fixtures" / name).is_file() else None
    return candidate if Path(candidate).is_file() else None


def cmd_export(args) -> int:
    net = _load(args.path)
    ta, tmap = transform_all(net)
    report = ExportReport()
    xml = write_uppaal_xml(ta, tmap, report)
    props_path = args.props or _default_props(args.path)
    queries = write_queries(parse_properties(read_text(props_path), net)) if props_path else ""
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "model.xml").write_text(xml, encoding="utf-8")
    (out / "queries.q").write_text(queries, encoding="utf-8")
    for u in report.unsupported:
        print(f"WARN {u}", file=sys.stderr)
    summary = {"model": str(out / "model.xml"), "queries": str(out / "queries.q"),
               "templates": len(ta.automata), "queries_written": len(queries.splitlines()),
               "unsupported": [str(u) for u in report.unsupported]}
    if args.format == "json":
        sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        print(f"wrote {summary['model']} ({summary['templates']} templates) and "
              f"{summary['queries']} ({summary['queries_written']} queries)")
    return EXIT_OK


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=_env("format", "text"))

    p = argparse.ArgumentParser(prog="scforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="parse and check a network")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    t = sub.add_parser("transform", parents=[common], help="print the network after rule k")
    t.add_argument("path")
    t.add_argument("--emit-stage", type=int, choices=range(1, 8), default=7, metavar="{1..7}")
    t.add_argument("--out")
    t.add_argument("--skip-rule", type=int, action="append", default=[], choices=range(2, 8))
    t.set_defaults(func=cmd_transform)

    s = sub.add_parser("simulate", parents=[common], help="run one schedule and print the trace")
    s.add_argument("path")
    s.add_argument("--side", choices=("sc", "ta"), default="sc")
    s.add_argument("--schedule", help="file of 'cycle <k>: ev, ...' lines")
    s.add_argument("--horizon", type=_non_negative, default=_env("horizon", 10, int))
    s.add_argument("--cycle-period", type=_positive("cycle period"), default=_env("cycle_period", 1, int))
    s.add_argument("--project", action="store_true", help="with --side ta, show only the chart images")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("equiv", parents=[common], help="co-simulate a network and its automata")
    e.add_argument("path")
    e.add_argument("--schedules", type=_positive("schedule count"), default=_env("schedules", 100, int))
    e.add_argument("--horizon", type=_non_negative, default=_env("horizon", 50, int))
    e.add_argument("--seed", type=int, default=_env("seed", None, int))
    e.add_argument("--jobs", type=_positive("jobs"), default=_env("jobs", 1, int))
    e.add_argument("--cycle-period", type=_positive("cycle period"), default=_env("cycle_period", 1, int))
    e.add_argument("--skip-rule", type=int, action="append", default=[], choices=range(2, 8),
                   help="leave a rule out of the transformation (mutation testing)")
    e.add_argument("--out")
    e.set_defaults(func=cmd_equiv)

    r = sub.add_parser("verify", parents=[common], help="check A[] properties by bounded search")
    r.add_argument("path")
    r.add_argument("--props", required=True)
    r.add_argument("--max-cycles", type=_non_negative, default=_env("max_cycles", 30, int))
    r.add_argument("--side", choices=("sc", "ta"), default="sc")
    r.add_argument("--budget", type=_positive("budget"), default=_env("budget", DEFAULT_BUDGET, int))
    r.add_argument("--cycle-period", type=_positive("cycle period"), default=_env("cycle_period", 1, int))
    r.add_argument("--out")
    r.set_defaults(func=cmd_verify)

    x = sub.add_parser("export", parents=[common], help="write model.xml and queries.q")
    x.add_argument("path")
    x.add_argument("--out", required=True, help="output directory")
    x.add_argument("--props", help="property file; defaults to the .q file next to the model")
    x.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"scforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except DSLError as exc:
        for d in exc.diagnostics:
            print(f"{args.path}:{d}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"scforge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"scforge: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScforgeError as exc:
        print(f"scforge: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
