"""Structural checks on a transformation result.

Two families: determinism of the rewritten guards, decided by exhaustive
enumeration of every valuation of the variables a location's guards read
together with every subset of the channels they mention; and the shape of the
source-to-target map (bijective on charts and states, injective on
transitions and variables, everything else accounted for as auxiliary).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .automata import TANetwork, TransformMap
from .expr import ChanRecv, ChanSend, EvalContext, IntLit, Var, eval_expr, walk
from .statechart import StatechartNetwork

__all__ = ["Violation", "priority_exclusive", "lockstep_deterministic", "map_violations"]


@dataclass(frozen=True)
class Violation:
    check: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"{self.check} at {self.where}: {self.detail}"


def _assignments(ta: TANetwork, guards, fixed: dict):
    """Every ``(env, ctx)`` the guards can observe, with ``fixed`` variables pinned."""
    names, chans = set(), set()
    for g in guards:
        for node in walk(g):
            if isinstance(node, Var) and node.name not in fixed:
                names.add(node.name)
            elif isinstance(node, (ChanRecv, ChanSend)):
                chans.add(node.name)
    names = sorted(names)
    chans = sorted(chans)
    domains = []
    for n in names:
        d = ta.decls[n]
        if d.kind == "clock":
            # guards compare clocks with constants only; 0..max+1 covers every region
            top = max((node.value for g in guards for node in walk(g) if isinstance(node, IntLit)),
                      default=0)
            domains.append(range(0, top + 2))
        else:
            domains.append(d.domain())
    subsets = [frozenset(c) for r in range(len(chans) + 1) for c in itertools.combinations(chans, r)]
    for values in itertools.product(*domains):
        env = dict(fixed)
        env.update(zip(names, values))
        for offered in subsets:
            yield env, EvalContext(events=None, triggers=None, channels=offered)


def _describe(env: dict, ctx: EvalContext) -> str:
    vals = ",".join(f"{k}={v}" for k, v in sorted(env.items()))
    return f"{{{vals}}} offered={sorted(ctx.channels)}"


def priority_exclusive(net: StatechartNetwork, stage6: TANetwork, tmap: TransformMap,
                       limit: int = 10) -> list[Violation]:
    """At most one original edge per location may be enabled after priority rewriting."""
    out = []
    for chart in net.charts:
        a = stage6.automaton(tmap.charts[chart.name])
        for loc in a.locations:
            edges = [e for e in a.outgoing(loc.name)]
            guards = [e.guard for e in edges if e.guard is not None]
            for env, ctx in _assignments(stage6, guards, {}):
                on = [e.id for e in edges if e.guard is None or eval_expr(e.guard, env, ctx)]
                if len(on) > 1:
                    out.append(Violation("priority", f"{a.name}.{loc.name}",
                                         f"{', '.join(on)} all enabled under {_describe(env, ctx)}"))
                    if len(out) >= limit:
                        return out
                    break
    return out


def lockstep_deterministic(net: StatechartNetwork, ta: TANetwork, tmap: TransformMap,
                           limit: int = 10) -> list[Violation]:
    """With the index on a chart's turn, each of its locations has exactly one enabled edge;
    on any other turn it has none."""
    if ta.alpha is None:
        return [Violation("lockstep", "network", "no lockstep index")]
    out = []
    n = len(net.charts)
    for chart in net.charts:
        a = ta.automaton(tmap.charts[chart.name])
        for loc in a.locations:
            edges = a.outgoing(loc.name)
            guards = [e.guard for e in edges if e.guard is not None]
            for turn in range(1, n + 1):
                want = 1 if turn == chart.priority else 0
                for env, ctx in _assignments(ta, guards, {ta.alpha: turn}):
                    on = [e.id for e in edges if e.guard is None or eval_expr(e.guard, env, ctx)]
                    if len(on) != want:
                        out.append(Violation("lockstep", f"{a.name}.{loc.name}",
                                             f"{len(on)} edges enabled ({', '.join(on) or 'none'}) "
                                             f"under {_describe(env, ctx)}"))
                        if len(out) >= limit:
                            return out
                        break
    return out


def map_violations(net: StatechartNetwork, ta: TANetwork, tmap: TransformMap) -> list[Violation]:
    """Charts and states map bijectively, transitions and variables injectively, and
    every unmapped target element is listed as auxiliary."""
    out = []

    images = set(tmap.charts.values())

    def check(kind, mapping, sources, targets, onto=None):
        """``onto`` restricts the targets on which the map must be surjective."""
        values = list(mapping.values())
        if set(mapping) != set(sources):
            out.append(Violation("map", kind, "domain differs from the source elements"))
        if len(set(values)) != len(values):
            out.append(Violation("map", kind, "two source elements share an image"))
        missing = set(values) - set(targets)
        if missing:
            out.append(Violation("map", kind, f"images not in the target: {sorted(map(str, missing))}"))
        if onto is not None and set(onto) - set(values):
            out.append(Violation("map", kind, f"not onto: {sorted(map(str, set(onto) - set(values)))}"))
        aux = {name for k, name in tmap.aux if k == kind}
        stray = set(targets) - set(values) - aux
        if stray:
            out.append(Violation("map", kind, f"unclassified target elements {sorted(map(str, stray))}"))

    check("automaton", tmap.charts, [c.name for c in net.charts], [a.name for a in ta.automata],
          [a.name for a in ta.automata if a.role == "transformed"])
    check("location", tmap.states, [(c.name, s.name) for c in net.charts for s in c.states],
          [(a.name, l.name) for a in ta.automata for l in a.locations],
          [(a.name, l.name) for a in ta.automata if a.role == "transformed" for l in a.locations])
    check("edge", tmap.transitions, [(c.name, t.id) for c in net.charts for t in c.transitions],
          [(a.name, e.id) for a in ta.automata for e in a.edges])
    check("variable", tmap.variables, [d.name for d in net.variables], [d.name for d in ta.variables])
    for a in ta.automata:
        if (a.name in images) != (a.role == "transformed"):
            out.append(Violation("map", a.name, f"role {a.role!r} disagrees with the chart map"))
    return out
