"""Bounded explicit-state checking of ``A[] Chart.State imply cond`` invariants.

Stepping is deterministic once the events of a cycle are fixed, so the search
branches only on which subset of the event alphabet is raised in each cycle.
Nodes are cycle-boundary statuses together with the timer state; every
micro-step status inside a cycle is checked against the property.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .automata import TANetwork, TransformMap
from .dsl.lexer import Diagnostic
from .dsl.parser import parse_expr
from .errors import DSLError, StateSpaceBudgetExceeded, UnboundedDomainError
from .equivalence import project_status
from .expr import Cmp, Expr, IntLit, Var, eval_expr, to_text, walk
from .sc_semantics import EventEnv, format_schedule, initial_status, initial_timers, macro_cycle, run
from .statechart import StatechartNetwork
from .status import ExecutionTrace, SystemStatus, TAStatus, Valuation
from .ta_semantics import ta_cycle, ta_initial_status, ta_run

__all__ = ["SafetyProperty", "Counterexample", "VerificationResult", "parse_property",
           "parse_properties", "reachable", "check_invariant", "DEFAULT_BUDGET"]

DEFAULT_BUDGET = 200_000

_PROP = re.compile(r"^\s*(?:(?P<name>[A-Za-z_]\w*)\s*:\s*)?A\[\]\s*(?P<chart>[A-Za-z_]\w*)\.(?P<state>[A-Za-z_]\w*)\s+imply\s+(?P<cond>.+?)\s*$")


@dataclass(frozen=True)
class SafetyProperty:
    name: str
    chart: str
    state: str
    condition: Expr

    @property
    def query(self) -> str:
        return f"A[] {self.chart}.{self.state} imply {to_text(self.condition)}"


def parse_property(line: str, net: StatechartNetwork, name: str = "P1", lineno: int = 1) -> SafetyProperty:
    """Parse ``[name:] A[] Chart.State imply cond`` and resolve it against ``net``."""
    m = _PROP.match(line)
    if not m:
        raise DSLError([Diagnostic("SYNTAX_ERROR", "expected 'A[] <chart>.<state> imply <expr>'", lineno, 1)])
    chart, state = m.group("chart"), m.group("state")
    col = m.start("chart") + 1
    try:
        c = net.chart(chart)
    except KeyError:
        raise DSLError([Diagnostic("UNKNOWN_STATE", f"unknown statechart {chart!r}", lineno, col)]) from None
    if state not in c.state_names:
        raise DSLError([Diagnostic("UNKNOWN_STATE", f"{chart!r} has no state {state!r}", lineno,
                                   m.start("state") + 1)])
    kinds = {k: v for k, v in net.kinds.items() if v in ("int", "bool")}
    try:
        cond = parse_expr(m.group("cond"), kinds)
    except DSLError as exc:
        off = m.start("cond")
        raise DSLError([Diagnostic(d.code, d.message, lineno, d.col + off) for d in exc.diagnostics]) from None
    return SafetyProperty(m.group("name") or name, chart, state, cond)


def parse_properties(text: str, net: StatechartNetwork) -> list[SafetyProperty]:
    """One property per non-blank line; unnamed ones are called P1, P2, ... in order."""
    props = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line or line.startswith("#"):
            continue
        props.append(parse_property(line, net, f"P{len(props) + 1}", lineno))
    return props


@dataclass
class Counterexample:
    property: str
    schedule: dict
    trace: ExecutionTrace
    cycles: int

    def dump(self) -> str:
        sched = format_schedule(self.schedule) or "(no events)\n"
        return (f"property {self.property} violated after {self.cycles} cycle(s)\n"
                f"schedule:\n{sched}trace:\n{self.trace.dump()}")

    def as_dict(self) -> dict:
        return {"property": self.property, "cycles": self.cycles,
                "schedule": {str(k): sorted(v) for k, v in sorted(self.schedule.items())},
                "trace": self.trace.dump().splitlines()}


@dataclass
class VerificationResult:
    property: SafetyProperty
    holds: bool
    counterexample: Counterexample | None = None
    explored: int = 0
    max_cycles: int = 0
    side: str = "sc"
    complete: bool = False  # the search reached a fixpoint before the bound

    def as_dict(self) -> dict:
        return {"property": self.property.name, "query": self.property.query,
                "holds": self.holds, "explored": self.explored, "max_cycles": self.max_cycles,
                "side": self.side, "fixpoint": self.complete,
                "counterexample": self.counterexample.as_dict() if self.counterexample else None}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


# -- search engine ------------------------------------------------------------

def _subsets(events: Sequence[str]) -> list[frozenset]:
    evs = sorted(events)
    return [frozenset(c) for r in range(len(evs) + 1) for c in itertools.combinations(evs, r)]


@dataclass
class _Space:
    """How to start, expand and observe one side of the search."""

    initial: object
    first_view: tuple
    expand: Callable  # (node, events) -> (views of micro statuses, next node)


def _check_bounded(net: StatechartNetwork) -> None:
    loose = [d.name for d in net.variables if not d.bounded]
    if loose:
        raise UnboundedDomainError(f"verification needs bounded domains; unbounded: {', '.join(loose)}")


def _sc_space(net: StatechartNetwork, period: int, sink=None) -> _Space:
    def expand(node, events):
        status, timers = node
        final, _, statuses, timers2 = macro_cycle(net, status, events, timers, period)
        if sink is not None:
            sink.update(statuses)
        return [(s.states, s.valuation) for s in statuses], (final, timers2)

    init = initial_status(net)
    if sink is not None:
        sink.add(init)
    return _Space((init, initial_timers(net)), (init.states, init.valuation), expand)


def _clock_caps(ta: TANetwork) -> dict[str, int]:
    caps = {c: 0 for c in ta.clocks}
    exprs = [l.invariant for a in ta.automata for l in a.locations if l.invariant is not None]
    exprs += [e.guard for a in ta.automata for e in a.edges if e.guard is not None]
    for ex in exprs:
        for n in walk(ex):
            if isinstance(n, Cmp):
                for side, other in ((n.left, n.right), (n.right, n.left)):
                    if isinstance(side, Var) and side.name in caps and isinstance(other, IntLit):
                        caps[side.name] = max(caps[side.name], other.value)
    return caps


def _ta_space(ta: TANetwork, tmap: TransformMap, period: int) -> _Space:
    caps = _clock_caps(ta)
    idx = tmap.transformed_indices(ta)
    rename = {t: s for s, t in tmap.variables.items() if ta.decls.get(t) and ta.decls[t].is_value}

    def norm(st: TAStatus) -> TAStatus:
        # past its largest constant a clock's exact value no longer matters
        clocks = Valuation((c, min(v, caps[c] + 1)) for c, v in st.clocks.items())
        return TAStatus(st.locations, st.valuation, clocks)

    def view(st):
        p = project_status(st, ta, tmap, idx, rename=rename)
        return (p.states, p.valuation)

    def expand(node, events):
        views, last = [], node
        for st, _, micro in ta_cycle(ta, node, events, period):
            if micro:
                views.append(view(st))
            last = st
        return views, norm(last)

    init = ta_initial_status(ta)
    return _Space(norm(init), view(init), expand)


def _search(space: _Space, events: Sequence[str], max_cycles: int, budget: int,
            violates: Callable[[tuple], bool] | None):
    """Breadth-first over cycles. Returns ``(hit, parents, visited, complete)``.

    ``hit`` is ``(node, events, cycle)`` of the first violating cycle, or
    ``None``; a violation in the initial status gives ``(None, None, -1)``.
    """
    if violates is not None and violates(space.first_view):
        return (None, None, -1), {}, 1, False
    subsets = _subsets(events)
    parents: dict = {space.initial: None}
    frontier = [space.initial]
    for cycle in range(max_cycles):
        nxt = []
        for node in frontier:
            for evs in subsets:
                views, child = space.expand(node, evs)
                if violates is not None and any(violates(v) for v in views):
                    return (node, evs, cycle), parents, len(parents), False
                if child not in parents:
                    parents[child] = (node, evs)
                    if len(parents) > budget:
                        raise StateSpaceBudgetExceeded(budget)
                    nxt.append(child)
        if not nxt:
            return None, parents, len(parents), True
        frontier = nxt
    return None, parents, len(parents), False


def _schedule_to(parents: dict, node, last_events, cycle: int) -> dict[int, frozenset]:
    path = []
    while parents.get(node) is not None:
        node, evs = parents[node]
        path.append(evs)
    path.reverse()
    path.append(last_events)
    if len(path) != cycle + 1:
        raise AssertionError("schedule reconstruction lost a cycle")
    return {k: evs for k, evs in enumerate(path) if evs}


def reachable(net: StatechartNetwork, max_cycles: int, events: Iterable[str] | None = None,
              budget: int = DEFAULT_BUDGET, cycle_period: int = 1) -> set[SystemStatus]:
    """Every status (cycle boundaries and micro-steps) reachable within ``max_cycles``."""
    _check_bounded(net)
    seen: set[SystemStatus] = set()
    space = _sc_space(net, cycle_period, sink=seen)
    _search(space, list(net.events if events is None else events), max_cycles, budget, None)
    return seen


def check_invariant(net: StatechartNetwork, prop: SafetyProperty, max_cycles: int,
                    events: Iterable[str] | None = None, budget: int = DEFAULT_BUDGET,
                    cycle_period: int = 1, side: str = "sc",
                    ta: TANetwork | None = None, tmap: TransformMap | None = None) -> VerificationResult:
    """Search for a status where ``prop.chart`` is in ``prop.state`` and the condition is false.

    The first violation in breadth-first order is the one needing the fewest
    cycles. ``side="ta"`` runs the search on the transformed automata and
    checks their projected statuses.
    """
    _check_bounded(net)
    events = list(net.events if events is None else events)
    ci = [c.name for c in net.charts].index(prop.chart)

    def violates(view) -> bool:
        states, val = view
        return states[ci] == prop.state and not eval_expr(prop.condition, val)

    if side == "sc":
        space = _sc_space(net, cycle_period)
    elif side == "ta":
        if ta is None or tmap is None:
            from .transform import transform_all
            ta, tmap = transform_all(net)
        space = _ta_space(ta, tmap, cycle_period)
    else:
        raise ValueError("side must be 'sc' or 'ta'")

    hit, parents, explored, complete = _search(space, events, max_cycles, budget, violates)
    result = VerificationResult(prop, hit is None, None, explored, max_cycles, side, complete)
    if hit is None:
        return result
    node, evs, cycle = hit
    schedule = {} if node is None else _schedule_to(parents, node, evs, cycle)
    result.counterexample = _replay(net, prop, schedule, cycle + 1, cycle_period, violates,
                                    side, ta, tmap)
    return result


def _replay(net, prop, schedule, cycles, period, violates, side, ta, tmap) -> Counterexample:
    env = EventEnv(schedule, period)
    if side == "sc":
        full = run(net, env, cycles)
        views = [(s.states, s.valuation) for s in full.statuses]
    else:
        full = ta_run(ta, env, cycles)
        views = [(p.states, p.valuation) for p in
                 (project_status(s, ta, tmap) for s in full.statuses)]
    for i, v in enumerate(views):
        if violates(v) and (side == "sc" or i == 0 or full.marks[i][1] != 0):
            trace = ExecutionTrace(full.statuses[:i + 1], full.labels[:i], full.marks[:i + 1],
                                   full.components)
            return Counterexample(prop.name, schedule, trace, cycles)
    raise AssertionError("counterexample did not replay")
