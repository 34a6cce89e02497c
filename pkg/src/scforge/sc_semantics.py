"""Deterministic synchronous execution of statechart networks.

One macro-cycle lets every chart take exactly one micro-step, in priority
order. A micro-step fires the highest-priority enabled transition of the
moving chart, or stutters when none is enabled; either way the execution
index moves on to the next chart.

Timing triggers run on a network-wide time base. Each trigger occurrence
owns a timer that starts at 0 and advances by the cycle period at the end of
every cycle. ``after t`` is present during the first cycle its timer reaches
``t`` and never again; ``every t`` is present in each cycle its timer
reaches ``t`` and restarts from 0 at the end of such a cycle. Presence lasts
for the whole cycle whether or not a transition consumes it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .actions import apply_actions
from .errors import ScforgeError
from .expr import EvalContext, eval_expr
from .statechart import StatechartNetwork
from .status import STUTTER, ExecutionTrace, SystemStatus, Valuation

__all__ = [
    "EventEnv", "TimerState", "initial_status", "initial_timers", "micro_step",
    "macro_cycle", "run", "iter_run", "enabled_transitions", "parse_schedule",
    "format_schedule",
]


@dataclass(frozen=True)
class EventEnv:
    """Which events are raised in which cycle, plus the time per cycle."""

    schedule: Mapping[int, frozenset] = field(default_factory=dict)
    cycle_period: int = 1

    def __post_init__(self):
        if self.cycle_period < 1:
            raise ValueError("cycle period must be a positive integer")
        object.__setattr__(self, "schedule",
                           {int(k): frozenset(v) for k, v in self.schedule.items() if v})

    def events_at(self, cycle: int) -> frozenset:
        return self.schedule.get(cycle, frozenset())

    def check(self, net: StatechartNetwork) -> None:
        declared = set(net.events)
        for k, evs in self.schedule.items():
            unknown = set(evs) - declared
            if unknown:
                raise ScforgeError(f"cycle {k} raises undeclared events {sorted(unknown)}")


@dataclass(frozen=True)
class TimerState:
    """Per trigger occurrence: elapsed time and whether an ``after`` has fired."""

    elapsed: tuple[tuple[str, int, bool], ...] = ()

    def present(self, net: StatechartNetwork) -> frozenset:
        amounts = net.triggers_by_id
        return frozenset(tid for tid, t, done in self.elapsed
                         if not done and t >= amounts[tid].amount)

    def advance(self, net: StatechartNetwork, period: int) -> "TimerState":
        """End-of-cycle update."""
        kinds = net.triggers_by_id
        out = []
        for tid, t, done in self.elapsed:
            trig = kinds[tid]
            if done:
                out.append((tid, t, True))
                continue
            if t >= trig.amount:
                if trig.kind == "after":
                    # elapsed is irrelevant from now on; freezing keeps the state space finite
                    out.append((tid, t, True))
                    continue
                t = 0
            out.append((tid, t + period, False))
        return TimerState(tuple(out))


def initial_timers(net: StatechartNetwork) -> TimerState:
    return TimerState(tuple((s.trigger.tid, 0, False) for s in net.trigger_sites))


def initial_status(net: StatechartNetwork) -> SystemStatus:
    states = tuple(c.initial for c in net.charts)
    val = Valuation((d.name, d.initial) for d in net.variables if d.is_value)
    return SystemStatus(states, val, 1)


def _ctx(events: Iterable[str], triggers: Iterable[str]) -> EvalContext:
    return EvalContext(events=frozenset(events), triggers=frozenset(triggers))


def enabled_transitions(net: StatechartNetwork, status: SystemStatus, chart_index: int,
                        ctx: EvalContext) -> list:
    """All outgoing transitions of the chart's active state whose guard holds, by priority."""
    chart = net.charts[chart_index]
    return [t for t in chart.outgoing(status.states[chart_index])
            if eval_expr(t.guard, status.valuation, ctx)]


def micro_step(net: StatechartNetwork, status: SystemStatus, ctx: EvalContext) -> tuple[SystemStatus, str]:
    """Let the chart whose priority equals the execution index take one step."""
    n = len(net.charts)
    i = status.exec_index - 1
    if not 0 <= i < n:
        raise ScforgeError(f"execution index {status.exec_index} outside 1..{n}")
    chart = net.charts[i]
    next_index = status.exec_index % n + 1
    fired = None
    for t in chart.outgoing(status.states[i]):
        if eval_expr(t.guard, status.valuation, ctx):
            fired = t
            break
    if fired is None:
        return SystemStatus(status.states, status.valuation, next_index), STUTTER
    seq = chart.state(fired.source).exit + fired.action + chart.state(fired.target).entry
    val = apply_actions(seq, status.valuation, net.decls)
    states = status.states[:i] + (fired.target,) + status.states[i + 1:]
    return SystemStatus(states, val, next_index), fired.id


def macro_cycle(net: StatechartNetwork, status: SystemStatus, events: Iterable[str],
                timers: TimerState, cycle_period: int = 1):
    """Run one synchronous round.

    Returns ``(final_status, labels, statuses, timers)`` where ``statuses``
    holds the status after each of the n micro-steps.
    """
    if status.exec_index != 1:
        raise ScforgeError("a macro-cycle starts with execution index 1")
    ctx = _ctx(events, timers.present(net))
    labels, statuses = [], []
    for _ in net.charts:
        status, label = micro_step(net, status, ctx)
        labels.append(label)
        statuses.append(status)
    return status, labels, statuses, timers.advance(net, cycle_period)


def iter_run(net: StatechartNetwork, env: EventEnv, horizon: int) -> Iterator[tuple]:
    """Yield ``(status, label, (cycle, micro))`` for the initial status and every micro-step."""
    status = initial_status(net)
    timers = initial_timers(net)
    yield status, None, (0, 0)
    for k in range(horizon):
        ctx = _ctx(env.events_at(k), timers.present(net))
        for i in range(1, len(net.charts) + 1):
            status, label = micro_step(net, status, ctx)
            yield status, label, (k, i)
        timers = timers.advance(net, env.cycle_period)


def run(net: StatechartNetwork, env: EventEnv, horizon: int) -> ExecutionTrace:
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    it = iter_run(net, env, horizon)
    st, _, mark = next(it)
    trace = ExecutionTrace([st], [], [mark], tuple(c.name for c in net.charts))
    for st, label, mark in it:
        trace.append(st, label, mark)
    return trace


# -- schedule files -----------------------------------------------------------

_LINE = re.compile(r"^\s*cycle\s+(\d+)\s*:\s*(.*?)\s*$")


def parse_schedule(text: str) -> dict[int, frozenset]:
    """Read ``cycle <k>: ev1, ev2`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[int, set] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ValueError(f"schedule line {lineno}: expected 'cycle <k>: events'")
        names = [e.strip() for e in m.group(2).split(",") if e.strip()]
        out.setdefault(int(m.group(1)), set()).update(names)
    return {k: frozenset(v) for k, v in out.items()}


def format_schedule(schedule: Mapping[int, Iterable[str]]) -> str:
    lines = [f"cycle {k}: {', '.join(sorted(v))}" for k, v in sorted(schedule.items()) if v]
    return "\n".join(lines) + ("\n" if lines else "")
