"""Trace equivalence between a statechart network and its timed-automata image.

Both sides run under the same event schedule. The statechart trace records
the initial status and one status per micro-step; the automata trace is
sampled at the matching lockstep steps (the end-of-cycle delay statuses are
skipped) and projected onto the chart images and the source variables.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .automata import TANetwork, TransformMap
from .errors import MapMismatch, ScforgeError
from .sc_semantics import EventEnv, format_schedule, iter_run
from .statechart import StatechartNetwork
from .status import ExecutionTrace, SystemStatus, TAStatus, Valuation
from .ta_semantics import iter_ta_run

__all__ = ["ProjectedStatus", "Divergence", "EquivalenceReport", "project", "project_status",
           "check_traces", "check_model_equivalence", "random_schedule", "random_schedules"]


@dataclass(frozen=True)
class ProjectedStatus:
    states: tuple[str, ...]
    valuation: Valuation

    def __str__(self) -> str:
        vals = ",".join(f"{k}={v}" for k, v in self.valuation.items())
        return f"(({', '.join(self.states)}), {{{vals}}})"


@dataclass(frozen=True)
class Divergence:
    index: int
    left: ProjectedStatus | None
    right: ProjectedStatus | None
    left_label: str | None = None
    right_label: str | None = None
    reason: str = "status mismatch"
    schedule: Mapping[int, frozenset] = field(default_factory=dict)
    schedule_index: int | None = None

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "reason": self.reason,
            "left": str(self.left) if self.left else None,
            "right": str(self.right) if self.right else None,
            "left_label": self.left_label,
            "right_label": self.right_label,
            "schedule_index": self.schedule_index,
            "schedule": {str(k): sorted(v) for k, v in sorted(self.schedule.items())},
        }


@dataclass
class EquivalenceReport:
    verdict: str  # "equivalent" | "divergent"
    first_divergence: Divergence | None = None
    schedules_tested: int = 0
    horizon: int = 0
    seed: int | None = None
    divergent_schedules: list[int] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return self.verdict == "equivalent"

    def as_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "schedules_tested": self.schedules_tested,
            "horizon": self.horizon,
            "seed": self.seed,
            "divergent_schedules": self.divergent_schedules,
            "first_divergence": self.first_divergence.as_dict() if self.first_divergence else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}",
                 f"schedules: {self.schedules_tested}",
                 f"horizon: {self.horizon}",
                 f"seed: {self.seed}"]
        d = self.first_divergence
        if d is not None:
            lines += [f"schedule index: {d.schedule_index}",
                      f"divergence at step {d.index}: {d.reason}",
                      f"  statechart: {d.left} [{d.left_label}]",
                      f"  automata:   {d.right} [{d.right_label}]",
                      "witness schedule:"]
            lines += ["  " + l for l in format_schedule(d.schedule).splitlines()] or ["  (no events)"]
        return "\n".join(lines) + "\n"


# -- projection ---------------------------------------------------------------

def _sc_project(status: SystemStatus) -> ProjectedStatus:
    return ProjectedStatus(status.states, status.valuation)


def project_status(status: TAStatus, ta: TANetwork, tmap: TransformMap,
                   idx=None, names=None, rename=None) -> ProjectedStatus:
    """Keep the chart images and the source variables, dropping everything auxiliary."""
    idx = idx if idx is not None else tmap.transformed_indices(ta)
    if rename is None:
        rename = {t: s for s, t in tmap.variables.items() if ta.decls.get(t) and ta.decls[t].is_value}
    if len(status.locations) != len(ta.automata):
        raise MapMismatch("status does not belong to this network")
    try:
        val = Valuation((rename[t], status.valuation[t]) for t in rename)
    except KeyError as exc:
        raise MapMismatch(f"variable {exc.args[0]!r} missing from the status") from None
    return ProjectedStatus(tuple(status.locations[i] for i in idx), val)


def project(trace: ExecutionTrace, ta: TANetwork, tmap: TransformMap) -> list[ProjectedStatus]:
    """Project a lockstep trace, keeping the initial status and every lockstep step."""
    if trace.components and trace.components != tuple(a.name for a in ta.automata):
        raise MapMismatch("trace was produced by a different network")
    idx = tmap.transformed_indices(ta)
    rename = {t: s for s, t in tmap.variables.items() if ta.decls.get(t) and ta.decls[t].is_value}
    out = []
    for i, st in enumerate(trace.statuses):
        mark = trace.marks[i] if trace.marks else (0, i)
        if i == 0 or mark[1] != 0:
            out.append(project_status(st, ta, tmap, idx, rename=rename))
    return out


def check_traces(left, right, left_labels: Sequence | None = None,
                 right_labels: Sequence | None = None) -> EquivalenceReport:
    """Pointwise comparison of two projected traces.

    Either argument may be an :class:`ExecutionTrace` of statechart statuses
    or a sequence of :class:`ProjectedStatus`.
    """
    if isinstance(left, ExecutionTrace):
        left_labels = left_labels or [None] + list(left.labels)
        left = [_sc_project(s) if isinstance(s, SystemStatus) else s for s in left.statuses]
    if isinstance(right, ExecutionTrace):
        right_labels = right_labels or [None] + list(right.labels)
        right = [_sc_project(s) if isinstance(s, SystemStatus) else s for s in right.statuses]
    left, right = list(left), list(right)
    if not left or not right:
        raise ValueError("traces must be non-empty")
    horizon = max(len(left), len(right))
    for i in range(min(len(left), len(right))):
        if left[i] != right[i]:
            d = Divergence(i, left[i], right[i], _at(left_labels, i), _at(right_labels, i))
            return EquivalenceReport("divergent", d, 1, horizon)
    if len(left) != len(right):
        i = min(len(left), len(right))
        d = Divergence(i, _at(left, i), _at(right, i), reason="length mismatch")
        return EquivalenceReport("divergent", d, 1, horizon)
    return EquivalenceReport("equivalent", None, 1, horizon)


def _at(seq, i):
    return seq[i] if seq is not None and i < len(seq) else None


# -- co-simulation ------------------------------------------------------------

def _co_simulate(net: StatechartNetwork, ta: TANetwork, tmap: TransformMap,
                 env: EventEnv, horizon: int) -> Divergence | None:
    sc_iter = iter_run(net, env, horizon)
    try:
        idx = tmap.transformed_indices(ta)
        rename = {t: s for s, t in tmap.variables.items() if ta.decls.get(t) and ta.decls[t].is_value}
        ta_iter: Iterator = (
            (project_status(st, ta, tmap, idx, rename=rename), label)
            for st, label, mark in iter_ta_run(ta, env, horizon)
            if mark == (0, 0) or mark[1] != 0)
    except ScforgeError as exc:
        first = next(sc_iter)[0]
        return Divergence(0, _sc_project(first), None, reason=f"automata side: {exc}")

    step = 0
    for sc_status, sc_label, _ in sc_iter:
        left = _sc_project(sc_status)
        try:
            right, ta_label = next(ta_iter)
        except StopIteration:
            return Divergence(step, left, None, sc_label, None, reason="automata trace ended early")
        except ScforgeError as exc:
            return Divergence(step, left, None, sc_label, None,
                              reason=f"automata side: {type(exc).__name__}: {exc}")
        if left != right:
            return Divergence(step, left, right, sc_label, ta_label)
        step += 1
    return None


def random_schedule(events: Sequence[str], horizon: int, seed) -> dict[int, frozenset]:
    """Each event is raised in each cycle with probability one half."""
    rng = random.Random(str(seed))
    out = {}
    for k in range(horizon):
        raised = frozenset(e for e in events if rng.random() < 0.5)
        if raised:
            out[k] = raised
    return out


def random_schedules(events: Sequence[str], horizon: int, count: int, seed: int) -> list[dict]:
    return [random_schedule(events, horizon, f"{seed}-{i}") for i in range(count)]


def check_model_equivalence(net: StatechartNetwork, ta: TANetwork, tmap: TransformMap,
                            schedules: Iterable[Mapping[int, Iterable[str]]], horizon: int,
                            cycle_period: int = 1, seed: int | None = None,
                            jobs: int = 1, stop_at_first: bool = False) -> EquivalenceReport:
    """Co-simulate under every schedule; equivalent only if all agree.

    Errors raised on the automata side (deadlock, nondeterminism, an atom the
    automata semantics cannot evaluate) count as divergences. Errors on the
    statechart side propagate.
    """
    envs = [EventEnv(s, cycle_period) for s in schedules]

    def one(env):
        return _co_simulate(net, ta, tmap, env, horizon)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            results = list(pool.map(one, envs))
    else:
        results = []
        for env in envs:
            results.append(one(env))
            if stop_at_first and results[-1] is not None:
                break
    report = EquivalenceReport("equivalent", None, len(envs), horizon, seed)
    for i, d in enumerate(results):
        if d is None:
            continue
        report.divergent_schedules.append(i)
        if report.first_divergence is None:
            report.verdict = "divergent"
            report.first_divergence = Divergence(d.index, d.left, d.right, d.left_label,
                                                 d.right_label, d.reason, envs[i].schedule, i)
    return report
