"""Basic statechart networks: states, prioritized transitions, shared variables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

from .expr import Expr, Trigger, transform, walk
from .status import VarDecl

__all__ = ["State", "Transition", "Statechart", "StatechartNetwork", "TriggerSite",
           "number_triggers"]


@dataclass(frozen=True)
class State:
    name: str
    entry: tuple = ()
    exit: tuple = ()
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Transition:
    id: str
    source: str
    target: str
    guard: Expr
    action: tuple = ()
    priority: int = 1
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Statechart:
    name: str
    priority: int
    states: tuple[State, ...]
    initial: str
    transitions: tuple[Transition, ...] = ()
    pos: tuple[int, int] | None = field(default=None, compare=False)

    @property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    @cached_property
    def _by_source(self) -> dict[str, tuple[Transition, ...]]:
        out: dict[str, list[Transition]] = {}
        for t in self.transitions:
            out.setdefault(t.source, []).append(t)
        return {s: tuple(sorted(ts, key=lambda t: t.priority)) for s, ts in out.items()}

    @cached_property
    def _states(self) -> dict[str, State]:
        return {s.name: s for s in self.states}

    def state(self, name: str) -> State:
        return self._states[name]

    def outgoing(self, state: str) -> tuple[Transition, ...]:
        """Transitions leaving ``state``, highest priority (smallest number) first."""
        return self._by_source.get(state, ())


@dataclass(frozen=True)
class TriggerSite:
    """One occurrence of a timing trigger in some transition guard."""

    chart: str
    transition: str
    trigger: Trigger


@dataclass(frozen=True)
class StatechartNetwork:
    """Charts ordered by priority, all sharing one declaration list."""

    variables: tuple[VarDecl, ...]
    charts: tuple[Statechart, ...]

    @cached_property
    def decls(self) -> dict[str, VarDecl]:
        return {d.name: d for d in self.variables}

    @cached_property
    def kinds(self) -> dict[str, str]:
        return {d.name: d.kind for d in self.variables}

    @property
    def value_vars(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.variables if d.is_value)

    @property
    def events(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.variables if d.kind == "event")

    def chart(self, name: str) -> Statechart:
        for c in self.charts:
            if c.name == name:
                return c
        raise KeyError(name)

    @cached_property
    def trigger_sites(self) -> tuple[TriggerSite, ...]:
        """Every trigger occurrence, in chart, transition and guard order."""
        sites = []
        for c in self.charts:
            for t in c.transitions:
                for node in walk(t.guard):
                    if isinstance(node, Trigger):
                        sites.append(TriggerSite(c.name, t.id, node))
        return tuple(sites)

    @cached_property
    def triggers_by_id(self) -> dict[str, Trigger]:
        return {s.trigger.tid: s.trigger for s in self.trigger_sites}

    @property
    def bounded(self) -> bool:
        return all(d.bounded for d in self.variables)


def number_triggers(guard: Expr, chart: str, transition: str) -> Expr:
    """Give each trigger in ``guard`` its occurrence id ``chart.transition.k``.

    ``k`` counts from 1 in left-to-right order, so the ids are a pure
    function of where the trigger sits; printing and re-parsing keeps them.
    """
    counter = itertools.count(1)

    def tag(node):
        if isinstance(node, Trigger):
            return Trigger(node.kind, node.amount, f"{chart}.{transition}.{next(counter)}")
        return None

    return transform(guard, tag)
