"""Random well-formed statechart networks for differential testing.

Generated networks stay inside the fragment the transformation handles:
bounded integer domains starting at 0, assignments that can never leave
their domain, at most one timing trigger in the whole network, and an
initial state per chart with a single unconditional, action-free exit.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .actions import Assign
from .expr import (TRUE, And, Arith, BoolLit, Cmp, EventRef, Expr, IntLit, Not, Or, Trigger,
                   Var)
from .statechart import State, Statechart, StatechartNetwork, Transition, number_triggers
from .status import VarDecl

__all__ = ["FuzzBounds", "random_network"]


@dataclass(frozen=True)
class FuzzBounds:
    max_charts: int = 3
    max_states: int = 5
    max_events: int = 2
    max_triggers: int = 1
    max_int_hi: int = 7
    max_vars: int = 3
    max_trigger_amount: int = 6


class _Gen:
    def __init__(self, rng: random.Random, bounds: FuzzBounds):
        self.rng = rng
        self.b = bounds
        self.triggers_left = rng.randint(0, bounds.max_triggers)

    def declarations(self) -> tuple[list[VarDecl], list[str]]:
        rng = self.rng
        decls = []
        for i in range(rng.randint(1, self.b.max_vars)):
            if rng.random() < 0.25:
                decls.append(VarDecl(f"b{i}", "bool", rng.random() < 0.5))
            else:
                hi = rng.randint(1, self.b.max_int_hi)
                decls.append(VarDecl(f"v{i}", "int", rng.randint(0, hi), 0, hi))
        events = [f"ev{i}" for i in range(rng.randint(0, self.b.max_events))]
        decls += [VarDecl(e, "event") for e in events]
        return decls, events

    def atom(self, decls: list[VarDecl], events: list[str]) -> Expr:
        rng = self.rng
        roll = rng.random()
        if events and roll < 0.25:
            return EventRef(rng.choice(events))
        if self.triggers_left and roll < 0.35:
            self.triggers_left -= 1
            kind = rng.choice(("after", "every"))
            return Trigger(kind, rng.randint(1, self.b.max_trigger_amount))
        values = [d for d in decls if d.is_value]
        d = rng.choice(values)
        if d.kind == "bool":
            return Var(d.name)
        op = rng.choice(("<", "<=", "==", ">=", ">", "!="))
        return Cmp(op, Var(d.name), IntLit(rng.randint(0, d.hi)))

    def guard(self, decls, events, depth: int = 2) -> Expr:
        rng = self.rng
        roll = rng.random()
        if depth == 0 or roll < 0.45:
            return self.atom(decls, events) if rng.random() < 0.9 else BoolLit(rng.random() < 0.5)
        if roll < 0.55:
            return Not(self.guard(decls, events, depth - 1))
        op = And if roll < 0.8 else Or
        return op(self.guard(decls, events, depth - 1), self.guard(decls, events, depth - 1))

    def assignment(self, decls: list[VarDecl]) -> Assign:
        rng = self.rng
        d = rng.choice([d for d in decls if d.is_value])
        if d.kind == "bool":
            bools = [x for x in decls if x.kind == "bool"]
            if rng.random() < 0.5:
                return Assign(d.name, BoolLit(rng.random() < 0.5))
            return Assign(d.name, Not(Var(rng.choice(bools).name)))
        roll = rng.random()
        if roll < 0.5:
            return Assign(d.name, IntLit(rng.randint(0, d.hi)))
        if roll < 0.75:
            # reflection inside 0..hi never leaves the domain
            return Assign(d.name, Arith("-", IntLit(d.hi), Var(d.name)))
        fits = [x for x in decls if x.kind == "int" and x.hi <= d.hi]
        return Assign(d.name, Var(rng.choice(fits).name))

    def actions(self, decls, most: int = 2) -> tuple:
        return tuple(self.assignment(decls) for _ in range(self.rng.randint(0, most)))

    def chart(self, name: str, priority: int, decls, events) -> Statechart:
        rng = self.rng
        names = [f"{name}_s{i}" for i in range(rng.randint(2, self.b.max_states))]
        states = [State(names[0])]
        for s in names[1:]:
            entry = self.actions(decls, 1) if rng.random() < 0.3 else ()
            exit_ = self.actions(decls, 1) if rng.random() < 0.3 else ()
            states.append(State(s, entry, exit_))
        transitions = [Transition(f"{name}_t0", names[0], rng.choice(names[1:]), TRUE)]
        for src in names[1:]:
            for prio in range(1, rng.randint(0, 3) + 1):
                tid = f"{name}_t{len(transitions)}"
                guard = number_triggers(self.guard(decls, events), name, tid)
                transitions.append(Transition(tid, src, rng.choice(names[1:]), guard,
                                              self.actions(decls), prio))
        return Statechart(name, priority, tuple(states), names[0], tuple(transitions))


def random_network(rng: random.Random, bounds: FuzzBounds = FuzzBounds()) -> StatechartNetwork:
    """Draw one network; the same generator state always yields the same network."""
    gen = _Gen(rng, bounds)
    decls, events = gen.declarations()
    charts = tuple(gen.chart(f"C{k}", k, decls, events)
                   for k in range(1, rng.randint(1, bounds.max_charts) + 1))
    return StatechartNetwork(tuple(decls), charts)
