"""Statechart network to timed-automata network, one rule at a time.

Every rule is a pure function ``(net, ta, tmap) -> (ta, tmap)``. The network
carries a stage marker so rules run in order and at most once.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Iterable

from .actions import ClockReset, IncIndex
from .automata import Automaton, Edge, Location, TANetwork, TransformMap
from .errors import TransformError
from .expr import (TRUE, And, ChanRecv, ChanSend, Cmp, EventRef, Expr, IntLit, Not,
                   Trigger, Var, and_all, transform)
from .statechart import StatechartNetwork
from .status import VarDecl

__all__ = [
    "rule_initialize", "rule_actions", "rule_guards", "rule_events",
    "rule_timing_triggers", "rule_transition_priority", "rule_sync_lockstep",
    "transform_all", "transform_stages", "RULES",
]


def _require(ta: TANetwork, rule: int) -> None:
    if ta.stage >= rule:
        raise TransformError(f"rule {rule} cannot run on a stage-{ta.stage} network")


class _Names:
    """Hands out names not yet used in one namespace."""

    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)

    def fresh(self, base: str) -> str:
        name, k = base, 2
        while name in self.taken:
            name = f"{base}_{k}"
            k += 1
        self.taken.add(name)
        return name


def _global_names(net: StatechartNetwork, ta: TANetwork) -> _Names:
    return _Names([d.name for d in ta.variables] + [a.name for a in ta.automata]
                  + [c.name for c in net.charts])


def _map_edges(ta: TANetwork, fn, roles=("transformed",)) -> TANetwork:
    autos = []
    for a in ta.automata:
        if a.role in roles:
            a = replace(a, edges=tuple(fn(a, e) for e in a.edges))
        autos.append(a)
    return replace(ta, automata=tuple(autos))


def _source_transitions(net: StatechartNetwork, tmap: TransformMap) -> dict:
    """``(automaton, edge id) -> (chart, transition)`` for the chart images."""
    out = {}
    for (chart, tid), target in tmap.transitions.items():
        c = net.chart(chart)
        for t in c.transitions:
            if t.id == tid:
                out[target] = (c, t)
    return out


# -- Rule 1 -------------------------------------------------------------------

def rule_initialize(net: StatechartNetwork) -> tuple[TANetwork, TransformMap]:
    """One automaton per chart with the same locations and bare edges."""
    if not isinstance(net, StatechartNetwork):
        raise TransformError("the first rule takes a statechart network")
    tmap = TransformMap()
    autos = []
    for c in net.charts:
        locs = tuple(Location(s.name) for s in c.states)
        edges = tuple(Edge(t.id, t.source, None, (), (), t.target) for t in c.transitions)
        autos.append(Automaton(c.name, "transformed", locs, c.initial, edges))
        tmap.charts[c.name] = c.name
        for s in c.states:
            tmap.states[(c.name, s.name)] = (c.name, s.name)
        for t in c.transitions:
            tmap.transitions[(c.name, t.id)] = (c.name, t.id)
    for d in net.variables:
        tmap.variables[d.name] = d.name
    return TANetwork(tuple(net.variables), tuple(autos), stage=1), tmap


# -- Rule 2 -------------------------------------------------------------------

def rule_actions(net, ta, tmap):
    """Edge action becomes ``<exit of source; transition action; entry of target>``."""
    _require(ta, 2)
    src = _source_transitions(net, tmap)

    def fold(a, e):
        c, t = src[(a.name, e.id)]
        seq = c.state(t.source).exit + t.action + c.state(t.target).entry
        return replace(e, action=tuple(seq))

    return replace(_map_edges(ta, fold), stage=2), tmap


# -- Rule 3 -------------------------------------------------------------------

def rule_guards(net, ta, tmap):
    """Edge guard becomes the transition guard, events and triggers still symbolic."""
    _require(ta, 3)
    src = _source_transitions(net, tmap)

    def copy(a, e):
        return replace(e, guard=src[(a.name, e.id)][1].guard)

    return replace(_map_edges(ta, copy), stage=3), tmap


# -- Rule 4 -------------------------------------------------------------------

def rule_events(net, ta, tmap):
    """Events become channels, each driven by a one-location sender automaton."""
    _require(ta, 4)
    tmap = tmap.copy()
    names = _global_names(net, ta)
    events = [d.name for d in ta.variables if d.kind == "event"]
    variables = tuple(VarDecl(d.name, "channel", pos=d.pos) if d.kind == "event" else d
                      for d in ta.variables)

    def rewrite(a, e):
        if e.guard is None:
            return e
        g = transform(e.guard, lambda n: ChanRecv(n.name) if isinstance(n, EventRef) else None)
        return replace(e, guard=g)

    ta = _map_edges(replace(ta, variables=variables), rewrite)
    autos = list(ta.automata)
    for ev in events:
        aname = names.fresh(f"U_{ev}")
        loc = f"s0_{ev}"
        edge = Edge(f"snd_{ev}", loc, ChanSend(ev), (), (), loc)
        autos.append(Automaton(aname, "event", (Location(loc),), loc, (edge,)))
        tmap.aux += [("automaton", aname), ("location", (aname, loc)), ("edge", (aname, edge.id))]
    return replace(ta, automata=tuple(autos), stage=4), tmap


# -- Rule 5 -------------------------------------------------------------------

def rule_timing_triggers(net, ta, tmap):
    """Each trigger occurrence gets a clock, a channel and a clocked sender automaton.

    ``every`` occurrences are numbered first, then ``after`` ones, each group in
    network order.
    """
    _require(ta, 5)
    tmap = tmap.copy()
    names = _global_names(net, ta)
    sites = [s for s in net.trigger_sites if s.trigger.kind == "every"]
    sites += [s for s in net.trigger_sites if s.trigger.kind == "after"]
    variables = list(ta.variables)
    autos = list(ta.automata)
    clock_no = 1
    for site in sites:
        trig = site.trigger
        chan = names.fresh(f"{trig.kind}{trig.amount}s")
        while f"c{clock_no}" in names.taken:
            clock_no += 1
        clock = names.fresh(f"c{clock_no}")
        aname = names.fresh(f"U_{chan}")
        tmap.triggers[trig.tid] = chan
        variables += [VarDecl(chan, "channel"), VarDecl(clock, "clock", 0)]
        tmap.aux += [("variable", chan), ("variable", clock), ("automaton", aname)]

        s0 = f"s0_{chan}"
        bound = Cmp("<=", Var(clock), IntLit(trig.amount))
        guard = And(ChanSend(chan), Cmp("==", Var(clock), IntLit(trig.amount)))
        if trig.kind == "every":
            locs = (Location(s0, bound),)
            edge = Edge(f"snd_{chan}", s0, guard, (ClockReset(clock),), (clock,), s0)
        else:
            s1 = f"s1_{chan}"
            locs = (Location(s0, bound), Location(s1))
            edge = Edge(f"snd_{chan}", s0, guard, (ClockReset(clock),), (clock,), s1)
        autos.append(Automaton(aname, "timer", locs, s0, (edge,)))
        tmap.aux += [("location", (aname, l.name)) for l in locs]
        tmap.aux.append(("edge", (aname, edge.id)))

    def rewrite(a, e):
        if e.guard is None:
            return e
        g = transform(e.guard, lambda n: ChanRecv(tmap.triggers[n.tid]) if isinstance(n, Trigger) else None)
        return replace(e, guard=g)

    ta = replace(ta, variables=tuple(variables), automata=tuple(autos))
    return replace(_map_edges(ta, rewrite), stage=5), tmap


# -- Rule 6 -------------------------------------------------------------------

def rule_transition_priority(net, ta, tmap):
    """Conjoin the negation of every higher-priority sibling guard."""
    _require(ta, 6)
    src = _source_transitions(net, tmap)
    autos = []
    for a in ta.automata:
        if a.role != "transformed":
            autos.append(a)
            continue
        prio = {e.id: src[(a.name, e.id)][1].priority for e in a.edges}
        before = {e.id: e.guard if e.guard is not None else TRUE for e in a.edges}
        edges = []
        for e in a.edges:
            higher = sorted((x for x in a.outgoing(e.source) if prio[x.id] < prio[e.id]),
                            key=lambda x: prio[x.id])
            if higher:
                parts = [before[e.id]] + [Not(before[x.id]) for x in higher]
                e = replace(e, guard=and_all(parts))
            edges.append(e)
        autos.append(replace(a, edges=tuple(edges)))
    return replace(ta, automata=tuple(autos), stage=6), tmap


# -- Rule 7 -------------------------------------------------------------------

def rule_sync_lockstep(net, ta, tmap):
    """Round-robin lockstep through a shared index plus stutter self-loops."""
    _require(ta, 7)
    tmap = tmap.copy()
    names = _global_names(net, ta)
    n = len(net.charts)
    alpha = names.fresh("alpha")
    tmap.aux.append(("variable", alpha))
    rho = {c.name: c.priority for c in net.charts}
    inc = IncIndex(alpha, n)
    autos = []
    for a in ta.automata:
        if a.role != "transformed":
            autos.append(a)
            continue
        chart = next(c for c, target in tmap.charts.items() if target == a.name)
        turn = Cmp("==", Var(alpha), IntLit(rho[chart]))
        edge_ids = _Names(e.id for e in a.edges)
        loops = []
        for loc in a.locations:
            guards = [e.guard if e.guard is not None else TRUE for e in a.outgoing(loc.name)]
            g = and_all(Not(x) for x in guards) if guards else TRUE
            eid = edge_ids.fresh(f"stay_{loc.name}")
            loops.append(Edge(eid, loc.name, g, (), (), loc.name))
            tmap.aux.append(("edge", (a.name, eid)))
        edges = tuple(
            replace(e, guard=And(e.guard if e.guard is not None else TRUE, turn),
                    action=e.action + (inc,))
            for e in a.edges + tuple(loops))
        autos.append(replace(a, edges=edges))
    variables = ta.variables + (VarDecl(alpha, "int", 1, 1, n),)
    return TANetwork(variables, tuple(autos), stage=7, alpha=alpha), tmap


RULES = {
    2: rule_actions,
    3: rule_guards,
    4: rule_events,
    5: rule_timing_triggers,
    6: rule_transition_priority,
    7: rule_sync_lockstep,
}


def transform_stages(net: StatechartNetwork, skip_rules: Iterable[int] = ()):
    """Return ``(stages, tmap)`` where ``stages[k-1]`` is the network after rule k.

    ``skip_rules`` leaves the named rules (2 to 7) out; the stage it would
    have produced is a copy of the previous one. Meant for mutation tests.
    """
    skip = set(skip_rules)
    if not skip <= set(RULES):
        raise ValueError(f"only rules 2..7 can be skipped, got {sorted(skip)}")
    ta, tmap = rule_initialize(net)
    stages = [ta]
    for k in range(2, 8):
        if k not in skip:
            ta, tmap = RULES[k](net, ta, tmap)
        stages.append(ta)
    return stages, tmap


def transform_all(net: StatechartNetwork, skip_rules: Iterable[int] = ()) -> tuple[TANetwork, TransformMap]:
    """Apply rules 1 through 7 in order."""
    stages, tmap = transform_stages(net, skip_rules)
    return stages[-1], tmap
