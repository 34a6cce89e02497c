"""Static well-formedness checks on a parsed (or programmatically built) network."""

from __future__ import annotations

from collections import Counter

from ..actions import check_actions
from ..errors import EvalError
from ..expr import TRUE, ChanRecv, ChanSend, Trigger, conjuncts, typecheck, walk
from ..statechart import StatechartNetwork
from .lexer import Diagnostic

__all__ = ["validate"]


def _diag(code: str, message: str, pos) -> Diagnostic:
    line, col = pos if pos else (1, 1)
    return Diagnostic(code, message, line, col)


def validate(net: StatechartNetwork) -> list[Diagnostic]:
    """Return one diagnostic per violated rule; empty means the network is usable."""
    out: list[Diagnostic] = []
    kinds = net.kinds

    names = Counter(d.name for d in net.variables)
    for d in net.variables:
        if names[d.name] > 1:
            out.append(_diag("DUPLICATE_NAME", f"{d.name!r} declared more than once", d.pos))
            names[d.name] = 1
        if d.kind == "int" and d.lo is not None and d.hi is not None and d.lo > d.hi:
            out.append(_diag("EMPTY_DOMAIN", f"{d.name!r} has an empty range", d.pos))
        elif d.is_value and not d.contains(d.initial):
            out.append(_diag("INIT_OUT_OF_RANGE", f"initial value of {d.name!r} lies outside its domain", d.pos))
        if d.kind in ("channel", "clock"):
            out.append(_diag("TYPE_MISMATCH", f"{d.kind} {d.name!r} cannot be declared in a statechart network", d.pos))

    prios = sorted(c.priority for c in net.charts)
    if prios != list(range(1, len(net.charts) + 1)):
        first = net.charts[0] if net.charts else None
        out.append(_diag("PRIORITY_GAP",
                         f"statechart priorities {prios} are not exactly 1..{len(net.charts)}",
                         first.pos if first else None))
    if [c.priority for c in net.charts] != prios:
        out.append(_diag("CHART_ORDER", "statecharts are not listed in priority order", None))

    chart_names = Counter(c.name for c in net.charts)
    tids = Counter(t.id for c in net.charts for t in c.transitions)
    for c in net.charts:
        if chart_names[c.name] > 1:
            out.append(_diag("DUPLICATE_NAME", f"statechart {c.name!r} declared more than once", c.pos))
            chart_names[c.name] = 1
        states = Counter(s.name for s in c.states)
        for s, k in states.items():
            if k > 1:
                out.append(_diag("DUPLICATE_NAME", f"state {s!r} declared twice in {c.name!r}", c.pos))
        if c.initial not in states:
            out.append(_diag("UNKNOWN_STATE", f"initial state {c.initial!r} is not declared", c.pos))
        for s in c.states:
            for acts in (s.entry, s.exit):
                try:
                    check_actions(acts, kinds)
                except EvalError as exc:
                    out.append(_diag("TYPE_MISMATCH", f"state {s.name!r}: {exc}", s.pos))

        init_out = c.outgoing(c.initial)
        if len(init_out) != 1:
            out.append(_diag("INITIAL_TRANSITION_COUNT",
                             f"initial state {c.initial!r} of {c.name!r} needs exactly one outgoing "
                             f"transition, has {len(init_out)}", c.pos))
        for t in init_out:
            if t.guard != TRUE:
                out.append(_diag("INITIAL_GUARD_NOT_TRUE",
                                 f"transition {t.id!r} leaves the initial state, so its guard must be true", t.pos))
            if t.action:
                out.append(_diag("INITIAL_ACTION_NOT_EMPTY",
                                 f"transition {t.id!r} leaves the initial state, so it carries no action", t.pos))

        seen: set[tuple[str, int]] = set()
        for t in c.transitions:
            if tids[t.id] > 1:
                out.append(_diag("DUPLICATE_NAME", f"transition id {t.id!r} used more than once", t.pos))
                tids[t.id] = 1
            for end in (t.source, t.target):
                if end not in states:
                    out.append(_diag("UNKNOWN_STATE", f"transition {t.id!r} refers to unknown state {end!r}", t.pos))
            if t.priority < 1:
                out.append(_diag("BAD_PRIORITY", f"transition {t.id!r} has non-positive priority", t.pos))
            if (t.source, t.priority) in seen:
                out.append(_diag("DUPLICATE_TRANSITION_PRIORITY",
                                 f"two transitions from {t.source!r} share priority {t.priority}", t.pos))
            seen.add((t.source, t.priority))
            try:
                if typecheck(t.guard, kinds) != "bool":
                    out.append(_diag("TYPE_MISMATCH", f"guard of {t.id!r} is not boolean", t.pos))
            except EvalError as exc:
                out.append(_diag("TYPE_MISMATCH", f"guard of {t.id!r}: {exc}", t.pos))
            for node in walk(t.guard):
                if isinstance(node, Trigger) and node.kind == "every" and node.amount == 0:
                    out.append(_diag("EVERY_ZERO", f"guard of {t.id!r} uses 'every 0'", t.pos))
                if isinstance(node, (ChanRecv, ChanSend)):
                    out.append(_diag("TYPE_MISMATCH", f"guard of {t.id!r} uses a channel label", t.pos))
            for part in conjuncts(t.guard):
                kinds_in = {type(n) for n in walk(part)}
                if ChanRecv in kinds_in and ChanSend in kinds_in:
                    out.append(_diag("CHANNEL_MIX", f"guard of {t.id!r} both sends and receives", t.pos))
            try:
                check_actions(t.action, kinds)
            except EvalError as exc:
                out.append(_diag("TYPE_MISMATCH", f"action of {t.id!r}: {exc}", t.pos))

    tid_seen: set[str] = set()
    for site in net.trigger_sites:
        if not site.trigger.tid or site.trigger.tid in tid_seen:
            out.append(_diag("TRIGGER_ID", f"trigger in {site.transition!r} lacks a unique occurrence id", None))
        tid_seen.add(site.trigger.tid)
    return out
