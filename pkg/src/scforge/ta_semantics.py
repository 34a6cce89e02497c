"""Discrete-time execution of timed-automata networks.

Clocks are non-negative integers. Two drivers are offered: :func:`ta_step`
follows the general nondeterministic rules (local move, binary handshake or
delay) and breaks ties by edge order; :func:`ta_run` drives a
lockstep-transformed network cycle by cycle so that it can be compared with
the statechart interpreter.

Channel guards are read as follows. ``c?`` holds when some other automaton
currently offers ``c``; ``c!`` is a synchronisation label and is neutral as a
guard conjunct. An edge that fires synchronises with every channel it
receives positively and that is on offer.
"""

from __future__ import annotations

from typing import Iterator

from .actions import apply_actions
from .automata import Edge, TANetwork
from .errors import Deadlock, InvariantViolation, NondeterminismError, TAError, TransformError
from .expr import Cmp, EvalContext, IntLit, Var, conjuncts, eval_expr
from .sc_semantics import EventEnv
from .status import ExecutionTrace, TAStatus, Valuation

__all__ = ["ta_initial_status", "ta_delay", "ta_step", "ta_run", "iter_ta_run",
           "max_delay", "ta_cycle", "discharge_timers"]

_TA_CTX_EMPTY = EvalContext(events=None, triggers=None)


def ta_initial_status(ta: TANetwork) -> TAStatus:
    locs = tuple(a.initial for a in ta.automata)
    val = Valuation((d.name, d.initial) for d in ta.variables if d.is_value)
    clocks = Valuation((c, 0) for c in ta.clocks)
    return TAStatus(locs, val, clocks)


def _env(status: TAStatus) -> dict:
    env = status.valuation.as_dict()
    env.update(status.clocks)
    return env


def _ctx(channels) -> EvalContext:
    return EvalContext(events=None, triggers=None, channels=frozenset(channels))


def _holds(expr, env, ctx) -> bool:
    return expr is None or bool(eval_expr(expr, env, ctx))


# -- delay ----------------------------------------------------------------------

def _upper_bounds(inv) -> list[tuple[str, int, bool]]:
    """``(clock, bound, strict)`` for each ``c <= k`` / ``c < k`` conjunct."""
    out = []
    for part in conjuncts(inv):
        if isinstance(part, Cmp) and isinstance(part.left, Var) and isinstance(part.right, IntLit):
            if part.op in ("<=", "<"):
                out.append((part.left.name, part.right.value, part.op == "<"))
    return out


def max_delay(ta: TANetwork, status: TAStatus) -> int | None:
    """Largest admissible delay from ``status``; ``None`` when unbounded."""
    best = None
    for a, loc in zip(ta.automata, status.locations):
        inv = a.location(loc).invariant
        if inv is None:
            continue
        for clock, bound, strict in _upper_bounds(inv):
            room = bound - status.clocks[clock] - (1 if strict else 0)
            best = room if best is None else min(best, room)
    return best


def _check_invariants(ta: TANetwork, status: TAStatus, what: str) -> None:
    env = _env(status)
    for a, loc in zip(ta.automata, status.locations):
        inv = a.location(loc).invariant
        if inv is not None and not eval_expr(inv, env, _TA_CTX_EMPTY):
            room = max_delay(ta, status)
            raise InvariantViolation(f"{what}: invariant of {a.name}.{loc} violated", max(room or 0, 0))


def ta_delay(ta: TANetwork, status: TAStatus, d: int) -> TAStatus:
    """Advance every clock by ``d`` if all active invariants keep holding."""
    if d < 0:
        raise ValueError("delay must be non-negative")
    if d == 0:
        return status
    room = max_delay(ta, status)
    if room is not None and d > room:
        raise InvariantViolation(f"delay {d} exceeds the admissible maximum {max(room, 0)}", max(room, 0))
    clocks = Valuation((c, v + d) for c, v in status.clocks.items())
    out = TAStatus(status.locations, status.valuation, clocks)
    # invariants need not be simple upper bounds, so check the result too
    _check_invariants(ta, out, f"delay {d}")
    return out


# -- firing -------------------------------------------------------------------

def _offers(ta: TANetwork, status: TAStatus, env: dict, allowed=None) -> dict[str, list]:
    """``channel -> [(automaton index, edge)]`` of enabled send edges."""
    offers: dict[str, list] = {}
    for i, (a, loc) in enumerate(zip(ta.automata, status.locations)):
        for e in a.outgoing(loc):
            ch = e.send
            if ch is None or (allowed is not None and not allowed(i, a, e)):
                continue
            if _holds(e.guard, env, _TA_CTX_EMPTY):
                offers.setdefault(ch, []).append((i, e))
    return offers


def _fire(ta: TANetwork, status: TAStatus, moves: list[tuple[int, Edge]]) -> TAStatus:
    """Apply the moves in order: receiver first, then its partners."""
    env = _env(status)
    clock_names = set(status.clocks)
    for _, e in moves:
        env = dict(apply_actions(e.action, env, ta.decls))
        for c in e.resets:
            env[c] = 0
    locs = list(status.locations)
    for i, e in moves:
        locs[i] = e.target
    val = Valuation((k, env[k]) for k in status.valuation)
    clocks = Valuation((c, env[c]) for c in status.clocks)
    if set(clocks) != clock_names:
        raise TAError("clock set changed during a step")
    out = TAStatus(tuple(locs), val, clocks)
    _check_invariants(ta, out, "after " + "+".join(e.id for _, e in moves))
    return out


def _candidates(ta: TANetwork, status: TAStatus) -> list[list[tuple[int, Edge]]]:
    env = _env(status)
    offers = _offers(ta, status, env)
    out = []
    for i, (a, loc) in enumerate(zip(ta.automata, status.locations)):
        for e in a.outgoing(loc):
            if e.send is not None:
                continue  # senders move only as partners
            others = {ch for ch, lst in offers.items() if any(j != i for j, _ in lst)}
            if not _holds(e.guard, env, _ctx(others)):
                continue
            partners = []
            for ch in sorted(e.receives & others):
                partners.append(next((j, s) for j, s in offers[ch] if j != i))
            out.append([(i, e)] + partners)
    return out


def ta_step(ta: TANetwork, status: TAStatus) -> tuple[TAStatus, str]:
    """One move of the general semantics.

    Picks the first eligible edge in (automaton, edge) order; the label ends
    in ``TIE`` when another edge was eligible too. With nothing eligible,
    time advances by one unit if the invariants allow it.
    """
    cands = _candidates(ta, status)
    if cands:
        moves = cands[0]
        label = "+".join(f"{ta.automata[i].name}.{e.id}" for i, e in moves)
        if len(cands) > 1:
            label += " TIE"
        return _fire(ta, status, moves), label
    room = max_delay(ta, status)
    if room is None or room >= 1:
        return ta_delay(ta, status, 1), "DELAY 1"
    raise Deadlock(f"no edge enabled and no delay admissible at {status}")


# -- lockstep driver ----------------------------------------------------------

def _lockstep_parts(ta: TANetwork):
    if ta.alpha is None or ta.alpha not in ta.decls:
        raise TransformError("network has no lockstep index; the lockstep rule was not applied")
    transformed = [i for i, a in enumerate(ta.automata) if a.role == "transformed"]
    event_of = {}
    for i, a in enumerate(ta.automata):
        if a.role == "event":
            for e in a.edges:
                if e.send:
                    event_of[i] = e.send
    return transformed, event_of


def discharge_timers(ta: TANetwork, status: TAStatus) -> TAStatus:
    """Let every timer automaton whose send is still enabled take it on its own.

    A timer send that no automaton consumed this cycle must still happen
    before time moves on, or its invariant would stop time.
    """
    env = _env(status)
    for i, a in enumerate(ta.automata):
        if a.role != "timer":
            continue
        for e in a.outgoing(status.locations[i]):
            if e.send is not None and _holds(e.guard, env, _TA_CTX_EMPTY):
                status = _fire(ta, status, [(i, e)])
                env = _env(status)
                break
    return status


def ta_cycle(ta: TANetwork, status: TAStatus, events, period: int = 1,
             parts=None) -> Iterator[tuple[TAStatus, str, int]]:
    """Yield ``(status, label, micro)`` for the n lockstep steps of one cycle,
    then the status after the end-of-cycle delay with micro 0."""
    transformed, event_of = parts or _lockstep_parts(ta)
    events = frozenset(events)
    alpha = ta.alpha
    n = len(transformed)

    def allowed(i, a, e):
        if a.role == "event":
            return event_of.get(i) in events
        return a.role == "timer"

    for step in range(1, n + 1):
        if status.valuation[alpha] != step:
            raise NondeterminismError(f"lockstep index is {status.valuation[alpha]}, expected {step}")
        env = _env(status)
        offers = _offers(ta, status, env, allowed)
        ctx = _ctx(offers)
        enabled = []
        for i in transformed:
            a = ta.automata[i]
            for e in a.outgoing(status.locations[i]):
                if _holds(e.guard, env, ctx):
                    enabled.append((i, e))
        if not enabled:
            raise Deadlock(f"step {step}: no edge enabled in {ta.automata[transformed[step - 1]].name}")
        if len(enabled) > 1:
            ids = ", ".join(f"{ta.automata[i].name}.{e.id}" for i, e in enabled)
            raise NondeterminismError(f"step {step}: several edges enabled: {ids}")
        i, e = enabled[0]
        if i != transformed[step - 1]:
            raise NondeterminismError(
                f"step {step}: {ta.automata[i].name} moved out of turn via {e.id}")
        moves = [(i, e)]
        for ch in sorted(e.receives & set(offers)):
            moves.append(offers[ch][0])
        status = _fire(ta, status, moves)
        yield status, e.id, step
    status = discharge_timers(ta, status)
    yield ta_delay(ta, status, period), "DELAY", 0


def iter_ta_run(ta: TANetwork, env: EventEnv, horizon: int) -> Iterator[tuple]:
    """Yield ``(status, label, (cycle, micro))``; the delay status is stamped ``(k+1, 0)``."""
    parts = _lockstep_parts(ta)
    for a in ta.automata:
        for loc in a.locations:
            if loc.invariant is None:
                continue
            for _, bound, _ in _upper_bounds(loc.invariant):
                if bound % env.cycle_period:
                    raise TAError(f"cycle period {env.cycle_period} does not divide the bound "
                                  f"{bound} of {a.name}.{loc.name}")
    status = ta_initial_status(ta)
    yield status, None, (0, 0)
    for k in range(horizon):
        for status, label, micro in ta_cycle(ta, status, env.events_at(k), env.cycle_period, parts):
            yield status, label, (k + 1, 0) if micro == 0 else (k, micro)


def ta_run(ta: TANetwork, env: EventEnv, horizon: int) -> ExecutionTrace:
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    it = iter_ta_run(ta, env, horizon)
    st, _, mark = next(it)
    trace = ExecutionTrace([st], [], [mark], tuple(a.name for a in ta.automata))
    for st, label, mark in it:
        trace.append(st, label, mark)
    return trace
