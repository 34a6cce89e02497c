"""Action sequences: assignments, clock resets and the lockstep index update."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import DomainOverflow, TypeMismatch, UnboundVariable
from .expr import EMPTY_CONTEXT, Expr, eval_expr, to_text, typecheck
from .status import Valuation, VarDecl

__all__ = ["Assign", "ClockReset", "IncIndex", "Action", "apply_actions",
           "actions_text", "check_actions"]


@dataclass(frozen=True, slots=True)
class Assign:
    var: str
    value: Expr

    def __str__(self) -> str:
        return f"{self.var} = {to_text(self.value)}"


@dataclass(frozen=True, slots=True)
class ClockReset:
    clock: str

    def __str__(self) -> str:
        return f"{self.clock} = 0"


@dataclass(frozen=True, slots=True)
class IncIndex:
    """Round-robin update of the execution index over ``1..n``.

    The defining formula ``(alpha + 1) mod n`` would map ``alpha = n`` to 0 and
    leave the index outside ``1..n``; this computes ``alpha mod n + 1`` instead.
    """

    var: str
    n: int

    def __str__(self) -> str:
        return f"Inc({self.var})"

    def next(self, value: int) -> int:
        return value % self.n + 1


Action = Assign | ClockReset | IncIndex


def actions_text(seq) -> str:
    """``NULL`` for the empty sequence, otherwise ``<a; b; ...>``."""
    if not seq:
        return "NULL"
    return "<" + "; ".join(str(a) for a in seq) + ">"


def apply_actions(seq, valuation: Mapping, decls: Mapping[str, VarDecl] | None = None) -> Valuation:
    """Run ``seq`` left to right as one atomic step and return the new valuation.

    Each assignment sees the effect of the ones before it. With ``decls`` given,
    every assigned value is checked against its declared domain.
    """
    current = dict(valuation)
    for act in seq:
        if isinstance(act, Assign):
            if act.var not in current:
                raise UnboundVariable(act.var)
            value = eval_expr(act.value, current, EMPTY_CONTEXT)
            if decls is not None:
                d = decls.get(act.var)
                if d is not None and not d.contains(value):
                    if d.kind == "int" and isinstance(value, int) and not isinstance(value, bool):
                        raise DomainOverflow(act.var, value, d.lo, d.hi)
                    raise TypeMismatch(f"cannot store {value!r} in {d.kind} {act.var}")
            current[act.var] = value
        elif isinstance(act, ClockReset):
            # clocks are tracked outside the variable valuation on the TA side
            if act.clock in current:
                current[act.clock] = 0
        elif isinstance(act, IncIndex):
            if act.var not in current:
                raise UnboundVariable(act.var)
            current[act.var] = act.next(current[act.var])
        else:
            raise TypeError(f"not an action: {act!r}")
    return Valuation(current)


def check_actions(seq, kinds: Mapping[str, str]) -> None:
    """Static well-typedness of an action sequence."""
    for act in seq:
        if isinstance(act, Assign):
            kind = kinds.get(act.var)
            if kind is None:
                raise UnboundVariable(act.var)
            if kind not in ("int", "bool"):
                raise TypeMismatch(f"cannot assign to {kind} {act.var}")
            got = typecheck(act.value, kinds)
            if got != kind:
                raise TypeMismatch(f"assigning {got} to {kind} {act.var}")
        elif isinstance(act, ClockReset):
            if kinds.get(act.clock) != "clock":
                raise TypeMismatch(f"{act.clock} is not a clock")
        elif isinstance(act, IncIndex):
            if kinds.get(act.var) != "int":
                raise TypeMismatch(f"{act.var} is not an int")
