"""Guard and value expressions.

Expressions are immutable trees. The same node set serves both sides of the
toolkit: statechart guards use :class:`EventRef` and :class:`Trigger` atoms,
timed-automaton guards use :class:`ChanRecv` / :class:`ChanSend` atoms in their
place once the event and timing-trigger rules have run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping

from .errors import EvalError, TypeMismatch, UnboundVariable

__all__ = [
    "Expr", "IntLit", "BoolLit", "Var", "EventRef", "ChanRecv", "ChanSend",
    "Trigger", "Not", "Neg", "And", "Or", "Cmp", "Arith", "TRUE", "FALSE",
    "EvalContext", "eval_expr", "to_text", "typecheck", "conjuncts", "and_all",
    "walk", "transform", "channel_atoms", "positive_channels",
]


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, slots=True)
class IntLit(Expr):
    value: int


@dataclass(frozen=True, slots=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True, slots=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class EventRef(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class ChanRecv(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class ChanSend(Expr):
    name: str


@dataclass(frozen=True, slots=True)
class Trigger(Expr):
    """``after N`` / ``every N`` timing trigger.

    ``tid`` identifies one occurrence inside a network; two syntactically equal
    triggers in different guards are different timers.
    """

    kind: str  # "after" | "every"
    amount: int
    tid: str = field(default="")


@dataclass(frozen=True, slots=True)
class Not(Expr):
    operand: Expr


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True, slots=True)
class And(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Or(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Cmp(Expr):
    op: str  # < <= == >= > !=
    left: Expr
    right: Expr


@dataclass(frozen=True, slots=True)
class Arith(Expr):
    op: str  # + - * /
    left: Expr
    right: Expr


TRUE = BoolLit(True)
FALSE = BoolLit(False)

CMP_OPS = ("<", "<=", "==", ">=", ">", "!=")
ARITH_OPS = ("+", "-", "*", "/")
ATOMS = (IntLit, BoolLit, Var, EventRef, ChanRecv, ChanSend, Trigger)


@dataclass(frozen=True)
class EvalContext:
    """What the environment says about the current instant.

    ``events`` and ``triggers`` are ``None`` on the timed-automata side, where
    such atoms must already have been rewritten to channel receives.
    """

    events: frozenset | None = frozenset()
    triggers: frozenset | None = frozenset()
    channels: frozenset = frozenset()


EMPTY_CONTEXT = EvalContext()


# -- evaluation ---------------------------------------------------------------

def _tdiv(a: int, b: int) -> int:
    if b == 0:
        raise EvalError("integer division by zero")
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


_CMP = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    ">": lambda a, b: a > b,
    "!=": lambda a, b: a != b,
}
_ARITH = {
    "+": lambda a, b: a + b,
    "-": lambda a, b: a - b,
    "*": lambda a, b: a * b,
    "/": _tdiv,
}

Compiled = Callable[[Mapping, EvalContext], object]


@lru_cache(maxsize=None)
def _compile(e: Expr) -> Compiled:
    # Closures avoid re-dispatching on node type for every evaluation; the
    # interpreters evaluate the same few hundred guards millions of times.
    if isinstance(e, (IntLit, BoolLit)):
        v = e.value
        return lambda env, ctx: v
    if isinstance(e, Var):
        name = e.name

        def var(env, ctx):
            try:
                return env[name]
            except KeyError:
                raise UnboundVariable(name) from None
        return var
    if isinstance(e, EventRef):
        name = e.name

        def event(env, ctx):
            if ctx.events is None:
                raise TypeMismatch(f"event {name!r} referenced outside statechart semantics")
            return name in ctx.events
        return event
    if isinstance(e, Trigger):
        tid, label = e.tid, to_text(e)

        def trigger(env, ctx):
            if ctx.triggers is None:
                raise TypeMismatch(f"timing trigger {label!r} referenced outside statechart semantics")
            return tid in ctx.triggers
        return trigger
    if isinstance(e, ChanRecv):
        name = e.name
        return lambda env, ctx: name in ctx.channels
    if isinstance(e, ChanSend):
        # A send atom is a synchronisation label; whether the send happens is
        # decided by matching, so as a guard conjunct it is neutral.
        return lambda env, ctx: True
    if isinstance(e, Not):
        f = _compile(e.operand)
        return lambda env, ctx: not f(env, ctx)
    if isinstance(e, Neg):
        f = _compile(e.operand)
        return lambda env, ctx: -f(env, ctx)
    if isinstance(e, And):
        f, g = _compile(e.left), _compile(e.right)
        return lambda env, ctx: bool(f(env, ctx)) and bool(g(env, ctx))
    if isinstance(e, Or):
        f, g = _compile(e.left), _compile(e.right)
        return lambda env, ctx: bool(f(env, ctx)) or bool(g(env, ctx))
    if isinstance(e, Cmp):
        f, g, op = _compile(e.left), _compile(e.right), _CMP[e.op]
        return lambda env, ctx: op(f(env, ctx), g(env, ctx))
    if isinstance(e, Arith):
        f, g, op = _compile(e.left), _compile(e.right), _ARITH[e.op]
        return lambda env, ctx: op(f(env, ctx), g(env, ctx))
    raise TypeError(f"not an expression node: {e!r}")


def eval_expr(expr: Expr, env: Mapping, ctx: EvalContext = EMPTY_CONTEXT):
    """Evaluate ``expr`` against variable values ``env`` and environment ``ctx``.

    Pure: neither argument is modified.
    """
    return _compile(expr)(env, ctx)


# -- type checking ------------------------------------------------------------

def typecheck(expr: Expr, kinds: Mapping[str, str]) -> str:
    """Return ``"int"`` or ``"bool"`` for ``expr``.

    ``kinds`` maps variable names to their declared kind (``int``, ``bool``,
    ``clock``, ``event``, ``channel``).
    """
    if isinstance(expr, IntLit):
        return "int"
    if isinstance(expr, BoolLit):
        return "bool"
    if isinstance(expr, Var):
        kind = kinds.get(expr.name)
        if kind is None:
            raise UnboundVariable(expr.name)
        if kind in ("int", "clock"):
            return "int"
        if kind == "bool":
            return "bool"
        raise TypeMismatch(f"{expr.name!r} is a {kind}, not a value")
    if isinstance(expr, EventRef):
        if kinds.get(expr.name) not in ("event",):
            raise UnboundVariable(expr.name)
        return "bool"
    if isinstance(expr, (ChanRecv, ChanSend)):
        if kinds.get(expr.name) != "channel":
            raise UnboundVariable(expr.name)
        return "bool"
    if isinstance(expr, Trigger):
        if expr.amount < 0:
            raise TypeMismatch("timing trigger amount must be non-negative")
        return "bool"
    if isinstance(expr, Not):
        _expect(expr.operand, "bool", kinds, "!")
        return "bool"
    if isinstance(expr, Neg):
        _expect(expr.operand, "int", kinds, "-")
        return "int"
    if isinstance(expr, (And, Or)):
        op = "&&" if isinstance(expr, And) else "||"
        _expect(expr.left, "bool", kinds, op)
        _expect(expr.right, "bool", kinds, op)
        return "bool"
    if isinstance(expr, Cmp):
        lt, rt = typecheck(expr.left, kinds), typecheck(expr.right, kinds)
        if lt != rt:
            raise TypeMismatch(f"cannot compare {lt} with {rt} in {to_text(expr)}")
        if lt == "bool" and expr.op not in ("==", "!="):
            raise TypeMismatch(f"ordering comparison on booleans in {to_text(expr)}")
        return "bool"
    if isinstance(expr, Arith):
        _expect(expr.left, "int", kinds, expr.op)
        _expect(expr.right, "int", kinds, expr.op)
        return "int"
    raise TypeError(f"not an expression node: {expr!r}")


def _expect(e: Expr, want: str, kinds, op: str) -> None:
    got = typecheck(e, kinds)
    if got != want:
        raise TypeMismatch(f"operator {op} expects {want}, got {got} in {to_text(e)}")


# -- structure helpers --------------------------------------------------------

def walk(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    yield expr
    if isinstance(expr, (Not, Neg)):
        yield from walk(expr.operand)
    elif isinstance(expr, (And, Or, Cmp, Arith)):
        yield from walk(expr.left)
        yield from walk(expr.right)


def transform(expr: Expr, fn: Callable[[Expr], Expr | None]) -> Expr:
    """Bottom-up rewrite; ``fn`` returns a replacement node or ``None``."""
    if isinstance(expr, (Not, Neg)):
        inner = transform(expr.operand, fn)
        if inner is not expr.operand:
            expr = type(expr)(inner)
    elif isinstance(expr, (And, Or)):
        l, r = transform(expr.left, fn), transform(expr.right, fn)
        if l is not expr.left or r is not expr.right:
            expr = type(expr)(l, r)
    elif isinstance(expr, (Cmp, Arith)):
        l, r = transform(expr.left, fn), transform(expr.right, fn)
        if l is not expr.left or r is not expr.right:
            expr = type(expr)(expr.op, l, r)
    out = fn(expr)
    return expr if out is None else out


def conjuncts(expr: Expr) -> list[Expr]:
    """Flatten the left spine of an ``&&`` chain."""
    out: list[Expr] = []
    while isinstance(expr, And):
        out.append(expr.right)
        expr = expr.left
    out.append(expr)
    out.reverse()
    return out


def and_all(parts) -> Expr:
    """Left-associated conjunction; ``true`` for no parts."""
    parts = list(parts)
    if not parts:
        return TRUE
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def channel_atoms(expr: Expr) -> list[Expr]:
    return [n for n in walk(expr) if isinstance(n, (ChanRecv, ChanSend))]


def positive_channels(expr: Expr, positive: bool = True) -> set[str]:
    """Names of channel receives that occur under an even number of negations."""
    if isinstance(expr, ChanRecv):
        return {expr.name} if positive else set()
    if isinstance(expr, Not):
        return positive_channels(expr.operand, not positive)
    if isinstance(expr, (And, Or)):
        return positive_channels(expr.left, positive) | positive_channels(expr.right, positive)
    return set()


# -- printing -----------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3, Cmp: 4}
_ARITH_PREC = {"+": 5, "-": 5, "*": 6, "/": 6}


def _prec(e: Expr) -> int:
    if isinstance(e, Arith):
        return _ARITH_PREC[e.op]
    if isinstance(e, Neg):
        return 7
    return _PREC.get(type(e), 8)


def to_text(e: Expr) -> str:
    """Canonical concrete syntax; parsing the result yields an equal tree."""
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, (Var, EventRef)):
        return e.name
    if isinstance(e, ChanRecv):
        return f"{e.name}?"
    if isinstance(e, ChanSend):
        return f"{e.name}!"
    if isinstance(e, Trigger):
        return f"{e.kind} {e.amount}s"
    if isinstance(e, Not):
        inner = to_text(e.operand)
        return f"!{inner}" if isinstance(e.operand, ATOMS) else f"!({inner})"
    if isinstance(e, Neg):
        inner = to_text(e.operand)
        # "-5" reads back as a negative literal, so a negated literal keeps parens
        bare = isinstance(e.operand, ATOMS) and not isinstance(e.operand, IntLit)
        return f"-{inner}" if bare else f"-({inner})"
    if isinstance(e, Or):
        left = _wrap(e.left, lambda x: isinstance(x, And))
        right = _wrap(e.right, lambda x: isinstance(x, (And, Or)))
        return f"{left} || {right}"
    if isinstance(e, And):
        left = _wrap(e.left, lambda x: isinstance(x, Or))
        right = _wrap(e.right, lambda x: isinstance(x, (And, Or)))
        return f"{left} && {right}"
    if isinstance(e, Cmp):
        left = _wrap(e.left, lambda x: _prec(x) <= 4)
        right = _wrap(e.right, lambda x: _prec(x) <= 4)
        return f"{left} {e.op} {right}"
    if isinstance(e, Arith):
        p = _ARITH_PREC[e.op]
        left = _wrap(e.left, lambda x: _prec(x) < p)
        right = _wrap(e.right, lambda x: _prec(x) <= p)
        return f"{left} {e.op} {right}"
    raise TypeError(f"not an expression node: {e!r}")


def _wrap(e: Expr, needs_parens) -> str:
    s = to_text(e)
    return f"({s})" if needs_parens(e) else s
