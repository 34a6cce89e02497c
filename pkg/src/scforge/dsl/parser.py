"""Recursive-descent parser for `.scn` network documents and guard expressions."""

from __future__ import annotations

from typing import Callable, Mapping

from ..actions import Assign
from ..errors import DSLError, EvalError
from ..expr import (And, Arith, BoolLit, ChanRecv, ChanSend, Cmp, EventRef, Expr,
                    IntLit, Neg, Not, Or, Trigger, Var, typecheck)
from ..statechart import State, Statechart, StatechartNetwork, Transition, number_triggers
from ..status import VarDecl
from .lexer import Diagnostic, Token, tokenize

__all__ = ["TokenStream", "ExprParser", "parse_network", "parse_expr"]

_CMP = ("<", "<=", "==", ">=", ">", "!=")
_KEYWORDS = {"true", "false", "after", "every"}


class _Abort(Exception):
    """Unrecoverable syntax error; the diagnostic is already recorded."""


class TokenStream:
    def __init__(self, tokens: list[Token], diags: list[Diagnostic]):
        self.tokens = tokens
        self.i = 0
        self.diags = diags

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "IDENT") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.i += 1
        return t

    def accept(self, text: str) -> Token | None:
        return self.advance() if self.at(text) else None

    def fail(self, message: str, tok: Token | None = None, code: str = "SYNTAX_ERROR"):
        tok = tok or self.tok
        self.diags.append(Diagnostic(code, message, tok.line, tok.col))
        raise _Abort

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.fail(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "IDENT":
            self.fail(f"expected {what}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def integer(self) -> int:
        neg = self.accept("-") is not None
        if self.tok.kind != "INT":
            self.fail(f"expected integer, found {self.tok.text or 'end of input'!r}")
        v = int(self.advance().text)
        return -v if neg else v


class ExprParser:
    """Precedence climbing over ``|| && ! cmp +- */ unary atom``.

    ``kinds`` resolves identifiers: ``event`` names become presence atoms,
    ``channel`` names may be followed by ``?``/``!``, values become variables.
    Unknown names are reported and parsing continues.
    """

    def __init__(self, ts: TokenStream, kinds: Mapping[str, str],
                 on_trigger: Callable[[Trigger], Trigger] | None = None):
        self.ts = ts
        self.kinds = kinds
        self.on_trigger = on_trigger

    def parse(self) -> Expr:
        return self.disjunction()

    def disjunction(self) -> Expr:
        e = self.conjunction()
        while self.ts.accept("||"):
            e = Or(e, self.conjunction())
        return e

    def conjunction(self) -> Expr:
        e = self.negation()
        while self.ts.accept("&&"):
            e = And(e, self.negation())
        return e

    def negation(self) -> Expr:
        # `!x > 0` reads as `!(x > 0)`: negation binds looser than comparison
        if self.ts.accept("!"):
            return Not(self.negation())
        return self.comparison()

    def comparison(self) -> Expr:
        e = self.sum()
        if self.ts.tok.kind == "OP" and self.ts.tok.text in _CMP:
            op = self.ts.advance().text
            e = Cmp(op, e, self.sum())
            if self.ts.tok.kind == "OP" and self.ts.tok.text in _CMP:
                self.ts.fail("comparisons do not chain; add parentheses")
        return e

    def sum(self) -> Expr:
        e = self.term()
        while self.ts.at("+") or self.ts.at("-"):
            op = self.ts.advance().text
            e = Arith(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.ts.at("*") or self.ts.at("/"):
            op = self.ts.advance().text
            e = Arith(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.ts.accept("-"):
            if self.ts.tok.kind == "INT":
                return IntLit(-int(self.ts.advance().text))
            return Neg(self.unary())
        if self.ts.at("!"):
            # allows `x == !b`
            return self.negation()
        return self.atom()

    def atom(self) -> Expr:
        ts = self.ts
        tok = ts.tok
        if tok.kind == "INT":
            ts.advance()
            return IntLit(int(tok.text))
        if ts.accept("("):
            e = self.disjunction()
            ts.expect(")")
            return e
        if tok.kind != "IDENT":
            ts.fail(f"expected expression, found {tok.text or 'end of input'!r}")
        ts.advance()
        if tok.text == "true":
            return BoolLit(True)
        if tok.text == "false":
            return BoolLit(False)
        if tok.text in ("after", "every"):
            return self.trigger(tok)
        name = tok.text
        kind = self.kinds.get(name)
        if ts.at("?") or ts.at("!"):
            # `a != b` is lexed as one token, so a bare `!` here is a send label
            mark = ts.advance().text
            if kind != "channel":
                ts.diags.append(Diagnostic("UNKNOWN_VARIABLE", f"{name!r} is not a channel", tok.line, tok.col))
            return ChanRecv(name) if mark == "?" else ChanSend(name)
        if kind is None:
            ts.diags.append(Diagnostic("UNKNOWN_VARIABLE", f"undeclared name {name!r}", tok.line, tok.col))
            return Var(name)
        if kind == "event":
            return EventRef(name)
        if kind == "channel":
            ts.diags.append(Diagnostic("TYPE_MISMATCH", f"channel {name!r} needs '?' or '!'", tok.line, tok.col))
        return Var(name)

    def trigger(self, tok: Token) -> Expr:
        ts = self.ts
        if ts.tok.kind == "TIME":
            amount = int(ts.advance().text[:-1])
        elif ts.tok.kind == "INT":
            amount = int(ts.advance().text)
            if ts.at("s") and ts.tok.col == ts.tokens[ts.i - 1].col + len(ts.tokens[ts.i - 1].text):
                ts.advance()
        else:
            ts.fail(f"expected a duration after {tok.text!r}")
        node = Trigger(tok.text, amount)
        return self.on_trigger(node) if self.on_trigger else node


def parse_expr(text: str, kinds: Mapping[str, str]) -> Expr:
    """Parse a standalone expression; raises :class:`DSLError` on any problem."""
    diags: list[Diagnostic] = []
    ts = TokenStream(tokenize(text), diags)
    try:
        e = ExprParser(ts, kinds).parse()
        if ts.tok.kind != "EOF":
            ts.fail(f"unexpected {ts.tok.text!r} after expression")
    except _Abort:
        pass
    if diags:
        raise DSLError(diags)
    return e


# -- network documents --------------------------------------------------------

class _NetworkParser:
    def __init__(self, text: str):
        self.diags: list[Diagnostic] = []
        self.ts = TokenStream(tokenize(text), self.diags)
        self.decls: list[VarDecl] = []
        self.kinds: dict[str, str] = {}
        self.charts: list[Statechart] = []
        self.transition_ids: set[str] = set()

    def error(self, code: str, message: str, pos) -> None:
        line, col = pos if pos else (1, 1)
        self.diags.append(Diagnostic(code, message, line, col))

    def run(self) -> StatechartNetwork | None:
        ts = self.ts
        try:
            while ts.tok.kind != "EOF":
                if ts.at("var"):
                    self.var_decl()
                elif ts.at("event"):
                    self.event_decl()
                elif ts.at("statechart"):
                    self.chart()
                else:
                    ts.fail(f"expected 'var', 'event' or 'statechart', found {ts.tok.text!r}")
            if not self.charts:
                ts.fail("document declares no statechart")
        except _Abort:
            return None
        charts = sorted(self.charts, key=lambda c: c.priority)
        return StatechartNetwork(tuple(self.decls), tuple(charts))

    def declare(self, d: VarDecl) -> None:
        if d.name in self.kinds:
            self.error("DUPLICATE_NAME", f"{d.name!r} declared twice", d.pos)
            return
        if d.name in _KEYWORDS:
            self.error("SYNTAX_ERROR", f"{d.name!r} is reserved", d.pos)
            return
        self.decls.append(d)
        self.kinds[d.name] = d.kind

    def var_decl(self) -> None:
        ts = self.ts
        ts.expect("var")
        name = ts.ident("variable name")
        ts.expect(":")
        lo = hi = None
        if ts.accept("int"):
            kind = "int"
            if ts.accept("["):
                lo = ts.integer()
                ts.expect("..")
                hi = ts.integer()
                ts.expect("]")
                if lo > hi:
                    self.error("SYNTAX_ERROR", f"empty range {lo}..{hi}", name.pos)
        elif ts.accept("bool"):
            kind = "bool"
        else:
            ts.fail(f"expected 'int' or 'bool', found {ts.tok.text!r}")
        if ts.accept("="):
            if kind == "bool":
                if ts.at("true") or ts.at("false"):
                    initial = ts.advance().text == "true"
                else:
                    ts.fail("expected 'true' or 'false'")
            else:
                initial = ts.integer()
        else:
            initial = False if kind == "bool" else (lo if lo is not None and lo > 0 else 0)
        ts.expect(";")
        self.declare(VarDecl(name.text, kind, initial, lo, hi, pos=name.pos))

    def event_decl(self) -> None:
        ts = self.ts
        ts.expect("event")
        while True:
            name = ts.ident("event name")
            self.declare(VarDecl(name.text, "event", pos=name.pos))
            if not ts.accept(","):
                break
        ts.expect(";")

    def block(self) -> tuple:
        ts = self.ts
        ts.expect("{")
        acts = []
        while not ts.at("}"):
            name = ts.ident("assignment target")
            ts.expect("=")
            start = ts.tok
            value = ExprParser(ts, self.kinds).parse()
            ts.expect(";")
            kind = self.kinds.get(name.text)
            if kind is None:
                self.error("UNKNOWN_VARIABLE", f"undeclared name {name.text!r}", name.pos)
            elif kind not in ("int", "bool"):
                self.error("TYPE_MISMATCH", f"cannot assign to {kind} {name.text!r}", name.pos)
            else:
                self.check_type(value, kind, start.pos)
            acts.append(Assign(name.text, value))
        ts.expect("}")
        return tuple(acts)

    def check_type(self, e: Expr, want: str, pos) -> None:
        try:
            got = typecheck(e, self.kinds)
        except EvalError as exc:
            # unknown names were already reported while parsing
            if "unbound" not in str(exc):
                self.error("TYPE_MISMATCH", str(exc), pos)
            return
        if got != want:
            self.error("TYPE_MISMATCH", f"expected {want} expression, got {got}", pos)

    def chart(self) -> None:
        ts = self.ts
        ts.expect("statechart")
        name = ts.ident("statechart name")
        ts.expect("priority")
        prio_tok = ts.tok
        priority = ts.integer()
        if priority < 1:
            self.error("SYNTAX_ERROR", "statechart priority must be positive", prio_tok.pos)
        ts.expect("{")
        states: list[State] = []
        initial: Token | None = None
        raw: list[tuple] = []
        while not ts.at("}"):
            if ts.accept("state"):
                sname = ts.ident("state name")
                entry = exit_ = ()
                while ts.at("entry") or ts.at("exit"):
                    which = ts.advance().text
                    acts = self.block()
                    if which == "entry":
                        entry = acts
                    else:
                        exit_ = acts
                ts.expect(";")
                if any(s.name == sname.text for s in states):
                    self.error("DUPLICATE_NAME", f"state {sname.text!r} declared twice", sname.pos)
                else:
                    states.append(State(sname.text, entry, exit_, pos=sname.pos))
            elif ts.at("initial"):
                kw = ts.advance()
                tok = ts.ident("state name")
                ts.expect(";")
                if initial is not None:
                    self.error("DUPLICATE_NAME", "initial state given twice", kw.pos)
                initial = tok
            elif ts.accept("transition"):
                raw.append(self.transition(name.text))
            else:
                ts.fail(f"expected 'state', 'initial' or 'transition', found {ts.tok.text!r}")
        ts.expect("}")
        ts.accept(";")

        known = {s.name for s in states}
        if initial is None:
            self.error("SYNTAX_ERROR", f"statechart {name.text!r} has no initial state", name.pos)
            init_name = states[0].name if states else ""
        else:
            init_name = initial.text
            if init_name not in known:
                self.error("UNKNOWN_STATE", f"unknown state {init_name!r}", initial.pos)

        out_count: dict[str, int] = {}
        for t in raw:
            out_count[t[1].text] = out_count.get(t[1].text, 0) + 1
        transitions = []
        seen_prio: set[tuple[str, int]] = set()
        for tid, src, dst, prio, guard, action in raw:
            for tok in (src, dst):
                if tok.text not in known:
                    self.error("UNKNOWN_STATE", f"unknown state {tok.text!r}", tok.pos)
            if prio is None:
                if out_count[src.text] > 1:
                    self.error("MISSING_PRIORITY",
                               f"transition {tid.text!r}: state {src.text!r} has several outgoing "
                               "transitions, so a priority is required", tid.pos)
                prio = 1
            if (src.text, prio) in seen_prio:
                self.error("DUPLICATE_NAME",
                           f"two transitions from {src.text!r} share priority {prio}", tid.pos)
            seen_prio.add((src.text, prio))
            transitions.append(Transition(tid.text, src.text, dst.text, guard, action, prio, pos=tid.pos))
        if any(c.name == name.text for c in self.charts):
            self.error("DUPLICATE_NAME", f"statechart {name.text!r} declared twice", name.pos)
        if name.text in self.kinds:
            self.error("DUPLICATE_NAME", f"{name.text!r} is already a variable", name.pos)
        self.charts.append(Statechart(name.text, priority, tuple(states), init_name,
                                      tuple(transitions), pos=name.pos))

    def transition(self, chart: str) -> tuple:
        ts = self.ts
        tid = ts.ident("transition id")
        if tid.text in self.transition_ids:
            self.error("DUPLICATE_NAME", f"transition id {tid.text!r} used twice", tid.pos)
        self.transition_ids.add(tid.text)
        ts.expect(":")
        src = ts.ident("source state")
        ts.expect("->")
        dst = ts.ident("target state")
        prio = None
        if ts.accept("priority"):
            ptok = ts.tok
            prio = ts.integer()
            if prio < 1:
                self.error("SYNTAX_ERROR", "transition priority must be positive", ptok.pos)
        ts.expect("when")
        start = ts.tok
        guard = ExprParser(ts, self.kinds).parse()
        self.check_type(guard, "bool", start.pos)
        guard = number_triggers(guard, chart, tid.text)
        action = self.block() if ts.accept("do") else ()
        ts.expect(";")
        return (tid, src, dst, prio, guard, action)


def parse_network(text: str) -> StatechartNetwork:
    """Parse and resolve a network document.

    Raises :class:`DSLError` carrying every diagnostic found (each with a
    line and column) when the document is not a well-formed network.
    """
    p = _NetworkParser(text)
    net = p.run()
    if p.diags or net is None:
        raise DSLError(p.diags)
    return net
