"""Networks of timed automata, and the map that ties them back to statecharts."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .actions import actions_text
from .dsl.printer import decl_text
from .errors import MapMismatch
from .expr import ChanRecv, ChanSend, Expr, conjuncts, positive_channels, to_text, walk
from .status import VarDecl

__all__ = ["Location", "Edge", "Automaton", "TANetwork", "TransformMap", "network_text",
           "edge_text", "ROLES"]

ROLES = ("transformed", "event", "timer")


@dataclass(frozen=True)
class Location:
    name: str
    invariant: Expr | None = None


@dataclass(frozen=True)
class Edge:
    """``(source, guard, action, resets, target)``; a ``None`` guard is NULL (always true).

    Synchronisation labels live inside the guard as channel atoms, the same
    way the rules write them; :attr:`send` and :attr:`receives` read them off.
    """

    id: str
    source: str
    guard: Expr | None
    action: tuple = ()
    resets: tuple[str, ...] = ()
    target: str = ""

    @property
    def send(self) -> str | None:
        if self.guard is None:
            return None
        for part in conjuncts(self.guard):
            if isinstance(part, ChanSend):
                return part.name
        return None

    @property
    def receives(self) -> frozenset:
        """Channels this edge would synchronise on when they are offered."""
        if self.guard is None:
            return frozenset()
        return frozenset(positive_channels(self.guard))

    @property
    def channel_names(self) -> frozenset:
        if self.guard is None:
            return frozenset()
        return frozenset(n.name for n in walk(self.guard) if isinstance(n, (ChanRecv, ChanSend)))


@dataclass(frozen=True)
class Automaton:
    name: str
    role: str
    locations: tuple[Location, ...]
    initial: str
    edges: tuple[Edge, ...] = ()

    @cached_property
    def _locs(self) -> dict[str, Location]:
        return {l.name: l for l in self.locations}

    @cached_property
    def _out(self) -> dict[str, tuple[Edge, ...]]:
        out: dict[str, list[Edge]] = {}
        for e in self.edges:
            out.setdefault(e.source, []).append(e)
        return {k: tuple(v) for k, v in out.items()}

    def location(self, name: str) -> Location:
        return self._locs[name]

    def outgoing(self, loc: str) -> tuple[Edge, ...]:
        return self._out.get(loc, ())

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)


@dataclass(frozen=True)
class TANetwork:
    """Shared declarations plus automata.

    ``stage`` records the last transformation rule applied (0 for networks
    not produced by the transformer). ``alpha`` names the lockstep index once
    the lockstep rule has run.
    """

    variables: tuple[VarDecl, ...]
    automata: tuple[Automaton, ...]
    stage: int = 0
    alpha: str | None = None

    @cached_property
    def decls(self) -> dict[str, VarDecl]:
        return {d.name: d for d in self.variables}

    @cached_property
    def kinds(self) -> dict[str, str]:
        return {d.name: d.kind for d in self.variables}

    @property
    def clocks(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.variables if d.kind == "clock")

    @property
    def channels(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.variables if d.kind == "channel")

    def automaton(self, name: str) -> Automaton:
        for a in self.automata:
            if a.name == name:
                return a
        raise KeyError(name)

    def index(self, name: str) -> int:
        for i, a in enumerate(self.automata):
            if a.name == name:
                return i
        raise KeyError(name)

    def by_role(self, role: str) -> tuple[Automaton, ...]:
        return tuple(a for a in self.automata if a.role == role)


@dataclass
class TransformMap:
    """Source-to-target correspondence built up by the transformation rules.

    Keys and values: chart name to automaton name; ``(chart, state)`` to
    ``(automaton, location)``; ``(chart, transition)`` to ``(automaton, edge)``;
    variable to variable. ``aux`` lists every target element with no source
    counterpart as ``(kind, name)`` where kind is one of ``automaton``,
    ``location``, ``edge``, ``variable``.
    """

    charts: dict[str, str] = field(default_factory=dict)
    states: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)
    transitions: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)
    variables: dict[str, str] = field(default_factory=dict)
    aux: list[tuple[str, object]] = field(default_factory=list)
    triggers: dict[str, str] = field(default_factory=dict)

    def copy(self) -> "TransformMap":
        return TransformMap(dict(self.charts), dict(self.states), dict(self.transitions),
                            dict(self.variables), list(self.aux), dict(self.triggers))

    def transformed_indices(self, ta: TANetwork) -> tuple[int, ...]:
        """Positions of the chart images inside ``ta.automata``, in chart order."""
        try:
            return tuple(ta.index(a) for a in self.charts.values())
        except KeyError as exc:
            raise MapMismatch(f"automaton {exc.args[0]!r} missing from the network") from None

    def value_variables(self, ta: TANetwork) -> tuple[str, ...]:
        """Target variables that carry source data (ints and booleans)."""
        out = []
        for target in self.variables.values():
            d = ta.decls.get(target)
            if d is None:
                raise MapMismatch(f"variable {target!r} missing from the network")
            if d.is_value:
                out.append(target)
        return tuple(out)


# -- canonical text -----------------------------------------------------------

def edge_text(e: Edge) -> str:
    guard = "NULL" if e.guard is None else to_text(e.guard)
    resets = "{" + ", ".join(e.resets) + "}" if e.resets else "NULL"
    return f"edge {e.id}: ({e.source}, {guard}, {actions_text(e.action)}, {resets}, {e.target});"


def network_text(ta: TANetwork) -> str:
    """Line-oriented, byte-stable dump used for the per-stage golden files."""
    lines = [f"// stage {ta.stage}"]
    lines += [decl_text(d) for d in ta.variables]
    for a in ta.automata:
        lines.append("")
        lines.append(f"automaton {a.name} ({a.role}) {{")
        for loc in a.locations:
            inv = f" invariant {to_text(loc.invariant)}" if loc.invariant is not None else ""
            lines.append(f"    location {loc.name}{inv};")
        lines.append(f"    initial {a.initial};")
        for e in a.edges:
            lines.append(f"    {edge_text(e)}")
        lines.append("}")
    return "\n".join(lines) + "\n"
