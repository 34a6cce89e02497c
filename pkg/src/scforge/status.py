"""Declarations, valuations, system statuses and execution traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

__all__ = [
    "VarDecl", "Valuation", "SystemStatus", "TAStatus", "ExecutionTrace",
    "STUTTER", "INIT",
]

STUTTER = "STUTTER"
INIT = "INIT"

KINDS = ("int", "bool", "event", "channel", "clock")


@dataclass(frozen=True)
class VarDecl:
    """A network-level declaration.

    ``lo``/``hi`` bound an ``int``; either may be ``None`` for an unbounded
    integer, which simulation accepts and verification rejects.
    """

    name: str
    kind: str
    initial: int | bool | None = None
    lo: int | None = None
    hi: int | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False)

    @property
    def bounded(self) -> bool:
        return self.kind != "int" or (self.lo is not None and self.hi is not None)

    @property
    def is_value(self) -> bool:
        """True for kinds that carry a value in a :class:`Valuation`."""
        return self.kind in ("int", "bool")

    def domain(self) -> range | tuple[bool, bool]:
        if self.kind == "bool":
            return (False, True)
        if self.kind == "int" and self.bounded:
            return range(self.lo, self.hi + 1)
        raise ValueError(f"{self.name} has no finite domain")

    def contains(self, value) -> bool:
        if self.kind == "bool":
            return isinstance(value, bool)
        if self.kind in ("int", "clock"):
            if isinstance(value, bool) or not isinstance(value, int):
                return False
            if self.kind == "clock":
                return value >= 0
            return (self.lo is None or value >= self.lo) and (self.hi is None or value <= self.hi)
        return False


class Valuation(Mapping):
    """Immutable, hashable name -> value map that keeps declaration order."""

    __slots__ = ("_d", "_h")

    def __init__(self, data: Mapping | Iterable = ()):
        self._d = dict(data)
        self._h = None

    def __getitem__(self, key):
        return self._d[key]

    def __iter__(self) -> Iterator:
        return iter(self._d)

    def __len__(self) -> int:
        return len(self._d)

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash(frozenset(self._d.items()))
        return self._h

    def __eq__(self, other) -> bool:
        if isinstance(other, Valuation):
            return self._d == other._d
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __repr__(self) -> str:
        return f"Valuation({self._d!r})"

    def updated(self, changes: Mapping) -> "Valuation":
        d = dict(self._d)
        d.update(changes)
        return Valuation(d)

    def restricted(self, names: Iterable[str]) -> "Valuation":
        return Valuation((n, self._d[n]) for n in names)

    def as_dict(self) -> dict:
        return dict(self._d)


def format_valuation(v: Mapping) -> str:
    parts = []
    for k, x in v.items():
        if isinstance(x, bool):
            x = "true" if x else "false"
        parts.append(f"{k}={x}")
    return ",".join(parts)


@dataclass(frozen=True)
class SystemStatus:
    """Active state per chart, variable valuation and execution index (1-based)."""

    states: tuple[str, ...]
    valuation: Valuation
    exec_index: int = 1

    def __str__(self) -> str:
        return f"(({', '.join(self.states)}), {{{format_valuation(self.valuation)}}}, alpha={self.exec_index})"


@dataclass(frozen=True)
class TAStatus:
    """Location vector, variable valuation (including the lockstep index) and clocks."""

    locations: tuple[str, ...]
    valuation: Valuation
    clocks: Valuation

    def __str__(self) -> str:
        return (f"(({', '.join(self.locations)}), {{{format_valuation(self.valuation)}}}, "
                f"{{{format_valuation(self.clocks)}}})")


@dataclass
class ExecutionTrace:
    """Consecutive statuses plus the label of every step between them.

    ``marks[i]`` is the ``(cycle, micro)`` stamp of ``statuses[i]``; micro 0
    marks a cycle-start status (the initial one or the one after a delay).
    ``components`` names the charts or automata, in status-vector order.
    """

    statuses: list
    labels: list[str] = field(default_factory=list)
    marks: list[tuple[int, int]] = field(default_factory=list)
    components: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.statuses:
            raise ValueError("a trace holds at least one status")
        if len(self.labels) != len(self.statuses) - 1:
            raise ValueError("need exactly one label per step")

    def __len__(self) -> int:
        return len(self.statuses)

    @property
    def final(self):
        return self.statuses[-1]

    def append(self, status, label: str, mark: tuple[int, int]) -> None:
        self.statuses.append(status)
        self.labels.append(label)
        self.marks.append(mark)

    def dump(self) -> str:
        """Line-oriented text, one status per line, byte-stable."""
        lines = []
        for i, st in enumerate(self.statuses):
            cyc, micro = self.marks[i] if self.marks else (0, i)
            label = INIT if i == 0 else self.labels[i - 1]
            if isinstance(st, TAStatus):
                lines.append(f"{cyc}.{micro} | ({','.join(st.locations)}) | "
                             f"{format_valuation(st.valuation)} | {format_valuation(st.clocks)} | {label}")
            else:
                lines.append(f"{cyc}.{micro} | ({','.join(st.states)}) | "
                             f"{format_valuation(st.valuation)} | {label}")
        return "\n".join(lines) + "\n"
