"""Canonical text for networks: stable formatting so golden files diff cleanly."""

from __future__ import annotations

from ..expr import to_text
from ..statechart import StatechartNetwork
from ..status import VarDecl

__all__ = ["print_network", "decl_text", "block_text"]


def decl_text(d: VarDecl) -> str:
    if d.kind == "event":
        return f"event {d.name};"
    if d.kind == "channel":
        return f"chan {d.name};"
    if d.kind == "clock":
        return f"clock {d.name};"
    if d.kind == "bool":
        return f"var {d.name} : bool = {'true' if d.initial else 'false'};"
    rng = f"[{d.lo}..{d.hi}]" if d.bounded else ""
    return f"var {d.name} : int{rng} = {d.initial};"


def block_text(actions) -> str:
    if not actions:
        return "{ }"
    return "{ " + " ".join(f"{a};" for a in actions) + " }"


def print_network(net: StatechartNetwork) -> str:
    lines = [decl_text(d) for d in net.variables]
    for chart in net.charts:
        if lines:
            lines.append("")
        lines.append(f"statechart {chart.name} priority {chart.priority} {{")
        for s in chart.states:
            text = f"    state {s.name}"
            if s.entry:
                text += f" entry {block_text(s.entry)}"
            if s.exit:
                text += f" exit {block_text(s.exit)}"
            lines.append(text + ";")
        lines.append(f"    initial {chart.initial};")
        for t in chart.transitions:
            text = (f"    transition {t.id}: {t.source} -> {t.target} priority {t.priority}"
                    f" when {to_text(t.guard)}")
            if t.action:
                text += f" do {block_text(t.action)}"
            lines.append(text + ";")
        lines.append("}")
    return "\n".join(lines) + "\n"
