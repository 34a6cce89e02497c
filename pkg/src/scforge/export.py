"""UPPAAL ``<nta>`` model files and query files.

Round-trip metadata the format has no slot for (edge ids, explicit clock
reset sets, automaton roles, the stage marker) travels in comment labels and
declaration comments, which UPPAAL ignores.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .actions import Assign, ClockReset, IncIndex
from .automata import Automaton, Edge, Location, TANetwork
from .dsl.parser import parse_expr
from .errors import DSLError, ExportError, UnsupportedConstruct
from .expr import (ChanRecv, ChanSend, Expr, and_all, conjuncts, to_text, walk)
from .status import VarDecl

__all__ = ["write_uppaal_xml", "read_uppaal_xml", "write_queries", "ExportReport", "DOCTYPE"]

DOCTYPE = ("<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
           "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_2.dtd'>")


@dataclass
class ExportReport:
    """Elements written verbatim although real UPPAAL will reject them."""

    unsupported: list[UnsupportedConstruct] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.unsupported


def _decl_line(d: VarDecl) -> str:
    if d.kind == "channel":
        return f"chan {d.name};"
    if d.kind == "clock":
        return f"clock {d.name};"
    if d.kind == "bool":
        return f"bool {d.name} = {'true' if d.initial else 'false'};"
    if d.kind == "event":
        raise ExportError(f"event {d.name!r} has no UPPAAL counterpart; transform the network first")
    return f"int {d.name} = {d.initial};" if d.lo is None or d.hi is None else \
        f"int[{d.lo},{d.hi}] {d.name} = {d.initial};"


def _declarations(ta: TANetwork) -> str:
    lines = [f"// stage {ta.stage}"]
    for d in ta.variables:
        if d.name == ta.alpha:
            # lockstep index; its range 1..n is implied by the updates
            lines.append(f"int {d.name} = {d.initial};")
        else:
            lines.append(_decl_line(d))
    return "\n".join(lines) + "\n"


def _split_sync(guard: Expr | None) -> tuple[str | None, Expr | None, bool]:
    """``(sync label, remaining guard, needs warning)``.

    A leading channel conjunct becomes the sync label when that is the only
    channel atom and the split reads back to the same tree.
    """
    if guard is None:
        return None, None, False
    atoms = [n for n in walk(guard) if isinstance(n, (ChanRecv, ChanSend))]
    if not atoms:
        return None, guard, False
    parts = conjuncts(guard)
    head = parts[0]
    if len(atoms) == 1 and isinstance(head, (ChanRecv, ChanSend)):
        rest = and_all(parts[1:]) if len(parts) > 1 else None
        rebuilt = and_all([head] + (conjuncts(rest) if rest is not None else []))
        if rebuilt == guard:
            label = f"{head.name}?" if isinstance(head, ChanRecv) else f"{head.name}!"
            return label, rest, False
    return None, guard, True


def _action_text(act) -> str:
    if isinstance(act, IncIndex):
        return f"{act.var} = {act.var} % {act.n} + 1"
    if isinstance(act, ClockReset):
        return f"{act.clock} = 0"
    if isinstance(act, Assign):
        return f"{act.var} = {to_text(act.value)}"
    raise ExportError(f"unknown action {act!r}")


def write_uppaal_xml(ta: TANetwork, tmap=None, report: ExportReport | None = None) -> str:
    """Serialize ``ta``; byte-stable for equal inputs.

    Guards the tool cannot express (negated or non-leading channel atoms)
    are written verbatim, preceded by a ``WARN`` comment, and recorded in
    ``report`` when one is given.
    """
    root = ET.Element("nta")
    ET.SubElement(root, "declaration").text = _declarations(ta)
    ids: dict[tuple[str, str], str] = {}
    k = 0
    for a in ta.automata:
        for loc in a.locations:
            ids[(a.name, loc.name)] = f"id{k}"
            k += 1
    for a in ta.automata:
        tpl = ET.SubElement(root, "template")
        ET.SubElement(tpl, "name").text = a.name
        ET.SubElement(tpl, "declaration").text = f"// role: {a.role}\n"
        for loc in a.locations:
            el = ET.SubElement(tpl, "location", id=ids[(a.name, loc.name)])
            ET.SubElement(el, "name").text = loc.name
            if loc.invariant is not None:
                ET.SubElement(el, "label", kind="invariant").text = to_text(loc.invariant)
        ET.SubElement(tpl, "init", ref=ids[(a.name, a.initial)])
        for e in a.edges:
            sync, guard, warn = _split_sync(e.guard)
            if warn:
                reason = "channel atom cannot be expressed as a single synchronisation"
                element = f"{a.name}.{e.id}"
                tpl.append(ET.Comment(f" WARN {element}: {reason}; guard kept verbatim "))
                if report is not None:
                    report.unsupported.append(UnsupportedConstruct(element, reason))
            tr = ET.SubElement(tpl, "transition")
            ET.SubElement(tr, "source", ref=ids[(a.name, e.source)])
            ET.SubElement(tr, "target", ref=ids[(a.name, e.target)])
            if guard is not None:
                ET.SubElement(tr, "label", kind="guard").text = to_text(guard)
            if sync is not None:
                ET.SubElement(tr, "label", kind="synchronisation").text = sync
            if e.action:
                ET.SubElement(tr, "label", kind="assignment").text = \
                    ", ".join(_action_text(x) for x in e.action)
            meta = f"edge {e.id}"
            if e.guard is None:
                meta += "; guard NULL"
            if e.resets:
                meta += "; resets " + " ".join(e.resets)
            ET.SubElement(tr, "label", kind="comments").text = meta
    ET.SubElement(root, "system").text = "system " + ", ".join(a.name for a in ta.automata) + ";\n"
    ET.indent(root, "  ")
    body = ET.tostring(root, encoding="unicode")
    return f'<?xml version="1.0" encoding="utf-8"?>\n{DOCTYPE}\n{body}\n'


# -- read-back ----------------------------------------------------------------

_DECL = re.compile(r"^(?:(chan|clock)\s+(\w+)|(bool|int)(?:\[(-?\d+),(-?\d+)\])?\s+(\w+)\s*=\s*(\S+?))\s*;$")
_INC = re.compile(r"^(\w+)\s*=\s*\1\s*%\s*(\d+)\s*\+\s*1$")
_ASSIGN = re.compile(r"^(\w+)\s*=\s*(.+)$")


def _split_assignments(text: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def read_uppaal_xml(text: str) -> TANetwork:
    """Rebuild a network from a document written by :func:`write_uppaal_xml`."""
    try:
        root = ET.fromstring(text.split("\n", 2)[2] if text.startswith("<?xml") else text)
    except ET.ParseError as exc:
        raise ExportError(f"not well-formed XML: {exc}") from None
    stage, decls = 0, []
    for line in (root.findtext("declaration") or "").splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("// stage"):
            stage = int(line.split()[-1])
            continue
        m = _DECL.match(line)
        if not m:
            raise ExportError(f"unsupported declaration {line!r}")
        if m.group(1):
            kind = "channel" if m.group(1) == "chan" else "clock"
            decls.append(VarDecl(m.group(2), kind, 0 if kind == "clock" else None))
        elif m.group(3) == "bool":
            decls.append(VarDecl(m.group(6), "bool", m.group(7) == "true"))
        else:
            lo = int(m.group(4)) if m.group(4) is not None else None
            hi = int(m.group(5)) if m.group(5) is not None else None
            decls.append(VarDecl(m.group(6), "int", int(m.group(7)), lo, hi))
    kinds = {d.name: d.kind for d in decls}

    def expr(s: str) -> Expr:
        try:
            return parse_expr(s, kinds)
        except DSLError as exc:
            raise ExportError(f"cannot read expression {s!r}: {exc}") from None

    automata = []
    alpha_n: dict[str, int] = {}
    for tpl in root.findall("template"):
        name = tpl.findtext("name")
        role_line = (tpl.findtext("declaration") or "").strip()
        role = role_line.split(":", 1)[1].strip() if role_line.startswith("// role:") else "transformed"
        names = {}
        locs = []
        for el in tpl.findall("location"):
            lname = el.findtext("name")
            names[el.get("id")] = lname
            inv = None
            for lab in el.findall("label"):
                if lab.get("kind") == "invariant":
                    inv = expr(lab.text)
            locs.append(Location(lname, inv))
        init = tpl.find("init")
        if init is None or init.get("ref") not in names:
            raise ExportError(f"template {name!r} has no valid initial location")
        edges = []
        for tr in tpl.findall("transition"):
            src, dst = tr.find("source").get("ref"), tr.find("target").get("ref")
            if src not in names or dst not in names:
                raise ExportError(f"transition in {name!r} refers to an unknown location")
            labels = {lab.get("kind"): lab.text or "" for lab in tr.findall("label")}
            meta = [p.strip() for p in labels.get("comments", "").split(";")]
            eid = meta[0].split(None, 1)[1] if meta and meta[0].startswith("edge ") else f"e{len(edges)}"
            resets = ()
            null_guard = False
            for p in meta[1:]:
                if p.startswith("resets "):
                    resets = tuple(p.split()[1:])
                elif p == "guard NULL":
                    null_guard = True
            parts = []
            if "synchronisation" in labels:
                s = labels["synchronisation"].strip()
                parts.append(ChanRecv(s[:-1]) if s.endswith("?") else ChanSend(s[:-1]))
            if "guard" in labels:
                parts += conjuncts(expr(labels["guard"])) if parts else [expr(labels["guard"])]
            guard = None if null_guard else and_all(parts) if parts else None
            actions = []
            for a in _split_assignments(labels.get("assignment", "")):
                m = _INC.match(a)
                if m:
                    actions.append(IncIndex(m.group(1), int(m.group(2))))
                    alpha_n[m.group(1)] = int(m.group(2))
                    continue
                m = _ASSIGN.match(a)
                if not m:
                    raise ExportError(f"unsupported assignment {a!r}")
                if kinds.get(m.group(1)) == "clock" and m.group(2).strip() == "0":
                    actions.append(ClockReset(m.group(1)))
                else:
                    actions.append(Assign(m.group(1), expr(m.group(2))))
            edges.append(Edge(eid, names[src], guard, tuple(actions), resets, names[dst]))
        automata.append(Automaton(name, role, tuple(locs), names[init.get("ref")], tuple(edges)))

    alpha = None
    fixed = []
    for d in decls:
        if d.name in alpha_n and d.kind == "int" and d.lo is None:
            alpha = d.name
            d = VarDecl(d.name, "int", d.initial, 1, alpha_n[d.name])
        fixed.append(d)
    return TANetwork(tuple(fixed), tuple(automata), stage, alpha)


def write_queries(properties) -> str:
    """One ``A[] Chart.State imply cond`` line per property."""
    return "".join(p.query + "\n" for p in properties)
