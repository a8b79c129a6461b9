"""Line-oriented text format for learned models.

Layout::

    dendroid-v1 head=<token> N=<int>
    var <name> : <value> <value> ...
    root <name> : [P(name=v)=0.123...] ...
    arc <parent> -> <child> : [P(child=v|parent=u)=0.123...] ...

Entries appear in domain order (parent-value major for arcs) and ``#``
lines are comments.  By default probabilities are written with full
precision so that a written model reloads exactly; pass ``precision=6``
for the human-readable rendering.  Rows that do not sum to 1 within 1e-9
are rejected on load, so rounded renderings are for reading, not storage.
"""

from __future__ import annotations

import re

import numpy as np

from .model import DendroidModel

FORMAT_VERSION = "dendroid-v1"

_HEADER_RE = re.compile(r"^(\S+) head=(\S+) N=(\d+)$")
_ENTRY_RE = re.compile(
    r"\[P\(([^()=|\s\[\]]+)=([^()=|\s\[\]]+)"
    r"(?:\|([^()=|\s\[\]]+)=([^()=|\s\[\]]+))?\)=\s*([^\s\[\]]+)\]"
)


class ModelFormatError(ValueError):
    """Unreadable model file, annotated with a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _fmt(x: float, precision: int | None) -> str:
    return repr(float(x)) if precision is None else f"{x:.{precision}f}"


def serialize(model: DendroidModel, precision: int | None = None) -> str:
    """Render a model as text; ``deserialize`` inverts it exactly when
    ``precision`` is None."""
    lines = [f"{FORMAT_VERSION} head={model.head} N={model.num_train_rows}"]
    for name, domain in zip(model.names, model.domains):
        lines.append(f"var {name} : " + " ".join(domain))
    for r in sorted(model.root_tables):
        name = model.names[r]
        entries = " ".join(
            f"[P({name}={v})={_fmt(p, precision)}]"
            for v, p in zip(model.domains[r], model.root_tables[r])
        )
        lines.append(f"root {name} : {entries}")
    for p, c in model.arcs:
        pname, cname = model.names[p], model.names[c]
        table = model.arc_tables[(p, c)]
        entries = " ".join(
            f"[P({cname}={v}|{pname}={u})={_fmt(table[a, b], precision)}]"
            for a, u in enumerate(model.domains[p])
            for b, v in enumerate(model.domains[c])
        )
        lines.append(f"arc {pname} -> {cname} : {entries}")
    return "\n".join(lines) + "\n"


def _parse_entries(text: str, lineno: int) -> list[tuple]:
    entries = []
    rest = text
    for match in _ENTRY_RE.finditer(text):
        try:
            value = float(match.group(5))
        except ValueError:
            raise ModelFormatError(
                f"bad probability literal {match.group(5)!r}", lineno
            ) from None
        entries.append((match.group(1), match.group(2), match.group(3), match.group(4), value))
        rest = rest.replace(match.group(0), "", 1)
    if rest.strip():
        raise ModelFormatError(f"unparseable entry text {rest.strip()!r}", lineno)
    return entries


def deserialize(text: str) -> DendroidModel:
    """Parse a model file; raises :class:`ModelFormatError` on any defect."""
    head = None
    num_rows = None
    names: list[str] = []
    domains: list[tuple[str, ...]] = []
    by_name: dict[str, int] = {}
    root_tables: dict[int, np.ndarray] = {}
    arc_tables: dict[tuple[int, int], np.ndarray] = {}
    arcs: list[tuple[int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if head is None:
            match = _HEADER_RE.match(line)
            if not match or match.group(1) != FORMAT_VERSION:
                raise ModelFormatError(
                    f"expected header '{FORMAT_VERSION} head=... N=...'", lineno
                )
            head = match.group(2)
            num_rows = int(match.group(3))
            continue
        kind, _, body = line.partition(" ")
        if kind == "var":
            name, sep, values = body.partition(" : ")
            name = name.strip()
            if not sep or not name:
                raise ModelFormatError("malformed var line", lineno)
            domain = tuple(values.split())
            if not domain:
                raise ModelFormatError(f"variable {name!r} has an empty domain", lineno)
            if name in by_name:
                raise ModelFormatError(f"duplicate variable {name!r}", lineno)
            by_name[name] = len(names)
            names.append(name)
            domains.append(domain)
        elif kind == "root":
            name, sep, entry_text = body.partition(" : ")
            name = name.strip()
            if not sep or name not in by_name:
                raise ModelFormatError(f"root line for unknown variable {name!r}", lineno)
            v = by_name[name]
            if v in root_tables:
                raise ModelFormatError(f"duplicate root block for {name!r}", lineno)
            entries = _parse_entries(entry_text, lineno)
            expected = [(name, val, None, None) for val in domains[v]]
            if [e[:4] for e in entries] != expected:
                raise ModelFormatError(
                    f"root entries for {name!r} do not match its domain", lineno
                )
            root_tables[v] = np.array([e[4] for e in entries])
        elif kind == "arc":
            spec, sep, entry_text = body.partition(" : ")
            parts = spec.split()
            if not sep or len(parts) != 3 or parts[1] != "->":
                raise ModelFormatError("malformed arc line", lineno)
            pname, cname = parts[0], parts[2]
            if pname not in by_name or cname not in by_name:
                raise ModelFormatError(
                    f"arc references unknown variable {pname!r} or {cname!r}", lineno
                )
            p, c = by_name[pname], by_name[cname]
            if (p, c) in arc_tables:
                raise ModelFormatError(f"duplicate arc block {pname}->{cname}", lineno)
            entries = _parse_entries(entry_text, lineno)
            expected = [
                (cname, v, pname, u) for u in domains[p] for v in domains[c]
            ]
            if [e[:4] for e in entries] != expected:
                raise ModelFormatError(
                    f"arc entries for {pname}->{cname} do not match the domains",
                    lineno,
                )
            table = np.array([e[4] for e in entries]).reshape(
                len(domains[p]), len(domains[c])
            )
            arc_tables[(p, c)] = table
            arcs.append((p, c))
        else:
            raise ModelFormatError(f"unknown block {kind!r}", lineno)

    if head is None or num_rows is None:
        raise ModelFormatError("empty model file")
    if not names:
        raise ModelFormatError("model file declares no variables")
    try:
        return DendroidModel(
            head=head,
            names=tuple(names),
            domains=tuple(domains),
            arcs=tuple(arcs),
            root_tables=root_tables,
            arc_tables=arc_tables,
            num_train_rows=num_rows,
        )
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def format_pattern(model: DendroidModel, precision: int = 6) -> str:
    """Human-readable pattern listing: per-variable marginals with the
    conditional rows of each child indented under its parent."""
    marginals = model.marginals()
    children: dict[int, list[int]] = {}
    for p, c in model.arcs:
        children.setdefault(p, []).append(c)
    lines = [f"{model.head}:"]
    for v, name in enumerate(model.names):
        entries = " ".join(
            f"[P({name}={val})={vprob:.{precision}f}]"
            for val, vprob in zip(model.domains[v], marginals[v])
        )
        lines.append(f"[{name}]: {entries}")
        for c in children.get(v, []):
            cname = model.names[c]
            table = model.arc_tables[(v, c)]
            for a, u in enumerate(model.domains[v]):
                row = " ".join(
                    f"[P({cname}={val}|{name}={u})={table[a, b]:.{precision}f}]"
                    for b, val in enumerate(model.domains[c])
                )
                lines.append(f"           {row}")
    return "\n".join(lines) + "\n"
