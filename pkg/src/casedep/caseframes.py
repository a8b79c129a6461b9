"""Case-frame files and their projection into discrete datasets.

A case-frame file is UTF-8 text with one parenthesized frame per line,
``(head (slot value)(slot value)...)``.  Lines starting with ``#`` are
comments; blank lines are ignored.  A value is either a plain word token
or a word-class token delimited by angle brackets, e.g. ``<place>``.

The literal token ``0`` is reserved as the absent-slot marker and is
rejected as a plain value at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

ABSENT = "0"

SLOT_VIEW = "slot"
VALUE_VIEW = "value"

# Characters that would collide with the frame or model-file syntax.
_BAD_CHARS = set("()[]=|#")

_TOKEN_RE = re.compile(r"[()]|[^\s()]+")


class CaseFrameError(ValueError):
    """Malformed case-frame input, annotated with a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _check_token(token: str, what: str, line: int | None, allow_class: bool) -> str:
    if "<" in token or ">" in token:
        if not allow_class:
            raise CaseFrameError(f"{what} {token!r} may not be a class token", line)
        if not re.fullmatch(r"<[^<>]+>", token):
            raise CaseFrameError(f"malformed class token {token!r}", line)
    if _BAD_CHARS & set(token):
        raise CaseFrameError(f"{what} {token!r} contains reserved characters", line)
    return token


@dataclass(frozen=True)
class CaseFrameInstance:
    """One observed head with its (slot, value) pairs, in surface order."""

    head: str
    slots: tuple[tuple[str, str], ...]

    def slot_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.slots)

    def value_of(self, slot: str) -> str | None:
        for name, value in self.slots:
            if name == slot:
                return value
        return None


def _parse_frame(line: str, lineno: int) -> CaseFrameInstance:
    tokens = _TOKEN_RE.findall(line)
    pos = 0

    def take() -> str:
        nonlocal pos
        if pos >= len(tokens):
            raise CaseFrameError("unbalanced parentheses", lineno)
        tok = tokens[pos]
        pos += 1
        return tok

    if take() != "(":
        raise CaseFrameError("frame must start with '('", lineno)
    head = take()
    if head in "()":
        raise CaseFrameError("missing head", lineno)
    _check_token(head, "head", lineno, allow_class=False)

    slots: list[tuple[str, str]] = []
    seen: set[str] = set()
    while True:
        tok = take()
        if tok == ")":
            break
        if tok != "(":
            raise CaseFrameError(f"expected '(' or ')', got {tok!r}", lineno)
        name = take()
        if name in "()":
            raise CaseFrameError("missing slot name", lineno)
        _check_token(name, "slot name", lineno, allow_class=False)
        if name in seen:
            raise CaseFrameError(f"duplicate slot {name!r}", lineno)
        value = take()
        if value == ")":
            raise CaseFrameError(f"empty value for slot {name!r}", lineno)
        if value == "(":
            raise CaseFrameError(f"nested group in slot {name!r}", lineno)
        _check_token(value, "value", lineno, allow_class=True)
        if value == ABSENT:
            raise CaseFrameError(
                f"value {ABSENT!r} is reserved as the absent-slot marker", lineno
            )
        if take() != ")":
            raise CaseFrameError(f"slot {name!r} must hold exactly one value", lineno)
        seen.add(name)
        slots.append((name, value))
    if pos != len(tokens):
        raise CaseFrameError("unbalanced parentheses", lineno)
    return CaseFrameInstance(head=head, slots=tuple(slots))


def parse_case_frames(text: str | Iterable[str]) -> list[CaseFrameInstance]:
    """Parse a case-frame stream into instances, one per non-blank line."""
    lines = text.splitlines() if isinstance(text, str) else text
    instances = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        instances.append(_parse_frame(line, lineno))
    return instances


def render_case_frame(instance: CaseFrameInstance) -> str:
    """Inverse of the parser: one-line ``(head (slot value)...)`` text."""
    body = "".join(f"({name} {value})" for name, value in instance.slots)
    return f"({instance.head} {body})" if body else f"({instance.head})"


def group_by_head(
    instances: Iterable[CaseFrameInstance],
) -> dict[str, list[CaseFrameInstance]]:
    """Partition instances by head, preserving relative order."""
    groups: dict[str, list[CaseFrameInstance]] = {}
    for inst in instances:
        groups.setdefault(inst.head, []).append(inst)
    return groups


@dataclass
class DiscreteDataset:
    """Named categorical variables with finite domains and N index rows.

    ``rows[r][i]`` is the index of row r's value in ``domains[i]``.  The
    absent marker ``"0"`` appears in a domain only when absence was
    observed (always, for the slot view).
    """

    head: str
    names: tuple[str, ...]
    domains: tuple[tuple[str, ...], ...]
    rows: np.ndarray

    def __post_init__(self):
        self.names = tuple(self.names)
        self.domains = tuple(tuple(d) for d in self.domains)
        self.rows = np.asarray(self.rows, dtype=np.int64)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.names):
            raise ValueError("rows must be a 2-d array with one column per variable")
        if len(self.names) != len(set(self.names)):
            raise ValueError("variable names must be unique")
        if len(self.domains) != len(self.names):
            raise ValueError("one domain required per variable")
        if self.rows.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        for i, dom in enumerate(self.domains):
            if len(dom) < 1:
                raise ValueError(f"variable {self.names[i]!r} has an empty domain")
            col = self.rows[:, i]
            if col.min() < 0 or col.max() >= len(dom):
                raise ValueError(f"row index out of domain for {self.names[i]!r}")

    @property
    def n(self) -> int:
        """Number of variables."""
        return len(self.names)

    @property
    def num_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def variables(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return tuple(zip(self.names, self.domains))

    def k(self, i: int) -> int:
        return len(self.domains[i])

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def subset(self, indices: Sequence[int] | np.ndarray) -> "DiscreteDataset":
        """Row subset sharing this dataset's variables and domains."""
        return DiscreteDataset(self.head, self.names, self.domains, self.rows[indices])

    def row_values(self, r: int) -> dict[str, str]:
        return {
            name: self.domains[i][self.rows[r, i]] for i, name in enumerate(self.names)
        }

    def __eq__(self, other):
        if not isinstance(other, DiscreteDataset):
            return NotImplemented
        return (
            self.head == other.head
            and self.names == other.names
            and self.domains == other.domains
            and np.array_equal(self.rows, other.rows)
        )


def project(
    instances: Sequence[CaseFrameInstance],
    view: str = VALUE_VIEW,
    slot_inventory: Sequence[str] | None = None,
) -> DiscreteDataset:
    """Project same-head instances into a slot- or value-based dataset.

    The variable set is the union of slot names observed for the head, in
    first-appearance order, unless an explicit ``slot_inventory`` is given.
    In the slot view every domain is ``("0", "1")`` with 1 meaning the slot
    is present.  In the value view, a slot's domain holds its distinct
    observed values, preceded by ``"0"`` iff the slot is absent in at
    least one instance.  Whether the result is word- or class-based is
    decided purely by the tokens the instances carry.
    """
    if view not in (SLOT_VIEW, VALUE_VIEW):
        raise ValueError(f"view must be {SLOT_VIEW!r} or {VALUE_VIEW!r}")
    instances = list(instances)
    if not instances:
        raise CaseFrameError("cannot project an empty instance list")
    heads = {inst.head for inst in instances}
    if len(heads) != 1:
        raise CaseFrameError(f"instances mix heads: {sorted(heads)}")
    head = instances[0].head

    if slot_inventory is not None:
        names = list(slot_inventory)
        if len(names) != len(set(names)):
            raise ValueError("slot inventory contains duplicates")
        known = set(names)
        for inst in instances:
            extra = [s for s, _ in inst.slots if s not in known]
            if extra:
                raise CaseFrameError(
                    f"slot {extra[0]!r} not in the declared inventory"
                )
    else:
        names = []
        for inst in instances:
            for slot, _ in inst.slots:
                if slot not in names:
                    names.append(slot)

    index = {name: i for i, name in enumerate(names)}
    n = len(names)

    if view == SLOT_VIEW:
        domains = tuple((ABSENT, "1") for _ in names)
        rows = np.zeros((len(instances), n), dtype=np.int64)
        for r, inst in enumerate(instances):
            for slot, _ in inst.slots:
                rows[r, index[slot]] = 1
        return DiscreteDataset(head, tuple(names), domains, rows)

    values: list[list[str]] = [[] for _ in names]
    absent = [False] * n
    for inst in instances:
        present = set()
        for slot, value in inst.slots:
            i = index[slot]
            present.add(i)
            if value not in values[i]:
                values[i].append(value)
        for i in range(n):
            if i not in present:
                absent[i] = True
    domains = tuple(
        ((ABSENT,) if absent[i] else ()) + tuple(values[i]) for i in range(n)
    )
    lookup = [{v: a for a, v in enumerate(dom)} for dom in domains]
    rows = np.zeros((len(instances), n), dtype=np.int64)
    for r, inst in enumerate(instances):
        for slot, value in inst.slots:
            i = index[slot]
            rows[r, i] = lookup[i][value]
    return DiscreteDataset(head, tuple(names), domains, rows)
