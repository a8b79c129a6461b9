"""Dependency forests and their conditional-probability parameterization.

A dependency forest is an undirected acyclic edge set over the dataset
variables.  Choosing a root per tree orients it into parent->child arcs;
each root carries a probability vector over its domain and each arc a
conditional table whose rows are indexed by the parent's values.  The
resulting model assigns every full assignment the product of its root and
arc factors.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .caseframes import DiscreteDataset
from .unionfind import UnionFind

ELE = "ele"
ML = "ml"

_NORM_TOL = 1e-9


@dataclass(frozen=True)
class DependencyForest:
    """Undirected acyclic edge set over ``size`` variables."""

    size: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        uf = UnionFind(self.size)
        for i, j in self.edges:
            if not (0 <= i < j < self.size):
                raise ValueError(f"edge ({i},{j}) must satisfy 0 <= i < j < size")
            if not uf.union(i, j):
                raise ValueError(f"edge ({i},{j}) closes a cycle")

    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.size)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        for nbrs in adj:
            nbrs.sort()
        return adj

    def degree(self, v: int) -> int:
        return sum(1 for i, j in self.edges if v in (i, j))


def normalize_edge(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def enumerate_forests(size: int) -> list[DependencyForest]:
    """All labeled forests on ``size`` nodes (7 of them for size 3)."""
    if size < 1:
        raise ValueError("size must be at least 1")
    pairs = list(itertools.combinations(range(size), 2))
    forests = []
    for count in range(size):
        for subset in itertools.combinations(pairs, count):
            uf = UnionFind(size)
            if all(uf.union(i, j) for i, j in subset):
                forests.append(DependencyForest(size, frozenset(subset)))
    return forests


def root_trees(forest: DependencyForest) -> tuple[tuple[int, int], ...]:
    """Orient each tree away from its maximum-degree node.

    Ties are broken by variable order, as is the neighbor order of the
    breadth-first traversal, so the arc list is deterministic and parents
    always precede their children.
    """
    adj = forest.adjacency()
    seen = [False] * forest.size
    arcs: list[tuple[int, int]] = []
    for start in range(forest.size):
        if seen[start]:
            continue
        component = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            component.append(v)
            for u in adj[v]:
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
        root = min(component, key=lambda v: (-len(adj[v]), v))
        visited = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if u not in visited:
                    visited.add(u)
                    arcs.append((v, u))
                    queue.append(u)
    return tuple(arcs)


@dataclass
class DendroidModel:
    """Rooted dependency forest with smoothed probability tables."""

    head: str
    names: tuple[str, ...]
    domains: tuple[tuple[str, ...], ...]
    arcs: tuple[tuple[int, int], ...]
    root_tables: dict[int, np.ndarray]
    arc_tables: dict[tuple[int, int], np.ndarray]
    num_train_rows: int

    def __post_init__(self):
        self.names = tuple(self.names)
        self.domains = tuple(tuple(d) for d in self.domains)
        self.arcs = tuple((int(p), int(c)) for p, c in self.arcs)
        n = len(self.names)
        if len(self.domains) != n:
            raise ValueError("one domain required per variable")
        if self.num_train_rows < 1:
            raise ValueError("training sample count must be at least 1")
        parent: dict[int, int] = {}
        uf = UnionFind(n)
        for p, c in self.arcs:
            if c in parent:
                raise ValueError(f"variable {self.names[c]!r} has two parents")
            parent[c] = p
            if not uf.union(p, c):
                raise ValueError("arc skeleton contains a cycle")
        roots = [v for v in range(n) if v not in parent]
        if set(self.root_tables) != set(roots):
            raise ValueError("root tables must cover exactly the root variables")
        if set(self.arc_tables) != set(self.arcs):
            raise ValueError("arc tables must cover exactly the arcs")
        for r, table in self.root_tables.items():
            table = np.asarray(table, dtype=float)
            self.root_tables[r] = table
            if table.shape != (self.k(r),):
                raise ValueError(f"root table shape mismatch for {self.names[r]!r}")
            if abs(table.sum() - 1.0) > _NORM_TOL or (table < 0).any():
                raise ValueError(f"root table for {self.names[r]!r} is not normalized")
        for (p, c), table in self.arc_tables.items():
            table = np.asarray(table, dtype=float)
            self.arc_tables[(p, c)] = table
            if table.shape != (self.k(p), self.k(c)):
                raise ValueError(
                    f"arc table shape mismatch for {self.names[p]!r}->{self.names[c]!r}"
                )
            if (np.abs(table.sum(axis=1) - 1.0) > _NORM_TOL).any() or (table < 0).any():
                raise ValueError(
                    f"arc table rows for {self.names[p]!r}->{self.names[c]!r} "
                    "are not normalized"
                )
        self._parent = parent

    # -- structure ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    def k(self, i: int) -> int:
        return len(self.domains[i])

    def roots(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.n) if v not in self._parent)

    def parent_of(self, v: int) -> int | None:
        return self._parent.get(v)

    def forest(self) -> DependencyForest:
        return DependencyForest(
            self.n, frozenset(normalize_edge(p, c) for p, c in self.arcs)
        )

    def index_of(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def parameter_count(self) -> int:
        """(k-1) per root plus k_parent*(k_child-1) per arc."""
        total = sum(self.k(r) - 1 for r in self.roots())
        total += sum(self.k(p) * (self.k(c) - 1) for p, c in self.arcs)
        return total

    # -- evaluation --------------------------------------------------------

    def _row_indices(self, row: Mapping[str, str] | Sequence[str]) -> np.ndarray:
        if isinstance(row, Mapping):
            missing = [name for name in self.names if name not in row]
            if missing:
                raise KeyError(f"assignment is missing variable {missing[0]!r}")
            tokens = [row[name] for name in self.names]
        else:
            tokens = list(row)
            if len(tokens) != self.n:
                raise ValueError("assignment must cover every variable")
        out = np.empty(self.n, dtype=np.int64)
        for i, tok in enumerate(tokens):
            try:
                out[i] = self.domains[i].index(tok)
            except ValueError:
                raise ValueError(
                    f"value {tok!r} not in the domain of {self.names[i]!r}"
                ) from None
        return out

    def evaluate(self, row: Mapping[str, str] | Sequence[str]) -> float:
        """Probability of one full assignment (tokens, not indices)."""
        idx = self._row_indices(row)
        prob = 1.0
        for r in self.roots():
            prob *= float(self.root_tables[r][idx[r]])
        for p, c in self.arcs:
            prob *= float(self.arc_tables[(p, c)][idx[p], idx[c]])
        return prob

    def _check_compatible(self, data: DiscreteDataset):
        if data.names != self.names or data.domains != self.domains:
            raise ValueError("dataset variables/domains do not match the model")

    def log2_row_probs(self, data: DiscreteDataset) -> np.ndarray:
        """Vectorized log2-probability of every dataset row."""
        self._check_compatible(data)
        with np.errstate(divide="ignore"):
            logs = np.zeros(data.num_rows)
            for r in self.roots():
                logs += np.log2(self.root_tables[r])[data.rows[:, r]]
            for p, c in self.arcs:
                logs += np.log2(self.arc_tables[(p, c)])[
                    data.rows[:, p], data.rows[:, c]
                ]
        return logs

    # -- sampling ----------------------------------------------------------

    def sample(self, seed, count: int) -> DiscreteDataset:
        """Draw ``count`` rows, roots first, children in topological order."""
        if count < 1:
            raise ValueError("count must be at least 1")
        rng = np.random.default_rng(seed)

        def draw(cdf_rows: np.ndarray) -> np.ndarray:
            u = rng.random(count)
            idx = (u[:, None] > cdf_rows).sum(axis=1)
            return np.minimum(idx, cdf_rows.shape[1] - 1)

        columns: dict[int, np.ndarray] = {}
        for r in self.roots():
            cdf = np.cumsum(self.root_tables[r])
            columns[r] = draw(np.broadcast_to(cdf, (count, cdf.size)))
        for p, c in self.arcs:
            cdf = np.cumsum(self.arc_tables[(p, c)], axis=1)
            columns[c] = draw(cdf[columns[p]])
        rows = np.column_stack([columns[i] for i in range(self.n)])
        return DiscreteDataset(self.head, self.names, self.domains, rows)

    # -- marginalization ---------------------------------------------------

    def marginals(self) -> list[np.ndarray]:
        """Single-variable marginals, propagated from the roots."""
        out: list[np.ndarray | None] = [None] * self.n
        for r in self.roots():
            out[r] = self.root_tables[r].copy()
        for p, c in self.arcs:
            out[c] = out[p] @ self.arc_tables[(p, c)]
        return list(out)  # type: ignore[return-value]

    def pairwise_marginal(self, i: int, j: int) -> np.ndarray:
        """Exact joint distribution of variables i and j under the model."""
        if i == j:
            raise ValueError("pairwise marginal requires two distinct variables")
        marg = self.marginals()
        path = self._path(i, j)
        if path is None:
            return np.outer(marg[i], marg[j])
        table = np.diag(marg[i])
        for v, u in zip(path, path[1:]):
            if (v, u) in self.arc_tables:
                step = self.arc_tables[(v, u)]
            else:
                # Walking child -> parent: invert the arc with Bayes' rule.
                down = self.arc_tables[(u, v)]
                with np.errstate(divide="ignore", invalid="ignore"):
                    step = (down * marg[u][:, None]).T
                    step = np.where(
                        marg[v][:, None] > 0, step / marg[v][:, None], 0.0
                    )
            table = table @ step
        return table

    def _path(self, i: int, j: int) -> list[int] | None:
        adj = self.forest().adjacency()
        prev = {i: None}
        queue = deque([i])
        while queue:
            v = queue.popleft()
            if v == j:
                path = [v]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                return path[::-1]
            for u in adj[v]:
                if u not in prev:
                    prev[u] = v
                    queue.append(u)
        return None

    def joint_array(self, max_cells: int = 4096) -> np.ndarray:
        """Fully enumerated joint distribution, flattened in row-major order."""
        shape = tuple(self.k(i) for i in range(self.n))
        cells = int(np.prod(shape))
        if cells > max_cells:
            raise ValueError(f"joint enumeration of {cells} cells exceeds {max_cells}")

        def spread(table: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
            dims = [1] * self.n
            for ax in axes:
                dims[ax] = shape[ax]
            if len(axes) == 2 and axes[0] > axes[1]:
                table = table.T
            return table.reshape(dims)

        joint = np.ones(shape)
        for r in self.roots():
            joint = joint * spread(self.root_tables[r], (r,))
        for p, c in self.arcs:
            joint = joint * spread(self.arc_tables[(p, c)], (p, c))
        return joint.ravel()

    def __eq__(self, other):
        if not isinstance(other, DendroidModel):
            return NotImplemented
        return (
            self.head == other.head
            and self.names == other.names
            and self.domains == other.domains
            and self.arcs == other.arcs
            and self.num_train_rows == other.num_train_rows
            and set(self.root_tables) == set(other.root_tables)
            and all(
                np.array_equal(self.root_tables[r], other.root_tables[r])
                for r in self.root_tables
            )
            and all(
                np.array_equal(self.arc_tables[a], other.arc_tables[a])
                for a in self.arc_tables
            )
        )


def fit_parameters(
    structure: DependencyForest,
    data: DiscreteDataset,
    smoothing: str = ELE,
    arcs: tuple[tuple[int, int], ...] | None = None,
) -> DendroidModel:
    """Root the forest and estimate its tables from the dataset.

    With the default smoothing, roots get (count+0.5)/(N+0.5k) and arcs get
    (count(parent,child)+0.5)/(count(parent)+0.5*k_child), so every factor
    is strictly positive.  ``smoothing="ml"`` uses raw relative frequencies
    (rows for unseen parent values fall back to uniform); the raw fit
    represents the empirical tree projection exactly, which makes its
    training likelihood independent of where each tree is rooted.

    An explicit ``arcs`` orientation may be supplied instead of the default
    rooting policy; it must cover exactly the forest's edges.
    """
    if smoothing not in (ELE, ML):
        raise ValueError(f"unknown smoothing {smoothing!r}")
    if structure.size != data.n:
        raise ValueError("structure and dataset disagree on the variable count")
    if arcs is None:
        arcs = root_trees(structure)
    else:
        arcs = tuple(arcs)
        if {normalize_edge(p, c) for p, c in arcs} != set(structure.edges):
            raise ValueError("arcs must orient exactly the forest's edges")
    num = data.num_rows
    children = {c for _, c in arcs}
    root_tables: dict[int, np.ndarray] = {}
    for v in range(data.n):
        if v in children:
            continue
        c = np.bincount(data.rows[:, v], minlength=data.k(v)).astype(float)
        if smoothing == ELE:
            root_tables[v] = (c + 0.5) / (num + 0.5 * data.k(v))
        else:
            root_tables[v] = c / num
    arc_tables: dict[tuple[int, int], np.ndarray] = {}
    for p, c in arcs:
        kp, kc = data.k(p), data.k(c)
        flat = data.rows[:, p] * kc + data.rows[:, c]
        joint = np.bincount(flat, minlength=kp * kc).astype(float).reshape(kp, kc)
        parent_counts = joint.sum(axis=1, keepdims=True)
        if smoothing == ELE:
            arc_tables[(p, c)] = (joint + 0.5) / (parent_counts + 0.5 * kc)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                table = np.where(parent_counts > 0, joint / parent_counts, 1.0 / kc)
            arc_tables[(p, c)] = table
    return DendroidModel(
        head=data.head,
        names=data.names,
        domains=data.domains,
        arcs=arcs,
        root_tables=root_tables,
        arc_tables=arc_tables,
        num_train_rows=num,
    )
