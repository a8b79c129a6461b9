"""Model evaluation: cross-validated perplexity, the exhaustive
description-length oracle, synthetic model generation, and learning curves.

The description length of a forest decomposes as

    DL(F) = N * sum_i H(X_i)  -  N * sum_{(i,j) in F} I(X_i, X_j)
            + (log2 N / 2) * [ sum_i (k_i - 1) + sum_{(i,j) in F} (k_i-1)(k_j-1) ]

with H and I taken from the smoothed tables.  The parameter term equals
the rooted parameter count for any rooting, so adding edge (i,j) changes
DL by exactly -N * (I_ij - theta_ij): greedy forest growth on the
information scores and exhaustive minimization search the same objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caseframes import DiscreteDataset
from .learner import learn_model, score_pairs
from .model import (
    DendroidModel,
    DependencyForest,
    enumerate_forests,
    fit_parameters,
    normalize_edge,
    root_trees,
)
from .stats import ele_marginal, entropy, kl_divergence, perplexity
from .unionfind import UnionFind

MAX_ORACLE_VARIABLES = 5
MAX_JOINT_CELLS = 4096


@dataclass(frozen=True)
class CrossValidation:
    dendroid_perplexity: float
    independent_perplexity: float
    reduction_percent: float


def independent_model(data: DiscreteDataset, smoothing: str = "ele") -> DendroidModel:
    """Edgeless model: every variable fitted independently."""
    return fit_parameters(DependencyForest(data.n), data, smoothing=smoothing)


def cross_validate(
    data: DiscreteDataset, folds: int = 10, seed: int | None = 0
) -> CrossValidation:
    """Average held-out perplexity of the learned vs. the edgeless model.

    Rows are shuffled once with the seed and split into contiguous
    near-equal folds.  Domains come from the full dataset, so smoothing
    covers values a training split happens to miss.
    """
    num = data.num_rows
    if folds < 2:
        raise ValueError("need at least 2 folds")
    if folds > num:
        raise ValueError(f"cannot split {num} rows into {folds} folds")
    order = np.random.default_rng(seed).permutation(num)
    base, extra = divmod(num, folds)
    dendroid_ppl = []
    independent_ppl = []
    start = 0
    for f in range(folds):
        size = base + (1 if f < extra else 0)
        test_idx = order[start : start + size]
        train_idx = np.concatenate([order[:start], order[start + size :]])
        start += size
        train = data.subset(train_idx)
        test = data.subset(test_idx)
        dendroid_ppl.append(perplexity(learn_model(train), test))
        independent_ppl.append(perplexity(independent_model(train), test))
    dendroid = float(np.mean(dendroid_ppl))
    independent = float(np.mean(independent_ppl))
    reduction = 100.0 * (independent - dendroid) / independent
    return CrossValidation(dendroid, independent, reduction)


def description_length(forest: DependencyForest, data: DiscreteDataset) -> float:
    """Two-part code length, in bits, of a forest model for the dataset."""
    if forest.size != data.n:
        raise ValueError("forest and dataset disagree on the variable count")
    num = data.num_rows
    data_bits = num * sum(entropy(ele_marginal(data, i)) for i in range(data.n))
    params = sum(data.k(i) - 1 for i in range(data.n))
    by_pair = {(p.i, p.j): p for p in score_pairs(data)}
    for i, j in forest.edges:
        pair = by_pair[normalize_edge(i, j)]
        data_bits -= num * pair.mi
        params += (data.k(i) - 1) * (data.k(j) - 1)
    return data_bits + 0.5 * math.log2(num) * params


def brute_force_mdl(data: DiscreteDataset) -> DependencyForest:
    """Exhaustive minimum-description-length forest (small n only).

    Ties prefer fewer edges, then the lexicographically smaller edge list.
    """
    if data.n > MAX_ORACLE_VARIABLES:
        raise ValueError(
            f"exhaustive search supports at most {MAX_ORACLE_VARIABLES} variables"
        )
    best = None
    best_key = None
    for forest in enumerate_forests(data.n):
        key = (
            description_length(forest, data),
            len(forest.edges),
            forest.sorted_edges(),
        )
        if best_key is None or key < best_key:
            best, best_key = forest, key
    return best


def make_random_dendroid(
    n: int,
    k: int,
    edges: int,
    seed,
    strength: float = 0.75,
    head: str = "synthetic",
) -> DendroidModel:
    """Random rooted forest with the requested edge count.

    Conditional rows are a convex mix of a random positive row and a
    one-hot peak; distinct parent values peak at distinct child values, so
    ``strength`` controls how far rows sit from one another (0 = no
    built-in dependence, values near 1 = near-deterministic edges).
    """
    if not 0 <= edges <= n - 1:
        raise ValueError(f"cannot place {edges} edges on {n} variables")
    if not 0.0 <= strength < 1.0:
        raise ValueError("strength must be in [0, 1)")
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    uf = UnionFind(n)
    chosen = set()
    for i, j in pairs:
        if len(chosen) == edges:
            break
        if uf.union(i, j):
            chosen.add((i, j))
    forest = DependencyForest(n, frozenset(chosen))
    arcs = root_trees(forest)
    names = tuple(f"x{i}" for i in range(n))
    domains = tuple(tuple(str(v) for v in range(k)) for _ in range(n))

    def positive_row() -> np.ndarray:
        row = rng.uniform(0.05, 1.0, size=k)
        return row / row.sum()

    children = {c for _, c in arcs}
    root_tables = {
        v: positive_row() for v in range(n) if v not in children
    }
    arc_tables = {}
    for p, c in arcs:
        peaks = rng.permutation(k)
        table = np.empty((k, k))
        for a in range(k):
            one_hot = np.zeros(k)
            one_hot[peaks[a]] = 1.0
            table[a] = (1.0 - strength) * positive_row() + strength * one_hot
        arc_tables[(p, c)] = table
    return DendroidModel(
        head=head,
        names=names,
        domains=domains,
        arcs=arcs,
        root_tables=root_tables,
        arc_tables=arc_tables,
        num_train_rows=1,
    )


def model_joint(model: DendroidModel, max_cells: int = MAX_JOINT_CELLS) -> np.ndarray:
    return model.joint_array(max_cells=max_cells)


def model_kl(true_model: DendroidModel, approx_model: DendroidModel) -> float:
    """Exact KL(true || approx) in bits by full joint enumeration."""
    if (
        true_model.names != approx_model.names
        or true_model.domains != approx_model.domains
    ):
        raise ValueError("models are defined over different variables")
    return kl_divergence(model_joint(true_model), model_joint(approx_model))


@dataclass(frozen=True)
class CurveTrial:
    edges: int
    kl: float
    recovered: bool


@dataclass(frozen=True)
class LearningCurveRow:
    data_size: int
    mean_edges: float
    true_edges: int
    mean_kl: float
    trials: int


def curve_trials(
    true_model: DendroidModel, size: int, trials: int, seed: int
) -> list[CurveTrial]:
    """Sample/learn/evaluate ``trials`` times at one data size."""
    if trials < 1:
        raise ValueError("need at least one trial")
    true_edges = set(true_model.forest().edges)
    results = []
    for t in range(trials):
        sampled = true_model.sample(seed=[seed, size, t], count=size)
        learned = learn_model(sampled)
        kl = model_kl(true_model, learned)
        learned_edges = set(learned.forest().edges)
        results.append(
            CurveTrial(
                edges=len(learned_edges),
                kl=kl,
                recovered=learned_edges == true_edges,
            )
        )
    return results


def learning_curve(
    true_model: DendroidModel,
    sizes: list[int],
    trials: int,
    seed: int,
) -> list[LearningCurveRow]:
    """Mean learned-edge count and KL against the generator, per data size."""
    rows = []
    true_edges = len(true_model.forest().edges)
    for size in sizes:
        outcomes = curve_trials(true_model, size, trials, seed)
        rows.append(
            LearningCurveRow(
                data_size=size,
                mean_edges=float(np.mean([o.edges for o in outcomes])),
                true_edges=true_edges,
                mean_kl=float(np.mean([o.kl for o in outcomes])),
                trials=trials,
            )
        )
    return rows


def learning_curve_csv(rows: list[LearningCurveRow]) -> str:
    lines = ["size,mean_edges,true_edges,mean_kl,trials"]
    for row in rows:
        lines.append(
            f"{row.data_size},{row.mean_edges!r},{row.true_edges},"
            f"{row.mean_kl!r},{row.trials}"
        )
    return "\n".join(lines) + "\n"
