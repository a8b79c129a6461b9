"""Smoothed discrete statistics, all in bits (base-2 logarithms).

Probabilities are estimated by adding 0.5 to observed frequencies before
normalizing (the expected-likelihood estimate), which keeps every table
entry strictly positive.  Mutual information is computed on the smoothed
pairwise table with marginals taken from that same table; this convention
is relied on by the structure learner and must not change.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .caseframes import DiscreteDataset

#: Tolerance for clamping negative round-off in information quantities.
ROUNDOFF = 1e-12


@dataclass
class JointTable:
    """Smoothed pairwise distribution of two dataset variables."""

    var_i: str
    var_j: str
    probs: np.ndarray
    marginals_i: np.ndarray
    marginals_j: np.ndarray
    num_rows: int

    def __post_init__(self):
        total = float(self.probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"joint table sums to {total}, not 1")
        if (self.probs <= 0).any():
            raise ValueError("joint table entries must be strictly positive")


def counts_1d(data: DiscreteDataset, i: int) -> np.ndarray:
    return np.bincount(data.rows[:, i], minlength=data.k(i)).astype(float)


def counts_2d(data: DiscreteDataset, i: int, j: int) -> np.ndarray:
    ki, kj = data.k(i), data.k(j)
    flat = data.rows[:, i] * kj + data.rows[:, j]
    return np.bincount(flat, minlength=ki * kj).astype(float).reshape(ki, kj)


def ele_marginal(data: DiscreteDataset, i: int) -> np.ndarray:
    """Smoothed single-variable distribution (count+0.5)/(N+0.5k)."""
    c = counts_1d(data, i)
    return (c + 0.5) / (data.num_rows + 0.5 * data.k(i))


def ele_joint(data: DiscreteDataset, i: int, j: int) -> JointTable:
    """Smoothed pairwise table (count+0.5)/(N+0.5*ki*kj).

    Marginals are row/column sums of the smoothed table.
    """
    if i == j:
        raise ValueError("pairwise table requires two distinct variables")
    if not (0 <= i < data.n and 0 <= j < data.n):
        raise IndexError("variable index out of range")
    c = counts_2d(data, i, j)
    probs = (c + 0.5) / (data.num_rows + 0.5 * data.k(i) * data.k(j))
    return JointTable(
        var_i=data.names[i],
        var_j=data.names[j],
        probs=probs,
        marginals_i=probs.sum(axis=1),
        marginals_j=probs.sum(axis=0),
        num_rows=data.num_rows,
    )


def mutual_information(table: JointTable) -> float:
    """I = sum p(a,b) log2[p(a,b) / (p(a) p(b))], clamped at zero."""
    outer = np.outer(table.marginals_i, table.marginals_j)
    value = float(np.sum(table.probs * np.log2(table.probs / outer)))
    return value if value > 0.0 else 0.0


def threshold(k_i: int, k_j: int, num_rows: int) -> float:
    """Edge-acceptance threshold (k_i-1)(k_j-1) log2(N) / (2N)."""
    if k_i < 1 or k_j < 1:
        raise ValueError("domain sizes must be at least 1")
    if num_rows < 1:
        raise ValueError("sample count must be at least 1")
    if num_rows == 1:
        warnings.warn("threshold computed from a single sample", stacklevel=2)
    return (k_i - 1) * (k_j - 1) * math.log2(num_rows) / (2.0 * num_rows)


def entropy(p: np.ndarray) -> float:
    """Entropy in bits of a probability vector (zero entries contribute 0)."""
    p = np.asarray(p, dtype=float)
    mask = p > 0
    value = float(-(p[mask] * np.log2(p[mask])).sum())
    return value if value > 0.0 else 0.0


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """D(p||q) in bits over a shared support; requires q>0 wherever p>0."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"support mismatch: {p.shape} vs {q.shape}")
    mask = p > 0
    if (q[mask] <= 0).any():
        raise ValueError("q assigns zero probability where p is positive")
    value = float((p[mask] * np.log2(p[mask] / q[mask])).sum())
    if value < 0.0:
        if value < -ROUNDOFF * max(1.0, p.size):
            # Larger negatives mean the inputs were not distributions.
            raise ValueError(f"negative divergence {value}; inputs not normalized?")
        value = 0.0
    return value


def log2_likelihood(model, data: DiscreteDataset) -> float:
    """Total log2-probability a model assigns to every row of a dataset."""
    return float(model.log2_row_probs(data).sum())


def cross_entropy(model, test: DiscreteDataset) -> float:
    """Per-row average negative log2-probability of held-out rows."""
    logs = model.log2_row_probs(test)
    if not np.isfinite(logs).all():
        raise ValueError("model assigns zero probability to a test row")
    return float(-logs.mean())


def perplexity(model, test: DiscreteDataset) -> float:
    """2 raised to the cross-entropy of the test rows under the model."""
    return float(2.0 ** cross_entropy(model, test))
