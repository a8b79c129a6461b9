"""Forest structure learning by thresholded maximum-mutual-information growth.

Every variable pair is scored once with the smoothed mutual information I
and its acceptance threshold theta.  Pairs are then popped greedily; a
popped pair whose information clears its threshold contributes an edge
unless that edge would close a cycle, which a union-find partition
detects, and the loop ends as soon as the queue's head fails I > theta.

Adding edge (i,j) to a forest changes the two-part description length of
the fitted model by exactly -N*(I - theta) (see ``evaluation``), so the
queue is ordered by descending I - theta: the loop is then the standard
greedy for a maximum-weight forest and provably minimizes the description
length, and every pair after the first failing head fails its own
threshold too.  When all variables share one domain size the thresholds
share one value, making this ordering identical to descending-I order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .caseframes import ABSENT, DiscreteDataset
from .model import DendroidModel, DependencyForest, fit_parameters
from .stats import ele_joint, mutual_information, threshold
from .unionfind import UnionFind

ELE = "ele"


@dataclass(frozen=True)
class ScoredPair:
    """One unordered variable pair with its information and threshold."""

    i: int
    j: int
    mi: float
    theta: float

    @property
    def weight(self) -> float:
        return self.mi - self.theta


def score_pairs(data: DiscreteDataset) -> list[ScoredPair]:
    """Score all n(n-1)/2 variable pairs of a dataset."""
    pairs = []
    for i in range(data.n):
        for j in range(i + 1, data.n):
            mi = mutual_information(ele_joint(data, i, j))
            theta = threshold(data.k(i), data.k(j), data.num_rows)
            pairs.append(ScoredPair(i=i, j=j, mi=mi, theta=theta))
    return pairs


def learn_structure(data: DiscreteDataset) -> DependencyForest:
    """Grow the dependency forest that the scored pairs support.

    Ties in the description-length gain break toward higher information,
    then the lexicographically smaller pair, so output is deterministic.
    """
    queue = sorted(
        score_pairs(data), key=lambda p: (-(p.mi - p.theta), -p.mi, p.i, p.j)
    )
    uf = UnionFind(data.n)
    edges = set()
    for pair in queue:
        if not pair.mi > pair.theta:
            break
        if uf.union(pair.i, pair.j):
            edges.add((pair.i, pair.j))
    return DependencyForest(data.n, frozenset(edges))


def learn_model(data: DiscreteDataset, smoothing: str = ELE) -> DendroidModel:
    """Learn the structure, root it, and fit its probability tables."""
    return fit_parameters(learn_structure(data), data, smoothing=smoothing)


@dataclass(frozen=True)
class DependencyLink:
    """One reported slot pair: joint presence score and its direction."""

    i: int
    j: int
    name_i: str
    name_j: str
    score: float
    positive: bool


def dependency_report(
    data: DiscreteDataset,
    score_threshold: float = 0.25,
    smoothed: bool = True,
    conditional: bool = False,
) -> list[DependencyLink]:
    """Positively dependent slot pairs whose score clears the threshold.

    Requires a slot-view dataset (every domain is {0,1}).  The score is
    the smoothed joint presence probability P(Xi=1, Xj=1); ``smoothed=False``
    switches to raw relative frequencies, and ``conditional=True`` scores
    max(P(Xi=1|Xj=1), P(Xj=1|Xi=1)) instead of the joint.  A pair counts
    as positively dependent when its joint presence probability exceeds
    the product of the presence marginals.  Results are sorted by
    descending score, then variable order.
    """
    for i, domain in enumerate(data.domains):
        if domain != (ABSENT, "1"):
            raise ValueError(
                f"dependency report requires a slot view; variable "
                f"{data.names[i]!r} has domain {domain}"
            )
    links = []
    for i in range(data.n):
        for j in range(i + 1, data.n):
            if smoothed:
                table = ele_joint(data, i, j)
                probs = table.probs
                p_i, p_j = table.marginals_i, table.marginals_j
            else:
                counts = np.zeros((2, 2))
                np.add.at(counts, (data.rows[:, i], data.rows[:, j]), 1.0)
                probs = counts / data.num_rows
                p_i, p_j = probs.sum(axis=1), probs.sum(axis=0)
            joint11 = float(probs[1, 1])
            positive = joint11 > float(p_i[1] * p_j[1])
            if conditional:
                with np.errstate(divide="ignore", invalid="ignore"):
                    score = max(
                        joint11 / p_j[1] if p_j[1] > 0 else 0.0,
                        joint11 / p_i[1] if p_i[1] > 0 else 0.0,
                    )
            else:
                score = joint11
            if positive and score > score_threshold:
                links.append(
                    DependencyLink(
                        i=i,
                        j=j,
                        name_i=data.names[i],
                        name_j=data.names[j],
                        score=float(score),
                        positive=positive,
                    )
                )
    links.sort(key=lambda l: (-l.score, l.i, l.j))
    return links
