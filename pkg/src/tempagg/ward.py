"""Hierarchical Ward clustering of aggregation candidates.

The merge tree is built with the nearest-neighbor-chain algorithm.  Merge
costs are SSE increases, computed from cluster sizes and centroids:

    cost(A, B) = |A| |B| / (|A| + |B|) * ||mu_A - mu_B||^2

which for Ward's criterion is exactly the value the Lance-Williams
recurrence maintains.  Only O(n) state (sizes, centroids, the chain) is
kept and candidate-to-cluster costs are recomputed on demand, so no
quadratic distance matrix is stored.

The chain schedule emits merges out of cost order; the public sequence is
canonicalized by sorting on (cost, first-member labels), which for a
reducible criterion like Ward reproduces the cheapest-pair-first order.
Cluster labels are first-member candidate indices while merging and are
compacted to 0..k-1 by first occurrence when a flat clustering is cut.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .candidates import CandidateMatrix, CandidateMode

__all__ = ["Merge", "WardTree", "ClusterResult", "ward_tree", "ward_cluster",
           "inject_extreme_candidates"]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Merge:
    """One agglomeration step: clusters ``a`` and ``b`` (a < b) joined.

    Labels are first-member candidate indices; ``cost`` is the increase
    in total within-cluster SSE caused by the merge.
    """

    cost: float
    a: int
    b: int


@dataclass(frozen=True)
class WardTree:
    """Full merge sequence over n candidates, cheapest merges first."""

    n_candidates: int
    merges: tuple[Merge, ...]

    def cut(self, k: int) -> np.ndarray:
        """Assignment after applying all but the last k-1 merges.

        Labels are contiguous 0..k-1, ordered by first-occurring member.
        """
        n = self.n_candidates
        if not 1 <= k <= n:
            raise ValueError(f"cannot cut {n} candidates into {k} clusters")
        parent = np.arange(n)

        def find(x: int) -> int:
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for merge in self.merges[: n - k]:
            ra, rb = find(merge.a), find(merge.b)
            if ra > rb:
                ra, rb = rb, ra
            parent[rb] = ra
        roots = np.array([find(i) for i in range(n)])
        # roots are minimal member indices, so ascending root order is
        # first-occurrence order
        uniq = np.unique(roots)
        relabel = {int(r): i for i, r in enumerate(uniq)}
        return np.array([relabel[int(r)] for r in roots], dtype=np.int64)


@dataclass(frozen=True)
class ClusterResult:
    """Flat clustering of a candidate matrix.

    ``assignment[i]`` is the cluster of candidate i with labels 0..k-1
    ordered by first occurrence, ``sizes[c]`` the member count and
    ``centroids[c]`` the arithmetic mean feature vector of cluster c.
    ``mode`` and ``period_length`` mirror the clustered candidates.
    """

    k: int
    assignment: np.ndarray
    sizes: np.ndarray
    centroids: np.ndarray
    mode: CandidateMode
    period_length: int
    attribute_names: tuple[str, ...]

    def __post_init__(self) -> None:
        assignment = np.asarray(self.assignment, dtype=np.int64)
        sizes = np.asarray(self.sizes, dtype=np.int64)
        centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.k < 1:
            raise ValueError("need at least one cluster")
        if assignment.ndim != 1 or centroids.ndim != 2:
            raise ValueError("malformed assignment or centroid array")
        if sizes.shape != (self.k,) or centroids.shape[0] != self.k:
            raise ValueError("sizes and centroids must have one entry per cluster")
        seen: list[int] = []
        for label in assignment:
            if label not in seen:
                seen.append(int(label))
        if seen != list(range(self.k)):
            raise ValueError(
                "cluster labels must be 0..k-1 ordered by first occurrence"
            )
        counted = np.bincount(assignment, minlength=self.k)
        if not np.array_equal(counted, sizes):
            raise ValueError("sizes do not match assignment counts")
        for arr in (assignment, sizes, centroids):
            arr.setflags(write=False)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "attribute_names", tuple(self.attribute_names))

    @property
    def n_candidates(self) -> int:
        return int(self.assignment.size)

    def members(self, cluster: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster)


class _CostScan:
    """Reusable buffers for Ward merge costs from one cluster to all slots.

    Keeps the evaluation order of ``sizes * (sizes[i] / (sizes + sizes[i]))
    * ||c - c[i]||^2`` bitwise identical to the naive expression while
    avoiding per-scan temporaries; the chain loop calls this tens of
    thousands of times on large candidate sets.
    """

    def __init__(self, n: int, dim: int):
        self.diff = np.empty((n, dim))
        self.sq = np.empty(n)
        self.weight = np.empty(n)
        self.cost = np.empty(n)

    def __call__(
        self, centroids: np.ndarray, sizes: np.ndarray, i: int, alive: np.ndarray
    ) -> np.ndarray:
        np.subtract(centroids, centroids[i], out=self.diff)
        np.einsum("ij,ij->i", self.diff, self.diff, out=self.sq)
        np.add(sizes, sizes[i], out=self.weight)
        np.divide(sizes[i], self.weight, out=self.weight)
        np.multiply(sizes, self.weight, out=self.weight)
        np.multiply(self.weight, self.sq, out=self.cost)
        self.cost[~alive] = np.inf
        self.cost[i] = np.inf
        return self.cost


def ward_tree(candidates: CandidateMatrix | np.ndarray) -> WardTree:
    """Build the full Ward merge tree with a nearest-neighbor chain.

    Accepts a candidate matrix or a plain (n, d) array.  Runs in roughly
    O(n^2 d) time and O(n d) memory.  Ties in nearest-neighbor scans
    resolve to the smallest slot index, and a tied chain predecessor is
    preferred so exact ties cannot oscillate.
    """
    rows = candidates.rows if isinstance(candidates, CandidateMatrix) else candidates
    X = np.array(rows, dtype=np.float64, copy=True)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n < 1:
        raise ValueError("need at least one candidate")
    sizes = np.ones(n, dtype=np.float64)
    centroids = X
    alive = np.ones(n, dtype=bool)
    scan = _CostScan(n, X.shape[1])
    merges: list[Merge] = []
    chain: list[int] = []
    n_alive = n
    while n_alive > 1:
        if not chain:
            chain.append(int(np.flatnonzero(alive)[0]))
        top = chain[-1]
        cost = scan(centroids, sizes, top, alive)
        nearest = int(np.argmin(cost))
        nearest_cost = float(cost[nearest])
        if len(chain) >= 2 and cost[chain[-2]] <= nearest_cost:
            nearest = chain[-2]
            nearest_cost = float(cost[nearest])
        if len(chain) >= 2 and nearest == chain[-2]:
            chain.pop()
            chain.pop()
            a, b = (top, nearest) if top < nearest else (nearest, top)
            total = sizes[a] + sizes[b]
            centroids[a] = (sizes[a] * centroids[a] + sizes[b] * centroids[b]) / total
            sizes[a] = total
            alive[b] = False
            merges.append(Merge(nearest_cost, a, b))
            n_alive -= 1
        else:
            chain.append(nearest)
    merges.sort(key=lambda m: (m.cost, m.a, m.b))
    return WardTree(n_candidates=n, merges=tuple(merges))


def _result_from_assignment(
    candidates: CandidateMatrix, assignment: np.ndarray
) -> ClusterResult:
    """Assemble a ClusterResult, recomputing exact centroids from members."""
    k = int(assignment.max()) + 1
    sizes = np.bincount(assignment, minlength=k)
    dim = candidates.rows.shape[1]
    sums = np.zeros((k, dim))
    np.add.at(sums, assignment, candidates.rows)
    centroids = sums / sizes[:, None]
    return ClusterResult(
        k=k,
        assignment=assignment,
        sizes=sizes,
        centroids=centroids,
        mode=candidates.mode,
        period_length=candidates.period_length,
        attribute_names=candidates.attribute_names,
    )


def ward_cluster(candidates: CandidateMatrix, k: int) -> ClusterResult:
    """Cluster candidates into k groups with Ward's criterion.

    k must lie in 1..n_candidates.  k = n yields singletons, k = 1 one
    cluster whose centroid is the global mean.  Centroids are recomputed
    as exact member means after the cut, so each is the least-squares
    representative of its cluster and the size-weighted centroid mean
    equals the global candidate mean up to rounding.
    """
    n = candidates.n_candidates
    if not 1 <= k <= n:
        raise ValueError(f"cluster count {k} outside valid range 1..{n}")
    tree = ward_tree(candidates)
    assignment = tree.cut(k)
    result = _result_from_assignment(candidates, assignment)
    logger.debug("ward clustering: %d candidates -> %d clusters", n, k)
    return result


def _extreme_candidate(candidates: CandidateMatrix, attribute: str) -> int:
    """Index of the candidate holding the attribute's maximum value."""
    if attribute not in candidates.attribute_names:
        raise KeyError(
            f"unknown attribute {attribute!r}; candidates carry "
            f"{list(candidates.attribute_names)}"
        )
    a = candidates.attribute_names.index(attribute)
    L = candidates.period_length
    block = candidates.rows[:, a * L : (a + 1) * L]
    return int(np.argmax(block.max(axis=1)))


def inject_extreme_candidates(
    candidates: CandidateMatrix,
    result: ClusterResult,
    attributes: list[str] | tuple[str, ...],
) -> ClusterResult:
    """Split each named attribute's peak candidate into its own cluster.

    Averaging flattens extremes, which can hide sizing-relevant peaks.
    For every attribute given, the candidate containing that attribute's
    maximum value is removed from its cluster and becomes a singleton,
    so the peak survives aggregation untouched.  Candidates already in a
    singleton stay put, which makes the operation idempotent.  k grows
    by the number of actual splits; all other members keep their
    grouping, with labels recompacted by first occurrence.
    """
    if result.n_candidates != candidates.n_candidates:
        raise ValueError("result does not belong to these candidates")
    extremes = sorted({_extreme_candidate(candidates, a) for a in attributes})
    assignment = np.array(result.assignment, dtype=np.int64)
    next_label = int(assignment.max()) + 1
    changed = False
    for idx in extremes:
        cluster = assignment[idx]
        if np.count_nonzero(assignment == cluster) == 1:
            continue
        assignment[idx] = next_label
        next_label += 1
        changed = True
    if not changed:
        return result
    # compact labels by first occurrence
    relabel: dict[int, int] = {}
    for label in assignment:
        if int(label) not in relabel:
            relabel[int(label)] = len(relabel)
    compacted = np.array([relabel[int(c)] for c in assignment], dtype=np.int64)
    return _result_from_assignment(candidates, compacted)
