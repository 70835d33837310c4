"""Independent clustering references used to validate the fast implementation.

Two deliberately naive routes:

* ``greedy_ward_merges``: textbook agglomeration that keeps a full cost
  matrix, scans every active pair each round (O(n^3) total) and updates
  costs with the Lance-Williams recurrence.  No nearest-neighbor chain,
  no centroid shortcut.
* ``best_partition_sse``: exhaustive enumeration of all set partitions
  into k non-empty blocks, returning the assignment with minimal total
  within-cluster sum of squared errors.

Both are intentionally slow and only used for small n in tests.
"""

from __future__ import annotations

import itertools

import numpy as np


def greedy_ward_merges(points: np.ndarray) -> list[tuple[float, int, int]]:
    """Agglomerate by repeatedly merging the globally cheapest pair.

    Returns one record per merge as (cost, a, b) where cost is the SSE
    increase and a < b are the first-member indices of the merged
    clusters.  Ties on cost resolve to the lexicographically smallest
    (a, b) pair.  Costs between merged clusters are maintained with the
    Lance-Williams recurrence for Ward's criterion.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    sizes = {i: 1 for i in range(n)}
    cost: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            cost[(i, j)] = 0.5 * float(np.sum((X[i] - X[j]) ** 2))
    active = list(range(n))
    merges: list[tuple[float, int, int]] = []
    while len(active) > 1:
        best_pair = None
        best_cost = None
        for ia in range(len(active)):
            for ib in range(ia + 1, len(active)):
                pair = (active[ia], active[ib])
                c = cost[pair]
                if best_cost is None or c < best_cost:
                    best_cost = c
                    best_pair = pair
        assert best_pair is not None and best_cost is not None
        a, b = best_pair
        merges.append((best_cost, a, b))
        # Lance-Williams update of the merged cluster's cost to the rest
        for other in active:
            if other in (a, b):
                continue
            ka = (min(a, other), max(a, other))
            kb = (min(b, other), max(b, other))
            total = sizes[a] + sizes[b] + sizes[other]
            merged = (
                (sizes[a] + sizes[other]) * cost[ka]
                + (sizes[b] + sizes[other]) * cost[kb]
                - sizes[other] * cost[(a, b)]
            ) / total
            cost[(min(a, other), max(a, other))] = merged
            del cost[kb]
        del cost[(a, b)]
        sizes[a] = sizes[a] + sizes[b]
        del sizes[b]
        active.remove(b)
    return merges


def assignment_from_merges(
    n: int, merges: list[tuple[float, int, int]], k: int
) -> np.ndarray:
    """Cut a merge sequence at k clusters, labels ordered by first member."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for _, a, b in merges[: n - k]:
        ra, rb = find(a), find(b)
        lo, hi = min(ra, rb), max(ra, rb)
        parent[hi] = lo
    roots = sorted({find(i) for i in range(n)})
    label = {r: idx for idx, r in enumerate(roots)}
    return np.array([label[find(i)] for i in range(n)], dtype=np.int64)


def _partitions_into_k(items: list[int], k: int):
    """Yield all partitions of ``items`` into exactly k non-empty blocks."""
    if k == 1:
        yield [items]
        return
    if len(items) == k:
        yield [[x] for x in items]
        return
    first, rest = items[0], items[1:]
    # first joins an existing block of a (k)-partition of the rest
    for part in _partitions_into_k(rest, k):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
    # or first forms its own block next to a (k-1)-partition of the rest
    for part in _partitions_into_k(rest, k - 1):
        yield [[first]] + part


def partition_sse(points: np.ndarray, blocks: list[list[int]]) -> float:
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    total = 0.0
    for block in blocks:
        rows = X[block]
        mu = rows.mean(axis=0)
        total += float(np.sum((rows - mu) ** 2))
    return total


def best_partition_sse(points: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Exhaustively find the k-partition with minimal within-cluster SSE.

    Returns (assignment labeled by first occurrence, optimal SSE).  Only
    feasible for small n; the search is over all Stirling partitions.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    best: tuple[float, list[list[int]]] | None = None
    for blocks in _partitions_into_k(list(range(n)), k):
        sse = partition_sse(X, blocks)
        if best is None or sse < best[0]:
            best = (sse, blocks)
    assert best is not None
    sse, blocks = best
    ordered = sorted(blocks, key=min)
    assignment = np.empty(n, dtype=np.int64)
    for label, block in enumerate(ordered):
        assignment[block] = label
    return assignment, sse
