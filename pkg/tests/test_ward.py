import numpy as np
import pytest

from tempagg import (
    CandidateMatrix,
    CandidateMode,
    TimeSeriesSet,
    build_period_candidates,
    build_step_candidates,
    inject_extreme_candidates,
    normalize,
    ward_cluster,
    ward_tree,
)
from reference_cluster import (
    assignment_from_merges,
    best_partition_sse,
    greedy_ward_merges,
    partition_sse,
)


def step_candidates(values: np.ndarray) -> CandidateMatrix:
    """Wrap a (n, d) point array as step candidates of d attributes."""
    names = tuple(f"a{i}" for i in range(values.shape[1]))
    return CandidateMatrix(
        rows=np.asarray(values, dtype=np.float64),
        mode=CandidateMode.STEP,
        attribute_names=names,
    )


class TestFrozenInstance:
    """The {0, 1, 10, 11} line: every number checked against the naive
    reference and the exhaustive-partition optimum."""

    points = np.array([[0.0], [1.0], [10.0], [11.0]])

    def test_merge_sequence(self):
        tree = ward_tree(self.points)
        got = [(m.cost, m.a, m.b) for m in tree.merges]
        assert got == [(0.5, 0, 1), (0.5, 2, 3), (100.0, 0, 2)]

    def test_reference_agrees(self):
        reference = greedy_ward_merges(self.points)
        tree = ward_tree(self.points)
        assert [(m.a, m.b) for m in tree.merges] == [(a, b) for _, a, b in reference]
        assert np.allclose(
            [m.cost for m in tree.merges], [c for c, _, _ in reference]
        )

    def test_cut_matches_exhaustive_optimum(self):
        result = ward_cluster(step_candidates(self.points), 2)
        assert result.assignment.tolist() == [0, 0, 1, 1]
        _, best_sse = best_partition_sse(self.points, 2)
        blocks = [[0, 1], [2, 3]]
        assert partition_sse(self.points, blocks) == pytest.approx(best_sse)
        assert np.allclose(result.centroids, [[0.5], [10.5]])


class TestOracleAgreement:
    def test_matches_naive_reference_merge_for_merge(self):
        rng = np.random.default_rng(2024)
        for trial in range(100):
            n = int(rng.integers(2, 9))
            d = int(rng.integers(1, 3))
            points = np.round(rng.normal(0.0, 3.0, (n, d)), 3)
            tree = ward_tree(points)
            reference = greedy_ward_merges(points)
            got = [(m.a, m.b) for m in tree.merges]
            want = [(a, b) for _, a, b in reference]
            assert got == want, f"trial {trial}: {got} != {want}"
            assert np.allclose(
                [m.cost for m in tree.merges],
                [c for c, _, _ in reference],
                rtol=0, atol=1e-9,
            )

    def test_cut_matches_reference_cut(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            n = int(rng.integers(3, 9))
            points = rng.normal(0.0, 1.0, (n, 2))
            tree = ward_tree(points)
            merges = [(m.cost, m.a, m.b) for m in tree.merges]
            for k in range(1, n + 1):
                assert np.array_equal(
                    tree.cut(k), assignment_from_merges(n, merges, k)
                )


class TestClusterResult:
    def test_centroids_are_member_means(self):
        rng = np.random.default_rng(5)
        points = rng.uniform(-4.0, 4.0, (40, 3))
        result = ward_cluster(step_candidates(points), 7)
        for c in range(7):
            members = points[result.assignment == c]
            assert np.max(np.abs(result.centroids[c] - members.mean(axis=0))) <= 1e-9

    def test_sse_decreases_with_k(self):
        rng = np.random.default_rng(6)
        points = rng.normal(0.0, 1.0, (25, 2))
        cands = step_candidates(points)

        def sse(result):
            return float(
                ((points - result.centroids[result.assignment]) ** 2).sum()
            )

        values = [sse(ward_cluster(cands, k)) for k in (1, 3, 6, 12, 25)]
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        assert values[-1] == 0.0

    def test_merge_costs_sorted(self):
        rng = np.random.default_rng(8)
        points = rng.normal(0.0, 1.0, (30, 2))
        tree = ward_tree(points)
        costs = [m.cost for m in tree.merges]
        assert costs == sorted(costs)

    def test_deterministic(self):
        rng = np.random.default_rng(13)
        points = rng.normal(0.0, 1.0, (50, 4))
        a = ward_cluster(step_candidates(points), 9)
        b = ward_cluster(step_candidates(points.copy()), 9)
        assert np.array_equal(a.assignment, b.assignment)
        assert np.array_equal(a.centroids, b.centroids)

    def test_k_bounds(self):
        points = np.zeros((4, 1))
        cands = step_candidates(points)
        with pytest.raises(ValueError):
            ward_cluster(cands, 0)
        with pytest.raises(ValueError):
            ward_cluster(cands, 5)

    def test_singletons_at_k_equals_n(self):
        rng = np.random.default_rng(21)
        points = rng.normal(0.0, 1.0, (12, 2))
        result = ward_cluster(step_candidates(points), 12)
        assert np.array_equal(result.assignment, np.arange(12))
        assert np.allclose(result.centroids, points)


class TestExtremeInjection:
    def setup_method(self):
        self.values = np.array([[0.0, 1.0, 10.0, 11.0]])
        self.ts = TimeSeriesSet(("peak",), self.values)

    def test_splits_extreme_out_of_cluster(self):
        norm, _ = normalize(self.ts)
        cands = build_step_candidates(norm)
        base = ward_cluster(cands, 1)
        injected = inject_extreme_candidates(cands, base, ("peak",))
        assert injected.k == 2
        # step 3 carries the maximum and becomes its own representative
        assert injected.assignment[3] != injected.assignment[0]
        assert injected.sizes[injected.assignment[3]] == 1
        counts = np.bincount(injected.assignment)
        for c in range(injected.k):
            members = cands.rows[injected.assignment == c]
            assert np.allclose(injected.centroids[c], members.mean(axis=0))
        assert counts.sum() == 4

    def test_idempotent(self):
        norm, _ = normalize(self.ts)
        cands = build_step_candidates(norm)
        once = inject_extreme_candidates(cands, ward_cluster(cands, 1), ("peak",))
        twice = inject_extreme_candidates(cands, once, ("peak",))
        assert np.array_equal(once.assignment, twice.assignment)
        assert np.array_equal(once.centroids, twice.centroids)

    def test_unknown_attribute(self):
        norm, _ = normalize(self.ts)
        cands = build_step_candidates(norm)
        base = ward_cluster(cands, 1)
        with pytest.raises(KeyError):
            inject_extreme_candidates(cands, base, ("nope",))

    def test_period_mode_extreme_block(self):
        rng = np.random.default_rng(17)
        values = rng.uniform(0.0, 1.0, (2, 24))
        values[1, 13] = 5.0  # spike inside period 1 of length 12
        ts = TimeSeriesSet(("a", "b"), values)
        cands = build_period_candidates(ts, 12)
        base = ward_cluster(cands, 1)
        injected = inject_extreme_candidates(cands, base, ("b",))
        assert injected.k == 2
        assert injected.sizes[injected.assignment[1]] == 1
