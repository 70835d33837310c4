import numpy as np
import pytest

from tempagg import (
    CandidateMatrix,
    CandidateMode,
    TimeSeriesSet,
    build_period_candidates,
    build_step_candidates,
    step_index_to_period,
)


@pytest.fixture
def ts():
    rng = np.random.default_rng(42)
    return TimeSeriesSet(
        ("load", "wind", "sun"), rng.uniform(0.0, 1.0, (3, 48))
    )


class TestStepCandidates:
    def test_rows_are_step_vectors(self, ts):
        cands = build_step_candidates(ts)
        assert cands.mode is CandidateMode.STEP
        assert cands.period_length == 1
        assert cands.rows.shape == (48, 3)
        for s in (0, 17, 47):
            assert np.array_equal(cands.rows[s], ts.values[:, s])

    def test_attribute_block(self, ts):
        cands = build_step_candidates(ts)
        wind = ts.attribute_names.index("wind")
        for s in (0, 20):
            block = cands.attribute_block(s, wind)
            assert block.shape == (1,)
            assert block[0] == ts.series("wind")[s]


class TestPeriodCandidates:
    def test_attribute_major_layout(self, ts):
        length = 12
        cands = build_period_candidates(ts, length)
        assert cands.mode is CandidateMode.PERIOD
        assert cands.rows.shape == (4, 3 * length)
        # candidate p holds attribute a's block at columns [a*L, (a+1)*L)
        for p in range(4):
            for a in range(3):
                expected = ts.values[a, p * length : (p + 1) * length]
                assert np.array_equal(
                    cands.rows[p, a * length : (a + 1) * length], expected
                )

    def test_round_trip_is_lossless(self, ts):
        cands = build_period_candidates(ts, 24)
        blocks = cands.rows.reshape(2, 3, 24)
        rebuilt = blocks.transpose(1, 0, 2).reshape(3, 48)
        assert np.array_equal(rebuilt, ts.values)

    def test_remainder_rejected_without_truncate(self, ts):
        with pytest.raises(ValueError, match="divisible|remainder|truncate"):
            build_period_candidates(ts, 7)

    def test_truncate_drops_trailing_steps(self, ts):
        cands = build_period_candidates(ts, 7, truncate=True)
        assert cands.rows.shape == (6, 21)
        assert cands.dropped_steps == 6
        assert np.array_equal(cands.rows[0, :7], ts.values[0, :7])

    def test_bad_period_length(self, ts):
        with pytest.raises(ValueError):
            build_period_candidates(ts, 0)
        with pytest.raises(ValueError):
            build_period_candidates(ts, 49)


class TestStepIndexToPeriod:
    def test_div_mod_mapping(self):
        assert step_index_to_period(0, 24) == (0, 0)
        assert step_index_to_period(23, 24) == (0, 23)
        assert step_index_to_period(24, 24) == (1, 0)
        # step 100 sits at offset 4 of period 4 for daily periods
        assert step_index_to_period(100, 24) == (4, 4)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            step_index_to_period(-1, 24)
        with pytest.raises(ValueError):
            step_index_to_period(0, 0)


class TestCandidateMatrixValidation:
    def test_feature_count_must_match(self):
        with pytest.raises(ValueError):
            CandidateMatrix(
                rows=np.zeros((4, 5)),
                mode=CandidateMode.PERIOD,
                attribute_names=("a", "b"),
                period_length=2,
            )

    def test_rows_read_only(self, ts):
        cands = build_step_candidates(ts)
        with pytest.raises(ValueError):
            cands.rows[0, 0] = 9.9
