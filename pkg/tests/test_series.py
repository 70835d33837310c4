import numpy as np
import pytest

from tempagg import TimeSeriesSet, normalize, rescale


def random_set(rng, n_attr=4, n_steps=50):
    names = tuple(f"attr{i}" for i in range(n_attr))
    values = rng.normal(0.0, 10.0, (n_attr, n_steps)) + rng.normal(
        0.0, 50.0, (n_attr, 1)
    )
    return TimeSeriesSet(names, values)


class TestTimeSeriesSet:
    def test_basic_accessors(self):
        ts = TimeSeriesSet(("a", "b"), np.array([[1.0, 2.0], [3.0, 4.0]]))
        assert ts.n_attributes == 2
        assert ts.n_steps == 2
        assert ts.index_of("b") == 1
        assert np.array_equal(ts.series("a"), [1.0, 2.0])

    def test_unknown_attribute(self):
        ts = TimeSeriesSet(("a",), np.zeros((1, 3)))
        with pytest.raises(KeyError):
            ts.index_of("missing")

    def test_values_are_read_only(self):
        ts = TimeSeriesSet(("a",), np.zeros((1, 3)))
        with pytest.raises(ValueError):
            ts.values[0, 0] = 1.0

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            TimeSeriesSet(("a",), np.array([[1.0, np.nan]]))
        with pytest.raises(ValueError):
            TimeSeriesSet(("a",), np.array([[1.0, np.inf]]))

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            TimeSeriesSet(("a", "a"), np.zeros((2, 3)))

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            TimeSeriesSet(("a", "b"), np.zeros((3, 4)))

    def test_subset_preserves_requested_order(self):
        ts = TimeSeriesSet(("a", "b", "c"), np.arange(9.0).reshape(3, 3))
        sub = ts.subset(("c", "a"))
        assert sub.attribute_names == ("c", "a")
        assert np.array_equal(sub.values[0], ts.series("c"))
        assert np.array_equal(sub.values[1], ts.series("a"))


class TestNormalize:
    def test_range_is_unit_interval(self):
        rng = np.random.default_rng(7)
        ts = random_set(rng)
        norm, _ = normalize(ts)
        assert norm.values.min() >= 0.0
        assert norm.values.max() <= 1.0
        assert np.allclose(norm.values.min(axis=1), 0.0)
        assert np.allclose(norm.values.max(axis=1), 1.0)

    def test_round_trip_is_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            ts = random_set(rng, n_attr=rng.integers(1, 6), n_steps=30)
            norm, params = normalize(ts)
            back = rescale(norm.values, norm.attribute_names, params)
            assert np.max(np.abs(back - ts.values)) <= 1e-12 * max(
                1.0, np.max(np.abs(ts.values))
            )

    def test_constant_attribute_maps_to_zero(self):
        ts = TimeSeriesSet(
            ("flat", "vary"), np.array([[5.0, 5.0, 5.0], [0.0, 1.0, 2.0]])
        )
        norm, params = normalize(ts)
        assert np.array_equal(norm.series("flat"), [0.0, 0.0, 0.0])
        back = rescale(norm.values, norm.attribute_names, params)
        assert np.array_equal(back[0], [5.0, 5.0, 5.0])

    def test_params_bounds(self):
        ts = TimeSeriesSet(("x",), np.array([[-3.0, 7.0, 1.0]]))
        _, params = normalize(ts)
        assert params.bounds("x") == (-3.0, 7.0)
        with pytest.raises(KeyError):
            params.bounds("y")

    def test_rescale_unknown_attribute(self):
        ts = TimeSeriesSet(("x",), np.array([[0.0, 1.0]]))
        _, params = normalize(ts)
        with pytest.raises(KeyError):
            rescale(np.zeros((1, 2)), ("nope",), params)

    def test_rescale_partial_attribute_selection(self):
        rng = np.random.default_rng(3)
        ts = random_set(rng, n_attr=3)
        norm, params = normalize(ts)
        back = rescale(norm.values[1:2], ("attr1",), params)
        assert np.allclose(back[0], ts.series("attr1"), atol=1e-12, rtol=0)
