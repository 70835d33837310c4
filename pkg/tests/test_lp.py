import numpy as np
import pytest

from tempagg import LinearProgram, SolveStatus, Tolerances, solve
from reference_lp import enumerate_lp_minimum, random_bounded_lp


def build_lp(c, rows, lower, upper) -> LinearProgram:
    lp = LinearProgram("random")
    for i in range(len(c)):
        lp.add_variable(f"x{i}", lower[i], upper[i], c[i])
    for r, (coefs, sense, rhs) in enumerate(rows):
        terms = {j: coefs[j] for j in range(len(c)) if coefs[j] != 0.0}
        lp.add_constraint(f"r{r}", terms, sense, rhs)
    return lp


def merit_order_lp() -> LinearProgram:
    """Two generators (caps 6 and 4, costs 1 and 2) covering demand 10."""
    lp = LinearProgram("merit")
    lp.add_variable("g1", 0.0, 6.0, 1.0)
    lp.add_variable("g2", 0.0, 4.0, 2.0)
    lp.add_constraint("demand", {"g1": 1.0, "g2": 1.0}, "=", 10.0)
    return lp


class TestSmallExamples:
    def test_merit_order_is_exactly_14(self):
        for method in ("simplex", "highs", "auto"):
            result = solve(merit_order_lp(), method=method)
            assert result.status is SolveStatus.OPTIMAL
            assert result.objective == 14.0
            assert result.value("g1") == 6.0
            assert result.value("g2") == 4.0

    def test_interior_point_route_agrees(self):
        result = solve(merit_order_lp(), method="highs-ipm")
        assert result.status is SolveStatus.OPTIMAL
        assert result.method == "highs-ipm"
        assert result.objective == pytest.approx(14.0, abs=1e-8)

    def test_lower_bound_floor(self):
        lp = LinearProgram("floor")
        lp.add_variable("x", 0.0, objective=1.0)
        lp.add_constraint("atleast", {"x": 1.0}, ">=", 3.0)
        result = solve(lp, method="simplex")
        assert result.objective == 3.0

    def test_negative_box(self):
        lp = LinearProgram("box")
        lp.add_variable("x", -5.0, 5.0, 1.0)
        result = solve(lp, method="simplex")
        assert result.objective == -5.0

    def test_free_variable(self):
        lp = LinearProgram("free")
        lp.add_variable("x", -np.inf, np.inf, 1.0)
        lp.add_constraint("cut", {"x": 1.0}, ">=", -7.0)
        result = solve(lp, method="simplex")
        assert result.objective == -7.0

    def test_unbounded(self):
        lp = LinearProgram("unbounded")
        lp.add_variable("x", 0.0, np.inf, -1.0)
        result = solve(lp, method="simplex")
        assert result.status is SolveStatus.UNBOUNDED
        assert result.objective is None
        assert result.values is None

    def test_infeasible(self):
        lp = LinearProgram("infeasible")
        lp.add_variable("x", 0.0, 10.0, 1.0)
        lp.add_constraint("hi", {"x": 1.0}, ">=", 3.0)
        lp.add_constraint("lo", {"x": 1.0}, "<=", 2.0)
        result = solve(lp, method="simplex")
        assert result.status is SolveStatus.INFEASIBLE

    def test_beale_cycling_instance(self):
        # classic degenerate instance that cycles under naive Dantzig pricing
        lp = LinearProgram("beale")
        lp.add_variable("x1", 0.0, objective=-0.75)
        lp.add_variable("x2", 0.0, objective=150.0)
        lp.add_variable("x3", 0.0, objective=-0.02)
        lp.add_variable("x4", 0.0, objective=6.0)
        lp.add_constraint(
            "r1", {"x1": 0.25, "x2": -60.0, "x3": -0.04, "x4": 9.0}, "<=", 0.0
        )
        lp.add_constraint(
            "r2", {"x1": 0.5, "x2": -90.0, "x3": -0.02, "x4": 3.0}, "<=", 0.0
        )
        lp.add_constraint("r3", {"x3": 1.0}, "<=", 1.0)
        result = solve(lp, method="simplex")
        assert result.status is SolveStatus.OPTIMAL
        assert result.objective == pytest.approx(-0.05, abs=1e-12)


class TestOracleAgreement:
    def test_200_random_lps_match_vertex_enumeration(self):
        rng = np.random.default_rng(77)
        solved = 0
        infeasible = 0
        for trial in range(200):
            pieces = random_bounded_lp(rng)
            lp = build_lp(*pieces)
            expected = enumerate_lp_minimum(*pieces)
            result = solve(lp, method="simplex")
            if expected is None:
                assert result.status is SolveStatus.INFEASIBLE, f"trial {trial}"
                infeasible += 1
            else:
                assert result.status is SolveStatus.OPTIMAL, f"trial {trial}"
                scale = max(1.0, abs(expected[0]))
                assert abs(result.objective - expected[0]) <= 1e-7 * scale, (
                    f"trial {trial}: {result.objective} vs {expected[0]}"
                )
                solved += 1
        assert solved >= 50
        assert infeasible >= 10

    def test_backends_agree(self):
        rng = np.random.default_rng(123)
        checked = 0
        for _ in range(60):
            lp = build_lp(*random_bounded_lp(rng))
            own = solve(lp, method="simplex")
            ext = solve(lp, method="highs")
            assert own.status is ext.status
            if own.status is SolveStatus.OPTIMAL:
                scale = max(1.0, abs(ext.objective))
                assert abs(own.objective - ext.objective) <= 1e-8 * scale
                checked += 1
        assert checked >= 15


class TestInvariances:
    def test_objective_scaling(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            lp = build_lp(*random_bounded_lp(rng))
            base = solve(lp, method="simplex")
            if base.status is not SolveStatus.OPTIMAL:
                continue
            scaled = LinearProgram("scaled")
            for name in lp.variable_names:
                lo, hi = lp.variable_bounds(name)
                i = lp.variable_index(name)
                scaled.add_variable(name, lo, hi, 3.0 * lp.objective_vector()[i])
            for r in range(lp.n_constraints):
                scaled.add_constraint(
                    f"r{r}", lp.constraint_row(r), lp.constraint_sense(r),
                    lp.constraint_rhs(r),
                )
            result = solve(scaled, method="simplex")
            assert result.objective == pytest.approx(3.0 * base.objective, abs=1e-9)

    def test_deterministic_repeat_including_iterations(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            lp = build_lp(*random_bounded_lp(rng))
            first = solve(lp, method="simplex")
            second = solve(lp, method="simplex")
            assert first.status is second.status
            assert first.iterations == second.iterations
            if first.status is SolveStatus.OPTIMAL:
                assert np.array_equal(first.values, second.values)


class TestValidation:
    def test_duplicate_variable(self):
        lp = LinearProgram()
        lp.add_variable("x")
        with pytest.raises(ValueError):
            lp.add_variable("x")

    def test_bad_names(self):
        lp = LinearProgram()
        with pytest.raises(ValueError):
            lp.add_variable("2bad")
        with pytest.raises(ValueError):
            lp.add_variable("has space")

    def test_unknown_variable_in_constraint(self):
        lp = LinearProgram()
        lp.add_variable("x")
        with pytest.raises(KeyError):
            lp.add_constraint("c", {"y": 1.0}, "<=", 1.0)

    def test_bad_sense_and_rhs(self):
        lp = LinearProgram()
        lp.add_variable("x")
        with pytest.raises(ValueError):
            lp.add_constraint("c", {"x": 1.0}, "<", 1.0)
        with pytest.raises(ValueError):
            lp.add_constraint("c", {"x": 1.0}, "<=", np.inf)

    def test_crossed_bounds(self):
        lp = LinearProgram()
        with pytest.raises(ValueError):
            lp.add_variable("x", 2.0, 1.0)

    def test_nan_bound(self):
        lp = LinearProgram()
        with pytest.raises(ValueError):
            lp.add_variable("x", np.nan, 1.0)

    def test_tolerances_positive(self):
        with pytest.raises(ValueError):
            Tolerances(feasibility=0.0)

    def test_unknown_method(self):
        lp = LinearProgram()
        lp.add_variable("x", 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            solve(lp, method="gurobi")

    def test_value_lookup_without_solution(self):
        lp = LinearProgram()
        lp.add_variable("x", 0.0, np.inf, -1.0)
        result = solve(lp, method="simplex")
        with pytest.raises(ValueError):
            result.value("x")
