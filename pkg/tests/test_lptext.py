import numpy as np
import pytest

from tempagg import (
    LinearProgram,
    SolveStatus,
    export_lp_text,
    parse_lp_text,
    read_lp_file,
    solve,
    write_lp_file,
)
from reference_lp import random_bounded_lp
from test_lp import build_lp, merit_order_lp


def assert_programs_match(a: LinearProgram, b: LinearProgram):
    assert a.variable_names == b.variable_names
    assert np.array_equal(a.objective_vector(), b.objective_vector())
    la, ua = a.bound_arrays()
    lb, ub = b.bound_arrays()
    assert np.array_equal(la, lb)
    assert np.array_equal(ua, ub)
    assert a.senses() == b.senses()
    assert np.array_equal(a.rhs_vector(), b.rhs_vector())
    for r in range(a.n_constraints):
        assert a.constraint_row(r) == b.constraint_row(r)


class TestRoundTrip:
    def test_merit_order_round_trip_exact(self):
        lp = merit_order_lp()
        again = parse_lp_text(export_lp_text(lp))
        assert_programs_match(lp, again)

    def test_random_lps_round_trip_and_reoptimize(self):
        rng = np.random.default_rng(404)
        optimal = 0
        for _ in range(60):
            lp = build_lp(*random_bounded_lp(rng))
            again = parse_lp_text(export_lp_text(lp))
            assert_programs_match(lp, again)
            first = solve(lp, method="simplex")
            second = solve(again, method="simplex")
            assert first.status is second.status
            if first.status is SolveStatus.OPTIMAL:
                scale = max(1.0, abs(first.objective))
                assert abs(first.objective - second.objective) <= 1e-9 * scale
                optimal += 1
        assert optimal >= 15

    def test_awkward_floats_survive(self):
        lp = LinearProgram("floats")
        lp.add_variable("x", 0.1, 1e30, objective=-2.5e17)
        lp.add_variable("y", -1e-30, 0.3, objective=1.0 / 3.0)
        lp.add_constraint("c", {"x": 0.1 + 0.2, "y": -7.000000000000001}, "<=", 1e-12)
        again = parse_lp_text(export_lp_text(lp))
        assert_programs_match(lp, again)

    def test_file_round_trip(self, tmp_path):
        lp = merit_order_lp()
        path = write_lp_file(lp, tmp_path / "model.lp")
        assert path.exists()
        assert_programs_match(lp, read_lp_file(path))

    def test_file_extension_enforced(self, tmp_path):
        with pytest.raises(ValueError):
            write_lp_file(merit_order_lp(), tmp_path / "model.txt")


class TestBoundForms:
    def parse_bounds_section(self, lp: LinearProgram) -> list[str]:
        text = export_lp_text(lp)
        lines = text.splitlines()
        start = lines.index("Bounds") + 1
        end = lines.index("End")
        return [line.strip() for line in lines[start:end] if line.strip()]

    def test_all_bound_shapes(self):
        lp = LinearProgram("bounds")
        lp.add_variable("dflt", 0.0, np.inf)
        lp.add_variable("fr", -np.inf, np.inf)
        lp.add_variable("fixed", 2.5, 2.5)
        lp.add_variable("upper_only", -np.inf, 4.0)
        lp.add_variable("lower_only", 1.5, np.inf)
        lp.add_variable("boxed", -1.0, 1.0)
        section = self.parse_bounds_section(lp)
        assert "fr free" in section
        assert "fixed = 2.5" in section
        assert "-infinity <= upper_only <= 4.0" in section
        assert "lower_only >= 1.5" in section
        assert "-1.0 <= boxed <= 1.0" in section
        assert "dflt >= 0.0" in section
        again = parse_lp_text(export_lp_text(lp))
        assert_programs_match(lp, again)


class TestParserErrors:
    def test_rejects_maximize(self):
        with pytest.raises(ValueError, match="[Mm]inimi"):
            parse_lp_text("Maximize\n obj: x\nSubject To\nBounds\nEnd\n")

    def test_rejects_reserved_variable_name(self):
        lp = LinearProgram("reserved")
        lp.add_variable("free", 0.0, 1.0, 1.0)
        with pytest.raises(ValueError, match="reserved"):
            export_lp_text(lp)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_lp_text("this is not an lp file")

    def test_rejects_missing_end(self):
        lp = merit_order_lp()
        text = export_lp_text(lp).replace("End", "")
        with pytest.raises(ValueError):
            parse_lp_text(text)

    def test_comments_are_ignored(self):
        lp = merit_order_lp()
        text = export_lp_text(lp)
        commented = "\\ a leading comment line\n" + text
        assert_programs_match(lp, parse_lp_text(commented))
