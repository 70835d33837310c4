"""Linear program container and solver front end.

Programs are always minimization over bounded variables with sparse
constraint rows.  Two interchangeable backends sit behind :func:`solve`:

* ``simplex``: the built-in bounded-variable primal simplex
  (:mod:`tempagg._simplex`), deterministic down to the pivot sequence and
  therefore the reference for all oracle tests.
* ``highs``: the dual simplex shipped with scipy, used for the large
  structured instances the benchmark produces, where a dense-basis
  implementation would be far too slow.  ``highs-ipm`` selects the same
  library's interior point method, which handles the heavily degenerate
  shared-operation storage models far better than any simplex.

``method="auto"`` picks the built-in solver for desk-scale instances and
HiGHS dual simplex beyond.  The backends are checked against each other
in the test suite, and every Optimal result is verified against the
constraint set before it is returned.
"""

from __future__ import annotations

import logging
import math
import re
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "LinearProgram",
    "SolveStatus",
    "SolveResult",
    "Tolerances",
    "solve",
]

logger = logging.getLogger(__name__)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")

# auto backend switch: above this size the built-in dense-basis simplex
# stops being a sensible choice
_AUTO_MAX_ROWS = 400
_AUTO_MAX_COLS = 1200

_SENSES = ("<=", "=", ">=")


def _check_name(name: str, kind: str) -> str:
    if not _NAME_RE.match(name):
        raise ValueError(
            f"invalid {kind} name {name!r}: use letters, digits, '_' and '.', "
            "not starting with a digit or dot"
        )
    return name


class SolveStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass(frozen=True)
class Tolerances:
    """Feasibility and reduced-cost tolerances used by the backends."""

    feasibility: float = 1e-7
    optimality: float = 1e-7

    def __post_init__(self) -> None:
        if not (self.feasibility > 0 and self.optimality > 0):
            raise ValueError("tolerances must be positive")


class LinearProgram:
    """A named minimization LP with bounded variables.

    Variables and constraints are appended once and never mutated;
    names must be unique and follow the identifier pattern enforced by
    the LP text exporter.
    """

    def __init__(self, name: str = "lp"):
        self.name = _check_name(name, "problem")
        self._var_names: list[str] = []
        self._var_index: dict[str, int] = {}
        self._lower: list[float] = []
        self._upper: list[float] = []
        self._objective: list[float] = []
        self._con_names: list[str] = []
        self._con_index: dict[str, int] = {}
        self._rows: list[dict[int, float]] = []
        self._senses: list[str] = []
        self._rhs: list[float] = []
        self._matrix_cache: sp.csr_matrix | None = None

    # -- construction ---------------------------------------------------

    def add_variable(
        self,
        name: str,
        lower: float = 0.0,
        upper: float = math.inf,
        objective: float = 0.0,
    ) -> int:
        """Register a variable, returning its column index."""
        _check_name(name, "variable")
        if name in self._var_index:
            raise ValueError(f"duplicate variable name {name!r}")
        if math.isnan(lower) or math.isnan(upper):
            raise ValueError(f"bounds of {name!r} must not be NaN")
        if lower > upper:
            raise ValueError(f"variable {name!r} has lower bound above upper bound")
        if not math.isfinite(objective):
            raise ValueError(f"objective coefficient of {name!r} must be finite")
        idx = len(self._var_names)
        self._var_names.append(name)
        self._var_index[name] = idx
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        self._objective.append(float(objective))
        self._matrix_cache = None
        return idx

    def add_constraint(
        self,
        name: str,
        coefficients: Mapping[str | int, float] | Iterable[tuple[str | int, float]],
        sense: str,
        rhs: float,
    ) -> int:
        """Register a constraint row; coefficients key by name or index."""
        _check_name(name, "constraint")
        if name in self._con_index:
            raise ValueError(f"duplicate constraint name {name!r}")
        if sense not in _SENSES:
            raise ValueError(f"sense must be one of {_SENSES}, got {sense!r}")
        if not math.isfinite(rhs):
            raise ValueError(f"right-hand side of {name!r} must be finite")
        items = (
            coefficients.items()
            if isinstance(coefficients, Mapping)
            else list(coefficients)
        )
        row: dict[int, float] = {}
        for key, coef in items:
            idx = key if isinstance(key, int) else self._var_index.get(key)
            if idx is None or not 0 <= idx < len(self._var_names):
                raise KeyError(f"constraint {name!r} references unknown variable {key!r}")
            if not math.isfinite(coef):
                raise ValueError(
                    f"constraint {name!r} has non-finite coefficient for "
                    f"{self._var_names[idx]!r}"
                )
            if idx in row:
                raise ValueError(
                    f"constraint {name!r} names variable {self._var_names[idx]!r} twice"
                )
            if coef != 0.0:
                row[idx] = float(coef)
        cdx = len(self._con_names)
        self._con_names.append(name)
        self._con_index[name] = cdx
        self._rows.append(row)
        self._senses.append(sense)
        self._rhs.append(float(rhs))
        self._matrix_cache = None
        return cdx

    # -- inspection -----------------------------------------------------

    @property
    def n_variables(self) -> int:
        return len(self._var_names)

    @property
    def n_constraints(self) -> int:
        return len(self._con_names)

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(self._var_names)

    @property
    def constraint_names(self) -> tuple[str, ...]:
        return tuple(self._con_names)

    def variable_index(self, name: str) -> int:
        return self._var_index[name]

    def variable_bounds(self, name: str) -> tuple[float, float]:
        i = self._var_index[name]
        return self._lower[i], self._upper[i]

    def objective_vector(self) -> np.ndarray:
        return np.array(self._objective, dtype=np.float64)

    def bound_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.array(self._lower, dtype=np.float64),
            np.array(self._upper, dtype=np.float64),
        )

    def constraint_row(self, index: int) -> dict[int, float]:
        return dict(self._rows[index])

    def constraint_sense(self, index: int) -> str:
        return self._senses[index]

    def constraint_rhs(self, index: int) -> float:
        return self._rhs[index]

    def constraint_matrix(self) -> sp.csr_matrix:
        """All rows as one sparse matrix (m, n), cached until mutated."""
        if self._matrix_cache is not None:
            return self._matrix_cache
        m, n = self.n_constraints, self.n_variables
        data: list[float] = []
        indices: list[int] = []
        indptr = [0]
        for row in self._rows:
            for idx in sorted(row):
                indices.append(idx)
                data.append(row[idx])
            indptr.append(len(indices))
        self._matrix_cache = sp.csr_matrix(
            (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr)),
            shape=(m, n),
        )
        return self._matrix_cache

    def rhs_vector(self) -> np.ndarray:
        return np.array(self._rhs, dtype=np.float64)

    def senses(self) -> tuple[str, ...]:
        return tuple(self._senses)


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one solve.

    ``objective`` and ``values`` are None unless the status is Optimal.
    ``iterations`` counts simplex pivots (including the HiGHS backend's
    own count) and ``wall_time`` the seconds spent inside the backend.
    """

    status: SolveStatus
    objective: float | None
    values: np.ndarray | None
    iterations: int
    wall_time: float
    method: str
    variable_names: tuple[str, ...] = field(repr=False, default=())

    def value(self, name: str) -> float:
        if self.values is None:
            raise ValueError(f"no solution values in a {self.status.value} result")
        return float(self.values[self.variable_names.index(name)])


def _validate_optimal(
    lp: LinearProgram, x: np.ndarray, feasibility: float
) -> None:
    lower, upper = lp.bound_arrays()
    if np.any(x < lower - feasibility) or np.any(x > upper + feasibility):
        worst = float(np.maximum(lower - x, x - upper).max())
        raise RuntimeError(
            f"solver returned out-of-bounds solution (violation {worst:.3e})"
        )
    if lp.n_constraints == 0:
        return
    ax = lp.constraint_matrix() @ x
    rhs = lp.rhs_vector()
    rel = (ax - rhs) / (1.0 + np.abs(rhs))
    senses = np.array(lp.senses())
    violation = np.where(
        senses == "<=", rel, np.where(senses == ">=", -rel, np.abs(rel))
    )
    if np.any(violation > feasibility):
        i = int(np.argmax(violation))
        raise RuntimeError(
            f"solver returned infeasible row {lp.constraint_names[i]!r} "
            f"(relative violation {rel[i]:.3e})"
        )


def _solve_highs(lp: LinearProgram, tol: Tolerances, algorithm: str = "ds") -> SolveResult:
    from scipy.optimize import linprog

    a = lp.constraint_matrix().tocsr()
    senses = np.array([{"<=": 0, "=": 1, ">=": 2}[s] for s in lp.senses()])
    rhs = lp.rhs_vector()
    ub_mask = senses == 0
    ge_mask = senses == 2
    eq_mask = senses == 1
    blocks_ub = []
    rhs_ub = []
    if ub_mask.any():
        blocks_ub.append(a[ub_mask])
        rhs_ub.append(rhs[ub_mask])
    if ge_mask.any():
        blocks_ub.append(-a[ge_mask])
        rhs_ub.append(-rhs[ge_mask])
    a_ub = sp.vstack(blocks_ub).tocsr() if blocks_ub else None
    b_ub = np.concatenate(rhs_ub) if rhs_ub else None
    a_eq = a[eq_mask] if eq_mask.any() else None
    b_eq = rhs[eq_mask] if eq_mask.any() else None
    lower, upper = lp.bound_arrays()
    options = {
        "presolve": True,
        "primal_feasibility_tolerance": tol.feasibility,
        "dual_feasibility_tolerance": tol.optimality,
    }
    if algorithm == "ipm":
        scipy_method = "highs-ipm"
        label = "highs-ipm"
    else:
        scipy_method = "highs-ds"
        label = "highs"
        # devex pricing beats the default steepest-edge by ~17% on the
        # large storage-linked models without changing the optimum
        options["simplex_dual_edge_weight_strategy"] = "devex"
    start = time.perf_counter()
    res = linprog(
        lp.objective_vector(),
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=np.column_stack([lower, upper]),
        method=scipy_method,
        options=options,
    )
    elapsed = time.perf_counter() - start
    iterations = int(getattr(res, "nit", 0) or 0)
    if res.status == 0:
        x = np.asarray(res.x, dtype=np.float64)
        _validate_optimal(lp, x, max(tol.feasibility * 10, 1e-6))
        return SolveResult(
            SolveStatus.OPTIMAL,
            float(res.fun),
            x,
            iterations,
            elapsed,
            label,
            lp.variable_names,
        )
    if res.status == 2:
        return SolveResult(
            SolveStatus.INFEASIBLE, None, None, iterations, elapsed, label,
            lp.variable_names,
        )
    if res.status == 3:
        return SolveResult(
            SolveStatus.UNBOUNDED, None, None, iterations, elapsed, label,
            lp.variable_names,
        )
    raise RuntimeError(f"HiGHS failed on {lp.name!r}: {res.message}")


def solve(
    lp: LinearProgram,
    tolerances: Tolerances | None = None,
    method: str = "auto",
    max_iterations: int | None = None,
) -> SolveResult:
    """Minimize the program and return status, objective and solution.

    Infeasibility and unboundedness are reported through the result
    status, not exceptions.  ``method`` selects the backend: "simplex"
    (built-in), "highs" (scipy dual simplex), "highs-ipm" (scipy interior
    point), or "auto" which routes desk-scale programs to the built-in
    solver and larger ones to HiGHS dual simplex.  Solving the same
    program twice yields the identical result, including the iteration
    count.
    """
    tol = tolerances or Tolerances()
    if method == "auto":
        small = (
            lp.n_constraints <= _AUTO_MAX_ROWS and lp.n_variables <= _AUTO_MAX_COLS
        )
        method = "simplex" if small else "highs"
    if method == "highs":
        result = _solve_highs(lp, tol)
    elif method == "highs-ipm":
        result = _solve_highs(lp, tol, algorithm="ipm")
    elif method == "simplex":
        from ._simplex import solve_simplex

        start = time.perf_counter()
        status, objective, x, iterations = solve_simplex(
            lp, tol, max_iterations=max_iterations
        )
        elapsed = time.perf_counter() - start
        if status is SolveStatus.OPTIMAL:
            assert x is not None
            _validate_optimal(lp, x, max(tol.feasibility * 10, 1e-6))
        result = SolveResult(
            status, objective, x, iterations, elapsed, "simplex", lp.variable_names
        )
    else:
        raise ValueError(
            f"unknown method {method!r}; use auto, simplex, highs or highs-ipm"
        )
    logger.debug(
        "solved %s (%d vars, %d rows): %s in %d iterations, %.3fs via %s",
        lp.name, lp.n_variables, lp.n_constraints, result.status.value,
        result.iterations, result.wall_time, result.method,
    )
    return result
