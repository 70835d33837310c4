"""Bounded-variable primal simplex with a dense basis inverse.

Solves min c'x subject to row constraints and variable bounds, entirely
in numpy.  The implementation favors transparency and determinism over
speed: dense algebra, Dantzig pricing with index tie-breaks, Bland's
rule engaged after a run of degenerate steps, and an explicit basis
inverse maintained by product-form updates with periodic
refactorization.

Phase 1 starts from all columns at their nearest bound, adds one
artificial column per row carrying the initial residual and minimizes
the artificial sum; equality rows are plain rows whose slack is fixed at
zero, so no big-M terms appear anywhere.  Phase 2 reuses the final
phase-1 basis.  All iterations keep every variable inside its bounds, so
the ratio test never needs infeasibility bookkeeping.
"""

from __future__ import annotations

import math

import numpy as np

from .lp import LinearProgram, SolveStatus, Tolerances

# column states
_LOWER, _UPPER, _FREE, _BASIC = 0, 1, 2, 3

_PIVOT_EPS = 1e-10
_DEGENERATE_STEP = 1e-11
_BLAND_AFTER = 50
_REFACTOR_EVERY = 64


class _Tableau:
    """Mutable solver state over the extended column set."""

    def __init__(self, lp: LinearProgram):
        m, n = lp.n_constraints, lp.n_variables
        self.m = m
        self.n_struct = n
        a = lp.constraint_matrix().toarray() if m else np.zeros((0, n))
        lower, upper = lp.bound_arrays()
        slack_lo = np.zeros(m)
        slack_hi = np.zeros(m)
        for i, sense in enumerate(lp.senses()):
            if sense == "<=":
                slack_lo[i], slack_hi[i] = 0.0, math.inf
            elif sense == ">=":
                slack_lo[i], slack_hi[i] = -math.inf, 0.0
            else:
                slack_lo[i], slack_hi[i] = 0.0, 0.0
        # columns: structural | slack | artificial (added in phase 1)
        self.a = np.hstack([a, np.eye(m), np.zeros((m, m))]) if m else a.copy()
        self.lower = np.concatenate([lower, slack_lo, np.zeros(m)])
        self.upper = np.concatenate([upper, slack_hi, np.zeros(m)])
        self.cost = np.concatenate([lp.objective_vector(), np.zeros(2 * m)])
        self.b = lp.rhs_vector()
        self.n_total = self.a.shape[1] if m else n
        self.x = np.zeros(n + 2 * m)
        self.state = np.empty(n + 2 * m, dtype=np.int8)
        self.basis = np.empty(m, dtype=np.int64)
        self.b_inv = np.zeros((m, m))
        self.iterations = 0

    def nearest_bound_start(self) -> None:
        """Put every structural and slack column at its nearest bound."""
        for j in range(self.n_struct + self.m):
            lo, hi = self.lower[j], self.upper[j]
            if math.isfinite(lo):
                self.x[j], self.state[j] = lo, _LOWER
            elif math.isfinite(hi):
                self.x[j], self.state[j] = hi, _UPPER
            else:
                self.x[j], self.state[j] = 0.0, _FREE

    def install_artificials(self) -> None:
        """One artificial column per row, absorbing the start residual."""
        m, base = self.m, self.n_struct + self.m
        resid = self.b - self.a[:, :base] @ self.x[:base]
        for i in range(m):
            col = base + i
            sign = 1.0 if resid[i] >= 0.0 else -1.0
            self.a[i, col] = sign
            self.upper[col] = math.inf
            self.x[col] = abs(resid[i])
            self.state[col] = _BASIC
            self.basis[i] = col
            self.b_inv[i, i] = sign

    def refactorize(self) -> None:
        if self.m == 0:
            return
        basis_matrix = self.a[:, self.basis]
        self.b_inv = np.linalg.inv(basis_matrix)
        spent = self.x.copy()
        spent[self.basis] = 0.0
        self.x[self.basis] = self.b_inv @ (self.b - self.a @ spent)

    def artificial_sum(self) -> float:
        base = self.n_struct + self.m
        return float(self.x[base:].sum())


def _price(tab: _Tableau, cost: np.ndarray) -> np.ndarray:
    """Reduced costs of all columns under the given cost vector."""
    if tab.m == 0:
        return cost.copy()
    y = tab.b_inv.T @ cost[tab.basis]
    return cost - tab.a.T @ y


def _choose_entering(
    tab: _Tableau, reduced: np.ndarray, opt_tol: float, bland: bool
) -> tuple[int, int] | None:
    """Pick (column, direction) or None when optimal."""
    gap = tab.upper - tab.lower
    movable = gap > 0.0
    down = (tab.state == _UPPER) & movable & (reduced > opt_tol)
    up = (tab.state == _LOWER) & movable & (reduced < -opt_tol)
    free_up = (tab.state == _FREE) & (reduced < -opt_tol)
    free_down = (tab.state == _FREE) & (reduced > opt_tol)
    eligible = up | down | free_up | free_down
    if not eligible.any():
        return None
    candidates = np.flatnonzero(eligible)
    if bland:
        j = int(candidates[0])
    else:
        scores = np.abs(reduced[candidates])
        j = int(candidates[int(np.argmax(scores))])
    direction = 1 if (up[j] or free_up[j]) else -1
    return j, direction


def _ratio_test(
    tab: _Tableau, j: int, direction: int, bland: bool
) -> tuple[float, int | None, float]:
    """Largest step along the entering column.

    Returns (step, leaving basis position or None for a bound flip,
    pivot column value).  A step of infinity means the program is
    unbounded in this direction.
    """
    alpha = tab.b_inv @ tab.a[:, j] if tab.m else np.zeros(0)
    gap = tab.upper[j] - tab.lower[j]
    best_t = gap if math.isfinite(gap) else math.inf
    leaving: int | None = None
    best_slope = 0.0
    for i in range(tab.m):
        slope = -direction * alpha[i]
        if abs(slope) <= _PIVOT_EPS:
            continue
        col = tab.basis[i]
        limit = tab.upper[col] if slope > 0 else tab.lower[col]
        if not math.isfinite(limit):
            continue
        t_i = (limit - tab.x[col]) / slope
        if t_i < 0.0:
            t_i = 0.0
        take = False
        if t_i < best_t - 1e-12:
            take = True
        elif leaving is not None and t_i <= best_t + 1e-12:
            if bland:
                take = col < tab.basis[leaving]
            else:
                take = abs(slope) > abs(best_slope)
        elif leaving is None and t_i <= best_t + 1e-12:
            # ties against the entering column's own bound flip: prefer
            # the pivot so the basis keeps changing deterministically
            take = True
        if take:
            best_t = t_i
            leaving = i
            best_slope = slope
    if leaving is None and not math.isfinite(best_t):
        return math.inf, None, 0.0
    return best_t, leaving, (alpha[leaving] if leaving is not None else 0.0)


def _apply_step(
    tab: _Tableau, j: int, direction: int, step: float, leaving: int | None
) -> None:
    alpha = tab.b_inv @ tab.a[:, j] if tab.m else np.zeros(0)
    if step > 0.0 and tab.m:
        tab.x[tab.basis] -= direction * step * alpha
    new_value = tab.x[j] + direction * step
    if leaving is None:
        # bound flip: the entering column just moves to its other bound
        tab.x[j] = tab.upper[j] if direction > 0 else tab.lower[j]
        tab.state[j] = _UPPER if direction > 0 else _LOWER
        return
    out_col = int(tab.basis[leaving])
    slope = -direction * alpha[leaving]
    if slope > 0:
        tab.x[out_col] = tab.upper[out_col]
        tab.state[out_col] = _UPPER
    else:
        tab.x[out_col] = tab.lower[out_col]
        tab.state[out_col] = _LOWER
    tab.x[j] = new_value
    tab.state[j] = _BASIC
    tab.basis[leaving] = j
    # product-form update of the basis inverse
    pivot_row = tab.b_inv[leaving] / alpha[leaving]
    correction = np.outer(alpha, pivot_row)
    correction[leaving] = 0.0
    tab.b_inv -= correction
    tab.b_inv[leaving] = pivot_row


def _run_phase(
    tab: _Tableau,
    cost: np.ndarray,
    tol: Tolerances,
    max_iterations: int,
    allow_unbounded: bool,
) -> SolveStatus:
    """Iterate to optimality of the given cost vector."""
    degenerate_run = 0
    since_refactor = 0
    while True:
        if tab.iterations >= max_iterations:
            raise RuntimeError(
                f"simplex hit the iteration limit ({max_iterations}); "
                "the instance is numerically troublesome"
            )
        reduced = _price(tab, cost)
        bland = degenerate_run >= _BLAND_AFTER
        pick = _choose_entering(tab, reduced, tol.optimality, bland)
        if pick is None:
            return SolveStatus.OPTIMAL
        j, direction = pick
        step, leaving, _ = _ratio_test(tab, j, direction, bland)
        if math.isinf(step):
            if allow_unbounded:
                return SolveStatus.UNBOUNDED
            raise RuntimeError("phase 1 claims unboundedness; this is a bug")
        _apply_step(tab, j, direction, step, leaving)
        tab.iterations += 1
        degenerate_run = degenerate_run + 1 if step <= _DEGENERATE_STEP else 0
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            tab.refactorize()
            since_refactor = 0


def _evict_basic_artificials(tab: _Tableau, feas_tol: float) -> None:
    """Pivot leftover zero-valued artificials out of the basis.

    Rows whose artificial cannot be replaced are redundant; their
    artificial stays basic, pinned to zero by its bounds.
    """
    base = tab.n_struct + tab.m
    for i in range(tab.m):
        col = int(tab.basis[i])
        if col < base:
            continue
        row = tab.b_inv[i] @ tab.a[:, :base]
        pivot_candidates = np.flatnonzero(
            (np.abs(row) > 1e-9) & (tab.state[:base] != _BASIC)
        )
        if pivot_candidates.size == 0:
            tab.upper[col] = 0.0
            continue
        enter = int(pivot_candidates[0])
        alpha = tab.b_inv @ tab.a[:, enter]
        entering_value = tab.x[enter]
        tab.basis[i] = enter
        tab.state[enter] = _BASIC
        tab.state[col] = _LOWER
        tab.x[col] = 0.0
        pivot_row = tab.b_inv[i] / alpha[i]
        correction = np.outer(alpha, pivot_row)
        correction[i] = 0.0
        tab.b_inv -= correction
        tab.b_inv[i] = pivot_row
        tab.x[enter] = entering_value
        tab.refactorize()
    base_slice = tab.x[base:]
    if np.any(np.abs(base_slice) > feas_tol):
        raise RuntimeError("artificial cleanup left a nonzero artificial")
    tab.upper[base:] = 0.0


def solve_simplex(
    lp: LinearProgram,
    tol: Tolerances,
    max_iterations: int | None = None,
) -> tuple[SolveStatus, float | None, np.ndarray | None, int]:
    """Solve and return (status, objective, structural solution, pivots)."""
    tab = _Tableau(lp)
    cap = max_iterations or max(2000, 60 * (tab.m + tab.n_struct))
    tab.nearest_bound_start()
    if tab.m:
        tab.install_artificials()
        phase1_cost = np.zeros_like(tab.cost)
        phase1_cost[tab.n_struct + tab.m :] = 1.0
        status = _run_phase(tab, phase1_cost, tol, cap, allow_unbounded=False)
        assert status is SolveStatus.OPTIMAL
        scale = 1.0 + float(np.abs(tab.b).max()) if tab.b.size else 1.0
        if tab.artificial_sum() > tol.feasibility * scale:
            return SolveStatus.INFEASIBLE, None, None, tab.iterations
        _evict_basic_artificials(tab, tol.feasibility * scale)
        tab.refactorize()
    status = _run_phase(tab, tab.cost, tol, cap, allow_unbounded=True)
    if status is SolveStatus.UNBOUNDED:
        return SolveStatus.UNBOUNDED, None, None, tab.iterations
    x = tab.x[: tab.n_struct].copy()
    objective = float(lp.objective_vector() @ x)
    return SolveStatus.OPTIMAL, objective, x, tab.iterations
