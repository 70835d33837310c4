"""Compile an energy system spec on an aggregated time grid into an LP.

Variable and constraint names encode component, representative index and
offset (``gen.pv_south.c12.t5``, ``bal.electricity.north.c3.t0``), which
lets solutions be mapped back to components and original time steps.

Cost handling: every objective coefficient is recorded with its
component and category (capacity depreciation, fixed operating cost,
variable operating cost), so a cost breakdown recomputed from a solution
sums to the LP objective exactly up to floating point.

Operational costs are weighted with the number of original elements a
representative stands for; capacity costs are annualized and carry no
weight.  Operation variables are energies per original step.

Storage is compiled in one of two shapes:

* FULL and TYPICAL_STEPS grids: one charge/discharge pair per
  representative step, shared by all original steps assigned to it, with
  one state-of-charge variable per original step linked chronologically
  over the whole horizon.
* TYPICAL_PERIODS grids: a relative state profile per typical period
  (starting at zero) plus one carry-over state per original period,
  chained chronologically with compounded self-discharge.  The physical
  state at period d, offset t is carry[d] * keep^t + profile[cluster(d), t],
  and both capacity bounds are enforced on that sum at every original
  offset.

With singleton clusters both shapes reduce algebraically to the plain
chronological storage model, which is what the endpoint-exactness checks
in the test suite verify end to end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..lp import LinearProgram, SolveResult, SolveStatus
from .components import (
    CapacityExpandable,
    CapacityFixed,
    Conversion,
    EnergySystemSpec,
    Sink,
    Source,
    Storage,
    Transmission,
)
from .grid import AggregatedTimeGrid, GridMode

__all__ = [
    "CompiledModel",
    "CostBreakdown",
    "compile_model",
    "extract_cost_breakdown",
    "extract_capacities",
    "extract_operations",
]

logger = logging.getLogger(__name__)

_CAPEX, _FIXED_OPEX, _VARIABLE = 0, 1, 2


@dataclass
class _Balances:
    """Accumulator for nodal balance rows, keyed by commodity and region."""

    k: int
    length: int

    def __post_init__(self) -> None:
        self.terms: dict[tuple[str, str], list[list[tuple[int, float]]]] = {}
        self.rhs: dict[tuple[str, str], np.ndarray] = {}

    def _slot(self, commodity: str, region: str):
        key = (commodity, region)
        if key not in self.terms:
            self.terms[key] = [[] for _ in range(self.k * self.length)]
            self.rhs[key] = np.zeros(self.k * self.length)
        return self.terms[key], self.rhs[key]

    def add_term(
        self, commodity: str, region: str, c: int, t: int, var: int, coef: float
    ) -> None:
        terms, _ = self._slot(commodity, region)
        terms[c * self.length + t].append((var, coef))

    def add_rhs(
        self, commodity: str, region: str, c: int, t: int, value: float
    ) -> None:
        _, rhs = self._slot(commodity, region)
        rhs[c * self.length + t] += value


@dataclass
class CompiledModel:
    """An LP plus the index structures needed to interpret its solution."""

    lp: LinearProgram
    spec: EnergySystemSpec
    grid: AggregatedTimeGrid
    capacity_vars: dict[str, dict[str, int]]
    operation_vars: dict[str, dict[str, np.ndarray]]
    cost_var_index: np.ndarray
    cost_coefficient: np.ndarray
    cost_component: np.ndarray
    cost_category: np.ndarray
    cost_component_names: tuple[str, ...]
    solver_hint: str = "auto"


@dataclass(frozen=True)
class CostBreakdown:
    """Total annual cost split by component and cost category."""

    component_names: tuple[str, ...]
    capex_annualized: np.ndarray
    fixed_opex: np.ndarray
    variable_opex: np.ndarray

    @property
    def total(self) -> float:
        return float(
            self.capex_annualized.sum() + self.fixed_opex.sum() + self.variable_opex.sum()
        )

    def component(self, name: str) -> dict[str, float]:
        i = self.component_names.index(name)
        return {
            "capex_annualized": float(self.capex_annualized[i]),
            "fixed_opex": float(self.fixed_opex[i]),
            "variable_opex": float(self.variable_opex[i]),
        }


class _Builder:
    """Single-use state for one compile pass."""

    def __init__(self, spec: EnergySystemSpec, grid: AggregatedTimeGrid):
        self.spec = spec
        self.grid = grid
        self.lp = LinearProgram(f"{spec.name}.{grid.mode.value}")
        self.k = grid.k
        self.length = grid.period_length
        self.h = grid.step_hours
        self.weights = grid.weights.astype(np.float64)
        self.balances = _Balances(self.k, self.length)
        self.capacity_vars: dict[str, dict[str, int]] = {}
        self.operation_vars: dict[str, dict[str, np.ndarray]] = {}
        self.cost_idx: list[int] = []
        self.cost_coef: list[float] = []
        self.cost_comp: list[int] = []
        self.cost_cat: list[int] = []
        self.component_order: list[str] = []
        if isinstance(spec.emission_price, str):
            self.emission_price = grid.profile(spec.emission_price)
        else:
            self.emission_price = None

    # -- bookkeeping ----------------------------------------------------

    def component_id(self, name: str) -> int:
        if name not in self.component_order:
            self.component_order.append(name)
        return self.component_order.index(name)

    def record_cost(self, var: int, coef: float, comp: str, category: int) -> None:
        if coef == 0.0:
            return
        self.cost_idx.append(var)
        self.cost_coef.append(coef)
        self.cost_comp.append(self.component_id(comp))
        self.cost_cat.append(category)

    def capacity_variable(self, comp_name: str, role: str, cap) -> int | None:
        """Create the capacity variable for an expandable capacity.

        Returns None for fixed capacities.  The annualized investment and
        the yearly fixed cost enter the objective on the capacity
        variable and are recorded separately for the breakdown.
        """
        if isinstance(cap, CapacityFixed):
            return None
        assert isinstance(cap, CapacityExpandable)
        capital = cap.capital_unit_cost(self.spec.annuity_rate)
        fixed = cap.fixed_opex_fraction * cap.capex
        upper = cap.max_capacity if cap.max_capacity is not None else np.inf
        var = self.lp.add_variable(
            f"cap.{role}.{comp_name}", 0.0, upper, capital + fixed
        )
        self.capacity_vars.setdefault(comp_name, {})[role] = var
        self.record_cost(var, capital, comp_name, _CAPEX)
        self.record_cost(var, fixed, comp_name, _FIXED_OPEX)
        return var

    def operation_variable(
        self,
        name: str,
        upper: float,
        comp_name: str,
        c: int,
        unit_cost: float,
    ) -> int:
        """Non-negative operation variable with its weighted variable cost.

        The representative stands for ``weights[c]`` original elements, so
        its unit cost enters the objective that many times.
        """
        coef = unit_cost * self.weights[c]
        var = self.lp.add_variable(name, 0.0, upper, coef)
        self.record_cost(var, coef, comp_name, _VARIABLE)
        return var

    # -- per component --------------------------------------------------

    def add_source(self, comp: Source) -> None:
        profile = (
            self.grid.profile(comp.capacity_factor_attr)
            if comp.capacity_factor_attr
            else None
        )
        if comp.fixed_profile:
            # exogenous signed injection: no variables, straight to the rhs
            assert profile is not None and isinstance(comp.capacity, CapacityFixed)
            scale = comp.capacity.value * self.h
            for c in range(self.k):
                for t in range(self.length):
                    self.balances.add_rhs(
                        comp.commodity, comp.region, c, t, -profile[c, t] * scale
                    )
            self.component_id(comp.name)
            return
        price = (
            self.grid.profile(comp.variable_cost_attr)
            if comp.variable_cost_attr
            else None
        )
        cap_var = self.capacity_variable(comp.name, "power", comp.capacity)
        fixed_cap = (
            comp.capacity.value if isinstance(comp.capacity, CapacityFixed) else None
        )
        gen = np.empty((self.k, self.length), dtype=np.int64)
        for c in range(self.k):
            for t in range(self.length):
                cf = float(profile[c, t]) if profile is not None else 1.0
                if fixed_cap is not None:
                    upper = max(cf, 0.0) * fixed_cap * self.h
                else:
                    upper = np.inf
                unit = comp.variable_cost + (float(price[c, t]) if price is not None else 0.0)
                var = self.operation_variable(
                    f"gen.{comp.name}.c{c}.t{t}", upper, comp.name, c, unit
                )
                gen[c, t] = var
                self.balances.add_term(comp.commodity, comp.region, c, t, var, 1.0)
                if cap_var is not None:
                    self.lp.add_constraint(
                        f"avail.{comp.name}.c{c}.t{t}",
                        [(var, 1.0), (cap_var, -max(cf, 0.0) * self.h)],
                        "<=",
                        0.0,
                    )
        self.operation_vars[comp.name] = {"gen": gen}

    def add_sink(self, comp: Sink) -> None:
        demand = self.grid.profile(comp.demand_attr)
        if not np.any(demand):
            raise ValueError(
                f"sink {comp.name!r} binds attribute {comp.demand_attr!r} "
                "whose representative values are all zero; check the profile binding"
            )
        for c in range(self.k):
            for t in range(self.length):
                self.balances.add_rhs(
                    comp.commodity, comp.region, c, t, float(demand[c, t]) * self.h
                )
        self.component_id(comp.name)

    def add_conversion(self, comp: Conversion) -> None:
        cap_var = self.capacity_variable(comp.name, "power", comp.capacity)
        fixed_cap = (
            comp.capacity.value if isinstance(comp.capacity, CapacityFixed) else None
        )
        balanced_input = comp.input_commodity in self.spec.commodities
        gen = np.empty((self.k, self.length), dtype=np.int64)
        for c in range(self.k):
            for t in range(self.length):
                upper = fixed_cap * self.h if fixed_cap is not None else np.inf
                unit = comp.variable_cost
                if comp.emission_factor:
                    if self.emission_price is not None:
                        price = float(self.emission_price[c, t])
                    else:
                        price = float(self.spec.emission_price)
                    unit += comp.emission_factor * price / comp.efficiency
                var = self.operation_variable(
                    f"gen.{comp.name}.c{c}.t{t}", upper, comp.name, c, unit
                )
                gen[c, t] = var
                self.balances.add_term(
                    comp.output_commodity, comp.region, c, t, var, 1.0
                )
                if balanced_input:
                    self.balances.add_term(
                        comp.input_commodity, comp.region, c, t, var,
                        -1.0 / comp.efficiency,
                    )
                if cap_var is not None:
                    self.lp.add_constraint(
                        f"avail.{comp.name}.c{c}.t{t}",
                        [(var, 1.0), (cap_var, -self.h)],
                        "<=",
                        0.0,
                    )
        self.operation_vars[comp.name] = {"gen": gen}

    def _storage_rate_vars(
        self, comp: Storage, cap_var: int | None, fixed_power: float | None
    ) -> tuple[np.ndarray, np.ndarray]:
        """Charge/discharge energy variables with power limits applied."""
        chg = np.empty((self.k, self.length), dtype=np.int64)
        dis = np.empty((self.k, self.length), dtype=np.int64)
        limit = fixed_power * self.h if fixed_power is not None else np.inf
        for c in range(self.k):
            for t in range(self.length):
                vc = self.lp.add_variable(f"chg.{comp.name}.c{c}.t{t}", 0.0, limit)
                vd = self.lp.add_variable(f"dis.{comp.name}.c{c}.t{t}", 0.0, limit)
                chg[c, t], dis[c, t] = vc, vd
                self.balances.add_term(comp.commodity, comp.region, c, t, vc, -1.0)
                self.balances.add_term(comp.commodity, comp.region, c, t, vd, 1.0)
                if cap_var is not None:
                    self.lp.add_constraint(
                        f"chgcap.{comp.name}.c{c}.t{t}",
                        [(vc, 1.0), (cap_var, -self.h)],
                        "<=",
                        0.0,
                    )
                    self.lp.add_constraint(
                        f"discap.{comp.name}.c{c}.t{t}",
                        [(vd, 1.0), (cap_var, -self.h)],
                        "<=",
                        0.0,
                    )
        return chg, dis

    def add_storage(self, comp: Storage) -> None:
        energy_var = self.capacity_variable(comp.name, "energy", comp.energy_capacity)
        fixed_energy = (
            comp.energy_capacity.value
            if isinstance(comp.energy_capacity, CapacityFixed)
            else None
        )
        power_var = None
        fixed_power = None
        if comp.power_capacity is not None:
            power_var = self.capacity_variable(comp.name, "power", comp.power_capacity)
            if isinstance(comp.power_capacity, CapacityFixed):
                fixed_power = comp.power_capacity.value
        chg, dis = self._storage_rate_vars(comp, power_var, fixed_power)
        keep = 1.0 - comp.self_discharge_per_step
        eta_c = comp.charge_efficiency
        eta_d = comp.discharge_efficiency
        if self.grid.mode is GridMode.TYPICAL_PERIODS:
            self._storage_period_coupling(
                comp, chg, dis, keep, eta_c, eta_d, energy_var, fixed_energy
            )
        else:
            self._storage_step_coupling(
                comp, chg, dis, keep, eta_c, eta_d, energy_var, fixed_energy
            )

    def _storage_step_coupling(
        self, comp, chg, dis, keep, eta_c, eta_d, energy_var, fixed_energy
    ) -> None:
        """Chronological state over all original steps, shared rates."""
        n = self.grid.n_original_steps
        assignment = self.grid.assignment
        soc_upper = fixed_energy if fixed_energy is not None else np.inf
        n_states = n if comp.cyclic else n + 1
        soc = np.empty(n_states, dtype=np.int64)
        for s in range(n_states):
            soc[s] = self.lp.add_variable(f"soc.{comp.name}.s{s}", 0.0, soc_upper)
        if not comp.cyclic:
            # start empty; the trailing state variable covers the horizon end
            self.lp.add_constraint(
                f"socstart.{comp.name}", [(int(soc[0]), 1.0)], "=", 0.0
            )
        for s in range(n):
            nxt = (s + 1) % n if comp.cyclic else s + 1
            c = int(assignment[s])
            if nxt == s:  # cyclic single-step horizon
                state_terms = [(int(soc[s]), 1.0 - keep)]
            else:
                state_terms = [(int(soc[nxt]), 1.0), (int(soc[s]), -keep)]
            self.lp.add_constraint(
                f"socrec.{comp.name}.s{s}",
                state_terms
                + [(int(chg[c, 0]), -eta_c), (int(dis[c, 0]), 1.0 / eta_d)],
                "=",
                0.0,
            )
        if energy_var is not None:
            for s in range(n_states):
                self.lp.add_constraint(
                    f"soccap.{comp.name}.s{s}",
                    [(int(soc[s]), 1.0), (energy_var, -1.0)],
                    "<=",
                    0.0,
                )
        self.operation_vars[comp.name] = {"charge": chg, "discharge": dis, "soc": soc}

    def _storage_period_coupling(
        self, comp, chg, dis, keep, eta_c, eta_d, energy_var, fixed_energy
    ) -> None:
        """Relative profile per typical period plus chained carry-over."""
        L = self.length
        n_periods = self.grid.assignment.size
        assignment = self.grid.assignment
        # relative state inside each typical period, offsets 0..L (free sign)
        intra = np.empty((self.k, L + 1), dtype=np.int64)
        for c in range(self.k):
            for t in range(L + 1):
                hi = 0.0 if t == 0 else np.inf
                lo = 0.0 if t == 0 else -np.inf
                intra[c, t] = self.lp.add_variable(
                    f"soci.{comp.name}.c{c}.t{t}", lo, hi
                )
            for t in range(L):
                self.lp.add_constraint(
                    f"socirec.{comp.name}.c{c}.t{t}",
                    [
                        (int(intra[c, t + 1]), 1.0),
                        (int(intra[c, t]), -keep),
                        (int(chg[c, t]), -eta_c),
                        (int(dis[c, t]), 1.0 / eta_d),
                    ],
                    "=",
                    0.0,
                )
        carry = np.empty(n_periods, dtype=np.int64)
        for d in range(n_periods):
            carry[d] = self.lp.add_variable(
                f"socx.{comp.name}.d{d}", -np.inf, np.inf
            )
        keep_period = keep**L
        for d in range(n_periods):
            nxt = (d + 1) % n_periods
            if not comp.cyclic and nxt == 0:
                break
            if nxt == d:  # cyclic single-period horizon
                state_terms = [(int(carry[d]), 1.0 - keep_period)]
            else:
                state_terms = [(int(carry[nxt]), 1.0), (int(carry[d]), -keep_period)]
            self.lp.add_constraint(
                f"socxrec.{comp.name}.d{d}",
                state_terms + [(int(intra[int(assignment[d]), L]), -1.0)],
                "=",
                0.0,
            )
        if not comp.cyclic:
            self.lp.add_constraint(
                f"socxstart.{comp.name}", [(int(carry[0]), 1.0)], "=", 0.0
            )
        # physical state bounds at every original offset
        decay = keep ** np.arange(L)
        for d in range(n_periods):
            c = int(assignment[d])
            for t in range(L):
                pair = [(int(carry[d]), float(decay[t])), (int(intra[c, t]), 1.0)]
                self.lp.add_constraint(
                    f"soclo.{comp.name}.d{d}.t{t}", pair, ">=", 0.0
                )
                if energy_var is not None:
                    self.lp.add_constraint(
                        f"sochi.{comp.name}.d{d}.t{t}",
                        pair + [(energy_var, -1.0)],
                        "<=",
                        0.0,
                    )
                else:
                    self.lp.add_constraint(
                        f"sochi.{comp.name}.d{d}.t{t}", pair, "<=", float(fixed_energy)
                    )
        self.operation_vars[comp.name] = {
            "charge": chg,
            "discharge": dis,
            "soc_intra": intra,
            "soc_carry": carry,
        }

    def add_transmission(self, comp: Transmission) -> None:
        cap_var = self.capacity_variable(comp.name, "power", comp.capacity)
        fixed_cap = (
            comp.capacity.value if isinstance(comp.capacity, CapacityFixed) else None
        )
        limit = fixed_cap * self.h if fixed_cap is not None else np.inf
        through = 1.0 - comp.loss_fraction
        fwd = np.empty((self.k, self.length), dtype=np.int64)
        bwd = np.empty((self.k, self.length), dtype=np.int64)
        for c in range(self.k):
            for t in range(self.length):
                vf = self.operation_variable(
                    f"flow.{comp.name}.fwd.c{c}.t{t}", limit,
                    comp.name, c, comp.variable_cost,
                )
                vb = self.operation_variable(
                    f"flow.{comp.name}.bwd.c{c}.t{t}", limit,
                    comp.name, c, comp.variable_cost,
                )
                fwd[c, t], bwd[c, t] = vf, vb
                self.balances.add_term(comp.commodity, comp.region_from, c, t, vf, -1.0)
                self.balances.add_term(comp.commodity, comp.region_to, c, t, vf, through)
                self.balances.add_term(comp.commodity, comp.region_to, c, t, vb, -1.0)
                self.balances.add_term(comp.commodity, comp.region_from, c, t, vb, through)
                if cap_var is not None:
                    for tag, var in (("fwd", vf), ("bwd", vb)):
                        self.lp.add_constraint(
                            f"linkcap.{comp.name}.{tag}.c{c}.t{t}",
                            [(var, 1.0), (cap_var, -self.h)],
                            "<=",
                            0.0,
                        )
        self.operation_vars[comp.name] = {"flow_fwd": fwd, "flow_bwd": bwd}

    # -- assembly ---------------------------------------------------------

    def emit_balances(self) -> None:
        for (commodity, region), slots in self.balances.terms.items():
            rhs = self.balances.rhs[(commodity, region)]
            for c in range(self.k):
                for t in range(self.length):
                    flat = c * self.length + t
                    self.lp.add_constraint(
                        f"bal.{commodity}.{region}.c{c}.t{t}",
                        slots[flat],
                        "=",
                        float(rhs[flat]),
                    )

    def finish(self) -> CompiledModel:
        self.emit_balances()
        return CompiledModel(
            lp=self.lp,
            spec=self.spec,
            grid=self.grid,
            capacity_vars=self.capacity_vars,
            operation_vars=self.operation_vars,
            cost_var_index=np.array(self.cost_idx, dtype=np.int64),
            cost_coefficient=np.array(self.cost_coef),
            cost_component=np.array(self.cost_comp, dtype=np.int64),
            cost_category=np.array(self.cost_cat, dtype=np.int64),
            cost_component_names=tuple(self.component_order),
        )


def compile_model(spec: EnergySystemSpec, grid: AggregatedTimeGrid) -> CompiledModel:
    """Build the LP for a system on a time grid.

    Fails with a descriptive error when a referenced profile attribute is
    missing from the grid, when step lengths disagree, or when a sink
    binds an all-zero demand profile.
    """
    missing = [
        attr
        for attr in spec.profile_attributes()
        if attr not in grid.attribute_names
    ]
    if missing:
        raise ValueError(
            f"system {spec.name!r} references profile attributes {missing} "
            f"that the grid does not provide (it has "
            f"{list(grid.attribute_names)})"
        )
    if abs(spec.step_hours - grid.step_hours) > 1e-12:
        raise ValueError(
            f"system expects {spec.step_hours}h steps but the grid was built "
            f"with {grid.step_hours}h steps"
        )
    builder = _Builder(spec, grid)
    for comp in spec.components:
        if isinstance(comp, Source):
            builder.add_source(comp)
        elif isinstance(comp, Sink):
            builder.add_sink(comp)
        elif isinstance(comp, Conversion):
            builder.add_conversion(comp)
        elif isinstance(comp, Storage):
            builder.add_storage(comp)
        elif isinstance(comp, Transmission):
            builder.add_transmission(comp)
        else:
            raise TypeError(f"unknown component type {type(comp).__name__}")
    model = builder.finish()
    # A typical-steps grid with storage couples each shared rate pair
    # into state rows scattered over the whole horizon; dual simplex
    # grinds through that degeneracy for hours where interior point
    # finishes in minutes.  Singleton clusters (k = N_s) reduce to the
    # plain chronological model, which dual simplex handles best.
    has_storage = any(isinstance(c, Storage) for c in spec.components)
    if (
        grid.mode is GridMode.TYPICAL_STEPS
        and has_storage
        and grid.k < grid.n_original_steps
        and model.lp.n_constraints > 2000
    ):
        model.solver_hint = "highs-ipm"
    logger.info(
        "compiled %s on %s grid: %d variables, %d constraints",
        spec.name, grid.mode.value, model.lp.n_variables, model.lp.n_constraints,
    )
    return model


def _check_optimal(result: SolveResult) -> np.ndarray:
    if result.status is not SolveStatus.OPTIMAL or result.values is None:
        raise RuntimeError(
            f"cannot extract results from a {result.status.value} solve"
        )
    return result.values


def extract_cost_breakdown(
    compiled: CompiledModel, result: SolveResult
) -> CostBreakdown:
    """Split the objective into per-component annualized cost parts."""
    x = _check_optimal(result)
    n_comp = len(compiled.cost_component_names)
    parts = np.zeros((3, n_comp))
    contributions = compiled.cost_coefficient * x[compiled.cost_var_index]
    np.add.at(
        parts, (compiled.cost_category, compiled.cost_component), contributions
    )
    return CostBreakdown(
        component_names=compiled.cost_component_names,
        capex_annualized=parts[_CAPEX],
        fixed_opex=parts[_FIXED_OPEX],
        variable_opex=parts[_VARIABLE],
    )


def extract_capacities(
    compiled: CompiledModel, result: SolveResult
) -> dict[str, dict[str, float]]:
    """Chosen capacities of all expandable components."""
    x = _check_optimal(result)
    return {
        comp: {role: float(x[idx]) for role, idx in roles.items()}
        for comp, roles in compiled.capacity_vars.items()
    }


def extract_operations(
    compiled: CompiledModel, result: SolveResult
) -> dict[str, dict[str, np.ndarray]]:
    """Per-component operation values, shaped like their variable blocks."""
    x = _check_optimal(result)
    out: dict[str, dict[str, np.ndarray]] = {}
    for comp, blocks in compiled.operation_vars.items():
        out[comp] = {kind: x[idx] for kind, idx in blocks.items()}
    return out
