"""Component-based description of a linear energy system model.

A system is a set of regions, balanced commodities and components wired
to named profile attributes.  Five component kinds exist:

* :class:`Source` produces one commodity in one region, optionally
  limited by a capacity-factor profile, optionally with a time-varying
  price series.  A fixed-profile source injects exactly profile times
  capacity (signed), which is how exogenously dispatched units such as
  historically operated storage enter a dispatch-only model.
* :class:`Sink` consumes a fixed demand profile (inelastic).
* :class:`Conversion` turns one commodity into another at a constant
  ratio: output = efficiency * input.  Ratios above one are legitimate
  (heat pumps move ambient heat, so their coefficient of performance
  exceeds one); only positivity is enforced.  Emissions are accounted on
  the input side and priced through the system-wide emission price.
* :class:`Storage` shifts one commodity over time with charge and
  discharge efficiencies in (0, 1], per-step self-discharge in [0, 1)
  and separate energy and power capacities.
* :class:`Transmission` links two regions with symmetric per-direction
  capacity and a transport loss fraction.

Capacities are either fixed installations or expandable with straight
line (or annuity, when the system sets a rate) annualized investment
plus a yearly fixed-cost fraction of the investment.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

__all__ = [
    "CapacityFixed",
    "CapacityExpandable",
    "Capacity",
    "Source",
    "Sink",
    "Conversion",
    "Storage",
    "Transmission",
    "Component",
    "EnergySystemSpec",
    "spec_to_json",
    "spec_from_json",
    "load_spec",
    "save_spec",
]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


@dataclass(frozen=True)
class CapacityFixed:
    """An existing installation of the given size; no investment cost."""

    value: float

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.value) and self.value >= 0,
            f"fixed capacity must be a finite non-negative number, got {self.value}",
        )


@dataclass(frozen=True)
class CapacityExpandable:
    """Capacity chosen by the optimizer at a cost.

    ``capex`` is the specific investment per unit capacity,
    ``lifetime_years`` the depreciation horizon and
    ``fixed_opex_fraction`` the yearly fixed cost share of the
    investment.  ``max_capacity`` optionally caps the build-out.
    """

    capex: float
    lifetime_years: float
    fixed_opex_fraction: float = 0.0
    max_capacity: float | None = None

    def __post_init__(self) -> None:
        _require(math.isfinite(self.capex) and self.capex >= 0, "capex must be >= 0")
        _require(
            math.isfinite(self.lifetime_years) and self.lifetime_years > 0,
            "lifetime_years must be positive",
        )
        _require(
            0 <= self.fixed_opex_fraction < 1,
            "fixed_opex_fraction must lie in [0, 1)",
        )
        if self.max_capacity is not None:
            _require(self.max_capacity >= 0, "max_capacity must be >= 0")

    def annualized_unit_cost(self, annuity_rate: float | None) -> float:
        """Yearly cost per unit capacity: depreciation plus fixed opex."""
        if annuity_rate is None:
            invest = self.capex / self.lifetime_years
        else:
            q = 1.0 + annuity_rate
            invest = self.capex * annuity_rate / (1.0 - q**-self.lifetime_years)
        return invest + self.fixed_opex_fraction * self.capex

    def capital_unit_cost(self, annuity_rate: float | None) -> float:
        """Depreciation-only part of :meth:`annualized_unit_cost`."""
        if annuity_rate is None:
            return self.capex / self.lifetime_years
        q = 1.0 + annuity_rate
        return self.capex * annuity_rate / (1.0 - q**-self.lifetime_years)


Capacity = Union[CapacityFixed, CapacityExpandable]


@dataclass(frozen=True)
class Source:
    name: str
    region: str
    commodity: str
    capacity: Capacity
    variable_cost: float = 0.0
    variable_cost_attr: str | None = None
    capacity_factor_attr: str | None = None
    fixed_profile: bool = False

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.variable_cost), f"{self.name}: variable_cost not finite"
        )
        if self.fixed_profile:
            _require(
                self.capacity_factor_attr is not None,
                f"{self.name}: a fixed-profile source needs a capacity_factor_attr",
            )
            _require(
                isinstance(self.capacity, CapacityFixed),
                f"{self.name}: a fixed-profile source cannot be expandable",
            )
        else:
            _require(
                self.variable_cost >= 0, f"{self.name}: variable_cost must be >= 0"
            )


@dataclass(frozen=True)
class Sink:
    name: str
    region: str
    commodity: str
    demand_attr: str


@dataclass(frozen=True)
class Conversion:
    name: str
    region: str
    input_commodity: str
    output_commodity: str
    efficiency: float
    capacity: Capacity
    variable_cost: float = 0.0
    emission_factor: float = 0.0  # emission per unit of input energy

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.efficiency) and self.efficiency > 0,
            f"{self.name}: conversion ratio must be positive",
        )
        _require(
            self.input_commodity != self.output_commodity,
            f"{self.name}: conversion must change the commodity",
        )
        _require(self.variable_cost >= 0, f"{self.name}: variable_cost must be >= 0")
        _require(self.emission_factor >= 0, f"{self.name}: emission_factor must be >= 0")


@dataclass(frozen=True)
class Storage:
    name: str
    region: str
    commodity: str
    energy_capacity: Capacity
    power_capacity: Capacity | None = None
    charge_efficiency: float = 1.0
    discharge_efficiency: float = 1.0
    self_discharge_per_step: float = 0.0
    cyclic: bool = True

    def __post_init__(self) -> None:
        for label, eff in (
            ("charge", self.charge_efficiency),
            ("discharge", self.discharge_efficiency),
        ):
            _require(
                0 < eff <= 1, f"{self.name}: {label} efficiency must lie in (0, 1]"
            )
        _require(
            0 <= self.self_discharge_per_step < 1,
            f"{self.name}: self-discharge per step must lie in [0, 1)",
        )


@dataclass(frozen=True)
class Transmission:
    name: str
    region_from: str
    region_to: str
    commodity: str
    capacity: Capacity
    loss_fraction: float = 0.0
    variable_cost: float = 0.0

    def __post_init__(self) -> None:
        _require(
            self.region_from != self.region_to,
            f"{self.name}: transmission must connect two distinct regions",
        )
        _require(
            0 <= self.loss_fraction < 1,
            f"{self.name}: loss fraction must lie in [0, 1)",
        )
        _require(self.variable_cost >= 0, f"{self.name}: variable_cost must be >= 0")


Component = Union[Source, Sink, Conversion, Storage, Transmission]


@dataclass(frozen=True)
class EnergySystemSpec:
    """Complete model description, independent of any time grid.

    ``commodities`` lists the commodities that receive nodal balance
    equations.  A conversion may draw an input commodity that is not
    balanced (a freely available fuel whose price sits in the unit's
    variable cost).  ``emission_price`` is either a constant or the name
    of a price profile attribute.  ``annuity_rate`` switches capacity
    annualization from straight-line depreciation to an annuity factor.
    """

    name: str
    regions: tuple[str, ...]
    commodities: tuple[str, ...]
    components: tuple[Component, ...]
    emission_price: float | str = 0.0
    annuity_rate: float | None = None
    step_hours: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "commodities", tuple(self.commodities))
        object.__setattr__(self, "components", tuple(self.components))
        _require(len(self.regions) > 0, "a system needs at least one region")
        _require(
            len(set(self.regions)) == len(self.regions), "region names must be unique"
        )
        _require(
            len(set(self.commodities)) == len(self.commodities),
            "commodity names must be unique",
        )
        _require(self.step_hours > 0, "step_hours must be positive")
        if self.annuity_rate is not None:
            _require(self.annuity_rate > 0, "annuity_rate must be positive when set")
        names = [c.name for c in self.components]
        _require(
            len(set(names)) == len(names),
            f"component names must be unique, got duplicates "
            f"{sorted({n for n in names if names.count(n) > 1})}",
        )
        regions = set(self.regions)
        balanced = set(self.commodities)
        for comp in self.components:
            if isinstance(comp, Transmission):
                _require(
                    comp.region_from in regions and comp.region_to in regions,
                    f"{comp.name}: unknown region in link "
                    f"{comp.region_from}-{comp.region_to}",
                )
                _require(
                    comp.commodity in balanced,
                    f"{comp.name}: transmission commodity {comp.commodity!r} "
                    "is not balanced",
                )
                continue
            _require(
                comp.region in regions,
                f"{comp.name}: unknown region {comp.region!r}",
            )
            if isinstance(comp, (Source, Sink, Storage)):
                _require(
                    comp.commodity in balanced,
                    f"{comp.name}: commodity {comp.commodity!r} is not balanced",
                )
            if isinstance(comp, Conversion):
                _require(
                    comp.output_commodity in balanced,
                    f"{comp.name}: output commodity {comp.output_commodity!r} "
                    "is not balanced",
                )

    def profile_attributes(self) -> tuple[str, ...]:
        """All profile attribute names the model needs, in first-use order."""
        needed: list[str] = []

        def note(attr: str | None) -> None:
            if attr is not None and attr not in needed:
                needed.append(attr)

        for comp in self.components:
            if isinstance(comp, Source):
                note(comp.capacity_factor_attr)
                note(comp.variable_cost_attr)
            elif isinstance(comp, Sink):
                note(comp.demand_attr)
        if isinstance(self.emission_price, str):
            note(self.emission_price)
        return tuple(needed)

    def component(self, name: str) -> Component:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise KeyError(f"no component named {name!r}")


# -- JSON serialization --------------------------------------------------
#
# The on-disk schema mirrors the dataclasses: see docs/scenario_schema.md
# for the full field reference.

_KIND_BY_CLASS = {
    Source: "source",
    Sink: "sink",
    Conversion: "conversion",
    Storage: "storage",
    Transmission: "transmission",
}


def _capacity_to_json(cap: Capacity | None) -> dict | None:
    if cap is None:
        return None
    if isinstance(cap, CapacityFixed):
        return {"fixed": cap.value}
    out = {
        "capex": cap.capex,
        "lifetime_years": cap.lifetime_years,
        "fixed_opex_fraction": cap.fixed_opex_fraction,
    }
    if cap.max_capacity is not None:
        out["max_capacity"] = cap.max_capacity
    return out


def _capacity_from_json(obj: dict | None, where: str) -> Capacity | None:
    if obj is None:
        return None
    if "fixed" in obj:
        return CapacityFixed(float(obj["fixed"]))
    try:
        return CapacityExpandable(
            capex=float(obj["capex"]),
            lifetime_years=float(obj["lifetime_years"]),
            fixed_opex_fraction=float(obj.get("fixed_opex_fraction", 0.0)),
            max_capacity=(
                float(obj["max_capacity"]) if "max_capacity" in obj else None
            ),
        )
    except KeyError as exc:
        raise ValueError(f"{where}: capacity object is missing {exc}") from None


def _component_to_json(comp: Component) -> dict:
    kind = _KIND_BY_CLASS[type(comp)]
    if isinstance(comp, Source):
        body = {
            "name": comp.name,
            "region": comp.region,
            "commodity": comp.commodity,
            "capacity": _capacity_to_json(comp.capacity),
            "variable_cost": comp.variable_cost,
        }
        if comp.variable_cost_attr:
            body["variable_cost_attr"] = comp.variable_cost_attr
        if comp.capacity_factor_attr:
            body["capacity_factor_attr"] = comp.capacity_factor_attr
        if comp.fixed_profile:
            body["fixed_profile"] = True
    elif isinstance(comp, Sink):
        body = {
            "name": comp.name,
            "region": comp.region,
            "commodity": comp.commodity,
            "demand_attr": comp.demand_attr,
        }
    elif isinstance(comp, Conversion):
        body = {
            "name": comp.name,
            "region": comp.region,
            "input_commodity": comp.input_commodity,
            "output_commodity": comp.output_commodity,
            "efficiency": comp.efficiency,
            "capacity": _capacity_to_json(comp.capacity),
            "variable_cost": comp.variable_cost,
            "emission_factor": comp.emission_factor,
        }
    elif isinstance(comp, Storage):
        body = {
            "name": comp.name,
            "region": comp.region,
            "commodity": comp.commodity,
            "energy_capacity": _capacity_to_json(comp.energy_capacity),
            "power_capacity": _capacity_to_json(comp.power_capacity),
            "charge_efficiency": comp.charge_efficiency,
            "discharge_efficiency": comp.discharge_efficiency,
            "self_discharge_per_step": comp.self_discharge_per_step,
            "cyclic": comp.cyclic,
        }
    else:
        body = {
            "name": comp.name,
            "region_from": comp.region_from,
            "region_to": comp.region_to,
            "commodity": comp.commodity,
            "capacity": _capacity_to_json(comp.capacity),
            "loss_fraction": comp.loss_fraction,
            "variable_cost": comp.variable_cost,
        }
    body["type"] = kind
    return body


def _component_from_json(obj: dict) -> Component:
    kind = obj.get("type")
    name = obj.get("name", "<unnamed>")
    where = f"component {name!r}"
    if kind == "source":
        return Source(
            name=obj["name"],
            region=obj["region"],
            commodity=obj["commodity"],
            capacity=_capacity_from_json(obj["capacity"], where),
            variable_cost=float(obj.get("variable_cost", 0.0)),
            variable_cost_attr=obj.get("variable_cost_attr"),
            capacity_factor_attr=obj.get("capacity_factor_attr"),
            fixed_profile=bool(obj.get("fixed_profile", False)),
        )
    if kind == "sink":
        return Sink(
            name=obj["name"],
            region=obj["region"],
            commodity=obj["commodity"],
            demand_attr=obj["demand_attr"],
        )
    if kind == "conversion":
        return Conversion(
            name=obj["name"],
            region=obj["region"],
            input_commodity=obj["input_commodity"],
            output_commodity=obj["output_commodity"],
            efficiency=float(obj["efficiency"]),
            capacity=_capacity_from_json(obj["capacity"], where),
            variable_cost=float(obj.get("variable_cost", 0.0)),
            emission_factor=float(obj.get("emission_factor", 0.0)),
        )
    if kind == "storage":
        return Storage(
            name=obj["name"],
            region=obj["region"],
            commodity=obj["commodity"],
            energy_capacity=_capacity_from_json(obj["energy_capacity"], where),
            power_capacity=_capacity_from_json(obj.get("power_capacity"), where),
            charge_efficiency=float(obj.get("charge_efficiency", 1.0)),
            discharge_efficiency=float(obj.get("discharge_efficiency", 1.0)),
            self_discharge_per_step=float(obj.get("self_discharge_per_step", 0.0)),
            cyclic=bool(obj.get("cyclic", True)),
        )
    if kind == "transmission":
        return Transmission(
            name=obj["name"],
            region_from=obj["region_from"],
            region_to=obj["region_to"],
            commodity=obj["commodity"],
            capacity=_capacity_from_json(obj["capacity"], where),
            loss_fraction=float(obj.get("loss_fraction", 0.0)),
            variable_cost=float(obj.get("variable_cost", 0.0)),
        )
    raise ValueError(f"unknown component type {kind!r} in {where}")


def spec_to_json(spec: EnergySystemSpec) -> str:
    """Serialize a system to the documented JSON scenario format."""
    doc = {
        "name": spec.name,
        "regions": list(spec.regions),
        "commodities": list(spec.commodities),
        "emission_price": spec.emission_price,
        "annuity_rate": spec.annuity_rate,
        "step_hours": spec.step_hours,
        "components": [_component_to_json(c) for c in spec.components],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def spec_from_json(text: str) -> EnergySystemSpec:
    """Parse the documented JSON scenario format."""
    doc = json.loads(text)
    emission_price = doc.get("emission_price", 0.0)
    if not isinstance(emission_price, str):
        emission_price = float(emission_price)
    return EnergySystemSpec(
        name=doc.get("name", "scenario"),
        regions=tuple(doc["regions"]),
        commodities=tuple(doc["commodities"]),
        components=tuple(_component_from_json(c) for c in doc["components"]),
        emission_price=emission_price,
        annuity_rate=(
            float(doc["annuity_rate"]) if doc.get("annuity_rate") is not None else None
        ),
        step_hours=float(doc.get("step_hours", 1.0)),
    )


def save_spec(spec: EnergySystemSpec, path: str | Path) -> Path:
    target = Path(path)
    target.write_text(spec_to_json(spec), encoding="utf-8")
    return target


def load_spec(path: str | Path) -> EnergySystemSpec:
    return spec_from_json(Path(path).read_text(encoding="utf-8"))
