"""The two bundled benchmark systems.

``build_dispatch_spec`` is a three-region national power system with a
fixed thermal fleet, priced imports and exogenous injections: a pure
dispatch problem whose cost reacts to how well aggregation preserves
chronology and extremes.  ``build_building_spec`` is a self-sufficient
building energy system where every capacity is an investment decision
and seasonal hydrogen storage couples time steps across the whole year.

Technology parameters are plain literals on purpose so a reader can
check them against their sources line by line.  Costs are EUR per MW
resp. kW and hour; emission factors are tonnes CO2 per MWh of fuel
burned.
"""

from __future__ import annotations

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

__all__ = ["build_dispatch_spec", "build_building_spec"]

DISPATCH_REGIONS = ("north", "middle", "south")

# thermal fleet: efficiency, variable cost EUR/MWh output, emission
# factor tCO2/MWh fuel, and the regional capacity split in MW
_THERMAL = {
    "lignite": (0.315, 15.2, 0.400, (4000.0, 2000.0, 1000.0)),
    "hard_coal": (0.365, 13.7, 0.342, (2000.0, 3000.0, 2000.0)),
    "gas_cc": (0.520, 6.85, 0.204, (2000.0, 3000.0, 3000.0)),
    "gas_sc": (0.355, 5.60, 0.204, (1000.0, 1500.0, 1500.0)),
}

_WIND_CAP = (6000.0, 3000.0, 1500.0)
_SOLAR_CAP = (1000.0, 3000.0, 5000.0)
_RENEWABLE_VARCOST = 7.5
_IMPORT_CAP = 3000.0
_EMISSION_PRICE = 25.0

_LINES = (
    ("north", "middle", 2500.0, 0.02),
    ("middle", "south", 2500.0, 0.02),
    ("north", "south", 1000.0, 0.03),
)


def build_dispatch_spec(
    regions: tuple[str, ...] = DISPATCH_REGIONS,
    thermal: dict[str, tuple[float, float, float, tuple[float, ...]]] | None = None,
    wind_capacity: tuple[float, ...] = _WIND_CAP,
    solar_capacity: tuple[float, ...] = _SOLAR_CAP,
    import_capacity: float = _IMPORT_CAP,
    emission_price: float | str = _EMISSION_PRICE,
    renewable_variable_cost: float = _RENEWABLE_VARCOST,
    lines: tuple[tuple[str, str, float, float], ...] = _LINES,
) -> EnergySystemSpec:
    """Multi-region dispatch system with a fixed fleet.

    Thermal plants burn an unbalanced fuel commodity, so fuel supply is
    implicit and its price is part of the variable cost.  Imports are a
    source priced by the ``price.import`` series; uncontrolled exchanges
    (hydro storage dispatch, balancing) enter as signed fixed-profile
    injections per region.  Profile attributes follow the naming scheme
    ``demand.<region>``, ``cf.wind.<region>``, ``cf.solar.<region>``,
    ``injection.<region>`` and ``price.import``.
    """
    if thermal is None:
        thermal = _THERMAL
    for tech, (_, _, _, caps) in thermal.items():
        if len(caps) != len(regions):
            raise ValueError(
                f"thermal technology {tech!r} lists {len(caps)} capacities "
                f"for {len(regions)} regions"
            )
    if len(wind_capacity) != len(regions) or len(solar_capacity) != len(regions):
        raise ValueError("renewable capacity tuples must match the region list")
    components: list = []
    for i, region in enumerate(regions):
        for tech, (eff, varcost, emission, caps) in thermal.items():
            fuel = "natural_gas" if tech.startswith("gas") else tech
            components.append(
                Conversion(
                    name=f"{tech}.{region}",
                    region=region,
                    input_commodity=fuel,
                    output_commodity="electricity",
                    efficiency=eff,
                    capacity=CapacityFixed(caps[i]),
                    variable_cost=varcost,
                    emission_factor=emission,
                )
            )
        for tech, caps in (("wind", wind_capacity), ("solar", solar_capacity)):
            components.append(
                Source(
                    name=f"{tech}.{region}",
                    region=region,
                    commodity="electricity",
                    capacity=CapacityFixed(caps[i]),
                    variable_cost=renewable_variable_cost,
                    capacity_factor_attr=f"cf.{tech}.{region}",
                )
            )
        components.append(
            Source(
                name=f"import.{region}",
                region=region,
                commodity="electricity",
                capacity=CapacityFixed(import_capacity),
                variable_cost_attr="price.import",
            )
        )
        components.append(
            Source(
                name=f"injection.{region}",
                region=region,
                commodity="electricity",
                capacity=CapacityFixed(1.0),
                capacity_factor_attr=f"injection.{region}",
                fixed_profile=True,
            )
        )
        components.append(
            Sink(
                name=f"load.{region}",
                region=region,
                commodity="electricity",
                demand_attr=f"demand.{region}",
            )
        )
    for region_from, region_to, cap, loss in lines:
        components.append(
            Transmission(
                name=f"line.{region_from}.{region_to}",
                region_from=region_from,
                region_to=region_to,
                commodity="electricity",
                capacity=CapacityFixed(cap),
                loss_fraction=loss,
            )
        )
    return EnergySystemSpec(
        name="dispatch",
        regions=tuple(regions),
        commodities=("electricity",),
        components=tuple(components),
        emission_price=emission_price,
    )


def build_building_spec(
    annuity_rate: float | None = None,
    pv_orientations: tuple[str, ...] = ("south", "east", "northwest"),
) -> EnergySystemSpec:
    """Self-sufficient building system where all capacities are chosen.

    PV orientations feed electricity and heat demand through a battery,
    a heat pump, an electric heater, thermal storage, and a hydrogen
    chain (electrolysis, tank, reversible fuel cell) that bridges
    low-sun weeks.  There is no grid connection, so investment must
    cover the worst stretch of the year and clustering errors show up
    directly in the chosen capacities.  Expects profile attributes
    ``cf.pv.<orientation>``, ``demand.electricity`` and ``demand.heat``.
    """
    region = "site"
    components: list = [
        Source(
            name=f"pv.{orientation}",
            region=region,
            commodity="electricity",
            capacity=CapacityExpandable(
                capex=769.0, lifetime_years=20.0, fixed_opex_fraction=0.01
            ),
            capacity_factor_attr=f"cf.pv.{orientation}",
        )
        for orientation in pv_orientations
    ]
    components += [
        Storage(
            name="battery",
            region=region,
            commodity="electricity",
            energy_capacity=CapacityExpandable(capex=301.0, lifetime_years=15.0),
            power_capacity=CapacityExpandable(capex=75.0, lifetime_years=20.0),
            charge_efficiency=0.95,
            discharge_efficiency=0.95,
            self_discharge_per_step=1e-4,
        ),
        Conversion(
            name="hydrogenizer",
            region=region,
            input_commodity="electricity",
            output_commodity="hydrogen",
            efficiency=0.63,
            capacity=CapacityExpandable(
                capex=761.1, lifetime_years=20.0, fixed_opex_fraction=0.01
            ),
        ),
        Conversion(
            name="rsoc",
            region=region,
            input_commodity="hydrogen",
            output_commodity="electricity",
            efficiency=0.50,
            capacity=CapacityExpandable(
                capex=2400.0, lifetime_years=15.0, fixed_opex_fraction=0.01
            ),
        ),
        Storage(
            name="h2_tank",
            region=region,
            commodity="hydrogen",
            energy_capacity=CapacityExpandable(capex=15.0, lifetime_years=25.0),
        ),
        Conversion(
            name="heat_pump",
            region=region,
            input_commodity="electricity",
            output_commodity="heat",
            efficiency=3.5,
            capacity=CapacityExpandable(
                capex=504.9, lifetime_years=20.0, fixed_opex_fraction=0.015
            ),
        ),
        Conversion(
            name="e_heater",
            region=region,
            input_commodity="electricity",
            output_commodity="heat",
            efficiency=0.99,
            capacity=CapacityExpandable(
                capex=60.0, lifetime_years=30.0, fixed_opex_fraction=0.02
            ),
        ),
        Storage(
            name="thermal_storage",
            region=region,
            commodity="heat",
            energy_capacity=CapacityExpandable(
                capex=90.0, lifetime_years=25.0, fixed_opex_fraction=0.0001
            ),
            charge_efficiency=0.99,
            discharge_efficiency=0.99,
            self_discharge_per_step=0.005,
        ),
        Sink(
            name="electric_load",
            region=region,
            commodity="electricity",
            demand_attr="demand.electricity",
        ),
        Sink(
            name="heat_load",
            region=region,
            commodity="heat",
            demand_attr="demand.heat",
        ),
    ]
    return EnergySystemSpec(
        name="building",
        regions=(region,),
        commodities=("electricity", "heat", "hydrogen"),
        components=tuple(components),
        annuity_rate=annuity_rate,
    )
