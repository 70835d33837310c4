"""Energy system models on aggregated time grids."""

from .compile import (
    CompiledModel,
    CostBreakdown,
    compile_model,
    extract_capacities,
    extract_cost_breakdown,
    extract_operations,
)
from .components import (
    CapacityExpandable,
    CapacityFixed,
    Conversion,
    EnergySystemSpec,
    Sink,
    Source,
    Storage,
    Transmission,
    load_spec,
    save_spec,
    spec_from_json,
    spec_to_json,
)
from .grid import AggregatedTimeGrid, GridMode, full_grid, grid_from_clustering
from .scenarios import build_building_spec, build_dispatch_spec

__all__ = [
    "build_building_spec",
    "build_dispatch_spec",
    "AggregatedTimeGrid",
    "CapacityExpandable",
    "CapacityFixed",
    "CompiledModel",
    "Conversion",
    "CostBreakdown",
    "EnergySystemSpec",
    "GridMode",
    "Sink",
    "Source",
    "Storage",
    "Transmission",
    "compile_model",
    "extract_capacities",
    "extract_cost_breakdown",
    "extract_operations",
    "full_grid",
    "grid_from_clustering",
    "load_spec",
    "save_spec",
    "spec_from_json",
    "spec_to_json",
]
