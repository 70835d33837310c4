"""Deterministic synthetic benchmark profiles.

Both bundled datasets are one model year at hourly resolution, built
from seasonal and diurnal sinusoidal components plus fixed-seed noise
with realistic persistence (first-order autoregressive weather and
cloud processes).  The generators are pure functions of their seed, so
regenerating the bundled CSV files is byte-reproducible.

Units: capacity factors are dimensionless in [0, 1], building demands
are kW, dispatch demands and injections are MW, import prices EUR/MWh.
"""

from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from .series import TimeSeriesSet

__all__ = [
    "BUILDING_SEED",
    "DISPATCH_SEED",
    "building_profiles",
    "dispatch_profiles",
    "write_profile_csv",
    "write_sample_csvs",
]

BUILDING_SEED = 74812
DISPATCH_SEED = 29107

_EPOCH = dt.datetime(2030, 1, 1)


def _calendar(n_steps: int):
    t = np.arange(n_steps)
    hour = (t % 24).astype(np.float64)
    day = t // 24
    day_of_year = (day % 365).astype(np.float64)
    day_of_week = day % 7
    # 0 at the winter solstice, 1 at the summer solstice
    season = 0.5 - 0.5 * np.cos(2.0 * np.pi * (day_of_year + 10.0) / 365.0)
    return hour, day, day_of_week, season


def _ar1(rng: np.random.Generator, n: int, rho: float, sigma: float) -> np.ndarray:
    """Stationary first-order autoregressive noise."""
    x = np.empty(n)
    x[0] = rng.normal(0.0, sigma / np.sqrt(1.0 - rho * rho))
    eps = rng.normal(0.0, sigma, n)
    for i in range(1, n):
        x[i] = rho * x[i - 1] + eps[i]
    return x


def _bump(hour: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-(((hour - center) / width) ** 2))


def _solar_cf(
    rng: np.random.Generator,
    hour: np.ndarray,
    day: np.ndarray,
    season: np.ndarray,
    peak_hour: float,
    width: float,
    amplitude: float,
) -> np.ndarray:
    """Capacity factor of a fixed-tilt module with one peak direction."""
    n_days = int(day.max()) + 1
    cloud = np.clip(0.62 + 0.38 * np.tanh(_ar1(rng, n_days, 0.7, 0.8)), 0.12, 1.0)
    half_window = 4.0 + 3.0 * season
    elevation = np.cos(np.pi * (hour - 12.5) / (2.0 * half_window))
    daylight = np.maximum(elevation, 0.0)
    bell = _bump(hour, peak_hour, width)
    cf = amplitude * (0.30 + 0.70 * season) * daylight * bell * cloud[day]
    jitter = np.clip(1.0 + rng.normal(0.0, 0.05, hour.size), 0.7, 1.2)
    return np.clip(cf * jitter, 0.0, 1.0)


def _wind_cf(
    rng: np.random.Generator, n: int, season: np.ndarray, bias: float
) -> np.ndarray:
    x = _ar1(rng, n, 0.965, 0.28)
    winter_boost = 0.9 * (0.5 - season)
    return np.clip(1.0 / (1.0 + np.exp(-(x + bias + winter_boost))), 0.0, 1.0) * 0.94


def building_profiles(n_steps: int = 8760, seed: int = BUILDING_SEED) -> TimeSeriesSet:
    """Five building attributes: three PV orientations and two demands."""
    rng = np.random.default_rng(seed)
    hour, day, day_of_week, season = _calendar(n_steps)
    n_days = int(day.max()) + 1

    pv_south = _solar_cf(rng, hour, day, season, 12.5, 4.6, 0.92)
    pv_east = _solar_cf(rng, hour, day, season, 9.5, 3.6, 0.80)
    pv_northwest = _solar_cf(rng, hour, day, season, 16.0, 3.4, 0.62)

    weekend = np.isin(day_of_week, (5, 6))
    occupancy = np.where(weekend, 1.06, 1.0)
    elec_shape = (
        0.80
        + 0.18 * _bump(hour, 8.0, 2.2)
        + 0.26 * _bump(hour, 19.5, 2.8)
        - 0.12 * _bump(hour, 3.0, 2.5)
    )
    elec_noise = 1.0 + 0.06 * np.tanh(_ar1(rng, n_steps, 0.85, 0.5))
    elec = 10.0 * elec_shape * occupancy * (1.0 + 0.10 * (0.5 - season)) * elec_noise
    elec = np.clip(elec, 1.5, None)

    temp_daily = (
        9.5
        - 11.5 * np.cos(2.0 * np.pi * (np.arange(n_days) % 365 + 10.0) / 365.0)
        + _ar1(rng, n_days, 0.82, 2.3)
    )
    temperature = temp_daily[day] - 1.8 * np.cos(2.0 * np.pi * (hour - 15.0) / 24.0)
    heating = 2.35 * np.maximum(0.0, 16.5 - temperature)
    hot_water = 0.7 + 1.1 * _bump(hour, 7.5, 1.6) + 0.9 * _bump(hour, 19.0, 2.2)
    heat = heating + hot_water * occupancy

    return TimeSeriesSet(
        (
            "cf.pv.south",
            "cf.pv.east",
            "cf.pv.northwest",
            "demand.electricity",
            "demand.heat",
        ),
        np.vstack([pv_south, pv_east, pv_northwest, elec, heat]),
    )


def dispatch_profiles(n_steps: int = 8760, seed: int = DISPATCH_SEED) -> TimeSeriesSet:
    """Thirteen dispatch attributes for the three-region system."""
    rng = np.random.default_rng(seed)
    hour, day, day_of_week, season = _calendar(n_steps)

    demand_shape = (
        0.88
        + 0.13 * _bump(hour, 11.5, 3.2)
        + 0.11 * _bump(hour, 19.0, 2.6)
        - 0.10 * _bump(hour, 3.5, 3.0)
    )
    weekday = np.select(
        [day_of_week == 5, day_of_week == 6], [0.93, 0.88], default=1.0
    )
    seasonal = 1.0 + 0.26 * (0.5 - season)
    demands = {}
    for region, mean in (("north", 6000.0), ("middle", 8000.0), ("south", 7000.0)):
        noise = 1.0 + 0.05 * np.tanh(_ar1(rng, n_steps, 0.9, 0.45))
        demands[region] = mean * demand_shape * weekday * seasonal * noise

    wind = {
        "north": _wind_cf(rng, n_steps, season, -0.55),
        "middle": _wind_cf(rng, n_steps, season, -0.85),
        "south": _wind_cf(rng, n_steps, season, -1.20),
    }
    solar = {
        "north": _solar_cf(rng, hour, day, season, 12.5, 4.4, 0.80),
        "middle": _solar_cf(rng, hour, day, season, 12.5, 4.5, 0.85),
        "south": _solar_cf(rng, hour, day, season, 12.6, 4.6, 0.90),
    }

    load_level = demand_shape * weekday * seasonal
    wind_level = (wind["north"] + wind["middle"] + wind["south"]) / 3.0
    spikes = 70.0 * np.maximum(0.0, _ar1(rng, n_steps, 0.55, 1.0) - 1.9)
    price = (
        48.0
        + 30.0 * (load_level - float(load_level.mean()))
        - 22.0 * (wind_level - float(wind_level.mean()))
        + 8.0 * np.tanh(_ar1(rng, n_steps, 0.8, 0.6))
        + spikes
    )
    price = np.clip(price, 1.0, None)

    injections = {}
    for region, charge_hour, discharge_hour in (
        ("north", 3.0, 19.5),
        ("middle", 4.0, 12.0),
        ("south", 2.5, 20.5),
    ):
        pattern = 300.0 * (
            _bump(hour, discharge_hour, 2.4) - _bump(hour, charge_hour, 3.0)
        )
        injections[region] = pattern + 60.0 * np.tanh(_ar1(rng, n_steps, 0.7, 0.6))

    names = []
    rows = []
    for region in ("north", "middle", "south"):
        names.append(f"demand.{region}")
        rows.append(demands[region])
    for region in ("north", "middle", "south"):
        names.append(f"cf.wind.{region}")
        rows.append(wind[region])
        names.append(f"cf.solar.{region}")
        rows.append(solar[region])
    names.append("price.import")
    rows.append(price)
    for region in ("north", "middle", "south"):
        names.append(f"injection.{region}")
        rows.append(injections[region])
    return TimeSeriesSet(tuple(names), np.vstack(rows))


def write_profile_csv(ts: TimeSeriesSet, path: Path | str) -> Path:
    """Write one profile set with a leading hourly timestamp column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["timestamp", *ts.attribute_names])
        columns = ts.values.T
        for i in range(ts.n_steps):
            stamp = (_EPOCH + dt.timedelta(hours=i)).isoformat(timespec="minutes")
            writer.writerow([stamp] + [format(v, ".10g") for v in columns[i]])
    return path


def write_sample_csvs(directory: Path | str, n_steps: int = 8760) -> dict[str, Path]:
    """Write both bundled datasets into a directory."""
    directory = Path(directory)
    return {
        "building": write_profile_csv(
            building_profiles(n_steps), directory / "sample_building.csv"
        ),
        "dispatch": write_profile_csv(
            dispatch_profiles(n_steps), directory / "sample_dispatch.csv"
        ),
    }
