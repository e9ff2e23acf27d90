"""Simulated ground truth for edge travel times.

The world produces the travel times a robot would actually measure: a base
time (driven length / nominal speed) inflated by battery wear and floor
roughness, with a small multiplicative noise. Executing a path against the
world drains the battery, grows the observation log, and is the only source
of observations the estimators ever see.
"""

from __future__ import annotations

import copy
import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .topo_map import Edge, TopologyMap, edge_key


class RoughnessLevel(str, Enum):
    SMOOTH = "smooth"
    LIGHT = "light"
    MODERATE = "moderate"
    HEAVY = "heavy"


#: qualitative ordering smooth < light < moderate < heavy, as multipliers
DEFAULT_ROUGHNESS_MULTIPLIERS = {
    RoughnessLevel.SMOOTH: 1.0,
    RoughnessLevel.LIGHT: 1.15,
    RoughnessLevel.MODERATE: 1.35,
    RoughnessLevel.HEAVY: 1.6,
}


@dataclass(frozen=True)
class WorldParams:
    """Knobs of the ground-truth model; all overridable per experiment."""

    nominal_speed: float = 1.0  # m/s
    noise_cv: float = 0.02  # coefficient of variation of traversal noise
    beta: float = 0.5  # weight of the discharge tail
    power: float = 3.0  # sharpness of the discharge tail
    hump_enabled: bool = False  # early-life rise/fall bump
    hump_height: float = 0.08
    hump_center: float = 0.9
    hump_width: float = 0.05
    roughness: dict = field(
        default_factory=lambda: dict(DEFAULT_ROUGHNESS_MULTIPLIERS)
    )


def battery_factor(soc: float, params: WorldParams = WorldParams()) -> float:
    """Travel-time multiplier as a function of battery state of charge.

    Equals 1.0 at full charge and rises monotonically as charge drains;
    with the optional hump enabled the curve first rises, falls back, then
    rises again toward depletion.
    """
    soc = min(max(soc, 0.0), 1.0)
    factor = 1.0 + params.beta * (1.0 - soc) ** params.power
    if params.hump_enabled:
        z = (soc - params.hump_center) / params.hump_width
        factor += params.hump_height * math.exp(-z * z)
    return factor


@dataclass
class BatteryState:
    soc: float = 1.0
    discharge_per_second: float = 2.5e-4

    def drain(self, seconds: float) -> None:
        self.soc = max(0.0, self.soc - self.discharge_per_second * seconds)


@dataclass
class FloorCondition:
    """Roughness level per floor zone."""

    zone_levels: dict[int, RoughnessLevel]

    @classmethod
    def uniform(
        cls, topo: TopologyMap, level: RoughnessLevel = RoughnessLevel.SMOOTH
    ) -> FloorCondition:
        return cls({zone: level for zone in topo.zone_ids()})

    def level(self, zone_id: int) -> RoughnessLevel:
        return self.zone_levels[zone_id]

    def set_level(self, zone_id: int, level: RoughnessLevel) -> None:
        self.zone_levels[zone_id] = level


class ObservationLog:
    """Per-edge observed travel times, ordered by traversal index k (1-based)."""

    def __init__(self) -> None:
        self._series: dict[tuple[int, int], list[float]] = {}

    def append(self, u: int, v: int, observed_seconds: float) -> None:
        if observed_seconds <= 0:
            raise ValueError(f"observed travel time must be > 0, got {observed_seconds}")
        self._series.setdefault(edge_key(u, v), []).append(observed_seconds)

    def series(self, u: int, v: int) -> tuple[float, ...]:
        return tuple(self._series.get(edge_key(u, v), ()))

    def at(self, u: int, v: int, k: int) -> float | None:
        """Observation at traversal index k (1-based), or None past the end."""
        values = self._series.get(edge_key(u, v), ())
        if 1 <= k <= len(values):
            return values[k - 1]
        return None

    def latest(self, u: int, v: int) -> float | None:
        values = self._series.get(edge_key(u, v))
        return values[-1] if values else None

    def count(self, u: int, v: int) -> int:
        return len(self._series.get(edge_key(u, v), ()))

    def mean(self, u: int, v: int) -> float | None:
        values = self._series.get(edge_key(u, v))
        return math.fsum(values) / len(values) if values else None

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self._series)

    def total_count(self) -> int:
        return sum(len(v) for v in self._series.values())

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["edge_from", "edge_to", "k", "observed_tt_seconds"])
            for (u, v) in self.edges():
                for k, value in enumerate(self._series[(u, v)], start=1):
                    writer.writerow([u, v, k, repr(value)])


@dataclass
class TraversalRecord:
    edge: Edge
    true_seconds: float
    observed_seconds: float


@dataclass
class ExecutionResult:
    records: list[TraversalRecord]
    depleted: bool = False

    @property
    def total_true_seconds(self) -> float:
        return math.fsum(r.true_seconds for r in self.records)


class WorldState:
    """Single-owner mutable world: battery, floor, rng, observation log.

    Concurrent experiments must each own an independent instance (see
    ``clone``); nothing here is shared or locked.
    """

    def __init__(
        self,
        topo: TopologyMap,
        rng_seed: int,
        battery: BatteryState | None = None,
        floor: FloorCondition | None = None,
        params: WorldParams | None = None,
        snr_db: float = math.inf,
    ) -> None:
        self.topo = topo
        self.rng_seed = int(rng_seed)
        self.battery = battery if battery is not None else BatteryState()
        self.floor = floor if floor is not None else FloorCondition.uniform(topo)
        self.params = params if params is not None else WorldParams()
        self.snr_db = snr_db
        self.traversal_count = 0
        self.log = ObservationLog()
        # running sum of squared true travel times per edge, for SNR scaling
        self._signal_sq: dict[tuple[int, int], tuple[int, float]] = {}
        self._obs_rng = np.random.default_rng([self.rng_seed, 0x0B5])

    def clone(self) -> WorldState:
        """Independent deep copy; the clone replays identically from here."""
        return copy.deepcopy(self)

    def base_time(self, edge: Edge) -> float:
        return edge.length / self.params.nominal_speed

    def battery_factor(self) -> float:
        return battery_factor(self.battery.soc, self.params)

    def roughness_multiplier(self, edge: Edge) -> float:
        return self.params.roughness[self.floor.level(edge.zone_id)]

    def signal_rms(self, u: int, v: int) -> float | None:
        entry = self._signal_sq.get(edge_key(u, v))
        if entry is None:
            return None
        count, sumsq = entry
        return math.sqrt(sumsq / count)

    def _track_signal(self, edge: Edge, true_seconds: float) -> None:
        key = edge.key()
        count, sumsq = self._signal_sq.get(key, (0, 0.0))
        self._signal_sq[key] = (count + 1, sumsq + true_seconds * true_seconds)


def true_travel_time(world: WorldState, topo: TopologyMap, edge: Edge) -> float:
    """Ground-truth traversal time of ``edge`` under the current world state.

    Pure in the world state: the multiplicative noise draw is keyed on
    (seed, edge, traversal_count), so repeated calls without mutation return
    the same value.
    """
    if not topo.has_edge(edge.u, edge.v):
        raise KeyError(f"edge ({edge.u},{edge.v}) not in map {topo.name!r}")
    base = world.base_time(edge)
    noise_rng = np.random.default_rng(
        [world.rng_seed, edge.u, edge.v, world.traversal_count]
    )
    eps = noise_rng.normal(0.0, world.params.noise_cv) if world.params.noise_cv > 0 else 0.0
    value = base * world.battery_factor() * world.roughness_multiplier(edge) * (1.0 + eps)
    return max(value, 0.01 * base)


def observe_with_snr(
    true_value: float,
    snr_db: float,
    rng: np.random.Generator,
    signal_rms: float | None = None,
) -> float:
    """Corrupt a true travel time with gaussian noise at the given SNR.

    Noise std is signal_rms * 10^(-snr_db/20); an infinite SNR returns the
    input unchanged. ``signal_rms`` defaults to the true value itself when
    no running RMS is available yet. Output clamped strictly positive.
    """
    if true_value <= 0:
        raise ValueError(f"true_value must be > 0, got {true_value}")
    if math.isinf(snr_db):
        return true_value
    rms = signal_rms if signal_rms is not None else true_value
    sigma = rms * 10.0 ** (-snr_db / 20.0)
    observed = true_value + rng.normal(0.0, sigma)
    return max(observed, 1e-3 * true_value)


def execute_path(world: WorldState, topo: TopologyMap, path) -> ExecutionResult:
    """Drive a planned path through the world, mutating it.

    ``path`` is a PathResult or any ordered sequence of Edge. Each edge is
    timed under the current battery/floor state, the observation (with SNR
    noise, if configured) is appended to the world's log, and the battery
    drains by discharge rate x traversal time. Depletion mid-path stops
    execution and is reported on the result, not raised.
    """
    edges = list(getattr(path, "edges", path))
    if not edges:
        return ExecutionResult(records=[])
    if world.battery.soc <= 0.0:
        raise ValueError("battery depleted before execution started")
    for prev, nxt in zip(edges, edges[1:]):
        if not ({prev.u, prev.v} & {nxt.u, nxt.v}):
            raise ValueError(f"path edges not consecutive: {prev.key()} -> {nxt.key()}")
    records: list[TraversalRecord] = []
    depleted = False
    for edge in edges:
        true_s = true_travel_time(world, topo, edge)
        world._track_signal(edge, true_s)
        observed = observe_with_snr(
            true_s, world.snr_db, world._obs_rng, world.signal_rms(edge.u, edge.v)
        )
        world.log.append(edge.u, edge.v, observed)
        world.traversal_count += 1
        world.battery.drain(true_s)
        records.append(TraversalRecord(edge, true_s, observed))
        if world.battery.soc <= 0.0:
            depleted = True
            break
    return ExecutionResult(records=records, depleted=depleted)


def generate_observation_table(
    topo: TopologyMap, world_template: WorldState, repeats: int
) -> ObservationLog:
    """Pre-collect per-edge observation sequences indexed k = 1..repeats.

    Every edge gets a fresh battery lifecycle: a clone of the template is
    driven over that single edge repeatedly until the repeat budget or the
    battery runs out. The template itself is never mutated.
    """
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    table = ObservationLog()
    for edge in sorted(topo.edges, key=Edge.key):
        world = world_template.clone()
        world.traversal_count = 0
        # decouple table noise streams from the live world's
        world.rng_seed = int(
            np.random.SeedSequence([world_template.rng_seed, 0x7AB1E]).generate_state(1)[0]
        )
        world._obs_rng = np.random.default_rng(
            [world.rng_seed, 0x7AB1E, edge.u, edge.v]
        )
        for _ in range(repeats):
            if world.battery.soc <= 0.0:
                break
            true_s = true_travel_time(world, topo, edge)
            world._track_signal(edge, true_s)
            observed = observe_with_snr(
                true_s, world.snr_db, world._obs_rng, world.signal_rms(edge.u, edge.v)
            )
            table.append(edge.u, edge.v, observed)
            world.traversal_count += 1
            world.battery.drain(true_s)
    return table
