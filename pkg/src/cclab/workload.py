"""Seeded synthetic observation and query traces.

Each attribute publishes readings at jittered intervals around its own mean;
queries arrive at jittered intervals and each names ``attributes_per_query``
attributes. Every random stream (queries, and one per attribute) is spawned
from a single ``SeedSequence``, so a trace is fully determined by its config.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from .errors import ConfigInvalid, IoFailure
from .events import Observation

DEFAULT_SEED = 20231107
SELECTIONS = ("top", "weighted", "mixed")


@dataclass(frozen=True)
class AttributeProfile:
    attribute: str
    update_interval_mean: float
    update_interval_jitter: float = 0.5
    # ("uniform", lo, hi) | ("choice", [values...]) | ("bool", p_true)
    initial_value: tuple = ("uniform", 0.0, 1.0)
    popularity: float = 1.0

    def validate(self):
        if not self.attribute:
            raise ConfigInvalid("attribute id must be non-empty")
        if not self.update_interval_mean > 0:
            raise ConfigInvalid(f"{self.attribute}: update_interval_mean must be > 0")
        if not 0 <= self.update_interval_jitter < 1:
            raise ConfigInvalid(f"{self.attribute}: update_interval_jitter must lie in [0, 1)")
        if not self.popularity > 0:
            raise ConfigInvalid(f"{self.attribute}: popularity must be > 0")


@dataclass(frozen=True)
class WorkloadConfig:
    """Trace parameters.

    ``selection`` controls which attributes a query names:

    * ``"top"``: always the ``focus`` attributes (the top-ranked ones);
    * ``"weighted"``: a popularity-weighted sample of all attributes;
    * ``"mixed"``: the focus set with probability ``focus_share``, otherwise
      a popularity-weighted sample of the non-focus attributes.

    ``focus`` defaults to the first ``attributes_per_query`` profiles; the
    harness replaces it with the DSA top-k.
    """

    profiles: tuple[AttributeProfile, ...]
    num_queries: int = 500
    query_interarrival_mean: float = 3.0
    query_interarrival_jitter: float = 0.5
    attributes_per_query: int = 4
    seed: int = DEFAULT_SEED
    duration_cap: float | None = None
    focus: tuple[str, ...] | None = None
    selection: str = "top"
    focus_share: float = 1.0

    @property
    def attributes(self) -> list[str]:
        return [p.attribute for p in self.profiles]

    def resolved_focus(self) -> tuple[str, ...]:
        if self.focus is not None:
            return tuple(self.focus)[: self.attributes_per_query]
        return tuple(self.attributes[: self.attributes_per_query])

    def validate(self):
        if not self.profiles:
            raise ConfigInvalid("workload needs at least one attribute profile")
        for p in self.profiles:
            p.validate()
        names = self.attributes
        if len(set(names)) != len(names):
            raise ConfigInvalid("attribute ids must be unique")
        if self.num_queries < 1:
            raise ConfigInvalid(f"num_queries must be >= 1, got {self.num_queries}")
        if not 1 <= self.attributes_per_query <= len(names):
            raise ConfigInvalid(
                f"attributes_per_query must lie in 1..{len(names)}, got {self.attributes_per_query}"
            )
        if not self.query_interarrival_mean > 0:
            raise ConfigInvalid("query_interarrival_mean must be > 0")
        if not 0 <= self.query_interarrival_jitter < 1:
            raise ConfigInvalid("query_interarrival_jitter must lie in [0, 1)")
        if self.selection not in SELECTIONS:
            raise ConfigInvalid(f"selection must be one of {SELECTIONS}, got {self.selection!r}")
        focus = self.resolved_focus()
        if len(focus) < self.attributes_per_query or not set(focus) <= set(names):
            raise ConfigInvalid(f"focus {list(focus)} must name {self.attributes_per_query} known attributes")
        if not 0 <= self.focus_share <= 1:
            raise ConfigInvalid("focus_share must lie in [0, 1]")
        if self.selection == "mixed" and len(names) - len(focus) < self.attributes_per_query:
            raise ConfigInvalid("mixed selection needs at least attributes_per_query non-focus attributes")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["profiles"] = [asdict(p) for p in self.profiles]
        d["focus"] = list(self.focus) if self.focus is not None else None
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "WorkloadConfig":
        data = dict(data)
        try:
            profiles = tuple(
                AttributeProfile(**{**p, "initial_value": tuple(p.get("initial_value", ("uniform", 0.0, 1.0)))})
                for p in data.pop("profiles")
            )
            if data.get("focus") is not None:
                data["focus"] = tuple(data["focus"])
            return cls(profiles=profiles, **data)
        except (KeyError, TypeError) as exc:
            raise ConfigInvalid(f"malformed workload config: {exc}") from exc


@dataclass(frozen=True)
class ObservationEvent:
    time: float
    observation: Observation

    def to_dict(self) -> dict:
        o = self.observation
        return {"time": self.time, "kind": "observation", "attribute": o.attribute, "value": o.value}


@dataclass(frozen=True)
class QueryEvent:
    time: float
    attributes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"time": self.time, "kind": "query", "attributes": list(self.attributes)}


TraceEvent = Union[ObservationEvent, QueryEvent]


def _jittered(rng, mean, jitter, size):
    return mean * rng.uniform(1.0 - jitter, 1.0 + jitter, size=size)


def _draw_value(rng, descriptor):
    kind = descriptor[0]
    if kind == "uniform":
        return round(float(rng.uniform(descriptor[1], descriptor[2])), 3)
    if kind == "choice":
        options = descriptor[1]
        return options[int(rng.integers(len(options)))]
    if kind == "bool":
        return bool(rng.random() < descriptor[1])
    raise ConfigInvalid(f"unknown value descriptor {descriptor!r}")


def _weighted_sample(rng, names, weights, k):
    p = np.asarray(weights, dtype=float)
    idx = rng.choice(len(names), size=k, replace=False, p=p / p.sum())
    return tuple(names[i] for i in sorted(idx))


def generate_trace(config: WorkloadConfig) -> list[TraceEvent]:
    """Time-ordered trace; observations precede queries at equal times."""
    config.validate()
    seeds = np.random.SeedSequence(config.seed).spawn(len(config.profiles) + 1)
    qrng = np.random.default_rng(seeds[0])

    gaps = _jittered(qrng, config.query_interarrival_mean, config.query_interarrival_jitter, config.num_queries)
    times = np.cumsum(gaps)
    horizon = float(times[-1])
    if config.duration_cap is not None and horizon > config.duration_cap:
        raise ConfigInvalid(
            f"{config.num_queries} queries need {horizon:.1f} min, beyond duration cap {config.duration_cap}"
        )

    focus = config.resolved_focus()
    names = config.attributes
    pops = [p.popularity for p in config.profiles]
    others = [(n, w) for n, w in zip(names, pops) if n not in focus]
    queries = []
    for t in times:
        if config.selection == "top":
            attrs = focus
        elif config.selection == "weighted":
            attrs = _weighted_sample(qrng, names, pops, config.attributes_per_query)
        elif qrng.random() < config.focus_share:
            attrs = focus
        else:
            attrs = _weighted_sample(
                qrng, [n for n, _ in others], [w for _, w in others], config.attributes_per_query
            )
        queries.append(QueryEvent(float(t), tuple(attrs)))

    keyed = []
    for idx, (profile, seed) in enumerate(zip(config.profiles, seeds[1:])):
        rng = np.random.default_rng(seed)
        mean, jitter = profile.update_interval_mean, profile.update_interval_jitter
        t = float(rng.uniform(0.0, mean))
        seq = 0
        while t <= horizon:
            obs = Observation(profile.attribute, _draw_value(rng, profile.initial_value), t)
            keyed.append(((t, 0, idx, seq), ObservationEvent(t, obs)))
            t += float(_jittered(rng, mean, jitter, None))
            seq += 1
    keyed.extend(((q.time, 1, 0, i), q) for i, q in enumerate(queries))
    keyed.sort(key=lambda kv: kv[0])
    return [ev for _, ev in keyed]


def count_lookups(trace: Sequence[TraceEvent]) -> int:
    return sum(len(ev.attributes) for ev in trace if isinstance(ev, QueryEvent))


def trace_to_jsonl(trace: Sequence[TraceEvent]) -> str:
    return "".join(json.dumps(ev.to_dict()) + "\n" for ev in trace)


def write_trace(trace: Sequence[TraceEvent], path) -> None:
    try:
        Path(path).write_text(trace_to_jsonl(trace))
    except OSError as exc:
        raise IoFailure(f"cannot write trace {path}: {exc}") from exc


def read_trace(path) -> list[TraceEvent]:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise IoFailure(f"cannot read trace {path}: {exc}") from exc
    trace: list[TraceEvent] = []
    last = -np.inf
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            d = json.loads(line)
            t = float(d["time"])
            if d["kind"] == "observation":
                ev = ObservationEvent(t, Observation(d["attribute"], d.get("value"), t))
            elif d["kind"] == "query":
                ev = QueryEvent(t, tuple(d["attributes"]))
            else:
                raise ConfigInvalid(f"{path}:{lineno}: unknown event kind {d['kind']!r}")
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigInvalid(f"{path}:{lineno}: malformed trace event: {exc}") from exc
        if t < last:
            raise ConfigInvalid(f"{path}:{lineno}: trace is not time-ordered")
        last = t
        trace.append(ev)
    return trace


# -- shipped scenarios ------------------------------------------------------

# (attribute, mean update interval in minutes, jitter, value descriptor)
_ROAD_WORK = (
    ("speed", 8.0, 0.5, ("uniform", 0.0, 110.0)),
    ("weather", 45.0, 0.5, ("choice", ["clear", "rain", "fog", "wind"])),
    ("traffic_density", 12.0, 0.5, ("uniform", 0.0, 1.0)),
    ("road_quality", 60.0, 0.5, ("uniform", 0.0, 1.0)),
    ("roadblock_presence", 10.0, 0.5, ("bool", 0.3)),
    ("machinery_detected", 11.0, 0.5, ("bool", 0.4)),
    ("dust_level", 25.0, 0.5, ("uniform", 0.0, 500.0)),
    ("lane_closures", 60.0, 0.5, ("choice", [0, 1, 2])),
)

# attributes other applications on the same platform ask for
_SHARED_CMP = (
    ("parking_occupancy", 8.0, 0.5, ("uniform", 0.0, 1.0)),
    ("air_quality", 30.0, 0.5, ("uniform", 0.0, 300.0)),
    ("noise_level", 10.0, 0.5, ("uniform", 30.0, 110.0)),
    ("pedestrian_count", 6.0, 0.5, ("uniform", 0.0, 200.0)),
    ("ambient_temperature", 40.0, 0.5, ("uniform", -5.0, 40.0)),
    ("ev_charger_status", 12.0, 0.5, ("choice", ["free", "busy", "offline"])),
    ("bus_eta", 5.0, 0.5, ("uniform", 0.0, 30.0)),
    ("bridge_status", 50.0, 0.5, ("choice", ["open", "lifted"])),
    ("visibility", 35.0, 0.5, ("uniform", 0.0, 10.0)),
    ("toll_status", 55.0, 0.5, ("choice", ["open", "closed"])),
    ("fuel_price", 90.0, 0.5, ("uniform", 1.5, 2.5)),
    ("cyclist_count", 9.0, 0.5, ("uniform", 0.0, 60.0)),
)

_SHARED_POPULARITY = (6.0, 4.0, 3.0, 2.5, 2.0, 1.6, 1.3, 1.0, 0.8, 0.6, 0.5, 0.4)


def _profiles(rows, popularity=None):
    pops = popularity or (1.0,) * len(rows)
    return tuple(
        AttributeProfile(name, mean, jitter, value, pop)
        for (name, mean, jitter, value), pop in zip(rows, pops)
    )


def scenario_road_work() -> WorkloadConfig:
    """Eight road-work attributes, queries for the top four ranked ones."""
    return WorkloadConfig(profiles=_profiles(_ROAD_WORK))


def scenario_shared_cmp() -> WorkloadConfig:
    """Road work sharing the platform with twelve attributes of other
    applications' contexts; a third of the queries are road-work queries."""
    road = _profiles(_ROAD_WORK, (1.0,) * len(_ROAD_WORK))
    other = _profiles(_SHARED_CMP, _SHARED_POPULARITY)
    return WorkloadConfig(profiles=road + other, selection="mixed", focus_share=1 / 3)


SCENARIOS = {"road_work": scenario_road_work, "shared_cmp": scenario_shared_cmp}


def scenario(name: str) -> WorkloadConfig:
    try:
        return SCENARIOS[name]()
    except KeyError:
        raise ConfigInvalid(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}") from None


def data_path(name: str) -> Path:
    return Path(str(resources.files("cclab") / "data" / name))


def roadwork_judgments_path() -> Path:
    return data_path("roadwork.json")


def with_overrides(config: WorkloadConfig, **overrides: Any) -> WorkloadConfig:
    known = {k: v for k, v in overrides.items() if v is not None}
    if "focus" in known:
        known["focus"] = tuple(known["focus"])
    try:
        return replace(config, **known)
    except TypeError as exc:
        raise ConfigInvalid(f"unknown workload field: {exc}") from exc
