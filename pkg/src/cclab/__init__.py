"""Context freshness caching: AHP attribute ranking, a sliding-window
freshness cache, baseline policies, and a trace-driven experiment harness."""

from .ahp import AttributeRanking, ComparisonMatrix, ConsistencyDiagnostics, rank_file, run_dsa
from .events import CacheEvent, LookupOutcome, Observation
from .freshness_cache import FreshnessCache, FreshnessConfig, new_cache
from .harness import ExperimentSpec, load_spec, run_experiment
from .metrics import SimulationReport, aggregate, compute_report
from .policies import BaselineCache, PolicyKind
from .simulation import simulate
from .workload import WorkloadConfig, generate_trace, scenario_road_work, scenario_shared_cmp

__version__ = "0.1.0"

__all__ = [
    "AttributeRanking",
    "BaselineCache",
    "CacheEvent",
    "ComparisonMatrix",
    "ConsistencyDiagnostics",
    "FreshnessCache",
    "ExperimentSpec",
    "FreshnessConfig",
    "LookupOutcome",
    "Observation",
    "PolicyKind",
    "SimulationReport",
    "WorkloadConfig",
    "aggregate",
    "compute_report",
    "generate_trace",
    "load_spec",
    "new_cache",
    "rank_file",
    "run_dsa",
    "run_experiment",
    "scenario_road_work",
    "scenario_shared_cmp",
    "simulate",
]
