"""Pairwise-comparison weighting and ranking of context attributes.

A context (e.g. "road work") is treated as the goal of a one-level AHP
hierarchy whose criteria are its context attributes. Judgments are turned
into a reciprocal matrix, the principal eigenvector gives the weights, and a
consistency-ratio gate rejects contradictory judgment sets before any
ranking is produced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._random_index import RANDOM_INDEX
from .errors import (
    ConfigInvalid,
    DimensionMismatch,
    DuplicatePair,
    InconsistentJudgments,
    IoFailure,
    MissingPair,
    NonConvergence,
    NonPositiveJudgment,
    TooFewAttributes,
    UnsupportedOrder,
)

DEFAULT_CR_THRESHOLD = 0.10
RECIPROCAL_RTOL = 1e-9
CI_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ComparisonMatrix:
    """Positive reciprocal matrix; ``entries[i, j]`` is how much more
    important ``attributes[i]`` is than ``attributes[j]``."""

    attributes: tuple[str, ...]
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        n = len(self.attributes)
        if entries.shape != (n, n):
            raise DimensionMismatch(f"matrix shape {entries.shape} does not match {n} attributes")
        if n < 2:
            raise TooFewAttributes(f"need at least 2 attributes, got {n}")
        if len(set(self.attributes)) != n or not all(self.attributes):
            raise ConfigInvalid("attribute ids must be non-empty and unique")
        if not np.all(entries > 0):
            raise NonPositiveJudgment("all matrix entries must be strictly positive")
        if not np.allclose(np.diag(entries), 1.0, rtol=0, atol=RECIPROCAL_RTOL):
            raise ConfigInvalid("diagonal entries must equal 1")
        if not np.allclose(entries * entries.T, 1.0, rtol=RECIPROCAL_RTOL, atol=0):
            raise ConfigInvalid("matrix is not reciprocal")
        entries.setflags(write=False)
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.attributes)

    @classmethod
    def from_weights(cls, attributes: Sequence[str], weights) -> "ComparisonMatrix":
        """Perfectly consistent matrix with ``entries[i, j] = w_i / w_j``."""
        w = np.asarray(weights, dtype=float)
        return cls(tuple(attributes), np.outer(w, 1.0 / w))


@dataclass(frozen=True)
class ConsistencyDiagnostics:
    lambda_max: float
    ci: float
    aci: float
    cr: float
    ri: float
    consistent: bool
    cr_threshold: float = DEFAULT_CR_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "lambda_max": self.lambda_max,
            "ci": self.ci,
            "aci": self.aci,
            "cr": self.cr,
            "ri": self.ri,
            "consistent": self.consistent,
            "cr_threshold": self.cr_threshold,
        }


@dataclass(frozen=True)
class AttributeRanking:
    """Weights, ranks and diagnostics for one judged context.

    ``attributes`` keeps the input order; :meth:`ordered` gives rank order.
    """

    attributes: tuple[str, ...]
    weights: dict[str, float]
    ranks: dict[str, int]
    diagnostics: ConsistencyDiagnostics
    sensitivity: dict[str, float] = field(default_factory=dict)

    def ordered(self) -> list[str]:
        return sorted(self.attributes, key=self.ranks.__getitem__)

    def top(self, k: int) -> list[str]:
        return self.ordered()[:k]

    def to_dict(self) -> dict:
        return {
            "attributes": list(self.attributes),
            "weights": {a: self.weights[a] for a in self.attributes},
            "ranks": {a: self.ranks[a] for a in self.attributes},
            "sensitivity": {a: self.sensitivity[a] for a in self.attributes if a in self.sensitivity},
            "diagnostics": self.diagnostics.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "AttributeRanking":
        return cls(
            attributes=tuple(data["attributes"]),
            weights={k: float(v) for k, v in data["weights"].items()},
            ranks={k: int(v) for k, v in data["ranks"].items()},
            diagnostics=ConsistencyDiagnostics(**data["diagnostics"]),
            sensitivity={k: float(v) for k, v in data.get("sensitivity", {}).items()},
        )

    @classmethod
    def from_weights(cls, attributes: Sequence[str], weights) -> "AttributeRanking":
        """Ranking for externally supplied weights (no judgments behind it)."""
        w = np.asarray(weights, dtype=float)
        w = w / w.sum()
        ranks = rank_criteria(w)
        diag = ConsistencyDiagnostics(float(len(w)), 0.0, 0.0, 0.0, 0.0, True)
        return cls(
            attributes=tuple(attributes),
            weights={a: float(x) for a, x in zip(attributes, w)},
            ranks={a: int(r) for a, r in zip(attributes, ranks)},
            diagnostics=diag,
        )


def build_comparison_matrix(
    attributes: Sequence[str], judgments: Iterable[tuple[int, int, float]]
) -> ComparisonMatrix:
    """Fill a reciprocal matrix from upper-triangle judgments ``(i, j, value)``.

    A judgment given as ``(j, i, v)`` with ``j > i`` is read as ``(i, j, 1/v)``.
    Every unordered pair must be judged exactly once.
    """
    n = len(attributes)
    if n < 2:
        raise TooFewAttributes(f"need at least 2 attributes, got {n}")
    entries = np.ones((n, n))
    seen = set()
    for i, j, value in judgments:
        i, j, value = int(i), int(j), float(value)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise ConfigInvalid(f"judgment ({i}, {j}) does not name two distinct attributes")
        if not value > 0 or not np.isfinite(value):
            raise NonPositiveJudgment(f"judgment ({i}, {j}) has non-positive value {value}")
        if i > j:
            i, j, value = j, i, 1.0 / value
        if (i, j) in seen:
            raise DuplicatePair(f"pair ({attributes[i]}, {attributes[j]}) judged more than once")
        seen.add((i, j))
        entries[i, j] = value
        entries[j, i] = 1.0 / value
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in seen]
    if missing:
        i, j = missing[0]
        raise MissingPair(
            f"{len(missing)} pair(s) not judged, first: ({attributes[i]}, {attributes[j]})"
        )
    return ComparisonMatrix(tuple(attributes), entries)


def calculate_priority_weights(
    matrix: ComparisonMatrix, rtol: float = 1e-10, max_iter: int = 500
) -> np.ndarray:
    """Principal right eigenvector by power iteration, normalised to sum 1."""
    a = matrix.entries
    w = np.full(matrix.n, 1.0 / matrix.n)
    for _ in range(max_iter):
        nxt = a @ w
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - w)) <= rtol * np.max(nxt):
            return nxt
        w = nxt
    raise NonConvergence(f"power iteration did not converge in {max_iter} iterations")


def random_index(n: int) -> float:
    if not 1 <= n <= max(RANDOM_INDEX):
        raise UnsupportedOrder(f"no random index for order {n} (supported: 1..{max(RANDOM_INDEX)})")
    return RANDOM_INDEX[n]


def calculate_consistency(
    matrix: ComparisonMatrix, weights, cr_threshold: float = DEFAULT_CR_THRESHOLD
) -> ConsistencyDiagnostics:
    w = np.asarray(weights, dtype=float)
    n = matrix.n
    if w.shape != (n,):
        raise DimensionMismatch(f"{w.shape[0] if w.ndim else 0} weights for a {n}x{n} matrix")
    lambda_max = float(np.mean((matrix.entries @ w) / w))
    ri = random_index(n)
    if n <= 2:
        ci = 0.0
        cr = 0.0
    else:
        ci = (lambda_max - n) / (n - 1)
        # lambda_max >= n exactly; anything this small is rounding noise
        if abs(ci) <= CI_ATOL:
            ci = 0.0
        cr = ci / ri
    # single-level hierarchy: nothing to average, so ACI is CI
    aci = ci
    return ConsistencyDiagnostics(
        lambda_max=lambda_max,
        ci=ci,
        aci=aci,
        cr=cr,
        ri=ri,
        consistent=bool(cr <= cr_threshold),
        cr_threshold=cr_threshold,
    )


def rank_criteria(weights) -> np.ndarray:
    """1-based ranks, 1 for the largest weight; ties go to the earlier index."""
    w = np.asarray(weights, dtype=float)
    order = sorted(range(len(w)), key=lambda i: (-w[i], i))
    ranks = np.empty(len(w), dtype=int)
    ranks[order] = np.arange(1, len(w) + 1)
    return ranks


def perform_sensitivity_analysis(
    matrix: ComparisonMatrix,
    weights,
    perturbation: float = 0.1,
    trials: int = 100,
    seed: int = 0,
) -> np.ndarray:
    """Fraction of random judgment perturbations that leave each rank unchanged.

    Each trial scales every upper-triangle judgment by an independent factor
    from U[1 - perturbation, 1 + perturbation] (row-major draw order) and
    mirrors the reciprocal below the diagonal.
    """
    if not 0 <= perturbation < 1:
        raise ConfigInvalid(f"perturbation must lie in [0, 1), got {perturbation}")
    if trials < 1:
        raise ConfigInvalid(f"trials must be >= 1, got {trials}")
    base = rank_criteria(weights)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(matrix.n, k=1)
    stable = np.zeros(matrix.n)
    for _ in range(trials):
        factors = rng.uniform(1.0 - perturbation, 1.0 + perturbation, size=iu.size)
        entries = matrix.entries.copy()
        entries[iu, ju] *= factors
        entries[ju, iu] = 1.0 / entries[iu, ju]
        perturbed = ComparisonMatrix(matrix.attributes, entries)
        stable += rank_criteria(calculate_priority_weights(perturbed)) == base
    return stable / trials


def run_dsa(
    attributes: Sequence[str],
    judgments: Iterable[tuple[int, int, float]],
    cr_threshold: float = DEFAULT_CR_THRESHOLD,
    perturbation: float = 0.1,
    trials: int = 100,
    seed: int = 0,
) -> AttributeRanking:
    """Judgments to ranking, refusing judgment sets whose CR exceeds the gate."""
    matrix = build_comparison_matrix(attributes, judgments)
    weights = calculate_priority_weights(matrix)
    diagnostics = calculate_consistency(matrix, weights, cr_threshold)
    if diagnostics.cr > cr_threshold:
        raise InconsistentJudgments(diagnostics)
    # one criteria layer: global weights are the criteria weights
    global_weights = weights
    sensitivity = perform_sensitivity_analysis(matrix, global_weights, perturbation, trials, seed)
    ranks = rank_criteria(global_weights)
    return AttributeRanking(
        attributes=tuple(attributes),
        weights={a: float(w) for a, w in zip(attributes, global_weights)},
        ranks={a: int(r) for a, r in zip(attributes, ranks)},
        diagnostics=diagnostics,
        sensitivity={a: float(s) for a, s in zip(attributes, sensitivity)},
    )


def parse_judgments(doc: dict) -> tuple[list[str], list[tuple[int, int, float]], float]:
    """Turn a judgment document into ``(attributes, index judgments, cr_threshold)``."""
    try:
        attributes = list(doc["attributes"])
        index = {a: i for i, a in enumerate(attributes)}
        judgments = []
        for item in doc["judgments"]:
            if item["a"] not in index or item["b"] not in index:
                raise ConfigInvalid(f"judgment names unknown attribute: {item['a']!r} vs {item['b']!r}")
            judgments.append((index[item["a"]], index[item["b"]], float(item["value"])))
        cr_threshold = float(doc.get("cr_threshold", DEFAULT_CR_THRESHOLD))
    except (KeyError, TypeError) as exc:
        raise ConfigInvalid(f"malformed judgment document: {exc}") from exc
    return attributes, judgments, cr_threshold


def load_judgments(path) -> tuple[list[str], list[tuple[int, int, float]], float]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise IoFailure(f"cannot read judgment file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"judgment file {path} is not valid JSON: {exc}") from exc
    return parse_judgments(doc)


def rank_file(path, **kwargs) -> AttributeRanking:
    attributes, judgments, cr_threshold = load_judgments(path)
    return run_dsa(attributes, judgments, cr_threshold, **kwargs)
