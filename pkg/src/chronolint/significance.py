"""Weighted per-change significance over a delta series.

Each weightable category's deltas are first oriented so that positive means
"got worse" (a coverage drop is a worsening, so coverage deltas flip sign),
then normalized by the category's maximum absolute delta across the run.
The score of a change is the weight-sum of these normalized values, which
pins every score into [-1, 1] and makes re-weighting a cheap, purely
in-memory what-if.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MissingCategoryError, WeightError
from .metrics import COVERAGE, DELTA_CATEGORIES, DeltaSeries

WEIGHT_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class WeightProfile:
    """Weights over the five main categories; missing keys mean zero."""

    weights: dict[str, float]

    def __post_init__(self):
        for category, value in self.weights.items():
            if category not in DELTA_CATEGORIES:
                raise WeightError(f"unknown category {category!r}")
            if not (0.0 <= value <= 1.0):
                raise WeightError(f"weight for {category} must be in [0, 1], got {value}")
        total = sum(self.weights.values())
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise WeightError(f"weights must sum to 1, got {total!r}")

    def get(self, category: str) -> float:
        return self.weights.get(category, 0.0)


@dataclass(frozen=True)
class SignificanceSeries:
    scores: list[float]
    contributions: dict[str, list[float]]
    ranking: list[int]  # snapshot indices, best (most worsening) first
    weights: dict[str, float]  # effective weights after any renormalization


def parse_weights(spec: str) -> dict[str, float]:
    """Parse `CATEGORY=value,CATEGORY=value` pairs."""
    weights: dict[str, float] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise WeightError(f"expected CATEGORY=value, got {part!r}")
        key = key.strip().upper()
        if key in weights:
            raise WeightError(f"category {key} given twice")
        try:
            weights[key] = float(value)
        except ValueError as exc:
            raise WeightError(f"bad weight value {value!r} for {key}") from exc
    if not weights:
        raise WeightError("no weights given")
    return weights


def weighted_significance(
    deltas: DeltaSeries, profile: WeightProfile, renormalize: bool = False
) -> SignificanceSeries:
    """Score every change in the run under *profile*.

    Categories absent from the run's data (no coverage anywhere, or an
    all-gaps run) may not carry weight; with *renormalize* their weight is
    zeroed and the remainder rescaled to sum 1 instead of failing.
    """
    effective = {c: profile.get(c) for c in DELTA_CATEGORIES}
    missing = [c for c in DELTA_CATEGORIES if effective[c] > 0.0 and not deltas.present.get(c)]
    if missing:
        if not renormalize:
            raise MissingCategoryError(
                "no data in this run for weighted categories: " + ", ".join(sorted(missing))
            )
        for category in missing:
            effective[category] = 0.0
        remainder = sum(effective.values())
        if remainder <= 0.0:
            raise MissingCategoryError(
                "all weighted categories lack data; nothing left to renormalize"
            )
        effective = {c: w / remainder for c, w in effective.items()}

    contributions: dict[str, list[float]] = {}
    for category in DELTA_CATEGORIES:
        oriented = _oriented(deltas.deltas[category], category)
        max_magnitude = max((abs(d) for d in oriented if d is not None), default=0.0)
        weight = effective[category]
        if max_magnitude > 0.0:
            contributions[category] = [
                weight * (d / max_magnitude) if d is not None else 0.0 for d in oriented
            ]
        else:
            contributions[category] = [0.0] * deltas.length

    scores = [
        sum(contributions[c][i] for c in DELTA_CATEGORIES) for i in range(deltas.length)
    ]
    ranking = sorted(range(deltas.length), key=lambda i: (-scores[i], i))
    return SignificanceSeries(
        scores=scores, contributions=contributions, ranking=ranking, weights=effective
    )


def rank_hotspots(
    series: SignificanceSeries, top_n: int, absolute: bool = False
) -> list[tuple[int, float, dict[str, float]]]:
    """Top changes by score (or |score|), older snapshot first on ties."""
    if top_n < 1:
        raise ValueError("top_n must be positive")
    if absolute:
        order = sorted(range(len(series.scores)), key=lambda i: (-abs(series.scores[i]), i))
    else:
        order = series.ranking
    return [
        (i, series.scores[i], {c: series.contributions[c][i] for c in DELTA_CATEGORIES})
        for i in order[:top_n]
    ]


def _oriented(values: list[float | None], category: str) -> list[float | None]:
    if category != COVERAGE:
        return values
    return [None if v is None else -v for v in values]
