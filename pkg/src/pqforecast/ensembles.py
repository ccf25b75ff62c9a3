"""Ensemble enumeration and forecast combination.

Every subset of two or more of the eight public models is an ensemble
configuration: 247 in total. Names encode the size as a letter (B = 2
members through H = all 8) and a 1-based index within the size class,
assigned in lexicographic order of member indices. Four combination rules
turn member forecasts into an ensemble forecast: pointwise mean, pointwise
median, and two convex weightings where a member's weight is the
normalized reciprocal of its corpus-level mean sMAPE or mean rank.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .models import Forecast, ModelId, PUBLIC_MODELS

SIZE_LETTERS = "BCDEFGH"  # sizes 2..8

_NAME_RE = re.compile(r"^([B-H])(\d{2,})$")


class CombinationMethod(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"
    SMAPE_WEIGHTED = "smape"
    RANK_WEIGHTED = "rank"

    @property
    def needs_phi(self) -> bool:
        return self in (CombinationMethod.SMAPE_WEIGHTED, CombinationMethod.RANK_WEIGHTED)


ALL_METHODS: tuple[CombinationMethod, ...] = tuple(CombinationMethod)


@dataclass(frozen=True)
class EnsembleId:
    """A named ensemble configuration: size letter, index, member models."""

    letter: str
    index: int
    members: tuple[ModelId, ...]

    def __post_init__(self) -> None:
        expected = SIZE_LETTERS[len(self.members) - 2] if 2 <= len(self.members) <= 8 else None
        if expected != self.letter:
            raise ConfigError(f"letter {self.letter} does not match {len(self.members)} members")

    @property
    def name(self) -> str:
        return f"{self.letter}{self.index:02d}"

    def producer(self, method: CombinationMethod) -> str:
        return f"{self.name}:{method.value}"


@lru_cache(maxsize=1)
def enumerate_ensembles() -> tuple[EnsembleId, ...]:
    """All 247 ensemble configurations in canonical order."""
    out = []
    for size in range(2, len(PUBLIC_MODELS) + 1):
        letter = SIZE_LETTERS[size - 2]
        for index, members in enumerate(itertools.combinations(PUBLIC_MODELS, size), start=1):
            out.append(EnsembleId(letter=letter, index=index, members=members))
    return tuple(out)


@lru_cache(maxsize=1)
def _by_name() -> dict[str, EnsembleId]:
    return {e.name: e for e in enumerate_ensembles()}


def ensemble_by_name(name: str) -> EnsembleId:
    ens = _by_name().get(name.upper())
    if ens is None:
        raise ConfigError(f"unknown ensemble name {name!r}")
    return ens


def parse_producer(producer: str) -> Optional[tuple[EnsembleId, CombinationMethod]]:
    """Split an ensemble producer label like ``D28:median``; None for
    individual-model producers."""
    if ":" not in producer:
        return None
    name, _, method_name = producer.partition(":")
    if not _NAME_RE.match(name):
        return None
    try:
        method = CombinationMethod(method_name)
    except ValueError as exc:
        raise ConfigError(f"unknown combination method in {producer!r}") from exc
    return ensemble_by_name(name), method


def compute_weights(phi: Sequence[float]) -> np.ndarray:
    """Normalized reciprocal weights: lower metric values earn larger weights."""
    phi = np.asarray(phi, dtype=float)
    if len(phi) == 0:
        raise DataError("compute_weights: empty metric vector")
    if np.any(phi <= 0) or not np.all(np.isfinite(phi)):
        raise DataError("compute_weights: metric values must be positive and finite")
    inv = 1.0 / phi
    return inv / inv.sum()


def combine(
    forecasts: Sequence[Forecast],
    method: CombinationMethod,
    phi: Optional[Sequence[float]] = None,
    producer: Optional[str] = None,
) -> Forecast:
    """Combine member forecasts pointwise into one ensemble forecast."""
    if len(forecasts) < 2:
        raise DataError("combine: need at least 2 member forecasts")
    series_ids = {f.series_id for f in forecasts}
    horizons = {f.horizon for f in forecasts}
    if len(series_ids) != 1 or len(horizons) != 1:
        raise DataError(f"combine: mismatched series/horizon across members: {sorted(series_ids)}")
    if method.needs_phi and phi is None:
        raise DataError(f"combine: method {method.value} requires phi values")

    stacked = np.vstack([f.values for f in forecasts])
    if method is CombinationMethod.MEAN:
        values = stacked.mean(axis=0)
    elif method is CombinationMethod.MEDIAN:
        values = np.median(stacked, axis=0)
    else:
        if len(phi) != len(forecasts):
            raise DataError(f"combine: {len(phi)} phi values for {len(forecasts)} members")
        values = compute_weights(phi) @ stacked

    return Forecast(
        series_id=forecasts[0].series_id,
        producer=producer or f"ensemble:{method.value}",
        values=values,
        horizon=forecasts[0].horizon,
    )
