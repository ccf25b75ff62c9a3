"""Weekly utilization series: domain types and the preprocessing pipeline.

Raw 10-minute power-quality measurements are turned into gap-free weekly
series in four steps:

1. ``aggregate_weekly`` - 95th percentile per full calendar week (Monday to
   Sunday, UTC), a week being valid only if at least 95 % of its 1008
   10-minute samples are present.
2. ``fill_gaps`` - carry the most recent valid weekly value forward over
   gaps of at most 10 weeks; series with more than 20 % missing weeks or an
   unfillable gap are rejected (not an error: rejection is a normal outcome
   of a corpus run).
3. ``normalize`` - divide by the planning level, yielding utilization in
   percent of the limit.
4. ``split_train_test`` - fixed 105-week training / 52-week test geometry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timedelta, timezone
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError

SAMPLES_PER_WEEK = 1008  # 10-minute intervals in 7 days
MIN_SAMPLES_PER_WEEK = 958  # ceil(0.95 * 1008)
MAX_GAP_FRACTION = 0.20
MAX_FILL_DISTANCE_WEEKS = 10
TRAIN_WEEKS = 105
TEST_WEEKS = 52

WeekId = tuple[int, int]  # (ISO year, ISO week)


def week_start(week: WeekId) -> date:
    """Monday of the given ISO week."""
    return date.fromisocalendar(week[0], week[1], 1)


def add_weeks(week: WeekId, n: int) -> WeekId:
    d = week_start(week) + timedelta(weeks=n)
    iso = d.isocalendar()
    return (iso[0], iso[1])


def week_of(ts: datetime) -> WeekId:
    iso = ts.date().isocalendar()
    return (iso[0], iso[1])


@dataclass(frozen=True)
class SeriesKey:
    """Decomposed series identifier: ``site:parameter:voltage_kv``."""

    site: str
    parameter: str
    voltage_level: str

    def __str__(self) -> str:
        return f"{self.site}:{self.parameter}:{self.voltage_level}"

    @classmethod
    def try_parse(cls, series_id: str) -> Optional["SeriesKey"]:
        parts = series_id.split(":")
        if len(parts) != 3 or not all(parts):
            return None
        return cls(parts[0], parts[1], parts[2])


@dataclass
class RawSeries:
    """Timestamped 10-minute measurements for one (site, parameter) pair.

    Timestamps must be strictly increasing, unique and aligned to the
    10-minute grid; values are nonnegative and in the parameter's native
    unit. Naive timestamps are taken as UTC.
    """

    series_id: str
    samples: list[tuple[datetime, float]]

    def __post_init__(self) -> None:
        normalized = []
        prev: Optional[datetime] = None
        for ts, value in self.samples:
            if ts.tzinfo is None:
                ts = ts.replace(tzinfo=timezone.utc)
            else:
                ts = ts.astimezone(timezone.utc)
            if ts.minute % 10 != 0 or ts.second != 0 or ts.microsecond != 0:
                raise DataError(
                    f"{self.series_id}: timestamp {ts.isoformat()} is not on the 10-minute grid"
                )
            if prev is not None and ts <= prev:
                if ts == prev:
                    raise DataError(f"{self.series_id}: duplicate timestamp {ts.isoformat()}")
                raise DataError(f"{self.series_id}: timestamps not strictly increasing at {ts.isoformat()}")
            if not np.isfinite(value) or value < 0:
                raise DataError(f"{self.series_id}: invalid value {value!r} at {ts.isoformat()}")
            normalized.append((ts, float(value)))
            prev = ts
        self.samples = normalized


@dataclass(frozen=True)
class PlanningLevel:
    """Operator limit for one PQ parameter at one voltage level (a divisor)."""

    parameter: str
    voltage_level: str
    level: float

    def __post_init__(self) -> None:
        if not self.level > 0:
            raise ConfigError(
                f"planning level for ({self.parameter}, {self.voltage_level}) must be > 0, got {self.level}"
            )


@dataclass(frozen=True)
class WeeklyAggregate:
    """One calendar week: 95th percentile (if the week is valid) and sample count."""

    week: WeekId
    p95: Optional[float]
    present_count: int

    def __post_init__(self) -> None:
        if not 0 <= self.present_count <= SAMPLES_PER_WEEK:
            raise DataError(f"present_count {self.present_count} outside [0, {SAMPLES_PER_WEEK}]")


@dataclass
class WeeklySeries:
    """Gap-free, ISO-week-indexed series; values in percent of planning level
    after :func:`normalize`, in native units before."""

    series_id: str
    start_week: WeekId
    values: np.ndarray
    filled_flags: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        if self.filled_flags is None:
            self.filled_flags = np.zeros(len(self.values), dtype=bool)
        self.filled_flags = np.asarray(self.filled_flags, dtype=bool)
        if self.values.ndim != 1:
            raise DataError(f"{self.series_id}: values must be one-dimensional")
        if len(self.filled_flags) != len(self.values):
            raise DataError(f"{self.series_id}: filled_flags length mismatch")
        if not np.all(np.isfinite(self.values)):
            raise DataError(f"{self.series_id}: non-finite weekly value")
        if np.any(self.values < 0):
            raise DataError(f"{self.series_id}: negative weekly value")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def filled_fraction(self) -> float:
        return float(np.mean(self.filled_flags)) if len(self) else 0.0

    def weeks(self) -> list[WeekId]:
        return [add_weeks(self.start_week, i) for i in range(len(self))]


class RejectionReason(str, Enum):
    TOO_MANY_GAPS = "too-many-gaps"
    UNFILLABLE_GAP = "unfillable-gap"


@dataclass(frozen=True)
class Rejection:
    """A series dropped by preprocessing, with a machine-readable reason."""

    series_id: str
    reason: RejectionReason


def weekly_p95(values: Sequence[float]) -> float:
    """95th percentile by linear interpolation between order statistics."""
    return float(np.percentile(np.asarray(values, dtype=float), 95))


def aggregate_weekly(raw: RawSeries) -> list[WeeklyAggregate]:
    """Aggregate 10-minute samples to weekly 95th percentiles.

    Only full calendar weeks (Monday 00:00 to Sunday 24:00 UTC) inside the
    data span are emitted. A week's percentile is present only when at
    least ``MIN_SAMPLES_PER_WEEK`` samples are available; the percentile
    estimator is linear interpolation between order statistics.
    """
    if not raw.samples:
        raise DataError(f"{raw.series_id}: no data")

    first_ts = raw.samples[0][0]
    last_ts = raw.samples[-1][0]

    # First Monday 00:00 at or after the first sample.
    first_day = first_ts.date()
    monday = first_day - timedelta(days=first_day.weekday())
    span_start = datetime.combine(monday, datetime.min.time(), tzinfo=timezone.utc)
    if span_start < first_ts:
        span_start += timedelta(weeks=1)

    # Last sample covers [t, t + 10 min); the final full week must end by then.
    span_end_limit = last_ts + timedelta(minutes=10)
    n_weeks = int((span_end_limit - span_start).days // 7)
    if n_weeks < 1:
        raise DataError(f"{raw.series_id}: span too short (no full calendar week)")

    buckets: list[list[float]] = [[] for _ in range(n_weeks)]
    for ts, value in raw.samples:
        offset = ts - span_start
        if offset < timedelta(0):
            continue
        idx = int(offset.days // 7)
        if idx >= n_weeks:
            continue
        buckets[idx].append(value)

    aggs = []
    for i, bucket in enumerate(buckets):
        week = week_of(span_start + timedelta(weeks=i))
        count = len(bucket)
        p95 = weekly_p95(bucket) if count >= MIN_SAMPLES_PER_WEEK else None
        aggs.append(WeeklyAggregate(week=week, p95=p95, present_count=count))
    return aggs


def fill_gaps(series_id: str, aggs: Sequence[WeeklyAggregate]) -> WeeklySeries | Rejection:
    """Fill missing weeks by carrying the nearest preceding valid value forward.

    A gap week takes the most recent *originally present* percentile at most
    ``MAX_FILL_DISTANCE_WEEKS`` back. Returns a :class:`Rejection` when any
    gap cannot be filled (including leading gaps) or when more than 20 % of
    weeks are missing.
    """
    if not aggs:
        raise DataError(f"{series_id}: no data")
    for prev, cur in zip(aggs, aggs[1:]):
        if cur.week != add_weeks(prev.week, 1):
            raise DataError(f"{series_id}: weekly aggregates not contiguous at {cur.week}")

    n = len(aggs)
    absent = [i for i, a in enumerate(aggs) if a.p95 is None]

    last_present = -1
    values = np.empty(n, dtype=float)
    flags = np.zeros(n, dtype=bool)
    for i, agg in enumerate(aggs):
        if agg.p95 is not None:
            values[i] = agg.p95
            last_present = i
            continue
        if last_present < 0 or i - last_present > MAX_FILL_DISTANCE_WEEKS:
            return Rejection(series_id, RejectionReason.UNFILLABLE_GAP)
        values[i] = aggs[last_present].p95  # type: ignore[assignment]
        flags[i] = True

    if len(absent) / n > MAX_GAP_FRACTION:
        return Rejection(series_id, RejectionReason.TOO_MANY_GAPS)

    return WeeklySeries(series_id=series_id, start_week=aggs[0].week, values=values, filled_flags=flags)


def normalize(series: WeeklySeries, pl: PlanningLevel) -> WeeklySeries:
    """Express a native-unit weekly series as percent of its planning level.

    When the series id encodes parameter and voltage level
    (``site:parameter:voltage``), they must match the planning level.
    """
    key = SeriesKey.try_parse(series.series_id)
    if key is not None and (key.parameter != pl.parameter or key.voltage_level != pl.voltage_level):
        raise ConfigError(
            f"{series.series_id}: planning level is for ({pl.parameter}, {pl.voltage_level})"
        )
    return WeeklySeries(
        series_id=series.series_id,
        start_week=series.start_week,
        values=100.0 * series.values / pl.level,
        filled_flags=series.filled_flags.copy(),
    )


def split_train_test(series: WeeklySeries) -> tuple[WeeklySeries, WeeklySeries]:
    """First 105 weeks for training, next 52 for testing; the rest is ignored
    so every series is evaluated on an identical geometry."""
    needed = TRAIN_WEEKS + TEST_WEEKS
    if len(series) < needed:
        raise DataError(
            f"{series.series_id}: insufficient history ({len(series)} weeks, need {needed})"
        )
    train = WeeklySeries(
        series_id=series.series_id,
        start_week=series.start_week,
        values=series.values[:TRAIN_WEEKS].copy(),
        filled_flags=series.filled_flags[:TRAIN_WEEKS].copy(),
    )
    test = WeeklySeries(
        series_id=series.series_id,
        start_week=add_weeks(series.start_week, TRAIN_WEEKS),
        values=series.values[TRAIN_WEEKS:needed].copy(),
        filled_flags=series.filled_flags[TRAIN_WEEKS:needed].copy(),
    )
    return train, test
