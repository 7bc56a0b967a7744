"""Scores, per-survey medians, cross-survey averages and comparison deltas.

Medians are exact :class:`~fractions.Fraction` values; averages are rounded
half away from zero to one decimal and carried as :class:`~decimal.Decimal`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .domain import REPORTED, HealthStatus, ParameterKind
from .errors import ValidationError


def hs_to_score(hs: HealthStatus) -> int:
    return int(HealthStatus(hs))


@dataclass(frozen=True)
class ScoreRow:
    environment_id: str
    position: str
    scores: Mapping  # ParameterKind -> int, or None when missing

    def __getitem__(self, param):
        return self.scores.get(param)


@dataclass(frozen=True)
class ScoreTable:
    params: tuple = REPORTED
    rows: tuple = ()

    def __post_init__(self):
        for r in self.rows:
            for p in self.params:
                s = r.scores.get(p)
                if s is not None and s not in (1, 2, 3, 4, 5):
                    raise ValidationError(f"score {s!r} outside 1..5")

    def column(self, param: ParameterKind) -> list:
        return [r.scores.get(param) for r in self.rows]

    def __len__(self):
        return len(self.rows)


def survey_scores(survey, results: Sequence, params: tuple = REPORTED) -> ScoreTable:
    """One score row per measurement record; ``results`` aligns with ``survey.records``."""
    if len(results) != len(survey.records):
        raise ValidationError(
            f"{len(results)} classification results for {len(survey.records)} records"
        )
    rows = []
    for rec, res in zip(survey.records, results):
        scores = {}
        for p in params:
            c = res.get(p)
            scores[p] = None if c is None else hs_to_score(c.status)
        rows.append(ScoreRow(rec.environment_id, rec.position.value, scores))
    return ScoreTable(tuple(params), tuple(rows))


def median(values) -> Optional[Fraction]:
    """Median of the present values; mean of the two middle ones for even counts."""
    xs = sorted(Fraction(v) for v in values if v is not None)
    if not xs:
        return None
    mid = len(xs) // 2
    if len(xs) % 2:
        return xs[mid]
    return (xs[mid - 1] + xs[mid]) / 2


@dataclass(frozen=True)
class MedianVector:
    values: Mapping  # ParameterKind -> Fraction, or None when absent
    counts: Mapping = field(default_factory=dict)

    @property
    def params(self) -> tuple:
        return tuple(self.values)

    def __getitem__(self, param):
        return self.values.get(param)


def median_by_parameter(table: ScoreTable) -> MedianVector:
    values, counts = {}, {}
    for p in table.params:
        col = table.column(p)
        values[p] = median(col)
        counts[p] = sum(v is not None for v in col)
    return MedianVector(values, counts)


def round_half_away(x: Fraction, places: int = 1) -> Decimal:
    scale = 10 ** places
    q = abs(Fraction(x)) * scale
    n = math.floor(q + Fraction(1, 2))
    if x < 0:
        n = -n
    return Decimal(n).scaleb(-places)


@dataclass(frozen=True)
class AverageVector:
    values: Mapping  # ParameterKind -> Decimal (one place), or None when absent

    @property
    def params(self) -> tuple:
        return tuple(self.values)

    def __getitem__(self, param):
        return self.values.get(param)


def _check_axes(vectors) -> tuple:
    params = vectors[0].params
    for v in vectors[1:]:
        if v.params != params:
            raise ValidationError(
                "parameter sets differ: "
                f"{[p.token for p in params]} vs {[p.token for p in v.params]}"
            )
    return params


def average_across(medians: Sequence[MedianVector]) -> AverageVector:
    medians = list(medians)
    if not medians:
        raise ValidationError("average_across needs at least one median vector")
    params = _check_axes(medians)
    out = {}
    for p in params:
        present = [m[p] for m in medians if m[p] is not None]
        out[p] = round_half_away(sum(present, Fraction(0)) / len(present)) if present else None
    return AverageVector(out)


def compare_series(a: MedianVector, b: MedianVector) -> dict:
    """Signed per-parameter delta ``b - a``; None when either side is absent."""
    params = _check_axes([a, b])
    return {p: None if a[p] is None or b[p] is None else b[p] - a[p] for p in params}


# --- fixed decimal formatting ----------------------------------------------

def fmt_score(x) -> str:
    return "/" if x is None else str(int(x))


def fmt_median(x: Optional[Fraction]) -> str:
    """Integer when whole (``4``), else one decimal (``3.5``)."""
    if x is None:
        return "-"
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return str(round_half_away(x))


def fmt_average(x: Optional[Decimal]) -> str:
    return "-" if x is None else f"{x:.1f}"


def fmt_delta(x: Optional[Fraction]) -> str:
    if x is None:
        return "-"
    s = fmt_median(abs(x))
    return ("+" if x > 0 else "-" if x < 0 else "") + s
