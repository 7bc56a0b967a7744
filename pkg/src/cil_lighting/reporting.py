"""Assessment reports, colour classes, over-provision audit and radar series."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

from .classifier import OVER_SUPPLY
from .domain import REPORTED, HealthStatus, ParameterKind, fmt_number
from .errors import ConfigurationError, ValidationError
from .ingestion import FORMATS, _csv, _fixed_width, _json
from .scoring import (
    MedianVector,
    average_across,
    fmt_median,
    hs_to_score,
    round_half_away,
)

PALETTE = ("red", "orange", "yellow", "green", "dark-blue", "dark-green", "blue", "grey")

_DEFAULT_COLORS = {
    HealthStatus.HS1: "red",
    HealthStatus.HS2: "orange",
    HealthStatus.HS3: "yellow",
    HealthStatus.HS4: "green",
    HealthStatus.HS5: "dark-blue",
}


@dataclass(frozen=True)
class ColorPalette:
    colors: Mapping = field(default_factory=lambda: MappingProxyType(dict(_DEFAULT_COLORS)))
    # HS5 on over-supply parameters gets its own token
    overrides: Mapping = field(default_factory=lambda: MappingProxyType(
        {(p, HealthStatus.HS5): "dark-green" for p in OVER_SUPPLY}
    ))

    def __post_init__(self):
        missing = [hs.name for hs in HealthStatus if hs not in self.colors]
        if missing:
            raise ConfigurationError(f"palette lacks colours for {', '.join(missing)}")
        tokens = list(self.colors.values())
        for t in tokens + list(self.overrides.values()):
            if t not in PALETTE:
                raise ConfigurationError(f"unknown colour token {t!r}; palette: {', '.join(PALETTE)}")
        if len(set(tokens)) != len(tokens):
            raise ConfigurationError("palette must give each health status its own colour")

    def color(self, hs: HealthStatus, param: Optional[ParameterKind] = None) -> str:
        return self.overrides.get((param, hs), self.colors[hs])


@dataclass(frozen=True)
class ReportCell:
    param: ParameterKind
    value: str
    status: Optional[HealthStatus]
    color: Optional[str]

    @property
    def score(self):
        return None if self.status is None else hs_to_score(self.status)


@dataclass(frozen=True)
class AuditEntry:
    environment_id: str
    position: str
    param: ParameterKind
    value: float
    target: Optional[float]

    @property
    def exceedance(self) -> Optional[Fraction]:
        """(value - T) / T as a percentage."""
        if not self.target:
            return None
        return (Fraction(str(self.value)) - Fraction(str(self.target))) / Fraction(str(self.target)) * 100


@dataclass(frozen=True)
class LowBandSummary:
    param: ParameterKind
    low: int  # rows at HS1 or HS2
    total: int  # rows with a classification

    @property
    def fraction(self) -> Optional[Fraction]:
        return Fraction(self.low, self.total) if self.total else None

    def __str__(self):
        return f"{self.low} of {self.total} {self.param.token} rows at HS1 or HS2"


@dataclass(frozen=True)
class Report:
    label: str
    params: tuple
    rows: tuple  # (environment_id, position, tuple of ReportCell)
    medians: MedianVector
    anomalies: tuple  # (environment_id, position, param, value text)
    audit: tuple  # AuditEntry
    low_bands: tuple  # LowBandSummary


def build_report(survey, results: Sequence, profiles, medians: MedianVector,
                 params: tuple = REPORTED, palette: ColorPalette = None) -> Report:
    palette = palette or ColorPalette()
    rows, anomalies, audit = [], [], []
    low = {p: [0, 0] for p in params}
    for rec, res in zip(survey.records, results):
        cells = []
        pos = rec.position.value
        for p in params:
            mv = rec.values.get(p)
            c = res.get(p)
            text = "/" if mv is None else str(mv)
            if c is None:
                cells.append(ReportCell(p, text, None, None))
                continue
            cells.append(ReportCell(p, text, c.status, palette.color(c.status, p)))
            low[p][1] += 1
            if c.status <= HealthStatus.HS2:
                low[p][0] += 1
            if c.abnormal:
                anomalies.append((rec.environment_id, pos, p, text))
        # the audit covers every over-supply parameter, reported or not
        for p in sorted(OVER_SUPPLY, key=lambda k: list(ParameterKind).index(k)):
            c = res.get(p)
            if c is not None and c.over_provisioned:
                target = profiles.lookup(rec.environment_id).targets[p].t
                audit.append(AuditEntry(rec.environment_id, pos, p, rec.values[p].value, target))
        rows.append((rec.environment_id, pos, tuple(cells)))
    lows = tuple(LowBandSummary(p, *low[p]) for p in params)
    return Report(survey.survey_label, tuple(params), tuple(rows), medians,
                  tuple(anomalies), tuple(audit), lows)


def _pct(x: Optional[Fraction]) -> str:
    return "-" if x is None else f"{round_half_away(x):+}%"


def render_report(report: Report, fmt: str = "table") -> str:
    if fmt not in FORMATS:
        raise ConfigurationError(f"unsupported format {fmt!r}; expected one of {', '.join(FORMATS)}")
    params = report.params
    if fmt == "structured":
        return _json({
            "kind": "report",
            "label": report.label,
            "parameters": [p.token for p in params],
            "rows": [
                {"environment_id": env, "position": pos, "cells": {
                    c.param.token: {"value": c.value, "hs": c.status.name if c.status else None,
                                    "score": c.score, "color": c.color}
                    for c in cells}}
                for env, pos, cells in report.rows
            ],
            "median": {p.token: None if report.medians[p] is None else fmt_median(report.medians[p])
                       for p in params},
            "anomalies": [{"environment_id": e, "position": pos, "parameter": p.token, "value": v}
                          for e, pos, p, v in report.anomalies],
            "over_provision": [
                {"environment_id": a.environment_id, "position": a.position, "parameter": a.param.token,
                 "value": fmt_number(a.value), "target": None if a.target is None else fmt_number(a.target),
                 "exceedance_pct": _pct(a.exceedance)}
                for a in report.audit
            ],
            "low_bands": {s.param.token: {"low": s.low, "total": s.total} for s in report.low_bands},
        })

    head = ["environment_id", "position"] + [p.token for p in params]
    body = []
    for env, pos, cells in report.rows:
        body.append([env, pos] + [
            c.value if c.status is None else f"{c.value} {c.status.name}/{c.color}" for c in cells
        ])
    med = ["median", ""] + [fmt_median(report.medians[p]) for p in params]
    if fmt == "csv":
        return _csv([head] + body + ([med] if body else []))

    out = [f"report {report.label}", "", _fixed_width([head] + body + ([med] if body else [])).rstrip("\n")]
    out += ["", "anomalies"]
    out += [f"  {e} {pos} {p.token} {v}" for e, pos, p, v in report.anomalies] or ["  none"]
    out += ["", "over-provision audit"]
    out += [
        f"  {a.environment_id} {a.position} {a.param.token} {fmt_number(a.value)} "
        f"exceeds T={fmt_number(a.target) if a.target is not None else '-'} by {_pct(a.exceedance)}"
        for a in report.audit
    ] or ["  none"]
    out += ["", "low-band summary"]
    out += [f"  {s}" for s in report.low_bands]
    return "\n".join(out) + "\n"


# --- radar ---------------------------------------------------------------------

@dataclass(frozen=True)
class RadarSeries:
    label: str
    axes: tuple
    values: tuple  # Fraction per axis, None when absent

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "axes": [p.label for p in self.axes],
            "values": [None if v is None else fmt_median(v) for v in self.values],
        }


def radar_data(medians: Sequence, include_average: bool = False) -> list:
    """One series per ``(label, MedianVector)``, plus an ``average`` series on request."""
    medians = list(medians)
    series = []
    for label, m in medians:
        if m.params != REPORTED:
            raise ValidationError(
                f"series {label!r} axes {[p.token for p in m.params]} differ from "
                f"{[p.token for p in REPORTED]}"
            )
        series.append(RadarSeries(label, REPORTED, tuple(m[p] for p in REPORTED)))
    if include_average and medians:
        avg = average_across([m for _, m in medians])
        series.append(RadarSeries(
            "average", REPORTED,
            tuple(None if avg[p] is None else Fraction(avg[p]) for p in REPORTED),
        ))
    return series

