"""Shared value types and the interval algebra used by every other module.

Intervals carry explicit open/closed flags on both ends so that the bracket
notation of threshold tables (``[300, 360)``, ``(480, +∞)``) round-trips
exactly. Bounds are plain floats; infinite bounds are always open.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Iterable, Optional

from .errors import UnknownNameError, ValidationError

INF = math.inf


def fmt_number(x: float) -> str:
    """Shortest faithful rendering: ``1275``, ``97.75``, ``-0.00224``, ``+∞``."""
    if x == INF:
        return "+∞"
    if x == -INF:
        return "-∞"
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _parse_number(text: str) -> float:
    t = text.strip().replace("−", "-").replace(" ", "")
    if t in ("∞", "+∞", "inf", "+inf"):
        return INF
    if t in ("-∞", "-inf"):
        return -INF
    return float(t)


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValidationError("interval bounds must not be NaN")
        if (math.isinf(self.lo) and self.lo_closed) or (math.isinf(self.hi) and self.hi_closed):
            raise ValidationError("infinite interval bounds must be open")
        if self.lo > self.hi:
            raise ValidationError(f"interval lower bound {self.lo} exceeds upper bound {self.hi}")
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise ValidationError("degenerate interval must be closed on both ends")

    @classmethod
    def make(cls, lo, hi, lo_closed=True, hi_closed=False) -> Optional["Interval"]:
        """Like the constructor, but returns None for an empty range."""
        if math.isinf(lo):
            lo_closed = False
        if math.isinf(hi):
            hi_closed = False
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return None
        return cls(lo, hi, lo_closed, hi_closed)

    @classmethod
    def closed(cls, lo, hi):
        return cls(lo, hi, True, True)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        m = re.fullmatch(r"\s*([\[(])\s*([^,]+?)\s*,\s*([^\])]+?)\s*([\])])\s*", text)
        if not m:
            raise ValueError(f"not an interval: {text!r}")
        lo, hi = _parse_number(m.group(2)), _parse_number(m.group(3))
        lo_closed, hi_closed = m.group(1) == "[", m.group(4) == "]"
        # Printed tables sometimes write "[…, +∞)"; a closed infinity means the same as open.
        return cls(lo, hi, lo_closed and not math.isinf(lo), hi_closed and not math.isinf(hi))

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    __contains__ = contains

    def _lower_key(self):
        return (self.lo, 0 if self.lo_closed else 1)

    def _upper_key(self):
        return (self.hi, 1 if self.hi_closed else 0)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = max(self, other, key=Interval._lower_key)
        hi = min(self, other, key=Interval._upper_key)
        return Interval.make(lo.lo, hi.hi, lo.lo_closed, hi.hi_closed)

    def touches(self, other: "Interval") -> bool:
        """True if the union of the two intervals is itself an interval."""
        a, b = sorted((self, other), key=Interval._lower_key)
        if a.hi > b.lo:
            return True
        return a.hi == b.lo and (a.hi_closed or b.lo_closed)

    def __str__(self):
        return "{}{}, {}{}".format(
            "[" if self.lo_closed else "(",
            fmt_number(self.lo),
            fmt_number(self.hi),
            "]" if self.hi_closed else ")",
        )


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise-disjoint union of intervals (touching pieces are merged)."""

    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "intervals", _normalize(self.intervals))

    @classmethod
    def of(cls, *intervals: Optional[Interval]) -> "IntervalSet":
        return cls(tuple(iv for iv in intervals if iv is not None))

    @classmethod
    def parse(cls, text: str) -> "IntervalSet":
        parts = [p for p in re.split(r"[;∪]", text) if p.strip()]
        return cls(tuple(Interval.parse(p) for p in parts))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def __bool__(self):
        return bool(self.intervals)

    def contains(self, x: float) -> bool:
        return any(iv.contains(x) for iv in self.intervals)

    __contains__ = contains

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet(self.intervals + other.intervals)

    def intersect(self, other) -> "IntervalSet":
        others = other.intervals if isinstance(other, IntervalSet) else (other,)
        return IntervalSet.of(*(a.intersect(b) for a in self.intervals for b in others))

    def complement(self, domain: Interval) -> "IntervalSet":
        """Parts of ``domain`` not covered by this set."""
        pieces = []
        lo, lo_closed = domain.lo, domain.lo_closed
        for iv in self.intervals:
            clipped = iv.intersect(domain)
            if clipped is None:
                continue
            pieces.append(Interval.make(lo, clipped.lo, lo_closed, not clipped.lo_closed))
            lo, lo_closed = clipped.hi, not clipped.hi_closed
        pieces.append(Interval.make(lo, domain.hi, lo_closed, domain.hi_closed))
        return IntervalSet.of(*pieces)

    def __str__(self):
        if not self.intervals:
            return "∅"
        return "; ".join(str(iv) for iv in self.intervals)


def _normalize(intervals: Iterable[Interval]) -> tuple:
    ivs = sorted(intervals, key=Interval._lower_key)
    merged: list = []
    for iv in ivs:
        if merged and merged[-1].touches(iv):
            last = merged[-1]
            hi = max(last, iv, key=Interval._upper_key)
            merged[-1] = Interval(last.lo, hi.hi, last.lo_closed, hi.hi_closed)
        else:
            merged.append(iv)
    return tuple(merged)


REALS = Interval(-INF, INF, False, False)


@dataclass(frozen=True)
class PartitionReport:
    gaps: tuple = ()
    overlaps: tuple = ()  # (i, j, Interval)
    outside: tuple = ()  # (i, Interval) pieces of set i lying outside the domain

    @property
    def ok(self) -> bool:
        return not (self.gaps or self.overlaps or self.outside)

    def __str__(self):
        if self.ok:
            return "complete partition"
        lines = [f"gap {g}" for g in self.gaps]
        lines += [f"overlap sets {i}/{j}: {iv}" for i, j, iv in self.overlaps]
        lines += [f"set {i} outside domain: {iv}" for i, iv in self.outside]
        return "; ".join(lines)


def partition_check(sets, domain: Interval) -> PartitionReport:
    """Report gaps and overlaps between ``sets`` and ``domain``; empty report iff they partition it."""
    sets = list(sets)
    if not sets:
        raise ValidationError("partition_check needs at least one set")
    union = IntervalSet()
    for s in sets:
        union = union.union(s)
    gaps = union.complement(domain).intervals
    overlaps = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            for iv in sets[i].intersect(sets[j]):
                overlaps.append((i, j, iv))
    beyond = IntervalSet.of(domain).complement(REALS)
    outside = [(i, iv) for i, s in enumerate(sets) for iv in s.intersect(beyond)]
    return PartitionReport(tuple(gaps), tuple(overlaps), tuple(outside))


class ParameterKind(Enum):
    """The twelve monitored lighting parameters with unit and value domain."""

    ILLUMINANCE = ("lux", "Lux", "lx", Interval(0, INF, True, False))
    UNIFORMITY = ("u0", "U0", "ratio", Interval(0, 1, True, True))
    UGR = ("ugr", "UGR", "", Interval(0, INF, False, False))
    RA = ("ra", "Ra", "", Interval(0, 100, False, True))
    R9 = ("r9", "R9", "", Interval(0, 100, True, True))
    RF = ("rf", "Rf", "", Interval(0, 100, False, True))
    RG = ("rg", "Rg", "", Interval(1, 150, True, True))
    SDCM = ("sdcm", "SDCM", "steps", Interval(1, INF, False, False))
    CCT = ("cct", "CCT", "K", Interval(0, INF, False, False))
    DUV = ("duv", "DUV", "", Interval(-0.05, 0.05, True, True))
    SVM = ("svm", "SVM", "", Interval(0, 1, True, True))
    EML = ("eml", "EML", "EML", Interval(0, INF, True, False))

    def __init__(self, token, label, unit, domain):
        self.token = token
        self.label = label
        self.unit = unit
        self.domain = domain

    @classmethod
    def from_token(cls, token: str) -> "ParameterKind":
        t = token.strip().lower()
        for p in cls:
            if p.token == t or p.name.lower() == t:
                return p
        raise UnknownNameError("parameter", token, [p.token for p in cls])

    def __str__(self):
        return self.label


#: The six parameters carried through scoring and radar output, in axis order.
REPORTED = (
    ParameterKind.ILLUMINANCE,
    ParameterKind.R9,
    ParameterKind.CCT,
    ParameterKind.DUV,
    ParameterKind.SVM,
    ParameterKind.EML,
)


class HealthStatus(IntEnum):
    HS1 = 1
    HS2 = 2
    HS3 = 3
    HS4 = 4
    HS5 = 5

    @classmethod
    def parse(cls, text) -> "HealthStatus":
        t = str(text).strip().upper()
        if t.isdigit():
            return cls(int(t))
        return cls[t]


class CILevel(Enum):
    """CIL_I is the more critical level."""

    CIL_I = "I"
    CIL_II = "II"

    @classmethod
    def parse(cls, text) -> "CILevel":
        t = str(text).strip().upper().replace("-", "_")
        if t.startswith("CIL_"):
            t = t[4:]
        for c in cls:
            if c.value == t:
                return c
        raise ValidationError(f"unknown CIL {text!r}; expected I or II")

    def __str__(self):
        return f"CIL-{self.value}"


class AgeGroup(Enum):
    A = "A"  # under 12 years
    B = "B"  # 12 to 65 years
    C = "C"  # over 65 years

    @classmethod
    def for_age(cls, years: float) -> "AgeGroup":
        if years < 0:
            raise ValidationError("age must be non-negative")
        if years < 12:
            return cls.A
        if years > 65:
            return cls.C
        return cls.B

    @classmethod
    def parse(cls, text) -> "AgeGroup":
        t = str(text).strip().upper()
        if t.startswith("GROUP "):
            t = t[6:].strip()
        try:
            return cls(t)
        except ValueError:
            raise ValidationError(f"unknown age group {text!r}; expected A, B or C") from None


class MTOEClass(Enum):
    T1 = "T1"  # under 5 minutes
    T2 = "T2"  # 5 to 15 minutes inclusive
    T3 = "T3"  # over 15 minutes

    @classmethod
    def parse(cls, text) -> "MTOEClass":
        try:
            return cls(str(text).strip().upper())
        except ValueError:
            raise ValidationError(f"unknown MTOE class {text!r}; expected T1, T2 or T3") from None


@dataclass(frozen=True)
class ParamTargets:
    """Standard (S) and designer target (T) for one parameter, in parameter units."""

    s: Optional[float] = None
    t: Optional[float] = None

    def __post_init__(self):
        for name in ("s", "t"):
            v = getattr(self, name)
            if v is not None:
                if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                    raise ValidationError(f"target {name.upper()} must be a finite number, got {v!r}")

    def merged(self, other: "ParamTargets") -> "ParamTargets":
        """Values from ``other`` win where present."""
        return ParamTargets(
            other.s if other.s is not None else self.s,
            other.t if other.t is not None else self.t,
        )

    def __str__(self):
        parts = [fmt_number(v) for v in (self.s, self.t) if v is not None]
        return "/".join(parts) if parts else "-"


@dataclass(frozen=True)
class MeasuredValue:
    """A numeric reading, or Missing when ``value`` is None."""

    value: Optional[float] = None
    abnormal: bool = False

    def __post_init__(self):
        if self.value is None:
            if self.abnormal:
                raise ValidationError("a missing value cannot be flagged abnormal")
            return
        if not math.isfinite(self.value):
            raise ValidationError(f"measured value must be finite, got {self.value!r}")

    @property
    def missing(self) -> bool:
        return self.value is None

    def check_domain(self, param: ParameterKind) -> None:
        if self.abnormal and self.value in param.domain:
            raise ValidationError(
                f"{param.label} value {fmt_number(self.value)} is flagged abnormal "
                f"but lies inside the domain {param.domain}"
            )

    def __str__(self):
        if self.value is None:
            return "/"
        return fmt_number(self.value) + ("*" if self.abnormal else "")


MISSING = MeasuredValue()
