"""Health-status interval schemes, default targets, and the deviation ledger.

A :class:`HealthScheme` maps HS1..HS5 to interval sets that partition the
parameter's value domain. Schemes are generated from per-parameter rule
families; each family is anchored on the standard (S) and/or target (T) of
the environment, or is a fixed ladder.

Bound arithmetic runs in :mod:`decimal` so that ``0.9 * 0.4`` lands on
``0.36`` and boundaries compare exactly against decimal readings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from types import MappingProxyType
from typing import Mapping, Optional

from .domain import (
    INF,
    CILevel,
    HealthStatus,
    Interval,
    IntervalSet,
    ParameterKind,
    ParamTargets,
    fmt_number,
    partition_check,
)
from .errors import ConfigurationError, UnknownNameError, ValidationError

P = ParameterKind
I, II = CILevel.CIL_I, CILevel.CIL_II


def _d(x) -> Decimal:
    return x if isinstance(x, Decimal) else Decimal(repr(float(x)))


def _mul(k: str, x) -> float:
    return float(Decimal(k) * _d(x))


def _add(x, k: str) -> float:
    return float(_d(x) + Decimal(k))


def _iv(lo, hi, lo_closed=True, hi_closed=False):
    return Interval.make(lo, hi, lo_closed, hi_closed)


# --- rule families ---------------------------------------------------------
# Each returns five lists of intervals (HS1..HS5) before domain clipping.

FAMILY_NAMES = {
    P.ILLUMINANCE: "standard/target band",
    P.UNIFORMITY: "standard/target band",
    P.RA: "standard/target band",
    P.RF: "standard/target band",
    P.UGR: "glare offset ladder",
    P.R9: "target fraction ladder",
    P.CCT: "target band",
    P.DUV: "zero-centred band",
    P.RG: "hundred-centred band",
    P.SDCM: "SDCM ladder",
    P.SVM: "SVM ladder",
    P.EML: "EML ladder",
}

# (lower fraction of S, upper multiplier of T) per CIL
_SB_FACTORS = {
    P.ILLUMINANCE: {I: ("0.95", "1.5"), II: ("0.90", "1.2")},
    P.UNIFORMITY: {I: ("0.95", "1.2"), II: ("0.90", "1.1")},
    P.RA: {I: ("0.95", "1.15"), II: ("0.90", "1.10")},
    P.RF: {I: ("0.95", "1.15"), II: ("0.90", "1.10")},
}


def _need(param, targets, *names):
    for n in names:
        if getattr(targets, n) is None:
            raise ConfigurationError(
                f"{param.label}: the {FAMILY_NAMES[param]} family needs {n.upper()}, "
                f"got S/T = {targets}"
            )


def _standard_band(param, cil, tg):
    _need(param, tg, "s", "t")
    s, t = tg.s, tg.t
    if s <= 0:
        raise ConfigurationError(f"{param.label}: S must be positive, got {fmt_number(s)}")
    if t < s:
        raise ConfigurationError(
            f"{param.label}: target T={fmt_number(t)} is below standard S={fmt_number(s)}"
        )
    lo_frac, k = _SB_FACTORS[param][cil]
    a, top = _mul(lo_frac, s), _mul(k, t)
    return [
        [_iv(-INF, a)],
        [_iv(a, s)],
        [_iv(s, t)],
        [_iv(t, top, True, True)],
        [_iv(top, INF, False, False)],
    ]


def _glare_offsets(param, cil, tg):
    _need(param, tg, "s")
    s = tg.s
    up1, up2, down = {I: ("1.5", "1.2", "3"), II: ("3", "1.5", "2")}[cil]
    hs1, hs2, low = _add(s, up1), _add(s, up2), float(_d(s) - Decimal(down))
    return [
        [_iv(hs1, INF)],
        [_iv(hs2, hs1)],
        [_iv(s, hs2, False, False)],  # S itself meets the standard: HS4
        [_iv(low, s, True, True)],
        [_iv(-INF, low)],
    ]


def _target_fractions(param, cil, tg):
    _need(param, tg, "t")
    t = tg.t
    if t <= 0:
        raise ConfigurationError(f"{param.label}: T must be positive, got {fmt_number(t)}")
    fr = {I: ("0.5", "0.65", "0.8"), II: ("0.4", "0.55", "0.7")}[cil]
    c1, c2, c3 = (_mul(f, t) for f in fr)
    return [[_iv(-INF, c1)], [_iv(c1, c2)], [_iv(c2, c3)], [_iv(c3, t)], [_iv(t, INF)]]


def _target_band(param, cil, tg):
    _need(param, tg, "t")
    t = tg.t
    if t <= 0:
        raise ConfigurationError(f"{param.label}: T must be positive, got {fmt_number(t)}")
    fr = {I: ("0.6", "0.9", "0.95", "1.05"), II: ("0.5", "0.8", "0.95", "1.1")}[cil]
    c1, c2, c3, c4 = (_mul(f, t) for f in fr)
    return [[_iv(-INF, c1)], [_iv(c1, c2)], [_iv(c2, c3)], [_iv(c3, c4)], [_iv(c4, INF)]]


def _zero_band(param, cil, tg):
    if tg.t not in (None, 0):
        raise ConfigurationError(f"{param.label}: the zero-centred band only supports T=0")
    b1, b2, b3, b4 = {I: (0.005, 0.004, 0.003, 0.001), II: (0.006, 0.005, 0.003, 0.001)}[cil]
    # Symmetric in |value|: a breakpoint magnitude belongs to the worse band.
    return [
        [_iv(-INF, -b1, False, True), _iv(b1, INF)],
        [_iv(-b1, -b2, False, True), _iv(b2, b1)],
        [_iv(-b2, -b3, False, True), _iv(b3, b2)],
        [_iv(-b3, -b4, False, True), _iv(b4, b3)],
        [_iv(-b4, b4, False, False)],
    ]


def _hundred_band(param, cil, tg):
    lo1, lo2, lo3 = {I: (85, 90, 95), II: (80, 85, 95)}[cil]
    hi3, hi2, hi1 = {I: (103, 105, 110), II: (103, 110, 115)}[cil]
    return [
        [_iv(-INF, lo1, False, True), _iv(hi1, INF)],
        [_iv(lo1, lo2, False, True), _iv(hi2, hi1)],
        [_iv(lo2, lo3, False, True), _iv(hi3, hi2)],
        [_iv(lo3, 99, False, True), _iv(101, hi3)],
        [_iv(99, 101, False, False)],
    ]


def _sdcm_ladder(param, cil, tg):
    if tg.t not in (None, 3):
        raise ConfigurationError(f"{param.label}: the SDCM ladder is anchored at T=3")
    c1, c2 = {I: (5, 4), II: (6, 5)}[cil]
    return [[_iv(c1, INF)], [_iv(c2, c1)], [_iv(3, c2)], [_iv(2, 3)], [_iv(-INF, 2)]]


def _svm_ladder(param, cil, tg):
    _need(param, tg, "t")
    t = tg.t
    if not 0 < t <= 0.1:
        raise ConfigurationError(f"{param.label}: T must lie in (0, 0.1], got {fmt_number(t)}")
    c1, c2 = {I: (0.2, 0.15), II: (0.25, 0.2)}[cil]
    return [[_iv(c1, INF)], [_iv(c2, c1)], [_iv(0.1, c2)], [_iv(t, 0.1)], [_iv(-INF, t)]]


def _eml_ladder(param, cil, tg):
    if tg.s not in (None, 150):
        raise ConfigurationError(f"{param.label}: the EML ladder is anchored at S=150")
    c1, c2, top = {I: (120, 132, 275), II: (108, 120, 180)}[cil]
    return [
        [_iv(-INF, c1)],
        [_iv(c1, c2)],
        [_iv(c2, 150)],
        [_iv(150, top, True, True)],
        [_iv(top, INF, False, False)],
    ]


_FAMILIES = {
    P.ILLUMINANCE: _standard_band,
    P.UNIFORMITY: _standard_band,
    P.RA: _standard_band,
    P.RF: _standard_band,
    P.UGR: _glare_offsets,
    P.R9: _target_fractions,
    P.CCT: _target_band,
    P.DUV: _zero_band,
    P.RG: _hundred_band,
    P.SDCM: _sdcm_ladder,
    P.SVM: _svm_ladder,
    P.EML: _eml_ladder,
}

#: Families whose HS index rises with the value (as opposed to falling, or centred).
ASCENDING = frozenset({P.ILLUMINANCE, P.UNIFORMITY, P.RA, P.RF, P.R9, P.CCT, P.EML})
DESCENDING = frozenset({P.UGR, P.SDCM, P.SVM})


def needs_targets(param: ParameterKind) -> tuple:
    """Which of S/T the family for ``param`` cannot do without."""
    if _FAMILIES[param] is _standard_band:
        return ("s", "t")
    if param is P.UGR:
        return ("s",)
    if param in (P.R9, P.CCT, P.SVM):
        return ("t",)
    return ()


@dataclass(frozen=True)
class HealthScheme:
    param: ParameterKind
    cil: CILevel
    targets: ParamTargets
    levels: tuple  # five IntervalSets, HS1 first

    def __post_init__(self):
        if len(self.levels) != 5:
            raise ValidationError("a health scheme needs exactly five levels")
        report = partition_check(self.levels, self.param.domain)
        if not report.ok:
            raise ConfigurationError(
                f"{self.param.label} {self.cil} scheme does not partition {self.param.domain}: {report}"
            )

    @classmethod
    def from_mapping(cls, param, cil, levels: Mapping, targets=None) -> "HealthScheme":
        """Explicit scheme from ``{"HS1": "[0, 270)", ...}`` bracket strings."""
        sets = []
        for hs in HealthStatus:
            text = levels.get(hs.name, levels.get(hs.value))
            if text is None:
                raise ConfigurationError(f"scheme override for {param.label} lacks {hs.name}")
            try:
                sets.append(IntervalSet.parse(str(text)) if str(text).strip() else IntervalSet())
            except (ValueError, ValidationError) as exc:
                raise ConfigurationError(f"scheme override {param.label} {hs.name}: {exc}") from None
        return cls(param, cil, targets or ParamTargets(), tuple(sets))

    def level(self, hs: HealthStatus) -> IntervalSet:
        return self.levels[int(hs) - 1]

    def status_of(self, x: float) -> Optional[HealthStatus]:
        """The unique HS containing ``x``, or None outside the domain."""
        hits = [HealthStatus(i + 1) for i, s in enumerate(self.levels) if x in s]
        if len(hits) > 1:
            raise AssertionError(f"{x} falls in several levels: {hits}")
        return hits[0] if hits else None

    def records(self):
        """Flat export rows: one per interval piece."""
        for hs in HealthStatus:
            for iv in self.level(hs):
                yield {
                    "parameter": self.param.token,
                    "cil": self.cil.name,
                    "hs": hs.name,
                    "lower": fmt_number(iv.lo),
                    "lower_closed": iv.lo_closed,
                    "upper": fmt_number(iv.hi),
                    "upper_closed": iv.hi_closed,
                }

    def __str__(self):
        cells = "  ".join(f"{hs.name} {self.level(hs)}" for hs in HealthStatus)
        return f"{self.param.label} {self.cil} S/T={self.targets}: {cells}"


def build_scheme(param: ParameterKind, cil: CILevel, targets: ParamTargets = ParamTargets()) -> HealthScheme:
    raw = _FAMILIES[param](param, cil, targets)
    domain = param.domain
    levels = tuple(IntervalSet.of(*pieces).intersect(domain) for pieces in raw)
    return HealthScheme(param, cil, targets, levels)


# --- default S/T per objective --------------------------------------------

# objective -> (Em S, U0 S, UGR S, CCT T); Em T = S + 100, U0 T = S + 0.1
_OBJECTIVE_TABLE = {
    "Bookshelf_Display_Adult": (300, 0.4, 19, 3500),
    "Bookshelf_Reserve_Adult": (300, 0.4, 19, 3500),
    "Table_Book borrow_digital_Adult": (500, 0.6, 22, 3500),
    "Table_Book return_Adult": (500, 0.6, 22, 3500),
    "Table Counter_multifunction_Staff": (750, 0.6, 19, 4000),
    "Sofa_Reading/learning_Adult": (750, 0.6, 19, 3000),
    "Sofa_Reading/learning_Children": (500, 0.6, 19, 3000),
    "Table_Digital inquiry_Adult": (500, 0.6, 19, 4000),
    "Table_Reading/learning_multifunction_Adult": (750, 0.6, 19, 4000),
    "Table_Reading/learning_digital_Adult": (500, 0.6, 19, 4000),
    "Table_Hobby_Children": (500, 0.6, 19, 3300),
    "Table_Workshop_Adult": (750, 0.6, 19, 4000),
}


def _objective_targets(em_s, u0_s, ugr_s, cct_t):
    return MappingProxyType({
        P.ILLUMINANCE: ParamTargets(em_s, _add(em_s, "100")),
        P.UNIFORMITY: ParamTargets(u0_s, _add(u0_s, "0.1")),
        P.UGR: ParamTargets(s=ugr_s),
        P.RA: ParamTargets(80, 85),
        P.R9: ParamTargets(t=60),
        P.RF: ParamTargets(80, 85),
        P.RG: ParamTargets(),
        P.SDCM: ParamTargets(t=3),
        P.CCT: ParamTargets(t=cct_t),
        P.DUV: ParamTargets(t=0),
        P.SVM: ParamTargets(t=0.05),
        P.EML: ParamTargets(s=150),
    })


@dataclass(frozen=True)
class TargetRegistry:
    entries: Mapping = field(default_factory=dict)

    def __contains__(self, objective):
        return objective in self.entries

    def lookup(self, objective: str) -> Mapping:
        try:
            return self.entries[objective]
        except KeyError:
            raise UnknownNameError("objective", objective, self.entries) from None

    def register(self, objective: str, targets: Mapping) -> "TargetRegistry":
        """New registry with ``objective`` added; missing parameters get no S/T."""
        full = {p: targets.get(p, ParamTargets()) for p in ParameterKind}
        merged = dict(self.entries)
        merged[objective] = MappingProxyType(full)
        return TargetRegistry(merged)


DEFAULT_TARGETS = TargetRegistry(
    {obj: _objective_targets(*row) for obj, row in _OBJECTIVE_TABLE.items()}
)


def default_targets(objective: str, registry: TargetRegistry = DEFAULT_TARGETS) -> Mapping:
    return registry.lookup(objective)


# --- deviation ledger ------------------------------------------------------

@dataclass(frozen=True)
class DeviationEntry:
    table: str
    cell: str
    printed: str
    formula: str
    resolution: str
    rows: Optional[tuple] = None  # printed row labels; None = every row, () = header only
    levels: tuple = ()
    brackets_only: bool = False  # covers open/closed differences, never a moved bound

    def covers(self, table: str, row: str, level: HealthStatus, same_bounds: bool = False) -> bool:
        if table != self.table or level not in self.levels:
            return False
        if self.brackets_only and not same_bounds:
            return False
        return self.rows is None or row in self.rows


@dataclass(frozen=True)
class DeviationLedger:
    entries: tuple = ()

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def covers(self, table, row, level, same_bounds=False) -> bool:
        return any(e.covers(table, row, level, same_bounds) for e in self.entries)

    def lines(self):
        for e in self.entries:
            yield f"{e.table}\t{e.cell}\tprinted {e.printed}\tformula {e.formula}\t{e.resolution}"


HS = HealthStatus
_CIL_I_NON_SHELF = (
    "Table Counter_multifunction_Staff",
    "Sofa_Reading/learning_Adult",
    "Sofa_Reading/learning_Children",
    "Table_Reading/learning_multifunction_Adult",
    "Table_Reading/learning_digital_Adult",
    "Table_Hobby_Children",
    "Table_Workshop_Adult",
)


def fixture_deviations() -> DeviationLedger:
    """Cells of the published threshold tables that disagree with the generation rules."""
    e = DeviationEntry
    entries = [
        e("lux", "bookshelf rows HS3/HS4", "[300, 360) [360, 480] / [360, 600]",
          "[300, 400) [400, 480] / [400, 600]", "formula canonical, [300,400)",
          ("Bookshelf_Display_Adult/Children", "Bookshelf_Reserve_Adult/Children"), (HS.HS3, HS.HS4)),
        e("ugr", "header CIL-I HS2/HS3 cut", "[S, S+1.3)", "[S, S+1.2)",
          "rows canonical, S+1.2", (), (HS.HS3,)),
        e("u0", "CIL-I rows S=0.6 HS1 upper", "(0, 0.547)", "[0, 0.57)",
          "formula canonical, 95%*0.6 = 0.57", _CIL_I_NON_SHELF, (HS.HS1,)),
        e("cct", "Table_Digital inquiry_Adult HS5", "[5200, +∞)", "[4400, +∞)",
          "formula canonical, 110%*T closes the [4400, 5200) gap",
          ("Table_Digital inquiry_Adult",), (HS.HS5,)),
        e("lux", "S=750 CIL-I rows HS1/HS2 cut", "713", "712.5",
          "printed value rounded; exact 95%*S kept",
          ("Table Counter_multifunction_Staff", "Sofa_Reading/learning_Adult",
           "Table_Reading/learning_multifunction_Adult", "Table_Workshop_Adult"), (HS.HS1, HS.HS2)),
        e("lux", "all rows HS1 lower bound", "(0, …)", "[0, …)",
          "header '[0, 95%*S)' canonical; a zero reading must classify", None, (HS.HS1,), brackets_only=True),
        e("u0", "all rows HS1 lower bound", "(0, …)", "[0, …)",
          "header '[0, 95%*S)' canonical; a zero reading must classify", None, (HS.HS1,), brackets_only=True),
        e("eml", "all rows HS1 lower bound", "(0, …)", "[0, …)",
          "header '<120'/'<108' canonical; a zero reading must classify", None, (HS.HS1,), brackets_only=True),
        e("u0", "all rows HS5 upper bound", "(…, 1)", "(…, 1]",
          "domain maximum 1 closed so the ladder partitions [0, 1]", None, (HS.HS5,), brackets_only=True),
        e("ra", "all rows HS5 upper bound", "(…, 100)", "(…, 100]",
          "domain maximum 100 closed so the ladder partitions (0, 100]", None, (HS.HS5,), brackets_only=True),
        e("r9", "all rows HS5 upper bound", "[60, 100)", "[60, 100]",
          "domain maximum 100 closed so the ladder partitions [0, 100]", None, (HS.HS5,), brackets_only=True),
        e("rf", "all rows HS5 upper bound", "(…, 100)", "(…, 100]",
          "domain maximum 100 closed so the ladder partitions (0, 100]", None, (HS.HS5,), brackets_only=True),
        e("u0", "rows 4-12 HS2/HS3 upper bracket", "[0.54, 0.6] [0.6, 0.7]", "[0.54, 0.6) [0.6, 0.7)",
          "header '[)' canonical; closed brackets overlap the next band",
          ("Table_Book return_Adult", "Table_Digital inquiry_Adult") + _CIL_I_NON_SHELF, (HS.HS2, HS.HS3), brackets_only=True),
        e("ugr", "all rows HS1 lower bracket", "(S+3, +∞) / (S+1.5, +∞)", "[S+3, +∞) / [S+1.5, +∞)",
          "header '[' canonical; an open bound leaves the cut value unmapped", None, (HS.HS1,), brackets_only=True),
        e("ugr", "all rows HS3 lower bracket (and header)", "[S, …) with HS4 [S-3, S]", "(S, …)",
          "S is claimed by both HS3 and HS4; a reading equal to S meets the standard, so HS4 keeps it",
          None, (HS.HS3,), brackets_only=True),
        e("rg", "all rows upper-side bands HS2-HS4", "[105, 110] …", "[105, 110) …",
          "half-open above 100 so bands do not overlap at 103/105/110/115", None, (HS.HS2, HS.HS3, HS.HS4), brackets_only=True),
        e("rg", "caption target", "T=95 (caption), 0 (rows)", "bands centred on 100",
          "rows canonical; no S/T used", (), ()),
        e("sdcm", "rows 9-12 HS4", "[2, 3]", "[2, 3)",
          "rows 1-8 and header canonical; 3 belongs to HS3",
          ("Table_Reading/learning_multifunction_Adult", "Table_Reading/learning_digital_Adult",
           "Table_Hobby_Children", "Table_Workshop_Adult"), (HS.HS4,), brackets_only=True),
        e("duv", "all rows positive-side HS2-HS4", "[0.004, 0.005] …", "[0.004, 0.005) …",
          "mirror of the negative side; breakpoint magnitude belongs to the worse band",
          None, (HS.HS2, HS.HS3, HS.HS4), brackets_only=True),
        e("duv", "Sofa_Reading/learning_Children HS2/HS3", "CIL-II bands", "CIL-I bands",
          "row is CIL-I; CIL-I bands applied", ("Sofa_Reading/learning_Children",), (HS.HS2, HS.HS3)),
        e("svm", "header HS5", "(0, T)", "[0, T)", "rows canonical; SVM 0 is flicker-free", (), ()),
    ]
    return DeviationLedger(tuple(entries))
