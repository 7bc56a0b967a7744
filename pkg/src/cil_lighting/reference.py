"""Published reference tables bundled as regression fixtures.

Threshold cells are kept verbatim (bracket strings as printed) so that the
comparison against generated schemes is an honest audit: a printed cell is
clipped to the parameter domain and must then equal the generated set, or
be covered by a :class:`~cil_lighting.thresholds.DeviationLedger` entry.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Callable, Mapping

from .domain import REPORTED, CILevel, HealthStatus, IntervalSet, ParameterKind, ParamTargets
from .thresholds import DEFAULT_TARGETS, DeviationLedger, TargetRegistry, build_scheme, fixture_deviations

#: Printed row labels that name the same objective as a registry entry.
ROW_ALIASES = {
    "Bookshelf_Display_Adult/Children": "Bookshelf_Display_Adult",
    "Bookshelf_Reserve_Adult/Children": "Bookshelf_Reserve_Adult",
}


def objective_for_row(label: str) -> str:
    return ROW_ALIASES.get(label, label)


def read_data(*parts: str) -> str:
    return resources.files("cil_lighting").joinpath("data", "/".join(parts)).read_text(encoding="utf-8")


@dataclass(frozen=True)
class PrintedRow:
    table: str
    param: ParameterKind
    row: str
    cil: CILevel
    st: str
    cells: tuple  # five strings, "" where the table leaves a cell blank

    def targets(self) -> ParamTargets:
        """The S/T column read in the parameter's own convention."""
        parts = [float(p) for p in self.st.split("/")]
        if len(parts) == 2:
            return ParamTargets(*parts)
        if self.param in (ParameterKind.UGR, ParameterKind.EML):
            return ParamTargets(s=parts[0])
        if self.param is ParameterKind.RG:
            return ParamTargets()
        return ParamTargets(t=parts[0])


def load_threshold_rows() -> list:
    rows = []
    for r in csv.DictReader(io.StringIO(read_data("reference", "thresholds.csv"))):
        rows.append(PrintedRow(
            r["parameter"],
            ParameterKind.from_token(r["parameter"]),
            r["row"],
            CILevel.parse(r["cil"]),
            r["st"],
            tuple(r[hs.name] for hs in HealthStatus),
        ))
    return rows


@dataclass(frozen=True)
class CellMismatch:
    table: str
    row: str
    level: HealthStatus
    printed: str
    generated: str
    same_bounds: bool  # differs only in open/closed flags
    documented: bool


@dataclass(frozen=True)
class ThresholdAudit:
    cells_compared: int
    mismatches: tuple
    header_mismatches: tuple  # (table, row, what, printed, expected)
    stale_entries: tuple

    @property
    def undocumented(self) -> tuple:
        return tuple(m for m in self.mismatches if not m.documented)

    @property
    def ok(self) -> bool:
        return not (self.undocumented or self.header_mismatches or self.stale_entries)


def _bounds(s: IntervalSet) -> tuple:
    return tuple((iv.lo, iv.hi) for iv in s)


def audit_thresholds(
    cil_of: Callable[[str], CILevel],
    registry: TargetRegistry = DEFAULT_TARGETS,
    ledger: DeviationLedger = None,
) -> ThresholdAudit:
    """Compare every printed data-row cell with the generated scheme for that row.

    ``cil_of`` maps an objective to the CIL the system assigns it; the printed
    CIL column and S/T column are checked against the system as well.
    """
    ledger = fixture_deviations() if ledger is None else ledger
    compared = 0
    mismatches, headers = [], []
    for pr in load_threshold_rows():
        objective = objective_for_row(pr.row)
        cil = cil_of(objective)
        targets = registry.lookup(objective)[pr.param]
        if pr.cil is not cil:
            headers.append((pr.table, pr.row, "CIL", str(pr.cil), str(cil)))
        if pr.param is not ParameterKind.RG and pr.targets() != targets:
            headers.append((pr.table, pr.row, "S/T", pr.st, str(targets)))
        scheme = build_scheme(pr.param, cil, targets)
        for hs, text in zip(HealthStatus, pr.cells):
            if not text.strip():
                continue
            compared += 1
            printed = IntervalSet.parse(text).intersect(pr.param.domain)
            generated = scheme.level(hs)
            if printed != generated:
                same = _bounds(printed) == _bounds(generated)
                mismatches.append(CellMismatch(
                    pr.table, pr.row, hs, text, str(generated), same,
                    ledger.covers(pr.table, pr.row, hs, same),
                ))
    stale = []
    for entry in ledger:
        if entry.rows == ():
            continue  # header-only note, nothing in the data rows to hit
        if not any(entry.covers(m.table, m.row, m.level, m.same_bounds) for m in mismatches):
            stale.append(entry)
    return ThresholdAudit(compared, tuple(mismatches), tuple(headers), tuple(stale))


# --- published score and median tables ------------------------------------

def _score_cell(text: str):
    text = text.strip()
    if text in ("", "/"):
        return None
    return Fraction(text)


def load_published_scores() -> list:
    """Printed per-row scores of the Library G survey: list of (row label, position, {param: int})."""
    rows, label = [], None
    for r in csv.DictReader(io.StringIO(read_data("reference", "scores_G_Feb2023.csv"))):
        label = r["row"] or label
        scores = {p: int(r[p.token]) for p in REPORTED}
        rows.append((label, r["position"], scores))
    return rows


def load_published_medians() -> Mapping:
    """Printed median rows by label, including the ``Library_Average`` row; values are Fractions."""
    out = {}
    for r in csv.DictReader(io.StringIO(read_data("reference", "medians.csv"))):
        out[r["label"]] = {p: _score_cell(r[p.token]) for p in REPORTED}
    return out
