"""Profile configuration, measurement CSV parsing, and result serialization."""

from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

import yaml

from .cil import DEFAULT_MATRIX, CILMatrix, cil_for_environment, classify_mtoe
from .domain import (
    AgeGroup,
    CILevel,
    MeasuredValue,
    MTOEClass,
    ParameterKind,
    ParamTargets,
)
from .errors import ConfigurationError, ParseError, UnknownNameError, ValidationError
from .scoring import MedianVector, fmt_average, fmt_delta, fmt_median, fmt_score
from .thresholds import DEFAULT_TARGETS, HealthScheme, TargetRegistry, build_scheme, needs_targets

_INSTANCE = re.compile(r"#\d+$")


def base_environment(environment_id: str) -> str:
    """Strip an instance suffix: ``Bookshelf_Display_Adult#2`` names the same profile."""
    return _INSTANCE.sub("", environment_id)


# --- profiles ----------------------------------------------------------------

@dataclass(frozen=True)
class EnvironmentProfile:
    id: str
    objective: str
    age_groups: frozenset
    mtoe: MTOEClass
    cil: CILevel
    derived_cil: CILevel
    mtoe_minutes: Optional[float] = None
    targets: Mapping = field(default_factory=dict)  # ParameterKind -> ParamTargets, all 12
    overridden: bool = False

    def groups_label(self) -> str:
        return ",".join(g.value for g in sorted(self.age_groups, key=lambda g: g.value))


@dataclass(frozen=True)
class SchemeOverride:
    param: ParameterKind
    cil: CILevel
    levels: Mapping
    environment: Optional[str] = None


@dataclass(frozen=True)
class ProfileRegistry:
    profiles: tuple = ()
    matrix: CILMatrix = DEFAULT_MATRIX
    overrides: tuple = ()

    def __post_init__(self):
        seen = set()
        for p in self.profiles:
            if p.id in seen:
                raise ValidationError(f"duplicate environment id {p.id!r}")
            seen.add(p.id)

    def __iter__(self):
        return iter(self.profiles)

    def __len__(self):
        return len(self.profiles)

    def lookup(self, environment_id: str) -> EnvironmentProfile:
        for key in (environment_id, base_environment(environment_id)):
            for p in self.profiles:
                if p.id == key:
                    return p
        raise UnknownNameError("environment", environment_id, [p.id for p in self.profiles])

    def report(self) -> list:
        """One line per profile: derived vs. overridden CIL."""
        lines = []
        for p in self.profiles:
            if p.overridden:
                lines.append(f"{p.id}: {p.cil} (override; derived {p.derived_cil})")
            else:
                lines.append(f"{p.id}: {p.cil} (derived)")
        return lines


def _load_document(text: str, source=None):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        row = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ParseError(f"malformed configuration: {problem}", row=row, source=source) from None


def _targets_block(block, where) -> dict:
    if block is None:
        return {}
    if not isinstance(block, Mapping):
        raise ValidationError(f"{where}: targets must be a mapping of parameter to {{s, t}}")
    out = {}
    for token, st in block.items():
        param = ParameterKind.from_token(str(token))
        if not isinstance(st, Mapping) or set(st) - {"s", "t", "S", "T"}:
            raise ValidationError(f"{where}: targets for {token} must be {{s: ..., t: ...}}")
        out[param] = ParamTargets(st.get("s", st.get("S")), st.get("t", st.get("T")))
    return out


def _profile(entry, index, matrix, registry) -> EnvironmentProfile:
    where = f"environment #{index + 1}"
    if not isinstance(entry, Mapping):
        raise ValidationError(f"{where} must be a mapping")
    env_id = entry.get("id")
    if not env_id:
        raise ValidationError(f"{where} lacks an id")
    where = f"environment {env_id!r}"
    objective = str(entry.get("objective", env_id))
    groups = entry.get("age_groups")
    if isinstance(groups, str):
        groups = [g for g in re.split(r"[,\s]+", groups) if g]
    if not groups:
        raise ValidationError(f"{where}: age_groups must list at least one of A, B, C")
    age_groups = frozenset(AgeGroup.parse(g) for g in groups)

    minutes = entry.get("mtoe_minutes")
    if minutes is not None:
        mtoe = classify_mtoe(minutes)
        if "mtoe_class" in entry and MTOEClass.parse(entry["mtoe_class"]) is not mtoe:
            raise ValidationError(
                f"{where}: mtoe_minutes {minutes} implies {mtoe.value}, not {entry['mtoe_class']}"
            )
    elif "mtoe_class" in entry:
        mtoe = MTOEClass.parse(entry["mtoe_class"])
    else:
        raise ValidationError(f"{where}: needs mtoe_minutes or mtoe_class")

    derived = cil_for_environment(matrix, age_groups, mtoe)
    override = entry.get("cil_override")
    cil = CILevel.parse(override) if override is not None else derived

    given = _targets_block(entry.get("targets"), where)
    if objective in registry:
        base = registry.lookup(objective)
    elif given:
        base = {}
    else:
        raise ConfigurationError(
            f"{where}: objective {objective!r} has no default S/T; supply a targets block "
            f"(known objectives: {', '.join(sorted(registry.entries))})"
        )
    targets = {
        p: base.get(p, ParamTargets()).merged(given.get(p, ParamTargets()))
        for p in ParameterKind
    }
    return EnvironmentProfile(
        str(env_id), objective, age_groups, mtoe, cil, derived,
        float(minutes) if minutes is not None else None,
        MappingProxyType(targets), override is not None,
    )


def parse_profiles(text: str, registry: TargetRegistry = DEFAULT_TARGETS, source=None) -> ProfileRegistry:
    doc = _load_document(text, source)
    if not isinstance(doc, Mapping) or not isinstance(doc.get("environments"), list):
        raise ValidationError("configuration needs a top-level 'environments' list")
    matrix = DEFAULT_MATRIX
    if doc.get("cil_matrix") is not None:
        matrix = CILMatrix.from_mapping(doc["cil_matrix"])
    profiles = tuple(
        _profile(e, i, matrix, registry) for i, e in enumerate(doc["environments"])
    )
    overrides = []
    for i, o in enumerate(doc.get("scheme_overrides") or ()):
        if not isinstance(o, Mapping) or "parameter" not in o or "levels" not in o:
            raise ValidationError(f"scheme override #{i + 1} needs parameter and levels")
        param = ParameterKind.from_token(str(o["parameter"]))
        cil = CILevel.parse(o.get("cil", "I"))
        # Parse now so a broken override fails at load time.
        HealthScheme.from_mapping(param, cil, o["levels"])
        overrides.append(SchemeOverride(param, cil, MappingProxyType(dict(o["levels"])), o.get("environment")))
    reg = ProfileRegistry(profiles, matrix, tuple(overrides))
    for o in overrides:
        if o.environment is not None:
            reg.lookup(o.environment)
    return reg


class SchemeBook:
    """All schemes for a registry, keyed by (environment id, parameter).

    A parameter whose family lacks S/T for an environment has no scheme;
    classification of that parameter is then a configuration error.
    """

    def __init__(self, registry: ProfileRegistry):
        self.registry = registry
        self._schemes = {}
        for prof in registry:
            for param in ParameterKind:
                self._schemes[(prof.id, param)] = self._build(prof, param)

    def _build(self, prof, param) -> Optional[HealthScheme]:
        targets = prof.targets[param]
        generic = None
        for o in self.registry.overrides:
            if o.param is param and o.cil is prof.cil:
                if o.environment == prof.id:
                    return HealthScheme.from_mapping(param, prof.cil, o.levels, targets)
                if o.environment is None:
                    generic = o
        if generic is not None:
            return HealthScheme.from_mapping(param, prof.cil, generic.levels, targets)
        if any(getattr(targets, n) is None for n in needs_targets(param)):
            return None
        return build_scheme(param, prof.cil, targets)

    def scheme(self, environment_id: str, param: ParameterKind) -> Optional[HealthScheme]:
        prof = self.registry.lookup(environment_id)
        return self._schemes[(prof.id, param)]

    def __iter__(self):
        """(profile, scheme) pairs in registry and parameter order; schemes may be None."""
        for prof in self.registry:
            for param in ParameterKind:
                yield prof, self._schemes[(prof.id, param)]


# --- measurements ------------------------------------------------------------

class Flagged(Enum):
    YES = "yes"
    NO = "no"
    UNSPECIFIED = "unspecified"


class Position(Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"
    TABLE = "table"
    SCREEN = "screen"
    UNSPECIFIED = "unspecified"


_POSITION_ALIASES = {"tabel": Position.TABLE, "/": Position.UNSPECIFIED, "": Position.UNSPECIFIED}
_FLAG_ALIASES = {"/": Flagged.UNSPECIFIED, "": Flagged.UNSPECIFIED}

CONTEXT_COLUMNS = (
    "site_id", "survey_label", "environment_id", "objective",
    "shelf_lighting", "daylight", "position",
)
#: Parameter columns of the canonical measurement file, in column order.
MEASUREMENT_PARAMS = tuple(ParameterKind.from_token(t) for t in
                           ("lux", "ra", "r9", "rf", "rg", "cct", "duv", "svm", "eml"))
_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


@dataclass(frozen=True)
class MeasurementRecord:
    site_id: str
    survey_label: str
    environment_id: str
    objective: str
    shelf_lighting: Flagged
    daylight: Flagged
    position: Position
    values: Mapping  # ParameterKind -> MeasuredValue, in column order

    @property
    def empty(self) -> bool:
        return all(v.missing for v in self.values.values())


@dataclass(frozen=True)
class Survey:
    site_id: str
    survey_label: str
    records: tuple = ()
    params: tuple = MEASUREMENT_PARAMS

    def __len__(self):
        return len(self.records)


def parse_value(cell: str, param: ParameterKind) -> MeasuredValue:
    text = cell.strip()
    if text in ("", "/"):
        return MeasuredValue()
    abnormal = text.endswith("*")
    if abnormal:
        text = text[:-1].strip()
    if not _NUMBER.fullmatch(text):
        raise ValueError(f"not a number: {cell!r}")
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"not a finite number: {cell!r}")
    mv = MeasuredValue(value, abnormal)
    mv.check_domain(param)
    return mv


def _vocab(enum, aliases, text, what):
    t = text.strip().lower()
    if t in aliases:
        return aliases[t]
    try:
        return enum(t)
    except ValueError:
        known = ", ".join(e.value for e in enum)
        raise ValueError(f"unknown {what} {text!r}; expected one of {known} or '/'") from None


def parse_measurements(text: str, source=None) -> Survey:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty measurement file", source=source) from None
    header = [h.strip() for h in header]
    missing = [c for c in CONTEXT_COLUMNS if c not in header]
    if missing:
        raise ParseError(f"missing columns: {', '.join(missing)}", row=1, source=source)
    params = []
    for h in header:
        if h in CONTEXT_COLUMNS:
            continue
        try:
            params.append(ParameterKind.from_token(h))
        except UnknownNameError:
            raise ParseError(f"unknown column {h!r}", row=1, column=h, source=source) from None
    if len(set(header)) != len(header):
        raise ParseError("duplicate column names", row=1, source=source)

    records, seen = [], {}
    site = label = None
    for lineno, cells in enumerate(reader, start=2):
        if not any(c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} cells, found {len(cells)}", row=lineno, source=source)
        row = dict(zip(header, cells))
        col = None
        try:
            col = "environment_id"
            if not row[col].strip():
                raise ValueError("environment_id is empty")
            col = "shelf_lighting"
            shelf = _vocab(Flagged, _FLAG_ALIASES, row[col], "flag")
            col = "daylight"
            daylight = _vocab(Flagged, _FLAG_ALIASES, row[col], "flag")
            col = "position"
            position = _vocab(Position, _POSITION_ALIASES, row[col], "position")
            values = {}
            for p in params:
                col = p.token
                values[p] = parse_value(row[col], p)
        except (ValueError, ValidationError) as exc:
            raise ParseError(str(exc), row=lineno, column=col, source=source) from None

        rec = MeasurementRecord(
            row["site_id"].strip(), row["survey_label"].strip(), row["environment_id"].strip(),
            row["objective"].strip(), shelf, daylight, position, MappingProxyType(values),
        )
        if site is None:
            site, label = rec.site_id, rec.survey_label
        elif (rec.site_id, rec.survey_label) != (site, label):
            raise ParseError(
                f"one survey per file: found {rec.site_id}/{rec.survey_label} after {site}/{label}",
                row=lineno, column="survey_label", source=source,
            )
        key = (rec.environment_id, rec.position)
        if key in seen:
            raise ParseError(
                f"duplicate measurement for {rec.environment_id!r} at position "
                f"{rec.position.value} (first on row {seen[key]})",
                row=lineno, column="position", source=source,
            )
        seen[key] = lineno
        records.append(rec)
    return Survey(site or "", label or "", tuple(records), tuple(params))


def _flag_cell(f: Flagged) -> str:
    return "/" if f is Flagged.UNSPECIFIED else f.value


def format_measurements(survey: Survey) -> str:
    """CSV text that re-parses to an identical :class:`Survey`."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CONTEXT_COLUMNS + tuple(p.token for p in survey.params))
    for r in survey.records:
        w.writerow(
            [r.site_id, r.survey_label, r.environment_id, r.objective,
             _flag_cell(r.shelf_lighting), _flag_cell(r.daylight),
             "/" if r.position is Position.UNSPECIFIED else r.position.value]
            + [str(r.values[p]) for p in survey.params]
        )
    return out.getvalue()


# --- result serialization ------------------------------------------------------

FORMATS = ("table", "csv", "structured")


def _check_format(fmt):
    if fmt not in FORMATS:
        raise ConfigurationError(f"unsupported format {fmt!r}; expected one of {', '.join(FORMATS)}")


def _fixed_width(rows) -> str:
    if not rows:
        return ""
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines) + "\n"


def _csv(rows) -> str:
    out = io.StringIO()
    csv.writer(out, lineterminator="\n").writerows(rows)
    return out.getvalue()


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class SurveyResults:
    label: str
    table: object  # ScoreTable
    medians: object  # MedianVector


@dataclass(frozen=True)
class ComparisonResults:
    labels: tuple
    medians: tuple  # MedianVector per label
    average: Optional[object] = None  # AverageVector
    deltas: tuple = ()  # (label a, label b, {param: Fraction|None})
    radar: tuple = ()  # RadarSeries


def _survey_doc(r: SurveyResults) -> dict:
    params = r.table.params
    return {
        "kind": "survey-scores",
        "label": r.label,
        "parameters": [p.token for p in params],
        "rows": [
            {"environment_id": row.environment_id, "position": row.position,
             "scores": {p.token: row.scores.get(p) for p in params}}
            for row in r.table.rows
        ],
        "median": {p.token: None if r.medians[p] is None else fmt_median(r.medians[p]) for p in params},
        "counts": {p.token: r.medians.counts.get(p, 0) for p in params},
    }


def _comparison_doc(r: ComparisonResults) -> dict:
    params = r.medians[0].params if r.medians else ()
    doc = {
        "kind": "comparison",
        "parameters": [p.token for p in params],
        "medians": [
            {"label": lab, "values": {p.token: _opt(fmt_median, m[p]) for p in params}}
            for lab, m in zip(r.labels, r.medians)
        ],
        "deltas": [
            {"from": a, "to": b, "values": {p.token: _opt(fmt_delta, d[p]) for p in params}}
            for a, b, d in r.deltas
        ],
        "radar": [s.to_dict() for s in r.radar],
    }
    if r.average is not None:
        doc["average"] = {p.token: _opt(fmt_average, r.average[p]) for p in params}
    return doc


def _opt(fn, x):
    return None if x is None else fn(x)


def emit_results(results, fmt: str = "table") -> str:
    """Serialize survey scores or a comparison; identical inputs give identical bytes."""
    _check_format(fmt)
    if isinstance(results, ComparisonResults):
        return _emit_comparison(results, fmt)
    if fmt == "structured":
        return _json(_survey_doc(results))
    params = results.table.params
    head = ["environment_id", "position"] + [p.token for p in params]
    body = [
        [row.environment_id, row.position] + [fmt_score(row.scores.get(p)) for p in params]
        for row in results.table.rows
    ]
    if fmt == "csv":
        tail = [["median", ""] + [fmt_median(results.medians[p]) for p in params]] if body else []
        return _csv([head] + body + tail)
    text = _fixed_width([head] + body)
    if body:
        text += "median  " + " ".join(fmt_median(results.medians[p]) for p in params) + "\n"
    return text


def _emit_comparison(r: ComparisonResults, fmt: str) -> str:
    if fmt == "structured":
        return _json(_comparison_doc(r))
    params = r.medians[0].params if r.medians else ()
    head = ["label"] + [p.token for p in params]
    rows = [[lab] + [fmt_median(m[p]) for p in params] for lab, m in zip(r.labels, r.medians)]
    if r.average is not None:
        rows.append(["average"] + [fmt_average(r.average[p]) for p in params])
    deltas = [[f"{b} - {a}"] + [fmt_delta(d[p]) for p in params] for a, b, d in r.deltas]
    if fmt == "csv":
        return _csv([head] + rows + [["delta " + d[0]] + d[1:] for d in deltas])
    text = _fixed_width([head] + rows)
    if r.average is not None:
        text += "average  " + " ".join(fmt_average(r.average[p]) for p in params) + "\n"
    if deltas:
        text += "\ndeltas\n" + _fixed_width([["pair"] + head[1:]] + deltas)
    return text


def load_score_document(text: str, source=None):
    """Labelled median vectors from a structured survey-scores document or a median CSV.

    Returns a list of ``(label, MedianVector)``.
    """
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed score document: {exc.msg}", row=exc.lineno, source=source) from None
        if not isinstance(doc, Mapping) or doc.get("kind") != "survey-scores":
            raise ParseError("expected a survey-scores document", source=source)
        try:
            params = [ParameterKind.from_token(t) for t in doc["parameters"]]
            values = {p: _opt(Fraction, doc["median"].get(p.token)) for p in params}
            counts = {p: int(doc.get("counts", {}).get(p.token, 0)) for p in params}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"malformed score document: {exc}", source=source) from None
        return [(str(doc.get("label", source or "")), MedianVector(values, counts))]

    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[0].strip() != "label":
        raise ParseError("median CSV must start with a 'label' column", row=1, source=source)
    try:
        params = [ParameterKind.from_token(h) for h in header[1:]]
    except UnknownNameError as exc:
        raise ParseError(str(exc), row=1, source=source) from None
    out = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells or cells[0].strip().lower().endswith("average"):
            continue  # derived rows are recomputed, never read back
        try:
            values = {p: _opt(Fraction, c.strip() or None) for p, c in zip(params, cells[1:])}
        except ValueError as exc:
            raise ParseError(str(exc), row=lineno, source=source) from None
        out.append((cells[0].strip(), MedianVector(values)))
    return out
