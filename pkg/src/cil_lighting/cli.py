"""Command-line entry point: ``cil-lighting <subcommand> ...``.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from itertools import combinations
from pathlib import Path

from .classifier import classify_record
from .domain import HealthStatus, ParameterKind, partition_check
from .errors import CILError, ConfigurationError, ParseError, ValidationError
from .ingestion import (
    FORMATS,
    ComparisonResults,
    SchemeBook,
    SurveyResults,
    _csv,
    _fixed_width,
    _json,
    emit_results,
    load_score_document,
    parse_measurements,
    parse_profiles,
)
from .reporting import build_report, radar_data, render_report
from .scoring import average_across, compare_series, median_by_parameter, survey_scores
from .thresholds import fixture_deviations

log = logging.getLogger("cil_lighting")

SURVEYS = ("G_Feb2023", "S_Mar2023", "S_Oct2023", "C_Mar2023", "C_Oct2023")


def data_path(*parts) -> Path:
    return Path(str(resources.files("cil_lighting").joinpath("data"))).joinpath(*parts)


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc.strerror}", source=str(path)) from None


def _registry(args):
    path = args.profiles or data_path("profiles.yaml")
    reg = parse_profiles(_read(path), source=str(path))
    log.info("loaded %d environment profiles from %s", len(reg), path)
    return reg


def _surveys(args):
    paths = args.measurements or []
    if not paths:
        raise ParseError("no measurement files given (use --measurements PATH ...)")
    out = []
    for p in paths:
        s = parse_measurements(_read(p), source=str(p))
        log.info("parsed %d records from %s", len(s), p)
        out.append(s)
    return out


def _score(reg, book, survey):
    results = [classify_record(reg, book, r) for r in survey.records]
    table = survey_scores(survey, results)
    return results, table, median_by_parameter(table)


# --- subcommands -------------------------------------------------------------

def cmd_assign_cil(args) -> str:
    reg = _registry(args)
    head = ["environment_id", "age_groups", "mtoe", "cil", "source"]
    rows = [
        [p.id, p.groups_label(), p.mtoe.value, str(p.cil), "override" if p.overridden else "derived"]
        for p in reg
    ]
    if args.format == "structured":
        return _json({"kind": "cil-assignment", "environments": [dict(zip(head, r)) for r in rows]})
    return _csv([head] + rows) if args.format == "csv" else _fixed_width([head] + rows)


def cmd_thresholds(args) -> str:
    reg = _registry(args)
    params = [ParameterKind.from_token(args.param)] if args.param else list(ParameterKind)
    book = SchemeBook(reg)
    head = ["environment_id", "parameter", "cil", "st"] + [hs.name for hs in HealthStatus]
    rows, records = [], []
    for prof, scheme in book:
        if scheme is None or scheme.param not in params:
            continue
        rows.append([prof.id, scheme.param.token, scheme.cil.value, str(scheme.targets)]
                    + [str(scheme.level(hs)) for hs in HealthStatus])
        records += [dict(r, environment_id=prof.id) for r in scheme.records()]
    ledger = fixture_deviations() if args.deviations else None
    if args.format == "structured":
        doc = {"kind": "scheme-book", "schemes": records}
        if ledger is not None:
            doc["deviations"] = [
                {"table": e.table, "cell": e.cell, "printed": e.printed,
                 "formula": e.formula, "resolution": e.resolution}
                for e in ledger
            ]
        return _json(doc)
    if args.format == "csv":
        text = _csv([head] + rows)
        if ledger is not None:
            text += _csv([["table", "cell", "printed", "formula", "resolution"]]
                         + [[e.table, e.cell, e.printed, e.formula, e.resolution] for e in ledger])
        return text
    text = _fixed_width([head] + rows)
    if ledger is not None:
        text += "\ndeviations from published tables\n"
        text += _fixed_width([["table", "cell", "printed", "formula", "resolution"]]
                             + [[e.table, e.cell, e.printed, e.formula, e.resolution] for e in ledger])
    return text


def cmd_classify(args) -> str:
    reg = _registry(args)
    book = SchemeBook(reg)
    head = ["survey", "environment_id", "position", "parameter", "value", "hs", "flags"]
    rows = []
    for survey in _surveys(args):
        for rec in survey.records:
            res = classify_record(reg, book, rec)
            for p, c in res.classifications.items():
                flags = ",".join(sorted(f.value for f in c.flags))
                rows.append([survey.survey_label, rec.environment_id, rec.position.value,
                             p.token, str(rec.values[p]), c.status.name, flags])
    if args.format == "structured":
        return _json({"kind": "classifications", "rows": [dict(zip(head, r)) for r in rows]})
    return _csv([head] + rows) if args.format == "csv" else _fixed_width([head] + rows)


def cmd_score(args) -> str:
    reg = _registry(args)
    book = SchemeBook(reg)
    parts = []
    for survey in _surveys(args):
        _, table, medians = _score(reg, book, survey)
        parts.append(emit_results(SurveyResults(survey.survey_label, table, medians), args.format))
    sep = "\n" if args.format == "table" else ""
    return sep.join(parts)


def cmd_compare(args) -> str:
    series = []
    for path in args.inputs:
        series += load_score_document(_read(path), source=str(path))
    if len(series) < 2:
        raise ValidationError(f"need at least two score series to compare, got {len(series)}")
    labels = tuple(lab for lab, _ in series)
    medians = tuple(m for _, m in series)
    average = average_across(medians) if args.include_average else None
    deltas = tuple((labels[i], labels[j], compare_series(medians[i], medians[j]))
                   for i, j in combinations(range(len(series)), 2))
    radar = tuple(radar_data(series, args.include_average))
    return emit_results(ComparisonResults(labels, medians, average, deltas, radar), args.format)


def cmd_report(args) -> str:
    reg = _registry(args)
    book = SchemeBook(reg)
    parts = []
    for survey in _surveys(args):
        results, _, medians = _score(reg, book, survey)
        parts.append(render_report(build_report(survey, results, reg, medians), args.format))
    return ("\n" if args.format == "table" else "").join(parts)


def cmd_validate(args) -> str:
    reg = _registry(args)
    book = SchemeBook(reg)
    lines = reg.report()
    checked, incomplete = 0, []
    for prof, scheme in book:
        if scheme is None:
            if prof.id not in incomplete:
                incomplete.append(prof.id)
            continue
        report = partition_check(scheme.levels, scheme.param.domain)
        if not report.ok:
            raise ConfigurationError(f"{prof.id} {scheme.param.label}: {report}")
        checked += 1
    for env in incomplete:
        missing = [p.token for p in ParameterKind if book.scheme(env, p) is None]
        lines.append(f"{env}: no scheme for {', '.join(missing)} (S/T not supplied)")
    lines.append(f"{checked} schemes partition their domains")
    for survey in (_surveys(args) if args.measurements else ()):
        n = 0
        for rec in survey.records:
            n += len(classify_record(reg, book, rec).classifications)
        lines.append(f"{survey.survey_label}: {len(survey)} records, {n} values classified")
    return "\n".join(lines) + "\n"


def cmd_fixtures(args) -> str:
    lines = [f"profiles  {data_path('profiles.yaml')}"]
    lines += [f"survey    {data_path('surveys', s + '.csv')}" for s in SURVEYS]
    lines += [f"reference {p}" for p in sorted(data_path("reference").glob("*.csv"))]
    return "\n".join(lines) + "\n"


COMMANDS = {
    "assign-cil": cmd_assign_cil,
    "thresholds": cmd_thresholds,
    "classify": cmd_classify,
    "score": cmd_score,
    "compare": cmd_compare,
    "report": cmd_report,
    "validate": cmd_validate,
    "fixtures": cmd_fixtures,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cil-lighting",
        description="Context-driven health assessment of library lighting measurements.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help, profiles=True, measurements=False, fmt=True):
        p = sub.add_parser(name, help=help)
        if profiles:
            p.add_argument("--profiles", metavar="PATH",
                           help="environment profile config (default: bundled fixture profiles)")
        if measurements:
            p.add_argument("--measurements", metavar="PATH", nargs="+", help="measurement CSV file(s)")
        if fmt:
            p.add_argument("--format", choices=FORMATS, default="table")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        return p

    add("assign-cil", "list environments with their derived or overridden CIL")
    p = add("thresholds", "print the generated HS interval scheme book")
    p.add_argument("--param", metavar="FILTER", help="only this parameter token (e.g. lux, ugr, eml)")
    p.add_argument("--deviations", action="store_true",
                   help="append cells of the published tables that disagree with the rules")
    add("classify", "health status of every measured value", measurements=True)
    add("score", "score table and medians per survey", measurements=True)
    p = add("compare", "compare median vectors across surveys", profiles=False)
    p.add_argument("inputs", nargs="+", metavar="SCORES",
                   help="structured score outputs or median CSV files")
    p.add_argument("--include-average", action="store_true", help="add the cross-survey average")
    add("report", "full assessment report with audit sections", measurements=True)
    add("validate", "check profiles, schemes and (optionally) measurements", measurements=True, fmt=False)
    add("fixtures", "print paths of the bundled fixture corpus", profiles=False, fmt=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        text = COMMANDS[args.command](args)
    except CILError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
