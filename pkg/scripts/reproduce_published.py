#!/usr/bin/env python3
"""Run the bundled fixture surveys through the pipeline and diff against the published tables."""

from cil_lighting.cil import DEFAULT_MATRIX, cil_for_environment
from cil_lighting.classifier import classify_record
from cil_lighting.cli import SURVEYS, data_path
from cil_lighting.domain import REPORTED
from cil_lighting.ingestion import SchemeBook, parse_measurements, parse_profiles
from cil_lighting.reference import audit_thresholds, load_published_medians, load_published_scores
from cil_lighting.scoring import MedianVector, average_across, fmt_average, fmt_median, median_by_parameter, survey_scores
from cil_lighting.thresholds import fixture_deviations


def main():
    reg = parse_profiles(data_path("profiles.yaml").read_text(encoding="utf-8"))
    book = SchemeBook(reg)

    print("CIL assignment")
    for p in reg:
        derived = cil_for_environment(DEFAULT_MATRIX, p.age_groups, p.mtoe)
        print(f"  {p.id:45s} {derived.value}")

    cils = {p.objective: p.cil for p in reg}
    audit = audit_thresholds(lambda o: cils[o], ledger=fixture_deviations())
    print(f"\nthreshold tables: {audit.cells_compared} cells, {len(audit.mismatches)} differ, "
          f"{len(audit.undocumented)} undocumented")

    printed = load_published_medians()
    computed = {}
    for label in SURVEYS:
        survey = parse_measurements(data_path("surveys", label + ".csv").read_text(encoding="utf-8"))
        results = [classify_record(reg, book, r) for r in survey.records]
        table = survey_scores(survey, results)
        computed[label] = median_by_parameter(table)
        if label == "G_Feb2023":
            pub = load_published_scores()
            diffs = [(i + 1, p.token, want[p], row.scores[p])
                     for i, (row, (_, _, want)) in enumerate(zip(table.rows, pub))
                     for p in REPORTED if row.scores[p] != want[p]]
            print(f"\nG_Feb2023 score cells differing from print (row, param, printed, computed): {diffs}")

    print("\nmedians      " + "  ".join(f"{p.token:>5s}" for p in REPORTED))
    for label in SURVEYS:
        ours = " ".join(f"{fmt_median(computed[label][p]):>5s}" for p in REPORTED)
        theirs = " ".join(f"{fmt_median(printed['Library ' + label][p]):>5s}" for p in REPORTED)
        print(f"  {label}  computed {ours}\n  {'':9s}  printed  {theirs}")
    avg = average_across([MedianVector(printed["Library " + s]) for s in SURVEYS])
    print("\naverage of printed medians: " + " ".join(fmt_average(avg[p]) for p in REPORTED))


if __name__ == "__main__":
    main()
