from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cil_lighting.domain import REPORTED, HealthStatus
from cil_lighting.errors import ValidationError
from cil_lighting.ingestion import Survey
from cil_lighting.scoring import (
    MedianVector,
    ScoreRow,
    ScoreTable,
    average_across,
    compare_series,
    fmt_average,
    fmt_delta,
    fmt_median,
    hs_to_score,
    median,
    median_by_parameter,
    round_half_away,
    survey_scores,
)

# Medians worked out by hand from the survey tables under the fixture schemes.
COMPUTED_MEDIANS = {
    "G_Feb2023": (1, 1, 3, 4, 5, 1),
    "S_Mar2023": (1, 5, 3, 4, 5, 1),
    "S_Oct2023": (1, 5, 3, 5, 5, 1),
    "C_Mar2023": (Fraction(7, 2), 5, Fraction(9, 2), 4, 5, Fraction(9, 2)),
    "C_Oct2023": (1, 4, 3, 4, 5, 1),
}


def vec(*values):
    return MedianVector({p: None if v is None else Fraction(v) for p, v in zip(REPORTED, values)})


def test_hs_to_score_is_the_ordinal():
    assert [hs_to_score(h) for h in HealthStatus] == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("label", sorted(COMPUTED_MEDIANS))
def test_survey_medians(scored, label):
    _, _, medians = scored[label]
    assert tuple(medians[p] for p in REPORTED) == COMPUTED_MEDIANS[label]


def test_g_lux_median_count(scored):
    _, table, medians = scored["G_Feb2023"]
    assert len(table) == 15
    assert medians.counts[REPORTED[0]] == 15


def test_all_missing_row_is_kept(scored):
    _, table, medians = scored["C_Oct2023"]
    hobby = [r for r in table.rows if r.environment_id == "Table_Hobby_Children"]
    assert len(hobby) == 1 and all(v is None for v in hobby[0].scores.values())
    assert medians.counts[REPORTED[0]] == len(table) - 1


def test_s_counter_eml_missing(scored):
    _, table, _ = scored["S_Mar2023"]
    counter = [r for r in table.rows if r.environment_id.startswith("Table Counter")]
    assert counter and all(r.scores[REPORTED[-1]] is None for r in counter)


def test_empty_survey():
    t = survey_scores(Survey("X", "X1"), [])
    assert len(t) == 0
    assert all(v is None for v in median_by_parameter(t).values.values())
    with pytest.raises(ValidationError):
        survey_scores(Survey("X", "X1"), [object()])


def test_median_rules():
    assert median([3, 1, 2]) == 2
    assert median([1, 2, 3, 5]) == Fraction(5, 2)
    assert median([None, 4]) == 4
    assert median([None]) is None


def test_scores_validated():
    with pytest.raises(ValidationError):
        ScoreTable(REPORTED, (ScoreRow("x", "high", {REPORTED[0]: 6}),))


@given(st.lists(st.one_of(st.none(), st.integers(1, 5)), min_size=1, max_size=40), st.randoms())
def test_median_permutation_invariant_and_bounded(values, rnd):
    m = median(values)
    shuffled = list(values)
    rnd.shuffle(shuffled)
    assert median(shuffled) == m
    present = [v for v in values if v is not None]
    if present:
        assert min(present) <= m <= max(present)
    else:
        assert m is None


def test_average_examples():
    avg = average_across([vec(1, 1, 3, 4, 5, 1), vec(1, 5, 3, 4, 5, 2), vec(1, 5, 3, 5, 5, 1),
                          vec(4, 5, 5, 4, 5, 4), vec(1, 3, 3, 4, 5, 1)])
    assert [fmt_average(avg[p]) for p in REPORTED] == ["1.6", "3.8", "3.4", "4.2", "5.0", "1.8"]
    assert average_across([vec(3, 3, 3, 3, 3, 3)] * 3)[REPORTED[0]] == Decimal("3.0")
    with pytest.raises(ValidationError):
        average_across([])


def test_average_skips_absent():
    avg = average_across([vec(1, None, 1, 1, 1, 1), vec(2, None, 2, 2, 2, 2)])
    assert avg[REPORTED[1]] is None
    assert avg[REPORTED[0]] == Decimal("1.5")


@given(st.lists(st.integers(1, 5), min_size=6, max_size=6), st.integers(1, 6))
def test_average_of_copies_is_identity(values, n):
    v = vec(*values)
    avg = average_across([v] * n)
    assert all(avg[p] == Decimal(int(v[p])).quantize(Decimal("0.1")) for p in REPORTED)


def test_rounding_half_away_from_zero():
    assert round_half_away(Fraction(1, 4)) == Decimal("0.3")
    assert round_half_away(Fraction(-1, 4)) == Decimal("-0.3")
    assert round_half_away(Fraction(21, 20)) == Decimal("1.1")


def test_compare_series():
    c_mar, c_oct = vec(4, 5, 5, 4, 5, 4), vec(1, 3, 3, 4, 5, 1)
    assert compare_series(c_mar, c_oct)[REPORTED[0]] == -3
    s_mar, s_oct = vec(1, 5, 3, 4, 5, 2), vec(1, 5, 3, 5, 5, 1)
    assert compare_series(s_mar, s_oct)[REPORTED[3]] == 1
    assert all(d == 0 for d in compare_series(s_mar, s_mar).values())
    assert compare_series(vec(None, 1, 1, 1, 1, 1), s_mar)[REPORTED[0]] is None
    with pytest.raises(ValidationError):
        compare_series(s_mar, MedianVector({REPORTED[0]: Fraction(1)}))


def test_formatting():
    assert fmt_median(Fraction(4)) == "4"
    assert fmt_median(Fraction(7, 2)) == "3.5"
    assert fmt_median(None) == "-"
    assert fmt_average(Decimal("5.0")) == "5.0"
    assert fmt_delta(Fraction(-3)) == "-3" and fmt_delta(Fraction(1, 2)) == "+0.5" and fmt_delta(Fraction(0)) == "0"
