import math

import pytest
from hypothesis import given, strategies as st

from cil_lighting.classifier import Classification, Flag, classify_record, classify_value
from cil_lighting.domain import CILevel, HealthStatus as HS, MeasuredValue, ParameterKind as P, ParamTargets
from cil_lighting.errors import ConfigurationError, MissingValueError, UnknownNameError, ValidationError
from cil_lighting.ingestion import MeasurementRecord, Position, Flagged, SchemeBook, parse_profiles
from cil_lighting.thresholds import build_scheme, default_targets

I, II = CILevel.CIL_I, CILevel.CIL_II
SHELF = default_targets("Bookshelf_Display_Adult")


def test_examples():
    lux = build_scheme(P.ILLUMINANCE, II, SHELF[P.ILLUMINANCE])
    c = classify_value(lux, 1221)
    assert c.status is HS.HS5 and c.over_provisioned
    r9 = build_scheme(P.R9, II, ParamTargets(t=60))
    assert classify_value(r9, 6) == Classification(HS.HS1)
    assert classify_value(build_scheme(P.CCT, II, ParamTargets(t=3500)), 2929).status is HS.HS3
    c = classify_value(r9, MeasuredValue(-1, True))
    assert c.status is HS.HS1 and c.abnormal
    c = classify_value(build_scheme(P.SVM, II, ParamTargets(t=0.05)), MeasuredValue(4, True))
    assert c.status is HS.HS1 and c.abnormal
    assert classify_value(build_scheme(P.EML, I, ParamTargets(s=150)), 150).status is HS.HS4


def test_unstarred_out_of_domain_is_abnormal_too():
    c = classify_value(build_scheme(P.R9, I, ParamTargets(t=60)), 120)
    assert c == Classification(HS.HS1, frozenset({Flag.ABNORMAL}))


def test_over_provision_only_for_supply_parameters():
    eml = build_scheme(P.EML, I, ParamTargets(s=150))
    assert classify_value(eml, 400) == Classification(HS.HS5)
    u0 = build_scheme(P.UNIFORMITY, I, ParamTargets(0.6, 0.7))
    assert classify_value(u0, 0.95).over_provisioned


def test_missing_and_nonfinite():
    s = build_scheme(P.EML, I, ParamTargets(s=150))
    with pytest.raises(MissingValueError):
        classify_value(s, MeasuredValue())
    for bad in (math.nan, math.inf, "3"):
        with pytest.raises(ValidationError):
            classify_value(s, bad)


def test_abnormal_classification_invariant():
    with pytest.raises(ValidationError):
        Classification(HS.HS3, frozenset({Flag.ABNORMAL}))


@pytest.mark.parametrize("param", list(P), ids=lambda p: p.token)
@given(x=st.floats(-1e6, 1e6, allow_nan=False))
def test_abnormality_is_sticky(param, x):
    targets = default_targets("Table_Hobby_Children")[param]
    s = build_scheme(param, I, targets)
    c = classify_value(s, x)
    if x not in param.domain:
        assert c.status is HS.HS1 and c.abnormal
    else:
        assert not c.abnormal
        assert classify_value(s, x) == c


def _record(env, **values):
    vals = {P.from_token(k): v for k, v in values.items()}
    return MeasurementRecord("G", "G_test", env, env, Flagged.NO, Flagged.NO, Position.UNSPECIFIED, vals)


def test_classify_record_children_sofa(registry, book):
    rec = _record("Sofa_Reading/learning_Children", lux=MeasuredValue(700), r9=MeasuredValue(13),
                  cct=MeasuredValue(3040), duv=MeasuredValue(0.0008), svm=MeasuredValue(0),
                  eml=MeasuredValue(215))
    res = classify_record(registry, book, rec)
    got = {p.token: int(c.status) for p, c in res.classifications.items()}
    assert got == {"lux": 4, "r9": 1, "cct": 4, "duv": 5, "svm": 5, "eml": 4}
    assert res.missing == 0


def test_classify_record_skips_missing(registry, book):
    res = classify_record(registry, book, _record("Table_Hobby_Children", lux=MeasuredValue(), eml=MeasuredValue()))
    assert res.classifications == {} and res.missing == 2
    res = classify_record(registry, book, _record("Table Counter_multifunction_Staff",
                                                  lux=MeasuredValue(370), eml=MeasuredValue()))
    assert P.EML not in res.classifications and res.missing == 1


def test_classify_record_errors(registry, book):
    with pytest.raises(UnknownNameError):
        classify_record(registry, book, _record("Nowhere", lux=MeasuredValue(1)))
    reg = parse_profiles("""
environments:
  - id: Kiosk
    objective: Kiosk
    age_groups: [B]
    mtoe_minutes: 2
    targets: {lux: {s: 200, t: 300}}
""")
    kiosk_book = SchemeBook(reg)
    rec = _record("Kiosk", lux=MeasuredValue(250), cct=MeasuredValue(3000))
    with pytest.raises(ConfigurationError, match="no CCT scheme"):
        classify_record(reg, kiosk_book, rec)


def test_full_fixture_classifies(registry, book, surveys):
    for survey in surveys.values():
        for rec in survey.records:
            classify_record(registry, book, rec)
