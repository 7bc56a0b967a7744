import pytest
from hypothesis import given, settings, strategies as st

from cil_lighting.domain import CILevel, HealthStatus as HS, IntervalSet, ParameterKind as P, ParamTargets, partition_check
from cil_lighting.errors import ConfigurationError, UnknownNameError, ValidationError
from cil_lighting.thresholds import (
    ASCENDING,
    DEFAULT_TARGETS,
    DESCENDING,
    HealthScheme,
    build_scheme,
    default_targets,
    fixture_deviations,
)

I, II = CILevel.CIL_I, CILevel.CIL_II


def levels(scheme):
    return [str(scheme.level(hs)) for hs in HS]


# Hand-derived expectations (bounds worked out by hand from the rule families).
@pytest.mark.parametrize("param,cil,targets,expected", [
    (P.ILLUMINANCE, I, ParamTargets(750, 850),
     ["[0, 712.5)", "[712.5, 750)", "[750, 850)", "[850, 1275]", "(1275, +∞)"]),
    (P.ILLUMINANCE, II, ParamTargets(300, 400),
     ["[0, 270)", "[270, 300)", "[300, 400)", "[400, 480]", "(480, +∞)"]),
    (P.UNIFORMITY, II, ParamTargets(0.4, 0.5),
     ["[0, 0.36)", "[0.36, 0.4)", "[0.4, 0.5)", "[0.5, 0.55]", "(0.55, 1]"]),
    (P.UNIFORMITY, I, ParamTargets(0.6, 0.7),
     ["[0, 0.57)", "[0.57, 0.6)", "[0.6, 0.7)", "[0.7, 0.84]", "(0.84, 1]"]),
    (P.UGR, II, ParamTargets(s=22),
     ["[25, +∞)", "[23.5, 25)", "(22, 23.5)", "[20, 22]", "(0, 20)"]),
    (P.UGR, I, ParamTargets(s=19),
     ["[20.5, +∞)", "[20.2, 20.5)", "(19, 20.2)", "[16, 19]", "(0, 16)"]),
    (P.RA, I, ParamTargets(80, 85),
     ["(0, 76)", "[76, 80)", "[80, 85)", "[85, 97.75]", "(97.75, 100]"]),
    (P.RF, II, ParamTargets(80, 85),
     ["(0, 72)", "[72, 80)", "[80, 85)", "[85, 93.5]", "(93.5, 100]"]),
    (P.R9, II, ParamTargets(t=60), ["[0, 24)", "[24, 33)", "[33, 42)", "[42, 60)", "[60, 100]"]),
    (P.R9, I, ParamTargets(t=60), ["[0, 30)", "[30, 39)", "[39, 48)", "[48, 60)", "[60, 100]"]),
    (P.CCT, II, ParamTargets(t=3500),
     ["(0, 1750)", "[1750, 2800)", "[2800, 3325)", "[3325, 3850)", "[3850, +∞)"]),
    (P.CCT, I, ParamTargets(t=3300),
     ["(0, 1980)", "[1980, 2970)", "[2970, 3135)", "[3135, 3465)", "[3465, +∞)"]),
    (P.DUV, I, ParamTargets(t=0),
     ["[-0.05, -0.005]; [0.005, 0.05]", "(-0.005, -0.004]; [0.004, 0.005)",
      "(-0.004, -0.003]; [0.003, 0.004)", "(-0.003, -0.001]; [0.001, 0.003)", "(-0.001, 0.001)"]),
    (P.RG, II, ParamTargets(),
     ["[1, 80]; [115, 150]", "(80, 85]; [110, 115)", "(85, 95]; [103, 110)",
      "(95, 99]; [101, 103)", "(99, 101)"]),
    (P.SDCM, II, ParamTargets(t=3), ["[6, +∞)", "[5, 6)", "[3, 5)", "[2, 3)", "(1, 2)"]),
    (P.SVM, I, ParamTargets(t=0.05), ["[0.2, 1]", "[0.15, 0.2)", "[0.1, 0.15)", "[0.05, 0.1)", "[0, 0.05)"]),
    (P.SVM, II, ParamTargets(t=0.05), ["[0.25, 1]", "[0.2, 0.25)", "[0.1, 0.2)", "[0.05, 0.1)", "[0, 0.05)"]),
    (P.EML, I, ParamTargets(s=150), ["[0, 120)", "[120, 132)", "[132, 150)", "[150, 275]", "(275, +∞)"]),
    (P.EML, II, ParamTargets(s=150), ["[0, 108)", "[108, 120)", "[120, 150)", "[150, 180]", "(180, +∞)"]),
])
def test_generated_schemes(param, cil, targets, expected):
    assert levels(build_scheme(param, cil, targets)) == expected


def test_duv_breakpoints_belong_to_the_worse_band():
    s = build_scheme(P.DUV, II, ParamTargets(t=0))
    assert s.status_of(0.001) is HS.HS4 and s.status_of(-0.001) is HS.HS4
    assert s.status_of(0.0009) is HS.HS5
    assert s.status_of(0.006) is HS.HS1 and s.status_of(-0.006) is HS.HS1


@pytest.mark.parametrize("param,cil,targets,needle", [
    (P.ILLUMINANCE, I, ParamTargets(s=300), "needs T"),
    (P.UGR, I, ParamTargets(), "needs S"),
    (P.R9, II, ParamTargets(s=60), "needs T"),
    (P.ILLUMINANCE, II, ParamTargets(400, 300), "below standard"),
    (P.SVM, I, ParamTargets(t=0.2), "(0, 0.1]"),
    (P.SDCM, I, ParamTargets(t=5), "T=3"),
    (P.EML, I, ParamTargets(s=250), "S=150"),
    (P.DUV, I, ParamTargets(t=0.002), "T=0"),
])
def test_configuration_errors_name_parameter(param, cil, targets, needle):
    with pytest.raises(ConfigurationError) as exc:
        build_scheme(param, cil, targets)
    assert param.label in str(exc.value) and needle in str(exc.value)


def test_default_targets():
    sofa = default_targets("Sofa_Reading/learning_Children")
    assert sofa[P.ILLUMINANCE] == ParamTargets(500, 600)
    assert sofa[P.CCT] == ParamTargets(t=3000)
    assert default_targets("Table_Hobby_Children")[P.CCT].t == 3300
    counter = default_targets("Table Counter_multifunction_Staff")
    assert counter[P.UGR].s == 19 and counter[P.ILLUMINANCE] == ParamTargets(750, 850)
    assert default_targets("Bookshelf_Reserve_Adult")[P.UNIFORMITY] == ParamTargets(0.4, 0.5)
    with pytest.raises(UnknownNameError) as exc:
        default_targets("Nope")
    assert "Table_Workshop_Adult" in str(exc.value)


def test_every_fixture_objective_has_all_parameters():
    for objective in DEFAULT_TARGETS.entries:
        t = default_targets(objective)
        assert set(t) == set(P)
        assert t[P.RA] == t[P.RF] == ParamTargets(80, 85)
        assert t[P.R9] == ParamTargets(t=60) and t[P.SDCM] == ParamTargets(t=3)
        assert t[P.DUV] == ParamTargets(t=0) and t[P.SVM] == ParamTargets(t=0.05)
        assert t[P.EML] == ParamTargets(s=150) and t[P.RG] == ParamTargets()


def test_registry_register():
    reg = DEFAULT_TARGETS.register("Kiosk", {P.ILLUMINANCE: ParamTargets(200, 300)})
    assert reg.lookup("Kiosk")[P.ILLUMINANCE] == ParamTargets(200, 300)
    assert "Kiosk" not in DEFAULT_TARGETS


def test_scheme_from_mapping_and_rejection():
    s = HealthScheme.from_mapping(P.EML, I, {
        "HS1": "[0, 100)", "HS2": "[100, 130)", "HS3": "[130, 150)", "HS4": "[150, 300]", "HS5": "(300, +∞)",
    })
    assert s.status_of(140) is HS.HS3
    with pytest.raises(ConfigurationError):
        HealthScheme.from_mapping(P.EML, I, {
            "HS1": "[0, 100)", "HS2": "[100, 130)", "HS3": "[140, 150)", "HS4": "[150, 300]", "HS5": "(300, +∞)",
        })
    with pytest.raises(ValidationError):
        HealthScheme(P.EML, I, ParamTargets(), (IntervalSet(),))


def test_scheme_records_export():
    recs = list(build_scheme(P.RG, I).records())
    assert len(recs) == 9
    assert recs[0] == {"parameter": "rg", "cil": "CIL_I", "hs": "HS1", "lower": "1",
                       "lower_closed": True, "upper": "85", "upper_closed": True}


# --- properties ----------------------------------------------------------------

def grid_targets(param):
    """S/T grid per family for the completeness property."""
    if param is P.ILLUMINANCE:
        return [ParamTargets(s, s + 100) for s in range(100, 1001, 50)]
    if param is P.UNIFORMITY:
        return [ParamTargets(s / 100, s / 100 + 0.1) for s in range(10, 81, 5)]
    if param in (P.RA, P.RF):
        return [ParamTargets(s, t) for s in range(50, 91, 5) for t in (s, s + 5)]
    if param is P.UGR:
        return [ParamTargets(s=s) for s in range(10, 29)]
    if param is P.R9:
        return [ParamTargets(t=t) for t in range(10, 96, 5)]
    if param is P.CCT:
        return [ParamTargets(t=t) for t in range(2000, 6501, 100)]
    if param is P.SVM:
        return [ParamTargets(t=t / 100) for t in range(1, 11)]
    return [ParamTargets()]


@pytest.mark.parametrize("param", list(P), ids=lambda p: p.token)
@pytest.mark.parametrize("cil", [I, II], ids=str)
def test_partition_completeness_over_grid(param, cil):
    for targets in grid_targets(param):
        s = build_scheme(param, cil, targets)
        assert partition_check(s.levels, param.domain).ok


def test_sb_cil_tightness():
    for param in (P.ILLUMINANCE, P.UNIFORMITY, P.RA, P.RF):
        for t in grid_targets(param):
            a, b = build_scheme(param, I, t), build_scheme(param, II, t)
            hs1_i, hs1_ii = a.level(HS.HS1), b.level(HS.HS1)
            assert hs1_ii.intersect(hs1_i) == hs1_ii and hs1_i != hs1_ii
            assert a.level(HS.HS4).intervals[-1].hi >= b.level(HS.HS4).intervals[-1].hi


def sample(param):
    d = param.domain
    hi = d.hi if d.hi != float("inf") else 10_000
    return st.floats(d.lo, hi, allow_nan=False)


@pytest.mark.parametrize("param", sorted(ASCENDING | DESCENDING, key=lambda p: p.token), ids=lambda p: p.token)
@given(data=st.data())
@settings(max_examples=200, deadline=None)
def test_ladder_monotonic(param, data):
    targets = default_targets("Table_Workshop_Adult")[param]
    cil = data.draw(st.sampled_from([I, II]))
    s = build_scheme(param, cil, targets)
    x, y = sorted((data.draw(sample(param)), data.draw(sample(param))))
    hx, hy = s.status_of(x), s.status_of(y)
    if hx is None or hy is None:
        return
    assert hx <= hy if param in ASCENDING else hx >= hy


@given(st.floats(-0.05, 0.05), st.floats(-0.05, 0.05), st.sampled_from([I, II]))
def test_zero_band_monotonic_in_magnitude(a, b, cil):
    s = build_scheme(P.DUV, cil, ParamTargets(t=0))
    if abs(a) <= abs(b):
        assert s.status_of(a) >= s.status_of(b)


@given(st.floats(1, 150), st.floats(1, 150), st.sampled_from([I, II]))
def test_hundred_band_monotonic_outward_on_each_side(a, b, cil):
    s = build_scheme(P.RG, cil)
    if (a - 100) * (b - 100) >= 0 and abs(a - 100) <= abs(b - 100):
        assert s.status_of(a) >= s.status_of(b)


def test_hundred_band_is_asymmetric():
    # equal distance from 100, different status: the upper side is stricter
    s = build_scheme(P.RG, I)
    assert s.status_of(96) is HS.HS4 and s.status_of(104) is HS.HS3


# --- deviation ledger ----------------------------------------------------------

def test_mandatory_ledger_entries():
    ledger = fixture_deviations()
    by_res = {e.resolution: e for e in ledger}
    assert "rows canonical, S+1.2" in by_res
    assert by_res["rows canonical, S+1.2"].table == "ugr"
    assert "formula canonical, [300,400)" in by_res
    assert any(e.printed.startswith("(0, 0.547)") for e in ledger)
    assert any("5200" in e.printed and "4400" in e.formula for e in ledger)


def test_ledger_lines_are_tab_separated():
    lines = list(fixture_deviations().lines())
    assert len(lines) == len(fixture_deviations())
    assert all(line.count("\t") == 4 for line in lines)
