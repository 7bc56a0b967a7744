import pytest

from cil_lighting.cil import DEFAULT_MATRIX, CILMatrix, cil_for_environment, cil_lookup, classify_mtoe
from cil_lighting.domain import AgeGroup, CILevel, MTOEClass
from cil_lighting.errors import ValidationError

A, B, C = AgeGroup.A, AgeGroup.B, AgeGroup.C
I, II = CILevel.CIL_I, CILevel.CIL_II


@pytest.mark.parametrize("minutes,cls", [
    (0, "T1"), (4.99, "T1"), (5, "T2"), (10, "T2"), (15, "T2"), (15.01, "T3"), (120, "T3"),
])
def test_mtoe_boundaries(minutes, cls):
    assert classify_mtoe(minutes) is MTOEClass(cls)


@pytest.mark.parametrize("bad", [-1, float("nan"), "5", True])
def test_mtoe_rejects_bad_input(bad):
    with pytest.raises(ValidationError):
        classify_mtoe(bad)


def test_default_matrix_cells():
    expected = {
        "T1": (II, II, II),
        "T2": (I, II, I),
        "T3": (I, I, I),
    }
    for m, row in expected.items():
        for g, cil in zip((A, B, C), row):
            assert cil_lookup(DEFAULT_MATRIX, g, MTOEClass(m)) is cil


def test_most_critical_group_wins():
    assert cil_for_environment(DEFAULT_MATRIX, {B, C}, MTOEClass.T2) is I
    assert cil_for_environment(DEFAULT_MATRIX, {B}, MTOEClass.T2) is II
    assert cil_for_environment(DEFAULT_MATRIX, {A, B, C}, MTOEClass.T1) is II
    with pytest.raises(ValidationError):
        cil_for_environment(DEFAULT_MATRIX, set(), MTOEClass.T1)


def test_matrix_override_and_round_trip():
    m = CILMatrix.from_mapping({"B": {"T2": "CIL-I"}})
    assert cil_lookup(m, B, MTOEClass.T2) is I
    assert cil_lookup(m, A, MTOEClass.T1) is II
    assert CILMatrix.from_mapping(m.to_mapping()) == m
    with pytest.raises(ValidationError):
        CILMatrix({})
