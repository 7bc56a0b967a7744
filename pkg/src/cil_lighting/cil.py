"""Exposure classification and criticality (CIL) assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .domain import AgeGroup, CILevel, MTOEClass
from .errors import ValidationError


def classify_mtoe(minutes: float) -> MTOEClass:
    """Bucket a mean time of exposure: <5 → T1, 5..15 inclusive → T2, >15 → T3."""
    if isinstance(minutes, bool) or not isinstance(minutes, (int, float)) or math.isnan(minutes):
        raise ValidationError(f"MTOE must be a number of minutes, got {minutes!r}")
    if minutes < 0:
        raise ValidationError(f"MTOE must be non-negative, got {minutes}")
    if minutes < 5:
        return MTOEClass.T1
    if minutes <= 15:
        return MTOEClass.T2
    return MTOEClass.T3


def _default_cells():
    I, II = CILevel.CIL_I, CILevel.CIL_II
    rows = {
        MTOEClass.T1: (II, II, II),
        MTOEClass.T2: (I, II, I),
        MTOEClass.T3: (I, I, I),
    }
    return {
        (group, mtoe): cil
        for mtoe, cils in rows.items()
        for group, cil in zip((AgeGroup.A, AgeGroup.B, AgeGroup.C), cils)
    }


@dataclass(frozen=True)
class CILMatrix:
    cells: Mapping = field(default_factory=_default_cells)

    def __post_init__(self):
        missing = [
            f"{g.value}/{m.value}"
            for g in AgeGroup
            for m in MTOEClass
            if (g, m) not in self.cells
        ]
        if missing:
            raise ValidationError(f"CIL matrix is missing cells: {', '.join(missing)}")
        object.__setattr__(self, "cells", dict(self.cells))

    @classmethod
    def from_mapping(cls, data) -> "CILMatrix":
        """Build from ``{group: {mtoe_class: cil}}``; absent cells keep the default."""
        cells = _default_cells()
        if not isinstance(data, Mapping):
            raise ValidationError("cil_matrix must be a mapping of age group to MTOE classes")
        for g, row in data.items():
            if not isinstance(row, Mapping):
                raise ValidationError(f"cil_matrix row {g!r} must be a mapping")
            for m, cil in row.items():
                cells[(AgeGroup.parse(g), MTOEClass.parse(m))] = CILevel.parse(cil)
        return cls(cells)

    def to_mapping(self) -> dict:
        return {
            g.value: {m.value: self.cells[(g, m)].name for m in MTOEClass}
            for g in AgeGroup
        }


DEFAULT_MATRIX = CILMatrix()


def cil_lookup(matrix: CILMatrix, group: AgeGroup, mtoe: MTOEClass) -> CILevel:
    return matrix.cells[(group, mtoe)]


def cil_for_environment(matrix: CILMatrix, groups: Iterable[AgeGroup], mtoe: MTOEClass) -> CILevel:
    """Most critical level over all user groups of the environment."""
    groups = set(groups)
    if not groups:
        raise ValidationError("an environment needs at least one age group")
    levels = {cil_lookup(matrix, g, mtoe) for g in groups}
    return CILevel.CIL_I if CILevel.CIL_I in levels else CILevel.CIL_II
