"""Measured value → health status under an environment's scheme."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Union

from .domain import HealthStatus, MeasuredValue, ParameterKind
from .errors import ConfigurationError, MissingValueError, ValidationError
from .thresholds import HealthScheme


class Flag(Enum):
    ABNORMAL = "abnormal"
    MISSING_SKIPPED = "missing-skipped"
    OVER_PROVISIONED = "over-provisioned"


#: Parameters whose top band signals over-supply rather than excellence.
OVER_SUPPLY = frozenset({ParameterKind.ILLUMINANCE, ParameterKind.UNIFORMITY})


@dataclass(frozen=True)
class Classification:
    status: HealthStatus
    flags: frozenset = frozenset()

    def __post_init__(self):
        if Flag.ABNORMAL in self.flags and self.status is not HealthStatus.HS1:
            raise ValidationError("an abnormal value always classifies as HS1")

    @property
    def abnormal(self) -> bool:
        return Flag.ABNORMAL in self.flags

    @property
    def over_provisioned(self) -> bool:
        return Flag.OVER_PROVISIONED in self.flags


def classify_value(scheme: HealthScheme, v: Union[MeasuredValue, float]) -> Classification:
    if not isinstance(v, MeasuredValue):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ValidationError(f"cannot classify {v!r}")
        if not math.isfinite(v):
            raise ValidationError(f"cannot classify non-finite value {v!r}")
        v = MeasuredValue(float(v))
    if v.missing:
        raise MissingValueError(f"{scheme.param.label}: missing value reached classification")
    status = scheme.status_of(v.value)
    if status is None:
        return Classification(HealthStatus.HS1, frozenset({Flag.ABNORMAL}))
    if v.abnormal:
        # A starred reading inside the domain is rejected at ingestion; keep the mark anyway.
        return Classification(HealthStatus.HS1, frozenset({Flag.ABNORMAL}))
    if status is HealthStatus.HS5 and scheme.param in OVER_SUPPLY:
        return Classification(status, frozenset({Flag.OVER_PROVISIONED}))
    return Classification(status)


@dataclass(frozen=True)
class RecordResult:
    classifications: Mapping  # ParameterKind -> Classification, in parameter order
    missing: int  # parameters present as columns but Missing in this record

    def __getitem__(self, param):
        return self.classifications[param]

    def get(self, param, default=None):
        return self.classifications.get(param, default)


def classify_record(profiles, schemes, record) -> RecordResult:
    """Classify every non-missing parameter of ``record``.

    ``schemes`` is a scheme book: ``schemes.scheme(environment_id, param)``.
    """
    profiles.lookup(record.environment_id)
    out, missing = {}, 0
    for param, value in record.values.items():
        if value.missing:
            missing += 1
            continue
        scheme = schemes.scheme(record.environment_id, param)
        if scheme is None:
            raise ConfigurationError(
                f"no {param.label} scheme for environment {record.environment_id!r}"
            )
        out[param] = classify_value(scheme, value)
    return RecordResult(out, missing)
