"""Bound-verification records shared by the checking modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .lognum import LogReal

__all__ = ["CheckReport", "reports_to_csv", "DEFAULT_TOLERANCE_FACTOR"]

# "lhs <= C * rhs" is asserted as ratio <= C * (1 + 1e-6); the slack only
# absorbs roundoff, it is far below every acceptance tolerance.
DEFAULT_TOLERANCE_FACTOR = 1.0 + 1e-6


@dataclass(frozen=True)
class CheckReport:
    """One verified inequality: lhs against rhs, in the log domain."""

    lhs: LogReal
    rhs: LogReal
    ratio_log: float
    params: Mapping[str, object] = field(default_factory=dict)
    passed: bool = False

    @classmethod
    def from_sides(
        cls,
        lhs: LogReal,
        rhs: LogReal,
        params: Mapping[str, object] | None = None,
        tolerance_factor: float = DEFAULT_TOLERANCE_FACTOR,
    ) -> "CheckReport":
        ratio = lhs.log_or() - rhs.log_or()
        if lhs.is_zero:
            ratio = -math.inf
        record = dict(params or {})
        record.setdefault("tolerance_factor", tolerance_factor)
        return cls(lhs, rhs, ratio, record, ratio <= math.log(tolerance_factor))


def reports_to_csv(reports: list[CheckReport], index_key: str = "N") -> str:
    """Rows ``N,lhs_log,rhs_log,ratio_log,pass`` (index pulled from params)."""
    lines = [f"{index_key},lhs_log,rhs_log,ratio_log,pass"]
    for rep in reports:
        lines.append(
            ",".join(
                [
                    str(rep.params.get(index_key, "")),
                    repr(rep.lhs.log_or()),
                    repr(rep.rhs.log_or()),
                    repr(rep.ratio_log),
                    "true" if rep.passed else "false",
                ]
            )
        )
    return "\n".join(lines) + "\n"
