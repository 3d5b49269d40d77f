"""Closed-form sample requirements and probability bounds.

All arithmetic is binary64.  ``sample_bound`` is the per-hypothesis sample
requirement used by both learners; the per-hypothesis risks sum (Basel
series) to at most ``delta`` over the whole enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG_BASEL = math.log(math.pi**2 / 6)


@dataclass(frozen=True)
class AccuracyParams:
    delta: float
    epsilon: float

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 < self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {self.epsilon}")

    @property
    def worst_case_error(self) -> float:
        """delta * 1 + (1 - delta) * epsilon."""
        return self.delta + (1 - self.delta) * self.epsilon


def _check_index(i: int) -> None:
    if i < 1:
        raise ValueError(f"hypothesis index must be >= 1, got {i}")


def sample_bound_interior(i: int, acc: AccuracyParams) -> float:
    _check_index(i)
    return (2 * math.log(i) + math.log(1 / acc.delta) + LOG_BASEL) / acc.epsilon


def sample_bound(i: int, acc: AccuracyParams) -> int:
    """m(i) = ceil((2 ln i + ln(1/delta) + ln(pi^2/6)) / epsilon)."""
    return math.ceil(sample_bound_interior(i, acc))


def per_hypothesis_risk(i: int, acc: AccuracyParams) -> float:
    _check_index(i)
    return 6 / math.pi**2 * acc.delta / i**2


def risk_chain(i: int, acc: AccuracyParams) -> tuple[float, float, float]:
    """((1-eps)^m(i), exp(-m(i) eps), per-hypothesis risk) for the computed m(i)."""
    m = sample_bound(i, acc)
    return ((1 - acc.epsilon) ** m, math.exp(-m * acc.epsilon), per_hypothesis_risk(i, acc))


def risk_chain_holds(i: int, acc: AccuracyParams) -> bool:
    survive, exponential, risk = risk_chain(i, acc)
    return survive <= exponential <= risk


def adversary_rho_bound(d: int, m: int, acc: AccuracyParams) -> float:
    """1 - 2 d (delta + (1 - delta) eps) / (d - m); negative values are vacuous."""
    if not 0 <= m < d:
        raise ValueError(f"need 0 <= m < d, got m={m}, d={d}")
    return 1 - 2 * d * acc.worst_case_error / (d - m)


def rho_ceiling(acc: AccuracyParams) -> float:
    return 1 - 2 * acc.worst_case_error
