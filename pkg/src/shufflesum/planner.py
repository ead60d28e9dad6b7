"""Closed-form security planning.

The protocol with k shuffled shares among n users over Z_m achieves
average-case statistical distance 2**-sigma for

    sigma = ((k - 1) * (log2(n) - log2(e)) - log2(m)) / 2

valid for n >= 19, k >= 3, sigma >= 1; the randomized-inputs variant turns
the same sigma into a worst-case guarantee at the cost of one extra clear
message per user. Inverting for k gives the minimal number of shuffled
messages for a target sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

LOG2_E = math.log2(math.e)

# Fixing up a float ceiling: arguments within 2**-40 of an integer are
# nudged down before ceil, then minimality is re-verified exactly against
# sigma_for.
_CEIL_GUARD = 2.0**-40

PRECONDITION_LABELS = ("n>=19", "k>=3", "m-bound", "sigma>=1")


def sigma_for(k: int, n: int, m: int) -> float:
    """Security exponent (bits) achieved by k shuffled shares, n users, Z_m.

    May be negative; the guarantee is only meaningful for n >= 19, k >= 3
    and a result >= 1, but the formula is evaluated as stated everywhere.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    return ((k - 1) * (math.log2(n) - LOG2_E) - math.log2(m)) / 2


@dataclass(frozen=True)
class PlanResult:
    """Outcome of planning: minimal shuffled-message count and its sigma.

    ``preconditions_ok`` flags whether the analyzed regime covers the plan
    (n >= 19, k >= 3, requested sigma >= 1); outside it the numbers are
    still the formula values, just without a proved guarantee.
    """

    k_shuffled: int
    total_messages: int
    achieved_sigma: float
    preconditions_ok: dict[str, bool]


def plan_shuffled_k(sigma: float, n: int, m: int) -> PlanResult:
    """Minimal k with sigma_for(k, n, m) >= sigma; total adds 1 clear message.

    Raises ValueError for n <= 2 (the formula's denominator log2(n) - log2(e)
    must be positive), sigma <= 0, or m < 2.
    """
    if n <= 2:
        raise ValueError(f"need n >= 3 so that log2(n) > log2(e), got n={n}")
    if sigma <= 0:
        raise ValueError(f"need sigma > 0, got {sigma}")
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    denom = math.log2(n) - LOG2_E
    arg = (2 * sigma + math.log2(m)) / denom + 1
    if abs(arg - round(arg)) < _CEIL_GUARD:
        arg -= _CEIL_GUARD
    k = max(1, math.ceil(arg))
    while sigma_for(k, n, m) < sigma:
        k += 1
    while k > 1 and sigma_for(k - 1, n, m) >= sigma:
        k -= 1
    achieved = sigma_for(k, n, m)
    flags = {
        "n>=19": n >= 19,
        "k>=3": k >= 3,
        "sigma>=1": sigma >= 1,
    }
    return PlanResult(k, k + 1, achieved, flags)


def baseline_k_lower_bound(sigma: float) -> float:
    """Message floor 2*sigma from the earlier analysis, for comparison tables."""
    if sigma <= 0:
        raise ValueError(f"need sigma > 0, got {sigma}")
    return 2.0 * sigma


def _m_bound_ok(n: int, k: int, m: int) -> bool:
    # m <= (1/2) * (n/e)**(k-1), compared in log2 space to avoid overflow
    if n < 1 or k < 1 or m < 1:
        return False
    return math.log2(m) <= -1.0 + (k - 1) * (math.log2(n) - LOG2_E)


def validate_params(n: int, k: int, m: int) -> list[str]:
    """Labels of the analysis preconditions violated by (n, k, m).

    Checks n >= 19, k >= 3, m <= (1/2)(n/e)**(k-1) ("m-bound") and
    sigma_for(k, n, m) >= 1. An empty list means the proved regime applies.
    """
    violations = []
    if n < 19:
        violations.append("n>=19")
    if k < 3:
        violations.append("k>=3")
    if not _m_bound_ok(n, k, m):
        violations.append("m-bound")
    if n < 2 or k < 1 or m < 2 or sigma_for(k, n, m) < 1:
        violations.append("sigma>=1")
    return violations
