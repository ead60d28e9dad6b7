"""Statistical helpers shared across the test suite."""

from __future__ import annotations

import math

from scipy import stats

# significance for every goodness-of-fit assertion in the suite
SIGNIFICANCE = 1e-6


def chisq_pvalue(observed: list[int], expected_probs: list[float]) -> float:
    """One-sample chi-square p-value against exact cell probabilities."""
    n = sum(observed)
    expected = [p * n for p in expected_probs]
    return stats.chisquare(observed, expected).pvalue


def two_sample_chisq_pvalue(counts_a: dict, counts_b: dict) -> float:
    """Chi-square homogeneity p-value for two empirical distributions."""
    keys = sorted(set(counts_a) | set(counts_b))
    table = [
        [counts_a.get(key, 0) for key in keys],
        [counts_b.get(key, 0) for key in keys],
    ]
    return stats.chi2_contingency(table).pvalue


def binomial_sigma(n: int, p: float) -> float:
    return math.sqrt(n * p * (1.0 - p))
