"""Computation-quality metrics: MSE, NMSE, outage probability and CER."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MetricsReport:
    """Accumulated error statistics over a set of trials.

    ``confidence_halfwidth`` is the normal-approximation 95% halfwidth for the
    MSE estimate. ``outage_rate`` / ``cer`` are None when not requested.
    """

    mse: float
    nmse: float
    outage_rate: float | None
    cer: float | None
    trial_count: int
    confidence_halfwidth: float
    epsilon: float | None = None


def compute_metrics(truth, estimates, epsilon: float | None = None,
                    discrete: bool = False) -> MetricsReport:
    """Per Eqs. of mean-squared error, outage probability and error rate.

    ``estimates`` may be complex; errors are measured with the complex
    modulus. A degenerate all-zero truth vector yields nmse = 0 by convention.
    """
    t = np.asarray(truth)
    e = np.asarray(estimates)
    if t.shape != e.shape:
        raise ValueError("truth and estimates must have equal length")
    if t.size < 1:
        raise ValueError("need at least one trial")
    sq = np.abs(t - e) ** 2
    mse = float(sq.mean())
    denom = float(np.abs(t).astype(float).__pow__(2).mean())
    nmse = 0.0 if (mse == 0.0 and denom == 0.0) else (mse / denom if denom > 0 else float("inf"))
    halfwidth = float(1.96 * sq.std(ddof=1) / np.sqrt(sq.size)) if sq.size > 1 else 0.0

    outage = None
    if epsilon is not None:
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        outage = float((np.abs(t - e) >= epsilon).mean())

    cer = float((t != e).mean()) if discrete else None
    return MetricsReport(mse, nmse, outage, cer, int(t.size), halfwidth, epsilon)
