"""Stochastic link-level entanglement generation model.

A link makes repeated attempts; each attempt succeeds with probability p.
A failed attempt costs ``t_fail = tau_p + tau_d`` (attempt plus cooling
reset), a successful one costs ``t_success = tau_p + classical_delay``
(attempt plus heralding acknowledgment over the classical channel). The
number of failures before the first success is geometric, which gives the
closed-form expected generation time

    T = ((1 - p) * t_fail + p * t_success) / p
      = (1 - p) / p * t_fail + t_success

The entanglement rate is 1/T while the elapsed time since generation stays
within the link's memory coherence window (boundary inclusive), and 0 once
outside it.

``retrial_monte_carlo`` is the validation oracle: it simulates the retrial
process directly (one uniform draw per attempt, success iff u < p) and
reports the sample mean and standard error. It shares no arithmetic with
the closed form. Randomness comes from numpy's PCG64 seeded explicitly, so
every result is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ZeroProbabilityError
from .topology import LinkParams, classical_delay


@dataclass(frozen=True)
class LinkTiming:
    """Per-link timing summary: attempt durations, expected time, rate."""

    t_success_s: float
    t_fail_s: float
    expected_time_s: float
    rate_hz: float


def attempt_durations(link: LinkParams) -> tuple[float, float]:
    """(t_success_s, t_fail_s) for one attempt on this link."""
    t_success = link.tau_p_s + classical_delay(link)
    t_fail = link.tau_p_s + link.tau_d_s
    return t_success, t_fail


def retrial_expected_time(p_success: float, t_fail_s: float, t_success_s: float) -> float:
    """Expected total duration of the geometric retrial process."""
    if p_success <= 0:
        raise ZeroProbabilityError("p_success must be > 0; expected time diverges at 0")
    return ((1.0 - p_success) * t_fail_s + p_success * t_success_s) / p_success


def expected_generation_time(link: LinkParams) -> float:
    """Expected time to generate one entangled pair on the link, seconds."""
    t_success, t_fail = attempt_durations(link)
    return retrial_expected_time(link.p_success, t_fail, t_success)


def entanglement_rate(link: LinkParams, elapsed_s: float = 0.0) -> float:
    """Pairs per second, or 0 once the coherence window has been exceeded.

    The window boundary is inclusive: elapsed_s == coherence_time_s still
    counts as coherent.
    """
    if elapsed_s < 0:
        raise ValueError(f"elapsed_s must be >= 0, got {elapsed_s}")
    if elapsed_s > link.coherence_time_s:
        return 0.0
    return 1.0 / expected_generation_time(link)


def retrial_monte_carlo(
    p_success: float,
    t_fail_s: float,
    t_success_s: float,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Simulate the retrial process; return (sample mean, standard error).

    Each trial draws one uniform per attempt and succeeds when u < p; the
    trial's duration is failures * t_fail_s + t_success_s. Trials are
    vectorized in rounds over the still-pending ones. Standard error is 0
    for a single trial.
    """
    if p_success <= 0:
        raise ZeroProbabilityError("p_success must be > 0; the retrial process never ends at 0")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = make_rng(seed)
    failures = np.zeros(trials, dtype=np.int64)
    pending = np.arange(trials)
    while pending.size:
        u = rng.random(pending.size)
        still_failed = u >= p_success
        pending = pending[still_failed]
        failures[pending] += 1
    # Durations are failures * t_fail + t_success; mean and std transform
    # linearly, and integer sums below 2**53 are exact in float64.
    mean = t_fail_s * float(failures.mean()) + t_success_s
    if trials == 1:
        return mean, 0.0
    stderr = t_fail_s * float(failures.std(ddof=1)) / math.sqrt(trials)
    return mean, stderr


def monte_carlo_generation_time(link: LinkParams, trials: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo estimate of expected_generation_time for a link."""
    t_success, t_fail = attempt_durations(link)
    return retrial_monte_carlo(link.p_success, t_fail, t_success, trials, seed)


def link_timing(link: LinkParams, elapsed_s: float = 0.0) -> LinkTiming:
    """All timing quantities for a link at the given elapsed time."""
    t_success, t_fail = attempt_durations(link)
    expected = retrial_expected_time(link.p_success, t_fail, t_success)
    rate = entanglement_rate(link, elapsed_s)
    return LinkTiming(
        t_success_s=t_success,
        t_fail_s=t_fail,
        expected_time_s=expected,
        rate_hz=rate,
    )
