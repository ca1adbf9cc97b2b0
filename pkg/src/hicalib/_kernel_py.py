"""Pure-Python day-simulation kernel; semantics must match _speedups exactly.

Per day: one rejection-sampled uniform below the distribution's denominator
decides the outcome (linear scan of cumulative numerators), then, when level
sampling is on, one uniform below n_levels picks the realized sub-forecaster.
Counters advance one per accepted-or-rejected draw, so the two backends
consume identical stream positions.
"""

from __future__ import annotations

from .rng import GOLDEN, MASK64, mix64

BACKEND_NAME = "pure"

_MOD = 1 << 64


def _below(key: int, ctr: int, n: int) -> tuple[int, int]:
    threshold = (_MOD - n) % n
    while True:
        ctr += 1
        r = mix64((key + GOLDEN * ctr) & MASK64)
        if r >= threshold:
            return r % n, ctr


def sim_days(
    okey: int,
    octr: int,
    n_days: int,
    cum_nums: list[int],
    den: int,
    d: int,
    lkey: int,
    lctr: int,
    n_levels: int,
    sample_levels: bool,
    record_outcomes: bool,
    record_levels: bool,
):
    """Simulate n_days i.i.d. draws from one distribution.

    Returns (octr, lctr, counts[d], tally[n_levels][d] | None,
    outcomes 1-based | None, levels 0-based | None).
    """
    counts = [0] * d
    tally = [[0] * d for _ in range(n_levels)] if sample_levels else None
    outcomes = [] if record_outcomes else None
    levels = [] if record_levels else None
    for _ in range(n_days):
        u, octr = _below(okey, octr, den)
        idx = 0
        while cum_nums[idx] <= u:
            idx += 1
        counts[idx] += 1
        if outcomes is not None:
            outcomes.append(idx + 1)
        if sample_levels:
            v, lctr = _below(lkey, lctr, n_levels)
            tally[v][idx] += 1
            if levels is not None:
                levels.append(v)
    return octr, lctr, counts, tally, outcomes, levels


def draw_level_counts(
    lkey: int, lctr: int, n_days: int, n_levels: int, record: bool
):
    """n_days uniform draws over [0, n_levels); returns (lctr, counts, seq | None)."""
    counts = [0] * n_levels
    seq = [] if record else None
    for _ in range(n_days):
        v, lctr = _below(lkey, lctr, n_levels)
        counts[v] += 1
        if seq is not None:
            seq.append(v)
    return lctr, counts, seq
