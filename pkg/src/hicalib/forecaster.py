"""The L-level hierarchical forecaster.

Level ``l`` (1-based) splits the horizon of ``T = S * H**L`` days into
intervals of ``T_{l-1} = S * H**(L-l+1)`` days, works through each interval
in ``H`` iterations of ``T_l = S * H**(L-l)`` days, and during one iteration
predicts the smoothed empirical outcome frequency of the *completed*
iterations of the current interval:

    prediction  =  (counts + (m * T_l / d) * ones) / ((h - 1 + m) * T_l)

held fixed for the iteration's ``T_l`` days.  ``m`` is the integer smoothing
mass (the accuracy parameter is ``eps = 1/m``), so predictions are exact
rationals with denominator ``d * (h - 1 + m) * T_l`` and full support.  Each
day the forecaster's output distribution puts weight ``1/L`` on every
level's current prediction (equal keys merged); in sampled mode a level is
drawn uniformly at random.

Parameters (d, L, H, S, m) are decoupled so that desk-scale horizons exist;
``coupled_parameters`` recovers the regime the guarantees target, with T
growing like d**3 * m**6 * (m**4)**L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BudgetExceeded,
    ConfigInvalid,
    InconsistentCounts,
    OutOfOrderDay,
    OutOfRange,
)
from .rng import Stream
from .simplex import (
    Outcome,
    PredictionKey,
    RationalDist,
    make_rational_dist,
)

DEFAULT_DAY_BUDGET = 2**26


@dataclass(frozen=True)
class ForecastConfig:
    """Forecaster parameters; all derived horizons are exact integers."""

    d: int
    L: int
    H: int
    S: int
    m: int

    def __post_init__(self):
        if self.d < 2:
            raise ConfigInvalid(f"d must be >= 2, got {self.d}")
        if self.L < 1:
            raise ConfigInvalid(f"L must be >= 1, got {self.L}")
        if self.H < 2:
            raise ConfigInvalid(f"H must be >= 2, got {self.H}")
        if self.S < 1:
            raise ConfigInvalid(f"S must be >= 1, got {self.S}")
        if self.m < 1:
            raise ConfigInvalid(f"m must be >= 1, got {self.m}")

    @property
    def T(self) -> int:
        return self.S * self.H**self.L

    def period(self, level: int) -> int:
        """T_level = S * H**(L - level); period(0) = T, period(L) = S."""
        if not 0 <= level <= self.L:
            raise OutOfRange(f"level {level} outside [0, {self.L}]")
        return self.S * self.H ** (self.L - level)

    @property
    def epsilon(self) -> Fraction:
        return Fraction(1, self.m)


def coupled_parameters(
    d: int, epsilon: float, max_days: int = DEFAULT_DAY_BUDGET, allow_large: bool = False
) -> ForecastConfig:
    """Coupled parameters: m = ceil(1/eps), H = m**4, L = ceil(ln(d) m**2), S = d**3 m**6.

    The 1e-9 nudge keeps float artifacts (1/0.1 = 10.000000000000002) from
    bumping a ceiling that is an exact integer in real arithmetic.
    """
    if not 0.0 < epsilon < 1.0:
        raise ConfigInvalid(f"epsilon must be in (0, 1), got {epsilon}")
    m = math.ceil(1.0 / epsilon - 1e-9)
    if m < 2:
        raise ConfigInvalid(f"epsilon={epsilon} gives m={m}, H={m**4} < 2")
    H = m**4
    L = math.ceil(math.log(d) * m * m - 1e-9)
    S = d**3 * m**6
    cfg = ForecastConfig(d=d, L=L, H=H, S=S, m=m)
    if cfg.T > max_days and not allow_large:
        raise BudgetExceeded(
            f"T = {cfg.T} exceeds the day budget {max_days}; pass allow_large=True"
        )
    return cfg


def interval_of(t: int, level: int, cfg: ForecastConfig) -> tuple[int, ...]:
    """Mixed-radix coordinates (h_1, ..., h_level) of day t, each in [1, H].

    h_r = floor((t-1) / T_r) mod H + 1; the prefix of length l locates the
    level-l iteration (equivalently the level-(l+1) interval) containing t.
    """
    if not 1 <= level <= cfg.L:
        raise OutOfRange(f"level {level} outside [1, {cfg.L}]")
    if not 1 <= t <= cfg.T:
        raise OutOfRange(f"day {t} outside [1, {cfg.T}]")
    return tuple(
        ((t - 1) // cfg.period(r)) % cfg.H + 1 for r in range(1, level + 1)
    )


def smoothed_prediction(
    counts: Sequence[int], h: int, t_level: int, d: int, m: int
) -> RationalDist:
    """The prediction for iteration h given outcome counts of iterations < h.

    Exact form: numerators d*C_i + m*T_level over denominator
    d*(h-1+m)*T_level, then gcd-reduced.
    """
    if sum(counts) != (h - 1) * t_level:
        raise InconsistentCounts(
            f"counts sum {sum(counts)} != (h-1)*T_level = {(h - 1) * t_level}"
        )
    smooth = m * t_level
    return make_rational_dist(
        tuple(d * c + smooth for c in counts), d * (h - 1 + m) * t_level
    )


@dataclass
class LevelState:
    """One sub-forecaster's mutable bookkeeping within its current interval."""

    level: int
    counts: list[int]
    pending: list[int]
    h: int
    prediction: RationalDist


def predict_level(state: LevelState, cfg: ForecastConfig) -> RationalDist:
    """Recompute the level's current prediction from its completed-iteration counts."""
    return smoothed_prediction(
        state.counts, state.h, cfg.period(state.level), cfg.d, cfg.m
    )


@dataclass(frozen=True)
class MixtureRecord:
    """Day-t prediction distribution: merged (key, weight) entries, weights sum to 1."""

    t: int
    entries: tuple[tuple[PredictionKey, Fraction], ...]

    def weight_of(self, key: PredictionKey) -> Fraction:
        for k, w in self.entries:
            if k == key:
                return w
        return Fraction(0)


def merge_mixture(t: int, keys: Iterable[PredictionKey], L: int) -> MixtureRecord:
    """Weight 1/L per level, equal keys merged, entries sorted for determinism."""
    mults: dict[PredictionKey, int] = {}
    for k in keys:
        mults[k] = mults.get(k, 0) + 1
    entries = tuple((k, Fraction(n, L)) for k, n in sorted(mults.items()))
    return MixtureRecord(t, entries)


class HierarchicalForecaster:
    """Day-by-day reference implementation (the engine must agree with it exactly)."""

    def __init__(self, cfg: ForecastConfig):
        self.cfg = cfg
        u = smoothed_prediction([0] * cfg.d, 1, cfg.period(1), cfg.d, cfg.m)
        # Eq. at h=1 is the pure smoothing term: uniform at every level.
        self.states = [
            LevelState(l, [0] * cfg.d, [0] * cfg.d, 1, u) for l in range(1, cfg.L + 1)
        ]
        self._day = 1

    @property
    def next_day(self) -> int:
        return self._day

    def level_state(self, level: int) -> LevelState:
        return self.states[level - 1]

    def mixture(self) -> MixtureRecord:
        """The prediction distribution q_t for the upcoming day."""
        return merge_mixture(
            self._day, (st.prediction.key for st in self.states), self.cfg.L
        )

    def observe(self, outcome: Outcome | int, t: int | None = None) -> None:
        """Consume day t's outcome; rolls iteration/interval boundaries after t."""
        cfg = self.cfg
        if self._day > cfg.T:
            raise OutOfRange(f"horizon T = {cfg.T} already consumed")
        if t is not None and t != self._day:
            raise OutOfOrderDay(f"expected day {self._day}, got {t}")
        x = outcome.index if isinstance(outcome, Outcome) else int(outcome)
        if not 1 <= x <= cfg.d:
            raise OutOfRange(f"outcome {x} outside [1, {cfg.d}]")
        day = self._day
        self._day += 1
        for st in self.states:
            st.pending[x - 1] += 1
            t_level = cfg.period(st.level)
            if day % t_level == 0:  # level's iteration ends after this day
                if day % cfg.period(st.level - 1) == 0:  # enclosing interval ends
                    st.counts = [0] * cfg.d
                    st.h = 1
                else:
                    st.counts = [c + p for c, p in zip(st.counts, st.pending)]
                    st.h += 1
                st.pending = [0] * cfg.d
                st.prediction = predict_level(st, cfg)


def sample_prediction(mix: MixtureRecord, stream: Stream) -> PredictionKey:
    """Draw a key with its mixture weight; exact, deterministic given the stream."""
    dens = [w.denominator for _, w in mix.entries]
    common = math.lcm(*dens)
    u = stream.below(common)
    acc = 0
    for key, w in mix.entries:
        acc += w.numerator * (common // w.denominator)
        if u < acc:
            return key
    raise AssertionError("mixture weights do not sum to 1")


def sample_level(L: int, stream: Stream) -> int:
    """Uniform level in [1, L]; the forecaster's per-day randomization."""
    return stream.below(L) + 1

