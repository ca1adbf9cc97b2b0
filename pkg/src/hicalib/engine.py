"""Block-structured simulation of complete forecaster runs.

Every level's prediction is frozen within leaf blocks of S consecutive days
(the finest iteration), so a run advances block by block: exact-rational
bookkeeping (predictions, canonical keys, calibration tallies) happens only
at iteration boundaries, while the per-day work (outcome draws and, in
sampled mode, the uniform sub-forecaster draw) is delegated to the kernel
backend (compiled if built, pure otherwise; bit-identical either way).

Randomness contract: streams are derived per (seed, role, trial); outcome
draws and level draws use disjoint streams; a day whose outcome law is a
point mass (denominator 1, e.g. the adaptive argmin adversary) consumes no
outcome draw.  Together with the counter-based generator this makes every
run a pure function of (config, adversary, seed, trial, mode).

The aggregate RunResult carries everything the metrics and certificate
modules need: per-leaf outcome counts, the key of every level iteration,
and exact integer tallies for DCE/ECE; per-day outcomes are retained only
for desk-scale horizons (or when a sink consumes them streaming).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import backend
from .errors import ConfigInvalid
from .forecaster import (
    ForecastConfig,
    MixtureRecord,
    merge_mixture,
    smoothed_prediction,
)
from .metrics import DayRecord, Transcript
from .rng import ROLE_LEVEL, ROLE_OUTCOME, Stream, stream_key
from .simplex import Outcome, PredictionKey, RationalDist

RETAIN_LIMIT = 1 << 20
KERNEL_DEN_LIMIT = 1 << 62


@dataclass
class RunResult:
    """Aggregate view of one completed run."""

    cfg: ForecastConfig
    seed: int
    trial: int
    mode: str
    adversary_name: str
    backend_name: str
    keys: list[PredictionKey]
    level_iter_keys: list[list[int]]
    leaf_counts: list[list[int]]
    dce_tallies: dict[int, list[int]]
    ece_tallies: dict[int, list[int]] | None
    outcomes: list[int] | None
    realized_levels: list[int] | None
    adv_dists: list[RationalDist] | None

    @property
    def T(self) -> int:
        return self.cfg.T

    def block_key_ids(self, b: int) -> tuple[int, ...]:
        """Key id of each level's prediction during leaf block b (0-based)."""
        cfg = self.cfg
        return tuple(
            self.level_iter_keys[l][b // cfg.H ** (cfg.L - 1 - l)]
            for l in range(cfg.L)
        )

    def block_entries(self, b: int) -> tuple[tuple[int, int], ...]:
        """Merged (key id, multiplicity) mixture entries for block b, key-sorted."""
        mults: dict[int, int] = {}
        for kid in self.block_key_ids(b):
            mults[kid] = mults.get(kid, 0) + 1
        return tuple(sorted(mults.items(), key=lambda kv: self.keys[kv[0]]))


def _sim_days_bigden(
    ostream: Stream,
    n_days: int,
    cums: list[int],
    den: int,
    lstream: Stream,
    n_levels: int,
    sample_levels: bool,
    record_outcomes: bool,
    record_levels: bool,
):
    """Arbitrary-precision twin of the kernel's sim_days for huge denominators."""
    d = len(cums)
    counts = [0] * d
    tally = [[0] * d for _ in range(n_levels)] if sample_levels else None
    outcomes = [] if record_outcomes else None
    levels = [] if record_levels else None
    for _ in range(n_days):
        u = ostream.below(den)
        idx = 0
        while cums[idx] <= u:
            idx += 1
        counts[idx] += 1
        if outcomes is not None:
            outcomes.append(idx + 1)
        if sample_levels:
            v = lstream.below(n_levels)
            tally[v][idx] += 1
            if levels is not None:
                levels.append(v)
    return counts, tally, outcomes, levels


def _drive(
    cfg: ForecastConfig,
    seed: int,
    trial: int,
    mode: str,
    adversary=None,
    replay_outcomes: list[int] | None = None,
    replay_levels: list[int] | None = None,
    adversary_name: str | None = None,
    retain_outcomes: bool | None = None,
    record_adv: bool = False,
    on_block: Callable | None = None,
    on_day: Callable | None = None,
) -> RunResult:
    if mode not in ("distributional", "sampled"):
        raise ConfigInvalid(f"mode must be distributional or sampled, got {mode!r}")
    sampled = mode == "sampled"
    d, L, H, S, m = cfg.d, cfg.L, cfg.H, cfg.S, cfg.m
    T = cfg.T
    n_blocks = H**L
    replaying = replay_outcomes is not None
    if replaying and len(replay_outcomes) != T:
        raise ConfigInvalid(f"replay needs {T} outcomes, got {len(replay_outcomes)}")
    if sampled and replaying and replay_levels is not None and len(replay_levels) != T:
        raise ConfigInvalid("replay_levels length does not match T")
    if retain_outcomes is None:
        retain_outcomes = T <= RETAIN_LIMIT
    need_outcomes = retain_outcomes or on_day is not None
    need_levels = sampled and need_outcomes

    kern = backend.active()
    okey, octr = stream_key(seed, ROLE_OUTCOME, trial), 0
    lkey, lctr = stream_key(seed, ROLE_LEVEL, trial), 0

    per_iter = [H ** (L - l) for l in range(1, L + 1)]  # blocks per level-l iteration
    per_interval = [H ** (L - l + 1) for l in range(1, L + 1)]
    t_level = [cfg.period(l) for l in range(1, L + 1)]

    totals = [0] * d
    snap_interval = [[0] * d for _ in range(L)]
    snap_iter = [[0] * d for _ in range(L)]
    h = [1] * L
    cur_kid = [-1] * L

    keys: list[PredictionKey] = []
    key_index: dict[PredictionKey, int] = {}
    level_iter_keys: list[list[int]] = [[] for _ in range(L)]
    dce_tallies: dict[int, list[int]] = {}
    ece_tallies: dict[int, list[int]] | None = {} if sampled else None
    leaf_counts: list[list[int]] = []
    outcomes_all: list[int] | None = [] if retain_outcomes else None
    levels_all: list[int] | None = [] if (sampled and retain_outcomes) else None
    adv_dists: list[RationalDist] | None = [] if record_adv else None

    def intern(key: PredictionKey) -> int:
        kid = key_index.get(key)
        if kid is None:
            kid = key_index[key] = len(keys)
            keys.append(key)
        return kid

    def flush_iteration(li: int) -> None:
        rec = dce_tallies.get(cur_kid[li])
        if rec is None:
            rec = dce_tallies[cur_kid[li]] = [0] * (d + 1)
        rec[0] += t_level[li]
        snap = snap_iter[li]
        for i in range(d):
            rec[1 + i] += totals[i] - snap[i]

    for b in range(n_blocks):
        for li in range(L):
            if b % per_iter[li] == 0:
                if b > 0:
                    flush_iteration(li)
                if b % per_interval[li] == 0:
                    snap_interval[li] = totals.copy()
                    h[li] = 1
                else:
                    h[li] += 1
                snap = snap_interval[li]
                pred = smoothed_prediction(
                    [totals[i] - snap[i] for i in range(d)], h[li], t_level[li], d, m
                )
                kid = intern(pred.key)
                cur_kid[li] = kid
                level_iter_keys[li].append(kid)
                snap_iter[li] = totals.copy()

        t_first = b * S + 1
        mix_rec: MixtureRecord | None = None
        if (adversary is not None and adversary.adaptive) or on_block is not None:
            mix_rec = merge_mixture(t_first, (keys[k] for k in cur_kid), L)
        if on_block is not None:
            on_block(b, t_first, S, tuple(cur_kid), keys)

        # --- produce the block's outcomes -----------------------------------
        if replaying:
            seg = replay_outcomes[b * S : (b + 1) * S]
            counts = [0] * d
            for x in seg:
                counts[x - 1] += 1
            tally = None
            lv_seg = None
            if sampled and replay_levels is not None:
                lv_seg = replay_levels[b * S : (b + 1) * S]
                tally = [[0] * d for _ in range(L)]
                for x, v in zip(seg, lv_seg):
                    tally[v][x - 1] += 1
            out_seg = seg if need_outcomes else None
            dists: list[RationalDist] = []
        elif adversary.constant_within_block:
            dist = adversary.next(t_first, mixture=mix_rec)
            dists = [dist]
            octr, lctr, counts, tally, out_seg, lv_seg = _produce_const(
                dist, S, d, L, sampled, need_outcomes, need_levels, kern,
                okey, octr, lkey, lctr,
            )
        else:
            counts = [0] * d
            tally = [[0] * d for _ in range(L)] if sampled else None
            out_seg = [] if need_outcomes else None
            lv_seg = [] if need_levels else None
            dists = []
            for j in range(S):
                dist = adversary.next(t_first + j, mixture=mix_rec)
                dists.append(dist)
                octr, lctr, c1, t1, o1, l1 = _produce_const(
                    dist, 1, d, L, sampled, need_outcomes, need_levels, kern,
                    okey, octr, lkey, lctr,
                )
                for i in range(d):
                    counts[i] += c1[i]
                if sampled:
                    for v in range(L):
                        for i in range(d):
                            tally[v][i] += t1[v][i]
                if out_seg is not None:
                    out_seg.extend(o1)
                if lv_seg is not None:
                    lv_seg.extend(l1)

        # --- fold the block into the aggregates ------------------------------
        leaf_counts.append(counts)
        for i in range(d):
            totals[i] += counts[i]
        if sampled and tally is not None:
            for v in range(L):
                row = tally[v]
                if any(row):
                    vec = ece_tallies.setdefault(cur_kid[v], [0] * d)
                    for i in range(d):
                        vec[i] += row[i]
        if outcomes_all is not None:
            outcomes_all.extend(out_seg)
        if levels_all is not None:
            levels_all.extend(lv_seg)
        if adv_dists is not None:
            if replaying:
                adv_dists.extend([None] * S)
            elif len(dists) == 1:
                adv_dists.extend(dists * S)
            else:
                adv_dists.extend(dists)
        if on_day is not None:
            for j in range(S):
                on_day(
                    t_first + j,
                    out_seg[j],
                    lv_seg[j] if lv_seg is not None else None,
                    dists[0] if len(dists) == 1 else (dists[j] if dists else None),
                )

    for li in range(L):
        flush_iteration(li)

    return RunResult(
        cfg=cfg,
        seed=seed,
        trial=trial,
        mode=mode,
        adversary_name=adversary_name
        or (adversary.name if adversary is not None else "replay"),
        backend_name=backend.active_name(),
        keys=keys,
        level_iter_keys=level_iter_keys,
        leaf_counts=leaf_counts,
        dce_tallies=dce_tallies,
        ece_tallies=ece_tallies,
        outcomes=outcomes_all,
        realized_levels=levels_all,
        adv_dists=adv_dists,
    )


def _produce_const(dist, n, d, L, sampled, want_out, want_lvl, kern, okey, octr, lkey, lctr):
    """Simulate n days of one fixed outcome law; point masses draw nothing."""
    if dist.d != d:
        raise ConfigInvalid(f"adversary dimension {dist.d} != forecaster d {d}")
    if dist.denominator == 1:
        idx = dist.numerators.index(1)
        counts = [0] * d
        counts[idx] = n
        out_seg = [idx + 1] * n if want_out else None
        tally = None
        lv_seg = None
        if sampled:
            lctr, lv_counts, lv_seg = kern.draw_level_counts(
                lkey, lctr, n, L, want_lvl
            )
            tally = [[0] * d for _ in range(L)]
            for v in range(L):
                tally[v][idx] = lv_counts[v]
    else:
        cums = []
        acc = 0
        for nu in dist.numerators:
            acc += nu
            cums.append(acc)
        if dist.denominator < KERNEL_DEN_LIMIT:
            octr, lctr, counts, tally, out_seg, lv_seg = kern.sim_days(
                okey, octr, n, cums, dist.denominator, d,
                lkey, lctr, L, sampled, want_out, want_lvl,
            )
        else:
            ostream = Stream(okey, octr)
            lstream = Stream(lkey, lctr)
            counts, tally, out_seg, lv_seg = _sim_days_bigden(
                ostream, n, cums, dist.denominator, lstream, L, sampled,
                want_out, want_lvl,
            )
            octr, lctr = ostream.counter, lstream.counter
    return octr, lctr, counts, tally, out_seg, lv_seg


def simulate(
    cfg: ForecastConfig,
    adversary,
    seed: int,
    mode: str = "distributional",
    trial: int = 0,
    retain_outcomes: bool | None = None,
    record_adv: bool = False,
    on_block: Callable | None = None,
    on_day: Callable | None = None,
) -> RunResult:
    """Run the hierarchical forecaster against an adversary for T days."""
    return _drive(
        cfg,
        seed,
        trial,
        mode,
        adversary=adversary,
        retain_outcomes=retain_outcomes,
        record_adv=record_adv,
        on_block=on_block,
        on_day=on_day,
    )


def run_from_outcomes(
    cfg: ForecastConfig,
    outcomes: list[int],
    realized_levels: list[int] | None = None,
    adversary_name: str = "replay",
) -> RunResult:
    """Rebuild the full run implied by a raw outcome history (no randomness)."""
    mode = "sampled" if realized_levels is not None else "distributional"
    return _drive(
        cfg,
        seed=0,
        trial=0,
        mode=mode,
        replay_outcomes=outcomes,
        replay_levels=realized_levels,
        adversary_name=adversary_name,
    )


def _tally_abs_sum(keys, tallies: dict[int, list[int]], weight_den: int) -> float:
    total = 0.0
    for kid in sorted(tallies, key=lambda k: keys[k]):
        rec = tallies[kid]
        n_days, vec = rec[0], rec[1:]
        nums, den = keys[kid]
        for i, nu in enumerate(nums):
            total += float(abs(Fraction(nu * n_days - den * vec[i], den * weight_den)))
    return total


def dce_value(run: RunResult) -> float:
    """Exact distributional calibration error; equals metrics.dce on the expansion."""
    return _tally_abs_sum(run.keys, run.dce_tallies, run.cfg.L)


def ece_value(run: RunResult) -> float:
    """Trajectory calibration error of the sampled predictions."""
    if run.ece_tallies is None:
        raise ConfigInvalid("run was not simulated in sampled mode")
    padded = {kid: [sum(vec)] + list(vec) for kid, vec in run.ece_tallies.items()}
    return _tally_abs_sum(run.keys, padded, 1)


def expand_to_transcript(run: RunResult) -> Transcript:
    """Materialize per-day records; requires retained outcomes (desk-scale runs)."""
    if run.outcomes is None:
        raise ConfigInvalid("outcomes were not retained for this run")
    cfg = run.cfg
    S = cfg.S
    days: list[DayRecord] = []
    cached_b = -1
    mix = None
    kid_by_level: tuple[int, ...] = ()
    for t in range(1, cfg.T + 1):
        b = (t - 1) // S
        if b != cached_b:
            cached_b = b
            kid_by_level = run.block_key_ids(b)
            mix_entries = run.block_entries(b)
            mix = tuple(
                (run.keys[kid], Fraction(mult, cfg.L)) for kid, mult in mix_entries
            )
        realized = None
        if run.realized_levels is not None:
            realized = run.keys[kid_by_level[run.realized_levels[t - 1]]]
        days.append(
            DayRecord(
                t=t,
                mixture=MixtureRecord(t, mix),
                outcome=Outcome(run.outcomes[t - 1]),
                realized=realized,
                adversary_dist=run.adv_dists[t - 1] if run.adv_dists else None,
            )
        )
    return Transcript(cfg.d, days, config=cfg)
