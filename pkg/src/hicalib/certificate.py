"""Pathwise numerical verification of the calibration upper-bound analysis.

Every inequality used to bound the forecaster's distributional calibration
error holds for each individual outcome sequence, so a completed run can be
audited end to end:

  A0  the DCE itself,
  A1  after attributing error to (level, iteration) cells (triangle step),
  A2  after swapping each cell's prediction for its successor (smoothness),
  A3  after Cauchy-Schwarz + Pinsker turn l1 residuals into an average KL,

with A0 <= A1 <= A2 <= A3 required (A0..A2 compared in exact rationals, the
irrational A3 in floats at 1e-9).  The average KL K-bar is in turn bounded
through a per-interval cross-entropy ("pseudo-regret") integral bound and an
exact entropy-telescoping identity across levels, both checked here too.

Successor predictions at h = H+1 are evaluated from the same smoothing
formula even though they are never played: the analysis sums over them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .engine import RunResult
from .forecaster import smoothed_prediction
from .simplex import (
    RationalDist,
    entropy,
    kl_divergence,
    l1_distance_exact,
    make_rational_dist,
)

TOL = 1e-9


@dataclass(frozen=True)
class CheckRow:
    """One audited inequality or identity; pass means margin >= -1e-9."""

    name: str
    scope: str
    measured: float
    bound: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class IntervalStats:
    """Per (level, iteration) cell: average outcome, predictions, residuals."""

    level: int
    interval_index: int  # h_{<l} flat index in [0, H**(l-1))
    h: int               # iteration within the interval, in [1, H]
    average_outcome: RationalDist
    prediction: RationalDist
    successor_prediction: RationalDist
    l1_to_prediction: Fraction
    l1_to_successor: Fraction
    kl_to_successor: float
    entropy_outcome: float


@dataclass(frozen=True)
class PseudoRegretResult:
    level: int
    interval_index: int
    lhs: float
    tight_bound: float
    coarse_bound: float
    passed: bool
    coarse_applies: bool


@dataclass(frozen=True)
class TelescopeResult:
    lhs: float
    rhs: float
    residual: float


@dataclass
class CertificateReport:
    run_id: str
    passed: bool
    checks: list[CheckRow]
    chain: dict[str, float]

    def to_json_dict(self) -> dict:
        return {
            "chain": self.chain,
            "checks": [
                {
                    "bound": c.bound,
                    "margin": c.margin,
                    "measured": c.measured,
                    "name": c.name,
                    "pass": c.passed,
                    "scope": c.scope,
                }
                for c in self.checks
            ],
            "passed": self.passed,
            "run_id": self.run_id,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=1) + "\n"

    def csv_rows(self) -> list[list[str]]:
        rows = [["name", "scope", "measured", "bound", "margin", "pass"]]
        for c in self.checks:
            rows.append(
                [c.name, c.scope, repr(c.measured), repr(c.bound), repr(c.margin), str(c.passed)]
            )
        return rows


class RunView:
    """Interval-tree statistics of a completed run, recomputed from leaf counts."""

    def __init__(self, run: RunResult):
        self.run = run
        cfg = run.cfg
        self.cfg = cfg
        d, H, L = cfg.d, cfg.H, cfg.L
        counts = [list(c) for c in run.leaf_counts]
        by_depth = [counts]
        for depth in range(L - 1, -1, -1):
            level_below = by_depth[0]
            agg = []
            for j in range(0, len(level_below), H):
                acc = [0] * d
                for child in level_below[j : j + H]:
                    for i in range(d):
                        acc[i] += child[i]
                agg.append(acc)
            by_depth.insert(0, agg)
        self.counts_by_depth = by_depth  # index = depth 0..L
        self.dist_by_depth = [
            [make_rational_dist(c, cfg.period(depth)) for c in nodes]
            for depth, nodes in enumerate(by_depth)
        ]
        self.ent_by_depth = [
            [entropy(x) for x in nodes] for nodes in self.dist_by_depth
        ]
        # Predictions z_1..z_{H+1} per (level, interval); z_{H+1} is the
        # never-played successor of the last iteration.
        self.preds: list[list[list[RationalDist]]] = []
        for level in range(1, L + 1):
            t_level = cfg.period(level)
            per_level = []
            children = self.counts_by_depth[level]
            for v in range(H ** (level - 1)):
                prefix = [0] * d
                zs = [smoothed_prediction(prefix, 1, t_level, d, cfg.m)]
                for h in range(1, H + 1):
                    child = children[v * H + h - 1]
                    prefix = [prefix[i] + child[i] for i in range(d)]
                    zs.append(smoothed_prediction(prefix, h + 1, t_level, d, cfg.m))
                per_level.append(zs)
            self.preds.append(per_level)

    def interval_stats(self, level: int, v: int, h: int) -> IntervalStats:
        x = self.dist_by_depth[level][v * self.cfg.H + h - 1]
        zs = self.preds[level - 1][v]
        pred, succ = zs[h - 1], zs[h]
        return IntervalStats(
            level=level,
            interval_index=v,
            h=h,
            average_outcome=x,
            prediction=pred,
            successor_prediction=succ,
            l1_to_prediction=l1_distance_exact(pred, x),
            l1_to_successor=l1_distance_exact(succ, x),
            kl_to_successor=kl_divergence(x, succ),
            entropy_outcome=self.ent_by_depth[level][v * self.cfg.H + h - 1],
        )

    def iter_interval_stats(self) -> Iterator[IntervalStats]:
        H = self.cfg.H
        for level in range(1, self.cfg.L + 1):
            for v in range(H ** (level - 1)):
                for h in range(1, H + 1):
                    yield self.interval_stats(level, v, h)


def _view(run) -> RunView:
    return run if isinstance(run, RunView) else RunView(run)


def check_smoothness(run) -> tuple[list[CheckRow], float, int]:
    """Per-step bound l1(z_h, z_{h+1}) <= 2/(h+m), checked in exact rationals.

    Returns (one row per level, max gap observed, number of violations).
    """
    view = _view(run)
    cfg = view.cfg
    rows = []
    max_gap = 0.0
    violations = 0
    for level in range(1, cfg.L + 1):
        level_max = 0.0
        min_margin = math.inf
        bad = 0
        for zs in view.preds[level - 1]:
            for h in range(1, cfg.H + 1):
                gap = l1_distance_exact(zs[h - 1], zs[h])
                bound = Fraction(2, h + cfg.m)
                if gap > bound:
                    bad += 1
                level_max = max(level_max, float(gap))
                min_margin = min(min_margin, float(bound - gap))
        violations += bad
        rows.append(
            CheckRow(
                name="smoothness-step",
                scope=f"level={level}",
                measured=level_max,
                bound=2.0 / cfg.m,
                margin=min_margin,
                passed=bad == 0 and level_max <= 2.0 / cfg.m,
            )
        )
        max_gap = max(max_gap, level_max)
    return rows, max_gap, violations


def check_pseudo_regret(run, level: int, interval_index: int) -> PseudoRegretResult:
    """Cross-entropy cost of one interval vs. its integral bounds.

    lhs  = sum_h <w_h, ln(1/z_{h+1})>
    tight = [(H+1+m)ln(H+1+m) - (1+m)ln(1+m) - H]
            + sum_i [-(W_i+m/d)ln(W_i+m/d) + (m/d)ln(m/d) + W_i]
    coarse = H*Ent(interval average) + H/m**2, the fixed-slack form
            (asserted only when the tight bound implies it; the m**-2 slack
            needs large m to dominate the (1+m)(1+ln(H+1)) boundary terms).
    """
    view = _view(run)
    cfg = view.cfg
    H, d, m = cfg.H, cfg.d, cfg.m
    t_level = cfg.period(level)
    children = view.counts_by_depth[level]
    zs = view.preds[level - 1][interval_index]
    lhs = 0.0
    w_total = [0] * d
    for h in range(1, H + 1):
        child = children[interval_index * H + h - 1]
        z = zs[h]
        for i in range(d):
            c = child[i]
            if c:
                lhs += (c / t_level) * math.log(
                    Fraction(z.denominator, z.numerators[i])
                )
            w_total[i] += child[i]
    c_smooth = m / d
    tight = (H + 1 + m) * math.log(H + 1 + m) - (1 + m) * math.log(1 + m) - H
    for i in range(d):
        # -(W+c)ln(W+c) + c ln(c) + W, the 0 ln 0 = 0 convention built in (W=0 -> 0)
        w = w_total[i] / t_level
        tight += -(w + c_smooth) * math.log(w + c_smooth) + c_smooth * math.log(c_smooth) + w
    ent_parent = view.ent_by_depth[level - 1][interval_index]
    coarse = H * ent_parent + H / (m * m)
    coarse_applies = tight <= coarse + TOL
    passed = lhs <= tight + TOL and (not coarse_applies or lhs <= coarse + TOL)
    return PseudoRegretResult(
        level=level,
        interval_index=interval_index,
        lhs=lhs,
        tight_bound=tight,
        coarse_bound=coarse,
        passed=passed,
        coarse_applies=coarse_applies,
    )


def check_pseudo_regret_all(run) -> tuple[list[CheckRow], list[PseudoRegretResult]]:
    view = _view(run)
    cfg = view.cfg
    rows = []
    results = []
    for level in range(1, cfg.L + 1):
        min_margin = math.inf
        worst = None
        ok = True
        for v in range(cfg.H ** (level - 1)):
            res = check_pseudo_regret(view, level, v)
            results.append(res)
            margin = res.tight_bound - res.lhs
            if margin < min_margin:
                min_margin = margin
                worst = res
            ok = ok and res.passed
        rows.append(
            CheckRow(
                name="pseudo-regret-tight",
                scope=f"level={level}",
                measured=worst.lhs,
                bound=worst.tight_bound,
                margin=min_margin,
                passed=ok,
            )
        )
    return rows, results


def check_telescope(run) -> TelescopeResult:
    """Exact identity: the weighted entropy-drop sum collapses across levels.

    (1/L) sum_l H^{-l} sum_{h<l} [H Ent(parent) - sum_h Ent(child)]
        = (1/L) [Ent(global average) - H^{-L} sum_leaves Ent(leaf)].
    """
    view = _view(run)
    cfg = view.cfg
    H, L = cfg.H, cfg.L
    lhs = 0.0
    for level in range(1, L + 1):
        inner = 0.0
        parents = view.ent_by_depth[level - 1]
        children = view.ent_by_depth[level]
        for v in range(H ** (level - 1)):
            inner += H * parents[v] - sum(children[v * H : v * H + H])
        lhs += inner / H**level
    lhs /= L
    rhs = (
        view.ent_by_depth[0][0] - sum(view.ent_by_depth[L]) / H**L
    ) / L
    return TelescopeResult(lhs=lhs, rhs=rhs, residual=lhs - rhs)


def _dce_exact(run: RunResult) -> Fraction:
    total = Fraction(0)
    for kid, rec in run.dce_tallies.items():
        n_days, vec = rec[0], rec[1:]
        nums, den = run.keys[kid]
        abs_sum = sum(abs(nu * n_days - den * v) for nu, v in zip(nums, vec))
        total += Fraction(abs_sum, den * run.cfg.L)
    return total


def check_recomputation(run: RunResult, view: RunView | None = None) -> CheckRow:
    """Recorded iteration keys must equal predictions recomputed from raw counts."""
    view = view or RunView(run)
    cfg = view.cfg
    mismatches = 0
    cells = 0
    for level in range(1, cfg.L + 1):
        recorded = run.level_iter_keys[level - 1]
        for v in range(cfg.H ** (level - 1)):
            zs = view.preds[level - 1][v]
            for h in range(1, cfg.H + 1):
                cells += 1
                if run.keys[recorded[v * cfg.H + h - 1]] != zs[h - 1].key:
                    mismatches += 1
    return CheckRow(
        name="recomputation-identity",
        scope="all levels",
        measured=float(mismatches),
        bound=0.0,
        margin=-float(mismatches),
        passed=mismatches == 0,
    )


def check_chain(run, run_id: str = "") -> CertificateReport:
    """Full certificate: chain A0<=A1<=A2<=A3 plus all supporting checks."""
    view = _view(run)
    run = view.run
    cfg = view.cfg
    T, L, m, d = cfg.T, cfg.L, cfg.m, cfg.d

    a0 = _dce_exact(run)
    a1 = Fraction(0)
    a2_sum = Fraction(0)
    k_bar = 0.0
    for st in view.iter_interval_stats():
        t_level = cfg.period(st.level)
        a1 += t_level * st.l1_to_prediction
        a2_sum += t_level * st.l1_to_successor
        k_bar += st.kl_to_successor / cfg.H**st.level
    a1 /= L
    a2 = a2_sum / L + Fraction(2 * T, m)
    k_bar /= L
    a3 = T * math.sqrt(2.0 * k_bar) + 2.0 * T / m

    smooth_rows, max_gap, violations = check_smoothness(view)
    pr_rows, pr_results = check_pseudo_regret_all(view)
    tele = check_telescope(view)

    c_bar = 0.0
    coarse_regime = True
    for res in pr_results:
        correction = res.tight_bound - cfg.H * view.ent_by_depth[res.level - 1][res.interval_index]
        c_bar += correction / cfg.H**res.level
        coarse_regime = coarse_regime and res.coarse_applies
    c_bar /= L
    kl_budget = math.log(d) / L + c_bar

    checks = [
        CheckRow(
            name="chain-step1-triangle",
            scope="A0 <= A1",
            measured=float(a0),
            bound=float(a1),
            margin=float(a1 - a0),
            passed=a0 <= a1,
        ),
        CheckRow(
            name="chain-step2-successor-swap",
            scope="A1 <= A2",
            measured=float(a1),
            bound=float(a2),
            margin=float(a2 - a1),
            passed=a1 <= a2,
        ),
        CheckRow(
            name="chain-step3-cs-pinsker",
            scope="A2 <= A3",
            measured=float(a2),
            bound=a3,
            margin=a3 - float(a2),
            passed=a3 - float(a2) >= -TOL,
        ),
        CheckRow(
            name="chain-step4-kl-budget",
            scope="K_bar <= ln(d)/L + C_bar",
            measured=k_bar,
            bound=kl_budget,
            margin=kl_budget - k_bar,
            passed=kl_budget - k_bar >= -TOL,
        ),
        CheckRow(
            name="telescope-identity",
            scope="levels 1..L",
            measured=tele.lhs,
            bound=tele.rhs,
            margin=TOL - abs(tele.residual),
            passed=abs(tele.residual) <= TOL,
        ),
    ]
    if coarse_regime:
        coarse_budget = math.log(d) / L + 1.0 / (m * m)
        checks.append(
            CheckRow(
                name="chain-step4-fixed-slack",
                scope="K_bar <= ln(d)/L + 1/m^2",
                measured=k_bar,
                bound=coarse_budget,
                margin=coarse_budget - k_bar,
                passed=coarse_budget - k_bar >= -TOL,
            )
        )
    checks.extend(smooth_rows)
    checks.extend(pr_rows)
    checks.append(check_recomputation(run, view))

    chain = {
        "A0": float(a0),
        "A1": float(a1),
        "A2": float(a2),
        "A3": a3,
        "K_bar": k_bar,
        "C_bar": c_bar,
        "telescope_residual": tele.residual,
        "dce_per_day": float(a0) / T,
        "max_smoothness_gap": max_gap,
        "smoothness_violations": float(violations),
    }
    return CertificateReport(
        run_id=run_id,
        passed=all(c.passed for c in checks),
        checks=checks,
        chain=chain,
    )


def certify_run(run, run_id: str = "") -> CertificateReport:
    return check_chain(run, run_id=run_id)
