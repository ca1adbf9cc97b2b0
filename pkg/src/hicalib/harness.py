"""Experiment driver: seeded runs, persistence, oracles, and statistical checks.

Configuration files are flat ``key = value`` lines (unknown keys are
errors).  Transcripts are JSONL: a header record with the full
configuration, then one record per day whose values are all exact integers
or integer pairs, so identical (config, seed) reruns are byte-identical.
Certification replays the raw outcome history, checks the recorded
mixtures against the recomputed predictions, and then runs the full proof
certificate on the rebuilt run.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import statistics
from dataclasses import dataclass
from fractions import Fraction

from . import engine, metrics
from .adversary import (
    AdaptiveArgminAdversary,
    EpsSchedule,
    HardSeqConfig,
    HardSequenceAdversary,
    IIDAdversary,
    day_distribution,
    sample_outcome,
    sample_tau_tree,
)
from .certificate import CheckRow, CertificateReport, certify_run
from .errors import (
    AdaptiveAdversaryUnsupported,
    ConfigInvalid,
    CorruptRecord,
    HicalibError,
    InvalidForecaster,
    MissingTranscript,
)
from .forecaster import (
    DEFAULT_DAY_BUDGET,
    ForecastConfig,
    MixtureRecord,
    sample_prediction,
)
from .metrics import (
    METRICS_CSV_COLUMNS,
    DayRecord,
    Transcript,
    dce,
    ece_estimate,
    exhaustive_ece,
    metrics_csv_row,
    oracle_dce_direct,
)
from .rng import RNG_ID, ROLE_GENERIC, ROLE_LEVEL, ROLE_OUTCOME, ROLE_TAU, Stream, derive_stream, stream_key
from .simplex import (
    Outcome,
    RationalDist,
    dist_from_json,
    make_rational_dist,
    uniform,
)

TRANSCRIPT_FORMAT = "hicalib-transcript/1"
TRANSCRIPT_NAME = "transcript.jsonl"
METRICS_NAME = "metrics.csv"
CERTIFICATE_JSON = "certificate.json"
CERTIFICATE_CSV = "certificate.csv"

RUN_KEYS = {
    "d", "L", "H", "S", "m", "mode", "seed", "adversary",
    "iid_q", "hard_R", "hard_K", "record_adversary",
}
RUN_REQUIRED = ("d", "L", "H", "S", "m")
CONCENTRATION_KEYS = {"d", "L", "H", "m", "adversary", "iid_q", "S_low", "S_high", "seed"}


# -- flat config files ---------------------------------------------------------

def parse_config_file(path: str, allowed: set[str]) -> dict[str, str]:
    """Flat key = value lines; '#' comment lines allowed; unknown keys rejected."""
    if not os.path.exists(path):
        raise ConfigInvalid(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigInvalid(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in allowed:
                raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
            if key in out:
                raise ConfigInvalid(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value
    return out


def _int_of(kv: dict[str, str], key: str) -> int:
    try:
        return int(kv[key])
    except (KeyError, ValueError):
        raise ConfigInvalid(f"key {key!r} missing or not an integer") from None


def _parse_iid_q(text: str, d: int) -> RationalDist:
    """Comma-separated nonnegative integer weights; denominator is their sum."""
    try:
        units = [int(x) for x in text.split(",")]
    except ValueError:
        raise ConfigInvalid(f"iid_q must be comma-separated integers, got {text!r}") from None
    if len(units) != d:
        raise ConfigInvalid(f"iid_q has {len(units)} entries, d={d}")
    total = sum(units)
    if total <= 0 or any(u < 0 for u in units):
        raise ConfigInvalid("iid_q weights must be nonnegative with positive sum")
    return make_rational_dist(units, total)


@dataclass(frozen=True)
class RunConfig:
    cfg: ForecastConfig
    mode: str
    seed: int
    adversary_kind: str
    iid_q: RationalDist | None
    hard: HardSeqConfig | None
    record_adversary: bool

    def config_dict(self) -> dict:
        out = {
            "adversary": self.adversary_kind,
            "d": self.cfg.d,
            "H": self.cfg.H,
            "L": self.cfg.L,
            "S": self.cfg.S,
            "m": self.cfg.m,
            "mode": self.mode,
            "record_adversary": self.record_adversary,
            "seed": self.seed,
        }
        if self.iid_q is not None:
            out["iid_q"] = self.iid_q.to_json()
        if self.hard is not None:
            out["hard_R"] = self.hard.R
            out["hard_K"] = self.hard.K
        return out

    @property
    def run_id(self) -> str:
        blob = json.dumps(self.config_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def build_run_config(kv: dict[str, str], seed_override: int | None = None) -> RunConfig:
    for key in RUN_REQUIRED:
        if key not in kv:
            raise ConfigInvalid(f"required key {key!r} missing")
    cfg = ForecastConfig(
        d=_int_of(kv, "d"), L=_int_of(kv, "L"), H=_int_of(kv, "H"),
        S=_int_of(kv, "S"), m=_int_of(kv, "m"),
    )
    mode = kv.get("mode", "distributional")
    if mode not in ("distributional", "sampled"):
        raise ConfigInvalid(f"mode must be distributional or sampled, got {mode!r}")
    if seed_override is not None:
        seed = seed_override
    elif "seed" in kv:
        seed = _int_of(kv, "seed")
    else:
        raise ConfigInvalid("seed required (config key or --seed)")
    kind = kv.get("adversary", "iid")
    iid_q = None
    hard = None
    if kind == "iid":
        iid_q = _parse_iid_q(kv["iid_q"], cfg.d) if "iid_q" in kv else uniform(cfg.d)
    elif kind == "adaptive_argmin":
        pass
    elif kind == "hard":
        if "hard_R" not in kv or "hard_K" not in kv:
            raise ConfigInvalid("hard adversary needs hard_R and hard_K")
        hard = HardSeqConfig(R=_int_of(kv, "hard_R"), K=_int_of(kv, "hard_K"))
        if hard.d != cfg.d:
            raise ConfigInvalid(f"hard adversary d = {hard.d} != forecaster d = {cfg.d}")
        if hard.T != cfg.T:
            raise ConfigInvalid(f"hard adversary T = {hard.T} != forecaster T = {cfg.T}")
    else:
        raise ConfigInvalid(f"unknown adversary {kind!r}")
    record = kv.get("record_adversary", "false").lower()
    if record not in ("true", "false"):
        raise ConfigInvalid("record_adversary must be true or false")
    return RunConfig(
        cfg=cfg, mode=mode, seed=seed, adversary_kind=kind,
        iid_q=iid_q, hard=hard, record_adversary=record == "true",
    )


def make_adversary(rc: RunConfig, trial: int = 0):
    if rc.adversary_kind == "iid":
        return IIDAdversary(rc.iid_q)
    if rc.adversary_kind == "adaptive_argmin":
        return AdaptiveArgminAdversary(rc.cfg.d)
    return HardSequenceAdversary(rc.hard, seed=rc.seed, trial=trial)


# -- cmd_run -------------------------------------------------------------------

@dataclass(frozen=True)
class RunOutput:
    run_id: str
    transcript_path: str
    metrics_path: str
    dce: float
    ece: float | None


def _key_json_frag(key) -> str:
    return json.dumps([list(key.numerators), key.denominator])


def cmd_run(config_path: str, seed: int, out_dir: str, allow_large: bool = False) -> RunOutput:
    """Simulate one run and persist transcript JSONL plus a metrics CSV row."""
    kv = parse_config_file(config_path, RUN_KEYS)
    rc = build_run_config(kv, seed_override=seed)
    if rc.cfg.T > DEFAULT_DAY_BUDGET and not allow_large:
        raise ConfigInvalid(
            f"T = {rc.cfg.T} exceeds the default day budget {DEFAULT_DAY_BUDGET}; "
            "pass --allow-large to opt in"
        )
    os.makedirs(out_dir, exist_ok=True)
    transcript_path = os.path.join(out_dir, TRANSCRIPT_NAME)
    metrics_path = os.path.join(out_dir, METRICS_NAME)
    adversary = make_adversary(rc)

    header = {
        "T": rc.cfg.T,
        "config": rc.config_dict(),
        "format": TRANSCRIPT_FORMAT,
        "rng": RNG_ID,
    }
    sampled = rc.mode == "sampled"
    with open(transcript_path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        block_state = {"mix": "", "realized": []}

        def on_block(b, t_first, n_days, kids, keys):
            mults: dict[int, int] = {}
            for kid in kids:
                mults[kid] = mults.get(kid, 0) + 1
            entries = sorted(mults.items(), key=lambda kv_: keys[kv_[0]])
            ser = []
            for kid, mult in entries:
                w = Fraction(mult, rc.cfg.L)
                ser.append([json.loads(_key_json_frag(keys[kid])), [w.numerator, w.denominator]])
            block_state["mix"] = json.dumps(ser)
            block_state["realized"] = [_key_json_frag(keys[kid]) for kid in kids]

        dist_frags: dict = {}

        def on_day(t, outcome, level, dist):
            parts = []
            if rc.record_adversary and dist is not None:
                frag = dist_frags.get(dist.key)
                if frag is None:
                    if len(dist_frags) > 64:
                        dist_frags.clear()
                    frag = dist_frags[dist.key] = json.dumps(dist.to_json())
                parts.append(f'"adv_dist": {frag}')
            parts.append(f'"mixture": {block_state["mix"]}')
            parts.append(f'"outcome": {outcome}')
            if sampled:
                parts.append(f'"realized": {block_state["realized"][level]}')
            parts.append(f'"t": {t}')
            fh.write("{" + ", ".join(parts) + "}\n")

        run = engine.simulate(
            rc.cfg,
            adversary,
            rc.seed,
            mode=rc.mode,
            retain_outcomes=False,
            on_block=on_block,
            on_day=on_day,
        )

    dce_val = engine.dce_value(run)
    ece_val = engine.ece_value(run) if sampled else None
    row = metrics_csv_row(
        rc.run_id, rc.seed, rc.cfg, rc.adversary_kind, dce_val,
        ece_mean=ece_val, ece_stderr=None, trials=1,
    )
    _write_csv(metrics_path, [METRICS_CSV_COLUMNS, [row[c] for c in METRICS_CSV_COLUMNS]])
    return RunOutput(rc.run_id, transcript_path, metrics_path, dce_val, ece_val)


def _write_csv(path: str, rows) -> None:
    import csv

    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerows(rows)


# -- cmd_certify ---------------------------------------------------------------

def _parse_header(line: str) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorruptRecord(f"header is not JSON: {exc}") from None
    if header.get("format") != TRANSCRIPT_FORMAT:
        raise CorruptRecord(f"unexpected transcript format {header.get('format')!r}")
    return header


def _canonical_key_of(obj) -> tuple:
    try:
        dist = dist_from_json(obj)
    except HicalibError as exc:
        raise CorruptRecord(f"bad distribution in transcript: {exc}") from None
    if dist.to_json() != [list(obj[0]), obj[1]]:
        raise CorruptRecord(f"non-canonical distribution in transcript: {obj!r}")
    return dist.key


def cmd_certify(run_dir: str) -> tuple[CertificateReport, int]:
    """Replay, cross-check, and certify a persisted run; exit 0 iff all checks pass."""
    transcript_path = os.path.join(run_dir, TRANSCRIPT_NAME)
    if not os.path.exists(transcript_path):
        raise MissingTranscript(f"no {TRANSCRIPT_NAME} in {run_dir}")
    with open(transcript_path, encoding="utf-8") as fh:
        header = _parse_header(fh.readline())
        conf = header.get("config", {})
        try:
            cfg = ForecastConfig(
                d=conf["d"], L=conf["L"], H=conf["H"], S=conf["S"], m=conf["m"]
            )
        except (KeyError, TypeError) as exc:
            raise CorruptRecord(f"bad config in header: {exc}") from None
        outcomes = []
        for lineno, line in enumerate(fh, 2):
            try:
                rec = json.loads(line)
                t, outcome = rec["t"], rec["outcome"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorruptRecord(f"line {lineno}: {exc}") from None
            if t != lineno - 1:
                raise CorruptRecord(f"line {lineno}: day {t} out of order")
            if not isinstance(outcome, int) or not 1 <= outcome <= cfg.d:
                raise CorruptRecord(f"line {lineno}: outcome {outcome!r} out of range")
            outcomes.append(outcome)
    if len(outcomes) != cfg.T:
        raise CorruptRecord(f"expected {cfg.T} day records, found {len(outcomes)}")

    rebuilt = engine.run_from_outcomes(
        cfg, outcomes, adversary_name=conf.get("adversary", "unknown")
    )

    # Second streaming pass: recorded mixtures and realized keys must match
    # the predictions recomputed from the raw outcome history.
    mismatches = 0
    with open(transcript_path, encoding="utf-8") as fh:
        fh.readline()
        cached_block = -1
        expected: dict | None = None
        block_keys: set | None = None
        for lineno, line in enumerate(fh, 2):
            rec = json.loads(line)
            t = rec["t"]
            b = (t - 1) // cfg.S
            if b != cached_block:
                cached_block = b
                entries = rebuilt.block_entries(b)
                expected = {
                    rebuilt.keys[kid]: Fraction(mult, cfg.L) for kid, mult in entries
                }
                block_keys = set(expected)
            try:
                seen = {}
                for key_obj, weight in rec.get("mixture", []):
                    key = _canonical_key_of(key_obj)
                    seen[key] = seen.get(key, Fraction(0)) + Fraction(weight[0], weight[1])
                if sum(seen.values(), Fraction(0)) != 1:
                    raise CorruptRecord(f"line {lineno}: mixture weights do not sum to 1")
            except (TypeError, IndexError, ZeroDivisionError) as exc:
                raise CorruptRecord(f"line {lineno}: bad mixture: {exc}") from None
            if seen != expected:
                mismatches += 1
                continue
            if "realized" in rec:
                if _canonical_key_of(rec["realized"]) not in block_keys:
                    mismatches += 1

    consistency = CheckRow(
        name="transcript-consistency",
        scope="recorded mixtures vs replayed predictions",
        measured=float(mismatches),
        bound=0.0,
        margin=-float(mismatches),
        passed=mismatches == 0,
    )
    base = certify_run(rebuilt, run_id=_header_run_id(header))
    report = CertificateReport(
        run_id=base.run_id,
        passed=base.passed and consistency.passed,
        checks=[consistency, *base.checks],
        chain=base.chain,
    )
    with open(os.path.join(run_dir, CERTIFICATE_JSON), "w", encoding="utf-8") as fh:
        fh.write(report.to_json())
    _write_csv(os.path.join(run_dir, CERTIFICATE_CSV), report.csv_rows())
    return report, 0 if report.passed else 1


def _header_run_id(header: dict) -> str:
    blob = json.dumps(header.get("config", {}), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


# -- cmd_lowerbound ------------------------------------------------------------

@dataclass(frozen=True)
class LowerBoundReport:
    R: int
    K: int
    forecaster: str
    trials: int
    mean_dce: float
    stderr: float
    eps1_T: float
    passed: bool


def _factor_horizon(T: int) -> tuple[int, int, int]:
    """Smallest H >= 2 with H**L | T; returns (L, H, S)."""
    for H in range(2, T + 1):
        L = 0
        x = T
        while x % H == 0:
            x //= H
            L += 1
        if L >= 1:
            return L, H, T // H**L
    raise ConfigInvalid(f"cannot factor T = {T} as S * H**L with H >= 2")


def cmd_lowerbound(
    R: int, K: int, forecaster: str, trials: int, seed: int, m: int = 1
) -> LowerBoundReport:
    """Monte Carlo DCE of a forecaster against the hard sequence, vs eps_1 * T."""
    if forecaster not in ("truthful", "uniform", "hierarchical"):
        raise InvalidForecaster(f"unknown forecaster {forecaster!r}")
    if trials < 2:
        raise ConfigInvalid(f"need trials >= 2, got {trials}")
    hcfg = HardSeqConfig(R=R, K=K)
    fcfg = None
    if forecaster == "hierarchical":
        L, H, S = _factor_horizon(hcfg.T)
        fcfg = ForecastConfig(d=hcfg.d, L=L, H=H, S=S, m=m)
    values = []
    for trial in range(trials):
        tree = sample_tau_tree(hcfg, derive_stream(seed, ROLE_TAU, trial))
        if forecaster == "hierarchical":
            adv = HardSequenceAdversary(hcfg, tree=tree)
            run = engine.simulate(fcfg, adv, seed, trial=trial, retain_outcomes=False)
            values.append(engine.dce_value(run))
            continue
        ostream = derive_stream(seed, ROLE_OUTCOME, trial)
        days = []
        uniform_key = uniform(hcfg.d).key
        for t in range(1, hcfg.T + 1):
            p_t = day_distribution(tree, t, hcfg)
            x_t = sample_outcome(p_t, ostream)
            key = p_t.key if forecaster == "truthful" else uniform_key
            mix = MixtureRecord(t, ((key, Fraction(1)),))
            days.append(DayRecord(t=t, mixture=mix, outcome=x_t, adversary_dist=p_t))
        values.append(dce(Transcript(hcfg.d, days)))
    mean = sum(values) / trials
    stderr = statistics.stdev(values) / math.sqrt(trials)
    eps1_T = float(EpsSchedule(R)[1]) * hcfg.T
    return LowerBoundReport(
        R=R, K=K, forecaster=forecaster, trials=trials,
        mean_dce=mean, stderr=stderr, eps1_T=eps1_T,
        passed=mean - 3 * stderr >= eps1_T,
    )


# -- cmd_oracle ----------------------------------------------------------------

@dataclass(frozen=True)
class OracleSummary:
    dce_cases: int
    dce_failures: int
    max_dce_diff: float
    ece_cases: int
    ece_failures: int
    passed: bool


def random_transcript(stream: Stream, max_T: int, max_d: int, max_keys_per_day: int = 3) -> Transcript:
    """Random desk-scale transcript with exact rational mixtures."""
    T = 1 + stream.below(max_T)
    d = 2 + stream.below(max_d - 1)
    n_keys = 1 + stream.below(4)
    pool = []
    for _ in range(n_keys):
        units = [stream.below(9) for _ in range(d)]
        if not any(units):
            units[stream.below(d)] = 1
        key = make_rational_dist(units, sum(units)).key
        if key not in pool:
            pool.append(key)
    days = []
    for t in range(1, T + 1):
        k = 1 + stream.below(min(max_keys_per_day, len(pool)))
        chosen = []
        remaining = list(pool)
        for _ in range(k):
            chosen.append(remaining.pop(stream.below(len(remaining))))
        weights = [1 + stream.below(9) for _ in chosen]
        total = sum(weights)
        entries = tuple(
            (key, Fraction(w, total)) for key, w in sorted(zip(chosen, weights))
        )
        days.append(
            DayRecord(
                t=t,
                mixture=MixtureRecord(t, entries),
                outcome=Outcome(1 + stream.below(d)),
            )
        )
    return Transcript(d, days)


def cmd_oracle(trials: int, max_T: int, max_d: int, seed: int, ece_cases: int = 5,
               ece_trials: int = 2000) -> OracleSummary:
    """Randomized equivalence checks: dce vs its brute-force oracle, ECE vs enumeration."""
    if trials < 1:
        raise ConfigInvalid(f"need trials >= 1, got {trials}")
    if not 2 <= max_d <= 6:
        raise ConfigInvalid(f"max_d must be in [2, 6], got {max_d}")
    if not 1 <= max_T <= 64:
        raise ConfigInvalid(f"max_T must be in [1, 64], got {max_T}")
    gen = derive_stream(seed, ROLE_GENERIC)
    dce_failures = 0
    max_diff = 0.0
    for _ in range(trials):
        tr = random_transcript(gen, max_T, max_d)
        diff = abs(dce(tr) - oracle_dce_direct(tr))
        max_diff = max(max_diff, diff)
        if diff > 1e-12:
            dce_failures += 1
    ece_failures = 0
    for case in range(ece_cases):
        tr = random_transcript(gen, min(10, max_T), 2, max_keys_per_day=2)
        exact = exhaustive_ece(tr)

        def factory(trial, _tr=tr, _case=case):
            stream = Stream(stream_key(seed + 1 + _case, ROLE_LEVEL, trial))
            days = []
            for rec in _tr.days:
                key = sample_prediction(rec.mixture, stream)
                days.append(
                    DayRecord(rec.t, rec.mixture, rec.outcome, realized=key)
                )
            return metrics.ece_trajectory(Transcript(_tr.d, days))

        est = ece_estimate(factory, ece_trials)
        tol = 3 * est.stderr if est.stderr > 0 else 1e-12
        if abs(est.mean - exact) > tol:
            ece_failures += 1
    return OracleSummary(
        dce_cases=trials,
        dce_failures=dce_failures,
        max_dce_diff=max_diff,
        ece_cases=ece_cases,
        ece_failures=ece_failures,
        passed=dce_failures == 0 and ece_failures == 0,
    )


# -- cmd_concentration ---------------------------------------------------------

@dataclass(frozen=True)
class ConcentrationArm:
    S: int
    T: int
    mean_gap_per_day: float
    stderr: float


@dataclass(frozen=True)
class ConcentrationReport:
    low: ConcentrationArm
    high: ConcentrationArm
    separation_sigma: float
    decreasing_pass: bool
    bound: float
    bound_pass: bool
    trials: int

    @property
    def passed(self) -> bool:
        return self.decreasing_pass and self.bound_pass


def concentration_arm(cfg: ForecastConfig, q: RationalDist, seed: int, trials: int) -> ConcentrationArm:
    """Mean per-day |ECE - DCE| over seeded sampled runs sharing outcomes per trial."""
    gaps = []
    adv = IIDAdversary(q)
    for trial in range(trials):
        run = engine.simulate(
            cfg, adv, seed, mode="sampled", trial=trial, retain_outcomes=False
        )
        gap = abs(engine.ece_value(run) - engine.dce_value(run)) / cfg.T
        gaps.append(gap)
    mean = sum(gaps) / trials
    stderr = statistics.stdev(gaps) / math.sqrt(trials)
    return ConcentrationArm(S=cfg.S, T=cfg.T, mean_gap_per_day=mean, stderr=stderr)


def cmd_concentration(config_path: str, trials: int, seed: int) -> ConcentrationReport:
    """Sampling-vs-mixture gap shrinks with S; the mean gap obeys the 5*eps budget."""
    kv = parse_config_file(config_path, CONCENTRATION_KEYS)
    if trials < 2:
        raise ConfigInvalid(f"need trials >= 2, got {trials}")
    kind = kv.get("adversary", "iid")
    if kind == "adaptive_argmin":
        raise AdaptiveAdversaryUnsupported(
            "concentration compares ECE and DCE on a shared outcome law; "
            "adaptive adversaries couple outcomes to the sampled predictions"
        )
    if kind != "iid":
        raise ConfigInvalid("concentration supports the iid adversary only")
    d = _int_of(kv, "d")
    base = dict(d=d, L=_int_of(kv, "L"), H=_int_of(kv, "H"), m=_int_of(kv, "m"))
    s_low, s_high = _int_of(kv, "S_low"), _int_of(kv, "S_high")
    if s_low >= s_high:
        raise ConfigInvalid(f"S_low must be < S_high, got {s_low} >= {s_high}")
    q = _parse_iid_q(kv["iid_q"], d) if "iid_q" in kv else uniform(d)
    low = concentration_arm(ForecastConfig(S=s_low, **base), q, seed, trials)
    high = concentration_arm(ForecastConfig(S=s_high, **base), q, seed, trials)
    sep = math.sqrt(low.stderr**2 + high.stderr**2)
    decreasing = low.mean_gap_per_day - high.mean_gap_per_day >= 3 * sep
    bound = 5.0 / base["m"]
    bound_ok = low.mean_gap_per_day <= bound and high.mean_gap_per_day <= bound
    return ConcentrationReport(
        low=low, high=high,
        separation_sigma=sep, decreasing_pass=decreasing,
        bound=bound, bound_pass=bound_ok, trials=trials,
    )
