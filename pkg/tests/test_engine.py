from fractions import Fraction

import pytest

from conftest import fixed_stream, random_dist
from hicalib import backend, engine
from hicalib.adversary import (
    AdaptiveArgminAdversary,
    HardSeqConfig,
    HardSequenceAdversary,
    IIDAdversary,
    sample_tau_tree,
)
from hicalib.engine import (
    dce_value,
    ece_value,
    expand_to_transcript,
    run_from_outcomes,
    simulate,
)
from hicalib.errors import ConfigInvalid
from hicalib.forecaster import ForecastConfig, HierarchicalForecaster
from hicalib.metrics import dce, ece_trajectory, oracle_dce_direct
from hicalib.simplex import uniform

SMALL_CONFIGS = [
    ForecastConfig(d=2, L=1, H=2, S=1, m=1),
    ForecastConfig(d=2, L=2, H=2, S=1, m=1),
    ForecastConfig(d=3, L=2, H=3, S=2, m=2),
    ForecastConfig(d=5, L=1, H=4, S=3, m=1),
    ForecastConfig(d=2, L=3, H=2, S=2, m=2),
    ForecastConfig(d=4, L=2, H=2, S=4, m=3),
]


def adversaries_for(cfg, tag):
    yield IIDAdversary(random_dist(fixed_stream(tag), cfg.d, full_support=True))
    yield AdaptiveArgminAdversary(cfg.d)


@pytest.mark.parametrize("cfg", SMALL_CONFIGS)
def test_engine_agrees_with_reference_forecaster(cfg):
    for tag, adv in enumerate(adversaries_for(cfg, 900)):
        run = simulate(cfg, adv, seed=50 + tag, mode="sampled")
        fc = HierarchicalForecaster(cfg)
        for t in range(1, cfg.T + 1):
            mix = fc.mixture()
            b = (t - 1) // cfg.S
            eng = tuple(
                (run.keys[kid], Fraction(mult, cfg.L))
                for kid, mult in run.block_entries(b)
            )
            assert mix.entries == eng, f"t={t} adversary={adv.name}"
            fc.observe(run.outcomes[t - 1], t)


@pytest.mark.parametrize("cfg", SMALL_CONFIGS)
def test_aggregates_match_transcript_metrics(cfg):
    for tag, adv in enumerate(adversaries_for(cfg, 910)):
        run = simulate(cfg, adv, seed=80 + tag, mode="sampled")
        tr = expand_to_transcript(run)
        tr.validate()
        assert dce(tr) == dce_value(run)
        assert oracle_dce_direct(tr) == pytest.approx(dce_value(run), abs=1e-12)
        assert ece_trajectory(tr) == ece_value(run)


@pytest.mark.parametrize("cfg", SMALL_CONFIGS[:3])
def test_replay_reproduces_run(cfg):
    adv = IIDAdversary(uniform(cfg.d))
    run = simulate(cfg, adv, seed=7, mode="sampled")
    replay = run_from_outcomes(cfg, run.outcomes, realized_levels=run.realized_levels)
    assert replay.keys == run.keys
    assert replay.level_iter_keys == run.level_iter_keys
    assert replay.leaf_counts == run.leaf_counts
    assert replay.dce_tallies == run.dce_tallies
    assert replay.ece_tallies == run.ece_tallies


def test_simulation_is_deterministic():
    cfg = ForecastConfig(d=3, L=2, H=3, S=2, m=1)
    adv = lambda: IIDAdversary(random_dist(fixed_stream(33), 3, full_support=True))
    a = simulate(cfg, adv(), seed=99, mode="sampled")
    b = simulate(cfg, adv(), seed=99, mode="sampled")
    assert a.outcomes == b.outcomes
    assert a.realized_levels == b.realized_levels
    assert a.dce_tallies == b.dce_tallies


def test_trials_are_independent_streams():
    cfg = ForecastConfig(d=2, L=1, H=4, S=2, m=1)
    adv = IIDAdversary(uniform(2))
    a = simulate(cfg, adv, seed=99, trial=0)
    b = simulate(cfg, adv, seed=99, trial=1)
    assert a.outcomes != b.outcomes  # overwhelmingly likely for T=8 draws


def test_role_streams_are_independent():
    # sampled mode consumes level draws; the outcome stream must not notice
    cfg = ForecastConfig(d=3, L=2, H=2, S=2, m=1)
    adv = IIDAdversary(uniform(3))
    plain = simulate(cfg, adv, seed=42, mode="distributional")
    sampled = simulate(cfg, adv, seed=42, mode="sampled")
    assert plain.outcomes == sampled.outcomes


def test_adaptive_outcomes_ignore_seed():
    # point-mass outcome days consume no randomness at all
    cfg = ForecastConfig(d=2, L=2, H=2, S=2, m=1)
    adv = AdaptiveArgminAdversary(2)
    a = simulate(cfg, adv, seed=1)
    b = simulate(cfg, adv, seed=123456)
    assert a.outcomes == b.outcomes
    assert a.leaf_counts == b.leaf_counts


def test_hard_adversary_integration():
    hcfg = HardSeqConfig(R=2, K=2)  # d=8, T=2
    cfg = ForecastConfig(d=8, L=1, H=2, S=1, m=1)
    assert cfg.T == hcfg.T
    tree = sample_tau_tree(hcfg, fixed_stream(44))
    adv = HardSequenceAdversary(hcfg, tree=tree)
    run = simulate(cfg, adv, seed=3, record_adv=True)
    tr = expand_to_transcript(run)
    assert [rec.adversary_dist for rec in tr.days] == [adv.next(1), adv.next(2)]
    assert dce(tr) == dce_value(run)


def test_mode_validation_and_missing_pieces():
    cfg = ForecastConfig(d=2, L=1, H=2, S=1, m=1)
    adv = IIDAdversary(uniform(2))
    with pytest.raises(ConfigInvalid):
        simulate(cfg, adv, seed=1, mode="nonsense")
    run = simulate(cfg, adv, seed=1)
    with pytest.raises(ConfigInvalid):
        ece_value(run)  # not sampled
    run2 = simulate(cfg, adv, seed=1, retain_outcomes=False)
    with pytest.raises(ConfigInvalid):
        expand_to_transcript(run2)


def test_dimension_mismatch_between_adversary_and_forecaster():
    cfg = ForecastConfig(d=3, L=1, H=2, S=1, m=1)
    with pytest.raises(ConfigInvalid):
        simulate(cfg, IIDAdversary(uniform(2)), seed=1)


@pytest.mark.skipif(len(backend.available()) < 2, reason="extension not built")
@pytest.mark.parametrize("cfg", SMALL_CONFIGS)
def test_backends_bit_identical(cfg):
    adv_q = random_dist(fixed_stream(1234), cfg.d, full_support=True)
    results = {}
    try:
        for name in backend.available():
            backend.set_backend(name)
            results[name] = simulate(cfg, IIDAdversary(adv_q), seed=321, mode="sampled")
    finally:
        backend.set_backend("compiled" if "compiled" in backend.available() else "pure")
    a, b = results["pure"], results["compiled"]
    assert a.outcomes == b.outcomes
    assert a.realized_levels == b.realized_levels
    assert a.leaf_counts == b.leaf_counts
    assert a.keys == b.keys
    assert a.dce_tallies == b.dce_tallies
    assert a.ece_tallies == b.ece_tallies


def test_big_denominator_falls_back_to_exact_path():
    # a denominator beyond the kernel's int64 range still works and stays exact
    big = 1 << 70
    from hicalib.simplex import make_rational_dist

    q = make_rational_dist([1, big - 1], big)
    cfg = ForecastConfig(d=2, L=1, H=2, S=2, m=1)
    run = simulate(cfg, IIDAdversary(q), seed=5)
    assert sum(sum(c) for c in run.leaf_counts) == cfg.T
