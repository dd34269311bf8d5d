import math

import numpy as np
import pytest

from prsim.channel import correlated_pair
from prsim.rng import stream
from prsim.selection import (
    RateConfig,
    RelayObservation,
    af_effective_snr,
    af_outcome,
    decoding_subset,
    df_outcome,
    direct_transmission_outcome,
    ostc_effective_snr,
    ostc_outcome,
    select_best_af,
    select_best_df,
    select_ostc_pair,
)

RATE1 = RateConfig(target_rate=1.0)


def obs(i, sr_a, rd_a, sr_m=None, rd_m=None):
    return RelayObservation(
        relay_id=i,
        sr_snr_actual=sr_a,
        rd_snr_actual=rd_a,
        sr_snr_metric=sr_a if sr_m is None else sr_m,
        rd_snr_metric=rd_a if rd_m is None else rd_m,
    )


def test_rate_thresholds():
    assert RATE1.gamma_o == 3.0
    assert RATE1.direct_threshold == 1.0
    with pytest.raises(ValueError):
        RateConfig(target_rate=0.0)


def test_decoding_subset_threshold():
    assert decoding_subset([4.0, 2.0, 5.0], RATE1) == [0, 2]
    assert decoding_subset([1.0, 0.5], RATE1) == []
    assert decoding_subset([3.0], RATE1) == [0]  # boundary decodes


def test_decoding_subset_size_distribution():
    rng = stream(8)
    n, K, gbar = 200_000, 8, 10.0
    draws = rng.exponential(gbar, size=(n, K))
    sizes = np.array([len(decoding_subset(row, RATE1)) for row in draws[:20_000]])
    p_decode = math.exp(-3.0 / gbar)
    for M in range(K + 1):
        want = math.comb(K, M) * p_decode ** M * (1 - p_decode) ** (K - M)
        got = np.mean(sizes == M)
        se = math.sqrt(max(want * (1 - want), 1e-12) / len(sizes))
        assert abs(got - want) <= 3 * se + 1e-9


def test_select_best_df():
    assert select_best_df([0, 1, 2], [0.5, 2.0, 1.1]) == 1
    assert select_best_df([], [0.5]) is None
    assert select_best_df([0, 1], [2.0, 2.0]) == 0  # tie keeps lowest id


def test_select_best_df_perfect_metric_is_max():
    rng = stream(9)
    for _ in range(10_000):
        k = int(rng.integers(1, 9))
        g = rng.exponential(5.0, size=k)
        ds = list(range(k))
        sel = select_best_df(ds, g)
        assert g[sel] == g.max()


def test_select_ostc_pair():
    assert select_ostc_pair([0, 1, 2], [0.5, 2.0, 1.1]) == (1, 2)
    assert select_ostc_pair([1], [0.0, 7.0]) == (1,)
    assert select_ostc_pair([], []) is None


def test_select_ostc_pair_matches_sort_oracle():
    rng = stream(10)
    for _ in range(10_000):
        k = int(rng.integers(2, 9))
        g = rng.exponential(5.0, size=k)
        pair = select_ostc_pair(list(range(k)), g)
        want = tuple(np.argsort(-g, kind="stable")[:2])
        assert pair == want


def test_af_effective_snr():
    assert af_effective_snr(1.0, 1.0, use_bound=False) == pytest.approx(1.0 / 3.0)
    assert af_effective_snr(1.0, 1.0, use_bound=True) == 1.0
    assert af_effective_snr(1e9, 5.0, use_bound=True) == 5.0


def test_af_bound_dominates_exact():
    rng = stream(11)
    a = rng.exponential(5.0, 1_000_000)
    b = rng.exponential(5.0, 1_000_000)
    exact = a * b / (a + b + 1.0)
    bound = np.minimum(a, b)
    assert np.all(bound >= exact)
    # the bound tightens as the hops grow imbalanced: with min SNR m and
    # ratio R the relative gap is (m + 1) / (m (1 + R) + 1)
    m = rng.uniform(1.0, 5.0, 50_000)
    big = m * rng.uniform(100.0, 1000.0, m.size)
    gap = (m - m * big / (m + big + 1.0)) / m
    assert gap.max() < 0.02
    # and opens back up as the hops balance (50% at equal hops)
    for rlo, rhi in [(5.0, 7.5), (1.05, 1.6)]:
        worse = m * rng.uniform(rlo, rhi, m.size)
        gap_worse = (m - m * worse / (m + worse + 1.0)) / m
        assert np.median(gap_worse) > np.median(gap)
        gap = gap_worse


def test_select_best_af():
    assert select_best_af([obs(0, 3.0, 1.0)]) == 0
    two = [obs(0, 3.0, 1.0), obs(1, 2.0, 2.0)]
    assert select_best_af(two) == 1
    with pytest.raises(ValueError):
        select_best_af([])


def test_select_best_af_perfect_metric_max_min():
    rng = stream(12)
    for _ in range(10_000):
        k = int(rng.integers(1, 9))
        sr = rng.exponential(4.0, size=k)
        rd = rng.exponential(4.0, size=k)
        observations = [obs(i, sr[i], rd[i]) for i in range(k)]
        sel = select_best_af(observations, use_metric=False)
        assert min(sr[sel], rd[sel]) == np.minimum(sr, rd).max()


def test_ostc_effective_snr():
    assert ostc_effective_snr(4.0, 0.0) == 2.0
    assert ostc_effective_snr(7.0, 7.0) == 7.0


def test_direct_transmission_outcome():
    assert direct_transmission_outcome(1.0, RATE1) is False  # boundary succeeds
    assert direct_transmission_outcome(0.0, RATE1) is True


def test_direct_transmission_matches_closed_form():
    rng = stream(13)
    n, gbar = 500_000, 8.0
    g = rng.exponential(gbar, n)
    phat = np.mean([g < RATE1.direct_threshold])
    want = 1.0 - math.exp(-RATE1.direct_threshold / gbar)
    se = math.sqrt(want * (1 - want) / n)
    assert abs(phat - want) <= 3 * se


def test_df_outcome_uses_actual_for_outage():
    # metric would pick relay 1, whose actual hop is dead: outage is
    # decided by the actual SNR even though selection saw a good metric
    observations = [
        obs(0, 10.0, 10.0, rd_m=0.1),
        obs(1, 10.0, 0.5, rd_m=9.0),
    ]
    out = df_outcome(observations, RATE1)
    assert out.chosen == (1,)
    assert out.outage
    assert out.end_to_end_snr_actual == 0.5


def test_df_outcome_empty_subset_is_outage():
    observations = [obs(0, 1.0, 50.0), obs(1, 2.0, 50.0)]
    out = df_outcome(observations, RATE1)
    assert out.chosen == ()
    assert out.outage
    assert out.realized_rate == 0.0


def test_ostc_outcome_pair_and_fallback():
    observations = [obs(0, 10.0, 5.0), obs(1, 10.0, 3.0), obs(2, 10.0, 4.0)]
    out = ostc_outcome(observations, RATE1)
    assert out.chosen == (0, 2)
    assert out.end_to_end_snr_actual == pytest.approx(4.5)
    single = [obs(0, 10.0, 9.0), obs(1, 1.0, 9.0)]
    out = ostc_outcome(single, RATE1)
    assert out.chosen == (0,)
    assert out.end_to_end_snr_actual == 9.0


def test_af_outcome_bound_and_exact():
    observations = [obs(0, 8.0, 2.0), obs(1, 5.0, 4.0)]
    out = af_outcome(observations, RATE1)
    assert out.chosen == (1,)
    assert out.end_to_end_snr_actual == 4.0
    out = af_outcome(observations, RATE1, use_bound=False)
    assert out.end_to_end_snr_actual == pytest.approx(2.0)


def test_selection_metric_scaling_invariance():
    rng = stream(14)
    for _ in range(2_000):
        k = int(rng.integers(2, 9))
        g = rng.exponential(5.0, size=k)
        scale = float(rng.uniform(0.01, 100.0))
        ds = list(range(k))
        assert select_best_df(ds, g) == select_best_df(ds, scale * g)
        assert select_ostc_pair(ds, g) == select_ostc_pair(ds, scale * g)


def test_perfect_metric_weakly_dominates_outdated():
    rng = stream(15)
    n, K = 300_000, 4
    gbar = 10 ** 1.4
    gsr = rng.exponential(0.5 * gbar, size=(n, K))
    met, act = correlated_pair(rng, 0.3, (n, K))
    g_met = 0.5 * gbar * np.abs(met) ** 2
    g_act = 0.5 * gbar * np.abs(act) ** 2
    ds = gsr >= 3.0
    any_ds = ds.any(axis=1)
    rows = np.arange(n)
    out_perfect = np.where(any_ds, g_act[rows, np.argmax(np.where(ds, g_act, -1), axis=1)] < 3.0, True)
    out_stale = np.where(any_ds, g_act[rows, np.argmax(np.where(ds, g_met, -1), axis=1)] < 3.0, True)
    p1, p2 = out_perfect.mean(), out_stale.mean()
    se = math.sqrt(p2 * (1 - p2) / n)
    assert p1 <= p2 + 3 * se


def test_ostc_diversity_order_two_under_outdated_metric():
    # log-log slope of the MC outage curve in the 1e-3..1e-5 window
    rho = 0.2906
    rng = stream(16)
    K, n_block, n_blocks = 8, 1_000_000, 4
    snrs_db = np.arange(24.0, 33.0, 2.0)
    rows = np.arange(n_block)
    pts = []
    for snr_db in snrs_db:
        gbar = 10 ** (snr_db / 10)
        failures = 0
        for _ in range(n_blocks):
            gsr = rng.exponential(0.5 * gbar, size=(n_block, K))
            met, act = correlated_pair(rng, rho, (n_block, K))
            g_met = 0.5 * gbar * np.abs(met) ** 2
            g_act = 0.5 * gbar * np.abs(act) ** 2
            ds = gsr >= 3.0
            masked = np.where(ds, g_met, -1.0)
            order = np.argsort(-masked, axis=1)
            first, second = order[:, 0], order[:, 1]
            n_ds = ds.sum(axis=1)
            eff = np.where(
                n_ds >= 2,
                0.5 * (g_act[rows, first] + g_act[rows, second]),
                g_act[rows, first],
            )
            out = np.where(n_ds >= 1, eff < 3.0, True)
            failures += int(out.sum())
        pts.append(failures / (n_block * n_blocks))
    pts = np.asarray(pts)
    keep = (pts > 1e-5) & (pts < 1e-3)
    assert keep.sum() >= 3
    slope = np.polyfit(snrs_db[keep] / 10.0, np.log10(pts[keep]), 1)[0]
    assert 1.7 <= -slope <= 2.3
