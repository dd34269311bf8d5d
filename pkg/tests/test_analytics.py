"""Closed forms against algebraic collapses, quadrature and MC oracles."""

import math
from math import comb, expm1, fsum

import numpy as np
import pytest
from scipy import integrate, stats

from prsim.analytics import (
    AfParams,
    DfParams,
    capacity_af,
    capacity_df,
    capacity_exponential_check,
    capacity_exponential_exact,
    conditional_outage_df,
    conditional_snr_pdf,
    mgf_df_best,
    mgf_df_best_deriv,
    mgf_single,
    outage_af,
    outage_df,
    prob_ds_size,
)
from prsim.channel import correlated_pair
from prsim.numerics import gauss_chebyshev
from prsim.rng import stream


# --- conditional SNR density -------------------------------------------------

def test_conditional_pdf_rho_zero_is_exponential():
    for g in (0.0, 0.3, 2.0, 11.0):
        want = math.exp(-g / 1.7) / 1.7
        assert abs(conditional_snr_pdf(g, 5.0, 1.7, 0.0) - want) <= 1e-15


def test_conditional_pdf_normalizes():
    val, _ = integrate.quad(
        lambda g: conditional_snr_pdf(g, 2.0, 1.0, 0.9), 0, np.inf, limit=300
    )
    assert abs(val - 1.0) <= 1e-6


def test_conditional_pdf_domain():
    with pytest.raises(ValueError):
        conditional_snr_pdf(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        conditional_snr_pdf(-1.0, 1.0, 1.0, 0.5)


def test_conditional_pdf_matches_conditional_sampling():
    # sample the actual gain conditioned on a fixed metric SNR and
    # chi-square the histogram against the density
    rho = 0.6425
    snr_metric = 2.0
    rng = stream(42)
    n = 200_000
    phase = rng.uniform(0, 2 * np.pi, n)
    h_met = math.sqrt(snr_metric) * np.exp(1j * phase)
    w = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    h_act = rho * h_met + math.sqrt(1 - rho * rho) * w
    g_act = np.abs(h_act) ** 2

    edges = np.linspace(0.0, 12.0, 41)
    counts, _ = np.histogram(g_act, bins=edges)
    counts = np.append(counts, n - counts.sum())  # tail bin
    probs = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(lambda g: conditional_snr_pdf(g, snr_metric, 1.0, rho), lo, hi)
        probs.append(v)
    probs.append(1.0 - fsum(probs))
    res = stats.chisquare(counts, np.asarray(probs) * n)
    assert res.pvalue > 0.01


# --- decoding subset ---------------------------------------------------------

def test_prob_ds_size_completeness():
    total = fsum(prob_ds_size(8, M, 3.0, 10.0) for M in range(9))
    assert abs(total - 1.0) <= 1e-14


def test_prob_ds_size_high_snr_limit():
    assert prob_ds_size(8, 8, 3.0, 1e9) > 0.99999


def test_prob_ds_size_matches_mc():
    rng = stream(7)
    n = 1_000_000
    gsr = rng.exponential(10.0, size=(n, 8))
    sizes = (gsr >= 3.0).sum(axis=1)
    for M in range(9):
        p = prob_ds_size(8, M, 3.0, 10.0)
        phat = np.mean(sizes == M)
        se = math.sqrt(max(p * (1 - p), 1e-12) / n)
        assert abs(phat - p) <= 3 * se + 1e-9


# --- DF outage ---------------------------------------------------------------

def test_outage_df_k1_collapse():
    for rho in (0.0, 0.3, 0.7, 1.0):
        got = outage_df(DfParams(K=1, gamma_sr=4.0, gamma_rd=6.0, rho=rho, gamma_o=3.0))
        want = 1.0 - math.exp(-3.0 / 4.0) * math.exp(-3.0 / 6.0)
        assert abs(got - want) <= 1e-14


def test_outage_df_rho_zero_no_selection_gain():
    # uncorrelated metric: selected hop is a plain exponential draw
    K, gsr, grd, go = 8, 5.0, 5.0, 3.0
    for M in range(1, K + 1):
        got = conditional_outage_df(M, grd, 0.0, go)
        want = -expm1(-go / grd)
        assert abs(got - want) <= 1e-12
    p = math.exp(-go / gsr)
    want_total = (1 - p) ** K + (1 - (1 - p) ** K) * -expm1(-go / grd)
    got_total = outage_df(DfParams(K=K, gamma_sr=gsr, gamma_rd=grd, rho=0.0, gamma_o=go))
    assert abs(got_total - want_total) <= 1e-12


def test_conditional_outage_rho_one_binomial_identity():
    # brute-force alternating sum (the rho<1 form evaluated at rho=1)
    # against the order-statistic binomial power
    go, grd = 1.5, 3.0
    for M in range(1, 13):
        alternating = fsum(
            comb(M - 1, m) * (-1.0) ** m * (M / (m + 1.0))
            * -expm1(-go * (m + 1.0) / grd)
            for m in range(M)
        )
        binomial = (-expm1(-go / grd)) ** M
        assert abs(alternating - binomial) <= 1e-10
        assert abs(conditional_outage_df(M, grd, 1.0, go) - binomial) <= 1e-15


def test_outage_df_matches_mc():
    # synthetic-rho MC of the full scheme at one operating point
    K, rho, snr_db = 8, 0.6425, 14.0
    gee = 10 ** (snr_db / 10)
    gsr = grd = 0.5 * gee
    rng = stream(1234)
    n = 400_000
    g_sr = rng.exponential(gsr, size=(n, K))
    met, act = correlated_pair(rng, rho, (n, K))
    g_met = grd * np.abs(met) ** 2
    g_act = grd * np.abs(act) ** 2
    ds = g_sr >= 3.0
    masked = np.where(ds, g_met, -1.0)
    sel = np.argmax(masked, axis=1)
    any_ds = ds.any(axis=1)
    out = np.where(any_ds, g_act[np.arange(n), sel] < 3.0, True)
    phat = out.mean()
    want = outage_df(DfParams(K=K, gamma_sr=gsr, gamma_rd=grd, rho=rho, gamma_o=3.0))
    se = math.sqrt(want * (1 - want) / n)
    assert abs(phat - want) <= 3 * se


# --- AF outage ---------------------------------------------------------------

def test_outage_af_k1_and_rho_limits():
    base = dict(gamma_sr=8.0, gamma_rd=8.0, gamma_o=3.0)
    ge = 4.0
    for rho in (0.0, 0.5, 1.0):
        got = outage_af(AfParams(K=1, rho=rho, **base))
        assert abs(got - -expm1(-3.0 / ge)) <= 1e-14
    got = outage_af(AfParams(K=6, rho=0.0, **base))
    assert abs(got - -expm1(-3.0 / ge)) <= 1e-12
    got = outage_af(AfParams(K=6, rho=1.0, **base))
    assert abs(got - (-expm1(-3.0 / ge)) ** 6) <= 1e-14


def test_outage_af_matches_mc():
    K, rho, snr_db = 8, 0.95, 12.0
    gee = 10 ** (snr_db / 10)
    ge = 0.25 * gee  # gamma_e of two equal hops at 0.5*gee each
    rng = stream(99)
    n = 400_000
    met, act = correlated_pair(rng, rho, (n, K))
    g_met = ge * np.abs(met) ** 2
    g_act = ge * np.abs(act) ** 2
    sel = np.argmax(g_met, axis=1)
    phat = np.mean(g_act[np.arange(n), sel] < 3.0)
    want = outage_af(AfParams(K=K, gamma_sr=0.5 * gee, gamma_rd=0.5 * gee, rho=rho, gamma_o=3.0))
    se = math.sqrt(want * (1 - want) / n)
    assert abs(phat - want) <= 3 * se


# --- MGFs --------------------------------------------------------------------

def test_mgf_normalization_and_single():
    for M in (1, 3, 8):
        for rho in (0.0, 0.6, 0.95):
            assert abs(mgf_df_best(0.0, M, 7.0, rho) - 1.0) <= 1e-12
    for s in (0.0, 0.4, 3.0):
        assert mgf_df_best(s, 1, 7.0, 0.8) == pytest.approx(mgf_single(s, 7.0), abs=1e-15)


def test_mgf_first_moment_vs_mc():
    M, rho, grd = 4, 0.8, 5.0
    rng = stream(21)
    n = 1_000_000
    met, act = correlated_pair(rng, rho, (n, M))
    g_met = grd * np.abs(met) ** 2
    g_act = grd * np.abs(act) ** 2
    sel = np.argmax(g_met, axis=1)
    mc_mean = g_act[np.arange(n), sel].mean()
    want = -mgf_df_best_deriv(0.0, M, grd, rho)
    assert abs(mc_mean - want) <= 0.01 * want


def test_mgf_selected_mean_limits():
    # rho=1, M=2: best of two exponentials has mean 1.5*gamma; rho=0: mean gamma
    assert abs(-mgf_df_best_deriv(0.0, 2, 3.0, 1.0) - 4.5) <= 1e-12
    assert abs(-mgf_df_best_deriv(0.0, 5, 3.0, 0.0) - 3.0) <= 1e-12


# --- capacity ----------------------------------------------------------------

def test_capacity_exponential_check_against_exact():
    for ga in (1.0, 10.0, 100.0):
        got = capacity_exponential_check(ga)
        want = capacity_exponential_exact(ga)
        assert abs(got - want) <= 1e-3


def test_capacity_df_vanishes_without_decoders():
    p = DfParams(K=4, gamma_sr=1e-6, gamma_rd=10.0, rho=0.9, gamma_o=3.0)
    assert capacity_df(p) <= 1e-9


def test_capacity_df_k1_exponential_link():
    p = DfParams(K=1, gamma_sr=6.0, gamma_rd=5.0, rho=0.7, gamma_o=3.0)
    want = 0.5 * math.exp(-3.0 / 6.0) * capacity_exponential_exact(5.0)
    assert abs(capacity_df(p) - want) <= 1e-3


def test_capacity_af_k1_exponential_link():
    p = AfParams(K=1, gamma_sr=10.0, gamma_rd=10.0, rho=0.5, gamma_o=3.0)
    want = capacity_exponential_exact(p.gamma_e)
    assert abs(capacity_af(p) - want) <= 1e-3


def test_capacity_af_rho_one_order_statistic():
    p = AfParams(K=4, gamma_sr=4.0, gamma_rd=4.0, rho=1.0, gamma_o=3.0)
    ge = p.gamma_e

    def best_of_4_pdf(g):
        return 4.0 * (-expm1(-g / ge)) ** 3 * math.exp(-g / ge) / ge

    want, _ = integrate.quad(lambda g: math.log1p(g) / math.log(2) * best_of_4_pdf(g), 0, np.inf)
    assert abs(capacity_af(p) - want) <= 1e-3


def test_capacity_af_half_duplex_flag():
    p = AfParams(K=3, gamma_sr=8.0, gamma_rd=8.0, rho=0.9, gamma_o=3.0)
    assert capacity_af(p, half_duplex=True) == pytest.approx(0.5 * capacity_af(p), rel=1e-12)


def test_capacity_df_consistent_with_direct_integration():
    # MGF-quadrature evaluation vs direct integration of the selected
    # relay's conditional density, composed over decoding-subset sizes
    p = DfParams(K=8, gamma_sr=5.0, gamma_rd=5.0, rho=0.9, gamma_o=3.0)
    decode = math.exp(-p.gamma_o / p.gamma_sr)
    miss = 1.0 - decode
    total = 0.0
    for M in range(1, 9):
        weight = comb(8, M) * decode ** M * miss ** (8 - M)

        def pdf(g, M=M):
            one_minus_r2 = 1.0 - p.rho * p.rho
            return fsum(
                comb(M - 1, m) * (-1.0) ** m * (M / (p.gamma_rd * (1 + m * one_minus_r2)))
                * math.exp(-g * (m + 1.0) / (p.gamma_rd * (1 + m * one_minus_r2)))
                for m in range(M)
            )

        val, _ = integrate.quad(lambda g, M=M: math.log1p(g) / math.log(2) * pdf(g, M), 0, np.inf, limit=200)
        total += weight * val
    want = 0.5 * total
    assert abs(capacity_df(p) - want) <= 1e-3


def test_capacity_af_consistent_with_direct_integration():
    p = AfParams(K=8, gamma_sr=5.0, gamma_rd=5.0, rho=0.9, gamma_o=3.0)
    ge = p.gamma_e
    r2 = p.rho * p.rho

    def pdf(g):
        return fsum(
            comb(8, k) * (-1.0) ** (k + 1) * (k / ((k * (1 - r2) + r2) * ge))
            * math.exp(-k * g / ((k * (1 - r2) + r2) * ge))
            for k in range(1, 9)
        )

    want, _ = integrate.quad(lambda g: math.log1p(g) / math.log(2) * pdf(g), 0, np.inf, limit=200)
    assert abs(capacity_af(p) - want) <= 1e-3


def test_capacity_df_matches_mc_mean_rate():
    K, rho, snr_db = 8, 0.95, 20.0
    gee = 10 ** (snr_db / 10)
    gsr = grd = 0.5 * gee
    rng = stream(31)
    n = 400_000
    g_sr = rng.exponential(gsr, size=(n, K))
    met, act = correlated_pair(rng, rho, (n, K))
    g_met = grd * np.abs(met) ** 2
    g_act = grd * np.abs(act) ** 2
    ds = g_sr >= 3.0
    masked = np.where(ds, g_met, -1.0)
    sel = np.argmax(masked, axis=1)
    any_ds = ds.any(axis=1)
    rate = np.where(any_ds, 0.5 * np.log2(1.0 + g_act[np.arange(n), sel]), 0.0)
    want = capacity_df(DfParams(K=K, gamma_sr=gsr, gamma_rd=grd, rho=rho, gamma_o=3.0))
    assert abs(rate.mean() - want) <= 0.02 * want


# --- shape and safety invariants --------------------------------------------

def test_outage_monotone_in_mean_snr_and_rho_and_k():
    snrs = np.linspace(1.0, 300.0, 40)
    for rho in (0.0, 0.5, 0.95, 1.0):
        df = [outage_df(DfParams(K=4, gamma_sr=g, gamma_rd=g, rho=rho, gamma_o=3.0)) for g in snrs]
        af = [outage_af(AfParams(K=4, gamma_sr=g, gamma_rd=g, rho=rho, gamma_o=3.0)) for g in snrs]
        assert all(a >= b - 1e-12 for a, b in zip(df, df[1:]))
        assert all(a >= b - 1e-12 for a, b in zip(af, af[1:]))
    rhos = np.linspace(0.0, 1.0, 21)
    df = [outage_df(DfParams(K=4, gamma_sr=20.0, gamma_rd=20.0, rho=r, gamma_o=3.0)) for r in rhos]
    af = [outage_af(AfParams(K=4, gamma_sr=20.0, gamma_rd=20.0, rho=r, gamma_o=3.0)) for r in rhos]
    assert all(a >= b - 1e-12 for a, b in zip(df, df[1:]))
    assert all(a >= b - 1e-12 for a, b in zip(af, af[1:]))
    for K in range(1, 8):
        a = outage_af(AfParams(K=K, gamma_sr=20.0, gamma_rd=20.0, rho=0.9, gamma_o=3.0))
        b = outage_af(AfParams(K=K + 1, gamma_sr=20.0, gamma_rd=20.0, rho=0.9, gamma_o=3.0))
        assert a >= b - 1e-12
        a = outage_df(DfParams(K=K, gamma_sr=20.0, gamma_rd=20.0, rho=0.9, gamma_o=3.0))
        b = outage_df(DfParams(K=K + 1, gamma_sr=20.0, gamma_rd=20.0, rho=0.9, gamma_o=3.0))
        assert a >= b - 1e-12


def test_outage_probability_range_random_grid():
    rng = stream(5150)
    for _ in range(10_000):
        K = int(rng.integers(1, 13))
        gsr = float(rng.uniform(0.05, 2000.0))
        grd = float(rng.uniform(0.05, 2000.0))
        rho = float(rng.uniform(0.0, 1.0))
        if rng.uniform() < 0.1:
            rho = 1.0 - 10.0 ** float(rng.uniform(-12, -2))  # stress near-perfect metrics
        go = float(rng.uniform(0.1, 20.0))
        a = outage_df(DfParams(K=K, gamma_sr=gsr, gamma_rd=grd, rho=rho, gamma_o=go))
        b = outage_af(AfParams(K=K, gamma_sr=gsr, gamma_rd=grd, rho=rho, gamma_o=go))
        assert 0.0 <= a <= 1.0
        assert 0.0 <= b <= 1.0


def test_outage_df_diversity_order():
    # with a perfect metric the curve is (1 - e^{-c/snr})^K exactly; the
    # log-log slope approaches -K from above as the SNR grows.  In the
    # 1e-4..1e-8 outage window the binomial curvature still biases the
    # fitted slope to about -7.2 for K=8 (that value is frozen below);
    # the asymptotic slope is reached deeper down the tail.
    snrs = np.linspace(5, 60, 560)
    gee = 10 ** (snrs / 10)
    po = np.array([
        outage_df(DfParams(K=8, gamma_sr=g / 2, gamma_rd=g / 2, rho=1.0, gamma_o=3.0))
        for g in gee
    ])
    mid = (po > 1e-8) & (po < 1e-4)
    slope_mid = np.polyfit(np.log10(gee[mid]), np.log10(po[mid]), 1)[0]
    assert abs(slope_mid - (-7.19)) <= 0.05
    deep = (po > 1e-16) & (po < 1e-12)
    slope_deep = np.polyfit(np.log10(gee[deep]), np.log10(po[deep]), 1)[0]
    assert abs(slope_deep - (-8.0)) <= 0.3
    assert slope_deep < slope_mid  # approaching the diversity order monotonically
