import math

import numpy as np
import pytest
from scipy import stats

from prsim.channel import (
    FadingProcessConfig,
    OutdatedCsiModel,
    correlated_pair,
    degrade_csi,
    generate_series,
    jakes_correlation,
    load_gain_series,
    save_gain_series,
    snr_from_gain,
)
from prsim.rng import stream


@pytest.fixture(scope="module")
def long_series():
    cfg = FadingProcessConfig(doppler_hz=100.0, sample_rate_hz=1000.0, seed=11)
    return generate_series(cfg, 1_000_000)


def empirical_autocorr(h, lag):
    num = np.vdot(h[:-lag], h[lag:]).real
    den = np.vdot(h, h).real
    return num / den


def test_jakes_correlation_anchors():
    assert jakes_correlation(100.0, 0.0) == 1.0
    assert abs(jakes_correlation(100.0, 0.002) - 0.6425) <= 5e-4
    assert abs(jakes_correlation(100.0, 0.003) - 0.2906) <= 5e-4


def test_config_validation():
    with pytest.raises(ValueError):
        FadingProcessConfig(doppler_hz=600.0, sample_rate_hz=1000.0)
    with pytest.raises(ValueError):
        FadingProcessConfig(doppler_hz=100.0, sample_rate_hz=1000.0, distribution="nakagami")
    cfg = FadingProcessConfig(doppler_hz=100.0, sample_rate_hz=1000.0, k_factor=3.0)
    assert cfg.rice_k == 0.0  # rayleigh ignores k, rician(0) == rayleigh


def test_series_mean_power(long_series):
    assert 0.99 <= np.mean(np.abs(long_series) ** 2) <= 1.01


def test_series_autocorrelation_vs_jakes(long_series):
    assert abs(empirical_autocorr(long_series, 1) - 0.9037) <= 0.01
    for lag in range(1, 6):
        want = jakes_correlation(100.0, lag / 1000.0)
        assert abs(empirical_autocorr(long_series, lag) - want) <= 0.02


def test_series_reproducible():
    cfg = FadingProcessConfig(doppler_hz=100.0, sample_rate_hz=1000.0, seed=5)
    a = generate_series(cfg, 4096, link=2)
    b = generate_series(cfg, 4096, link=2)
    assert np.array_equal(a, b)
    c = generate_series(cfg, 4096, link=3)
    assert not np.array_equal(a, c)


def test_series_magnitude_squared_is_exponential(long_series):
    # subsample far past the coherence time so KS sees ~independent draws
    g = np.abs(long_series[::53]) ** 2
    res = stats.kstest(g, "expon", args=(0, 1.0))
    assert res.pvalue > 0.01


def test_rician_large_k_is_line_of_sight():
    cfg = FadingProcessConfig(
        doppler_hz=100.0, sample_rate_hz=1000.0,
        distribution="rician", k_factor=1e6, seed=2,
    )
    h = generate_series(cfg, 10_000)
    assert np.var(np.abs(h)) < 1e-5
    assert abs(np.mean(np.abs(h)) - 1.0) < 1e-2


def test_rician_mean_power_preserved():
    cfg = FadingProcessConfig(
        doppler_hz=100.0, sample_rate_hz=1000.0,
        distribution="rician", k_factor=3.0, seed=4,
    )
    h = generate_series(cfg, 400_000)
    assert abs(np.mean(np.abs(h) ** 2) - 1.0) <= 0.02


def test_degrade_csi_identity_at_rho_one():
    rng = stream(1)
    h = np.array([0.3 + 0.4j, -1.2 + 0.1j])
    out = degrade_csi(h, OutdatedCsiModel(rho=1.0), rng)
    assert np.allclose(out, h, rtol=0, atol=0)


def test_degrade_csi_independent_at_rho_zero():
    rng = stream(2)
    h = np.asarray(correlated_pair(rng, 1.0, 100_000)[0])
    out = degrade_csi(h, OutdatedCsiModel(rho=0.0), rng)
    corr = np.vdot(h, out).real / math.sqrt(np.vdot(h, h).real * np.vdot(out, out).real)
    assert abs(corr) < 0.01


def test_degrade_csi_target_correlation():
    rng = stream(3)
    h = correlated_pair(rng, 1.0, 1_000_000)[0]
    out = degrade_csi(h, OutdatedCsiModel(rho=0.6425), rng)
    corr = np.vdot(h, out).real / math.sqrt(np.vdot(h, h).real * np.vdot(out, out).real)
    assert 0.63 <= corr <= 0.655


def test_degrade_csi_preserves_marginal():
    rng = stream(4)
    h = correlated_pair(rng, 1.0, 60_000)[0]
    out = degrade_csi(h, OutdatedCsiModel(rho=0.7, sigma_outdated=1.0), rng)
    res = stats.kstest(np.abs(out) ** 2, "expon", args=(0, 1.0))
    assert res.pvalue > 0.01


def test_correlated_pair_statistics():
    rng = stream(5)
    met, act = correlated_pair(rng, 0.95, 500_000, mean_power=2.0)
    assert abs(np.mean(np.abs(met) ** 2) - 2.0) < 0.02
    assert abs(np.mean(np.abs(act) ** 2) - 2.0) < 0.02
    corr = np.vdot(met, act).real / math.sqrt(np.vdot(met, met).real * np.vdot(act, act).real)
    assert abs(corr - 0.95) < 0.005


def test_snr_from_gain_arithmetic():
    assert snr_from_gain(1.0 + 0j, 1.0, 1.0) == 1.0
    assert snr_from_gain(2.0 + 0j, 0.5, 1.0) == 2.0
    with pytest.raises(ValueError):
        snr_from_gain(1.0, -1.0, 1.0)


def test_snr_from_gain_average():
    rng = stream(6)
    h = correlated_pair(rng, 1.0, 1_000_000)[0]
    snr = snr_from_gain(h, 0.5, 0.05)
    assert abs(np.mean(snr) - 10.0) <= 0.1


def test_gain_series_csv_roundtrip(tmp_path):
    cfg = FadingProcessConfig(doppler_hz=100.0, sample_rate_hz=1000.0, seed=9)
    h = generate_series(cfg, 257)
    path = tmp_path / "link0.csv"
    save_gain_series(path, h)
    back = load_gain_series(path)
    assert np.array_equal(back, h)
