"""Correlated fading generation and the outdated-CSI statistical model.

Time series come from a sum-of-cisoids generator (modified Jakes):
equally spaced arrival angles with a random global rotation plus i.i.d.
uniform path phases.  Averaged over the rotation the autocorrelation at
lag m is exactly J0(2 pi f_d m / f_s); a single realization approaches
it as the number of sinusoids grows.  The generator is stateless and
reproducible: the same (config, link) always yields the same series.

Outdated CSI follows the Gaussian degradation
  h_out = sigma_out * (rho/sigma_act * h + eps * sqrt(1 - rho^2)),
eps ~ CN(0, 1), which leaves the marginal complex Gaussian and sets the
correlation between h and h_out to rho.  The same construction doubles
as the synthetic-rho pair sampler used to validate the closed forms at
an exactly prescribed correlation.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .numerics import bessel_j0
from .rng import stream, complex_normal


def jakes_correlation(f_d, tau_s):
    """Channel autocorrelation J0(2 pi f_d tau) of the Jakes spectrum."""
    if f_d < 0 or tau_s < 0:
        raise ValueError("doppler and delay must be nonnegative")
    return bessel_j0(2.0 * math.pi * f_d * tau_s)


@dataclass(frozen=True)
class FadingProcessConfig:
    """Parameters of one fading process (all links share these)."""

    doppler_hz: float
    sample_rate_hz: float
    mean_power: float = 1.0
    distribution: str = "rayleigh"  # "rayleigh" or "rician"
    k_factor: float = 0.0
    num_sinusoids: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")
        if not 0 <= self.doppler_hz < self.sample_rate_hz / 2.0:
            raise ValueError("need 0 <= f_d < f_s/2")
        if self.mean_power <= 0:
            raise ValueError("mean power must be positive")
        if self.distribution not in ("rayleigh", "rician"):
            raise ValueError("unknown distribution %r" % self.distribution)
        if self.k_factor < 0:
            raise ValueError("Rician k factor must be >= 0")
        if self.num_sinusoids < 1:
            raise ValueError("need at least one sinusoid")

    @property
    def rice_k(self):
        # Rayleigh is Rician with k = 0
        return self.k_factor if self.distribution == "rician" else 0.0


def generate_series(cfg, length, link=0):
    """Sampled fading series h[0..length-1] for one link.

    Each link gets an independent draw of path angles and phases from
    the (seed, link) stream, so a K-link network is built by calling
    this with link = 0..K-1.
    """
    length = int(length)
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = stream(cfg.seed, 17, int(link))
    n = cfg.num_sinusoids
    rotation = rng.uniform(0.0, 2.0 * np.pi)
    angles = (2.0 * np.pi * (np.arange(n) + 0.5) + rotation) / n
    phases = rng.uniform(0.0, 2.0 * np.pi, size=n)
    omega = 2.0 * np.pi * cfg.doppler_hz / cfg.sample_rate_hz * np.cos(angles)

    t = np.arange(length, dtype=np.float64)
    diffuse = np.zeros(length, dtype=np.complex128)
    for k in range(n):  # accumulate per path to keep memory at O(length)
        diffuse += np.exp(1j * (omega[k] * t + phases[k]))
    diffuse *= np.sqrt(cfg.mean_power / n)

    k_rice = cfg.rice_k
    if k_rice == 0.0:
        return diffuse
    los = np.sqrt(cfg.mean_power * k_rice / (k_rice + 1.0))  # fixed LOS phase 0
    return los + diffuse / np.sqrt(k_rice + 1.0)


@dataclass(frozen=True)
class OutdatedCsiModel:
    """Correlation model between the true gain and a stale observation."""

    rho: float
    sigma_outdated: float = 1.0
    sigma_actual: float = 1.0

    def __post_init__(self):
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")
        if self.sigma_outdated <= 0 or self.sigma_actual <= 0:
            raise ValueError("gain std deviations must be positive")


def degrade_csi(h, model, rng):
    """Outdated observation of h per the Gaussian degradation model.

    Works elementwise on arrays; fresh eps ~ CN(0,1) per element.
    """
    h = np.asarray(h)
    eps = complex_normal(rng, size=h.shape if h.shape else None)
    out = model.sigma_outdated * (
        model.rho / model.sigma_actual * h
        + eps * math.sqrt(1.0 - model.rho * model.rho)
    )
    return out


def correlated_pair(rng, rho, size, mean_power=1.0):
    """(metric, actual) complex gains at exact correlation rho.

    Both marginals are CN(0, mean_power).  This is the synthetic-rho
    mode used when validating the outage/capacity closed forms: rho is
    prescribed directly instead of being implied by a Doppler lag.
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError("correlation must lie in [0, 1]")
    metric = complex_normal(rng, size=size, variance=mean_power)
    w = complex_normal(rng, size=size, variance=mean_power)
    actual = rho * metric + math.sqrt(1.0 - rho * rho) * w
    return metric, actual


def snr_from_gain(h, power, noise_var):
    """Instantaneous SNR |h|^2 * power / noise_var."""
    if power <= 0 or noise_var <= 0:
        raise ValueError("power and noise variance must be positive")
    h = np.asarray(h)
    return (h.real ** 2 + h.imag ** 2) * (power / noise_var)


def save_gain_series(path, series):
    """Write one link's series as CSV with columns (index, re, im)."""
    series = np.asarray(series)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "re", "im"])
        for i, h in enumerate(series):
            writer.writerow([i, repr(float(h.real)), repr(float(h.imag))])


def load_gain_series(path):
    """Read a series written by save_gain_series."""
    re = []
    im = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["index", "re", "im"]:
            raise ValueError("unrecognized gain series header: %r" % header)
        for row in reader:
            re.append(float(row[1]))
            im.append(float(row[2]))
    return np.asarray(re) + 1j * np.asarray(im)
