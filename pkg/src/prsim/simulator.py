"""Frame-level relay selection and Monte-Carlo outage/rate estimation.

A frame proceeds in two phases: the source broadcasts, decoding relays
form the decoding subset, and one relay (or a coded pair) forwards.
The selection metric is never the frame's own CSI: each node predicts
the next frame's coefficient, writes it to a buffer, and the *next*
frame's selection reads that buffer.  run_*_frame asserts this
causality on every call.  The first frame has no buffered prediction
yet and falls back to its own outdated estimate; drivers exclude it
from statistics.

Distributed variants resolve contention with back-off timers
T = min(c / |metric|, T_m): the relay with the strongest buffered
metric fires first and the rest hear its flag and stand down.  Two
timers closer than the uncertainty window collide and destroy the
frame (counted as outage).  The window defaults to zero, in which case
continuous metrics almost surely never collide and the timer race is
exactly an argmax.  The centralized variant ranks buffered predictions
at the destination instead; when the pick turns out not to have
decoded, it either re-selects among the remaining decoders (default)
or terminates the frame.

Two CSI-correlation modes drive the statistics.  Synthetic mode draws
(metric, actual) pairs at an exact correlation rho each frame, which
is what the closed forms assume; series mode rides a generated fading
record and takes the metric from a trained predictor (or from the
record itself, delayed, for the no-predictor baseline).  estimate()
and estimate_series() vectorize the per-frame decisions over the whole
trial block, so they share the selection arithmetic but skip the
timer bookkeeping; collision statistics come from the frame drivers.

Power accounting: with total per-frame power P and unit noise, the
half-duplex relay phases each spend 0.5 P, so both hop SNRs average
half the grid value; direct transmission spends the full P and is
judged against the single-phase rate threshold.

Acquisition impairments are modeled on top of either mode: pilot noise
adds CN(0, sigma_h^2 10^(-pilotSNR/10)) to every estimate entering the
metric path, and a residual phase error theta ~ U(-theta_max,
theta_max) scales the detected amplitude by cos(theta) on the actual
path.  The cosine mapping is a convention of this package (the effect
of imperfect carrier recovery on a coherent detector), isolated here
so alternatives can be swapped in.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import correlated_pair, snr_from_gain
from .rng import complex_normal, stream
from .selection import (
    RateConfig,
    SelectionOutcome,
    af_effective_snr,
    decoding_subset,
    ostc_effective_snr,
)

_SCHEMES = ("df", "af", "ostc", "dt")


# ------------------------------------------------------------------ types


@dataclass(frozen=True)
class TimerModel:
    """Back-off timer T = min(c / |metric|, max_duration).

    Only the ordering of timers matters for outage statistics; c and
    the cap are free conventions (defaults 1 and 1e3).  The
    uncertainty window is the minimum separation two timers need to be
    resolved; within it both relays fire and the frame is lost.
    """

    c: float = 1.0
    max_duration: float = 1e3
    uncertainty_window: float = 0.0

    def __post_init__(self):
        if self.c <= 0 or self.max_duration <= 0:
            raise ValueError("timer constants must be positive")
        if self.uncertainty_window < 0:
            raise ValueError("uncertainty window must be nonnegative")

    def duration(self, metric_magnitude):
        m = np.asarray(metric_magnitude, dtype=float)
        with np.errstate(divide="ignore"):
            return np.minimum(self.c / m, self.max_duration)


@dataclass(frozen=True)
class ImpairmentConfig:
    """CSI acquisition impairments; None disables a component."""

    pilot_snr_db: float = None
    max_phase_error_deg: float = None

    def __post_init__(self):
        if self.max_phase_error_deg is not None and self.max_phase_error_deg < 0:
            raise ValueError("phase error bound must be nonnegative")

    @property
    def enabled(self):
        return self.pilot_snr_db is not None or self.max_phase_error_deg is not None


def apply_impairments(csi, cfg, rng, mean_power=1.0):
    """Impaired copy of a CSI array (estimation noise, then phase).

    The estimate is h + e with e ~ CN(0, mean_power 10^(-pilotSNR/10));
    the residual phase error multiplies the effective post-detection
    amplitude by cos(theta), theta ~ U(-theta_max, theta_max).
    """
    out = np.asarray(csi, dtype=complex)
    if cfg.pilot_snr_db is not None:
        var = mean_power * 10.0 ** (-cfg.pilot_snr_db / 10.0)
        out = out + complex_normal(rng, size=out.shape, variance=var)
    if cfg.max_phase_error_deg is not None and cfg.max_phase_error_deg > 0:
        bound = math.radians(cfg.max_phase_error_deg)
        out = out * np.cos(rng.uniform(-bound, bound, size=out.shape))
    return out


@dataclass
class FrameState:
    """One frame's channel view, buffered predictions and outcome."""

    frame_index: int
    csi_sr: np.ndarray
    csi_rd: np.ndarray
    buffer_sr: np.ndarray
    buffer_rd: np.ndarray
    buffer_written_at: int
    decoding_subset: tuple = ()
    outcome: SelectionOutcome = None
    collision: bool = False


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo point estimate with its binomial standard error."""

    trials: int
    outage_prob: float
    std_error: float
    mean_rate: float
    collision_rate: float


def _mc_estimate(outage, rates, collisions=0):
    n = outage.size
    p = float(np.mean(outage))
    se = math.sqrt(p * (1.0 - p) / n)
    return McEstimate(n, p, se, float(np.mean(rates)), collisions / n)


# -------------------------------------------------------------- networks


class SyntheticRhoNetwork:
    """Frame source with i.i.d. frames and exact-rho buffered metrics.

    Every frame draws fresh unit-power coefficients; the prediction
    buffered at frame t-1 for frame t is the correlated-pair partner
    of frame t's actuals, so the metric-actual correlation equals rho
    by construction.  Hop SNR means are half the grid SNR each.
    """

    def __init__(self, num_relays, snr_db, rho, rate=None, seed=0):
        if num_relays < 1:
            raise ValueError("need at least one relay")
        self.num_relays = int(num_relays)
        self.rate = rate if rate is not None else RateConfig(1.0)
        self.snr_sr = 0.5 * 10.0 ** (snr_db / 10.0)
        self.snr_rd = self.snr_sr
        self.rho = float(rho)
        self._rng = stream(seed, 41)

    def _pair(self):
        return correlated_pair(self._rng, self.rho, self.num_relays)

    def bootstrap(self):
        # no prediction exists yet; the frame's own stale estimates
        # stand in and the driver drops the frame from statistics
        m_sr, a_sr = self._pair()
        m_rd, a_rd = self._pair()
        return FrameState(0, a_sr, a_rd, m_sr, m_rd, buffer_written_at=-1)

    def advance(self, state):
        t = state.frame_index + 1
        m_sr, a_sr = self._pair()
        m_rd, a_rd = self._pair()
        return FrameState(t, a_sr, a_rd, m_sr, m_rd, buffer_written_at=t - 1)


class SeriesNetwork:
    """Frames riding generated fading records, one sample per frame.

    The buffered metric for the frame at sample s is the predictor's
    output computed from taps up to s - delay (written one frame
    before use), or the record itself delayed by `delay` samples when
    no predictor is given.  Frames start at the first sample every
    metric covers.
    """

    def __init__(self, series_sr, series_rd, snr_db, delay, rate=None,
                 predictor=None, tau=4, features="complex", scale=0.4):
        series_sr = np.asarray(series_sr)
        series_rd = np.asarray(series_rd)
        if series_sr.shape != series_rd.shape or series_sr.ndim != 2:
            raise ValueError("need matching (T, K) hop records")
        if delay < 1:
            raise ValueError("delay must be at least one sample")
        self.num_relays = series_sr.shape[1]
        self.rate = rate if rate is not None else RateConfig(1.0)
        self.snr_sr = 0.5 * 10.0 ** (snr_db / 10.0)
        self.snr_rd = self.snr_sr
        self.series_sr = series_sr
        self.series_rd = series_rd
        self.delay = int(delay)
        self.metric_sr, start_sr = _metric_record(
            series_sr, delay, predictor, tau, features, scale)
        self.metric_rd, start_rd = _metric_record(
            series_rd, delay, predictor, tau, features, scale)
        self.start = max(start_sr, start_rd)
        self.num_frames = series_sr.shape[0] - self.start
        if self.num_frames < 2:
            raise ValueError("record too short for the requested delay")

    def _frame(self, t):
        s = self.start + t
        return FrameState(t, self.series_sr[s], self.series_rd[s],
                          self.metric_sr[s], self.metric_rd[s],
                          buffer_written_at=t - 1)

    def bootstrap(self):
        state = self._frame(0)
        state.buffer_written_at = -1
        return state

    def advance(self, state):
        return self._frame(state.frame_index + 1)


def _metric_record(series, delay, predictor, tau, features, scale):
    """Per-sample metric array aligned with the record, plus first
    sample index it covers."""
    T = series.shape[0]
    metric = np.zeros_like(series)
    if predictor is None:
        metric[delay:] = series[:T - delay]
        return metric, delay
    from .predictor import predict_series

    pred, _ = predict_series(predictor, series, tau, delay,
                             features=features, scale=scale)
    start = tau + delay
    metric[start:] = pred
    return metric, start


# ------------------------------------------------------------ frame ops


def _check_causality(state):
    if state.frame_index > 0 and state.buffer_written_at > state.frame_index - 1:
        raise RuntimeError(
            "selection would read a prediction written at its own frame")


def _timer_race(mags, timer):
    """(winner position, collision flag) of a back-off race."""
    durations = timer.duration(mags)
    order = np.argsort(durations, kind="stable")
    collision = (durations.size > 1 and
                 durations[order[1]] - durations[order[0]]
                 < timer.uncertainty_window)
    return int(order[0]), bool(collision)


def run_distributed_df_frame(state, network, timer=None):
    """Decode-and-forward frame with a distributed timer race."""
    timer = timer if timer is not None else TimerModel()
    _check_causality(state)
    rate = network.rate
    g_sr = snr_from_gain(state.csi_sr, network.snr_sr, 1.0)
    g_rd = snr_from_gain(state.csi_rd, network.snr_rd, 1.0)
    ds = decoding_subset(g_sr, rate)
    state.decoding_subset = tuple(ds)
    if not ds:
        state.outcome = SelectionOutcome("df", (), 0.0, True, 0.0)
        state.collision = False
        return state
    pos, collision = _timer_race(np.abs(state.buffer_rd)[ds], timer)
    state.collision = collision
    if collision:
        state.outcome = SelectionOutcome("df", (), 0.0, True, 0.0)
        return state
    winner = ds[pos]
    g = float(g_rd[winner])
    realized = 0.5 * math.log2(1.0 + g)
    state.outcome = SelectionOutcome("df", (winner,), g,
                                     realized < rate.target_rate, realized)
    return state


def run_distributed_af_frame(state, network, timer=None, use_bound=True):
    """Amplify-and-forward frame: min-metric race over all relays."""
    timer = timer if timer is not None else TimerModel()
    _check_causality(state)
    rate = network.rate
    mags = np.minimum(np.abs(state.buffer_sr), np.abs(state.buffer_rd))
    winner, collision = _timer_race(mags, timer)
    state.decoding_subset = ()
    state.collision = collision
    if collision:
        state.outcome = SelectionOutcome("af", (), 0.0, True, 0.0)
        return state
    g_sr = float(snr_from_gain(state.csi_sr[winner], network.snr_sr, 1.0))
    g_rd = float(snr_from_gain(state.csi_rd[winner], network.snr_rd, 1.0))
    g = af_effective_snr(g_sr, g_rd, use_bound=use_bound)
    realized = 0.5 * math.log2(1.0 + g)
    state.outcome = SelectionOutcome("af", (winner,), g,
                                     realized < rate.target_rate, realized)
    return state


def run_centralized_df_frame(state, network, policy="reselect"):
    """Destination-side selection over the buffered metric vector.

    The destination ranks all buffered predictions; when its pick did
    not decode it re-selects the best remaining decoder (default) or
    terminates the frame.
    """
    if policy not in ("reselect", "terminate"):
        raise ValueError("policy must be 'reselect' or 'terminate'")
    _check_causality(state)
    rate = network.rate
    g_sr = snr_from_gain(state.csi_sr, network.snr_sr, 1.0)
    g_rd = snr_from_gain(state.csi_rd, network.snr_rd, 1.0)
    ds = set(decoding_subset(g_sr, rate))
    state.decoding_subset = tuple(sorted(ds))
    state.collision = False
    order = np.argsort(-np.abs(state.buffer_rd), kind="stable")
    chosen = None
    for k in order:
        if int(k) in ds:
            chosen = int(k)
            break
        if policy == "terminate":
            break
    if chosen is None:
        state.outcome = SelectionOutcome("df", (), 0.0, True, 0.0)
        return state
    g = float(g_rd[chosen])
    realized = 0.5 * math.log2(1.0 + g)
    state.outcome = SelectionOutcome("df", (chosen,), g,
                                     realized < rate.target_rate, realized)
    return state


def simulate_frames(scheme, network, num_frames, timer=None,
                    policy="reselect", use_bound=True):
    """Drive a frame algorithm; the bootstrap frame is excluded.

    scheme: 'df' (distributed), 'df-central' or 'af'.  Returns one
    McEstimate over frames 1 .. num_frames - 1.
    """
    if num_frames < 2:
        raise ValueError("need at least two frames (the first is dropped)")
    limit = getattr(network, "num_frames", None)
    if limit is not None and num_frames > limit:
        raise ValueError(f"record supports at most {limit} frames")
    state = network.bootstrap()
    outage = np.empty(num_frames - 1, dtype=bool)
    rates = np.empty(num_frames - 1)
    collisions = 0
    for t in range(num_frames):
        if t > 0:
            state = network.advance(state)
        if scheme == "df":
            state = run_distributed_df_frame(state, network, timer)
        elif scheme == "df-central":
            state = run_centralized_df_frame(state, network, policy)
        elif scheme == "af":
            state = run_distributed_af_frame(state, network, timer, use_bound)
        else:
            raise ValueError(f"unknown frame scheme {scheme!r}")
        if t > 0:
            outage[t - 1] = state.outcome.outage
            rates[t - 1] = state.outcome.realized_rate
            collisions += state.collision
    return _mc_estimate(outage, rates, collisions)


# ------------------------------------------------- vectorized estimators


def _af_snr_block(g_sr, g_rd, use_bound):
    """Vector form of the per-relay amplified end-to-end SNR."""
    if use_bound:
        return np.minimum(g_sr, g_rd)
    return g_sr * g_rd / (g_sr + g_rd + 1.0)


def _df_block(g_sr, g_rd, metric, rate, top_two=False):
    """Outage flags and realized rates of a (n, K) block of DF frames."""
    go = rate.gamma_o
    ds = g_sr >= go
    masked = np.where(ds, metric, -np.inf)
    has = ds.any(axis=1)
    rows = np.arange(g_sr.shape[0])
    if not top_two:
        choice = np.argmax(masked, axis=1)
        g = np.where(has, g_rd[rows, choice], 0.0)
    else:
        idx = np.argsort(-masked, axis=1, kind="stable")
        g1 = g_rd[rows, idx[:, 0]]
        count = ds.sum(axis=1)
        if g_sr.shape[1] > 1:
            g2 = g_rd[rows, idx[:, 1]]
            g = np.where(count >= 2, ostc_effective_snr(g1, g2), g1)
        else:
            g = g1
        g = np.where(has, g, 0.0)
    rates = np.where(has, 0.5 * np.log2(1.0 + g), 0.0)
    outage = ~has | (g < go)
    return outage, rates


def _impaired(metric_h, actual_h, imp, rng):
    """Split an impairment config over the two CSI paths."""
    if imp is None or not imp.enabled:
        return metric_h, actual_h
    metric_h = apply_impairments(
        metric_h, ImpairmentConfig(pilot_snr_db=imp.pilot_snr_db), rng)
    actual_h = apply_impairments(
        actual_h, ImpairmentConfig(max_phase_error_deg=imp.max_phase_error_deg), rng)
    return metric_h, actual_h


def estimate(scheme, snr_grid_db, trials, num_relays=8, rho=1.0, rate=None,
             seed=0, impairments=None, use_bound=True, af_mode="e2e",
             chunk=250_000):
    """Synthetic-rho Monte-Carlo across an SNR grid.

    scheme is 'df', 'af', 'ostc' or 'dt'.  Selection ranks
    rho-correlated metric copies of the actual coefficients; rho = 1
    is perfect selection and rho = J0(2 pi f_d tau) the no-predictor
    baseline.  Pilot noise perturbs the metric path, phase error the
    actual (detection) path.  Returns one McEstimate per grid point;
    deterministic for a given seed and chunk size (the chunking sets
    the draw order of the underlying stream).

    af_mode picks the amplified link's correlation structure: 'e2e'
    treats the end-to-end SNR as one fading figure with its own
    outdated estimate, which is the model behind the closed forms;
    'per-hop' ranks min(|metric_sr|, |metric_rd|) of separately
    outdated hop estimates, the rule the distributed algorithm runs.
    The two differ by a few percent at intermediate rho.
    """
    if scheme not in _SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {_SCHEMES}")
    if trials < 10_000:
        raise ValueError("need at least 1e4 trials per point")
    if af_mode not in ("e2e", "per-hop"):
        raise ValueError("af_mode must be 'e2e' or 'per-hop'")
    rate = rate if rate is not None else RateConfig(1.0)
    out = []
    for i, snr_db in enumerate(np.atleast_1d(snr_grid_db)):
        rng = stream(seed, 43, i)
        total = 10.0 ** (snr_db / 10.0)
        hop = 0.5 * total
        done = 0
        outage = np.empty(trials, dtype=bool)
        rates = np.empty(trials)
        while done < trials:
            n = min(chunk, trials - done)
            sl = slice(done, done + n)
            if scheme == "dt":
                g = rng.exponential(total, size=n)
                outage[sl] = g < rate.direct_threshold
                rates[sl] = np.log2(1.0 + g)  # full-frame link, no halving
            elif scheme == "af" and af_mode == "e2e":
                # one outdated estimate of the end-to-end figure itself
                m, a = correlated_pair(rng, rho, (n, num_relays))
                m, a = _impaired(m, a, impairments, rng)
                gamma_e = hop / 2.0  # mean of min(sr, rd) at equal hops
                gm = snr_from_gain(m, gamma_e, 1.0)
                rows = np.arange(n)
                g = snr_from_gain(a, gamma_e, 1.0)[rows, np.argmax(gm, axis=1)]
                outage[sl] = g < rate.gamma_o
                rates[sl] = 0.5 * np.log2(1.0 + g)
            elif scheme == "af":
                m_sr, a_sr = correlated_pair(rng, rho, (n, num_relays))
                m_rd, a_rd = correlated_pair(rng, rho, (n, num_relays))
                m_sr, a_sr = _impaired(m_sr, a_sr, impairments, rng)
                m_rd, a_rd = _impaired(m_rd, a_rd, impairments, rng)
                gm = np.minimum(snr_from_gain(m_sr, hop, 1.0),
                                snr_from_gain(m_rd, hop, 1.0))
                choice = np.argmax(gm, axis=1)
                rows = np.arange(n)
                g = _af_snr_block(snr_from_gain(a_sr[rows, choice], hop, 1.0),
                                  snr_from_gain(a_rd[rows, choice], hop, 1.0),
                                  use_bound)
                outage[sl] = g < rate.gamma_o
                rates[sl] = 0.5 * np.log2(1.0 + g)
            else:
                g_sr = rng.exponential(hop, size=(n, num_relays))
                m_rd, a_rd = correlated_pair(rng, rho, (n, num_relays))
                m_rd, a_rd = _impaired(m_rd, a_rd, impairments, rng)
                outage[sl], rates[sl] = _df_block(
                    g_sr, snr_from_gain(a_rd, hop, 1.0),
                    snr_from_gain(m_rd, hop, 1.0),
                    rate, top_two=(scheme == "ostc"))
            done += n
        out.append(_mc_estimate(outage, rates))
    return out


def estimate_series(scheme, series_sr, series_rd, snr_grid_db, delay,
                    rate=None, predictor=None, tau=4, features="complex",
                    scale=0.4, use_bound=True):
    """Monte-Carlo across an SNR grid with frames riding fading records.

    One frame per record sample (from the first the metric covers);
    the metric is the predictor's output for that sample, or the
    record delayed by `delay` samples when no predictor is given.
    Deterministic given the records and the predictor.
    """
    if scheme not in ("df", "af", "ostc"):
        raise ValueError(f"series mode covers df/af/ostc, not {scheme!r}")
    rate = rate if rate is not None else RateConfig(1.0)
    net = SeriesNetwork(series_sr, series_rd, 0.0, delay, rate=rate,
                        predictor=predictor, tau=tau, features=features,
                        scale=scale)
    s = slice(net.start, None)
    h_sr, h_rd = net.series_sr[s], net.series_rd[s]
    m_sr, m_rd = net.metric_sr[s], net.metric_rd[s]
    out = []
    for snr_db in np.atleast_1d(snr_grid_db):
        hop = 0.5 * 10.0 ** (snr_db / 10.0)
        g_sr = snr_from_gain(h_sr, hop, 1.0)
        g_rd = snr_from_gain(h_rd, hop, 1.0)
        if scheme == "af":
            gm = np.minimum(snr_from_gain(m_sr, hop, 1.0),
                            snr_from_gain(m_rd, hop, 1.0))
            choice = np.argmax(gm, axis=1)
            rows = np.arange(g_sr.shape[0])
            g = _af_snr_block(g_sr[rows, choice], g_rd[rows, choice], use_bound)
            outage = g < rate.gamma_o
            rates = 0.5 * np.log2(1.0 + g)
        else:
            outage, rates = _df_block(g_sr, g_rd,
                                      snr_from_gain(m_rd, hop, 1.0),
                                      rate, top_two=(scheme == "ostc"))
        out.append(_mc_estimate(outage, rates))
    return out


# ----------------------------------------------------------------- output

CSV_FIELDS = ("scheme", "K", "rho_mode", "snr_db", "outage", "std_err",
              "rate", "collision_rate", "trials", "seed")


def experiment_rows(scheme, num_relays, rho_mode, snr_grid_db, estimates, seed):
    """Self-describing result rows, one per grid point."""
    rows = []
    for snr_db, est in zip(np.atleast_1d(snr_grid_db), estimates):
        rows.append({
            "scheme": scheme,
            "K": num_relays,
            "rho_mode": rho_mode,
            "snr_db": float(snr_db),
            "outage": est.outage_prob,
            "std_err": est.std_error,
            "rate": est.mean_rate,
            "collision_rate": est.collision_rate,
            "trials": est.trials,
            "seed": seed,
        })
    return rows
