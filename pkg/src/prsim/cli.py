"""Command-line experiment runner.

Subcommands:

  gen-data      write the channel dataset (CSV, one complex link per
                column pair)
  train         fit the predictor on a stored dataset, save the model
  predict-eval  prediction quality (correlation, error power) against
                the stale-CSI baseline
  outage        Monte-Carlo plus closed-form outage curves on the grid
  capacity      Monte-Carlo plus closed-form ergodic rate curves
  flops         per-prediction cost of the configured architecture
  protocol-sim  frame-accurate timer-based selection runs

Named presets bundle the curve families of the standard result
figures: fig3b (prediction quality against horizon, two Doppler
spreads), fig4a (DF outage for selection on stale, pair and predicted
CSI), fig4b (the AF counterpart), fig6a (ergodic capacity), fig6b
(pilot-noise and phase-error robustness), fig7a (Doppler sweep on
Rician links, record-driven), fig7b (network scaling against direct
transmission).  A preset is a complete experiment bound to one
subcommand; --trials, --seed and --out still override its settings.

Curves are labelled by the (scheme, rho_mode) pair: classic selection
on stale estimates is the df scheme with rho_mode outdated(d), and
predictive selection is df with rho_mode predicted(d), so the usual
scheme names map onto metric sources rather than separate estimators.
Every CSV row carries the config hash and the seed; rerunning with an
equal hash and seed reproduces the file byte for byte.  Closed-form
values are filled for df/af rows whose metric the analysis models
(perfect, synthetic and predicted correlation) and for direct
transmission; they are left blank for pair selection and for the
outdated rows, whose reference expressions live elsewhere.
"""

import argparse
import csv
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from .analytics import (AfParams, DfParams, capacity_af, capacity_df,
                        capacity_exponential_exact, outage_af, outage_df)
from .channel import FadingProcessConfig, generate_series, jakes_correlation
from .config import (ConfigError, ExperimentConfig, FadingSettings,
                     load_config, parse_config)
from .predictor import (LayerSpec, TrainConfig, flops_per_step,
                        flops_simplified, load_model, predict_series,
                        save_model, train_link_predictor)
from .selection import RateConfig
from .simulator import (CSV_FIELDS, ImpairmentConfig, SeriesNetwork,
                        SyntheticRhoNetwork, TimerModel, estimate,
                        estimate_series, experiment_rows, simulate_frames)

# Derived stream seeds: training, evaluation and the two frame-level
# records draw from fixed offsets of the experiment seed so that every
# subcommand sees the same processes for the same configured seed.
_TRAIN_TAG = 101
_EVAL_TAG = 202
_SR_TAG = 303
_RD_TAG = 404

_EVAL_LEN = 10_000
_MIN_TRIALS = 10_000

RESULT_FIELDS = CSV_FIELDS + ("analytic", "config_hash")
PREDICT_FIELDS = ("doppler_hz", "horizon", "rho_outdated", "rho_predicted",
                  "error_power", "trials", "config_hash", "seed")


def _sub_seed(seed, tag):
    # injective across tags for any experiment seed
    return 7 * seed + tag


def _fading_process(fading, seed):
    return FadingProcessConfig(
        doppler_hz=fading.doppler_hz,
        sample_rate_hz=fading.sample_rate_hz,
        mean_power=fading.mean_power,
        distribution=fading.distribution,
        k_factor=fading.k_factor,
        num_sinusoids=fading.num_sinusoids,
        seed=seed,
    )


def _series(fading, seed, length, links):
    cfg = _fading_process(fading, seed)
    return np.column_stack(
        [generate_series(cfg, length, link=i) for i in range(links)])


def _specs(pred):
    return tuple(LayerSpec(pred.kind, pred.neurons) for _ in range(pred.layers))


def _train_config(pred, seed, val_fraction=0.0):
    return TrainConfig(epochs=pred.epochs, batch_size=pred.batch_size,
                       lr=pred.lr, seed=seed, val_fraction=val_fraction)


def _hop_snrs(cfg, snr_db):
    total = 10.0 ** (snr_db / 10.0)
    frac = cfg.network.source_power_fraction
    return frac * total, (1.0 - frac) * total


# ---------------------------------------------------------------------------
# run plans


@dataclass(frozen=True)
class RunSpec:
    """One curve: an estimator plus the source of its selection metric."""

    scheme: str                    # df | af | ostc | dt
    relays: int
    rho_mode: str                  # CSV label
    rho: float = None              # None -> resolve from the predictor
    horizon: int = 0               # prediction horizon for resolution
    analytic: bool = True          # closed form applies to this metric
    impairments: ImpairmentConfig = None
    fading: FadingSettings = None  # record-driven runs only
    record: bool = False           # run on generated records
    use_predictor: bool = False    # record metric from the predictor


class PredictorPool:
    """Trains (or loads) predictors once per (fading, horizon) pair.

    Training data and the fresh evaluation record derive from the
    experiment seed, so resolved correlations are reproducible.  When
    the csi section names an existing model file it is loaded instead
    and only evaluated.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        self._nets = {}
        self._rhos = {}

    def _key(self, fading, horizon, links):
        return (fading, horizon, links)

    def net(self, fading, horizon, links):
        key = self._key(fading, horizon, links)
        if key not in self._nets:
            pred = self.cfg.predictor
            path = self.cfg.csi.model
            if path and os.path.exists(path):
                net = load_model(path)
            else:
                if path:
                    raise ConfigError(
                        "model file %r not found (run the train subcommand "
                        "first, or clear csi.model to train on the fly)" % path)
                series = _series(fading, _sub_seed(self.cfg.seed, _TRAIN_TAG),
                                 pred.train_len, links)
                net, _ = train_link_predictor(
                    series, tau=pred.tau, horizon=horizon,
                    specs=_specs(pred), features=pred.features,
                    scale=pred.scale, net_seed=self.cfg.seed,
                    cfg=_train_config(pred, self.cfg.seed))
            self._nets[key] = net
        return self._nets[key]

    def rho(self, fading, horizon, links):
        key = self._key(fading, horizon, links)
        if key not in self._rhos:
            net = self.net(fading, horizon, links)
            pred = self.cfg.predictor
            record = _series(fading, _sub_seed(self.cfg.seed, _EVAL_TAG),
                             _EVAL_LEN, links)
            _, rho = predict_series(net, record, pred.tau, horizon,
                                    features=pred.features, scale=pred.scale)
            self._rhos[key] = rho
        return self._rhos[key]


def _generic_runs(cfg):
    """Expand the configured scheme list against the single csi mode."""
    csi = cfg.csi
    imp = None
    if cfg.protocol.pilot_snr_db is not None or \
            cfg.protocol.max_phase_error_deg is not None:
        imp = ImpairmentConfig(cfg.protocol.pilot_snr_db,
                               cfg.protocol.max_phase_error_deg)
    runs = []
    for scheme in cfg.schemes:
        if scheme == "df-central":
            raise ConfigError("df-central is a protocol-sim scheme")
        if scheme == "dt":
            runs.append(RunSpec("dt", cfg.network.relays, "direct", rho=1.0,
                                impairments=imp))
            continue
        if csi.mode == "perfect":
            runs.append(RunSpec(scheme, cfg.network.relays, "perfect",
                                rho=1.0, impairments=imp,
                                analytic=scheme != "ostc"))
        elif csi.mode == "synthetic":
            runs.append(RunSpec(scheme, cfg.network.relays,
                                "synthetic(%s)" % repr(csi.rho), rho=csi.rho,
                                impairments=imp, analytic=scheme != "ostc"))
        elif csi.mode == "outdated":
            rho = jakes_correlation(cfg.fading.doppler_hz,
                                    csi.delay / cfg.fading.sample_rate_hz)
            runs.append(RunSpec(scheme, cfg.network.relays,
                                "outdated(%d)" % csi.delay, rho=rho,
                                impairments=imp, analytic=False))
        else:  # predicted
            runs.append(RunSpec(scheme, cfg.network.relays,
                                "predicted(%d)" % csi.delay, rho=None,
                                horizon=csi.delay, impairments=imp,
                                analytic=scheme != "ostc"))
    return runs


# ---------------------------------------------------------------------------
# analytic columns


def _analytic_outage(spec, cfg, snr_db, rho):
    rate = RateConfig(cfg.network.rate)
    g_sr, g_rd = _hop_snrs(cfg, snr_db)
    if spec.scheme == "dt":
        total = 10.0 ** (snr_db / 10.0)
        return 1.0 - np.exp(-rate.direct_threshold / total)
    if spec.scheme == "df":
        return outage_df(DfParams(K=spec.relays, gamma_sr=g_sr,
                                  gamma_rd=g_rd, rho=rho,
                                  gamma_o=rate.gamma_o))
    if spec.scheme == "af":
        return outage_af(AfParams(K=spec.relays, gamma_sr=g_sr,
                                  gamma_rd=g_rd, rho=rho,
                                  gamma_o=rate.gamma_o))
    return None


def _analytic_capacity(spec, cfg, snr_db, rho):
    rate = RateConfig(cfg.network.rate)
    g_sr, g_rd = _hop_snrs(cfg, snr_db)
    if spec.scheme == "dt":
        return capacity_exponential_exact(10.0 ** (snr_db / 10.0))
    if spec.scheme == "df":
        return capacity_df(DfParams(K=spec.relays, gamma_sr=g_sr,
                                    gamma_rd=g_rd, rho=rho,
                                    gamma_o=rate.gamma_o))
    if spec.scheme == "af":
        return capacity_af(AfParams(K=spec.relays, gamma_sr=g_sr,
                                    gamma_rd=g_rd, rho=rho,
                                    gamma_o=rate.gamma_o), half_duplex=True)
    return None


# ---------------------------------------------------------------------------
# csv plumbing


def _write_rows(path, rows, fields):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _blank_if_none(value):
    return "" if value is None else value


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen_data(cfg, out=None):
    """Write the channel dataset: one row per sample, re/im per link."""
    path = out or cfg.dataset.path
    links = cfg.network.relays
    series = _series(cfg.fading, _sub_seed(cfg.seed, _TRAIN_TAG),
                     cfg.dataset.length, links)
    flat = np.empty((series.shape[0], 2 * links))
    flat[:, 0::2] = series.real
    flat[:, 1::2] = series.imag
    header = ("channel dataset hash=%s seed=%d links=%d fs=%s fd=%s dist=%s\n"
              % (cfg.config_hash(), cfg.seed, links,
                 repr(cfg.fading.sample_rate_hz), repr(cfg.fading.doppler_hz),
                 cfg.fading.distribution))
    header += ",".join("re_%d,im_%d" % (i, i) for i in range(links))
    np.savetxt(path, flat, fmt="%.12e", delimiter=",", header=header)
    print("wrote %d samples x %d links to %s" % (series.shape[0], links, path))
    return path


def _load_dataset(path, links):
    if not os.path.exists(path):
        raise ConfigError(
            "dataset %r not found (run the gen-data subcommand first)" % path)
    flat = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if flat.shape[1] != 2 * links:
        raise ConfigError(
            "dataset %r has %d columns, expected %d for %d links"
            % (path, flat.shape[1], 2 * links, links))
    return flat[:, 0::2] + 1j * flat[:, 1::2]


def cmd_train(cfg, out=None):
    """Fit the predictor on the stored dataset and save the model."""
    pred = cfg.predictor
    horizon = cfg.csi.delay
    series = _load_dataset(cfg.dataset.path, cfg.network.relays)
    if pred.train_len > series.shape[0]:
        raise ConfigError("training length %d exceeds dataset length %d"
                          % (pred.train_len, series.shape[0]))
    net, report = train_link_predictor(
        series[:pred.train_len], tau=pred.tau, horizon=horizon,
        specs=_specs(pred), features=pred.features, scale=pred.scale,
        net_seed=cfg.seed, cfg=_train_config(pred, cfg.seed, val_fraction=0.1))
    record = _series(cfg.fading, _sub_seed(cfg.seed, _EVAL_TAG),
                     _EVAL_LEN, cfg.network.relays)
    _, rho = predict_series(net, record, pred.tau, horizon,
                            features=pred.features, scale=pred.scale)
    rho_out = jakes_correlation(cfg.fading.doppler_hz,
                                horizon / cfg.fading.sample_rate_hz)
    path = out or cfg.csi.model or "model.npz"
    save_model(net, path)
    for i, mse in enumerate(report.epoch_mse, start=1):
        print("epoch %2d:  train mse %.6f" % (i, mse))
    print("final val mse: %.6f" % report.val_mse)
    print("achieved rho at horizon %d: %.4f (outdated baseline %.4f)"
          % (horizon, rho, rho_out))
    print("model saved to %s" % path)
    return {"model": path, "report": report, "rho": rho,
            "val_mse": report.val_mse}


def _eval_model(cfg, pool, fading, horizon):
    """(rho_outdated, rho_predicted, error power) on a fresh record."""
    pred = cfg.predictor
    links = cfg.network.relays
    net = pool.net(fading, horizon, links)
    record = _series(fading, _sub_seed(cfg.seed, _EVAL_TAG), _EVAL_LEN, links)
    out, rho = predict_series(net, record, pred.tau, horizon,
                              features=pred.features, scale=pred.scale)
    actual = record[pred.tau + horizon:]
    if pred.features == "magnitude":
        actual = np.abs(actual)
    err = float(np.mean(np.abs(out - actual) ** 2))
    rho_out = jakes_correlation(fading.doppler_hz,
                                horizon / fading.sample_rate_hz)
    return rho_out, rho, err


def cmd_predict_eval(cfg, out=None, plan=None):
    """Prediction quality rows over (fading, horizon) pairs."""
    pool = PredictorPool(cfg)
    pairs = plan or [(cfg.fading, cfg.csi.delay)]
    rows = []
    for fading, horizon in pairs:
        rho_out, rho_pred, err = _eval_model(cfg, pool, fading, horizon)
        rows.append({
            "doppler_hz": fading.doppler_hz,
            "horizon": horizon,
            "rho_outdated": rho_out,
            "rho_predicted": rho_pred,
            "error_power": err,
            "trials": _EVAL_LEN,
            "config_hash": cfg.config_hash(),
            "seed": cfg.seed,
        })
        print("fd=%6.1f Hz  D=%d  rho_outdated=%.4f  rho_predicted=%.4f"
              % (fading.doppler_hz, horizon, rho_out, rho_pred))
    path = out or cfg.output
    _write_rows(path, rows, PREDICT_FIELDS)
    print("wrote %d rows to %s" % (len(rows), path))
    return rows


def _clamped_trials(cfg):
    if cfg.trials < _MIN_TRIALS:
        print("note: trials raised to %d (estimator floor)" % _MIN_TRIALS)
        return _MIN_TRIALS
    return cfg.trials


def _curve_rows(cfg, runs, analytic_fn):
    """Monte-Carlo every run and attach analytic columns."""
    pool = PredictorPool(cfg)
    trials = _clamped_trials(cfg)
    rate = RateConfig(cfg.network.rate)
    rows = []
    for spec in runs:
        if spec.record:
            fading = spec.fading or cfg.fading
            length = trials + cfg.predictor.tau + spec.horizon + 2
            series_sr = _series(fading, _sub_seed(cfg.seed, _SR_TAG), length,
                                spec.relays)
            series_rd = _series(fading, _sub_seed(cfg.seed, _RD_TAG), length,
                                spec.relays)
            predictor = (pool.net(fading, spec.horizon, spec.relays)
                         if spec.use_predictor else None)
            ests = estimate_series(spec.scheme, series_sr, series_rd,
                                   cfg.snr_grid_db, spec.horizon, rate=rate,
                                   predictor=predictor,
                                   tau=cfg.predictor.tau,
                                   features=cfg.predictor.features,
                                   scale=cfg.predictor.scale)
            rho = None
        else:
            rho = spec.rho
            if rho is None:
                rho = pool.rho(spec.fading or cfg.fading, spec.horizon,
                               spec.relays)
                print("resolved %s: rho=%.4f" % (spec.rho_mode, rho))
            ests = estimate(spec.scheme, cfg.snr_grid_db, trials,
                            num_relays=spec.relays, rho=rho, rate=rate,
                            seed=cfg.seed, impairments=spec.impairments)
        base = experiment_rows(spec.scheme, spec.relays, spec.rho_mode,
                               cfg.snr_grid_db, ests, cfg.seed)
        for row, snr_db in zip(base, cfg.snr_grid_db):
            value = None
            if spec.analytic and not spec.record and spec.impairments is None:
                value = analytic_fn(spec, cfg, snr_db, rho)
            row["analytic"] = _blank_if_none(value)
            row["config_hash"] = cfg.config_hash()
            rows.append(row)
    return rows


def cmd_outage(cfg, out=None, runs=None):
    rows = _curve_rows(cfg, runs or _generic_runs(cfg), _analytic_outage)
    path = out or cfg.output
    _write_rows(path, rows, RESULT_FIELDS)
    print("wrote %d rows to %s" % (len(rows), path))
    return rows


def cmd_capacity(cfg, out=None, runs=None):
    rows = _curve_rows(cfg, runs or _generic_runs(cfg), _analytic_capacity)
    path = out or cfg.output
    _write_rows(path, rows, RESULT_FIELDS)
    print("wrote %d rows to %s" % (len(rows), path))
    return rows


def cmd_flops(cfg, out=None):
    """Complexity table of the configured architecture."""
    pred, fl = cfg.predictor, cfg.flops
    widths = (pred.neurons,) * pred.layers
    exact = flops_per_step(fl.n_input, widths, fl.n_output, kind=pred.kind)
    simplified = flops_simplified(pred.kind, pred.layers, pred.neurons)
    rate = exact * fl.f_p
    print("kind=%s layers=%d neurons=%d n_in=%d n_out=%d"
          % (pred.kind, pred.layers, pred.neurons, fl.n_input, fl.n_output))
    print("exact ops per prediction : %d" % exact)
    print("simplified 4(1+cL)n^2    : %d" % simplified)
    print("rate at f_p=%s Hz        : %s MFLOPS" % (repr(fl.f_p), rate / 1e6))
    if out:
        rows = [{
            "kind": pred.kind, "layers": pred.layers, "neurons": pred.neurons,
            "n_input": fl.n_input, "n_output": fl.n_output, "exact": exact,
            "simplified": simplified, "flops": rate,
            "config_hash": cfg.config_hash(), "seed": cfg.seed,
        }]
        _write_rows(out, rows, ("kind", "layers", "neurons", "n_input",
                                "n_output", "exact", "simplified", "flops",
                                "config_hash", "seed"))
        print("wrote 1 row to %s" % out)
    return {"exact": exact, "simplified": simplified, "flops": rate}


def cmd_protocol_sim(cfg, out=None):
    """Frame-accurate runs with timers, buffers and optional collisions."""
    pro = cfg.protocol
    timer = TimerModel(pro.timer_c, pro.timer_max, pro.uncertainty_window)
    pool = PredictorPool(cfg)
    schemes = [s for s in cfg.schemes if s in ("df", "af", "df-central")]
    if not schemes:
        raise ConfigError("protocol-sim needs df, af or df-central schemes")
    csi = cfg.csi
    if csi.mode == "perfect":
        label = "perfect"
    elif csi.mode == "synthetic":
        label = "synthetic(%s)" % repr(csi.rho)
    else:
        label = "%s(%d)" % (csi.mode, csi.delay)
    rows = []
    for scheme in schemes:
        ests = []
        for snr_db in cfg.snr_grid_db:
            if csi.mode in ("perfect", "synthetic"):
                rho = 1.0 if csi.mode == "perfect" else csi.rho
                network = SyntheticRhoNetwork(cfg.network.relays, snr_db, rho,
                                              rate=RateConfig(cfg.network.rate),
                                              seed=cfg.seed)
                frames = pro.frames
            else:
                length = pro.frames + cfg.predictor.tau + csi.delay + 2
                series_sr = _series(cfg.fading, _sub_seed(cfg.seed, _SR_TAG),
                                    length, cfg.network.relays)
                series_rd = _series(cfg.fading, _sub_seed(cfg.seed, _RD_TAG),
                                    length, cfg.network.relays)
                predictor = (pool.net(cfg.fading, csi.delay,
                                      cfg.network.relays)
                             if csi.mode == "predicted" else None)
                network = SeriesNetwork(series_sr, series_rd, snr_db,
                                        csi.delay,
                                        rate=RateConfig(cfg.network.rate),
                                        predictor=predictor,
                                        tau=cfg.predictor.tau,
                                        features=cfg.predictor.features,
                                        scale=cfg.predictor.scale)
                frames = min(pro.frames, network.num_frames)
            kind = "df" if scheme == "df-central" else scheme
            if scheme == "df-central":
                ests.append(simulate_frames("df-central", network, frames,
                                            policy=pro.policy))
            else:
                ests.append(simulate_frames(kind, network, frames,
                                            timer=timer))
        base = experiment_rows(scheme, cfg.network.relays, label,
                               cfg.snr_grid_db, ests, cfg.seed)
        for row in base:
            row["analytic"] = ""
            row["config_hash"] = cfg.config_hash()
            rows.append(row)
    path = out or cfg.output
    _write_rows(path, rows, RESULT_FIELDS)
    print("wrote %d rows to %s" % (len(rows), path))
    return rows


# ---------------------------------------------------------------------------
# presets


def _rho_outdated(fading, delay):
    return jakes_correlation(fading.doppler_hz,
                             delay / fading.sample_rate_hz)


# presets fit the predictor with the long-budget recipe (about two
# minutes per horizon) so the predicted curves sit where the analysis
# puts nearly-optimal selection
_PRESET_PREDICTOR = """
[predictor]
train_len = 40000
epochs = 30
batch_size = 64
"""


def _preset_fig3b():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig3b
output = fig3b.csv
""")
    plan = []
    for doppler in (100.0, 50.0):
        fading = replace(cfg.fading, doppler_hz=doppler)
        for horizon in (1, 2, 3, 4):
            plan.append((fading, horizon))
    return cfg, "predict-eval", plan


def _preset_fig4a():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig4a
output = fig4a.csv
trials = 200000
""")
    K = cfg.network.relays
    runs = [RunSpec("df", K, "perfect", rho=1.0)]
    for delay in (2, 3):
        rho_o = _rho_outdated(cfg.fading, delay)
        runs.append(RunSpec("df", K, "outdated(%d)" % delay, rho=rho_o,
                            analytic=False))
        runs.append(RunSpec("ostc", K, "outdated(%d)" % delay, rho=rho_o,
                            analytic=False))
        runs.append(RunSpec("df", K, "predicted(%d)" % delay, rho=None,
                            horizon=delay))
    return cfg, "outage", runs


def _preset_fig4b():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig4b
output = fig4b.csv
trials = 200000
""")
    K = cfg.network.relays
    runs = [RunSpec("af", K, "perfect", rho=1.0)]
    for delay in (1, 2, 3):
        runs.append(RunSpec("af", K, "outdated(%d)" % delay,
                            rho=_rho_outdated(cfg.fading, delay),
                            analytic=False))
        runs.append(RunSpec("af", K, "predicted(%d)" % delay, rho=None,
                            horizon=delay))
    return cfg, "outage", runs


def _preset_fig6a():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig6a
output = fig6a.csv
trials = 200000
""")
    K = cfg.network.relays
    rho_o = _rho_outdated(cfg.fading, 3)
    runs = [
        RunSpec("df", K, "perfect", rho=1.0),
        RunSpec("df", K, "outdated(3)", rho=rho_o, analytic=False),
        RunSpec("ostc", K, "outdated(3)", rho=rho_o, analytic=False),
        RunSpec("df", K, "predicted(3)", rho=None, horizon=3),
        RunSpec("af", K, "perfect", rho=1.0),
        RunSpec("af", K, "outdated(3)", rho=rho_o, analytic=False),
        RunSpec("af", K, "predicted(3)", rho=None, horizon=3),
    ]
    return cfg, "capacity", runs


def _preset_fig6b():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig6b
output = fig6b.csv
trials = 200000
""")
    K = cfg.network.relays
    rho_o = _rho_outdated(cfg.fading, 3)
    runs = [
        RunSpec("df", K, "predicted(3)", rho=None, horizon=3),
        RunSpec("df", K, "outdated(3)", rho=rho_o, analytic=False),
    ]
    for snr in (30.0, 25.0, 20.0):
        runs.append(RunSpec("df", K, "predicted(3)+pilot%gdB" % snr, rho=None,
                            horizon=3,
                            impairments=ImpairmentConfig(pilot_snr_db=snr)))
    for deg in (5.0, 20.0):
        runs.append(RunSpec(
            "df", K, "predicted(3)+phase%gdeg" % deg, rho=None, horizon=3,
            impairments=ImpairmentConfig(max_phase_error_deg=deg)))
    return cfg, "outage", runs


def _preset_fig7a():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig7a
output = fig7a.csv
trials = 100000

[fading]
distribution = rician
k_factor = 3.0
""")
    K = cfg.network.relays
    runs = []
    for doppler in (25.0, 50.0, 100.0):
        fading = replace(cfg.fading, doppler_hz=doppler)
        tag = "/fd=%g" % doppler
        runs.append(RunSpec("df", K, "outdated(3)" + tag, horizon=3,
                            analytic=False, fading=fading, record=True))
        runs.append(RunSpec("df", K, "predicted(3)" + tag, horizon=3,
                            analytic=False, fading=fading, record=True,
                            use_predictor=True))
    return cfg, "outage", runs


def _preset_fig7b():
    cfg = parse_config(_PRESET_PREDICTOR + """
[experiment]
name = fig7b
output = fig7b.csv
trials = 100000
""")
    runs = [RunSpec("dt", cfg.network.relays, "direct", rho=1.0)]
    rho_o = _rho_outdated(cfg.fading, 3)
    for relays in (1, 2, 6):
        runs.append(RunSpec("df", relays, "outdated(3)", rho=rho_o,
                            analytic=False))
        runs.append(RunSpec("df", relays, "predicted(3)", rho=None,
                            horizon=3))
    return cfg, "outage", runs


PRESETS = {
    "fig3b": _preset_fig3b,
    "fig4a": _preset_fig4a,
    "fig4b": _preset_fig4b,
    "fig6a": _preset_fig6a,
    "fig6b": _preset_fig6b,
    "fig7a": _preset_fig7a,
    "fig7b": _preset_fig7b,
}


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="prsim",
        description="relay-selection experiments: datasets, predictor "
                    "training, outage/capacity curves, complexity tables")
    sub = parser.add_subparsers(dest="command", required=True)
    names = ("gen-data", "train", "predict-eval", "outage", "capacity",
             "flops", "protocol-sim")
    for name in names:
        p = sub.add_parser(name)
        p.add_argument("--config", help="experiment file")
        p.add_argument("--preset", choices=sorted(PRESETS),
                       help="named experiment")
        p.add_argument("--seed", type=int, help="override experiment seed")
        p.add_argument("--trials", type=int, help="override trial count")
        p.add_argument("--out", help="override output path")
    return parser


def _resolve(args):
    """Config plus optional preset plan from parsed arguments."""
    if args.config and args.preset:
        raise ConfigError("--config and --preset are mutually exclusive")
    plan_command, plan = None, None
    if args.preset:
        cfg, plan_command, plan = PRESETS[args.preset]()
    elif args.config:
        cfg = load_config(args.config)
    else:
        cfg = ExperimentConfig()
    if args.seed is not None or args.trials is not None:
        kwargs = {}
        if args.seed is not None:
            kwargs["seed"] = args.seed
        if args.trials is not None:
            kwargs["trials"] = args.trials
        cfg = replace(cfg, **kwargs)
    return cfg, plan_command, plan


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg, plan_command, plan = _resolve(args)
        if plan_command is not None and plan_command != args.command:
            raise ConfigError("preset %r belongs to the %s subcommand"
                              % (args.preset, plan_command))
        if args.command == "gen-data":
            cmd_gen_data(cfg, out=args.out)
        elif args.command == "train":
            cmd_train(cfg, out=args.out)
        elif args.command == "predict-eval":
            cmd_predict_eval(cfg, out=args.out, plan=plan)
        elif args.command == "outage":
            cmd_outage(cfg, out=args.out, runs=plan)
        elif args.command == "capacity":
            cmd_capacity(cfg, out=args.out, runs=plan)
        elif args.command == "flops":
            cmd_flops(cfg, out=args.out)
        else:
            cmd_protocol_sim(cfg, out=args.out)
    except (ConfigError, ValueError, OSError) as err:
        print("error: %s" % err, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
