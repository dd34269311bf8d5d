"""Experiment configuration for the command-line runner.

Experiments are described by small text files in a line-based format:

    [section]
    key = value

Full-line comments start with '#' or ';'.  Sections group related
knobs: network geometry, the fading process, where the selection
metric comes from (the csi section), schemes to run, the SNR grid,
predictor training, complexity accounting, and frame-level protocol
settings.  Every key has a default taken from the baseline setup used
throughout (f_s = 1000 Hz, f_d = 100 Hz, K = 8 relays, tapped-delay
length 4, two recurrent layers of 25 units each), so an empty file is
already a valid experiment.  Unknown sections and unknown or repeated
keys are hard errors, which guards against silent typos in sweeps.

Parsing yields an immutable ExperimentConfig.  Its config_hash() is a
digest of the canonical serialization minus the output path, so every
result row can be traced back to the exact generating setup: equal
hash and equal seed imply byte-identical rows.
"""

import hashlib
from dataclasses import dataclass, field, fields


class ConfigError(ValueError):
    """Malformed experiment configuration."""


# ---------------------------------------------------------------------------
# section dataclasses


@dataclass(frozen=True)
class NetworkSettings:
    """Relay count, target rate and power bookkeeping.

    The SNR grid is expressed as total end-to-end SNR P/sigma_n^2 in
    dB; total_power and noise_var only set the absolute scale and the
    source_power_fraction splits P between the two hops (0.5 means the
    source and the chosen relay each spend half).
    """

    relays: int = 8
    rate: float = 1.0
    total_power: float = 1.0
    noise_var: float = 1.0
    source_power_fraction: float = 0.5

    def __post_init__(self):
        if self.relays < 1:
            raise ConfigError("need at least one relay")
        if self.rate <= 0:
            raise ConfigError("target rate must be positive")
        if self.total_power <= 0 or self.noise_var <= 0:
            raise ConfigError("power and noise variance must be positive")
        if not 0 < self.source_power_fraction < 1:
            raise ConfigError("source power fraction must be in (0, 1)")


@dataclass(frozen=True)
class FadingSettings:
    """Doppler, sampling and distribution of the link processes."""

    doppler_hz: float = 100.0
    sample_rate_hz: float = 1000.0
    distribution: str = "rayleigh"
    k_factor: float = 0.0
    mean_power: float = 1.0
    num_sinusoids: int = 64

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ConfigError("sample rate must be positive")
        if not 0 <= self.doppler_hz < self.sample_rate_hz / 2.0:
            raise ConfigError("need 0 <= doppler < sample_rate/2")
        if self.distribution not in ("rayleigh", "rician"):
            raise ConfigError("distribution must be rayleigh or rician")
        if self.k_factor < 0:
            raise ConfigError("rician k factor must be >= 0")
        if self.mean_power <= 0:
            raise ConfigError("mean power must be positive")
        if self.num_sinusoids < 1:
            raise ConfigError("need at least one sinusoid")


@dataclass(frozen=True)
class DatasetSettings:
    """Stored channel-series file used by gen-data and train."""

    length: int = 1_000_000
    path: str = "dataset.csv"

    def __post_init__(self):
        if self.length < 1:
            raise ConfigError("dataset length must be >= 1")


@dataclass(frozen=True)
class CsiSettings:
    """Where the selection metric comes from.

    mode = perfect     selection sees the true coefficients
           outdated    selection sees coefficients `delay` samples old
           predicted   a recurrent net maps the stale tap line to a
                       `delay`-step-ahead estimate (model file optional;
                       trained on the fly when empty)
           synthetic   selection metric drawn jointly with the actual
                       at a prescribed correlation `rho`
    """

    mode: str = "outdated"
    delay: int = 3
    rho: float = 0.95
    model: str = ""

    def __post_init__(self):
        if self.mode not in ("perfect", "outdated", "predicted", "synthetic"):
            raise ConfigError("unknown csi mode %r" % self.mode)
        if self.mode in ("outdated", "predicted") and self.delay < 1:
            raise ConfigError("csi delay must be >= 1 sample")
        if not 0 <= self.rho <= 1:
            raise ConfigError("rho must be in [0, 1]")


@dataclass(frozen=True)
class PredictorSettings:
    """Architecture and training knobs for the channel predictor."""

    kind: str = "lstm"
    layers: int = 2
    neurons: int = 25
    tau: int = 4
    features: str = "complex"
    scale: float = 0.4
    train_len: int = 5000
    epochs: int = 10
    batch_size: int = 8
    lr: float = 3e-3

    def __post_init__(self):
        if self.kind not in ("rnn", "lstm", "gru"):
            raise ConfigError("predictor kind must be rnn, lstm or gru")
        if self.layers < 1 or self.neurons < 1:
            raise ConfigError("need >= 1 layer with >= 1 neuron")
        if self.tau < 0:
            raise ConfigError("tapped-delay length must be >= 0")
        if self.features not in ("magnitude", "complex"):
            raise ConfigError("features must be magnitude or complex")
        if self.scale <= 0:
            raise ConfigError("feature scale must be positive")
        if self.train_len < 16:
            raise ConfigError("training length must be >= 16 samples")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch size must be >= 1")
        if self.lr <= 0:
            raise ConfigError("learning rate must be positive")


@dataclass(frozen=True)
class FlopsSettings:
    """Input/output widths and step rate for the complexity table.

    Defaults describe the centralized predictor shape: K(tau+1) = 40
    real tap-line entries in, K = 8 coefficients out, one prediction
    per sample at f_p = 1000 steps per second.
    """

    n_input: int = 40
    n_output: int = 8
    f_p: float = 1000.0

    def __post_init__(self):
        if self.n_input < 1 or self.n_output < 1:
            raise ConfigError("flops widths must be >= 1")
        if self.f_p <= 0:
            raise ConfigError("prediction rate must be positive")


@dataclass(frozen=True)
class ProtocolSettings:
    """Frame-level simulation knobs (timers, impairments)."""

    frames: int = 100_000
    policy: str = "reselect"
    timer_c: float = 1.0
    timer_max: float = 1000.0
    uncertainty_window: float = 0.0
    pilot_snr_db: float = None
    max_phase_error_deg: float = None

    def __post_init__(self):
        if self.frames < 2:
            raise ConfigError("need at least 2 frames")
        if self.policy not in ("reselect", "terminate"):
            raise ConfigError("policy must be reselect or terminate")
        if self.timer_c <= 0 or self.timer_max <= 0:
            raise ConfigError("timer constants must be positive")
        if self.uncertainty_window < 0:
            raise ConfigError("uncertainty window must be >= 0")


_SCHEMES = ("df", "af", "ostc", "dt", "df-central")


@dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved experiment."""

    name: str = "default"
    seed: int = 0
    trials: int = 100_000
    output: str = "results.csv"
    schemes: tuple = ("df",)
    snr_grid_db: tuple = tuple(float(x) for x in range(0, 31, 2))
    network: NetworkSettings = field(default_factory=NetworkSettings)
    fading: FadingSettings = field(default_factory=FadingSettings)
    dataset: DatasetSettings = field(default_factory=DatasetSettings)
    csi: CsiSettings = field(default_factory=CsiSettings)
    predictor: PredictorSettings = field(default_factory=PredictorSettings)
    flops: FlopsSettings = field(default_factory=FlopsSettings)
    protocol: ProtocolSettings = field(default_factory=ProtocolSettings)

    def __post_init__(self):
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.schemes:
            raise ConfigError("scheme list is empty")
        for s in self.schemes:
            if s not in _SCHEMES:
                raise ConfigError(
                    "unknown scheme %r (choose from %s)" % (s, ", ".join(_SCHEMES)))
        if not self.snr_grid_db:
            raise ConfigError("snr grid is empty")

    def config_hash(self):
        """Digest of the canonical text, minus the output path."""
        lines = [ln for ln in to_text(self).splitlines()
                 if not ln.startswith("output =")]
        return hashlib.md5("\n".join(lines).encode()).hexdigest()[:12]


# ---------------------------------------------------------------------------
# value converters


def _int(raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError("expected an integer, got %r" % raw)


def _float(raw):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError("expected a number, got %r" % raw)


def _opt_float(raw):
    return None if raw == "" else _float(raw)


def _word(raw):
    return raw.lower()


def _text(raw):
    return raw


def _grid(raw):
    """SNR grid: either 'start:stop:step' (inclusive) or a comma list."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ConfigError("grid range must be start:stop:step")
        start, stop, step = (_float(p) for p in parts)
        if step <= 0:
            raise ConfigError("grid step must be positive")
        if stop < start:
            raise ConfigError("grid stop must be >= start")
        out = []
        x = start
        while x <= stop + 1e-9:
            out.append(round(x, 12))
            x += step
        return tuple(out)
    vals = tuple(_float(p) for p in raw.split(",") if p.strip())
    if not vals:
        raise ConfigError("grid is empty")
    return vals


def _scheme_list(raw):
    return tuple(t.strip().lower() for t in raw.split(",") if t.strip())


# section -> key -> converter; table drives both parsing and the
# canonical serialization, so the two can never drift apart
_SCHEMA = {
    "experiment": {
        "name": _text, "seed": _int, "trials": _int, "output": _text,
    },
    "network": {
        "relays": _int, "rate": _float, "total_power": _float,
        "noise_var": _float, "source_power_fraction": _float,
    },
    "fading": {
        "doppler_hz": _float, "sample_rate_hz": _float,
        "distribution": _word, "k_factor": _float, "mean_power": _float,
        "num_sinusoids": _int,
    },
    "dataset": {
        "length": _int, "path": _text,
    },
    "csi": {
        "mode": _word, "delay": _int, "rho": _float, "model": _text,
    },
    "schemes": {
        "list": _scheme_list,
    },
    "grid": {
        "snr_db": _grid,
    },
    "predictor": {
        "kind": _word, "layers": _int, "neurons": _int, "tau": _int,
        "features": _word, "scale": _float, "train_len": _int,
        "epochs": _int, "batch_size": _int, "lr": _float,
    },
    "flops": {
        "n_input": _int, "n_output": _int, "f_p": _float,
    },
    "protocol": {
        "frames": _int, "policy": _word, "timer_c": _float,
        "timer_max": _float, "uncertainty_window": _float,
        "pilot_snr_db": _opt_float, "max_phase_error_deg": _opt_float,
    },
}

_SECTION_CLS = {
    "network": NetworkSettings,
    "fading": FadingSettings,
    "dataset": DatasetSettings,
    "csi": CsiSettings,
    "predictor": PredictorSettings,
    "flops": FlopsSettings,
    "protocol": ProtocolSettings,
}


def parse_config(text, overrides=None):
    """Parse experiment text into an ExperimentConfig.

    overrides, when given, is a {(section, key): raw_value} mapping
    applied after the file (used for command-line flag overrides).
    """
    raw = {sec: {} for sec in _SCHEMA}
    section = None
    for num, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(("#", ";")):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in _SCHEMA:
                raise ConfigError("line %d: unknown section [%s]" % (num, section))
            continue
        if "=" not in line:
            raise ConfigError("line %d: expected key = value" % num)
        if section is None:
            raise ConfigError("line %d: key outside any [section]" % num)
        key, _, value = line.partition("=")
        key = key.strip().lower()
        if key not in _SCHEMA[section]:
            raise ConfigError(
                "line %d: unknown key %r in [%s] (valid: %s)"
                % (num, key, section, ", ".join(sorted(_SCHEMA[section]))))
        if key in raw[section]:
            raise ConfigError("line %d: duplicate key %r in [%s]" % (num, key, section))
        raw[section][key] = (num, value.strip())

    if overrides:
        for (section, key), value in overrides.items():
            raw[section][key] = (0, str(value))

    def build(section):
        out = {}
        for key, (num, value) in raw[section].items():
            try:
                out[key] = _SCHEMA[section][key](value)
            except ConfigError as err:
                where = "line %d: " % num if num else ""
                raise ConfigError("%s[%s] %s: %s" % (where, section, key, err))
        return out

    top = build("experiment")
    schemes = build("schemes")
    if "list" in schemes:
        top["schemes"] = schemes["list"]
    grid = build("grid")
    if "snr_db" in grid:
        top["snr_grid_db"] = grid["snr_db"]
    for section, cls in _SECTION_CLS.items():
        vals = build(section)
        if vals:
            top[section] = cls(**vals)
    return ExperimentConfig(**top)


def load_config(path, overrides=None):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read(), overrides)


def _format_value(value):
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_text(cfg):
    """Canonical full serialization; parse_config(to_text(c)) == c."""
    lines = ["[experiment]"]
    for key in _SCHEMA["experiment"]:
        lines.append("%s = %s" % (key, _format_value(getattr(cfg, key))))
    lines.append("")
    lines.append("[schemes]")
    lines.append("list = %s" % ", ".join(cfg.schemes))
    lines.append("")
    lines.append("[grid]")
    lines.append("snr_db = %s" % _format_value(cfg.snr_grid_db))
    for section, cls in _SECTION_CLS.items():
        lines.append("")
        lines.append("[%s]" % section)
        sub = getattr(cfg, section)
        for f in fields(cls):
            lines.append("%s = %s" % (f.name, _format_value(getattr(sub, f.name))))
    return "\n".join(lines) + "\n"
