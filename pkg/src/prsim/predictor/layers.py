"""Recurrent and dense layer primitives with hand-written backward passes.

Every layer stores its weights in a dict of float64 arrays.  Gated layers
stack the gate blocks row-wise in a single input matrix W, a single
recurrent matrix U and a single bias b, so one matvec per matrix feeds
all gates:

vanilla RNN    h' = tanh(W x + U h + b)

LSTM (rows i, f, g, o in that order)
    [zi zf zg zo] = W x + U h + b
    i = sig(zi)   f = sig(zf)   g = tanh(zg)   o = sig(zo)
    c' = f c + i g
    h' = o tanh(c')

GRU (rows z, r, c in that order; the candidate block sees r * s)
    z = sig(Wz x + Uz s + bz)
    r = sig(Wr x + Ur s + br)
    c = tanh(Wc x + Uc (r s) + bc)
    s' = (1 - z) s + z c

dense_tanh     y = tanh(W x + b), stateless.

With all weights at zero the LSTM emits zeros (g = 0 pins c at 0) and
the GRU halves its state each step (z = 1/2, c = 0), which the tests
use as closed-form probes of the gate wiring.

Backward passes return the gradient w.r.t. the layer input and the
incoming state, and accumulate parameter gradients in place, so a
window backward is a single reverse sweep.  Everything is float64;
gradients are exact up to rounding, which the finite-difference checks
in the test suite enforce to 1e-4 relative.
"""

from dataclasses import dataclass

import numpy as np

_KINDS = ("dense_tanh", "rnn", "lstm", "gru")


@dataclass(frozen=True)
class LayerSpec:
    """One layer of the stack: kind and output width."""

    kind: str
    size: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown layer kind {self.kind!r}, expected one of {_KINDS}")
        if self.size < 1:
            raise ValueError("layer size must be positive")

    @property
    def gate_rows(self):
        """Stacked pre-activation rows per unit (1, 1, 4 or 3)."""
        return {"dense_tanh": 1, "rnn": 1, "lstm": 4, "gru": 3}[self.kind]


def sigmoid(x):
    # split by sign to avoid overflow in exp
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def init_layer(spec, in_dim, rng):
    """Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases."""
    rows = spec.gate_rows * spec.size
    bw = 1.0 / np.sqrt(in_dim)
    params = {"W": rng.uniform(-bw, bw, size=(rows, in_dim))}
    if spec.kind != "dense_tanh":
        bu = 1.0 / np.sqrt(spec.size)
        params["U"] = rng.uniform(-bu, bu, size=(rows, spec.size))
    params["b"] = np.zeros(rows)
    return params


def zero_grads(params):
    return {k: np.zeros_like(v) for k, v in params.items()}


def initial_state(spec):
    n = spec.size
    if spec.kind == "dense_tanh":
        return None
    if spec.kind == "lstm":
        return (np.zeros(n), np.zeros(n))
    return np.zeros(n)


# ---------------------------------------------------------------- forward

def dense_step(p, x):
    y = np.tanh(p["W"] @ x + p["b"])
    return y, (x, y)


def rnn_step(p, x, h):
    h_new = np.tanh(p["W"] @ x + p["U"] @ h + p["b"])
    return h_new, (x, h, h_new)


def lstm_step(p, x, state):
    h, c = state
    n = h.size
    z = p["W"] @ x + p["U"] @ h + p["b"]
    i = sigmoid(z[:n])
    f = sigmoid(z[n:2 * n])
    g = np.tanh(z[2 * n:3 * n])
    o = sigmoid(z[3 * n:])
    c_new = f * c + i * g
    hc = np.tanh(c_new)
    h_new = o * hc
    return h_new, (h_new, c_new), (x, h, c, i, f, g, o, hc)


def gru_step(p, x, s):
    n = s.size
    px = p["W"] @ x + p["b"]
    z = sigmoid(px[:n] + p["U"][:n] @ s)
    r = sigmoid(px[n:2 * n] + p["U"][n:2 * n] @ s)
    rs = r * s
    c = np.tanh(px[2 * n:] + p["U"][2 * n:] @ rs)
    s_new = (1.0 - z) * s + z * c
    return s_new, s_new, (x, s, z, r, rs, c)


# --------------------------------------------------------------- backward

def dense_back(p, g, cache, dy):
    x, y = cache
    dz = dy * (1.0 - y * y)
    g["W"] += np.outer(dz, x)
    g["b"] += dz
    return p["W"].T @ dz


def rnn_back(p, g, cache, dh):
    x, h_prev, h_new = cache
    dz = dh * (1.0 - h_new * h_new)
    g["W"] += np.outer(dz, x)
    g["U"] += np.outer(dz, h_prev)
    g["b"] += dz
    return p["W"].T @ dz, p["U"].T @ dz


def lstm_back(p, g, cache, dh, dc_in):
    x, h_prev, c_prev, i, f, gg, o, hc = cache
    do = dh * hc
    dc = dc_in + dh * o * (1.0 - hc * hc)
    di = dc * gg
    df = dc * c_prev
    dg = dc * i
    dc_prev = dc * f
    dz = np.concatenate([
        di * i * (1.0 - i),
        df * f * (1.0 - f),
        dg * (1.0 - gg * gg),
        do * o * (1.0 - o),
    ])
    g["W"] += np.outer(dz, x)
    g["U"] += np.outer(dz, h_prev)
    g["b"] += dz
    return p["W"].T @ dz, p["U"].T @ dz, dc_prev


def gru_back(p, g, cache, ds):
    x, s_prev, z, r, rs, c = cache
    n = s_prev.size
    dz = ds * (c - s_prev)
    dc = ds * z
    ds_prev = ds * (1.0 - z)
    da = dc * (1.0 - c * c)
    drs = p["U"][2 * n:].T @ da
    dr = drs * s_prev
    ds_prev = ds_prev + drs * r
    dpz = dz * z * (1.0 - z)
    dpr = dr * r * (1.0 - r)
    ds_prev = ds_prev + p["U"][:n].T @ dpz + p["U"][n:2 * n].T @ dpr
    dpre = np.concatenate([dpz, dpr, da])
    g["W"] += np.outer(dpre, x)
    g["U"][:n] += np.outer(dpz, s_prev)
    g["U"][n:2 * n] += np.outer(dpr, s_prev)
    g["U"][2 * n:] += np.outer(da, rs)
    g["b"] += dpre
    return p["W"].T @ dpre, ds_prev
