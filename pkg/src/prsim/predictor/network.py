"""Layer stack with windowed forward and truncated-BPTT backward.

The canonical predictor is a dense tanh input layer feeding L recurrent
layers and a dense tanh readout:

    d1 = tanh(Wi d0 + bi)
    dl = cell_l(d(l-1))            l = 2 .. L+1
    y  = tanh(Wo dL + bo)

Training processes the sample stream in fixed-length batches: state is
zeroed at the start of each batch, the batch is run forward with all
step caches kept, and the backward sweep accumulates exact gradients of
the batch-mean square error.  Truncation therefore coincides with the
batch boundary.

Per-step complexity follows the usual bookkeeping for this family of
models: each weight-matrix product of an m x k matrix costs 2 m k
(multiplies plus accumulates, bias fold-in included), activations are
neglected, and the first recurrent layer is charged at the raw input
width N_i even though it receives the input layer's projection.  With
hidden widths n1..nL, input N_i and output N_o that is

    flops = 2 [ N_i n1 + nL N_o + c * sum_l (n_{l-1} n_l + n_l^2) ]

with n_0 = N_i and c = 1 (vanilla RNN), 3 (GRU) or 4 (LSTM).  The
worked default, LSTM with N_i = 40, hidden (25, 25), N_o = 8, gives
25400 flops per prediction, i.e. 25.4 Mflop/s at 1 kHz.  Setting all
dims to a common width n and dropping nothing else recovers the
simplified per-step estimates 4(1+L)n^2, 4(1+3L)n^2 and 4(1+4L)n^2.
"""

import numpy as np

from ..rng import stream
from . import layers as L

_CELL_COST = {"rnn": 1, "gru": 3, "lstm": 4}


class RecurrentNet:
    """Stack of recurrent/dense layers with a tanh readout."""

    def __init__(self, input_dim, specs, output_dim, seed=0):
        if input_dim < 1 or output_dim < 1:
            raise ValueError("input_dim and output_dim must be positive")
        specs = tuple(specs)
        if not specs:
            raise ValueError("need at least one layer")
        self.input_dim = int(input_dim)
        self.output_dim = int(output_dim)
        self.specs = specs
        self.seed = int(seed)
        self.params = []
        in_dim = self.input_dim
        for idx, spec in enumerate(specs):
            rng = stream(self.seed, 29, idx)
            self.params.append(L.init_layer(spec, in_dim, rng))
            in_dim = spec.size
        rng = stream(self.seed, 29, len(specs))
        bw = 1.0 / np.sqrt(in_dim)
        self.out = {"W": rng.uniform(-bw, bw, size=(self.output_dim, in_dim)),
                    "b": np.zeros(self.output_dim)}

    # ------------------------------------------------------------ state

    def initial_state(self):
        return [L.initial_state(s) for s in self.specs]

    # ---------------------------------------------------------- forward

    def step(self, x, state, keep_cache=False):
        """One time step; returns (y, new_state, cache or None)."""
        x = np.asarray(x, dtype=float)
        new_state = []
        caches = [] if keep_cache else None
        for spec, p, st in zip(self.specs, self.params, state):
            if spec.kind == "dense_tanh":
                x, cache = L.dense_step(p, x)
                new_state.append(None)
            elif spec.kind == "rnn":
                x, cache = L.rnn_step(p, x, st)
                new_state.append(x)
            elif spec.kind == "lstm":
                x, st_new, cache = L.lstm_step(p, x, st)
                new_state.append(st_new)
            else:
                x, st_new, cache = L.gru_step(p, x, st)
                new_state.append(st_new)
            if keep_cache:
                caches.append(cache)
        y = np.tanh(self.out["W"] @ x + self.out["b"])
        if keep_cache:
            caches.append((x, y))
        return y, new_state, caches

    def forward_window(self, xs, state=None, keep_cache=False):
        """Run a (T, input_dim) window; returns (ys, state, cache list)."""
        xs = np.asarray(xs, dtype=float)
        if state is None:
            state = self.initial_state()
        ys = np.empty((xs.shape[0], self.output_dim))
        caches = [] if keep_cache else None
        for t in range(xs.shape[0]):
            y, state, cache = self.step(xs[t], state, keep_cache)
            ys[t] = y
            if keep_cache:
                caches.append(cache)
        return ys, state, caches

    # --------------------------------------------------------- backward

    def zero_grads(self):
        grads = [L.zero_grads(p) for p in self.params]
        grads.append({k: np.zeros_like(v) for k, v in self.out.items()})
        return grads

    def backward_bptt(self, caches, dys):
        """Reverse sweep over a window given d(loss)/d(y_t) rows."""
        grads = self.zero_grads()
        gout = grads[-1]
        # per-layer state gradients carried across time
        dstate = []
        for spec in self.specs:
            n = spec.size
            if spec.kind == "lstm":
                dstate.append((np.zeros(n), np.zeros(n)))
            elif spec.kind == "dense_tanh":
                dstate.append(None)
            else:
                dstate.append(np.zeros(n))
        for t in range(len(caches) - 1, -1, -1):
            cache_t = caches[t]
            top, y = cache_t[-1]
            dz = dys[t] * (1.0 - y * y)
            gout["W"] += np.outer(dz, top)
            gout["b"] += dz
            dx = self.out["W"].T @ dz
            for li in range(len(self.specs) - 1, -1, -1):
                spec, p, g = self.specs[li], self.params[li], grads[li]
                if spec.kind == "dense_tanh":
                    dx = L.dense_back(p, g, cache_t[li], dx)
                elif spec.kind == "rnn":
                    dx, dh = L.rnn_back(p, g, cache_t[li], dx + dstate[li])
                    dstate[li] = dh
                elif spec.kind == "lstm":
                    dh_in, dc_in = dstate[li]
                    dx, dh, dc = L.lstm_back(p, g, cache_t[li], dx + dh_in, dc_in)
                    dstate[li] = (dh, dc)
                else:
                    dx, ds = L.gru_back(p, g, cache_t[li], dx + dstate[li])
                    dstate[li] = ds
        return grads

    def loss_window(self, xs, targets, state=None):
        """Window-mean square error and its exact gradients.

        Returns (loss, grads, end state).  The loss averages over both
        time steps and output components.
        """
        targets = np.asarray(targets, dtype=float)
        ys, state, caches = self.forward_window(xs, state, keep_cache=True)
        err = ys - targets
        loss = float(np.mean(err * err))
        dys = (2.0 / err.size) * err
        return loss, self.backward_bptt(caches, dys), state

    # ------------------------------------------------------- parameters

    def parameter_items(self):
        """Stable (name, array) iteration used by optimizers and I/O."""
        for li, p in enumerate(self.params):
            for key in sorted(p):
                yield f"layer{li}/{key}", p[key]
        for key in sorted(self.out):
            yield f"out/{key}", self.out[key]

    def grad_items(self, grads):
        for li in range(len(self.params)):
            for key in sorted(grads[li]):
                yield f"layer{li}/{key}", grads[li][key]
        for key in sorted(grads[-1]):
            yield f"out/{key}", grads[-1][key]

    # ------------------------------------------------------------ flops

    def flops_per_step(self):
        """Per-step flops of a canonical input-dense + recurrent stack."""
        specs = self.specs
        if specs[0].kind == "dense_tanh":
            specs = specs[1:]
            if not specs or specs[0].size != self.specs[0].size:
                raise ValueError("input layer width must match the first hidden layer")
        if not specs or any(s.kind == "dense_tanh" for s in specs):
            raise ValueError("complexity model covers input-dense + recurrent stacks")
        return flops_per_step(self.input_dim, [s.size for s in specs],
                              self.output_dim, [s.kind for s in specs])

    def flops_rate(self, sample_rate_hz):
        """Sustained flop/s when stepped at the given sample rate."""
        return self.flops_per_step() * float(sample_rate_hz)


def flops_per_step(input_dim, hidden_widths, output_dim, kind="lstm"):
    """Per-step flop count of the standard complexity model.

    `kind` is a single cell name or one per hidden layer (hybrid
    stacks).  The first recurrent layer is charged at the raw input
    width, per the model's n_0 = N_i convention.
    """
    widths = [int(input_dim)] + [int(w) for w in hidden_widths]
    if len(widths) < 2:
        raise ValueError("need at least one hidden layer")
    kinds = [kind] * (len(widths) - 1) if isinstance(kind, str) else list(kind)
    if len(kinds) != len(widths) - 1:
        raise ValueError("one kind per hidden layer")
    total = widths[0] * widths[1] + widths[-1] * int(output_dim)
    for prev, cur, k in zip(widths[:-1], widths[1:], kinds):
        cost = _CELL_COST.get(k)
        if cost is None:
            raise ValueError(f"no per-step count for kind {k!r}")
        total += cost * (prev * cur + cur * cur)
    return 2 * total


def flops_simplified(kind, num_layers, width):
    """Common-width estimate 4(1+cL)n^2 with c = 1, 3, 4 per cell kind."""
    c = _CELL_COST.get(kind)
    if c is None:
        raise ValueError(f"no simplified count for kind {kind!r}")
    return 4 * (1 + c * num_layers) * width ** 2
