"""Adam optimizer on the network's named parameter arrays.

Standard first/second moment estimates with bias correction:

    m <- b1 m + (1 - b1) g        v <- b2 v + (1 - b2) g^2
    step = lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)

Under a constant gradient the corrected ratio m_hat / sqrt(v_hat)
equals sign(g) from the first step, so each update moves every
coordinate by lr; the tests pin that behaviour.  Defaults follow the
usual lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8.
"""

import numpy as np


class AdamState:
    """Moment buffers keyed by parameter name plus the step counter."""

    def __init__(self):
        self.t = 0
        self.m = {}
        self.v = {}

    def buffers(self, name, shape):
        if name not in self.m:
            self.m[name] = np.zeros(shape)
            self.v[name] = np.zeros(shape)
        return self.m[name], self.v[name]


def adam_step(net, grads, state, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
    """Apply one Adam update in place from a backward_bptt grad list."""
    state.t += 1
    bc1 = 1.0 - beta1 ** state.t
    bc2 = 1.0 - beta2 ** state.t
    params = dict(net.parameter_items())
    for name, g in net.grad_items(grads):
        p = params[name]
        m, v = state.buffers(name, p.shape)
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
