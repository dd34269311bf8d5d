"""Versioned npz serialization of trained networks.

The archive is self describing: a JSON header records the format tag,
version, layer specs and dimensions, and each parameter array is stored
under its stable name from RecurrentNet.parameter_items().  Loading
rebuilds the network from the header and overwrites the fresh
parameters with the stored arrays, so a round trip is bit exact.
"""

import json

import numpy as np

from .layers import LayerSpec
from .network import RecurrentNet

_FORMAT = "prsim-net"
_VERSION = 1


def save_model(net, path):
    header = {
        "format": _FORMAT,
        "version": _VERSION,
        "input_dim": net.input_dim,
        "output_dim": net.output_dim,
        "seed": net.seed,
        "layers": [{"kind": s.kind, "size": s.size} for s in net.specs],
    }
    arrays = {name.replace("/", "__"): arr for name, arr in net.parameter_items()}
    np.savez(path, __meta__=np.array(json.dumps(header)), **arrays)


def load_model(path):
    with np.load(path, allow_pickle=False) as data:
        if "__meta__" not in data:
            raise ValueError("not a model archive: missing header")
        header = json.loads(str(data["__meta__"]))
        if header.get("format") != _FORMAT:
            raise ValueError(f"unexpected archive format {header.get('format')!r}")
        if header.get("version") != _VERSION:
            raise ValueError(f"unsupported model version {header.get('version')!r}")
        specs = tuple(LayerSpec(d["kind"], int(d["size"])) for d in header["layers"])
        net = RecurrentNet(int(header["input_dim"]), specs,
                           int(header["output_dim"]), seed=int(header.get("seed", 0)))
        for name, arr in net.parameter_items():
            stored = data[name.replace("/", "__")]
            if stored.shape != arr.shape:
                raise ValueError(f"shape mismatch for {name}")
            arr[...] = stored
    return net
