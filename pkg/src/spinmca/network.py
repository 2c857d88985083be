"""Feedforward network built from crossbar layers and interface modules.

Two forward paths are provided. :func:`forward_device` runs every stage the
hardware runs: column currents, one IM clock period per neuron, activation.
:func:`forward_behavioral` collapses each IM into its linear gain plus the
saturation clamp, which is exactly what the device path computes whenever the
layer was programmed ideally; it is the path used for dataset-scale runs.

Bias terms are realised as one extra crossbar row whose input is held at 1.
"""
from dataclasses import dataclass, field

import numpy as np

from .crossbar import DEFAULT_V_READ, column_currents, program_layer, quantize_array
from .errors import ArgumentError, RangeError
from .interface import DEFAULT_K, IMParams, calibrate, evaluate_many, linear_gain, saturation_current
from .memristor import MemristorParams

DEFAULT_I_HALF = 1e-6

PRESET_TOPOLOGIES = {
    "mnist": (784, 500, 300, 128, 10),
    "asl": (400_000, 1000, 500, 128, 24),
    "cifar10": (1024, 500, 256, 64, 10),
}


@dataclass(frozen=True)
class Topology:
    sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if len(sizes) < 2:
            raise ArgumentError("a topology needs an input layer and at least one neuron layer")
        if any(s <= 0 for s in sizes):
            raise ArgumentError(f"layer widths must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def parse(cls, text):
        try:
            return cls(tuple(int(s) for s in text.split(",")))
        except ValueError:
            raise ArgumentError(f"bad topology {text!r}; expected comma-separated widths") from None

    @property
    def layer_shapes(self):
        return list(zip(self.sizes[:-1], self.sizes[1:]))

    @property
    def neurons(self):
        return sum(self.sizes[1:])

    def __str__(self):
        return ",".join(map(str, self.sizes))


@dataclass(frozen=True)
class Sigmoid:
    i_half: float = DEFAULT_I_HALF

    def __post_init__(self):
        if not self.i_half > 0:
            raise ArgumentError("sigmoid i_half must be positive")

    def __call__(self, i):
        return sigmoid(i, self.i_half)


@dataclass(frozen=True)
class Step:
    def __call__(self, i):
        return step(i)


def sigmoid(i, i_half):
    if not i_half > 0:
        raise ArgumentError("i_half must be positive")
    z = np.asarray(i, dtype=np.float64) / i_half
    with np.errstate(over="ignore"):
        y = 1.0 / (1.0 + np.exp(-z))
    return y if y.ndim else float(y)


def step(i):
    y = (np.asarray(i) > 0).astype(np.float64)
    return y if y.ndim else float(y)


@dataclass(frozen=True, eq=False)
class Network:
    topology: Topology
    layers: tuple
    ims: tuple
    activation: object = field(default_factory=Sigmoid)
    bias: bool = True

    def __post_init__(self):
        if len(self.layers) != len(self.topology.sizes) - 1 or len(self.ims) != len(self.layers):
            raise ArgumentError("layer count does not match topology")
        extra = 1 if self.bias else 0
        for (n, m), layer in zip(self.topology.layer_shapes, self.layers):
            if (layer.n, layer.m) != (n + extra, m):
                raise ArgumentError(f"layer shape {(layer.n, layer.m)} does not chain with {(n + extra, m)}")


def _with_bias(x, bias):
    if not bias:
        return x
    ones = np.ones(x.shape[:-1] + (1,))
    return np.concatenate([x, ones], axis=-1)


def _check_input(net, x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != net.topology.sizes[0]:
        raise ArgumentError(f"expected {net.topology.sizes[0]} inputs, got shape {x.shape}")
    return x


def forward_device(net, x):
    """Full device path: crossbar currents, per-neuron IM cycle, activation."""
    y = _check_input(net, x)
    for layer, im in zip(net.layers, net.ims):
        i_plus, i_minus = column_currents(layer, _with_bias(y, net.bias))
        y = net.activation(evaluate_many(i_plus, i_minus, im))
    return y


def forward_behavioral(net, x, clamp=True):
    """Linear-gain path: ``f(gain * clamp(v_read * x @ (G+ - G-)))`` per layer."""
    y = _check_input(net, x)
    if (y < 0).any() or (y > 1).any():
        raise RangeError("inputs must lie in [0, 1]")
    for layer, im in zip(net.layers, net.ims):
        d_i = layer.v_read * (_with_bias(y, net.bias) @ layer.delta_g)
        if clamp:
            sat = saturation_current(im)
            d_i = np.clip(d_i, -sat, sat)
        y = net.activation(linear_gain(im) * d_i)
    return y


def predict(net, images, fidelity="behavioral", batch_size=1000):
    forward = {"behavioral": forward_behavioral, "device": forward_device}.get(fidelity)
    if forward is None:
        raise ArgumentError(f"unknown fidelity {fidelity!r}")
    images = np.asarray(images)
    preds = []
    for start in range(0, len(images), batch_size):
        out = np.atleast_2d(forward(net, images[start:start + batch_size]))
        if out.shape[1] == 1:
            preds.append((out[:, 0] > 0.5).astype(np.int64))
        else:
            preds.append(np.argmax(out, axis=1))
    return np.concatenate(preds) if preds else np.zeros(0, dtype=np.int64)


def evaluate_accuracy(net, dataset, fidelity="behavioral", batch_size=1000):
    """Fraction of samples whose argmax output equals the label."""
    images, labels = dataset.images, dataset.labels
    if len(labels) == 0:
        raise ArgumentError("cannot evaluate on an empty dataset")
    width = net.topology.sizes[-1]
    if labels.min() < 0 or labels.max() >= max(width, 2):
        raise ArgumentError("labels outside the output range")
    return float(np.mean(predict(net, images, fidelity, batch_size) == labels))


def build_network(levels, w_max, activation=None, fidelity="ideal", bias=True,
                  full_scale="layer_max", k=DEFAULT_K, params=None, ctrl=None,
                  im=None, v_read=DEFAULT_V_READ):
    """Program every layer and calibrate its interface modules.

    ``levels`` is a list of signed level grids (inputs[+bias] x neurons) and
    ``w_max`` the matching per-layer weight scales.

    ``full_scale`` sets the column-current difference at which each IM
    saturates:

    * ``"layer_max"``: the largest difference any input in [0,1] can produce
      on that layer, so no IM ever clamps.
    * ``"preactivation"``: hidden layers saturate where the trained
      pre-activation reaches ``k``, so the activation sees the trained
      pre-activation unchanged; the output layer keeps ``"layer_max"`` so
      that argmax never meets clamped ties.
    """
    params = params or MemristorParams()
    activation = activation if activation is not None else Sigmoid()
    base_im = im or IMParams()
    i_half = activation.i_half if isinstance(activation, Sigmoid) else DEFAULT_I_HALF
    if full_scale not in ("layer_max", "preactivation"):
        raise ArgumentError(f"unknown full_scale {full_scale!r}")
    if len(levels) != len(w_max):
        raise ArgumentError("levels and w_max lengths differ")
    extra = 1 if bias else 0
    sizes = [np.shape(levels[0])[0] - extra] + [np.shape(lv)[1] for lv in levels]
    topo = Topology(tuple(sizes))
    layers, ims = [], []
    for idx, (lv, wm) in enumerate(zip(levels, w_max)):
        layer = program_layer(None, fidelity=fidelity, w_max=wm, params=params, ctrl=ctrl,
                              v_read=v_read, levels=lv)
        last = idx == len(levels) - 1
        if full_scale == "preactivation" and not last:
            fs = k * v_read * (params.g_on - params.g_off) / wm
        else:
            fs = layer.max_delta_current()
        if fs <= 0:
            # an all-zero layer never drives its IM; any positive scale will do
            fs = v_read * (params.g_on - params.g_off)
        layers.append(layer)
        ims.append(calibrate(fs, i_half, base_im, k))
    return Network(topo, tuple(layers), tuple(ims), activation, bias)


def from_weight_file(wf, **kwargs):
    """Build a network from a quantized :class:`~spinmca.data.WeightFile`."""
    if any(layer.levels is None for layer in wf.layers):
        raise ArgumentError("weight file is not quantized; run quantize first")
    kwargs.setdefault("bias", wf.bias)
    return build_network([layer.levels for layer in wf.layers],
                         [layer.w_max for layer in wf.layers], **kwargs)


def build_from_floats(weights, **kwargs):
    """Quantize float layer weights (per-layer max-|w| scale) and build a network."""
    levels, scales = [], []
    for w in weights:
        w = np.asarray(w, dtype=np.float64)
        wm = float(np.abs(w).max()) or 1.0
        levels.append(quantize_array(w, wm))
        scales.append(wm)
    return build_network(levels, scales, **kwargs)
