"""Dual-column memristive crossbar layer.

A layer with ``n`` inputs and ``m`` neurons is an ``n x 2m`` array: neuron ``j``
owns columns C+_j and C-_j. A signed weight is quantized to a magnitude level
0..31; its sign selects which of the two cells is programmed, the other cell
stays in the off-state. Rows are driven at ``x_i * v_read`` and columns are
held at virtual ground, so each column current is a conductance-weighted sum.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ArgumentError, ProgrammingError, RangeError
from .memristor import N_LEVELS, MemristorParams, WriteController, program_many, target_conductance

DEFAULT_V_READ = 0.5


class WeightLevel(NamedTuple):
    sign: int       # +1 or -1
    magnitude: int  # 0..31

    @property
    def signed(self):
        return self.sign * self.magnitude


def quantize_weight(w, w_max):
    """Quantize one weight to a sign and a magnitude in 0..31 (round half away from zero)."""
    if not w_max > 0:
        raise ArgumentError(f"w_max must be positive, got {w_max}")
    if abs(w) > w_max:
        raise RangeError(f"|{w}| exceeds w_max = {w_max}")
    mag = int(np.floor(N_LEVELS * abs(w) / w_max + 0.5))
    return WeightLevel(-1 if w < 0 else 1, mag)


def quantize_array(weights, w_max):
    """Vectorised quantizer returning signed integer levels in -31..31."""
    weights = np.asarray(weights, dtype=np.float64)
    if not w_max > 0:
        raise ArgumentError(f"w_max must be positive, got {w_max}")
    if (np.abs(weights) > w_max).any():
        raise RangeError(f"weights exceed w_max = {w_max}")
    mag = np.floor(N_LEVELS * np.abs(weights) / w_max + 0.5).astype(np.int8)
    return np.where(weights < 0, -mag, mag).astype(np.int8)


def dequantize(levels, w_max):
    return np.asarray(levels, dtype=np.float64) / N_LEVELS * w_max


def level_conductance(level, params=None):
    params = params or MemristorParams()
    return target_conductance(level.magnitude, params)


def encode_cell(level, params=None):
    """``(g_plus, g_minus)`` for one weight; the unused side stays at G_off."""
    params = params or MemristorParams()
    g = level_conductance(level, params)
    if level.sign > 0:
        return g, params.g_off
    return params.g_off, g


def encode_levels(levels, params):
    """Vectorised :func:`encode_cell` over a signed-level grid."""
    levels = np.asarray(levels)
    g = params.g_off + (np.abs(levels) / N_LEVELS) * (params.g_on - params.g_off)
    g_plus = np.where(levels > 0, g, params.g_off)
    g_minus = np.where(levels < 0, g, params.g_off)
    return g_plus, g_minus


def nearest_levels(g, params):
    m = np.rint((np.asarray(g) - params.g_off) / (params.g_on - params.g_off) * N_LEVELS)
    return np.clip(m, 0, N_LEVELS).astype(np.int8)


@dataclass(frozen=True, eq=False)
class DualColumnLayer:
    levels: np.ndarray    # (n, m) signed levels
    g_plus: np.ndarray    # (n, m) siemens
    g_minus: np.ndarray
    w_max: float
    v_read: float = DEFAULT_V_READ
    params: MemristorParams = MemristorParams()

    @property
    def n(self):
        return self.levels.shape[0]

    @property
    def m(self):
        return self.levels.shape[1]

    @property
    def physical_shape(self):
        """Rows x columns of the physical array."""
        return self.n, 2 * self.m

    @property
    def delta_g(self):
        return self.g_plus - self.g_minus

    def max_delta_current(self):
        """Largest |I+ - I-| any input vector in [0,1]^n can produce on any column."""
        dg = self.delta_g
        pos = np.clip(dg, 0, None).sum(axis=0)
        neg = np.clip(-dg, 0, None).sum(axis=0)
        return float(self.v_read * np.maximum(pos, neg).max())


def column_currents(layer, x):
    """Column currents ``(i_plus, i_minus)`` for input vector(s) ``x`` in [0,1].

    ``x`` may be a length-``n`` vector or an ``(batch, n)`` matrix.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != layer.n or x.ndim > 2:
        raise ArgumentError(f"expected {layer.n} inputs, got shape {x.shape}")
    if (x < 0).any() or (x > 1).any() or np.isnan(x).any():
        raise RangeError("inputs must lie in [0, 1]")
    v = x * layer.v_read
    return v @ layer.g_plus, v @ layer.g_minus


def program_layer(weights, fidelity="ideal", w_max=None, params=None, ctrl=None,
                  v_read=DEFAULT_V_READ, levels=None):
    """Program a layer from float weights (or ready-made signed ``levels``).

    ``fidelity="ideal"`` writes exact level conductances; ``"device"`` runs
    program-and-verify on every cell starting from the off-state and stores
    the conductances actually reached.
    """
    params = params or MemristorParams()
    if levels is None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.ndim != 2:
            raise ArgumentError("weights must be a 2-D (inputs x neurons) array")
        if w_max is None:
            w_max = float(np.abs(weights).max()) or 1.0
        levels = quantize_array(weights, w_max)
    else:
        levels = np.asarray(levels, dtype=np.int8)
        if w_max is None:
            raise ArgumentError("w_max is required with pre-quantized levels")
    if (np.abs(levels.astype(int)) > N_LEVELS).any():
        raise RangeError("levels must lie in -31..31")
    if fidelity == "ideal":
        g_plus, g_minus = encode_levels(levels, params)
    elif fidelity == "device":
        g_plus, g_minus = _program_device(levels, params, ctrl or WriteController())
    else:
        raise ArgumentError(f"unknown fidelity {fidelity!r}")
    return DualColumnLayer(levels, g_plus, g_minus, float(w_max), v_read, params)


def _program_device(levels, params, ctrl):
    ctrl.check(params)
    targets_plus, targets_minus = encode_levels(levels, params)
    targets = np.concatenate([targets_plus.ravel(), targets_minus.ravel()])
    start = np.full(targets.shape, params.w_off)
    w, pulses, ok = program_many(start, targets, ctrl, params)
    if not ok.all():
        bad = int((~ok).sum())
        raise ProgrammingError(f"{bad} cells failed to converge within {ctrl.max_pulses} pulses")
    r = params.r_on + (w - params.w_on) / (params.w_off - params.w_on) * (params.r_off - params.r_on)
    g = 1.0 / r
    half = levels.size
    return g[:half].reshape(levels.shape), g[half:].reshape(levels.shape)
