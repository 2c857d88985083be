"""Clocked interface module (IM): reset, write and read of one domain-wall device.

Per clock period the wall is reset to the strip centre (Clk1), driven by the
mirrored column-current difference ``s_in * (I+ - I-)`` for ``t_write`` (Clk2),
and read (Clk3). The read current minus the bias ``i_0`` (the centre current)
is scaled by the output mirror ``g_out`` into the activation circuit.
"""
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .errors import ArgumentError, ScheduleError
from .spintronic import DWParams, DWState, drive, read_dw_current, reset

DEFAULT_K = 4.0


@dataclass(frozen=True)
class ClockSchedule:
    t_reset: float = 2e-9
    t_write: float = 2e-9
    t_read: float = 1e-9

    @property
    def period(self):
        return self.t_reset + self.t_write + self.t_read

    def phases(self):
        """``[(name, start, end), ...]`` for Clk1..Clk3, back to back."""
        t1 = self.t_reset
        t2 = t1 + self.t_write
        return [("reset", 0.0, t1), ("write", t1, t2), ("read", t2, t2 + self.t_read)]


def validate_schedule(schedule):
    """Return the period of a valid schedule, else raise :class:`ScheduleError`.

    Three identical phase durations are allowed but produce a ``UserWarning``.
    """
    durations = (schedule.t_reset, schedule.t_write, schedule.t_read)
    for name, t in zip(("t_reset", "t_write", "t_read"), durations):
        if not (t > 0 and math.isfinite(t)):
            raise ScheduleError(f"{name} must be a positive duration, got {t}")
    if len(set(durations)) == 1:
        warnings.warn("all three clock phases have the same duty cycle", UserWarning, stacklevel=2)
    return schedule.period


@dataclass(frozen=True)
class IMParams:
    s_in: float = 1.0
    g_out: float = 1.0
    schedule: ClockSchedule = field(default_factory=ClockSchedule)
    dw: DWParams = field(default_factory=DWParams)

    def __post_init__(self):
        if self.s_in <= 0 or self.g_out <= 0:
            raise ArgumentError("mirror ratios s_in and g_out must be positive")
        validate_schedule_quiet(self.schedule)

    @property
    def i_0(self):
        """Bias current: read current with the wall at the centre, (I_H + I_L)/2."""
        return self.dw.i_center


def validate_schedule_quiet(schedule):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return validate_schedule(schedule)


def _args(im):
    d = im.dw
    return (im.s_in, im.g_out, im.i_0, d.mobility, im.schedule.t_write,
            d.length, d.v_bias, d.r_low, d.r_high)


def evaluate(i_plus, i_minus, im=None):
    """Output current for one clock period given the two column currents."""
    im = im or IMParams()
    if i_plus < 0 or i_minus < 0:
        raise ArgumentError(f"column currents must be non-negative, got {i_plus}, {i_minus}")
    return float(kernels.im_evaluate(np.array([i_plus], float), np.array([i_minus], float), *_args(im))[0])


def evaluate_many(i_plus, i_minus, im):
    """Vectorised :func:`evaluate` over arrays of any matching shape."""
    i_plus = np.asarray(i_plus, dtype=np.float64)
    i_minus = np.asarray(i_minus, dtype=np.float64)
    if i_plus.shape != i_minus.shape:
        raise ArgumentError(f"shape mismatch {i_plus.shape} vs {i_minus.shape}")
    if (i_plus < 0).any() or (i_minus < 0).any():
        raise ArgumentError("column currents must be non-negative")
    out = kernels.im_evaluate(i_plus.ravel(), i_minus.ravel(), *_args(im))
    return out.reshape(i_plus.shape)


def saturation_current(im=None):
    """Smallest |I+ - I-| that drives the wall from the centre to an edge."""
    im = im or IMParams()
    return (0.5 * im.dw.length) / (im.dw.mobility * im.schedule.t_write) / im.s_in


def linear_gain(im):
    """d(output)/d(I+ - I-) below saturation."""
    d = im.dw
    return im.g_out * im.s_in * d.mobility * im.schedule.t_write * d.v_bias * (1 / d.r_low - 1 / d.r_high) / d.length


def saturated_output(im):
    """Output magnitude once the wall is clamped at an edge."""
    return im.g_out * (im.dw.i_low - im.i_0)


def calibrate(max_delta_current, activation_halfscale, im=None, k=DEFAULT_K):
    """Choose mirror ratios for a neuron.

    ``s_in`` places saturation exactly at ``max_delta_current``; ``g_out``
    makes the saturated output equal ``k * activation_halfscale``.
    """
    im = im or IMParams()
    if not max_delta_current > 0 or not activation_halfscale > 0 or not k > 0:
        raise ArgumentError("max_delta_current, activation_halfscale and k must be positive")
    d = im.dw
    s_in = (0.5 * d.length) / (d.mobility * im.schedule.t_write * max_delta_current)
    g_out = k * activation_halfscale / (d.i_low - im.i_0)
    return replace(im, s_in=s_in, g_out=g_out)


def trace(i_plus, i_minus, im=None, steps_per_phase=20):
    """Simulate one clock period step by step.

    Returns a list of dict rows (time, phase, clk1..clk3, position, read current,
    output current). The output is only driven during the read phase.
    """
    im = im or IMParams()
    if i_plus < 0 or i_minus < 0:
        raise ArgumentError("column currents must be non-negative")
    if steps_per_phase < 1:
        raise ArgumentError("steps_per_phase must be >= 1")
    validate_schedule_quiet(im.schedule)
    d = im.dw
    drive_current = im.s_in * (i_plus - i_minus)
    state = DWState(0.0)
    rows = []
    for idx, (name, start, end) in enumerate(im.schedule.phases()):
        h = (end - start) / steps_per_phase
        for s in range(steps_per_phase + 1):
            if s == 0 and idx > 0:
                continue
            t = start + s * h
            if name == "reset":
                # reset completes within Clk1; the wall starts at its previous position
                state = reset(state, d) if s > 0 else state
            elif name == "write" and s > 0:
                state = drive(state, drive_current, h, d)
            i_read = read_dw_current(state, d)
            out = im.g_out * (i_read - im.i_0) if name == "read" else 0.0
            rows.append({
                "time": t, "phase": name,
                "clk1": int(name == "reset"), "clk2": int(name == "write"), "clk3": int(name == "read"),
                "position": state.x, "read_current": i_read, "output_current": out,
            })
    return rows
