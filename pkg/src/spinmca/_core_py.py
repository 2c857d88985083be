"""Pure-Python implementations of the hot kernels.

Mirrors ``_core.pyx`` operation for operation so both backends produce the same
floating-point results. Used when the compiled extension is unavailable or when
``SPINMCA_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def vteam_rate(v, k_on, k_off, v_on, v_off, a_on, a_off):
    if v > v_off:
        return k_off * (v / v_off - 1.0) ** a_off
    if v < v_on:
        return k_on * (v / v_on - 1.0) ** a_on
    return 0.0


def vteam_integrate(w, v, duration, max_step, w_on, w_off,
                    k_on, k_off, v_on, v_off, a_on, a_off):
    """Explicit Euler with hard clamping; step is ``duration / ceil(duration / max_step)``."""
    if duration <= 0.0:
        return w
    rate = vteam_rate(v, k_on, k_off, v_on, v_off, a_on, a_off)
    if rate == 0.0:
        return w
    n = int(math.ceil(duration / max_step))
    h = duration / n
    for _ in range(n):
        w += rate * h
        if w < w_on:
            w = w_on
        elif w > w_off:
            w = w_off
    return w


def memristance(w, w_on, w_off, r_on, r_off):
    return r_on + (w - w_on) / (w_off - w_on) * (r_off - r_on)


def program_cells(w0, g_target, w_on, w_off, r_on, r_off,
                  k_on, k_off, v_on, v_off, a_on, a_off,
                  pulse_v, pulse_width, verify_v, tol_g, max_pulses, max_step):
    """Closed-loop program-and-verify over a batch of independent cells.

    Each cell is read first; while the measured conductance is outside
    ``tol_g`` of its target, a pulse of magnitude ``pulse_v`` is applied in the
    direction that reduces the error and the cell is read again. The pulse
    width halves whenever the error changes sign.

    Returns ``(w, pulses, converged)`` arrays.
    """
    w0 = np.ascontiguousarray(w0, dtype=np.float64)
    g_target = np.ascontiguousarray(g_target, dtype=np.float64)
    n = w0.shape[0]
    w_out = np.empty(n, dtype=np.float64)
    pulses = np.zeros(n, dtype=np.int64)
    ok = np.zeros(n, dtype=np.bool_)
    for c in range(n):
        w = float(w0[c])
        target = float(g_target[c])
        i_read = verify_v / memristance(w, w_on, w_off, r_on, r_off)
        err = target - i_read / verify_v
        width = pulse_width
        used = 0
        done = abs(err) <= tol_g
        last_up = err > 0.0
        while not done and used < max_pulses:
            # more conductance means moving toward w_on, i.e. a negative pulse
            v = -pulse_v if err > 0.0 else pulse_v
            w = vteam_integrate(w, v, width, max_step, w_on, w_off,
                                k_on, k_off, v_on, v_off, a_on, a_off)
            used += 1
            i_read = verify_v / memristance(w, w_on, w_off, r_on, r_off)
            err = target - i_read / verify_v
            if abs(err) <= tol_g:
                done = True
            elif (err > 0.0) != last_up:
                width *= 0.5
                last_up = err > 0.0
        w_out[c] = w
        pulses[c] = used
        ok[c] = done
    return w_out, pulses, ok


def im_evaluate(i_plus, i_minus, s_in, g_out, i_0, mu, t_write,
                length, v_bias, r_low, r_high):
    """One reset/write/read cycle of the interface module per element.

    Inputs are flat float64 arrays of equal length; returns the output current.
    """
    i_plus = np.ascontiguousarray(i_plus, dtype=np.float64)
    i_minus = np.ascontiguousarray(i_minus, dtype=np.float64)
    n = i_plus.shape[0]
    out = np.empty(n, dtype=np.float64)
    for k in range(n):
        x = 0.5 * length                                     # Clk1: reset to center
        x += mu * (s_in * (i_plus[k] - i_minus[k])) * t_write  # Clk2: write
        if x < 0.0:
            x = 0.0
        elif x > length:
            x = length
        frac = x / length                                    # Clk3: read
        i_read = v_bias * ((1.0 - frac) / r_high + frac / r_low)
        out[k] = g_out * (i_read - i_0)
    return out
