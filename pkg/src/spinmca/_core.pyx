# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. See ``_core_py.py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, fabs, pow

cnp.import_array()


cdef inline double _rate(double v, double k_on, double k_off, double v_on,
                         double v_off, double a_on, double a_off) nogil:
    if v > v_off:
        return k_off * pow(v / v_off - 1.0, a_off)
    if v < v_on:
        return k_on * pow(v / v_on - 1.0, a_on)
    return 0.0


cdef inline double _integrate(double w, double v, double duration, double max_step,
                              double w_on, double w_off, double k_on, double k_off,
                              double v_on, double v_off, double a_on, double a_off) nogil:
    cdef double rate, h
    cdef long n, i
    if duration <= 0.0:
        return w
    rate = _rate(v, k_on, k_off, v_on, v_off, a_on, a_off)
    if rate == 0.0:
        return w
    n = <long>ceil(duration / max_step)
    h = duration / n
    for i in range(n):
        w += rate * h
        if w < w_on:
            w = w_on
        elif w > w_off:
            w = w_off
    return w


cdef inline double _memristance(double w, double w_on, double w_off,
                                double r_on, double r_off) nogil:
    return r_on + (w - w_on) / (w_off - w_on) * (r_off - r_on)


def vteam_rate(double v, double k_on, double k_off, double v_on, double v_off,
               double a_on, double a_off):
    return _rate(v, k_on, k_off, v_on, v_off, a_on, a_off)


def vteam_integrate(double w, double v, double duration, double max_step,
                    double w_on, double w_off, double k_on, double k_off,
                    double v_on, double v_off, double a_on, double a_off):
    return _integrate(w, v, duration, max_step, w_on, w_off,
                      k_on, k_off, v_on, v_off, a_on, a_off)


def memristance(double w, double w_on, double w_off, double r_on, double r_off):
    return _memristance(w, w_on, w_off, r_on, r_off)


def program_cells(w0, g_target, double w_on, double w_off, double r_on, double r_off,
                  double k_on, double k_off, double v_on, double v_off,
                  double a_on, double a_off, double pulse_v, double pulse_width,
                  double verify_v, double tol_g, long max_pulses, double max_step):
    cdef cnp.float64_t[::1] w0v = np.ascontiguousarray(w0, dtype=np.float64)
    cdef cnp.float64_t[::1] gt = np.ascontiguousarray(g_target, dtype=np.float64)
    cdef Py_ssize_t n = w0v.shape[0], c
    w_arr = np.empty(n, dtype=np.float64)
    p_arr = np.zeros(n, dtype=np.int64)
    ok_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.float64_t[::1] w_out = w_arr
    cdef cnp.int64_t[::1] pulses = p_arr
    cdef cnp.uint8_t[::1] ok = ok_arr
    cdef double w, target, i_read, err, width, v
    cdef long used
    cdef bint done, last_up
    with nogil:
        for c in range(n):
            w = w0v[c]
            target = gt[c]
            i_read = verify_v / _memristance(w, w_on, w_off, r_on, r_off)
            err = target - i_read / verify_v
            width = pulse_width
            used = 0
            done = fabs(err) <= tol_g
            last_up = err > 0.0
            while not done and used < max_pulses:
                v = -pulse_v if err > 0.0 else pulse_v
                w = _integrate(w, v, width, max_step, w_on, w_off,
                               k_on, k_off, v_on, v_off, a_on, a_off)
                used += 1
                i_read = verify_v / _memristance(w, w_on, w_off, r_on, r_off)
                err = target - i_read / verify_v
                if fabs(err) <= tol_g:
                    done = True
                elif (err > 0.0) != last_up:
                    width *= 0.5
                    last_up = err > 0.0
            w_out[c] = w
            pulses[c] = used
            ok[c] = done
    return w_arr, p_arr, ok_arr.astype(np.bool_)


def im_evaluate(i_plus, i_minus, double s_in, double g_out, double i_0, double mu,
                double t_write, double length, double v_bias, double r_low, double r_high):
    cdef cnp.float64_t[::1] ip = np.ascontiguousarray(i_plus, dtype=np.float64)
    cdef cnp.float64_t[::1] im = np.ascontiguousarray(i_minus, dtype=np.float64)
    cdef Py_ssize_t n = ip.shape[0], k
    out_arr = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef double x, frac, i_read
    with nogil:
        for k in range(n):
            x = 0.5 * length
            x += mu * (s_in * (ip[k] - im[k])) * t_write
            if x < 0.0:
                x = 0.0
            elif x > length:
                x = length
            frac = x / length
            i_read = v_bias * ((1.0 - frac) / r_high + frac / r_low)
            out[k] = g_out * (i_read - i_0)
    return out_arr
