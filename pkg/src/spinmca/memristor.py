"""VTEAM voltage-controlled memristor with multi-level program-and-verify.

State ``w`` is the VTEAM internal variable in metres, bounded by
``[w_on, w_off]``. Resistance is linear in ``w`` from ``r_on`` (at ``w_on``) to
``r_off`` (at ``w_off``). Positive voltage above ``v_off`` drives the state
toward ``w_off`` (RESET, resistance rises); negative voltage below ``v_on``
drives it toward ``w_on`` (SET).
"""
import math
from dataclasses import dataclass, replace

from . import kernels
from .errors import ArgumentError, CalibrationError, DisturbError, ProgrammingError, RangeError

N_LEVELS = 31
DEFAULT_T_SWITCH = 100e-9
DEFAULT_V_PROG = 1.0

# closed-form speed coefficient for a 5 nm state range crossed in 100 ns at 1 V
# with |threshold| = 0.7 V and cubic exponent
_K_DEFAULT = 5e-9 / (DEFAULT_T_SWITCH * (DEFAULT_V_PROG / 0.7 - 1.0) ** 3)


@dataclass(frozen=True)
class MemristorParams:
    r_on: float = 5e3
    r_off: float = 5e6
    v_on: float = -0.7
    v_off: float = 0.7
    k_on: float = -_K_DEFAULT
    k_off: float = _K_DEFAULT
    alpha_on: float = 3.0
    alpha_off: float = 3.0
    w_on: float = 0.0
    w_off: float = 5e-9
    length: float = 5e-9

    def __post_init__(self):
        if not 0 < self.r_on < self.r_off:
            raise ArgumentError(f"need 0 < r_on < r_off, got {self.r_on}, {self.r_off}")
        if not self.w_on < self.w_off:
            raise ArgumentError("need w_on < w_off")
        if not self.v_on < 0 < self.v_off:
            raise ArgumentError("need v_on < 0 < v_off")

    @property
    def g_on(self):
        return 1.0 / self.r_on

    @property
    def g_off(self):
        return 1.0 / self.r_off

    @property
    def safe_read_voltage(self):
        """Largest read magnitude that cannot move the state (exclusive bound)."""
        return min(-self.v_on, self.v_off)

    def _kernel_args(self):
        return (self.k_on, self.k_off, self.v_on, self.v_off, self.alpha_on, self.alpha_off)


@dataclass(frozen=True)
class MemristorState:
    w: float


@dataclass(frozen=True)
class WriteController:
    """Program-and-verify settings.

    ``tolerance`` is a fraction of one level spacing in conductance. The first
    pulse has width ``pulse_width``; every overshoot halves it.
    """
    pulse_voltage: float = 1.0
    pulse_width: float = 2e-9
    verify_voltage: float = 0.5
    tolerance: float = 0.5
    max_pulses: int = 100
    max_step: float = 1e-9

    def check(self, params):
        if abs(self.verify_voltage) >= params.safe_read_voltage or self.verify_voltage == 0:
            raise ArgumentError("verify voltage must be non-zero and below both switching thresholds")
        if self.max_pulses < 1:
            raise ArgumentError("max_pulses must be >= 1")
        if self.pulse_width <= 0 or self.tolerance <= 0 or self.max_step <= 0:
            raise ArgumentError("pulse_width, tolerance and max_step must be positive")
        if self.pulse_voltage <= max(params.v_off, -params.v_on):
            raise ArgumentError("pulse voltage does not exceed the switching thresholds")


def off_state(params):
    return MemristorState(params.w_off)


def on_state(params):
    return MemristorState(params.w_on)


def memristance(state, params):
    return kernels._core_py.memristance(state.w, params.w_on, params.w_off, params.r_on, params.r_off)


def state_for_resistance(r, params):
    """Inverse of :func:`memristance` (clamped to the state bounds)."""
    frac = (r - params.r_on) / (params.r_off - params.r_on)
    frac = min(max(frac, 0.0), 1.0)
    return MemristorState(params.w_on + frac * (params.w_off - params.w_on))


def step_state(state, v, dt, params, max_step=1e-9):
    """Integrate the state under constant voltage ``v`` for ``dt`` seconds."""
    if dt < 0:
        raise ArgumentError(f"negative duration {dt}")
    w = kernels.vteam_integrate(state.w, float(v), float(dt), max_step,
                                params.w_on, params.w_off, *params._kernel_args())
    return MemristorState(w)


def traversal_time(params, v):
    """Closed-form time for constant ``v`` to sweep the full state range."""
    rate = kernels.vteam_rate(float(v), *params._kernel_args())
    if rate == 0.0:
        return math.inf
    return (params.w_off - params.w_on) / abs(rate)


def calibrate_switching(params, t_switch=DEFAULT_T_SWITCH, v_prog=DEFAULT_V_PROG):
    """Set ``k_on``/``k_off`` so that ``+/-|v_prog|`` sweeps the full range in ``t_switch``."""
    if t_switch <= 0:
        raise CalibrationError(f"switching time must be positive, got {t_switch}")
    v = abs(v_prog)
    if v <= params.v_off or -v >= params.v_on:
        raise CalibrationError(f"|v_prog| = {v} V lies inside the dead zone [{params.v_on}, {params.v_off}]")
    span = params.w_off - params.w_on
    k_off = span / (t_switch * (v / params.v_off - 1.0) ** params.alpha_off)
    k_on = -span / (t_switch * (-v / params.v_on - 1.0) ** params.alpha_on)
    return replace(params, k_on=k_on, k_off=k_off)


def read_current(state, v_read, params):
    if abs(v_read) >= params.safe_read_voltage:
        raise DisturbError(f"read at {v_read} V would disturb the cell "
                           f"(thresholds {params.v_on}/{params.v_off} V)")
    return v_read / memristance(state, params)


def level_spacing(params):
    return (params.g_on - params.g_off) / N_LEVELS


def target_conductance(magnitude, params):
    """Conductance of magnitude level 0..31, equally spaced from G_off to G_on."""
    return params.g_off + (magnitude / N_LEVELS) * (params.g_on - params.g_off)


def nearest_level(g, params):
    m = round((g - params.g_off) / (params.g_on - params.g_off) * N_LEVELS)
    return min(max(int(m), 0), N_LEVELS)


def program_to_level(state, target_level, ctrl=None, params=None):
    """Closed-loop program-and-verify of one cell.

    Returns ``(new_state, pulses_used)``; raises :class:`ProgrammingError`
    when the cell is still outside tolerance after ``ctrl.max_pulses`` pulses.
    """
    ctrl = ctrl or WriteController()
    params = params or MemristorParams()
    if isinstance(target_level, bool) or not isinstance(target_level, int) or not 0 <= target_level <= N_LEVELS:
        raise RangeError(f"target level must be an integer in 0..{N_LEVELS}, got {target_level!r}")
    ctrl.check(params)
    w, pulses, ok = program_many([state.w], [target_conductance(target_level, params)], ctrl, params)
    if not ok[0]:
        raise ProgrammingError(f"level {target_level} not reached after {ctrl.max_pulses} pulses")
    return MemristorState(float(w[0])), int(pulses[0])


def program_many(w0, g_target, ctrl, params):
    """Vectorised program-and-verify; returns ``(w, pulses, converged)`` arrays."""
    return kernels.program_cells(
        w0, g_target, params.w_on, params.w_off, params.r_on, params.r_off,
        *params._kernel_args(),
        ctrl.pulse_voltage, ctrl.pulse_width, ctrl.verify_voltage,
        ctrl.tolerance * level_spacing(params), int(ctrl.max_pulses), ctrl.max_step)
