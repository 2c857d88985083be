"""Current-driven domain-wall MTJ device.

The wall position ``x`` runs from 0 to the strip length ``L``. At ``x = 0`` the
MTJ sits fully in its high-resistance state ``r_high``; at ``x = L`` fully in
``r_low``. The junction is treated as two parallel sections split at the wall,
so its conductance is linear in ``x``.
"""
from dataclasses import dataclass, replace

from .errors import ArgumentError

CAL_CURRENT = 35e-6
CAL_TIME = 2e-9
_L_DEFAULT = 100e-9


@dataclass(frozen=True)
class DWParams:
    length: float = _L_DEFAULT
    strip_width: float = 20e-9
    strip_thickness: float = 2e-9
    dw_width: float = 15e-9
    mgo_thickness: float = 1.1e-9
    m_sat: float = 6.8e5
    r_low: float = 10e3
    r_high: float = 20e3
    v_bias: float = 0.1
    mobility: float = _L_DEFAULT / (CAL_CURRENT * CAL_TIME)

    def __post_init__(self):
        if not 0 < self.r_low < self.r_high:
            raise ArgumentError(f"need 0 < r_low < r_high, got {self.r_low}, {self.r_high}")
        if self.length <= 0:
            raise ArgumentError("strip length must be positive")
        if self.mobility <= 0:
            raise ArgumentError("mobility must be positive")

    @property
    def i_high(self):
        """Read current with the device fully in R_H."""
        return self.v_bias / self.r_high

    @property
    def i_low(self):
        """Read current with the device fully in R_L."""
        return self.v_bias / self.r_low

    @property
    def i_center(self):
        return read_dw_current(DWState(0.5 * self.length), self)


@dataclass(frozen=True)
class DWState:
    x: float


def calibrate_mobility(params, current=CAL_CURRENT, duration=CAL_TIME):
    """Mobility that moves the wall across the whole strip in ``duration`` at ``current``."""
    if current <= 0 or duration <= 0:
        raise ArgumentError("calibration current and duration must be positive")
    return replace(params, mobility=params.length / (current * duration))


def reset(state, params=None):
    params = params or DWParams()
    return DWState(0.5 * params.length)


def drive(state, current, dt, params=None):
    params = params or DWParams()
    if dt < 0:
        raise ArgumentError(f"negative duration {dt}")
    x = state.x + params.mobility * current * dt
    return DWState(min(max(x, 0.0), params.length))


def read_dw_current(state, params=None):
    params = params or DWParams()
    frac = state.x / params.length
    return params.v_bias * ((1.0 - frac) / params.r_high + frac / params.r_low)
