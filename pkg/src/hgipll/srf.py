"""Embedded synchronous-reference-frame PLL.

The quadrature pair from the HGI is rotated into the dq frame; a PI
controller plus integrator drives the d-axis error to zero, producing the
frequency and phase estimates and the unit vectors sin/cos(theta_e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

NOMINAL_OMEGA0 = 2 * math.pi * 50.0

#: Per-sample arithmetic budget of the loop update, trig lookups excluded.
SRF_MULS_PER_STEP = 7
SRF_ADDS_PER_STEP = 6

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class PiParams:
    """PI controller gains of the phase loop.

    ``ki`` is the continuous-equivalent integral gain; its design value
    carries an explicit sample-period factor (see ``pi_from_bandwidth``),
    so the discrete integrator increments by ``ki * sample_period * error``
    each sample.
    """

    kp: float
    ki: float
    sample_period: float

    def __post_init__(self):
        if self.kp <= 0 or self.ki <= 0:
            raise ValueError("kp and ki must be > 0")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be > 0")


def pi_from_bandwidth(f_bw: float, v_m: float = 1.0,
                      sample_period: float = 50e-6) -> PiParams:
    """PI gains for a target loop bandwidth.

    kp = w_bw / V_m and ki = kp * Ts * w_bw^2, which places the PI zero
    low enough that the closed loop settles in about 4 / w_bw.
    """
    if f_bw <= 0:
        raise ValueError("f_bw must be > 0")
    if v_m <= 0:
        raise ValueError("v_m must be > 0")
    w_bw = TWO_PI * f_bw
    kp = w_bw / v_m
    ki = kp * sample_period * w_bw**2
    return PiParams(kp=kp, ki=ki, sample_period=sample_period)


def srf_settling_time(omega_bw: float) -> float:
    """Settling time of the phase loop, 4 / bandwidth."""
    if omega_bw <= 0:
        raise ValueError("omega_bw must be > 0")
    return 4.0 / omega_bw


def park(v_alpha, v_beta, theta_e):
    """Rotate the stationary-frame pair into the dq frame.

    v_d = v_alpha*cos + v_beta*sin, v_q = -v_alpha*sin + v_beta*cos.
    With the locked convention v_alpha = sin(theta), v_beta = -cos(theta)
    the d axis carries the phase error.
    """
    c = math.cos(theta_e)
    s = math.sin(theta_e)
    return v_alpha * c + v_beta * s, -v_alpha * s + v_beta * c


def _float_trig(theta):
    return math.sin(theta), math.cos(theta)


class _ExactArithmetic:
    """No-op arithmetic model: exact float64 everywhere."""

    coeff = staticmethod(lambda x: x)
    signal = staticmethod(lambda x: x)
    accumulator = staticmethod(lambda x: x)
    phase = staticmethod(lambda x: x)


_EXACT = _ExactArithmetic()


class SrfPll:
    """Discrete SRF-PLL loop: Park transform, PI, phase integrator.

    The loop runs in per-unit of the nominal frequency: the PI output is
    the relative frequency deviation, added to the feedforward 1.0 pu.
    Per-sample cost is 7 multiplications and 6 additions, trig excluded.

    ``trig`` maps theta to (sin, cos); the default evaluates directly,
    the fixed-point simulator passes a lookup table.
    """

    def __init__(self, pi: PiParams, omega0: float = NOMINAL_OMEGA0,
                 trig=None, arith=None):
        self.pi = pi
        self.omega0 = omega0
        self._q = arith if arith is not None else _EXACT
        if trig is not None:
            self._trig = trig
        else:
            self._trig = getattr(self._q, "trig", _float_trig)
        ts = pi.sample_period
        self._kp_pu = self._q.coeff(pi.kp / omega0)
        self._ki_pu = self._q.coeff(pi.ki * ts / omega0)
        # nominal phase increment per sample
        self._c_w = self._q.coeff(omega0 * ts)
        self.reset()

    def reset(self, theta=0.0, accumulator=0.0):
        self.theta = theta
        self.accumulator = accumulator
        self.deviation = 0.0             # pu frequency deviation, PI output
        self.v_d = 0.0
        self.v_q = 0.0

    @property
    def omega_e(self):
        """Estimated frequency in rad/s."""
        return self.omega0 * (1.0 + self.deviation)

    def step(self, v_alpha, v_beta):
        """Advance one sample; returns the unit vectors (sin, cos) used."""
        q = self._q
        s, c = self._trig(self.theta)
        v_d = q.signal(v_alpha * c + v_beta * s)
        v_q = q.signal(v_beta * c - v_alpha * s)
        acc = q.accumulator(self.accumulator + self._ki_pu * v_d)
        dev = q.signal(self._kp_pu * v_d + acc)
        theta = q.phase(self.theta + self._c_w + self._c_w * dev)
        if theta >= TWO_PI:
            theta -= TWO_PI              # subtraction wrap, fixed-point safe
        elif theta < 0.0:
            theta += TWO_PI
        self.v_d = v_d
        self.v_q = v_q
        self.accumulator = acc
        self.deviation = dev
        self.theta = theta
        return s, c


def srf_step(pll: SrfPll, v_alpha, v_beta):
    """Functional wrapper over ``SrfPll.step``."""
    return pll.step(v_alpha, v_beta)
