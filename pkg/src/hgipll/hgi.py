"""High-pass generalized integrator (HGI) filter pair.

The HGI turns the sensed grid voltage into a quadrature pair: a band-pass
in-phase channel and a high-pass quadrature channel,

    G_alpha(s) =  k * s * w0 / (s^2 + k*w0*s + w0^2)
    G_beta(s)  = -k * s^2    / (s^2 + k*w0*s + w0^2)

Both have zero dc gain, which is what rejects input dc offsets.  This
module provides the continuous-domain frequency response, a forward-Euler
discrete realization, closed-form step-response settling times and the
search for the gain k with the fastest settling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NOMINAL_OMEGA0 = 2 * math.pi * 50.0

#: Per-sample arithmetic budget of the forward-Euler HGI update.
HGI_MULS_PER_STEP = 4
HGI_ADDS_PER_STEP = 6

#: Budget of the basic SOGI variant (low-pass quadrature channel).
BASIC_SOGI_MULS_PER_STEP = 3
BASIC_SOGI_ADDS_PER_STEP = 4

#: Forward-Euler stability guard: require omega0 * Ts below this.
EULER_GUARD = 0.1

#: Internal time step used when measuring settling on the continuous
#: closed-form step response.
SETTLING_DT = 1e-6

#: Horizon after which an unsettled response is reported as unstable.
SETTLING_HORIZON = 1.0


class _ExactArithmetic:
    """No-op arithmetic model: exact float64 coefficients and signals."""

    @staticmethod
    def coeff(x):
        return x

    @staticmethod
    def signal(x):
        return x


_EXACT = _ExactArithmetic()


@dataclass(frozen=True)
class HgiParams:
    """Gain and nominal center frequency of the HGI filter pair."""

    k: float
    omega0: float = NOMINAL_OMEGA0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be > 0")
        if self.omega0 <= 0:
            raise ValueError("omega0 must be > 0")


def freq_response(params: HgiParams, omega) -> tuple[complex, complex]:
    """Complex gains (G_alpha, G_beta) at angular frequency ``omega``.

    Accepts a scalar or an array of frequencies in rad/s.
    """
    s = 1j * np.asarray(omega, dtype=float)
    w0, k = params.omega0, params.k
    den = s * s + k * w0 * s + w0 * w0
    g_alpha = k * s * w0 / den
    g_beta = -k * s * s / den
    if np.isscalar(omega):
        return complex(g_alpha), complex(g_beta)
    return g_alpha, g_beta


class HgiFilter:
    """Forward-Euler discrete realization of the HGI pair.

    State x1 is the band-pass output v_alpha; x2 is the second integrator
    state, scaled so that the update needs 4 multiplications and 6
    additions (the input summer feeds the alpha update and the beta output
    path separately, as in the counted hardware dataflow).
    """

    def __init__(self, params: HgiParams, sample_period: float, arith=None):
        if sample_period <= 0:
            raise ValueError("sample_period must be > 0")
        if params.omega0 * sample_period >= EULER_GUARD:
            raise ValueError("sample rate too low for Euler stability")
        self.params = params
        self.sample_period = sample_period
        self._q = arith if arith is not None else _EXACT
        self._k = self._q.coeff(params.k)
        self._c1 = self._q.coeff(params.k * params.omega0 * sample_period)
        self._c2 = self._q.coeff(params.omega0 * sample_period)
        self._x1 = 0.0
        self._x2 = 0.0

    @property
    def state(self) -> tuple[float, float]:
        return self._x1, self._x2

    def reset(self, x1=0.0, x2=0.0) -> None:
        self._x1 = x1
        self._x2 = x2

    def step(self, v_g):
        """Advance one sample; returns (v_alpha, v_beta)."""
        q = self._q.signal
        x1, x2 = self._x1, self._x2
        u = v_g - x1                       # alpha-path input summer
        r = v_g - x1                       # beta-path input summer
        v_beta = q(x2 - self._k * r)
        self._x1 = q(x1 + self._c1 * u - self._c2 * x2)
        self._x2 = q(x2 + self._c2 * x1)
        return x1, v_beta


class BasicSogiFilter:
    """Basic SOGI: same band-pass channel, low-pass quadrature channel.

    G_beta,basic(s) = k*w0^2 / (s^2 + k*w0*s + w0^2).  It does not block
    dc, which is exactly the weakness the HGI removes; kept as the
    comparison baseline.
    """

    def __init__(self, params: HgiParams, sample_period: float, arith=None):
        if sample_period <= 0:
            raise ValueError("sample_period must be > 0")
        if params.omega0 * sample_period >= EULER_GUARD:
            raise ValueError("sample rate too low for Euler stability")
        self.params = params
        self.sample_period = sample_period
        self._q = arith if arith is not None else _EXACT
        self._c1 = self._q.coeff(params.k * params.omega0 * sample_period)
        self._c2 = self._q.coeff(params.omega0 * sample_period)
        self._x1 = 0.0
        self._x2 = 0.0

    def reset(self, x1=0.0, x2=0.0) -> None:
        self._x1 = x1
        self._x2 = x2

    def step(self, v_g):
        q = self._q.signal
        x1, x2 = self._x1, self._x2
        u = v_g - x1
        self._x1 = q(x1 + self._c1 * u - self._c2 * x2)
        self._x2 = q(x2 + self._c2 * x1)
        return x1, x2


def step_responses(params: HgiParams, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form unit-step responses of G_alpha and G_beta at times t.

    Built from the impulse response of 1/(s^2 + k*w0*s + w0^2): the alpha
    step response is k*w0 times it and the beta step response is -k times
    its derivative.  Valid for any damping (complex, real or repeated
    roots).
    """
    w0, k = params.omega0, params.k
    disc = complex((k * w0) ** 2 - 4 * w0 * w0)
    root = np.sqrt(disc)
    r1 = (-k * w0 + root) / 2
    r2 = (-k * w0 - root) / 2
    if abs(r1 - r2) < 1e-9 * w0:
        e = np.exp(r1 * t)
        h2 = t * e
        h2p = e * (1 + r1 * t)
    else:
        e1 = np.exp(r1 * t)
        e2 = np.exp(r2 * t)
        h2 = (e1 - e2) / (r1 - r2)
        h2p = (r1 * e1 - r2 * e2) / (r1 - r2)
    return (k * w0 * h2).real, (-k * h2p).real


def _settle_time(y: np.ndarray, t: np.ndarray, tolerance: float) -> float:
    """Last time |y| leaves the band, referenced to the response peak."""
    band = tolerance * np.abs(y).max()
    outside = np.abs(y) > band
    if not outside.any():
        return 0.0
    i = np.nonzero(outside)[0][-1]
    if i + 1 >= len(t):
        raise RuntimeError("unstable or unsettled")
    return float(t[i + 1])


def settling_times(
    params: HgiParams, tolerance: float = 0.02, dt: float = SETTLING_DT
) -> tuple[float, float, float]:
    """Step-response settling times (t_s_alpha, t_s_beta, max of both).

    Settling is measured on the dense closed-form response: the last time
    the output leaves the +/-tolerance band around its final value (zero,
    both channels have no dc gain), with the band referenced to the peak
    response magnitude.
    """
    if not 0 < tolerance <= 0.2:
        raise ValueError("tolerance must be in (0, 0.2]")
    k = params.k
    # slowest pole decay rate: zeta*w0 when underdamped, the slow real
    # pole when overdamped; 12 time constants comfortably brackets any
    # 2% settling instant
    rate = 0.5 * (k - math.sqrt(max(k * k - 4.0, 0.0))) * params.omega0
    horizon = min(SETTLING_HORIZON, 12 / rate + 0.005)
    t = np.arange(0.0, horizon, dt)
    y_alpha, y_beta = step_responses(params, t)
    ts_a = _settle_time(y_alpha, t, tolerance)
    ts_b = _settle_time(y_beta, t, tolerance)
    return ts_a, ts_b, max(ts_a, ts_b)


def k_opt_search(
    k_range: tuple[float, float] = (0.1, 4.0),
    resolution: float = 0.01,
    omega0: float = NOMINAL_OMEGA0,
    tolerance: float = 0.02,
    dt: float = 2e-6,
) -> tuple[float, float]:
    """Grid search for the gain with the fastest combined settling time.

    Returns (k_opt, minimum t_s_hgi); ties break toward smaller k.
    """
    k_min, k_max = k_range
    if not 0 < k_min <= k_max:
        raise ValueError("need 0 < k_min <= k_max")
    if resolution <= 0:
        raise ValueError("resolution must be > 0")
    best_k, best_ts = None, None
    for k in k_grid(k_min, k_max, resolution):
        ts = settling_times(HgiParams(k, omega0), tolerance, dt)[2]
        if best_ts is None or ts < best_ts:
            best_k, best_ts = k, ts
    return best_k, best_ts


def k_grid(k_min: float, k_max: float, resolution: float) -> np.ndarray:
    n = int(round((k_max - k_min) / resolution))
    grid = k_min + resolution * np.arange(n + 1)
    return grid[grid <= k_max + 1e-12]
