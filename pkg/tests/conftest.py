import math

import pytest

from hgipll import (
    HgiParams,
    PllDesign,
    pi_from_bandwidth,
    settling_times,
    srf_settling_time,
)


class OpCounter:
    """Multiplication/addition tally shared by CountingFloat instances."""

    def __init__(self):
        self.muls = 0
        self.adds = 0

    def reset(self):
        self.muls = 0
        self.adds = 0


class CountingFloat(float):
    """Float that counts the multiplications and additions it takes part in.

    Being a float subclass it passes through math.sin/cos and comparisons
    untouched, so trig lookups stay outside the tally.
    """

    counter: OpCounter = OpCounter()

    def _bin(self, other, op, slot):
        setattr(self.counter, slot, getattr(self.counter, slot) + 1)
        return CountingFloat(op(float(self), float(other)))

    def __mul__(self, other):
        return self._bin(other, lambda a, b: a * b, "muls")

    def __rmul__(self, other):
        return self._bin(other, lambda a, b: b * a, "muls")

    def __add__(self, other):
        return self._bin(other, lambda a, b: a + b, "adds")

    def __radd__(self, other):
        return self._bin(other, lambda a, b: b + a, "adds")

    def __sub__(self, other):
        return self._bin(other, lambda a, b: a - b, "adds")

    def __rsub__(self, other):
        return self._bin(other, lambda a, b: b - a, "adds")

    def __neg__(self):
        return CountingFloat(-float(self))


class CountingArithmetic:
    """Arithmetic hooks that wrap coefficients so every product and sum
    against them is tallied by CountingFloat."""

    @staticmethod
    def coeff(x):
        return CountingFloat(x)

    @staticmethod
    def signal(x):
        return x

    accumulator = signal
    phase = signal


def make_design(k: float, f_bw: float, method: str = "test") -> PllDesign:
    pi = pi_from_bandwidth(f_bw)
    t_hgi = settling_times(HgiParams(k))[2]
    t_srf = srf_settling_time(2 * math.pi * f_bw)
    return PllDesign(k=k, f_bw=f_bw, pi=pi, t_s_hgi=t_hgi, t_s_srf=t_srf,
                     t_sd=t_hgi + t_srf, method=method)


@pytest.fixture(scope="session")
def mtsd_like():
    """Parameters of the deviation-only design, built directly."""
    return make_design(1.56, 55.0, "mtsd")


@pytest.fixture(scope="session")
def hc_like():
    """Parameters of the harmonic-aware design, built directly."""
    return make_design(1.56, 29.5, "hc-mtsd")
