"""Declarative single-phase grid-voltage scenarios and their synthesis.

A scenario is a fundamental sinusoid (per-unit of the nominal peak) plus a
list of harmonics, a dc offset and optional timed events.  Synthesis
integrates the instantaneous frequency so that phase stays continuous
across frequency steps, which the transient scenarios rely on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

SCHEMA_VERSION = 1

#: Low-order odd harmonics used by default when building a harmonic profile.
DEFAULT_HARMONIC_ORDERS = (3, 5, 7, 9)

EVENT_KINDS = ("phase_jump", "frequency_step", "amplitude_step", "dc_step")


class ScenarioError(ValueError):
    """Raised for an invalid scenario description."""


@dataclass(frozen=True)
class HarmonicComponent:
    """One voltage harmonic, amplitude in per-unit of the fundamental peak."""

    order: int
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.order < 2:
            raise ScenarioError(f"harmonic order must be >= 2, got {self.order}")
        if self.amplitude < 0:
            raise ScenarioError("harmonic amplitude must be >= 0")


@dataclass(frozen=True)
class TimedEvent:
    """Instantaneous change applied to the signal at a given time.

    ``phase_jump`` adds ``value`` radians to the running phase; the other
    kinds set the fundamental frequency (Hz), fundamental amplitude (pu)
    or dc offset (pu) to ``value``.
    """

    time: float
    kind: str
    value: float

    def __post_init__(self):
        if self.time < 0:
            raise ScenarioError("event time must be >= 0")
        if self.kind not in EVENT_KINDS:
            raise ScenarioError(f"unknown event kind {self.kind!r}")


@dataclass(frozen=True)
class GridSignalSpec:
    """Full description of the test grid voltage."""

    fundamental_amplitude: float = 1.0
    fundamental_frequency: float = 50.0
    fundamental_phase: float = 0.0
    harmonics: tuple[HarmonicComponent, ...] = ()
    dc_offset: float = 0.0
    events: tuple[TimedEvent, ...] = ()

    def __post_init__(self):
        if self.fundamental_frequency <= 0:
            raise ScenarioError("fundamental frequency must be > 0")
        object.__setattr__(self, "harmonics", tuple(self.harmonics))
        events = tuple(sorted(self.events, key=lambda e: e.time))
        object.__setattr__(self, "events", events)

    @property
    def input_thd(self) -> float:
        """Input THD as a fraction of the fundamental amplitude."""
        if self.fundamental_amplitude == 0:
            return 0.0
        rss = math.sqrt(sum(h.amplitude**2 for h in self.harmonics))
        return rss / self.fundamental_amplitude

    def without_events(self) -> "GridSignalSpec":
        return replace(self, events=())


def harmonic_profile(
    input_thd: float,
    orders: tuple[int, ...] = DEFAULT_HARMONIC_ORDERS,
) -> list[HarmonicComponent]:
    """Build harmonics whose amplitudes fall off as 1/order.

    Amplitudes satisfy ``v_i / v_j = j / i`` and their root-sum-square
    equals ``input_thd`` (per-unit of a 1 pu fundamental).  Phases are
    zero; callers can replace individual components for other phases.
    """
    if input_thd < 0:
        raise ScenarioError("input_thd must be >= 0")
    orders = tuple(orders)
    if not orders:
        raise ScenarioError("no harmonic orders")
    if any(o < 2 for o in orders):
        raise ScenarioError("harmonic orders must be >= 2")
    ref = orders[0]
    base = input_thd / math.sqrt(sum((ref / o) ** 2 for o in orders))
    return [HarmonicComponent(o, base * ref / o) for o in orders]


def synthesize(
    spec: GridSignalSpec, sample_period: float, duration: float
) -> np.ndarray:
    """Sample the scenario voltage on a uniform grid.

    Returns ``round(duration / sample_period)`` samples starting at t = 0.
    The fundamental phase is the trapezoidal integral of the instantaneous
    frequency, so it is continuous across frequency steps; phase jumps are
    applied as explicit offsets.
    """
    if sample_period <= 0:
        raise ScenarioError("sample_period must be > 0")
    if duration <= 0:
        raise ScenarioError("duration must be > 0")
    n = int(round(duration / sample_period))
    t = np.arange(n) * sample_period

    freq = np.full(n, spec.fundamental_frequency)
    amp = np.full(n, spec.fundamental_amplitude)
    dc = np.full(n, spec.dc_offset)
    phase_offset = np.zeros(n)
    for ev in spec.events:
        on = t >= ev.time
        if ev.kind == "phase_jump":
            phase_offset[on] += ev.value
        elif ev.kind == "frequency_step":
            freq[on] = ev.value
        elif ev.kind == "amplitude_step":
            amp[on] = ev.value
        elif ev.kind == "dc_step":
            dc[on] = ev.value

    # trapezoidal phase integration keeps theta continuous at freq steps
    omega = 2 * np.pi * freq
    theta = np.empty(n)
    theta[0] = 0.0
    np.cumsum(0.5 * (omega[1:] + omega[:-1]) * sample_period, out=theta[1:])
    theta += phase_offset

    # the fundamental phase offset applies to the fundamental only
    v = amp * np.sin(theta + spec.fundamental_phase)
    for h in spec.harmonics:
        v += h.amplitude * np.sin(h.order * theta + h.phase)
    return v + dc


# --- JSON scenario files -------------------------------------------------

def spec_to_dict(spec: GridSignalSpec) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "fundamental": {
            "amplitude": spec.fundamental_amplitude,
            "frequency_hz": spec.fundamental_frequency,
            "phase_rad": spec.fundamental_phase,
        },
        "harmonics": [
            {"order": h.order, "amplitude": h.amplitude, "phase_rad": h.phase}
            for h in spec.harmonics
        ],
        "dc_offset": spec.dc_offset,
        "events": [
            {"time_s": e.time, "kind": e.kind, "value": e.value}
            for e in spec.events
        ],
    }


def spec_from_dict(data: dict) -> GridSignalSpec:
    try:
        fund = data["fundamental"]
        harmonics = tuple(
            HarmonicComponent(
                int(h["order"]), float(h["amplitude"]), float(h.get("phase_rad", 0.0))
            )
            for h in data.get("harmonics", [])
        )
        events = tuple(
            TimedEvent(float(e["time_s"]), str(e["kind"]), float(e["value"]))
            for e in data.get("events", [])
        )
        return GridSignalSpec(
            fundamental_amplitude=float(fund.get("amplitude", 1.0)),
            fundamental_frequency=float(fund["frequency_hz"]),
            fundamental_phase=float(fund.get("phase_rad", 0.0)),
            harmonics=harmonics,
            dc_offset=float(data.get("dc_offset", 0.0)),
            events=events,
        )
    except (KeyError, TypeError) as exc:
        raise ScenarioError(f"invalid scenario file: {exc}") from exc


def load_scenario(path) -> GridSignalSpec:
    with open(path) as fh:
        return spec_from_dict(json.load(fh))


def save_scenario(spec: GridSignalSpec, path) -> None:
    with open(path, "w") as fh:
        json.dump(spec_to_dict(spec), fh, indent=2)
        fh.write("\n")
