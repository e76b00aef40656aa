"""Worst-case design procedures for the HGI-PLL parameters.

Two sweeps produce a complete parameter set (k, loop bandwidth, PI gains):

* ``mtsd_design`` fixes k at the fastest-settling gain and picks the
  highest bandwidth that keeps the predicted unit-vector THD within the
  limit for every frequency in the deviation band (harmonics ignored).
* ``hc_mtsd_design`` additionally assumes a worst-case input THD and
  searches the (bandwidth, k) grid for the smallest additive settling
  time subject to the same THD limit.

THD feasibility is checked at the resolution the limit is stated in
(one decimal of a percent by default), matching how the published design
points were read off their constraint curves.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import hgi as hgi_mod
from .hgi import HgiParams, k_grid, settling_times
from .signal_model import GridSignalSpec, harmonic_profile, DEFAULT_HARMONIC_ORDERS
from .srf import PiParams, pi_from_bandwidth, srf_settling_time
from .thd import total_unit_vector_thd

NOMINAL_FREQ_HZ = 50.0
SCHEMA_VERSION = 1


class InfeasibleDesignError(ValueError):
    """No parameter combination satisfies the THD constraint."""


@dataclass(frozen=True)
class DesignConstraints:
    """Inputs to either design procedure."""

    delta_f: float = 0.08            # max relative frequency deviation
    input_thd: float = 0.0           # worst-case input THD (fraction)
    uthd_limit: float = 0.01         # unit-vector THD limit (fraction)
    f_bw_range: tuple[float, float] = (20.0, 55.0)
    k_range: tuple[float, float] = (0.1, 4.0)
    f_bw_step: float = 0.5
    k_step: float = 0.01
    freq_step_hz: float = 2.0        # grid over the deviation band
    harmonic_orders: tuple[int, ...] = DEFAULT_HARMONIC_ORDERS
    sample_period: float = 50e-6
    v_m: float = 1.0
    # THD values are compared against the limit at this many decimals of
    # a percent; None compares exactly.
    thd_compare_decimals: int | None = 1

    def __post_init__(self):
        if not 0 < self.uthd_limit < 1:
            raise ValueError("uthd_limit must be in (0, 1)")
        if self.delta_f < 0 or self.delta_f >= 0.5:
            raise ValueError("delta_f must be in [0, 0.5)")
        if self.f_bw_range[0] > self.f_bw_range[1] or self.f_bw_range[0] <= 0:
            raise ValueError("invalid f_bw_range")
        if self.k_range[0] > self.k_range[1] or self.k_range[0] <= 0:
            raise ValueError("invalid k_range")

    def sweep_frequencies(self) -> list[float]:
        """Deviation-band frequency grid, band edges and nominal included."""
        lo = NOMINAL_FREQ_HZ * (1 - self.delta_f)
        hi = NOMINAL_FREQ_HZ * (1 + self.delta_f)
        freqs = list(np.arange(lo, hi + 1e-9, self.freq_step_hz))
        for f in (NOMINAL_FREQ_HZ, hi):
            if not any(abs(f - g) < 1e-9 for g in freqs):
                freqs.append(f)
        return sorted(freqs)

    def bandwidth_grid(self) -> np.ndarray:
        lo, hi = self.f_bw_range
        n = int(round((hi - lo) / self.f_bw_step))
        grid = lo + self.f_bw_step * np.arange(n + 1)
        return grid[grid <= hi + 1e-9]

    def thd_ok(self, thd_percent: float) -> bool:
        limit = 100.0 * self.uthd_limit
        if self.thd_compare_decimals is None:
            return thd_percent <= limit + 1e-12
        return round(thd_percent, self.thd_compare_decimals) <= limit + 1e-12


@dataclass(frozen=True)
class PllDesign:
    """Complete parameter set produced by a design procedure."""

    k: float
    f_bw: float
    pi: PiParams
    t_s_hgi: float
    t_s_srf: float
    t_sd: float
    method: str = ""

    @property
    def hgi(self) -> HgiParams:
        return HgiParams(self.k)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "method": self.method,
            "k": self.k,
            "f_bw_hz": self.f_bw,
            "kp": self.pi.kp,
            "ki": self.pi.ki,
            "sample_period_s": self.pi.sample_period,
            "t_s_hgi_s": self.t_s_hgi,
            "t_s_srf_s": self.t_s_srf,
            "t_sd_s": self.t_sd,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PllDesign":
        pi = PiParams(
            kp=float(data["kp"]),
            ki=float(data["ki"]),
            sample_period=float(data["sample_period_s"]),
        )
        return cls(
            k=float(data["k"]),
            f_bw=float(data["f_bw_hz"]),
            pi=pi,
            t_s_hgi=float(data["t_s_hgi_s"]),
            t_s_srf=float(data["t_s_srf_s"]),
            t_sd=float(data["t_sd_s"]),
            method=str(data.get("method", "")),
        )


@dataclass
class DesignReport:
    """Sweep artifacts kept alongside the chosen design."""

    method: str
    swept: list[tuple[float, float, float, bool]] = field(default_factory=list)
    feasible_count: int = 0
    design: PllDesign | None = None
    thd_grid: list[tuple[float, float, float]] = field(default_factory=list)

    def write_sweep_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["f_bw_hz", "k", "t_sd_ms", "feasible"])
            for f_bw, k, t_sd, ok in self.swept:
                w.writerow([f"{f_bw:g}", f"{k:g}", f"{t_sd * 1e3:.4f}", int(ok)])

    def write_thd_grid_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["frequency_hz", "input_thd_pct", "unit_vector_thd_pct"])
            for f, h, u in self.thd_grid:
                w.writerow([f"{f:g}", f"{100 * h:g}", f"{u:.4f}"])


def _steady_spec(
    frequency_hz: float, input_thd: float, orders: tuple[int, ...]
) -> GridSignalSpec:
    harmonics = tuple(harmonic_profile(input_thd, orders)) if input_thd else ()
    return GridSignalSpec(
        fundamental_frequency=frequency_hz, harmonics=harmonics
    )


def predicted_thd(
    k: float,
    f_bw: float,
    frequency_hz: float,
    input_thd: float,
    constraints: DesignConstraints,
) -> float:
    """Analytical unit-vector THD (percent) at one grid point."""
    pi = pi_from_bandwidth(f_bw, constraints.v_m, constraints.sample_period)
    spec = _steady_spec(frequency_hz, input_thd, constraints.harmonic_orders)
    return total_unit_vector_thd(spec, HgiParams(k), pi)


def _feasible(
    k: float, f_bw: float, input_thd: float,
    freqs: list[float], constraints: DesignConstraints,
) -> bool:
    return all(
        constraints.thd_ok(predicted_thd(k, f_bw, f, input_thd, constraints))
        for f in freqs
    )


def additive_settling(k: float, f_bw: float) -> float:
    """Worst-case additive settling time: HGI settling + 4/loop-bandwidth."""
    if k <= 0 or f_bw <= 0:
        raise ValueError("k and f_bw must be > 0")
    return settling_times(HgiParams(k))[2] + srf_settling_time(2 * math.pi * f_bw)


def _finish(
    method: str,
    k: float,
    f_bw: float,
    t_s_hgi: float,
    constraints: DesignConstraints,
    report: DesignReport,
) -> tuple[PllDesign, DesignReport]:
    pi = pi_from_bandwidth(f_bw, constraints.v_m, constraints.sample_period)
    t_s_srf = srf_settling_time(2 * math.pi * f_bw)
    design = PllDesign(
        k=k, f_bw=f_bw, pi=pi,
        t_s_hgi=t_s_hgi, t_s_srf=t_s_srf, t_sd=t_s_hgi + t_s_srf,
        method=method,
    )
    report.design = design
    for f in constraints.sweep_frequencies():
        for frac in (0.0, constraints.input_thd / 2, constraints.input_thd):
            report.thd_grid.append(
                (f, frac, predicted_thd(k, f_bw, f, frac, constraints))
            )
    return design, report


def mtsd_design(
    constraints: DesignConstraints = DesignConstraints(),
) -> tuple[PllDesign, DesignReport]:
    """Fastest design under the frequency-deviation THD constraint alone."""
    if constraints.input_thd != 0.0:
        raise ValueError("the deviation-only design requires input_thd = 0")
    report = DesignReport(method="mtsd")
    k_opt, t_s_hgi = hgi_mod.k_opt_search(
        constraints.k_range, constraints.k_step
    )
    freqs = constraints.sweep_frequencies()
    t_s = lambda f_bw: t_s_hgi + srf_settling_time(2 * math.pi * f_bw)
    chosen = None
    # downward scan: the THD constraint tightens with bandwidth
    for f_bw in constraints.bandwidth_grid()[::-1]:
        ok = _feasible(k_opt, f_bw, 0.0, freqs, constraints)
        report.swept.append((float(f_bw), k_opt, t_s(f_bw), ok))
        if ok:
            report.feasible_count += 1
            if chosen is None:
                chosen = float(f_bw)
    if chosen is None:
        raise InfeasibleDesignError(
            "constraints infeasible: no bandwidth meets the THD limit"
        )
    report.swept.reverse()
    return _finish("mtsd", k_opt, chosen, t_s_hgi, constraints, report)


def hc_mtsd_design(
    constraints: DesignConstraints = DesignConstraints(input_thd=0.05),
) -> tuple[PllDesign, DesignReport]:
    """Fastest design under joint deviation and input-harmonic constraints."""
    report = DesignReport(method="hc-mtsd")
    freqs = constraints.sweep_frequencies()
    ks = k_grid(*constraints.k_range, constraints.k_step)
    ts_hgi = {
        float(k): settling_times(HgiParams(float(k)), dt=2e-6)[2] for k in ks
    }
    best = None
    for f_bw in constraints.bandwidth_grid():
        f_bw = float(f_bw)
        feasible_ks = [
            float(k) for k in ks
            if _feasible(float(k), f_bw, constraints.input_thd, freqs, constraints)
        ]
        if not feasible_ks:
            report.swept.append((f_bw, math.nan, math.inf, False))
            continue
        report.feasible_count += len(feasible_ks)
        k_i = min(feasible_ks, key=lambda k: (ts_hgi[k], k))
        t_sd_i = ts_hgi[k_i] + srf_settling_time(2 * math.pi * f_bw)
        report.swept.append((f_bw, k_i, t_sd_i, True))
        # strict < keeps ties at the lower bandwidth
        if best is None or t_sd_i < best[2]:
            best = (f_bw, k_i, t_sd_i)
    if best is None:
        raise InfeasibleDesignError(
            "constraints infeasible: no (bandwidth, k) meets the THD limit"
        )
    f_bw, k_i, _ = best
    return _finish("hc-mtsd", k_i, f_bw, ts_hgi[k_i], constraints, report)


def save_design(design: PllDesign, path) -> None:
    with open(path, "w") as fh:
        json.dump(design.to_dict(), fh, indent=2)
        fh.write("\n")


def load_design(path) -> PllDesign:
    with open(path) as fh:
        return PllDesign.from_dict(json.load(fh))
