"""Transient response and dc-offset immunity.

Two experiments:

* a 90-degree phase jump, showing the estimated frequency settling back
  within the worst-case additive settling bound for both designs;
* a 10% dc offset on the input, contrasting the high-pass quadrature
  channel (no fundamental-frequency ripple on the frequency estimate)
  with the classic low-pass variant (large 50 Hz ripple).
"""

import math

from hgipll import (
    GridSignalSpec,
    HgiParams,
    PllDesign,
    TimedEvent,
    pi_from_bandwidth,
    run,
    settling_times,
    spectral_line,
    srf_settling_time,
    transient_metrics,
)


def make_design(k, f_bw, method):
    pi = pi_from_bandwidth(f_bw)
    t_hgi = settling_times(HgiParams(k))[2]
    t_srf = srf_settling_time(2 * math.pi * f_bw)
    return PllDesign(k=k, f_bw=f_bw, pi=pi, t_s_hgi=t_hgi, t_s_srf=t_srf,
                     t_sd=t_hgi + t_srf, method=method)


print("=== pi/2 phase jump at t = 0.5 s ===")
jump = GridSignalSpec(events=(TimedEvent(0.5, "phase_jump", math.pi / 2),))
for d in (make_design(1.56, 55.0, "deviation-only"),
          make_design(1.56, 29.5, "harmonic-aware")):
    trace = run(jump, d, 1.0)
    m = transient_metrics(trace, event_time=0.5)
    print(f"{d.method:>15}: settled in {m.settle_time * 1e3:5.1f} ms "
          f"(bound {d.t_sd * 1e3:.1f} ms), "
          f"peak excursion {m.peak_freq_excursion:.2f} Hz")

print("\n=== 10% dc offset on the input ===")
dc = GridSignalSpec(dc_offset=0.1)
d = make_design(1.56, 55.0, "deviation-only")
for topology in ("hgi", "basic_sogi"):
    trace = run(dc, d, 1.0, topology=topology)
    tail = trace.f_e[trace.steady_slice()]
    line = spectral_line(tail, 50.0, trace.sample_period)
    print(f"{topology:>10}: 50 Hz ripple on the frequency estimate = "
          f"{line:.4f} Hz")
print("the high-pass quadrature channel blocks the offset entirely; the")
print("low-pass variant lets it through as a fundamental-frequency ripple.")
