"""Fit the L2 decay exponent of Gaussian data for the stable presets.

The linearized heat-kernel rate is (1 + t)^(-3/4).

Run: python3 demos/decay_rate.py
"""

from hydrostab import InitialProfile, decay_norm_trace, load_preset

for name in ("bdn19-demo", "bdn19-causal", "bdn18-symmetric", "ft-c2"):
    for amps in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)):
        trace = decay_norm_trace(load_preset(name).params, InitialProfile(amplitudes=amps))
        print(f"{name:16s} amplitudes={amps}  exponent={trace.fitted_exponent:+.4f}")
