"""Characteristic speeds, causality and the subcharacteristic check for every preset.

Run: python3 demos/causality_speeds.py
"""

from hydrostab import PRESETS, check_causality

for name, preset in PRESETS.items():
    rep = check_causality(preset.params)
    if not rep.applicable:
        print(f"{name:16s} not applicable: {rep.note}")
        continue
    sub = rep.subcharacteristic
    print(f"{name:16s} causal={rep.causal!s:5s} b_max={rep.b_max:.6f} "
          f"a={sub.a_values} within={sub.within_range} boundary={rep.boundary}")
