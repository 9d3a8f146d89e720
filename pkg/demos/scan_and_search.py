"""Preset search and parameter scans.

Reruns the seeded random search behind the causal presets, then scans
omega across the point where Delta1 changes sign.

Run: python3 demos/scan_and_search.py
"""

from hydrostab import Family, ModelParameters, ScanAxis, ScanSpec, run_scan, search_preset

for family in (Family.BDN19, Family.BDN18_FULLY_SYMMETRIC):
    res = search_preset(family)
    print(family.value, res.log, f"best margin {res.best_margin:.4f}")
    print("  ", res.params)

# omega = kappa + sigma - tau = 0.5 puts Delta1 at zero
base = ModelParameters.from_sigma(kappa=1, mu=1, nu=2, eta=0.3, sigma=1, tau=1.5, omega=0.5)
spec = ScanSpec((ScanAxis("omega", 0.45, 0.55, 11),), base, outputs=("theorem1_verdict", "delta2"))
print(run_scan(spec).to_csv())
