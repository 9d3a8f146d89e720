"""Dispersion branches over wave number, for a stable and an unstable parameter set.

Run: python3 demos/dispersion_branches.py
"""

from hydrostab import delta_decomposition, load_preset, scan_branches

demo = load_preset("bdn19-demo").params
unstable = demo.replace(tau=0.2, omega=1.5)
for label, p in (("bdn19-demo", demo), ("Delta2 < 0", unstable)):
    scan = scan_branches(p, 1e-3, 1e3, 61)
    print(f"{label}: Delta2 = {delta_decomposition(p).delta2:+.3f}, max Re lambda = {scan.max_real_part:+.3e}")
    for br in scan.branches:
        print(f"  branch {br.branch_id} ({br.block.value:13s}) Re lambda at xi=1e-3: {br.lambdas[0].real:+.3e}, "
              f"at xi=1e3: {br.lambdas[-1].real:+.3e}")
