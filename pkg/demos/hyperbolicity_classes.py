"""Classify the three hyperbolicity classes and confirm them numerically.

Run: python3 demos/hyperbolicity_classes.py
"""

from hydrostab import classify_hyperbolicity, load_preset

for name in ("bdn19-demo", "ft-c2", "degenerate-iii"):
    p = load_preset(name).params
    rep = classify_hyperbolicity(p, numeric=True)
    num = rep.numeric_confirmation
    speeds = sorted(round(float(z.real), 6) for z in num.parallel_eigenvalues)
    print(f"{name:16s} {rep.hclass.value:20s} roots of p: {rep.p_roots}")
    print(f"{'':16s} parallel speeds {speeds}, multiplicities {sorted(num.parallel_multiplicities)}, "
          f"semisimple={num.semisimple}")

# a negative shear coefficient turns the transverse speeds imaginary
bad = load_preset("bdn19-demo").params.replace(eta=-0.1)
print("eta = -0.1:", classify_hyperbolicity(bad).hclass.value)
