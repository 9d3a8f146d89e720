"""Routh-Hurwitz coefficients, the Delta decomposition and the D2 pairings.

Shows the extracted Delta1/Delta2, which candidate Delta2 reading it
matches, and what happens when omega is tuned so that Delta2 vanishes.

Run: python3 demos/dissipativity_deltas.py
"""

from scipy.optimize import brentq

from hydrostab import certify_theorem1, check_D2, delta_decomposition, load_preset, routh_hurwitz_coefficients

demo = load_preset("bdn19-demo").params
print("a0..a4 at alpha = 1:", routh_hurwitz_coefficients(demo, 1.0))
dec = delta_decomposition(demo)
print(f"Delta1 = {dec.delta1:g}, Delta2 = {dec.delta2:g}, matches {dec.matched_variant.value}")

d2 = check_D2(demo)
for pr in d2.pairings:
    print(f"  beta = {pr.beta:.6f}  pairing = {pr.pairing_value.real:+.6f}")
print("identity value:", d2.identity_value, "(sign", d2.identity_sign, "relative to Delta2)")

base = demo.replace(tau=0.2)
omega = brentq(lambda w: delta_decomposition(base.replace(omega=w)).delta2, 1.0, 2.0, xtol=1e-15)
tuned = base.replace(omega=omega)
print(f"\nDelta2 = 0 at omega = {omega:.15f}")
print("smallest pairing:", check_D2(tuned).min_abs_pairing)
print("verdict:", certify_theorem1(tuned).theorem1_verdict.value, certify_theorem1(tuned).failures)
