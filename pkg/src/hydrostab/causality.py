"""Causality of the principal part and the subcharacteristic condition.

Characteristic speeds come from ``B`` alone and are measured against the
speed of light, so this module works on the raw parameters: the ``cs``
rescaling used for dissipativity changes speeds by ``1/cs`` and would
distort the comparison with 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .hyperbolicity import (
    HyperbolicityClass,
    characteristic_quadratic,
    classify_hyperbolicity,
    companion_matrix,
    normalized_blocks,
    principal_discriminant,
    quadratic_roots,
)
from .model import ModelParameters, assemble_symbols

BOUNDARY_TOL = 1e-12


class NotApplicable(ValueError):
    pass


def _require_hyperbolic(params: ModelParameters):
    hyp = classify_hyperbolicity(params)
    if not hyp.holds:
        raise NotApplicable("characteristic speeds need a hyperbolic principal part")
    return hyp


def characteristic_speeds(params: ModelParameters) -> tuple[float, float, float]:
    """``(sqrt(eta/mu), sqrt(beta1), sqrt(beta2))``."""
    _require_hyperbolic(params)
    beta1, beta2 = quadratic_roots(*characteristic_quadratic(params))
    return (math.sqrt(params.eta / params.mu), math.sqrt(max(beta1, 0.0)), math.sqrt(max(beta2, 0.0)))


@dataclass
class SubcharacteristicReport:
    a_values: list[float]
    b_max: float
    within_range: bool
    w1pos_identity_residual: float
    applicable: bool = True

    def to_dict(self) -> dict:
        return {"a_values": list(self.a_values), "b_max": self.b_max,
                "within_range": self.within_range,
                "w1pos_identity_residual": self.w1pos_identity_residual,
                "applicable": self.applicable}


@dataclass
class CausalityReport:
    causal: bool
    shear_speed: float
    sound_speeds: tuple[float, float]
    b_max: float
    margins: dict[str, float]
    boundary: list[str] = field(default_factory=list)
    subcharacteristic: Optional[SubcharacteristicReport] = None
    symmetric_C: bool = False
    applicable: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "applicable": self.applicable,
            "causal": self.causal,
            "shear_speed": self.shear_speed,
            "sound_speeds": list(self.sound_speeds),
            "b_max": self.b_max,
            "margins": dict(self.margins),
            "boundary": list(self.boundary),
            "symmetric_C": self.symmetric_C,
            "subcharacteristic": self.subcharacteristic.to_dict() if self.subcharacteristic else None,
            "note": self.note,
        }


def causality_margins(params: ModelParameters) -> dict[str, float]:
    p = params
    K = principal_discriminant(p)
    km, ns = p.kappa * p.mu, p.nu * p.sigma
    return {"eta_le_mu": p.mu - p.eta, "ca4_upper": km + ns - K, "ca4_lower": km - ns}


def c_par_symmetric(params: ModelParameters, tol: float = 1e-12) -> bool:
    C = assemble_symbols(params).C_par(1.0)
    return bool(np.max(np.abs(C - C.T)) <= tol)


def check_symmetry_condition(params: ModelParameters) -> bool:
    """Sufficient condition for ``C = C^T``: the double-root class, or ``mu = nu`` and ``tau = omega``."""
    try:
        hclass = classify_hyperbolicity(params).hclass
    except ValueError:
        hclass = None
    if hclass is HyperbolicityClass.CLASS_II:
        return True
    return abs(params.mu - params.nu) < 1e-12 and abs(params.tau - params.omega) < 1e-12


def check_subcharacteristic(params: ModelParameters, n_samples: int = 20, seed: int = 0) -> SubcharacteristicReport:
    """Speeds ``a`` of the first-order part against ``[b_min, b_max]``.

    ``a`` are the eigenvalues of ``(Abar0)^(-1/2) Abar (Abar0)^(-1/2)`` on
    both blocks (``+-cs`` on the parallel block, 0 on the transverse one).
    Also evaluates ``det(-Bbar + a Cbar + a^2 I) = det(i calBbar - a I)`` at
    ``n_samples`` random ``a`` and reports the largest relative residual.
    """
    p = params
    if not (p.kappa > 0 and p.mu > 0):
        return SubcharacteristicReport([], math.nan, False, math.nan, applicable=False)
    par, _ = normalized_blocks(p)
    d = np.diag(1.0 / np.sqrt(np.diag(par["A0"])))
    a_par = np.linalg.eigvalsh(d @ par["A"] @ d)
    a_values = sorted([float(a) for a in a_par] + [0.0, 0.0])

    iB = 1j * companion_matrix(par["B"], par["C"])
    ev = np.linalg.eigvals(iB)
    b_max_par = float(np.max(np.abs(ev.real)))
    b_perp = math.sqrt(p.eta / p.mu) if p.eta > 0 else 0.0
    b_max = max(b_max_par, b_perp)
    within = all(-b_max - 1e-12 <= a <= b_max + 1e-12 for a in a_values)

    a = np.random.default_rng(seed).uniform(-3.0, 3.0, n_samples)[:, None, None]
    lhs = np.linalg.det(-par["B"] + a * par["C"] + a * a * np.eye(2))
    rhs = np.linalg.det(iB - a * np.eye(4))
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    worst = float(np.max(np.abs(lhs - rhs) / scale))
    return SubcharacteristicReport(a_values, b_max, within, worst)


def check_causality(params: ModelParameters) -> CausalityReport:
    """Causal iff ``eta <= mu`` and both sound-speed inequalities hold (non-strict)."""
    p = params
    margins = causality_margins(p)
    try:
        shear, s1, s2 = characteristic_speeds(p)
    except NotApplicable as exc:
        return CausalityReport(False, math.nan, (math.nan, math.nan), math.nan, margins,
                               applicable=False, note=str(exc), symmetric_C=c_par_symmetric(p))
    causal = all(v >= 0.0 for v in margins.values())
    boundary = [k for k, v in margins.items()
                if abs(v) <= BOUNDARY_TOL * max(1.0, abs(p.kappa * p.mu))]
    report = CausalityReport(
        causal=causal,
        shear_speed=shear,
        sound_speeds=(s1, s2),
        b_max=max(shear, s1, s2),
        margins=margins,
        boundary=boundary,
        subcharacteristic=check_subcharacteristic(p),
        symmetric_C=c_par_symmetric(p),
    )
    if not report.symmetric_C:
        report.note = "C is not symmetric; the subcharacteristic bound assumes C = C^T"
    return report
