"""Dissipativity checks D1-D3 and the strict-stability verdict.

Everything here works on the ``cs = 1`` rescaled parameters; margins are
reported in those units.

The D2 closed form pairs the left eigenvector with third entry
``-i d beta_s`` against the right eigenvector, uses
``(tau+mu)(omega+nu)`` in ``m`` and in the prefactor, and reproduces
``-Delta2`` with the all-sigma form of ``Delta2``. With these,
``L_s calA R_s = (beta_s/mu) q(beta_s)`` exactly. ``Delta2`` itself is
always obtained by polynomial coefficient extraction and D2 from numerical
eigenvector pairings; the closed forms are evaluated only as cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg
from numpy.polynomial import Polynomial

from .hyperbolicity import (
    DEFAULT_TOL,
    HyperbolicityClass,
    HyperbolicityReport,
    characteristic_quadratic,
    classify_hyperbolicity,
    companion_matrix,
    normalized_blocks,
    principal_discriminant,
    quadratic_roots,
)
from .model import ModelParameters, rescale_to_unit_cs

TOL_PAIRING = 1e-8


class Theorem1Verdict(str, Enum):
    STABLE_C1 = "StableC1"
    STABLE_C2 = "StableC2"
    NOT_CERTIFIED = "NotCertified"


class Variant(str, Enum):
    SIGMA = "SigmaVariant"
    ETA = "EtaVariant"
    NEITHER = "Neither"


@dataclass
class Check:
    """One inequality: ``value`` compared against ``threshold``."""

    name: str
    value: float
    threshold: float = 0.0
    strict: bool = True
    passed: Optional[bool] = None
    applicable: bool = True
    note: str = ""

    def __post_init__(self):
        if self.passed is None and self.applicable:
            if self.strict:
                self.passed = bool(self.value > self.threshold)
            else:
                self.passed = bool(self.value >= self.threshold)

    def to_dict(self) -> dict:
        out = {"value": self.value, "threshold": self.threshold, "strict": self.strict,
               "pass": self.passed}
        if not self.applicable:
            out["applicable"] = False
        if self.note:
            out["note"] = self.note
        return out


def _not_applicable(name: str, why: str) -> Check:
    return Check(name, math.nan, passed=None, applicable=False, note=why)


# ---------------------------------------------------------------------------
# D1: first-order damping

def check_D1(params: ModelParameters) -> Check:
    """``C1_3`` margin: ``cs^-2 (omega+tau) - kappa - cs^-4 sigma > 0`` on rescaled parameters."""
    r = rescale_to_unit_cs(params)
    return Check("D1", r.omega + r.tau - r.kappa - r.sigma)


def w1_restriction(params: ModelParameters, unit: bool = True) -> np.ndarray:
    """Restrictions of ``W1 + W1^*`` (with ``S = I``) to the eigenvectors of ``W0``.

    Built numerically from the normalized parallel symbols at ``xi = 1``.
    With unit eigenvectors the closed form is ``sigma + kappa - (omega + tau)``
    on both eigenspaces; ``unit=False`` scales them to max-norm 1, i.e.
    ``(+-1, 1)``, which doubles the value.
    """
    r = rescale_to_unit_cs(params)
    par, _ = normalized_blocks(r)
    A0, A, B, C = par["A0"], par["A"], par["B"], par["C"]
    A0_inv = np.linalg.inv(A0)
    h = scipy.linalg.sqrtm(A0_inv).real  # (A0bar)^(-1/2)
    W0 = h @ A @ h
    W1 = h @ (-B + A0_inv @ A @ A0_inv @ A + C @ A0_inv @ A) @ h
    _, vecs = np.linalg.eigh(W0)
    if not unit:
        vecs = vecs / np.abs(vecs).max(axis=0)
    sym = W1 + W1.conj().T
    return np.array([vecs[:, j].conj() @ sym @ vecs[:, j] for j in range(vecs.shape[1])]).real


# ---------------------------------------------------------------------------
# D3: Routh-Hurwitz form

def routh_hurwitz_coefficients(params: ModelParameters, alpha: float) -> tuple[float, ...]:
    """``(a0, a1, a2, a3, a4)`` of the dispersion quartic at ``alpha = xi^2`` (rescaled)."""
    r = rescale_to_unit_cs(params)
    K = principal_discriminant(r)
    return (
        alpha * alpha * r.nu * r.sigma + alpha,
        alpha * (r.tau + r.omega + r.mu - r.sigma),
        alpha * K + 1.0,
        r.kappa + r.mu,
        r.kappa * r.mu,
    )


def routh_hurwitz_delta(params: ModelParameters, alpha: float) -> float:
    a0, a1, a2, a3, a4 = routh_hurwitz_coefficients(params, alpha)
    return a1 * a2 * a3 - (a1 * a1 * a4 + a3 * a3 * a0)


def delta2_forms(params: ModelParameters) -> dict[Variant, float]:
    """The two candidate readings of ``Delta2`` (rescaled): the first factor
    ``(tau+omega+mu - X)`` with ``X = sigma`` or ``X = eta``."""
    r = rescale_to_unit_cs(params)
    K = principal_discriminant(r)
    S = r.kappa + r.mu
    base = r.tau + r.omega + r.mu
    tail = -r.kappa * r.mu * (base - r.sigma) ** 2 - S * S * r.nu * r.sigma
    return {
        Variant.SIGMA: S * (base - r.sigma) * K + tail,
        Variant.ETA: S * (base - r.eta) * K + tail,
    }


def match_variant(value: float, forms: dict[Variant, float], rtol: float = 1e-9,
                  up_to_sign: bool = False) -> Variant:
    for variant in (Variant.SIGMA, Variant.ETA):
        ref = forms[variant]
        scale = max(abs(value), abs(ref), 1e-300)
        if abs(value - ref) <= rtol * scale:
            return variant
        if up_to_sign and abs(value + ref) <= rtol * scale:
            return variant
    return Variant.NEITHER


@dataclass
class DeltaDecomposition:
    delta1: float
    delta2: float
    residual: float  # size of the alpha^0 and alpha^3+ coefficients, must vanish
    matched_variant: Variant
    forms: dict[Variant, float]

    def to_dict(self) -> dict:
        return {
            "delta1": self.delta1,
            "delta2": self.delta2,
            "residual": self.residual,
            "matched_variant": self.matched_variant.value,
            "sigma_form": self.forms[Variant.SIGMA],
            "eta_form": self.forms[Variant.ETA],
        }


def delta_decomposition(params: ModelParameters) -> DeltaDecomposition:
    """``Delta(alpha) = alpha (Delta1 + alpha Delta2)`` by exact coefficient extraction."""
    r = rescale_to_unit_cs(params)
    K = principal_discriminant(r)
    alpha = Polynomial([0.0, 1.0])
    a0 = r.nu * r.sigma * alpha ** 2 + alpha
    a1 = (r.tau + r.omega + r.mu - r.sigma) * alpha
    a2 = K * alpha + 1.0
    a3 = r.kappa + r.mu
    a4 = r.kappa * r.mu
    delta = a1 * a2 * a3 - (a1 * a1 * a4 + a3 * a3 * a0)
    coef = np.zeros(max(4, len(delta.coef)))
    coef[: len(delta.coef)] = delta.coef
    d1, d2 = float(coef[1]), float(coef[2])
    residual = float(abs(coef[0]) + np.sum(np.abs(coef[3:])))
    forms = delta2_forms(params)
    return DeltaDecomposition(d1, d2, residual, match_variant(d2, forms), forms)


@dataclass
class D3Result:
    passed: Optional[bool]
    delta1: Check
    delta2: Check
    positivity: dict[str, float]
    applicable: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        out = {"pass": self.passed, "applicable": self.applicable,
               "D311": self.delta1.to_dict(), "D321": self.delta2.to_dict(),
               "positivity": dict(self.positivity)}
        if self.note:
            out["note"] = self.note
        return out


def check_D3(params: ModelParameters, hyperbolicity: Optional[HyperbolicityReport] = None) -> D3Result:
    """Routh-Hurwitz form of D3: ``Delta1 >= 0``, ``Delta2 >= 0``, one strict."""
    r = rescale_to_unit_cs(params)
    positivity = {"a0_nusigma": r.nu * r.sigma, "a2_C1_1": principal_discriminant(r),
                  "a3": r.kappa + r.mu, "a4": r.kappa * r.mu}
    hyp = hyperbolicity or classify_hyperbolicity(params)
    if hyp.hclass is not HyperbolicityClass.CLASS_I:
        why = f"requires ClassI hyperbolicity, got {hyp.hclass.value}"
        return D3Result(None, _not_applicable("D311", why), _not_applicable("D321", why),
                        positivity, applicable=False, note=why)
    dec = delta_decomposition(params)
    c1 = Check("D311", dec.delta1, strict=False)
    c2 = Check("D321", dec.delta2, strict=False)
    one_strict = dec.delta1 > 0 or dec.delta2 > 0
    prereq = all(v > 0 for v in positivity.values())
    return D3Result(bool(c1.passed and c2.passed and one_strict and prereq), c1, c2, positivity)


# ---------------------------------------------------------------------------
# D2: eigenvector pairings

@dataclass
class EigenPairing:
    eigenvalue: complex
    beta: float
    pairing_value: complex        # L calA R with L R = 1
    closed_form_pairing: Optional[float]  # (beta/mu) q(beta) / (L R) from the closed-form vectors
    closed_form_q: Optional[float]        # q(beta) with (tau+mu)(omega+nu)
    swapped_q: Optional[float]            # q(beta) with the swapped (tau+nu)(omega+mu)
    matched_variant: Variant

    def to_dict(self) -> dict:
        return {
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "beta": self.beta,
            "pairing_value": [self.pairing_value.real, self.pairing_value.imag],
            "closed_form_pairing": self.closed_form_pairing,
            "closed_form_q": self.closed_form_q,
            "swapped_q": self.swapped_q,
            "matched_variant": self.matched_variant.value,
        }


@dataclass
class D2Result:
    passed: Optional[bool]
    pairings: list[EigenPairing]
    min_abs_pairing: float
    identity_value: Optional[float]     # prefactor * ((l+n)^2 + (m-k)(m l + k n)), corrected
    swapped_identity_value: Optional[float]
    matched_variant: Variant
    identity_sign: Optional[int]        # identity_value / Delta2-form
    applicable: bool = True
    numeric_only: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "applicable": self.applicable,
            "numeric_only": self.numeric_only,
            "min_abs_pairing": self.min_abs_pairing,
            "identity_value": self.identity_value,
            "swapped_identity_value": self.swapped_identity_value,
            "matched_variant": self.matched_variant.value,
            "identity_sign": self.identity_sign,
            "pairings": [p.to_dict() for p in self.pairings],
            "note": self.note,
        }


def _pairing_constants(r: ModelParameters, swapped: bool = False):
    k, m, n, s, t, w = r.kappa, r.mu, r.nu, r.sigma, r.tau, r.omega
    cross = (t + n) * (w + m) if swapped else (t + m) * (w + n)
    kk, ll = characteristic_quadratic(r)
    mm = (t + w + m - n - cross / k) / k
    nn = (t + w + m) * n / k ** 2
    return kk, ll, mm, nn, cross


def pairing_identity(params: ModelParameters, swapped: bool = False) -> float:
    """``kappa^5 mu^2 / (nu X) * ((l+n)^2 + (m-k)(m l + k n))``.

    ``X = (tau+mu)(omega+nu)``, or the swapped ``(tau+nu)(omega+mu)`` when
    ``swapped`` is set (which is also used inside ``m``).
    """
    r = rescale_to_unit_cs(params)
    kk, ll, mm, nn, cross = _pairing_constants(r, swapped)
    resultant = (ll + nn) ** 2 + (mm - kk) * (mm * ll + kk * nn)
    return r.kappa ** 5 * r.mu ** 2 / (r.nu * cross) * resultant


def pairing_operator(params: ModelParameters) -> np.ndarray:
    """``calA = [[0, 0], [-i Abar, -Abar0]]`` on the parallel block (rescaled, xi = 1)."""
    par, _ = normalized_blocks(rescale_to_unit_cs(params))
    out = np.zeros((4, 4), dtype=complex)
    out[2:, :2] = -1j * par["A"]
    out[2:, 2:] = -par["A0"]
    return out


def closed_form_eigenvectors(params: ModelParameters, b: float):
    """Left/right eigenvectors of ``calBbar`` for the eigenvalue ``i b``.

    Requires ``(tau+mu)(omega+nu) != 0``.
    """
    r = rescale_to_unit_cs(params)
    km = math.sqrt(r.kappa * r.mu)
    fa = (r.tau + r.mu) / km
    fb = r.nu / r.kappa
    fd = (r.omega + r.nu) / km
    beta = b * b
    left = np.array([-fd * fb * b, (fd * fa - fb - beta) * beta, -1j * fd * beta, 1j * (beta + fb) * b])
    right = np.array([fa * b, -(fb + beta), 1j * fa * beta, -1j * (fb + beta) * b])
    return left, right


def check_D2(params: ModelParameters, tol_pairing: float = TOL_PAIRING,
             hyperbolicity: Optional[HyperbolicityReport] = None) -> D2Result:
    """D2 from numerically computed eigenvector pairings.

    For each of the four simple eigenvalues ``+-i sqrt(beta_s)`` of
    ``calBbar`` the pairing ``L calA R`` (with ``L R = 1``) is the constant
    term of the high-frequency expansion of the corresponding dispersion
    root; D2 asks that none vanish.
    """
    hyp = hyperbolicity or classify_hyperbolicity(params)
    if hyp.hclass is not HyperbolicityClass.CLASS_I:
        return D2Result(None, [], math.nan, None, None, Variant.NEITHER, None, applicable=False,
                        note=f"requires ClassI hyperbolicity (simple roots), got {hyp.hclass.value}")
    r = rescale_to_unit_cs(params)
    par, _ = normalized_blocks(r)
    calB = companion_matrix(par["B"], par["C"])
    calA = pairing_operator(r)
    evals, R = scipy.linalg.eig(calB)
    L = np.linalg.inv(R)  # rows are left eigenvectors with L R = I

    cross = (r.tau + r.mu) * (r.omega + r.nu)
    closed = cross != 0.0
    forms = delta2_forms(params)
    identity = swapped_identity = None
    variant = Variant.NEITHER
    sign = None
    if closed:
        identity = pairing_identity(params)
        variant = match_variant(identity, forms, up_to_sign=True)
        if variant is not Variant.NEITHER and forms[variant] != 0:
            sign = 1 if identity * forms[variant] > 0 else -1
        swapped_cross = (r.tau + r.nu) * (r.omega + r.mu)
        if swapped_cross != 0.0:
            swapped_identity = pairing_identity(params, swapped=True)

    pairings = []
    for j, lam in enumerate(evals):
        value = complex(L[j] @ calA @ R[:, j])
        b = float(lam.imag)
        beta = b * b
        cf_pair = cf_q = pr_q = None
        if closed:
            kk, ll, mm, nn, _ = _pairing_constants(r)
            cf_q = -beta ** 2 + mm * beta + nn
            lv, rv = closed_form_eigenvectors(r, b)
            cf_pair = float(((beta / r.mu) * cf_q / (lv @ rv)).real)
            if swapped_identity is not None:
                _, _, mp, _, _ = _pairing_constants(r, swapped=True)
                pr_q = -beta ** 2 + mp * beta + nn
        pairings.append(EigenPairing(complex(lam), beta, value, cf_pair, cf_q, pr_q, variant))

    min_abs = min(abs(p.pairing_value) for p in pairings)
    return D2Result(
        passed=bool(min_abs > tol_pairing),
        pairings=pairings,
        min_abs_pairing=min_abs,
        identity_value=identity,
        swapped_identity_value=swapped_identity,
        matched_variant=variant,
        identity_sign=sign,
        numeric_only=not closed,
        note="" if closed else "(tau+mu)(omega+nu) = 0: closed forms unavailable, numeric pairing only",
    )


def high_frequency_damping(params: ModelParameters) -> list[float]:
    """Constant terms ``c_s`` of ``lambda = +-i xi sqrt(beta_s) + c_s + O(1/xi)``.

    Independent closed form ``(S beta - P) / (2 (K - 2 kappa mu beta))`` from
    balancing the ``xi^3`` terms of the dispersion quartic (rescaled).
    """
    r = rescale_to_unit_cs(params)
    K = principal_discriminant(r)
    S = r.kappa + r.mu
    P = r.tau + r.omega + r.mu - r.sigma
    betas = quadratic_roots(*characteristic_quadratic(r))
    return [(S * b - P) / (2.0 * (K - 2.0 * r.kappa * r.mu * b)) for b in betas]


# ---------------------------------------------------------------------------
# (C2) branch

def check_C2_dissipativity(params: ModelParameters,
                           hyperbolicity: Optional[HyperbolicityReport] = None) -> Check:
    """Double-root damping ``sigma + cs^2 mu < 0`` with the matrix form as a cross-check.

    The matrix form asks ``sqrt(sigma_t) Abar0 +- Abar`` to be positive
    definite, ``sigma_t = -sigma/mu``.
    """
    hyp = hyperbolicity or classify_hyperbolicity(params)
    if hyp.hclass is not HyperbolicityClass.CLASS_II:
        return _not_applicable("C2_2", f"requires ClassII hyperbolicity, got {hyp.hclass.value}")
    r = rescale_to_unit_cs(params)
    check = Check("C2_2", -(r.sigma + r.mu))
    matrix_ok = c2_matrix_form(params)
    if matrix_ok != check.passed:
        check.note = "scalar and matrix forms disagree (boundary case)"
    else:
        check.note = "matrix form agrees"
    return check


def c2_matrix_form(params: ModelParameters) -> bool:
    r = rescale_to_unit_cs(params)
    par, _ = normalized_blocks(r)
    sig_t = -r.sigma / r.mu
    if sig_t < 0:
        return False
    return all(np.linalg.eigvalsh(math.sqrt(sig_t) * par["A0"] + sgn * par["A"]).min() > 0
               for sgn in (1.0, -1.0))


# ---------------------------------------------------------------------------
# combined verdict

def theorem1_inequalities(params: ModelParameters) -> dict[str, float]:
    """The four strict margins ``C1_1``..``C1_4`` on rescaled parameters."""
    r = rescale_to_unit_cs(params)
    K = principal_discriminant(r)
    return {
        "C1_1": K,
        "C1_2": K * K - 4.0 * r.nu * r.mu * r.kappa * r.sigma,
        "C1_3": r.omega + r.tau - r.kappa - r.sigma,
        "C1_4": delta2_forms(params)[Variant.SIGMA],
    }


@dataclass
class DissipativityReport:
    hyperbolicity: HyperbolicityReport
    theorem1_verdict: Theorem1Verdict
    positivity: dict[str, Check]
    c1: dict[str, Check]
    d1: Check
    d2: D2Result
    d3: D3Result
    c2_branch: Check
    deltas: Optional[DeltaDecomposition]
    failures: list[str] = field(default_factory=list)
    rh_trace: Optional[list[tuple[float, float]]] = None

    def to_dict(self) -> dict:
        out = {
            "theorem1_verdict": self.theorem1_verdict.value,
            "failures": list(self.failures),
            "positivity": {k: v.to_dict() for k, v in self.positivity.items()},
            "C1": {k: v.to_dict() for k, v in self.c1.items()},
            "D1": self.d1.to_dict(),
            "D2": self.d2.to_dict(),
            "D3": self.d3.to_dict(),
            "C2_2": self.c2_branch.to_dict(),
            "deltas": self.deltas.to_dict() if self.deltas else None,
        }
        if self.rh_trace is not None:
            out["rh_trace"] = [list(pt) for pt in self.rh_trace]
        return out


def certify_theorem1(params: ModelParameters, tol: float = DEFAULT_TOL,
                     rh_alphas=None, tol_pairing: float = TOL_PAIRING) -> DissipativityReport:
    """Compose hyperbolicity with the branch-appropriate dissipativity checks.

    ``StableC1`` iff ClassI and ``kappa, mu, eta, nu*sigma > 0`` and
    ``C1_1``..``C1_4`` hold strictly; ``StableC2`` iff ClassII and the double-root damping margin holds
    strictly. Everything else is ``NotCertified`` with a failure list.
    """
    hyp = classify_hyperbolicity(params, tol=tol)
    r = rescale_to_unit_cs(params)
    positivity = {
        name: Check(name, value)
        for name, value in (("kappa_pos", r.kappa), ("mu_pos", r.mu), ("eta_pos", r.eta),
                            ("nusigma_pos", r.nu * r.sigma))
    }
    c1 = {name: Check(name, value) for name, value in theorem1_inequalities(params).items()}
    failures = [name for name, c in positivity.items() if not c.passed]

    d3 = check_D3(params, hyp)
    if hyp.hclass is HyperbolicityClass.CLASS_I:
        d1 = check_D1(params)
        d2 = check_D2(params, tol_pairing=tol_pairing, hyperbolicity=hyp) if d3.passed else \
            D2Result(None, [], math.nan, None, None, Variant.NEITHER, None, applicable=False,
                     note="D3 fails; the D2 criterion assumes D3")
        deltas = delta_decomposition(params)
    else:
        why = f"ClassI only, got {hyp.hclass.value}"
        d1 = _not_applicable("D1", why)
        d2 = D2Result(None, [], math.nan, None, None, Variant.NEITHER, None, applicable=False, note=why)
        deltas = None
    c2 = check_C2_dissipativity(params, hyp)

    if hyp.hclass is HyperbolicityClass.CLASS_I:
        failures += [name for name, c in c1.items() if not c.passed]
        verdict = Theorem1Verdict.NOT_CERTIFIED if failures else Theorem1Verdict.STABLE_C1
        if verdict is Theorem1Verdict.STABLE_C1 and not (d1.passed and d2.passed and d3.passed):
            # cannot happen analytically; surfaces a numerical inconsistency
            failures.append("numeric_D_consistency")
            verdict = Theorem1Verdict.NOT_CERTIFIED
    elif hyp.hclass is HyperbolicityClass.CLASS_II:
        if not c2.passed:
            failures.append("C2_2")
        verdict = Theorem1Verdict.NOT_CERTIFIED if failures else Theorem1Verdict.STABLE_C2
    else:
        failures.append("hyperbolicity" if hyp.hclass is HyperbolicityClass.NOT_HYPERBOLIC
                        else "degenerate_class_III")
        verdict = Theorem1Verdict.NOT_CERTIFIED

    trace = None
    if rh_alphas is not None:
        trace = [(float(a), routh_hurwitz_delta(params, float(a))) for a in rh_alphas]
    return DissipativityReport(hyp, verdict, positivity, c1, d1, d2, d3, c2, deltas, failures, trace)
