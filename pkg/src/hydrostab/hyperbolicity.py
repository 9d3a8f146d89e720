"""Second-order hyperbolicity of the principal part.

Two independent routes are provided: the closed-form classification by the
coefficient inequalities, and a numerical eigenstructure check of the
first-order companion matrix ``i*calB`` (real, semi-simple eigenvalues).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .model import ModelParameters, assemble_symbols


class HyperbolicityClass(str, Enum):
    CLASS_I = "ClassI_strict"
    CLASS_II = "ClassII_double"
    CLASS_III = "ClassIII_degenerate"
    NOT_HYPERBOLIC = "NotHyperbolic"


class DegeneratePrincipalPart(ValueError):
    pass


class AmbiguousClassification(ValueError):
    def __init__(self, matches):
        self.matches = list(matches)
        super().__init__("parameters match several classes within tolerance: "
                         + ", ".join(m.value for m in self.matches))


DEFAULT_TOL = 1e-9


def principal_discriminant(params: ModelParameters) -> float:
    """``(tau+mu)(nu+omega) - kappa*sigma - nu*mu``, the ``C1_1`` margin."""
    p = params
    return (p.tau + p.mu) * (p.nu + p.omega) - p.kappa * p.sigma - p.nu * p.mu


def characteristic_quadratic(params: ModelParameters) -> tuple[float, float]:
    """Coefficients ``(k, l)`` of ``p(beta) = beta^2 - k beta + l``.

    The roots ``beta`` are the squared characteristic speeds of the parallel
    block.
    """
    km = params.kappa * params.mu
    if km == 0.0:
        raise DegeneratePrincipalPart("kappa*mu = 0: the principal part has no B00 inverse")
    return principal_discriminant(params) / km, params.nu * params.sigma / km


def quadratic_roots(k: float, l: float) -> tuple[float, float]:
    """Real roots ``beta1 <= beta2`` of ``beta^2 - k beta + l``, NaN if complex."""
    scale = max(abs(k), math.sqrt(abs(l)))
    if scale == 0.0:
        return 0.0, 0.0
    # work with O(1) coefficients so nothing over- or underflows
    ks, ls = k / scale, l / scale / scale
    disc = ks * ks - 4.0 * ls
    if disc < 0:
        # a double root can round to a slightly negative discriminant
        if disc < -64 * np.finfo(float).eps * (ks * ks + 4.0 * abs(ls)):
            return math.nan, math.nan
        disc = 0.0
    big = 0.5 * (ks + math.copysign(math.sqrt(disc), ks))
    # the other root from the product avoids cancellation
    small = ls / big if big != 0 else 0.0
    return min(small, big) * scale, max(small, big) * scale


@dataclass
class NumericEigenReport:
    """Eigenstructure of ``i*calB`` on both blocks at unit wave number."""

    parallel_eigenvalues: np.ndarray
    perpendicular_eigenvalues: np.ndarray
    parallel_multiplicities: list[int]
    perpendicular_multiplicities: list[int]
    max_real_part_abs: float
    semisimple: bool
    all_real: bool
    b00_negative_definite: bool
    condition_number: float

    @property
    def eigenvalues(self) -> list[complex]:
        return list(self.parallel_eigenvalues) + list(self.perpendicular_eigenvalues)

    @property
    def multiplicities(self) -> list[int]:
        return self.parallel_multiplicities + self.perpendicular_multiplicities

    @property
    def hyperbolic(self) -> bool:
        return self.b00_negative_definite and self.all_real and self.semisimple

    def to_dict(self) -> dict:
        return {
            "parallel_eigenvalues": [[z.real, z.imag] for z in self.parallel_eigenvalues],
            "perpendicular_eigenvalues": [[z.real, z.imag] for z in self.perpendicular_eigenvalues],
            "parallel_multiplicities": self.parallel_multiplicities,
            "perpendicular_multiplicities": self.perpendicular_multiplicities,
            "max_real_part_abs": self.max_real_part_abs,
            "semisimple": self.semisimple,
            "all_real": self.all_real,
            "b00_negative_definite": self.b00_negative_definite,
            "condition_number": self.condition_number,
        }


@dataclass
class HyperbolicityReport:
    holds: bool
    hclass: HyperbolicityClass
    p_roots: tuple[float, float]
    margins: dict[str, float]
    physical: bool = True
    numeric_confirmation: Optional[NumericEigenReport] = None
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "holds": self.holds,
            "class": self.hclass.value,
            "p_roots": list(self.p_roots),
            "physical": self.physical,
            "margins": dict(self.margins),
            "notes": list(self.notes),
        }
        if self.numeric_confirmation is not None:
            out["numeric_confirmation"] = self.numeric_confirmation.to_dict()
        return out


def hyperbolicity_margins(params: ModelParameters) -> dict[str, float]:
    p = params
    K = principal_discriminant(p)
    return {
        "kappa_pos": p.kappa,
        "mu_pos": p.mu,
        "eta_pos": p.eta,
        "nusigma_pos": p.nu * p.sigma,
        "C1_1": K,
        "C1_2": K * K - 4.0 * p.nu * p.mu * p.kappa * p.sigma,
        # equalities kappa*sigma = nu*mu, tau+mu = 0, omega+nu = 0: >= -tol passes
        "C2_1a": -max(abs(p.kappa * p.sigma - p.nu * p.mu), abs(p.tau + p.mu), abs(p.omega + p.nu)),
        # kappa*sigma < 0
        "C2_1b": -p.kappa * p.sigma,
    }


def classify_hyperbolicity(params: ModelParameters, tol: float = DEFAULT_TOL,
                           numeric: bool = False) -> HyperbolicityReport:
    """Closed-form hyperbolicity class.

    Equalities of the double-root class are tested with absolute tolerance
    ``tol``; the strict class needs a discriminant ``C1_2 > tol`` so that
    the two classes cannot both match through rounding. Every other
    inequality is strict. Raises
    :class:`AmbiguousClassification` if more than one class matches.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    p = params
    margins = hyperbolicity_margins(p)
    km = p.kappa * p.mu
    if km != 0.0:
        roots = quadratic_roots(*characteristic_quadratic(p))
    else:
        roots = (math.nan, math.nan)

    hclass = HyperbolicityClass.NOT_HYPERBOLIC
    notes = []
    if p.kappa > 0 and p.mu > 0 and p.eta > 0:
        matches = []
        nusigma_pos = margins["nusigma_pos"] > 0
        # a discriminant within tol of zero is a double root, not the strict class
        if nusigma_pos and margins["C1_1"] > 0 and margins["C1_2"] > tol:
            matches.append(HyperbolicityClass.CLASS_I)
        if nusigma_pos and margins["C2_1a"] >= -tol and margins["C2_1b"] > 0:
            matches.append(HyperbolicityClass.CLASS_II)
        if abs(p.nu) < tol and abs(p.sigma) < tol and (p.tau + p.mu) * (p.omega + p.nu) > 0:
            matches.append(HyperbolicityClass.CLASS_III)
        if len(matches) > 1:
            raise AmbiguousClassification(matches)
        if matches:
            hclass = matches[0]
        if hclass is HyperbolicityClass.CLASS_II:
            # the double root is k/2; the quadratic formula would lose half the digits
            roots = (0.5 * characteristic_quadratic(p)[0],) * 2
    else:
        notes.append("B00 is not negative definite (kappa, mu > 0 fails) or eta <= 0")

    physical = hclass is not HyperbolicityClass.CLASS_III
    if not physical:
        notes.append("degenerate class: B_parallel vanishes, not physical; never certified")
    report = HyperbolicityReport(
        holds=hclass is not HyperbolicityClass.NOT_HYPERBOLIC,
        hclass=hclass,
        p_roots=roots,
        margins=margins,
        physical=physical,
        notes=notes,
    )
    if numeric and p.kappa > 0 and p.mu > 0:
        report.numeric_confirmation = numeric_eigenstructure(p, tol=1e-8)
    return report


def normalized_blocks(params: ModelParameters, xi: float = 1.0):
    """``(-B00)^(-1/2) X (-B00)^(-1/2)`` for X in (B, C, A0, A) on the parallel
    block, plus the scalar normalizations of the transverse block."""
    sym = assemble_symbols(params)
    d = np.diag(1.0 / np.sqrt(np.diag(-sym.B00_par)))
    norm = lambda m: d @ m @ d  # noqa: E731
    par = {
        "B": norm(sym.B_par(xi)),
        "C": norm(sym.C_par(xi)),
        "A0": norm(sym.A0_par),
        "A": norm(sym.A_par(xi)),
    }
    scale = 1.0 / (-sym.B00_perp)
    perp = {"B": sym.B_perp(xi) * scale, "C": 0.0, "A0": sym.A0_perp * scale, "A": 0.0}
    return par, perp


def companion_matrix(B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``calB = [[0, I], [-B, iC]]`` for normalized blocks ``B``, ``C``."""
    n = B.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[:n, n:] = np.eye(n)
    out[n:, :n] = -B
    out[n:, n:] = 1j * C
    return out


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    # values are sorted by real part first; single-linkage within tol
    order = np.lexsort((values.imag, values.real))
    clusters: list[list[int]] = []
    for idx in order:
        for cl in clusters:
            if any(abs(values[idx] - values[j]) <= tol * max(1.0, abs(values[j])) for j in cl):
                cl.append(int(idx))
                break
        else:
            clusters.append([int(idx)])
    return clusters


def _block_structure(M: np.ndarray, tol: float):
    evals = np.linalg.eigvals(M)
    # near-defective pairs split like sqrt(eps); cluster at the matching scale
    clusters = _cluster(evals, max(tol, 1e-7))
    scale = max(1.0, np.linalg.norm(M, 2))
    semisimple = True
    mults = []
    ordered = []
    for cl in clusters:
        m = len(cl)
        lam = np.mean(evals[cl])
        sv = np.linalg.svd(M - lam * np.eye(M.shape[0]), compute_uv=False)
        rank = int(np.sum(sv > max(tol, 1e-7) * scale))
        if rank != M.shape[0] - m:
            semisimple = False
        mults.append(m)
        ordered.extend([lam] * m)
    return np.array(ordered), mults, semisimple


def numeric_eigenstructure(params: ModelParameters, tol: float = 1e-8) -> NumericEigenReport:
    """Eigenvalues of ``i*calB`` on both blocks at ``xi = 1``.

    Semi-simplicity: for each eigenvalue cluster of size ``m`` the numerical
    rank of ``i*calB - lambda*I`` must be ``4 - m``. The symbols are
    homogeneous in ``xi`` so one wave number suffices.
    """
    p = params
    negdef = p.kappa > 0 and p.mu > 0
    if not negdef:
        nan4 = np.full(4, complex(math.nan, math.nan))
        return NumericEigenReport(nan4, nan4, [], [], math.nan, False, False, False, math.inf)
    par, perp = normalized_blocks(p)
    iB_par = 1j * companion_matrix(par["B"], par["C"])
    iB_perp = 1j * companion_matrix(perp["B"] * np.eye(2), np.zeros((2, 2)))
    ev_par, m_par, ss_par = _block_structure(iB_par, tol)
    ev_perp, m_perp, ss_perp = _block_structure(iB_perp, tol)
    all_ev = np.concatenate([ev_par, ev_perp])
    scale = max(1.0, float(np.max(np.abs(all_ev))))
    max_imag = float(np.max(np.abs(all_ev.imag)))
    w, v = np.linalg.eig(iB_par)
    cond = float(np.linalg.cond(v))
    return NumericEigenReport(
        parallel_eigenvalues=ev_par,
        perpendicular_eigenvalues=ev_perp,
        parallel_multiplicities=m_par,
        perpendicular_multiplicities=m_perp,
        max_real_part_abs=max_imag,
        semisimple=ss_par and ss_perp,
        all_real=max_imag <= max(tol, 1e-7) * scale,
        b00_negative_definite=True,
        condition_number=cond,
    )
