"""Dispersion relation roots and continuity-tracked branches over wave number."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hyperbolicity import principal_discriminant
from .model import ModelParameters

ROOT_RTOL = 1e-9


class NumericalError(RuntimeError):
    pass


class Block(str, Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


def dispersion_coefficients(params: ModelParameters, xi) -> np.ndarray:
    """Quartic coefficients, highest power first, for each ``xi`` (shape ``(..., 5)``).

    ``kappa mu l^4 + (kappa + mu/cs^2) l^3 + (xi^2 K + 1/cs^2) l^2
    + xi^2 (tau+omega+mu - sigma/cs^2) l + nu sigma xi^4 + xi^2``
    """
    p = params
    xi = np.asarray(xi, dtype=float)
    x2 = xi * xi
    inv_c2 = p.cs ** -2
    K = principal_discriminant(p)
    ones = np.ones_like(x2)
    return np.stack([
        p.kappa * p.mu * ones,
        (p.kappa + inv_c2 * p.mu) * ones,
        x2 * K + inv_c2,
        x2 * (p.tau + p.omega + p.mu - inv_c2 * p.sigma),
        p.nu * p.sigma * x2 * x2 + x2,
    ], axis=-1)


def perpendicular_coefficients(params: ModelParameters, xi) -> np.ndarray:
    """``mu l^2 + l + eta xi^2`` coefficients, highest power first."""
    xi = np.asarray(xi, dtype=float)
    ones = np.ones_like(xi)
    return np.stack([params.mu * ones, ones, params.eta * xi * xi], axis=-1)


def polynomial_roots(coeffs: np.ndarray, scale=None) -> np.ndarray:
    """Roots of many polynomials at once via batched companion eigenvalues.

    ``coeffs`` has shape ``(N, d+1)`` with nonzero leading entries. ``scale``
    (shape ``(N,)``) substitutes ``l = scale * z`` first, which keeps the
    coefficients of size O(1) when the roots grow like ``xi``.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    n, deg = c.shape[0], c.shape[1] - 1
    s = np.ones(n) if scale is None else np.asarray(scale, dtype=float)
    powers = s[:, None] ** np.arange(deg, -1, -1)[None, :]
    c = c * powers
    c = c / c[:, :1]
    comp = np.zeros((n, deg, deg), dtype=complex)
    comp[:, 0, :] = -c[:, 1:]
    idx = np.arange(deg - 1)
    comp[:, idx + 1, idx] = 1.0
    z = np.linalg.eigvals(comp)
    return _polish(c, z) * s[:, None]


def _polish(c: np.ndarray, z: np.ndarray, steps: int = 2) -> np.ndarray:
    # Newton steps on the scaled monic polynomial; keep a step only if it helps
    deg = c.shape[1] - 1
    dc = c[:, :-1] * np.arange(deg, 0, -1)[None, :]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(steps):
            f = _horner(c, z)
            trial = z - f / _horner(dc, z)
            ok = np.isfinite(trial) & (np.abs(_horner(c, trial)) < np.abs(f))
            z = np.where(ok, trial, z)
    return z


def _horner(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z) + c[:, :1]
    for k in range(1, c.shape[1]):
        out = out * z + c[:, k:k + 1]
    return out


def relative_residual(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """``|p(l)| / sum |a_k| |l|^k`` for each root."""
    c = np.atleast_2d(coeffs)
    r = np.atleast_2d(roots)
    deg = c.shape[1] - 1
    powers = r[:, :, None] ** np.arange(deg, -1, -1)[None, None, :]
    terms = c[:, None, :] * powers
    return np.abs(terms.sum(-1)) / np.maximum(np.abs(terms).sum(-1), 1e-300)


@dataclass
class DispersionRoots:
    xi: float
    parallel: np.ndarray
    perpendicular: np.ndarray


def dispersion_roots(params: ModelParameters, xi: float) -> DispersionRoots:
    """Four parallel and two transverse roots at wave number ``xi``."""
    if params.kappa * params.mu == 0.0:
        raise ValueError("kappa*mu = 0: the quartic degenerates")
    par, perp = _roots_on_grid(params, np.array([float(xi)]))
    return DispersionRoots(float(xi), par[0], perp[0])


def _roots_on_grid(params: ModelParameters, xi: np.ndarray):
    cpar = dispersion_coefficients(params, xi)
    cperp = perpendicular_coefficients(params, xi)
    scale = np.maximum(1.0, xi)
    par = polynomial_roots(cpar, scale)
    perp = polynomial_roots(cperp, scale)
    bad = (relative_residual(cpar, par).max(axis=1) > ROOT_RTOL) | \
          (relative_residual(cperp, perp).max(axis=1) > ROOT_RTOL)
    if np.any(bad) or not (np.all(np.isfinite(par)) and np.all(np.isfinite(perp))):
        where = xi[np.argmax(bad)] if np.any(bad) else xi[0]
        raise NumericalError(f"dispersion root back-substitution failed at xi={where!r}")
    return par, perp


def max_growth_rate(params: ModelParameters, xi_grid) -> float:
    """Largest ``Re lambda`` over both blocks and the grid."""
    xi = np.asarray(xi_grid, dtype=float)
    par, perp = _roots_on_grid(params, xi)
    return float(max(par.real.max(), perp.real.max()))


def default_xi_grid(n: int = 200, lo: float = 1e-4, hi: float = 1e4) -> np.ndarray:
    return np.logspace(np.log10(lo), np.log10(hi), n)


@dataclass
class DispersionBranch:
    xi_grid: np.ndarray
    lambdas: np.ndarray
    block: Block
    branch_id: int

    @property
    def max_real_part(self) -> float:
        return float(self.lambdas.real.max())


@dataclass
class BranchScan:
    branches: list[DispersionBranch]

    @property
    def max_real_part(self) -> float:
        return max(b.max_real_part for b in self.branches)

    def to_rows(self):
        for br in self.branches:
            for x, lam in zip(br.xi_grid, br.lambdas):
                yield x, lam.real, lam.imag, br.branch_id, br.block.value

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["xi", "re_lambda", "im_lambda", "branch_id", "block"])
        for x, re, im, bid, block in self.to_rows():
            w.writerow([f"{x:.12g}", f"{re:.12g}", f"{im:.12g}", bid, block])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "max_real_part": self.max_real_part,
            "branches": [
                {"branch_id": b.branch_id, "block": b.block.value,
                 "xi": b.xi_grid.tolist(),
                 "re_lambda": b.lambdas.real.tolist(), "im_lambda": b.lambdas.imag.tolist()}
                for b in self.branches
            ],
        }


def track(roots: np.ndarray) -> np.ndarray:
    """Reorder the columns of ``roots`` (grid x nroots) by nearest-neighbour continuation."""
    out = np.empty_like(roots)
    out[0] = roots[0][np.lexsort((roots[0].imag, roots[0].real))]
    for k in range(1, roots.shape[0]):
        cost = np.abs(out[k - 1][:, None] - roots[k][None, :])
        _, cols = linear_sum_assignment(cost)
        out[k] = roots[k][cols]
    return out


def scan_branches(params: ModelParameters, xi_lo: float, xi_hi: float, n: int) -> BranchScan:
    """Log-spaced scan with continuity-tracked branches for both blocks."""
    if not (0 < xi_lo < xi_hi) or n < 2:
        raise ValueError("need 0 < xi_lo < xi_hi and n >= 2")
    xi = np.logspace(np.log10(xi_lo), np.log10(xi_hi), n)
    par, perp = _roots_on_grid(params, xi)
    par, perp = track(par), track(perp)
    branches = [DispersionBranch(xi, par[:, j], Block.PARALLEL, j) for j in range(par.shape[1])]
    branches += [DispersionBranch(xi, perp[:, j], Block.PERPENDICULAR, par.shape[1] + j)
                 for j in range(perp.shape[1])]
    return BranchScan(branches)
