"""Linear per-mode evolution and Sobolev-norm decay of radial perturbations.

A radially symmetric perturbation on R^3 is evolved exactly in Fourier space:
for each wave number the linearized system splits into a 4x4 parallel and a
2x2 (per transverse component) companion system, solved by matrix
exponential. Norms are radial integrals over ``xi``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg
from scipy import integrate, special

from .dispersion import NumericalError
from .model import ModelParameters, assemble_symbols

EIG_COND_MAX = 1e8
DEFAULT_FIT_WINDOW = (1e2, 1e4)


class ProfileKind(str, Enum):
    GAUSSIAN = "Gaussian"


@dataclass(frozen=True)
class InitialProfile:
    """Radial Gaussian ``exp(-r^2 / (2 w^2))`` times per-component amplitudes.

    Components are ordered (temperature, longitudinal velocity, transverse 1,
    transverse 2) in the basis adapted to each wave vector.
    """

    width: float = 1.0
    amplitudes: tuple = (1.0, 0.0, 0.0, 0.0)
    vdot_amplitudes: tuple = (0.0, 0.0, 0.0, 0.0)
    kind: ProfileKind = ProfileKind.GAUSSIAN

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("profile width must be positive")
        amps = tuple(float(a) for a in self.amplitudes)
        vamps = tuple(float(a) for a in self.vdot_amplitudes)
        if len(amps) != 4 or len(vamps) != 4:
            raise ValueError("amplitudes need four components")
        if not any(amps) and not any(vamps):
            raise ValueError("profile is identically zero")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "vdot_amplitudes", vamps)

    def fourier(self, xi):
        """Unitary 3-D Fourier transform of the unit-amplitude radial profile."""
        w = self.width
        return w ** 3 * np.exp(-0.5 * (w * xi) ** 2)

    def hs_norm_squared(self, s: float) -> float:
        """Closed-form squared ``H^s`` norm of the position data at ``t = 0``."""
        w = self.width
        # int_0^inf xi^2 (1+xi^2)^s exp(-w^2 xi^2) dxi = Gamma(3/2) U(3/2, s+5/2, w^2) / 2
        radial = 0.5 * special.gamma(1.5) * special.hyperu(1.5, s + 2.5, w * w)
        return float(np.dot(self.amplitudes, self.amplitudes)) * 4.0 * math.pi * w ** 6 * radial


@dataclass
class ModeState:
    v: np.ndarray
    vdot: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=complex).reshape(4)
        self.vdot = np.asarray(self.vdot, dtype=complex).reshape(4)
        if not (np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.vdot))):
            raise ValueError("mode state must be finite")


def parallel_companion(params: ModelParameters, xi: float) -> np.ndarray:
    """First-order form of ``-B00 v'' + (A0 - iC) v' + (B + iA) v = 0`` on the parallel block.

    State ordering is ``(v_T, v_L, v_T', v_L')``. Its eigenvalues are the
    roots of the dispersion quartic.
    """
    sym = assemble_symbols(params)
    d_inv = np.linalg.inv(-sym.B00_par)
    out = np.zeros((4, 4), dtype=complex)
    out[:2, 2:] = np.eye(2)
    out[2:, :2] = -d_inv @ (sym.B_par(xi) + 1j * sym.A_par(xi))
    out[2:, 2:] = -d_inv @ (sym.A0_par - 1j * sym.C_par(xi))
    return out


def perpendicular_companion(params: ModelParameters, xi: float) -> np.ndarray:
    """``mu v'' + v' + eta xi^2 v = 0`` for one transverse component."""
    mu = params.mu
    return np.array([[0.0, 1.0], [-params.eta * xi * xi / mu, -1.0 / mu]], dtype=complex)


class Propagator:
    """``exp(M t)`` for a fixed matrix, evaluated for many ``t``.

    Uses the eigendecomposition when the eigenvector basis is well
    conditioned and falls back to Pade scaling-and-squaring otherwise.
    """

    def __init__(self, M: np.ndarray):
        self.M = M
        w, V = np.linalg.eig(M)
        cond = np.linalg.cond(V)
        self.use_eig = bool(np.isfinite(cond) and cond < EIG_COND_MAX)
        if self.use_eig:
            self.w, self.V, self.Vinv = w, V, np.linalg.inv(V)

    def apply(self, x0: np.ndarray, times: np.ndarray) -> np.ndarray:
        """Rows are ``exp(M t_k) x0``."""
        times = np.asarray(times, dtype=float)
        if self.use_eig:
            c = self.Vinv @ x0
            out = (np.exp(np.outer(times, self.w)) * c[None, :]) @ self.V.T
        else:
            out = np.array([scipy.linalg.expm(self.M * t) @ x0 for t in times])
        if not np.all(np.isfinite(out)):
            raise NumericalError("non-finite matrix exponential")
        return out


def _evolve(params: ModelParameters, xi: float, v0: np.ndarray, vd0: np.ndarray, times) -> np.ndarray:
    """Position part ``v(t)`` (shape ``(T, 4)``) for initial data ``v0, vd0``."""
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, 4), dtype=complex)
    par = Propagator(parallel_companion(params, xi))
    out[:, :2] = par.apply(np.concatenate([v0[:2], vd0[:2]]), times)[:, :2]
    perp = Propagator(perpendicular_companion(params, xi))
    for j in (2, 3):
        out[:, j] = perp.apply(np.array([v0[j], vd0[j]]), times)[:, 0]
    return out


def evolve_mode(params: ModelParameters, xi: float, init: ModeState, t: float) -> ModeState:
    """Exact solution of the linear constant-coefficient mode system at time ``t``."""
    if xi < 0 or t < 0:
        raise ValueError("need xi >= 0 and t >= 0")
    sym_par = Propagator(parallel_companion(params, xi))
    sym_perp = Propagator(perpendicular_companion(params, xi))
    par = sym_par.apply(np.concatenate([init.v[:2], init.vdot[:2]]), [t])[0]
    v = np.empty(4, dtype=complex)
    vd = np.empty(4, dtype=complex)
    v[:2], vd[:2] = par[:2], par[2:]
    for j in (2, 3):
        v[j], vd[j] = sym_perp.apply(np.array([init.v[j], init.vdot[j]]), [t])[0]
    return ModeState(v, vd)


@dataclass
class DecayTrace:
    times: np.ndarray
    hs_norms: np.ndarray
    l2_norms: np.ndarray
    s: float
    fitted_exponent: float
    fit_window: tuple[float, float]
    quadrature_error: float = 0.0
    notes: list[str] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# fitted_exponent={self.fitted_exponent:.12g}\n")
        buf.write(f"# fit_window={self.fit_window[0]:.12g},{self.fit_window[1]:.12g}\n")
        buf.write(f"# s={self.s:.12g}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "hs_norm", "l2_norm"])
        for t, h, l in zip(self.times, self.hs_norms, self.l2_norms):
            w.writerow([f"{t:.12g}", f"{h:.12g}", f"{l:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "fitted_exponent": self.fitted_exponent,
            "fit_window": list(self.fit_window),
            "quadrature_error": self.quadrature_error,
            "times": self.times.tolist(),
            "hs_norms": self.hs_norms.tolist(),
            "l2_norms": self.l2_norms.tolist(),
            "notes": list(self.notes),
        }


def fit_decay_exponent(times, norms, window=DEFAULT_FIT_WINDOW) -> float:
    """Least-squares slope of ``log norm`` against ``log(1 + t)`` inside ``window``."""
    t = np.asarray(times, dtype=float)
    n = np.asarray(norms, dtype=float)
    sel = (t >= window[0]) & (t <= window[1])
    if sel.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(np.log1p(t[sel]), np.log(n[sel]), 1)
    return float(slope)


def default_time_grid(t_lo: float = 1e2, t_hi: float = 1e4, n: int = 40) -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(np.log10(t_lo), np.log10(t_hi), n)])


def _xi_cutoff(profile: InitialProfile, s: float) -> float:
    # radial weight xi^2 (1+xi^2)^s ghat^2 falls below 1e-32 of its O(1) scale
    w = profile.width
    xi = 4.0 / w
    f = lambda x: 2 * math.log(x) + s * math.log1p(x * x) - (w * x) ** 2  # noqa: E731
    while f(xi) > -75.0 + 2 * math.log(1.0 / w):
        xi *= 1.25
    return xi


def decay_norm_trace(params: ModelParameters, profile: InitialProfile, s: float = 0.0,
                     t_grid=None, fit_window=DEFAULT_FIT_WINDOW, epsrel: float = 1e-8) -> DecayTrace:
    """``||phi(t)||_{H^s}`` for a radial profile by adaptive radial quadrature.

    ``||phi(t)||^2 = 4 pi int_0^inf (1+xi^2)^s |phi_hat(t, xi)|^2 xi^2 dxi``.
    All times share one adaptive quadrature; components are rescaled by a
    coarse first pass so that the relative tolerance applies per time.
    """
    if s < 0:
        raise ValueError("Sobolev index must be non-negative")
    times = default_time_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or np.any(times < 0) or np.any(np.diff(times) <= 0):
        raise ValueError("t_grid must be non-negative and strictly increasing")
    amps = np.asarray(profile.amplitudes, dtype=complex)
    vamps = np.asarray(profile.vdot_amplitudes, dtype=complex)
    T = times.size

    def integrand(xi: float) -> np.ndarray:
        ghat = profile.fourier(xi)
        v = _evolve(params, xi, amps * ghat, vamps * ghat, times)
        dens = 4.0 * math.pi * xi * xi * np.sum(np.abs(v) ** 2, axis=1)
        return np.concatenate([(1.0 + xi * xi) ** s * dens, dens])

    xi_max = _xi_cutoff(profile, s)
    late = times[times > 0]
    points = sorted({min(0.5 * xi_max, 3.0 / math.sqrt(t)) for t in late[:: max(1, late.size // 8)]})

    # coarse pass to learn the magnitude of each component
    guess = np.concatenate([(1.0 + times) ** -1.5] * 2)
    coarse, _ = integrate.quad_vec(lambda x: integrand(x) / guess, 0.0, xi_max, epsrel=1e-4,
                                   norm="max", points=points, limit=20000)
    scale = np.abs(coarse * guess)
    scale[scale == 0] = 1.0
    res, err, info = integrate.quad_vec(lambda x: integrand(x) / scale, 0.0, xi_max, epsrel=epsrel,
                                        norm="max", points=points, limit=200000, full_output=True)
    if not info.success:
        raise NumericalError(f"radial quadrature did not converge: {info.message} "
                             f"(intervals={info.intervals.shape[0]}, err={err:.3g})")
    values = res * scale
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise NumericalError("non-positive or non-finite norm from quadrature")
    hs = np.sqrt(values[:T])
    l2 = np.sqrt(values[T:])
    return DecayTrace(times, hs, l2, float(s), fit_decay_exponent(times, hs, fit_window),
                      tuple(float(x) for x in fit_window), quadrature_error=float(err))
