"""Model parameters and rest-frame Fourier symbols.

All quantities are the normalized dissipation coefficients evaluated at the
reference temperature: ``(kappa, omega, nu)`` carry a factor ``theta**-2`` and
``(tau, chi, mu, eta)`` a factor ``theta**-1`` relative to the raw transport
coefficients. The bulk-type combination ``sigma = chi - 4*eta/3`` is derived.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

PARAM_KEYS = ("kappa", "mu", "eta", "nu", "tau", "omega", "chi", "cs")


class ConfigError(ValueError):
    """Malformed parameter configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


class DomainError(ValueError):
    """An argument lies outside the domain where the formula is defined."""


@dataclass(frozen=True)
class ModelParameters:
    """Seven normalized dissipation coefficients plus the sound speed.

    No sign conditions are imposed on the coefficients; those are what the
    stability checks decide. Only ``cs > 0`` is enforced.
    """

    kappa: float
    mu: float
    eta: float
    nu: float
    tau: float
    omega: float
    chi: float
    cs: float = 1.0

    def __post_init__(self):
        for key in PARAM_KEYS:
            value = float(getattr(self, key))
            if not math.isfinite(value):
                raise ConfigError(key, f"must be finite, got {value!r}")
            object.__setattr__(self, key, value)
        if not self.cs > 0:
            raise ConfigError("cs", f"sound speed must be positive, got {self.cs!r}")

    @property
    def sigma(self) -> float:
        return self.chi - 4.0 * self.eta / 3.0

    @classmethod
    def from_sigma(cls, *, kappa, mu, eta, nu, tau, omega, sigma, cs=1.0) -> "ModelParameters":
        """Build from ``sigma`` instead of ``chi`` (``chi = sigma + 4*eta/3``)."""
        return cls(kappa=kappa, mu=mu, eta=eta, nu=nu, tau=tau, omega=omega,
                   chi=sigma + 4.0 * eta / 3.0, cs=cs)

    @classmethod
    def from_mapping(cls, data: Mapping[str, object]) -> "ModelParameters":
        values = {}
        for key in PARAM_KEYS:
            if key not in data:
                raise ConfigError(key, "missing key")
            try:
                values[key] = float(data[key])
            except (TypeError, ValueError):
                raise ConfigError(key, f"not a number: {data[key]!r}") from None
        unknown = sorted(set(data) - set(PARAM_KEYS))
        if unknown:
            raise ConfigError(unknown[0], "unknown key")
        return cls(**values)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def replace(self, **changes) -> "ModelParameters":
        data = self.to_dict()
        data.update(changes)
        return ModelParameters(**data)


def parse_config(text: str) -> ModelParameters:
    """Parse a flat ``key = value`` config (``:`` also accepted, ``#`` comments)."""
    data: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, value = line.split(sep, 1)
                break
        else:
            raise ConfigError(line, f"line {lineno} is not of the form key = value")
        key = key.strip()
        if key in data:
            raise ConfigError(key, "duplicate key")
        data[key] = value.strip()
    return ModelParameters.from_mapping(data)


def format_config(params: ModelParameters) -> str:
    # repr gives the shortest string that parses back to the same double
    return "".join(f"{key} = {getattr(params, key)!r}\n" for key in PARAM_KEYS)


def load_config(path) -> ModelParameters:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def compute_sound_speed(p_prime: float, p_double_prime: float, theta: float) -> float:
    """Speed of sound ``sqrt(p'(theta) / (theta p''(theta)))``."""
    if not p_prime > 0:
        raise DomainError(f"equation of state requires p'(theta) > 0, got {p_prime!r}")
    if not p_double_prime > 0:
        raise DomainError(f"equation of state requires p''(theta) > 0, got {p_double_prime!r}")
    if not theta > 0:
        raise DomainError(f"temperature must be positive, got {theta!r}")
    return math.sqrt(p_prime / (theta * p_double_prime))


def rescale_to_unit_cs(params: ModelParameters) -> ModelParameters:
    """Map to the equivalent ``cs = 1`` parameter set.

    ``kappa -> cs**4 kappa`` and ``mu, nu, omega, tau, eta -> cs**2 (.)`` with
    ``sigma`` held fixed. Every strict-stability margin picks up a positive power
    of ``cs`` under this map, so all signs are preserved.
    """
    if params.cs == 1.0:
        return params
    c2 = params.cs * params.cs
    eta = c2 * params.eta
    return ModelParameters.from_sigma(
        kappa=c2 * c2 * params.kappa,
        mu=c2 * params.mu,
        eta=eta,
        nu=c2 * params.nu,
        tau=c2 * params.tau,
        omega=c2 * params.omega,
        sigma=params.sigma,
        cs=1.0,
    )


def _offdiag(upper: float, lower: float) -> np.ndarray:
    return np.array([[0.0, upper], [lower, 0.0]])


@dataclass(frozen=True)
class SymbolSet:
    """Rest-frame symbols split into the (temperature, longitudinal) block and
    the transverse block. Transverse blocks are multiples of ``I_2`` and are
    stored as scalars; ``xi`` enters only through the methods."""

    params: ModelParameters
    B00_par: np.ndarray
    A0_par: np.ndarray
    B00_perp: float
    A0_perp: float
    C_perp: float = 0.0
    A_perp: float = 0.0

    def B_par(self, xi: float) -> np.ndarray:
        p = self.params
        return -xi * xi * np.diag([p.nu, p.sigma])

    def C_par(self, xi: float) -> np.ndarray:
        p = self.params
        return -xi * _offdiag(p.tau + p.mu, p.omega + p.nu)

    def A_par(self, xi: float) -> np.ndarray:
        return xi * _offdiag(1.0, 1.0)

    def B_perp(self, xi: float) -> float:
        return self.params.eta * xi * xi

    def parallel_pencil(self, lam: complex, xi: float) -> np.ndarray:
        """``-lam^2 B00 + B(xi) - i lam C(xi) + lam A0 + i A(xi)`` on the parallel block."""
        return (-lam * lam * self.B00_par + self.B_par(xi) - 1j * lam * self.C_par(xi)
                + lam * self.A0_par + 1j * self.A_par(xi))

    def perpendicular_pencil(self, lam: complex, xi: float) -> complex:
        return -lam * lam * self.B00_perp + self.B_perp(xi) + lam * self.A0_perp


def assemble_symbols(params: ModelParameters) -> SymbolSet:
    return SymbolSet(
        params=params,
        B00_par=-np.diag([params.kappa, params.mu]),
        A0_par=np.diag([params.cs ** -2, 1.0]),
        B00_perp=-params.mu,
        A0_perp=1.0,
    )


def full_symbols(params: ModelParameters, xi_vec) -> dict[str, np.ndarray]:
    """Undecomposed 4x4 rest-frame symbols at the wave vector ``xi_vec``.

    Ordering is (temperature, v1, v2, v3). Used to check that the block
    decomposition is exact.
    """
    p = params
    k = np.asarray(xi_vec, dtype=float)
    k2 = float(k @ k)
    B00 = -np.diag([p.kappa, p.mu, p.mu, p.mu])
    B = np.zeros((4, 4))
    B[0, 0] = p.nu * k2
    B[1:, 1:] = (p.chi - p.eta / 3.0) * np.outer(k, k) - p.eta * k2 * np.eye(3)
    B = -B
    C = np.zeros((4, 4))
    C[0, 1:] = (p.tau + p.mu) * k
    C[1:, 0] = (p.omega + p.nu) * k
    C = -C
    A0 = np.diag([p.cs ** -2, 1.0, 1.0, 1.0])
    A = np.zeros((4, 4))
    A[0, 1:] = k
    A[1:, 0] = k
    return {"B00": B00, "B": B, "C": C, "A0": A0, "A": A}


def adapted_basis(xi_vec) -> np.ndarray:
    """Orthonormal basis (columns) of C x C xi  +  {0} x xi-perp for ``xi_vec != 0``."""
    k = np.asarray(xi_vec, dtype=float)
    khat = k / np.linalg.norm(k)
    # complete khat to an orthonormal frame of R^3
    q, _ = np.linalg.qr(np.column_stack([khat, np.eye(3)]))
    perp = q[:, 1:3]
    basis = np.zeros((4, 4))
    basis[0, 0] = 1.0
    basis[1:, 1] = khat
    basis[1:, 2:] = perp
    return basis
