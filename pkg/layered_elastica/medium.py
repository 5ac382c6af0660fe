"""Physical parameters, wavenumbers and the scalar spectral constants.

Everything downstream (2D/3D Green's tensors, the rough-interface solver)
reads its wavenumbers from :class:`ElasticMedium`; nothing else stores them.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np

from .errors import BranchCutError, DegenerateDenominatorError, InvalidMediumError

logger = logging.getLogger(__name__)

EPS_CUT = 1e-12
DEN_RTOL = 1e3

ArrayLike = Union[complex, float, np.ndarray]


@dataclass(frozen=True)
class ElasticMedium:
    lam: float
    mu: float
    rho_plus: float
    rho_minus: float
    omega: float
    dim: int = 2
    a0: float = 1.0

    def __post_init__(self) -> None:
        if self.dim not in (2, 3):
            raise InvalidMediumError(f"dim must be 2 or 3, got {self.dim}")
        if not self.mu > 0:
            raise InvalidMediumError(f"mu must be positive, got {self.mu}")
        if not self.dim * self.lam + 2 * self.mu > 0:
            raise InvalidMediumError("need dim*lambda + 2*mu > 0")
        if not (self.rho_plus > 0 and self.rho_minus > 0):
            raise InvalidMediumError("densities must be positive")
        if not self.omega > 0:
            raise InvalidMediumError(f"omega must be positive, got {self.omega}")
        if self.a0 != 1.0:
            raise InvalidMediumError("only a0 = 1 is supported")

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "ElasticMedium":
        try:
            return cls(
                lam=float(data["lambda"]),
                mu=float(data["mu"]),
                rho_plus=float(data["rho_plus"]),
                rho_minus=float(data["rho_minus"]),
                omega=float(data["omega"]),
                dim=int(data.get("dim", 2)),
                a0=float(data.get("a0", 1.0)),
            )
        except KeyError as exc:
            raise InvalidMediumError(f"medium is missing key {exc.args[0]!r}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidMediumError(f"malformed medium: {exc}") from exc

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ElasticMedium":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> Dict[str, object]:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        return data

    def with_dim(self, dim: int) -> "ElasticMedium":
        return ElasticMedium(self.lam, self.mu, self.rho_plus, self.rho_minus, self.omega, dim, self.a0)

    def rho(self, side: int) -> float:
        return self.rho_plus if side > 0 else self.rho_minus


@dataclass(frozen=True)
class Wavenumbers:
    kp_plus: float
    ks_plus: float
    kp_minus: float
    ks_minus: float

    def k(self, wave: str, side: int) -> float:
        if wave == "p":
            return self.kp_plus if side > 0 else self.kp_minus
        if wave == "s":
            return self.ks_plus if side > 0 else self.ks_minus
        raise ValueError(f"unknown wave type {wave!r}")

    @property
    def k_min(self) -> float:
        return min(self.kp_plus, self.kp_minus)

    @property
    def k_max(self) -> float:
        return max(self.ks_plus, self.ks_minus)

    def branch_points(self) -> Tuple[float, ...]:
        return tuple(sorted({self.kp_plus, self.ks_plus, self.kp_minus, self.ks_minus}))


@dataclass(frozen=True)
class StressWeights:
    mu_tilde: float
    lambda_tilde: float

    @classmethod
    def scattering(cls, m: ElasticMedium) -> "StressWeights":
        """Weights used by the rough-interface solver (compact double layer)."""
        lam, mu = m.lam, m.mu
        return cls(mu * (lam + mu) / (lam + 3 * mu), (lam + mu) * (lam + 2 * mu) / (lam + 3 * mu))

    @classmethod
    def physical(cls, m: ElasticMedium) -> "StressWeights":
        return cls(m.mu, m.lam)

    def check(self, m: ElasticMedium, rtol: float = 1e-12) -> None:
        total = m.mu + m.lam
        if abs(self.mu_tilde + self.lambda_tilde - total) > rtol * max(1.0, abs(total)):
            raise InvalidMediumError("stress weights must satisfy mu~ + lambda~ = mu + lambda")


def wavenumbers(m: ElasticMedium) -> Wavenumbers:
    w2 = m.omega**2
    return Wavenumbers(
        kp_plus=float(np.sqrt(m.rho_plus * w2 / (2 * m.mu + m.lam))),
        ks_plus=float(np.sqrt(m.rho_plus * w2 / m.mu)),
        kp_minus=float(np.sqrt(m.rho_minus * w2 / (2 * m.mu + m.lam))),
        ks_minus=float(np.sqrt(m.rho_minus * w2 / m.mu)),
    )


def beta(xi: ArrayLike, k: float, eps_cut: float = EPS_CUT) -> ArrayLike:
    """Vertical wavenumber sqrt(xi-k)*sqrt(xi+k) on the physical sheet.

    arg(xi-k) is taken in [-3pi/2, pi/2) and arg(xi+k) in [-pi/2, 3pi/2), so the
    cuts run upward from +k and downward from -k. On the real axis this gives
    sqrt(xi^2-k^2) >= 0 for |xi| >= k and -i*sqrt(k^2-xi^2) for |xi| < k.
    """
    scalar = np.isscalar(xi)
    z = np.asarray(xi, dtype=complex)
    d1 = z - k
    d2 = z + k
    eps = eps_cut * k
    on_cut = ((np.abs(d1.real) < eps) & (d1.imag > eps)) | ((np.abs(d2.real) < eps) & (d2.imag < -eps))
    if np.any(on_cut):
        bad = z[on_cut] if z.ndim else z
        raise BranchCutError(f"spectral point {np.ravel(bad)[0]!r} lies on a branch cut of beta(k={k})")
    a1 = np.angle(d1)
    a1 = np.where(a1 >= np.pi / 2, a1 - 2 * np.pi, a1)
    a2 = np.angle(d2)
    a2 = np.where(a2 < -np.pi / 2, a2 + 2 * np.pi, a2)
    out = np.sqrt(np.abs(d1) * np.abs(d2)) * np.exp(0.5j * (a1 + a2))
    return complex(out) if scalar else out


def beta_flip_rule(xi: ArrayLike, k: float) -> ArrayLike:
    """Principal sqrt(xi^2-k^2) with the sign flipped onto Re >= 0 (Im <= 0 on ties).

    Agrees with :func:`beta` on the real axis and on the indentation arcs used by
    the quadrature; kept as an independent oracle for those regions.
    """
    z = np.asarray(xi, dtype=complex)
    b = np.sqrt(z * z - k * k)
    flip = (b.real < 0) | ((b.real == 0) & (b.imag > 0))
    b = np.where(flip, -b, b)
    return complex(b) if np.isscalar(xi) else b


def refl_trans(beta_p: ArrayLike, beta_m: ArrayLike, k_p: float, k_m: float) -> Tuple[ArrayLike, ArrayLike]:
    num_p = beta_p / k_p**2
    num_m = beta_m / k_m**2
    den = num_p + num_m
    # cancellation down to rounding counts as a zero
    scale = np.abs(num_p) + np.abs(num_m)
    if np.any(np.abs(den) <= DEN_RTOL * np.finfo(float).eps * scale):
        raise DegenerateDenominatorError("reflection denominator vanished; check branch handling")
    return (num_p - num_m) / den, 2 * num_p / den


@dataclass(frozen=True)
class SpectralBetas:
    """The four vertical wavenumbers at a batch of spectral points."""

    bp_plus: np.ndarray
    bs_plus: np.ndarray
    bp_minus: np.ndarray
    bs_minus: np.ndarray

    @classmethod
    def at(cls, xi: ArrayLike, kn: Wavenumbers) -> "SpectralBetas":
        z = np.asarray(xi, dtype=complex)
        return cls(beta(z, kn.kp_plus), beta(z, kn.ks_plus), beta(z, kn.kp_minus), beta(z, kn.ks_minus))

    def get(self, wave: str, side: int) -> np.ndarray:
        if wave == "p":
            return self.bp_plus if side > 0 else self.bp_minus
        return self.bs_plus if side > 0 else self.bs_minus


def c0(m: ElasticMedium) -> float:
    w2 = m.omega**2
    return 1.0 / (m.rho_plus * w2) - 1.0 / (m.rho_minus * w2)


def spectral_constants(m: ElasticMedium, xi: ArrayLike) -> Tuple[float, ArrayLike]:
    kn = wavenumbers(m)
    b = SpectralBetas.at(xi, kn)
    d = determinant(kn, b, np.asarray(xi, dtype=complex))
    return c0(m), (complex(d) if np.isscalar(xi) else d)


def determinant(kn: Wavenumbers, b: SpectralBetas, xi: np.ndarray) -> np.ndarray:
    sig_p = b.bp_plus / kn.kp_plus**2 + b.bp_minus / kn.kp_minus**2
    sig_s = b.bs_plus / kn.ks_plus**2 + b.bs_minus / kn.ks_minus**2
    dp = kn.kp_plus**-2 - kn.kp_minus**-2
    ds = kn.ks_plus**-2 - kn.ks_minus**-2
    return -sig_p * sig_s + dp * ds * xi * xi


@dataclass(frozen=True)
class DScanReport:
    min_abs: float
    argmin: float
    samples: int
    span: float

    @property
    def ok(self) -> bool:
        return self.min_abs > 0.0


def scan_determinant(m: ElasticMedium, samples: int = 100_000, span: float = 3.0) -> DScanReport:
    """Sample |D| on [-span*ks+, span*ks+] and report the smallest value found.

    Branch points are nudged off by a relative 1e-9 so beta never sees a cut.
    """
    kn = wavenumbers(m)
    xi = np.linspace(-span * kn.ks_plus, span * kn.ks_plus, samples)
    for bp in kn.branch_points():
        for sgn in (-1.0, 1.0):
            hit = np.isclose(xi, sgn * bp, rtol=0.0, atol=1e-9 * bp)
            xi[hit] += 1e-9 * bp
    _, d = spectral_constants(m, xi)
    mag = np.abs(d)
    i = int(np.argmin(mag))
    report = DScanReport(float(mag[i]), float(xi[i]), samples, span)
    logger.info("D scan: min |D| = %.3e at xi = %.6g over %d samples", report.min_abs, report.argmin, samples)
    return report
