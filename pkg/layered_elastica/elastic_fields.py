"""Free-space elastic objects shared by the layered Green's tensors and the solver.

All point arguments may carry leading batch axes; the last axis is the
coordinate axis. Gradients follow ``grad[..., i, j] = d u_i / d x_j``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import specfun
from .errors import CoincidentPointsError
from .medium import ElasticMedium, StressWeights, wavenumbers

logger = logging.getLogger(__name__)

# pairs closer than this many shear wavelengths are treated as coincident
MIN_SEPARATION_WAVELENGTHS = 1e-6
NODES_PER_WAVELENGTH = 32


@dataclass(frozen=True)
class RegionTag:
    x_region: int
    y_region: int

    @classmethod
    def of(cls, x: Sequence[float], y: Sequence[float], x_side: Optional[int] = None,
           y_side: Optional[int] = None) -> "RegionTag":
        """Sides from the sign of the last coordinate; points on the interface default to plus."""
        def side(p: Sequence[float], forced: Optional[int]) -> int:
            if forced is not None:
                return 1 if forced > 0 else -1
            return -1 if p[-1] < 0 else 1

        return cls(side(x, x_side), side(y, y_side))

    @property
    def same_side(self) -> bool:
        return self.x_region == self.y_region

    def label(self) -> str:
        name = {1: "plus", -1: "minus"}
        return f"{name[self.x_region]}/{name[self.y_region]}"


@dataclass(frozen=True)
class GreenMatrix:
    """Value of G, Pi or G - Pi at one point pair; ``grad_x[i, j, l] = d/dx_l entries[i, j]``."""

    entries: np.ndarray
    x: np.ndarray
    y: np.ndarray
    region: Optional[RegionTag] = None
    grad_x: Optional[np.ndarray] = None
    grad_y: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def column(self, j: int) -> "FieldJet":
        if self.grad_x is None:
            raise ValueError("gradient was not computed for this matrix")
        return FieldJet(self.entries[:, j], self.grad_x[:, j, :])

    def apply(self, a: Sequence[complex]) -> np.ndarray:
        return self.entries @ np.asarray(a, dtype=complex)


@dataclass(frozen=True)
class SurfaceFrame:
    nu: np.ndarray
    tau: Optional[np.ndarray] = None

    @classmethod
    def from_normal(cls, nu: Sequence[float]) -> "SurfaceFrame":
        n = np.asarray(nu, dtype=float)
        norm = np.linalg.norm(n, axis=-1, keepdims=True)
        n = n / norm
        tau = np.stack([n[..., 1], -n[..., 0]], axis=-1) if n.shape[-1] == 2 else None
        return cls(n, tau)

    def __post_init__(self) -> None:
        if not np.allclose(np.linalg.norm(self.nu, axis=-1), 1.0, atol=1e-12):
            raise ValueError("normal must have unit length")


@dataclass(frozen=True)
class FieldJet:
    u: np.ndarray
    grad_u: np.ndarray
    # hess_u[..., i, j, l] = d^2 u_i / dx_j dx_l, only needed for the Helmholtz split
    hess_u: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.u.shape[-1]


@dataclass(frozen=True)
class HelmholtzParts:
    phi_p: np.ndarray
    phi_s: np.ndarray
    grad_phi_p: Optional[np.ndarray] = None
    grad_phi_s: Optional[np.ndarray] = None


# ---------------------------------------------------------------------------
# fundamental solutions


def _radial_d(k: float, r: np.ndarray, dim: int, n: int) -> np.ndarray:
    """(1/r d/dr)^n applied to Phi_k, as a function of r."""
    z = k * r
    if dim == 2:
        h = np.asarray(specfun.hankel1(n, z + 0j, internal=True))
        return 0.25j * (-1) ** n * k ** (2 * n) * z ** (-float(n)) * h
    h = np.asarray(specfun.spherical_hankel1(n, z))
    return 1j * k / (4 * np.pi) * (-1) ** n * k ** (2 * n) * z ** (-float(n)) * h


def phi_derivatives(k: float, diff: np.ndarray, dim: int, order: int = 0) -> List[np.ndarray]:
    """Phi_k(x, y) and its x-derivative tensors up to ``order`` (at most 4), with diff = x - y."""
    x = np.asarray(diff, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise CoincidentPointsError("fundamental solution evaluated at coincident points")
    d = [_radial_d(k, r, dim, n) for n in range(order + 1)]
    e = np.eye(dim)
    out: List[np.ndarray] = [d[0]]
    if order >= 1:
        out.append(x * d[1][..., None])
    if order >= 2:
        out.append(e * d[1][..., None, None] + np.einsum("...i,...j->...ij", x, x) * d[2][..., None, None])
    if order >= 3:
        sym = (
            np.einsum("ij,...k->...ijk", e, x)
            + np.einsum("ik,...j->...ijk", e, x)
            + np.einsum("jk,...i->...ijk", e, x)
        )
        xxx = np.einsum("...i,...j,...k->...ijk", x, x, x)
        out.append(sym * d[2][..., None, None, None] + xxx * d[3][..., None, None, None])
    if order >= 4:
        dd = np.einsum("ij,kl->ijkl", e, e) + np.einsum("ik,jl->ijkl", e, e) + np.einsum("il,jk->ijkl", e, e)
        dxx = sum(
            np.einsum(f"{a},...{b},...{c}->...ijkl", e, x, x)
            for a, b, c in (("ij", "k", "l"), ("ik", "j", "l"), ("il", "j", "k"),
                            ("jk", "i", "l"), ("jl", "i", "k"), ("kl", "i", "j"))
        )
        xxxx = np.einsum("...i,...j,...k,...l->...ijkl", x, x, x, x)
        w = (...,) + (None,) * 4
        out.append(dd * d[2][w] + dxx * d[3][w] + xxxx * d[4][w])
    return out


def phi(k: float, x: Sequence[float], y: Sequence[float], dim: int) -> complex:
    diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    if diff.shape != (dim,):
        raise ValueError(f"points must have {dim} coordinates")
    return complex(phi_derivatives(k, diff, dim)[0])


def check_separation(m: ElasticMedium, x: Sequence[float], y: Sequence[float]) -> None:
    kn = wavenumbers(m)
    lam_s = 2 * np.pi / kn.k_max
    if np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)) < MIN_SEPARATION_WAVELENGTHS * lam_s:
        raise CoincidentPointsError(f"points {list(x)} and {list(y)} are closer than the minimum separation")


def kupradze_derivatives(m: ElasticMedium, side: int, diff: np.ndarray, order: int = 1) -> List[np.ndarray]:
    """Pi_side and its x-derivatives up to ``order`` (at most 2), batched over diff = x - y.

    Pi = Phi_ks I / mu + grad grad (Phi_ks - Phi_kp) / (rho omega^2).
    """
    dim = m.dim
    kn = wavenumbers(m)
    ks, kp = kn.k("s", side), kn.k("p", side)
    rw2 = m.rho(side) * m.omega**2
    ds = phi_derivatives(ks, diff, dim, order + 2)
    dp = phi_derivatives(kp, diff, dim, order + 2)
    e = np.eye(dim)
    out = [e * ds[0][..., None, None] / m.mu + (ds[2] - dp[2]) / rw2]
    if order >= 1:
        out.append(np.einsum("ij,...l->...ijl", e, ds[1]) / m.mu + (ds[3] - dp[3]) / rw2)
    if order >= 2:
        out.append(np.einsum("ij,...lq->...ijlq", e, ds[2]) / m.mu + (ds[4] - dp[4]) / rw2)
    return out


def kupradze_tensor(m: ElasticMedium, sign: int, x: Sequence[float], y: Sequence[float]) -> GreenMatrix:
    """Free-space Green's tensor of the half-space ``sign`` medium, with its x-gradient."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    check_separation(m, xa, ya)
    side = 1 if sign > 0 else -1
    val, grad = kupradze_derivatives(m, side, xa - ya, order=1)
    return GreenMatrix(val, xa, ya, RegionTag(side, side), grad_x=grad, grad_y=-grad)


def kupradze_helmholtz(m: ElasticMedium, side: int, diff: np.ndarray, a: Sequence[complex]) -> HelmholtzParts:
    """Helmholtz parts of the column Pi a, in closed form.

    div Pi a = (2mu+lam)^-1 grad Phi_kp . a; the shear part is the div-perp (2D)
    or curl (3D) of Phi_ks a / mu.
    """
    dim = m.dim
    kn = wavenumbers(m)
    av = np.asarray(a, dtype=complex)
    dp = phi_derivatives(kn.k("p", side), diff, dim, 2)
    ds = phi_derivatives(kn.k("s", side), diff, dim, 2)
    cp = 1.0 / (2 * m.mu + m.lam)
    phi_p = cp * np.einsum("...j,j->...", dp[1], av)
    grad_p = cp * np.einsum("...jl,j->...l", dp[2], av)
    if dim == 2:
        phi_s = (ds[1][..., 1] * av[0] - ds[1][..., 0] * av[1]) / m.mu
        grad_s = (ds[2][..., 1, :] * av[0] - ds[2][..., 0, :] * av[1]) / m.mu
    else:
        # curl(Phi a) = grad Phi x a
        phi_s = np.cross(ds[1], np.broadcast_to(av, ds[1].shape)) / m.mu
        grad_s = np.stack(
            [np.cross(ds[2][..., :, l], np.broadcast_to(av, ds[1].shape)) for l in range(3)], axis=-1
        ) / m.mu
    return HelmholtzParts(phi_p, phi_s, grad_p, grad_s)


# ---------------------------------------------------------------------------
# stress operators


def _div(grad: np.ndarray) -> np.ndarray:
    return np.trace(grad, axis1=-2, axis2=-1)


def _div_perp(grad: np.ndarray) -> np.ndarray:
    return grad[..., 0, 1] - grad[..., 1, 0]


def _curl(grad: np.ndarray) -> np.ndarray:
    return np.stack(
        [grad[..., 2, 1] - grad[..., 1, 2], grad[..., 0, 2] - grad[..., 2, 0], grad[..., 1, 0] - grad[..., 0, 1]],
        axis=-1,
    )


def _perp(v: np.ndarray) -> np.ndarray:
    return np.stack([v[..., 1], -v[..., 0]], axis=-1)


def traction(grad: np.ndarray, nu: np.ndarray, w: StressWeights, mu: float) -> np.ndarray:
    """Generalized stress vector from a gradient; batched, dimension read off the shapes."""
    g = np.asarray(grad, dtype=complex)
    n = np.asarray(nu, dtype=float)
    dim = g.shape[-1]
    d_nu = np.einsum("...ij,...j->...i", g, n)
    div = _div(g)[..., None]
    out = (mu + w.mu_tilde) * d_nu + w.lambda_tilde * n * div
    if dim == 2:
        return out - w.mu_tilde * _perp(n) * _div_perp(g)[..., None]
    return out + w.mu_tilde * np.cross(np.broadcast_to(n, d_nu.shape), _curl(g))


def stress_direct(jet: FieldJet, frame: SurfaceFrame, w: StressWeights, m: ElasticMedium, dim: int) -> np.ndarray:
    w.check(m)
    if jet.dim != dim:
        raise ValueError(f"jet has dimension {jet.dim}, expected {dim}")
    return traction(jet.grad_u, frame.nu, w, m.mu)


def m_nu(jet: FieldJet, frame: SurfaceFrame) -> np.ndarray:
    g = np.asarray(jet.grad_u, dtype=complex)
    n = frame.nu
    if g.shape[-1] != 3:
        raise ValueError("M_nu is defined in three dimensions only")

    def d(i: int, j: int) -> np.ndarray:
        # d_j u_i
        return g[..., i, j]

    n1, n2, n3 = n[..., 0], n[..., 1], n[..., 2]
    return np.stack(
        [
            n2 * d(1, 0) - n1 * d(1, 1) + n3 * d(2, 0) - n1 * d(2, 2),
            n1 * d(0, 1) - n2 * d(0, 0) + n3 * d(2, 1) - n2 * d(2, 2),
            n1 * d(0, 2) - n3 * d(0, 0) + n2 * d(1, 2) - n3 * d(1, 1),
        ],
        axis=-1,
    )


def stress_identity(jet: FieldJet, frame: SurfaceFrame, w: StressWeights, m: ElasticMedium, dim: int) -> np.ndarray:
    """The generalized stress vector rewritten as tangential part plus the two potentials."""
    w.check(m)
    g = np.asarray(jet.grad_u, dtype=complex)
    n = frame.nu
    div = _div(g)[..., None]
    if dim == 2:
        tau = _perp(n) if frame.tau is None else frame.tau
        d_tau = np.einsum("...ij,...j->...i", g, tau)
        return (m.mu + w.mu_tilde) * _perp(d_tau) + (2 * m.mu + m.lam) * n * div + m.mu * tau * _div_perp(g)[..., None]
    curl = _curl(g)
    return (
        (m.mu + w.mu_tilde) * m_nu(jet, frame)
        + (2 * m.mu + m.lam) * n * div
        - m.mu * np.cross(np.broadcast_to(n, curl.shape), curl)
    )


# ---------------------------------------------------------------------------
# Helmholtz decomposition


def helmholtz_split(field: Callable[[np.ndarray], FieldJet], x: Sequence[float]) -> HelmholtzParts:
    """div u and div-perp u (2D) / curl u (3D) of a closed-form field, with their gradients."""
    jet = field(np.asarray(x, dtype=float))
    g = np.asarray(jet.grad_u, dtype=complex)
    h = None if jet.hess_u is None else np.asarray(jet.hess_u, dtype=complex)
    dim = g.shape[-1]
    phi_p = _div(g)
    grad_p = None if h is None else np.einsum("...iil->...l", h)
    if dim == 2:
        phi_s = _div_perp(g)
        grad_s = None if h is None else h[..., 0, 1, :] - h[..., 1, 0, :]
    else:
        phi_s = _curl(g)
        grad_s = None
        if h is not None:
            grad_s = np.stack([_curl(h[..., :, :, l]) for l in range(3)], axis=-1)
    return HelmholtzParts(phi_p, phi_s, grad_p, grad_s)


def helmholtz_recompose(parts: HelmholtzParts, m: ElasticMedium, side: int = 1) -> np.ndarray:
    """u = -kp^-2 grad phi_p - ks^-2 grad-perp phi_s (2D) or -kp^-2 grad phi_p + ks^-2 curl phi_s (3D)."""
    if parts.grad_phi_p is None or parts.grad_phi_s is None:
        raise ValueError("recomposition needs the gradients of both potentials")
    kn = wavenumbers(m)
    kp2 = kn.k("p", side) ** -2
    ks2 = kn.k("s", side) ** -2
    gp = np.asarray(parts.grad_phi_p)
    gs = np.asarray(parts.grad_phi_s)
    if gp.shape[-1] == 2:
        return -kp2 * gp - ks2 * _perp(gs)
    return -kp2 * gp + ks2 * _curl(gs)


# ---------------------------------------------------------------------------
# radiation integrals on large half-circles / hemispheres


def _panel_rule(a: float, b: float, n_panels: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    return t, wt


def hemisphere_rule(R: float, k: float, dim: int, side: int = 1,
                    nodes_per_wavelength: int = NODES_PER_WAVELENGTH) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points, outward normals and weights on the part of |x| = R in the half-space ``side``."""
    wavelength = 2 * np.pi / k
    if dim == 2:
        length = np.pi * R
        n_panels = max(1, int(np.ceil(length / wavelength)))
        th, w = _panel_rule(0.0, np.pi, n_panels, nodes_per_wavelength)
        if side < 0:
            th = th + np.pi
        nrm = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return R * nrm, nrm, w * R
    # polar angle measured from the outward pole of the hemisphere
    n_pol = max(1, int(np.ceil(0.5 * np.pi * R / wavelength)))
    th, wth = _panel_rule(0.0, 0.5 * np.pi, n_pol, nodes_per_wavelength)
    pts, nrms, wts = [], [], []
    for t, wt in zip(th, wth):
        ring = 2 * np.pi * R * np.sin(t)
        n_az = max(1, int(np.ceil(ring / wavelength)))
        az, waz = _panel_rule(0.0, 2 * np.pi, n_az, nodes_per_wavelength)
        nrm = np.stack(
            [np.sin(t) * np.cos(az), np.sin(t) * np.sin(az), side * np.cos(t) * np.ones_like(az)], axis=-1
        )
        pts.append(R * nrm)
        nrms.append(nrm)
        wts.append(wt * waz * R * R * np.sin(t))
    return np.concatenate(pts), np.concatenate(nrms), np.concatenate(wts)


def _radiation_weights(m: ElasticMedium, w: Optional[StressWeights]) -> StressWeights:
    return StressWeights.physical(m) if w is None else w


def radiation_probe_pair(
    u: Callable[[np.ndarray], FieldJet],
    v: Callable[[np.ndarray], FieldJet],
    m: ElasticMedium,
    R: float,
    dim: int,
    *,
    side: int = 1,
    weights: Optional[StressWeights] = None,
) -> complex:
    """Integral of P u . v - P v . u over the half-circle/hemisphere of radius R."""
    w = _radiation_weights(m, weights)
    k = wavenumbers(m).k("s", side)
    pts, nrm, wt = hemisphere_rule(R, k, dim, side)
    ju, jv = u(pts), v(pts)
    pu = traction(ju.grad_u, nrm, w, m.mu)
    pv = traction(jv.grad_u, nrm, w, m.mu)
    integrand = np.sum(pu * jv.u - pv * ju.u, axis=-1)
    value = complex(np.sum(wt * integrand))
    logger.debug("radiation pair R=%g: %d nodes, value %.3e", R, pts.shape[0], abs(value))
    return value


def radiation_probe_energy(
    u: Callable[[np.ndarray], FieldJet],
    m: ElasticMedium,
    R: float,
    dim: int,
    *,
    side: int = 1,
    weights: Optional[StressWeights] = None,
) -> complex:
    """Im of the flux of P u . conj(u) minus the potential energies; tends to zero for radiating u."""
    w = _radiation_weights(m, weights)
    kn = wavenumbers(m)
    kp, ks = kn.k("p", side), kn.k("s", side)
    pts, nrm, wt = hemisphere_rule(R, ks, dim, side)
    ju = u(pts)
    g = np.asarray(ju.grad_u, dtype=complex)
    pu = traction(g, nrm, w, m.mu)
    flux = np.sum(wt * np.sum(pu * np.conj(ju.u), axis=-1))
    phi_p = _div(g)
    phi_s = _div_perp(g) if dim == 2 else _curl(g)
    abs_s = np.abs(phi_s) ** 2 if dim == 2 else np.sum(np.abs(phi_s) ** 2, axis=-1)
    energy = (2 * m.mu + m.lam) / kp * np.sum(wt * np.abs(phi_p) ** 2) + m.mu / ks * np.sum(wt * abs_s)
    return complex(flux.imag - energy)


def kupradze_column_field(m: ElasticMedium, side: int, y: Sequence[float], a: Sequence[complex]
                          ) -> Callable[[np.ndarray], FieldJet]:
    """Evaluator x -> jet of Pi_side(x, y) a, for the radiation checks and tests."""
    ya = np.asarray(y, dtype=float)
    av = np.asarray(a, dtype=complex)

    def field(x: np.ndarray) -> FieldJet:
        val, grad, hess = kupradze_derivatives(m, side, np.asarray(x, dtype=float) - ya, order=2)
        return FieldJet(
            np.einsum("...ij,j->...i", val, av),
            np.einsum("...ijl,j->...il", grad, av),
            np.einsum("...ijlq,j->...ilq", hess, av),
        )

    return field
