"""Property suites behind ``verify``.

Each suite maps to the property list of one module and returns a list of
:class:`CheckReport`. ``SUITE_ORDER`` is the order used by ``verify --all``:
cheap algebraic checks first, full solves last.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import integrate

from . import specfun
from .bie2d import IncidentSource, SurfaceProfile, reconstruct_exterior, solve_scattering
from .config import parallel_map
from .elastic_fields import (
    FieldJet,
    SurfaceFrame,
    kupradze_column_field,
    kupradze_tensor,
    radiation_probe_energy,
    radiation_probe_pair,
    stress_direct,
    stress_identity,
    traction,
)
from .errors import ValidationError
from .green2d import assemble_G, correction_U, far_field, interface_residual2d
from .green3d import (
    ANGULAR_TABLE,
    AngularFactor,
    all_keys,
    assemble_G3d,
    family_integral,
    far_field3d,
    hankel_reduce,
    interface_residual3d,
    selected_variants,
    tilde_jump_residual,
)
from .medium import ElasticMedium, StressWeights, beta, scan_determinant, wavenumbers
from .quadrature import QuadConfig, build_path, fourier_inversion, hankel_path_integral, integrate_path

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckReport:
    check: str
    metric: str
    value: float
    threshold: float
    passed: bool
    samples: int
    seconds: float = 0.0
    details: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"check": self.check, self.metric: self.value, "threshold": self.threshold,
                                  "pass": self.passed, "samples": self.samples, "seconds": round(self.seconds, 3)}
        out.update(self.details)
        return out


def _upper(check: str, value: float, threshold: float, samples: int, t0: float, **details: object) -> CheckReport:
    return CheckReport(check, "max_error", float(value), threshold, bool(value < threshold), samples,
                       time.perf_counter() - t0, dict(details))


def _lower(check: str, metric: str, value: float, threshold: float, samples: int, t0: float,
           **details: object) -> CheckReport:
    return CheckReport(check, metric, float(value), threshold, bool(value >= threshold), samples,
                       time.perf_counter() - t0, dict(details))


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) / scale


# ---------------------------------------------------------------------------
# algebraic identities


def suite_stress_identity(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                          samples: int = 1000) -> List[CheckReport]:
    reports = []
    for dim in (2, 3):
        t0 = time.perf_counter()
        md = m.with_dim(dim)
        u = rng.normal(size=(samples, dim)) + 1j * rng.normal(size=(samples, dim))
        grad = rng.normal(size=(samples, dim, dim)) + 1j * rng.normal(size=(samples, dim, dim))
        frame = SurfaceFrame.from_normal(rng.normal(size=(samples, dim)))
        total = md.mu + md.lam
        worst = 0.0
        for mu_t in rng.uniform(0.1, 2.0, 8) * md.mu:
            w = StressWeights(float(mu_t), total - float(mu_t))
            jet = FieldJet(u, grad)
            direct = stress_direct(jet, frame, w, md, dim)
            ident = stress_identity(jet, frame, w, md, dim)
            worst = max(worst, float(np.max(np.abs(direct - ident))))
        reports.append(_upper(f"stress-identity-{dim}d", worst, 1e-13, samples, t0))
    return reports


def suite_angular_identities(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                             samples: int = 50) -> List[CheckReport]:
    t0 = time.perf_counter()
    worst = 0.0
    for t, alpha in zip(rng.uniform(0.0, 20.0, samples), rng.uniform(0.0, 2 * np.pi, samples)):
        for kind in specfun.ANGULAR_WEIGHTS:
            def part(g: float, fn: Callable[[float], float]) -> float:
                return fn(np.exp(1j * t * np.cos(g - alpha)) * float(specfun.angular_weight(kind, g)))

            re, _ = integrate.quad(part, 0.0, 2 * np.pi, args=(np.real,), limit=400, epsabs=1e-14, epsrel=1e-13)
            im, _ = integrate.quad(part, 0.0, 2 * np.pi, args=(np.imag,), limit=400, epsabs=1e-14, epsrel=1e-13)
            worst = max(worst, abs(complex(re, im) - specfun.angular_identity(kind, t, alpha)))
    return [_upper("angular-identities", worst, 1e-10, samples, t0)]


def suite_determinant(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                      samples: int = 100_000) -> List[CheckReport]:
    t0 = time.perf_counter()
    report = scan_determinant(m, samples)
    return [_lower("determinant-scan", "min_abs_D", report.min_abs, np.finfo(float).tiny, samples, t0,
                   argmin=report.argmin)]


def suite_spectral_residual(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                            samples: int = 1000, threshold: float = 1e-12) -> List[CheckReport]:
    kn = wavenumbers(m)
    t0 = time.perf_counter()
    worst2 = 0.0
    heights = rng.uniform(0.1, 2.0, 10) * rng.choice([-1.0, 1.0], 10)
    per = max(1, samples // len(heights))
    for y2 in heights:
        xi = rng.uniform(0.05, 3 * kn.k_max, per)
        for j in (1, 2):
            worst2 = max(worst2, interface_residual2d(j, xi, float(y2), m.with_dim(2)))
    reports = [_upper("spectral-residual-2d", worst2, threshold, per * len(heights), t0)]

    t0 = time.perf_counter()
    m3 = m.with_dim(3)
    variants = selected_variants(m3)
    worst3 = 0.0
    for _ in range(samples):
        x = rng.uniform(0.05, 3 * kn.k_max)
        f = rng.uniform(0.0, 2 * np.pi)
        y3 = float(rng.uniform(0.1, 2.0) * rng.choice([-1.0, 1.0]))
        zeta = (x * np.cos(f), x * np.sin(f))
        j = int(rng.integers(1, 4))
        worst3 = max(
            worst3,
            interface_residual3d(j, zeta, y3, m3, variants),
            tilde_jump_residual("p", j, zeta, y3, m3, variants),
            tilde_jump_residual("s", j, zeta, y3, m3, variants),
        )
    reports.append(_upper("spectral-residual-3d", worst3, threshold, samples, t0, variants=variants))
    return reports


# ---------------------------------------------------------------------------
# quadrature


def _image_kernel(k: float, h: float) -> Callable[[np.ndarray], np.ndarray]:
    def kernel(xi: np.ndarray) -> np.ndarray:
        b = beta(xi, k)
        return np.exp(-b * h) / (2 * b)

    return kernel


def suite_sommerfeld(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                     samples: int = 20) -> List[CheckReport]:
    k = wavenumbers(m).ks_plus
    t0 = time.perf_counter()
    worst2 = 0.0
    for d1, h in zip(rng.uniform(-3.0, 3.0, samples), rng.uniform(0.2, 3.0, samples)):
        exact = 0.25j * specfun.hankel1(0, k * np.hypot(d1, h))
        worst2 = max(worst2, abs(_shifted(k, h, float(d1), quad) - exact) / abs(exact))
    reports = [_upper("sommerfeld-2d", worst2, 1e-8, samples, t0)]

    t0 = time.perf_counter()
    worst3 = 0.0
    for rho, h in zip(rng.uniform(0.0, 3.0, samples), rng.uniform(0.2, 3.0, samples)):
        res = hankel_path_integral(_image_kernel(k, h), 0, float(rho), float(h), branch_points=(k,), power=1,
                                   config=quad, tol=1e-11, regularized=rho == 0)
        r = np.hypot(rho, h)
        exact = np.exp(1j * k * r) / (4 * np.pi * r)
        worst3 = max(worst3, abs(complex(res.value) - exact) / abs(exact))
    reports.append(_upper("sommerfeld-3d", worst3, 1e-8, samples, t0))

    # sources on or just off the interface, where the tails have to be rotated
    t0 = time.perf_counter()
    worst_gamma = 0.0
    for d1, h in zip(rng.uniform(-3.0, 3.0, samples), rng.choice([0.0, 1e-6, 1e-3], samples)):
        d1 = float(np.copysign(max(abs(d1), 0.1), d1))
        exact = 0.25j * specfun.hankel1(0, k * np.hypot(d1, h))
        worst_gamma = max(worst_gamma, abs(_shifted(k, float(h), d1, quad) - exact) / abs(exact))
    reports.append(_upper("sommerfeld-interface", worst_gamma, 1e-8, samples, t0))
    return reports


def _shifted(k: float, h: float, d1: float, quad: QuadConfig) -> complex:
    base = _image_kernel(k, h)

    def kernel(xi: np.ndarray) -> np.ndarray:
        return base(xi) * np.exp(1j * xi * d1)

    return complex(fourier_inversion(kernel, h, branch_points=(k,), shift=d1, config=quad, tol=1e-11).value)


def _direct_polar(f: Callable[[np.ndarray], np.ndarray], mono: Tuple[int, int], rho: float, alpha: float,
                  h: float, bps: Sequence[float], quad: QuadConfig) -> complex:
    """(1/4pi^2) int_0^inf xi^(1+a+b) f(xi) int_0^2pi cos^a sin^b e^{i xi rho cos(g - alpha)} dg dxi."""
    a, b = mono
    path = build_path(bps, h, rho, quad, half_line=True)
    n_g = 64 + int(4 * rho * path.truncation)
    g = 2 * np.pi * np.arange(n_g) / n_g
    wg = (np.cos(g) ** a * np.sin(g) ** b) * (2 * np.pi / n_g)

    def integrand(xi: np.ndarray) -> np.ndarray:
        ang = np.exp(1j * rho * xi[:, None] * np.cos(g - alpha)[None, :]) @ wg
        return f(xi) * xi ** (1 + a + b) * ang

    res = integrate_path(integrand, path, 1e-11, quad.panel_order)
    return complex(res.value) / (4 * np.pi**2)


# ---------------------------------------------------------------------------
# Green's tensors


def _random_point(rng: np.random.Generator, dim: int, side: int) -> np.ndarray:
    p = rng.uniform(-2.0, 2.0, dim)
    p[-1] = side * rng.uniform(0.3, 2.0)
    return p


def _pair(rng: np.random.Generator, dim: int, sx: int, sy: int, min_gap: float = 0.5) -> Tuple[np.ndarray, np.ndarray]:
    while True:
        x, y = _random_point(rng, dim, sx), _random_point(rng, dim, sy)
        if np.linalg.norm(x - y) > min_gap:
            return x, y


def _navier_residual(assemble: Callable, m: ElasticMedium, x: np.ndarray, y: np.ndarray, h: float) -> float:
    dim = x.shape[0]
    center = assemble(x, y)
    H = np.zeros((dim, dim, dim, dim), dtype=complex)
    for q in range(dim):
        e = np.zeros(dim)
        e[q] = h
        H[..., q] = (assemble(x + e, y).grad_x - assemble(x - e, y).grad_x) / (2 * h)
    lap = np.einsum("ijll->ij", H)
    grad_div = np.einsum("ljli->ij", H)
    rho = m.rho(1 if x[-1] > 0 else -1)
    res = m.mu * lap + (m.lam + m.mu) * grad_div + rho * m.omega**2 * center.entries
    return float(np.max(np.abs(res))) / (rho * m.omega**2 * float(np.max(np.abs(center.entries))))


def _jump(assemble: Callable, m: ElasticMedium, x_tan: np.ndarray, y: np.ndarray, eps: float
          ) -> Tuple[float, float]:
    """Richardson-extrapolated jumps of G and of the generalized stress of its columns across x_dim = 0."""
    dim = y.shape[0]
    nu = np.zeros(dim)
    nu[-1] = 1.0
    w = StressWeights.scattering(m)
    limits = {}
    for side in (1, -1):
        vals = []
        for e in (eps, eps / 2):
            x = np.append(x_tan, side * e)
            g = assemble(x, y)
            trac = np.stack([traction(g.grad_x[:, j, :], nu, w, m.mu) for j in range(dim)], axis=-1)
            vals.append((g.entries, trac))
        limits[side] = tuple(2 * b - a for a, b in zip(vals[0], vals[1]))
    jg = _rel(limits[1][0], limits[-1][0])
    jt = _rel(limits[1][1], limits[-1][1])
    return jg, jt


def _tensor_suite(name: str, assemble: Callable, m: ElasticMedium, rng: np.random.Generator, n_fd: int,
                  n_jump: int, n_recip: int, tol_fd: float, tol_jump: float, tol_recip: float) -> List[CheckReport]:
    dim = m.dim
    kn = wavenumbers(m)
    lam_s = 2 * np.pi / kn.k_max
    reports = []

    t0 = time.perf_counter()
    pairs = [_pair(rng, dim, int(rng.choice([-1, 1])), int(rng.choice([-1, 1]))) for _ in range(n_fd)]
    fd = parallel_map(lambda p: _navier_residual(assemble, m, p[0], p[1], 1e-3 * lam_s), pairs)
    reports.append(_upper(f"{name}-navier", max(fd, default=0.0), tol_fd, n_fd, t0))

    t0 = time.perf_counter()
    jobs = [(rng.uniform(-1.5, 1.5, dim - 1), _random_point(rng, dim, int(rng.choice([-1, 1]))))
            for _ in range(n_jump)]
    jumps = parallel_map(lambda p: _jump(assemble, m, p[0], p[1], 1e-2 * lam_s), jobs)
    reports.append(_upper(f"{name}-jump-G", max((j[0] for j in jumps), default=0.0), tol_jump, n_jump, t0))
    reports.append(_upper(f"{name}-jump-traction", max((j[1] for j in jumps), default=0.0), tol_jump, n_jump, t0))

    t0 = time.perf_counter()
    pairs = [_pair(rng, dim, 1, -1) for _ in range(n_recip)]
    rec = parallel_map(lambda p: _rel(assemble(p[0], p[1]).entries, assemble(p[1], p[0]).entries.T), pairs)
    reports.append(_upper(f"{name}-reciprocity", max(rec, default=0.0), tol_recip, n_recip, t0))
    return reports


def suite_green2d(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator, n_fd: int = 50,
                  n_jump: int = 20, n_recip: int = 20) -> List[CheckReport]:
    m2 = m.with_dim(2)
    fine = quad.replace(tol=min(quad.tol, 1e-12))
    return _tensor_suite("green2d", lambda x, y: assemble_G(x, y, m2, fine), m2, rng, n_fd, n_jump, n_recip,
                         1e-4, 1e-4, 1e-7)


def suite_green3d(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator, n_fd: int = 10,
                  n_jump: int = 10, n_recip: int = 10, n_hankel: int = 5) -> List[CheckReport]:
    m3 = m.with_dim(3)
    selected_variants(m3)
    fine = quad.replace(tol=min(quad.tol, 1e-12))
    reports = _tensor_suite("green3d", lambda x, y: assemble_G3d(x, y, m3, fine), m3, rng, n_fd, n_jump,
                            n_recip, 1e-3, 1e-3, 1e-6)

    t0 = time.perf_counter()
    kn = wavenumbers(m3)
    k = kn.ks_plus
    worst = 0.0
    kinds = list(ANGULAR_TABLE)[:n_hankel]
    for kind in kinds:
        factor = AngularFactor(kind)
        x = np.array([*rng.uniform(-1.5, 1.5, 2), rng.uniform(0.3, 1.5)])
        y = np.array([*rng.uniform(-1.5, 1.5, 2), rng.uniform(0.3, 1.5)])
        h = float(x[2] + y[2])
        f = _image_kernel(k, h)
        via_hankel = hankel_reduce(f, factor, x, y, m3, fine, decay_rate=h, branch_points=(k,))
        d1, d2 = x[0] - y[0], x[1] - y[1]
        direct = _direct_polar(f, factor.monomial, float(np.hypot(d1, d2)), float(np.arctan2(d2, d1)), h, (k,),
                               fine)
        worst = max(worst, abs(via_hankel - direct) / max(abs(direct), 1e-300))
    reports.append(_upper("green3d-hankel-vs-direct", worst, 1e-6, len(kinds), t0))
    return reports


def suite_degenerate(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                     samples: int = 20) -> List[CheckReport]:
    fine = quad.replace(tol=min(quad.tol, 1e-13))
    reports = []
    for dim in (2, 3):
        t0 = time.perf_counter()
        md = ElasticMedium(m.lam, m.mu, m.rho_plus, m.rho_plus, m.omega, dim)
        assemble = assemble_G if dim == 2 else assemble_G3d
        pairs = [_pair(rng, dim, int(rng.choice([-1, 1])), int(rng.choice([-1, 1]))) for _ in range(samples)]
        errs = parallel_map(
            lambda p: _rel(assemble(p[0], p[1], md, fine).entries, kupradze_tensor(md, 1, p[0], p[1]).entries),
            pairs,
        )
        reports.append(_upper(f"degenerate-{dim}d", max(errs), 1e-10, samples, t0))
    return reports


# ---------------------------------------------------------------------------
# asymptotics and radiation


def _decay_exponent(radii: Sequence[float], residuals: Sequence[float]) -> float:
    r = np.log(np.asarray(radii, dtype=float))
    e = np.log(np.maximum(np.asarray(residuals, dtype=float), 1e-300))
    slope = np.polyfit(r, e, 1)[0]
    return float(-slope)


def _directions_2d(n: int) -> List[np.ndarray]:
    half = (n + 1) // 2
    th = np.pi * (np.arange(half) + 0.5) / half
    angles = np.concatenate([th, -th])[:n]
    return [np.array([np.cos(t), np.sin(t)]) for t in angles]


def _directions_3d(n: int, side: int) -> List[np.ndarray]:
    phi = (2 * np.arange(n) + 1) * np.pi / 8
    polar = np.where(np.arange(n) % 2 == 0, np.pi / 6, np.pi / 3)
    return [np.array([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), side * np.cos(t)]) for t, f in zip(polar, phi)]


RADII = (50.0, 100.0, 200.0, 400.0, 800.0)


def suite_far_field(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator, directions: int = 8,
                    radii: Sequence[float] = RADII) -> List[CheckReport]:
    fine = quad.replace(tol=min(quad.tol, 1e-12))
    kn = wavenumbers(m)
    m2 = m.with_dim(2)
    t0 = time.perf_counter()
    y = np.array([0.3, 0.7])
    jobs = [(a, j, d) for a in ("p", "s") for j in (1, 2) for d in _directions_2d(directions)]

    def rate2(job: Tuple[str, int, np.ndarray]) -> float:
        a, j, d = job
        pattern = far_field(a, j, d, y, m2)
        k = kn.k(a, 1 if d[1] > 0 else -1)
        res = [abs(correction_U(a, j, r * d, y, m2, fine)[0] - np.exp(1j * k * r) * r**-0.5 * pattern.value)
               for r in radii]
        return _decay_exponent(radii, res)

    rates = parallel_map(rate2, jobs)
    reports = [_lower("far-field-2d", "min_exponent", min(rates), 0.70, len(jobs), t0)]

    t0 = time.perf_counter()
    m3 = m.with_dim(3)
    variants = selected_variants(m3)
    seen = set()
    jobs3 = []
    for key in all_keys():
        if key.case in seen:
            continue
        seen.add(key.case)
        side = key.x_sides()[0]
        y3 = np.array([0.2, -0.1, key.y_side * 0.6])
        jobs3.extend((key, d, y3) for d in _directions_3d(directions, side))

    def rate3(job: Tuple[object, np.ndarray, np.ndarray]) -> float:
        key, d, y3 = job
        pattern = far_field3d(key, d, y3, m3, variants=variants)
        k = kn.k(key.wave, 1 if d[2] > 0 else -1)
        res = [abs(family_integral(key, r * d, y3, m3, fine, variants) - np.exp(1j * k * r) / r * pattern.value)
               for r in radii]
        return _decay_exponent(radii, res)

    rates3 = parallel_map(rate3, jobs3)
    reports.append(_lower("far-field-3d", "min_exponent", min(rates3), 0.95 * 1.25, len(jobs3), t0))
    return reports


def suite_radiation(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator,
                    radii_2d: Sequence[float] = (25.0, 50.0, 100.0, 200.0, 400.0),
                    radii_3d: Sequence[float] = (4.0, 8.0, 16.0, 32.0)) -> List[CheckReport]:
    reports = []
    for dim, radii in ((2, radii_2d), (3, radii_3d)):
        t0 = time.perf_counter()
        md = m.with_dim(dim)
        worst_pair, worst_energy = np.inf, np.inf
        for side in (1, -1):
            y1 = np.zeros(dim)
            y1[-1] = side * 0.5
            y2 = np.full(dim, 0.4)
            y2[-1] = side * 1.1
            a1 = np.zeros(dim, dtype=complex)
            a1[0] = 1.0
            a2 = np.full(dim, 0.3 + 0j)
            a2[-1] = 1j
            u = kupradze_column_field(md, side, y1, a1)
            v = kupradze_column_field(md, side, y2, a2)
            pair = [abs(radiation_probe_pair(u, v, md, R, dim, side=side)) for R in (radii[0], radii[-1])]
            energy = [abs(radiation_probe_energy(u, md, R, dim, side=side)) for R in (radii[0], radii[-1])]
            worst_pair = min(worst_pair, pair[0] / max(pair[1], 1e-300))
            worst_energy = min(worst_energy, energy[0] / max(energy[1], 1e-300))
        reports.append(_lower(f"radiation-pair-{dim}d", "min_ratio", worst_pair, 5.0, 2, t0,
                              radii=[radii[0], radii[-1]]))
        reports.append(_lower(f"radiation-energy-{dim}d", "min_ratio", worst_energy, 5.0, 2, t0,
                              radii=[radii[0], radii[-1]]))
    return reports


# ---------------------------------------------------------------------------
# solver


def _sample_points(R: float, z: np.ndarray, n: int = 24) -> np.ndarray:
    rr = np.linspace(0.2, 0.85, 4) * R
    th = 2 * np.pi * (np.arange(n) + 0.25) / n
    pts = np.array([[r * np.cos(t), r * np.sin(t)] for r in rr for t in th])
    keep = (np.linalg.norm(pts - z, axis=1) > 0.5) & (np.abs(pts[:, 1]) > 0.05 * R)
    return pts[keep]


def suite_flat_interface(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator, nodes: int = 512,
                         R: float = 4.0, points_per_wavelength: float = 10.0,
                         threshold: float = 1e-3) -> List[CheckReport]:
    t0 = time.perf_counter()
    m2 = m.with_dim(2)
    src = IncidentSource.of([0.4, 0.8], [1.0, 0.5j])
    sol = solve_scattering(SurfaceProfile.flat(), m2, src, R, nodes, quad, points_per_wavelength)
    pts = _sample_points(R, src.z)
    exact = np.array([assemble_G(p, src.z, m2, quad).apply(src.a) - kupradze_tensor(m2, 1, p, src.z).apply(src.a)
                      for p in pts])
    got = sol.u_hat_at(pts)
    err = float(np.linalg.norm(got - exact) / np.linalg.norm(exact))
    return [_upper("flat-interface", err, threshold, pts.shape[0], t0, nodes=nodes, R=R)]


def suite_rough_interface(m: ElasticMedium, quad: QuadConfig, rng: np.random.Generator, nodes: int = 256,
                          R: float = 4.0, points_per_wavelength: float = 10.0,
                          threshold: float = 2e-2) -> List[CheckReport]:
    t0 = time.perf_counter()
    m2 = m.with_dim(2)
    wavelength = 2 * np.pi / wavenumbers(m2).k_max
    profile = SurfaceProfile.bump(0.2 * wavelength, min(0.2 * R, wavelength))
    src = IncidentSource.of([0.3, 1.0], [0.0, 1.0])
    sol = solve_scattering(profile, m2, src, R, nodes, quad, points_per_wavelength)
    eps = 0.02 * R
    th = 2 * np.pi * (np.arange(12) + 0.3) / 12
    dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    inner = sol.field((R - eps) * dirs)
    outer = np.array([reconstruct_exterior(sol, (R + eps) * d) for d in dirs])
    err = float(np.linalg.norm(inner - outer) / np.linalg.norm(outer))
    return [_upper("rough-interface-trace", err, threshold, th.size, t0, nodes=nodes, R=R)]


SuiteFn = Callable[..., List[CheckReport]]

SUITES: Dict[str, SuiteFn] = {
    "stress-identity": suite_stress_identity,
    "angular-identities": suite_angular_identities,
    "determinant-scan": suite_determinant,
    "spectral-residual": suite_spectral_residual,
    "sommerfeld": suite_sommerfeld,
    "degenerate": suite_degenerate,
    "green2d": suite_green2d,
    "radiation": suite_radiation,
    "far-field": suite_far_field,
    "green3d": suite_green3d,
    "flat-interface": suite_flat_interface,
    "rough-interface": suite_rough_interface,
}
SUITE_ORDER = tuple(SUITES)


def run_suite(name: str, m: ElasticMedium, quad: QuadConfig = QuadConfig(), seed: int = 0,
              **options: object) -> List[CheckReport]:
    try:
        fn = SUITES[name]
    except KeyError as exc:
        raise ValidationError(f"unknown verify suite {name!r}; known: {', '.join(SUITE_ORDER)}") from exc
    rng = np.random.default_rng(seed)
    reports = fn(m, quad, rng, **options)
    for r in reports:
        level = logging.INFO if r.passed else logging.WARNING
        logger.log(level, "%s: %s = %.3e (threshold %.1e) %s", r.check, r.metric, r.value, r.threshold,
                   "ok" if r.passed else "FAILED")
    return reports


def run_all(m: ElasticMedium, quad: QuadConfig = QuadConfig(), seed: int = 0) -> List[CheckReport]:
    out: List[CheckReport] = []
    for name in SUITE_ORDER:
        out.extend(run_suite(name, m, quad, seed))
    return out
