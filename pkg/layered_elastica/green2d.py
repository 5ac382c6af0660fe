"""Two-layered elastic Green's tensor in the plane.

The tensor is assembled from two scalar potentials per column,

    G_j = -kp^-2 grad G_{p,j} - ks^-2 grad-perp G_{s,j},   G_{a,j} = G~_{a,j} + U_{a,j},

where G~ is the acoustic-type auxiliary field (free-space derivative plus an
R/T reflected or transmitted term) and U is the coupling correction from the
interface system. Every non-singular piece is a Fourier integral whose
integrand has the separable form

    amp(xi) * exp(-beta_{a,sx}(xi) |x2|) * exp(-beta_{b,sy}(xi) |y2|) * exp(i xi (x1 - y1)),

with a the wave type seen from x and b the wave type seen from y. Gradients in
x and y are taken under the integral: d/dx1 -> i xi, d/dx2 -> -sx beta_{a,sx},
d/dy1 -> -i xi, d/dy2 -> -sy beta_{b,sy}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .elastic_fields import (
    GreenMatrix,
    RegionTag,
    check_separation,
    kupradze_derivatives,
    phi_derivatives,
)
from .errors import GrazingDirectionError
from .medium import ElasticMedium, SpectralBetas, Wavenumbers, c0, determinant, refl_trans, wavenumbers
from .quadrature import FixedRule, QuadConfig, QuadResult, fourier_inversion

logger = logging.getLogger(__name__)

WAVES = ("p", "s")
THETA_MIN = 1e-3


@dataclass(frozen=True)
class ScalarPotentialPair:
    G_p: complex
    G_s: complex
    grad_G_p: np.ndarray
    grad_G_s: np.ndarray


@dataclass(frozen=True)
class FarFieldPattern:
    wave_type: str
    column: int
    direction: np.ndarray
    value: complex
    gradient_y: np.ndarray


def _wave_index(a: str) -> int:
    if a not in WAVES:
        raise ValueError(f"wave type must be 'p' or 's', got {a!r}")
    return WAVES.index(a)


def _column_index(j: int) -> int:
    if j not in (1, 2):
        raise ValueError(f"column must be 1 or 2, got {j}")
    return j - 1


class SpectralSet:
    """Per-xi constants shared by every coefficient at a batch of spectral points."""

    def __init__(self, m: ElasticMedium, xi: np.ndarray, kn: Optional[Wavenumbers] = None):
        self.m = m
        self.kn = kn or wavenumbers(m)
        self.xi = np.asarray(xi, dtype=complex)
        self.b = SpectralBetas.at(self.xi, self.kn)
        kn = self.kn
        self.C0 = c0(m)
        self.D = determinant(kn, self.b, self.xi)
        self.sig_p = self.b.bp_plus / kn.kp_plus**2 + self.b.bp_minus / kn.kp_minus**2
        self.sig_s = self.b.bs_plus / kn.ks_plus**2 + self.b.bs_minus / kn.ks_minus**2
        self.dp = kn.kp_plus**-2 - kn.kp_minus**-2
        self.ds = kn.ks_plus**-2 - kn.ks_minus**-2
        self.RT = {
            a: refl_trans(self.b.get(a, 1), self.b.get(a, -1), kn.k(a, 1), kn.k(a, -1)) for a in WAVES
        }

    def beta(self, a: str, side: int) -> np.ndarray:
        return self.b.get(a, side)


def _ab_parts(a: str, j: int, y_side: int, sp: SpectralSet) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficient A (y above) or B (y below) split into its e^{-beta_s|y2|} and e^{-beta_p|y2|} factors."""
    kn = sp.kn
    xi = sp.xi
    pre = sp.C0 * xi / sp.D
    side = 1 if y_side > 0 else -1
    kp2 = kn.k("p", side) ** -2
    ks2 = kn.k("s", side) ** -2
    bp = sp.beta("p", side)
    bs = sp.beta("s", side)
    key = (a, j, side)
    if key == ("p", 1, 1):
        return 1j * pre * ks2 * bs, 1j * pre * (-sp.ds * kp2 * xi**2 / sp.sig_p)
    if key == ("p", 1, -1):
        return 1j * pre * (-ks2 * bs), 1j * pre * (-sp.ds * kp2 * xi**2 / sp.sig_p)
    if key == ("s", 1, 1):
        return pre * (-sp.dp * ks2 * bs * xi / sp.sig_s), pre * kp2 * xi
    if key == ("s", 1, -1):
        return pre * (sp.dp * ks2 * bs * xi / sp.sig_s), pre * kp2 * xi
    if key == ("p", 2, 1):
        return pre * ks2 * xi, pre * (-sp.ds * kp2 * bp * xi / sp.sig_p)
    if key == ("p", 2, -1):
        return pre * ks2 * xi, pre * (sp.ds * kp2 * bp * xi / sp.sig_p)
    if key == ("s", 2, 1):
        return 1j * pre * (sp.dp * ks2 * xi**2 / sp.sig_s), 1j * pre * (-kp2 * bp)
    if key == ("s", 2, -1):
        return 1j * pre * (sp.dp * ks2 * xi**2 / sp.sig_s), 1j * pre * (kp2 * bp)
    raise ValueError(f"no coefficient for {key}")


def coeff_AB(a: str, j: int, xi: complex, y2: float, m: ElasticMedium) -> complex:
    """A_{a,j}(xi, y2) for y2 > 0, B_{a,j}(xi, y2) for y2 < 0."""
    _wave_index(a)
    _column_index(j)
    sp = SpectralSet(m, np.atleast_1d(np.asarray(xi, dtype=complex)))
    side = 1 if y2 >= 0 else -1
    part_s, part_p = _ab_parts(a, j, side, sp)
    e_s = np.exp(-sp.beta("s", side) * abs(y2))
    e_p = np.exp(-sp.beta("p", side) * abs(y2))
    out = part_s * e_s + part_p * e_p
    return complex(out[0]) if np.ndim(xi) == 0 else out


def _tilde_amp(a: str, j: int, x_side: int, y_side: int, sp: SpectralSet) -> np.ndarray:
    """Amplitude of the reflected/transmitted term of G~_{a,j} (free-space part excluded)."""
    m = sp.m
    R, T = sp.RT[a]
    bplus, bminus = sp.beta(a, 1), sp.beta(a, -1)
    if y_side > 0:
        gamma = R / (2 * bplus) if x_side > 0 else T / (2 * bplus)
    else:
        gamma = (2 - T) / (2 * bminus) if x_side > 0 else -R / (2 * bminus)
    return _tilde_mult(a, j, y_side, sp) * gamma


def _tilde_mult(a: str, j: int, y_side: int, sp: SpectralSet) -> np.ndarray:
    """Spectral symbol of the derivative of Phi_{k_a} that makes up G~_{a,j}."""
    m = sp.m
    c_a = 1.0 / (2 * m.mu + m.lam) if a == "p" else 1.0 / m.mu
    by = sp.beta(a, y_side)
    if (a, j) == ("p", 1):
        return 1j * sp.xi * c_a
    if (a, j) in (("p", 2), ("s", 1)):
        return c_a * y_side * by
    return -1j * sp.xi * c_a


def potential_amplitudes(sp: SpectralSet, x_side: int, y_side: int, part: str = "total") -> np.ndarray:
    """amp[n, a, j, b] of the non-singular part of G_{a,j}; a, b index (p, s)."""
    n = sp.xi.shape[0]
    amp = np.zeros((n, 2, 2, 2), dtype=complex)
    for ia, a in enumerate(WAVES):
        for j in (1, 2):
            if part in ("total", "tilde"):
                amp[:, ia, j - 1, ia] += _tilde_amp(a, j, x_side, y_side, sp)
            if part in ("total", "U"):
                part_s, part_p = _ab_parts(a, j, y_side, sp)
                amp[:, ia, j - 1, 0] += part_p
                amp[:, ia, j - 1, 1] += part_s
    return amp


def beta_pair(sp: SpectralSet, side: int) -> np.ndarray:
    return np.stack([sp.beta("p", side), sp.beta("s", side)], axis=-1)


def green_amplitudes(sp: SpectralSet, x_side: int, y_side: int) -> np.ndarray:
    """M[n, i, j, a, b]: spectral amplitude of the non-singular part of G_{ij}."""
    kn = sp.kn
    bx = beta_pair(sp, x_side)
    amp = potential_amplitudes(sp, x_side, y_side)
    xi = sp.xi
    # grad for the p potential, grad-perp for the s potential, both acting on exp(i xi x1 - beta |x2|)
    vp = np.stack([1j * xi, -x_side * bx[:, 0]], axis=-1)
    vs = np.stack([-x_side * bx[:, 1], -1j * xi], axis=-1)
    kp2 = kn.k("p", x_side) ** -2
    ks2 = kn.k("s", x_side) ** -2
    M = -kp2 * np.einsum("ni,njb->nijb", vp, amp[:, 0])
    M_s = -ks2 * np.einsum("ni,njb->nijb", vs, amp[:, 1])
    out = np.zeros(M.shape[:3] + (2, 2), dtype=complex)
    out[:, :, :, 0, :] = M
    out[:, :, :, 1, :] = M_s
    return out


def interface_residual2d(j: int, xi: Sequence[float], y2: float, m: ElasticMedium) -> float:
    """Worst relative residual of the transformed transmission system at x2 = 0+-, over real ``xi``.

    With equal Lame constants the conditions reduce to continuity of G_p, G_s
    (div and div-perp of the column) and of the two displacement components.
    """
    jj = _column_index(j)
    if y2 == 0:
        raise ValueError("source must lie off the interface")
    sp = SpectralSet(m, np.atleast_1d(np.asarray(xi, dtype=float)).astype(complex))
    kn = sp.kn
    xi_c = sp.xi
    sy = 1 if y2 > 0 else -1
    by = beta_pair(sp, sy)
    ey = np.exp(-by * abs(y2))
    traces = {}
    for sx in (1, -1):
        amp = potential_amplitudes(sp, sx, sy)[:, :, jj, :]
        val = np.einsum("nab,nb->na", amp, ey)
        dval = -sx * beta_pair(sp, sx) * val
        if sx == sy:
            for ia, a in enumerate(WAVES):
                free = _tilde_mult(a, j, sy, sp) / (2 * by[:, ia]) * ey[:, ia]
                val[:, ia] += free
                dval[:, ia] += sy * by[:, ia] * free
        kp2 = kn.k("p", sx) ** -2
        ks2 = kn.k("s", sx) ** -2
        u1 = -kp2 * 1j * xi_c * val[:, 0] - ks2 * dval[:, 1]
        u2 = -kp2 * dval[:, 0] + ks2 * 1j * xi_c * val[:, 1]
        traces[sx] = np.stack([val[:, 0], val[:, 1], u1, u2], axis=-1)
    res = np.abs(traces[1] - traces[-1])
    scale = np.maximum(np.abs(traces[1]), np.abs(traces[-1]))
    worst = np.max(res / np.maximum(np.max(scale, axis=-1, keepdims=True), 1e-300))
    return float(worst)


def _sides(x: np.ndarray, y: np.ndarray, x_side: Optional[int], y_side: Optional[int]) -> RegionTag:
    return RegionTag.of(x, y, x_side, y_side)


def _decay(x: np.ndarray, y: np.ndarray) -> float:
    return abs(float(x[-1])) + abs(float(y[-1]))


def _integrate(kernel, x: np.ndarray, y: np.ndarray, kn: Wavenumbers, quad: QuadConfig) -> QuadResult:
    return fourier_inversion(
        kernel,
        _decay(x, y),
        branch_points=kn.branch_points(),
        shift=float(x[0] - y[0]),
        config=quad,
    )


def _potential_integral(m: ElasticMedium, x: np.ndarray, y: np.ndarray, region: RegionTag, part: str,
                        quad: QuadConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Non-singular parts of G_{a,j} and their x-gradients: arrays [a, j] and [a, j, l]."""
    kn = wavenumbers(m)
    sx, sy = region.x_region, region.y_region
    dx1 = float(x[0] - y[0])
    ax2, ay2 = abs(float(x[1])), abs(float(y[1]))

    def kernel(xi: np.ndarray) -> np.ndarray:
        sp = SpectralSet(m, xi, kn)
        amp = potential_amplitudes(sp, sx, sy, part)
        bx = beta_pair(sp, sx)
        by = beta_pair(sp, sy)
        ex = np.exp(-bx * ax2 + 1j * xi[:, None] * dx1)
        ey = np.exp(-by * ay2)
        val = np.einsum("najb,na,nb->naj", amp, ex, ey)
        g1 = 1j * xi[:, None, None] * val
        g2 = -sx * bx[:, :, None] * val
        return np.concatenate([val[..., None], g1[..., None], g2[..., None]], axis=-1)

    res = _integrate(kernel, x, y, kn, quad)
    out = np.asarray(res.value)
    return out[..., 0], out[..., 1:]


def _free_potentials(m: ElasticMedium, x: np.ndarray, y: np.ndarray, side: int) -> Tuple[np.ndarray, np.ndarray]:
    """Free-space parts of G~_{a,j}: c_a times a first derivative of Phi, with x-gradients."""
    kn = wavenumbers(m)
    diff = x - y
    val = np.zeros((2, 2), dtype=complex)
    grad = np.zeros((2, 2, 2), dtype=complex)
    for ia, a in enumerate(WAVES):
        _, d1, d2 = phi_derivatives(kn.k(a, side), diff, 2, 2)
        if a == "p":
            c = 1.0 / (2 * m.mu + m.lam)
            # j = 1 -> d/dx1, j = 2 -> d/dx2
            val[ia] = c * d1
            grad[ia] = c * d2
        else:
            c = 1.0 / m.mu
            val[ia] = c * np.array([d1[1], -d1[0]])
            grad[ia] = c * np.array([d2[1], -d2[0]])
    return val, grad


def potentials(j: int, x: Sequence[float], y: Sequence[float], m: ElasticMedium, quad: QuadConfig = QuadConfig(),
               part: str = "total", *, x_side: Optional[int] = None,
               y_side: Optional[int] = None) -> ScalarPotentialPair:
    """G_{p,j} and G_{s,j} (or only their G~ or U parts) with x-gradients."""
    jj = _column_index(j)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    region = _sides(xa, ya, x_side, y_side)
    val, grad = _potential_integral(m, xa, ya, region, part, quad)
    if part in ("total", "tilde") and region.same_side:
        fv, fg = _free_potentials(m, xa, ya, region.x_region)
        val = val + fv
        grad = grad + fg
    return ScalarPotentialPair(complex(val[0, jj]), complex(val[1, jj]), grad[0, jj], grad[1, jj])


def tilde_G(a: str, j: int, x: Sequence[float], y: Sequence[float], m: ElasticMedium,
            quad: QuadConfig = QuadConfig(), *, x_side: Optional[int] = None,
            y_side: Optional[int] = None) -> Tuple[complex, np.ndarray]:
    pair = potentials(j, x, y, m, quad, "tilde", x_side=x_side, y_side=y_side)
    return (pair.G_p, pair.grad_G_p) if _wave_index(a) == 0 else (pair.G_s, pair.grad_G_s)


def correction_U(a: str, j: int, x: Sequence[float], y: Sequence[float], m: ElasticMedium,
                 quad: QuadConfig = QuadConfig(), *, x_side: Optional[int] = None,
                 y_side: Optional[int] = None) -> Tuple[complex, np.ndarray]:
    pair = potentials(j, x, y, m, quad, "U", x_side=x_side, y_side=y_side)
    return (pair.G_p, pair.grad_G_p) if _wave_index(a) == 0 else (pair.G_s, pair.grad_G_s)


def correction_matrix(m: ElasticMedium, x: np.ndarray, y: np.ndarray, region: RegionTag,
                      quad: QuadConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray, QuadResult]:
    """Non-singular part of G with its x- and y-gradients, by adaptive quadrature."""
    kn = wavenumbers(m)
    sx, sy = region.x_region, region.y_region
    dx1 = float(x[0] - y[0])
    ax2, ay2 = abs(float(x[1])), abs(float(y[1]))

    def kernel(xi: np.ndarray) -> np.ndarray:
        sp = SpectralSet(m, xi, kn)
        M = green_amplitudes(sp, sx, sy)
        bx = beta_pair(sp, sx)
        by = beta_pair(sp, sy)
        ex = np.exp(-bx * ax2 + 1j * xi[:, None] * dx1)
        ey = np.exp(-by * ay2)
        terms = np.einsum("nijab,na,nb->nijab", M, ex, ey)
        val = terms.sum(axis=(-2, -1))
        gx1 = 1j * xi[:, None, None] * val
        gx2 = np.einsum("nijab,na->nij", terms, -sx * bx)
        gy1 = -gx1
        gy2 = np.einsum("nijab,nb->nij", terms, -sy * by)
        return np.stack([val, gx1, gx2, gy1, gy2], axis=-1)

    res = _integrate(kernel, x, y, kn, quad)
    out = np.asarray(res.value)
    return out[..., 0], out[..., 1:3], out[..., 3:5], res


def assemble_G(x: Sequence[float], y: Sequence[float], m: ElasticMedium, quad: QuadConfig = QuadConfig(), *,
               x_side: Optional[int] = None, y_side: Optional[int] = None) -> GreenMatrix:
    """G(x, y) with its gradients in x and y; gradient index last."""
    if m.dim != 2:
        m = m.with_dim(2)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    check_separation(m, xa, ya)
    region = _sides(xa, ya, x_side, y_side)
    val, gx, gy, res = correction_matrix(m, xa, ya, region, quad)
    if region.same_side:
        pv, pg = kupradze_derivatives(m, region.x_region, xa - ya, order=1)
        val = val + pv
        gx = gx + pg
        gy = gy - pg
    logger.debug("G(%s, %s) [%s]: %d nodes, error %.2e", xa, ya, region.label(), res.nodes_used,
                 res.error_estimate)
    return GreenMatrix(val, xa, ya, region, grad_x=gx, grad_y=gy)


def far_field(a: str, j: int, x_hat: Sequence[float], y: Sequence[float], m: ElasticMedium,
              theta_min: float = THETA_MIN) -> FarFieldPattern:
    """Leading coefficient of U_{a,j}(r x_hat, y) ~ e^{i k r} r^{-1/2} U^inf."""
    _wave_index(a)
    _column_index(j)
    d = np.asarray(x_hat, dtype=float)
    d = d / np.linalg.norm(d)
    ya = np.asarray(y, dtype=float)
    sin_t, cos_t = d[1], d[0]
    if abs(sin_t) < theta_min:
        raise GrazingDirectionError(f"direction {d.tolist()} is within {theta_min} of the interface")
    kn = wavenumbers(m)
    x_side = 1 if sin_t > 0 else -1
    y_side = -1 if ya[1] < 0 else 1
    k = kn.k(a, x_side)
    xi = np.array([k * cos_t], dtype=complex)
    sp = SpectralSet(m, xi, kn)
    part_s, part_p = _ab_parts(a, j, y_side, sp)
    e_s = np.exp(-sp.beta("s", y_side) * abs(ya[1]))
    e_p = np.exp(-sp.beta("p", y_side) * abs(ya[1]))
    coef = complex((part_s * e_s + part_p * e_p)[0])
    dcoef = complex((-y_side * (sp.beta("s", y_side) * part_s * e_s + sp.beta("p", y_side) * part_p * e_p))[0])
    phase = np.exp(-0.25j * np.pi) if x_side > 0 else np.exp(0.75j * np.pi)
    scale = phase * np.sqrt(k / (2 * np.pi)) * sin_t
    osc = np.exp(-1j * k * ya[0] * cos_t)
    value = scale * coef * osc
    grad = np.array([-1j * k * cos_t * value, scale * dcoef * osc])
    return FarFieldPattern(a, j, d, complex(value), grad)


# ---------------------------------------------------------------------------
# batched evaluation on a fixed spectral rule, for the boundary operators


class BatchGreen2D:
    """Non-singular part of G for many point pairs at once.

    The rule must be built for the smallest decay height and the largest
    horizontal offset of all pairs that will be evaluated.
    """

    def __init__(self, m: ElasticMedium, rule: FixedRule):
        self.m = m if m.dim == 2 else m.with_dim(2)
        self.kn = wavenumbers(self.m)
        self.rule = rule
        self._cache: Dict[Tuple[int, int], Tuple[np.ndarray, SpectralSet]] = {}

    def _amps(self, sx: int, sy: int) -> Tuple[np.ndarray, SpectralSet]:
        key = (sx, sy)
        if key not in self._cache:
            sp = SpectralSet(self.m, self.rule.nodes, self.kn)
            self._cache[key] = (green_amplitudes(sp, sx, sy), sp)
        return self._cache[key]

    def evaluate(self, X: np.ndarray, Y: np.ndarray, x_sides: np.ndarray, y_sides: np.ndarray,
                 gradients: str = "") -> Dict[str, np.ndarray]:
        """Values [nx, ny, i, j] and, on request ('x', 'y' or 'xy'), gradients [..., l]."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        nx, ny = X.shape[0], Y.shape[0]
        xi = self.rule.nodes
        w = self.rule.weights / (2 * np.pi)
        out = {"value": np.zeros((nx, ny, 2, 2), dtype=complex)}
        if "x" in gradients:
            out["grad_x"] = np.zeros((nx, ny, 2, 2, 2), dtype=complex)
        if "y" in gradients:
            out["grad_y"] = np.zeros((nx, ny, 2, 2, 2), dtype=complex)
        for sx in (1, -1):
            ix = np.nonzero(np.where(x_sides > 0, 1, -1) == sx)[0]
            if ix.size == 0:
                continue
            for sy in (1, -1):
                iy = np.nonzero(np.where(y_sides > 0, 1, -1) == sy)[0]
                if iy.size == 0:
                    continue
                M, sp = self._amps(sx, sy)
                bx = beta_pair(sp, sx)
                by = beta_pair(sp, sy)
                ex = np.exp(-bx[None] * np.abs(X[ix, 1])[:, None, None] + 1j * xi[None, :, None] * X[ix, 0][:, None, None])
                ey = np.exp(-by[None] * np.abs(Y[iy, 1])[:, None, None] - 1j * xi[None, :, None] * Y[iy, 0][:, None, None])
                ey = ey * w[None, :, None]
                sel = np.ix_(ix, iy)
                left = np.einsum("nijab,xna->xnijb", M, ex)
                out["value"][sel] = np.einsum("xnijb,ynb->xyij", left, ey, optimize=True)
                if "x" in gradients:
                    g1 = np.einsum("nijab,xna->xnijb", M * (1j * xi)[:, None, None, None, None], ex)
                    g2 = np.einsum("nijab,xna->xnijb", M * (-sx * bx)[:, None, None, :, None], ex)
                    out["grad_x"][sel + (slice(None), slice(None), 0)] = np.einsum("xnijb,ynb->xyij", g1, ey, optimize=True)
                    out["grad_x"][sel + (slice(None), slice(None), 1)] = np.einsum("xnijb,ynb->xyij", g2, ey, optimize=True)
                if "y" in gradients:
                    h1 = np.einsum("xnijb,n->xnijb", left, -1j * xi)
                    out["grad_y"][sel + (slice(None), slice(None), 0)] = np.einsum("xnijb,ynb->xyij", h1, ey, optimize=True)
                    out["grad_y"][sel + (slice(None), slice(None), 1)] = np.einsum(
                        "xnijb,ynb->xyij", left, ey * (-sy * by)[None], optimize=True
                    )
        return out
