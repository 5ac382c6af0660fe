"""Oscillatory spectral integrals along indented real-axis paths.

Two path families are built here:

* the real line, dipping below the branch points +k and passing above -k
  (the cuts run upward from +k and downward from -k);
* the Hankel path: the negative real axis approached from above, a small
  semicircle over the origin, then the same indented positive axis.

When the vertical decay h = |x2| + |y2| falls below the floor, the tails past
the branch points leave the axis along the steepest-descent rays of
exp(-xi (h - i d)), d being the signed horizontal offset (rho for the Hankel
path). On those rays the integrand decays at the image distance |h - i d|,
so points on or next to the interface still integrate, as long as they are
not also close horizontally.

Integration is composite Gauss-Legendre on panels. The adaptive driver
compares each panel against its two halves and keeps refining the worst
panel until the summed estimate meets the tolerance or the node budget runs
out. Kernels may be vector valued; the leading axis is always the node axis.
"""
from __future__ import annotations

import heapq
import json
import logging
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import specfun
from .errors import BudgetExceededError, PathIndependenceError, SingularOriginError, SlowDecayError

logger = logging.getLogger(__name__)

Kernel = Callable[[np.ndarray], np.ndarray]

# decay floor relative to the largest shear wavenumber
H_MIN_FACTOR = 1e-2
# origin semicircle and base indentation, relative to the smallest wavenumber
INDENT_FRACTION = 0.05


@dataclass(frozen=True)
class QuadConfig:
    tol: float = 1e-10
    node_budget: int = 200_000
    indent_scale: float = 1.0
    panel_order: int = 16

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "QuadConfig":
        known = {k: data[k] for k in ("tol", "node_budget", "indent_scale", "panel_order") if k in data}
        cfg = cls(**known)  # type: ignore[arg-type]
        if cfg.tol <= 0 or cfg.node_budget <= 0 or cfg.indent_scale <= 0:
            raise ValueError("tol, node_budget and indent_scale must be positive")
        return cfg

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "QuadConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    def replace(self, **kw: object) -> "QuadConfig":
        data = self.to_dict()
        data.update(kw)
        return QuadConfig(**data)  # type: ignore[arg-type]


@dataclass(frozen=True)
class QuadResult:
    value: Union[complex, np.ndarray]
    error_estimate: float
    nodes_used: int
    converged: bool = True


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    def map(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        d = self.b - self.a
        z = self.a + t * d
        # real-axis segments keep a +0.0 imaginary part (upper lip of the negative axis)
        if self.a.imag == 0 and self.b.imag == 0:
            z = z.real + 0j
        return z, np.full(t.shape, d, dtype=complex)

    @property
    def length(self) -> float:
        return abs(self.b - self.a)


@dataclass(frozen=True)
class Arc:
    center: complex
    radius: float
    theta0: float
    theta1: float

    def map(self, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        th = self.theta0 + t * (self.theta1 - self.theta0)
        e = np.exp(1j * th)
        return self.center + self.radius * e, 1j * self.radius * e * (self.theta1 - self.theta0)

    @property
    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius


Segment = Union[Line, Arc]


@dataclass(frozen=True)
class SpectralPath:
    segments: Tuple[Segment, ...]
    indent_radius: float
    truncation: float
    node_budget: int
    # preferred initial panel length on real segments, as a function of |xi|
    panel_scale: Tuple[float, float, float] = (np.inf, np.inf, 1.0)

    def clearance(self, points: Sequence[float], samples: int = 64) -> float:
        t = np.linspace(0.0, 1.0, samples)
        best = np.inf
        for seg in self.segments:
            z, _ = seg.map(t)
            for p in points:
                best = min(best, float(np.min(np.abs(z - p))))
        return best


def _clusters(points: Sequence[float], radius: float) -> List[Tuple[float, float]]:
    """Merge branch points closer than 4*radius; returns (center, arc radius) pairs."""
    pts = sorted(set(float(p) for p in points))
    groups: List[List[float]] = []
    for p in pts:
        if groups and p - groups[-1][-1] < 4 * radius:
            groups[-1].append(p)
        else:
            groups.append([p])
    return [((g[0] + g[-1]) / 2, (g[-1] - g[0]) / 2 + radius) for g in groups]


def truncation_point(k_max: float, decay_rate: float, tol: float, growth: int = 3) -> float:
    h = decay_rate
    return k_max + (np.log(10.0 / tol) + growth * np.log(1.0 + k_max + 40.0 / h)) / h


def check_decay(decay_rate: float, k_max: float, shift: float = 0.0) -> None:
    """Refuse pairs whose image distance hypot(decay_rate, shift) is below the floor."""
    h_min = H_MIN_FACTOR / k_max
    if not float(np.hypot(decay_rate, shift)) >= h_min:
        raise SlowDecayError(
            f"decay rate {decay_rate:.3e} with offset {abs(shift):.3e} below floor {h_min:.3e}; "
            "the points nearly coincide on the interface"
        )


def near_interface(decay_rate: float, k_max: float) -> bool:
    """True when the vertical decay alone is too slow and the tails need rotating."""
    return decay_rate < H_MIN_FACTOR / k_max


def indent_radius(branch_points: Sequence[float], shift: float, config: QuadConfig) -> float:
    k_min = min(branch_points)
    r = INDENT_FRACTION * k_min * config.indent_scale
    if shift > 0:
        # exp(i xi x) and H(xi rho) grow like exp(r*shift) off the axis
        r = min(r, 1.0 / shift)
    return r


def build_path(
    branch_points: Sequence[float],
    decay_rate: float,
    shift: float,
    config: QuadConfig,
    *,
    hankel: bool = False,
    half_line: bool = False,
    growth: int = 3,
    rays: bool = False,
) -> SpectralPath:
    """Indented path for the Fourier (real line), Hankel or Bessel half-line integrals.

    With ``rays`` the real part stops at 2*k_max and both tails follow the
    steepest-descent direction of exp(-xi (decay_rate - i shift)); ``shift``
    must then carry the sign it has in the kernel.
    """
    k_max = max(branch_points)
    offset = abs(shift)
    r = indent_radius(branch_points, offset, config)
    clusters = _clusters(branch_points, r)
    reach = 1.5 * (clusters[-1][0] + clusters[-1][1])
    r0 = INDENT_FRACTION * min(branch_points) * config.indent_scale
    if offset > 0:
        r0 = min(r0, 1.0 / offset)
    if rays and half_line:
        raise ValueError("the half-line path has no rotated tails")
    if rays:
        rate = float(np.hypot(decay_rate, shift))
        x_end = max(2.0 * k_max, reach)
        tail = truncation_point(k_max, rate, config.tol, growth)
    else:
        rate = decay_rate
        x_end = max(truncation_point(k_max, decay_rate, config.tol, growth), reach)

    segs: List[Segment] = []
    cursor: complex = complex(-x_end) if not half_line else 0j
    if rays:
        segs.append(Line(cursor + tail * complex(-decay_rate, shift) / rate, cursor))
    if not half_line:
        for c, rad in reversed(clusters):
            segs.append(Line(cursor, complex(-c - rad)))
            segs.append(Arc(complex(-c), rad, np.pi, 0.0))
            cursor = complex(-c + rad)
        if hankel:
            segs.append(Line(cursor, complex(-r0)))
            segs.append(Arc(0j, r0, np.pi, 0.0))
            cursor = complex(r0)
    for c, rad in clusters:
        segs.append(Line(cursor, complex(c - rad)))
        segs.append(Arc(complex(c), rad, np.pi, 2 * np.pi))
        cursor = complex(c + rad)
    segs.append(Line(cursor, complex(x_end)))
    if rays:
        segs.append(Line(complex(x_end), x_end + tail * complex(decay_rate, shift) / rate))
    segs = [s for s in segs if s.length > 0]
    panel = (2 * np.pi / offset if offset > 0 else np.inf, 4.0 / rate, 0.5 * k_max)
    return SpectralPath(tuple(segs), r, x_end, config.node_budget, panel)


@lru_cache(maxsize=8)
def _gl(order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(order)
    return (x + 1) / 2, w / 2


def _initial_panels(path: SpectralPath) -> List[Tuple[int, float, float]]:
    out: List[Tuple[int, float, float]] = []
    osc, dec, base = path.panel_scale
    for i, seg in enumerate(path.segments):
        if isinstance(seg, Arc):
            n = 4
            out.extend((i, j / n, (j + 1) / n) for j in range(n))
            continue
        a, b = seg.a, seg.b
        total = abs(b - a)
        t = 0.0
        while t < 1.0 - 1e-15:
            x = abs(a + t * (b - a))
            step = min(osc, dec, max(base, 0.25 * x)) / total
            t1 = min(1.0, t + step)
            out.append((i, t, t1))
            t = t1
    return out


class _Integrator:
    def __init__(self, kernel: Kernel, path: SpectralPath, order: int):
        self.kernel = kernel
        self.path = path
        self.x, self.w = _gl(order)
        self.nodes = 0

    def panel(self, seg_idx: int, t0: float, t1: float) -> np.ndarray:
        seg = self.path.segments[seg_idx]
        t = t0 + (t1 - t0) * self.x
        z, dz = seg.map(t)
        vals = np.asarray(self.kernel(z), dtype=complex)
        self.nodes += t.size
        wt = self.w * dz * (t1 - t0)
        return np.tensordot(wt, vals, axes=(0, 0))


def _norm(v: np.ndarray) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def integrate_path(kernel: Kernel, path: SpectralPath, tol: float, order: int = 16) -> QuadResult:
    """Adaptive composite Gauss-Legendre along ``path``; returns the raw contour integral."""
    integ = _Integrator(kernel, path, order)
    heap: List[Tuple[float, int, Tuple[int, float, float, np.ndarray, np.ndarray, np.ndarray]]] = []
    counter = 0
    l1 = 0.0
    total_err = 0.0

    def push(seg_idx: int, t0: float, t1: float, whole: np.ndarray) -> None:
        nonlocal counter, total_err, l1
        tm = 0.5 * (t0 + t1)
        left = integ.panel(seg_idx, t0, tm)
        right = integ.panel(seg_idx, tm, t1)
        err = _norm(whole - (left + right))
        total_err += err
        heapq.heappush(heap, (-err, counter, (seg_idx, t0, t1, left, right, whole)))
        counter += 1

    for seg_idx, t0, t1 in _initial_panels(path):
        whole = integ.panel(seg_idx, t0, t1)
        l1 += _norm(whole)
        push(seg_idx, t0, t1, whole)
        if integ.nodes > path.node_budget:
            raise BudgetExceededError(f"initial panels alone need more than {path.node_budget} nodes")

    # relative to the L1-type size of the integrand, so cancelling kernels still converge
    target = tol * max(l1, np.finfo(float).tiny)
    converged = True
    while heap and total_err > target:
        neg_err, _, (seg_idx, t0, t1, left, right, _whole) = heap[0]
        if t1 - t0 < 1e-13:
            converged = False
            break
        if integ.nodes + 4 * order > path.node_budget:
            raise BudgetExceededError(
                f"adaptive refinement exhausted the node budget ({path.node_budget}); error {total_err:.3e}"
            )
        heapq.heappop(heap)
        total_err -= -neg_err
        tm = 0.5 * (t0 + t1)
        push(seg_idx, t0, tm, left)
        push(seg_idx, tm, t1, right)

    pieces = sorted(((it[2][0], it[2][1], it[2][3] + it[2][4]) for it in heap), key=lambda p: (p[0], p[1]))
    value = np.zeros_like(pieces[0][2]) if pieces else np.zeros(())
    for _, _, v in pieces:
        value = value + v
    total_err = float(sum(-it[0] for it in heap))
    if not converged:
        logger.warning("quadrature stopped at minimum panel width with error %.3e", total_err)
    return QuadResult(value=value, error_estimate=total_err, nodes_used=integ.nodes, converged=converged)


def _squeeze(res: QuadResult, factor: complex) -> QuadResult:
    v = np.asarray(res.value) * factor
    value = complex(v) if v.ndim == 0 else v
    return QuadResult(value, abs(factor) * res.error_estimate, res.nodes_used, res.converged)


def fourier_inversion(
    kernel: Kernel,
    decay_rate: float,
    tol: Optional[float] = None,
    *,
    branch_points: Sequence[float],
    shift: float = 0.0,
    config: QuadConfig = QuadConfig(),
    growth: int = 3,
) -> QuadResult:
    """(1/2pi) * integral of ``kernel`` over the indented real line.

    ``shift`` is the signed offset d = x1 - y1 of the kernel's exp(i xi d).
    Off the interface it only sizes the indentation and the panels; below
    the decay floor its sign picks the half plane the tails turn into.
    """
    tol = config.tol if tol is None else tol
    k_max = max(branch_points)
    check_decay(decay_rate, k_max, shift)
    rays = near_interface(decay_rate, k_max)
    if rays:
        logger.debug("decay %.3e below floor; rotating the tails (offset %.3e)", decay_rate, shift)
    path = build_path(branch_points, decay_rate, shift, config, growth=growth, rays=rays)
    res = integrate_path(kernel, path, tol, config.panel_order)
    return _squeeze(res, 1.0 / (2 * np.pi))


def hankel_path_integral(
    kernel: Kernel,
    order: int,
    rho: float,
    decay_rate: float,
    tol: Optional[float] = None,
    *,
    branch_points: Sequence[float],
    power: Optional[int] = None,
    config: QuadConfig = QuadConfig(),
    regularized: bool = False,
    growth: int = 3,
) -> QuadResult:
    """(1/4pi) * integral over the Hankel path of kernel(xi) H_order(xi rho) xi**power.

    ``power`` defaults to order + 1. The kernel must be a function of xi^2 so
    that the half-line Bessel form, used for small rho and on the axis, is equal.
    Below the decay floor the Hankel path with rotated tails is used for every
    rho > 0, since the half line has no direction of faster decay.
    """
    tol = config.tol if tol is None else tol
    power = order + 1 if power is None else power
    if (order + power) % 2 == 0:
        raise ValueError("order + power must be odd for the Hankel path to fold onto the half line")
    if rho < 0:
        raise SingularOriginError(f"negative radial distance {rho}")
    if rho == 0 and order > 0 and not regularized:
        raise SingularOriginError("rho = 0 with order > 0 needs the regularized (Bessel) form")
    k_max = max(branch_points)
    check_decay(decay_rate, k_max, rho)
    rays = near_interface(decay_rate, k_max)
    if not rays and rho * k_max < 0.5:
        return bessel_half_line_integral(
            kernel, order, rho, decay_rate, tol, branch_points=branch_points, power=power, config=config, growth=growth
        )

    def integrand(z: np.ndarray) -> np.ndarray:
        vals = np.asarray(kernel(z), dtype=complex)
        h = specfun.hankel1(order, z * rho, internal=True) * z**power
        return vals * h.reshape(h.shape + (1,) * (vals.ndim - 1))

    path = build_path(branch_points, decay_rate, rho, config, hankel=True, growth=growth, rays=rays)
    res = integrate_path(integrand, path, tol, config.panel_order)
    return _squeeze(res, 1.0 / (4 * np.pi))


def bessel_half_line_integral(
    kernel: Kernel,
    order: int,
    rho: float,
    decay_rate: float,
    tol: Optional[float] = None,
    *,
    branch_points: Sequence[float],
    power: Optional[int] = None,
    config: QuadConfig = QuadConfig(),
    growth: int = 3,
) -> QuadResult:
    """(1/2pi) * integral over the indented half line of kernel(xi) J_order(xi rho) xi**power."""
    tol = config.tol if tol is None else tol
    power = order + 1 if power is None else power
    check_decay(decay_rate, max(branch_points))

    def integrand(z: np.ndarray) -> np.ndarray:
        vals = np.asarray(kernel(z), dtype=complex)
        j = specfun.bessel_j(order, z * rho, internal=True) * z**power
        return vals * j.reshape(j.shape + (1,) * (vals.ndim - 1))

    path = build_path(branch_points, decay_rate, rho, config, half_line=True, growth=growth)
    res = integrate_path(integrand, path, tol, config.panel_order)
    return _squeeze(res, 1.0 / (2 * np.pi))


@dataclass(frozen=True)
class FixedRule:
    """Nodes and weights of a non-adaptive composite rule shared by many point pairs."""

    nodes: np.ndarray
    weights: np.ndarray
    path: SpectralPath = field(repr=False)


def fixed_rule(
    branch_points: Sequence[float],
    decay_rate: float,
    max_shift: float,
    config: QuadConfig = QuadConfig(),
    *,
    growth: int = 3,
    refine: int = 2,
) -> FixedRule:
    """Composite Gauss-Legendre nodes for the real-line path, sized for the worst pair.

    Each initial panel is split ``refine`` times more; panels next to an arc are
    graded geometrically toward it.
    """
    check_decay(decay_rate, max(branch_points))
    path = build_path(branch_points, decay_rate, max_shift, config, growth=growth)
    x, w = _gl(config.panel_order)
    nodes: List[np.ndarray] = []
    weights: List[np.ndarray] = []
    for seg_idx, t0, t1 in _graded(path, _initial_panels(path)):
        seg = path.segments[seg_idx]
        edges = np.linspace(t0, t1, refine + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            t = a + (b - a) * x
            z, dz = seg.map(t)
            nodes.append(z)
            weights.append(w * dz * (b - a))
    xi = np.concatenate(nodes)
    wt = np.concatenate(weights)
    if xi.size > config.node_budget:
        raise BudgetExceededError(f"fixed rule needs {xi.size} nodes > budget {config.node_budget}")
    logger.debug("fixed rule: %d nodes, truncation %.3g, indent %.3g", xi.size, path.truncation, path.indent_radius)
    return FixedRule(xi, wt, path)


def _graded(path: SpectralPath, panels: List[Tuple[int, float, float]]) -> List[Tuple[int, float, float]]:
    out: List[Tuple[int, float, float]] = []
    for seg_idx, t0, t1 in panels:
        seg = path.segments[seg_idx]
        if isinstance(seg, Arc):
            out.append((seg_idx, t0, t1))
            continue
        near_start = t0 == 0.0 and seg_idx > 0 and isinstance(path.segments[seg_idx - 1], Arc)
        near_end = t1 == 1.0 and seg_idx + 1 < len(path.segments) and isinstance(path.segments[seg_idx + 1], Arc)
        if not (near_start or near_end):
            out.append((seg_idx, t0, t1))
            continue
        cuts = [t0, t1]
        width = t1 - t0
        for j in range(1, 6):
            frac = width * 2.0**-j
            if near_start:
                cuts.append(t0 + frac)
            if near_end:
                cuts.append(t1 - frac)
        cuts = sorted(set(cuts))
        out.extend((seg_idx, a, b) for a, b in zip(cuts[:-1], cuts[1:]))
    return out


def path_independence_check(
    integrate: Callable[[QuadConfig], QuadResult], config: QuadConfig, factor: float = 2.0,
    tolerance: Optional[float] = None,
) -> float:
    """|I(indent) - I(indent/factor)|; large values flag a zero of D near the path.

    With ``tolerance`` set, a difference above ``tolerance * max(1, |I|)`` raises.
    """
    a = integrate(config)
    b = integrate(config.replace(indent_scale=config.indent_scale / factor))
    diff = _norm(np.asarray(a.value) - np.asarray(b.value))
    if tolerance is not None and diff > tolerance * max(1.0, _norm(np.asarray(a.value))):
        raise PathIndependenceError(
            f"integral moved by {diff:.3e} when the indentation shrank by {factor}; a pole may sit near the path"
        )
    return diff
