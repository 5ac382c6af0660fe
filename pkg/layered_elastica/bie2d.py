"""Scattering of a point source by a locally rough interface in the plane.

The field inside B_R is a quadratic finite-element function; outside B_R it
is represented through the two-layered Green's tensor on the circle, so the
boundary traction p is the second unknown. The two are coupled by

    b1: int_B (E(u, phi) - rho omega^2 u.phi) - int_dB p.phi = L1
    b2: (1/2 I - K) u|dB + S p = (1/2 I - K) g

with g = u0 - u_in. The Nystrom nodes sit at half-offset angles so that no
node lies on the flat interface and each half circle is integrated by the
midpoint rule.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, sparse
from scipy.sparse.linalg import splu

from .elastic_fields import RegionTag, kupradze_derivatives, traction
from .errors import InvalidProfileError, SingularSystemError, ValidationError
from .fem import TriMesh, assemble_navier, build_ball_mesh, edge_geometry, load_edges, load_volume
from .green2d import BatchGreen2D, assemble_G, correction_matrix
from .medium import ElasticMedium, StressWeights, wavenumbers
from .quadrature import QuadConfig, fixed_rule, near_interface

logger = logging.getLogger(__name__)

PANEL_ORDER = 16
ROW_CHUNK = 16
COLUMN_CHUNK = 64


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class SurfaceProfile:
    """Interface x2 = f(x1), zero for |x1| >= support_radius."""

    kind: str
    params: Dict[str, object]
    support_radius: float
    lipschitz_bound: float

    @classmethod
    def flat(cls) -> "SurfaceProfile":
        return cls("flat", {}, 0.0, 0.0)

    @classmethod
    def bump(cls, height: float, width: float, center: float = 0.0) -> "SurfaceProfile":
        if width <= 0:
            raise InvalidProfileError(f"bump width must be positive, got {width}")
        return cls("bump", {"height": float(height), "width": float(width), "center": float(center)},
                   abs(center) + width, abs(height) * np.pi / (2 * width))

    @classmethod
    def samples(cls, x: Sequence[float], y: Sequence[float]) -> "SurfaceProfile":
        xs = np.asarray(x, dtype=float)
        ys = np.asarray(y, dtype=float)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise InvalidProfileError("samples need matching 1D x and y arrays")
        if np.any(np.diff(xs) <= 0):
            raise InvalidProfileError("sample abscissae must increase")
        if ys[0] != 0 or ys[-1] != 0:
            raise InvalidProfileError("sampled profile must vanish at both ends")
        lip = float(np.max(np.abs(np.diff(ys) / np.diff(xs))))
        return cls("samples", {"x": xs.tolist(), "y": ys.tolist()}, float(max(abs(xs[0]), abs(xs[-1]))), lip)

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "SurfaceProfile":
        kind = data.get("type")
        try:
            if kind == "flat":
                return cls.flat()
            if kind == "bump":
                return cls.bump(float(data["height"]), float(data["width"]), float(data.get("center", 0.0)))
            if kind == "samples":
                return cls.samples(data["x"], data["y"])
        except KeyError as exc:
            raise InvalidProfileError(f"profile is missing key {exc.args[0]!r}") from exc
        raise InvalidProfileError(f"unknown profile type {kind!r}")

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "SurfaceProfile":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> Dict[str, object]:
        return {"type": self.kind, **self.params}

    def __call__(self, x1: np.ndarray) -> np.ndarray:
        x = np.asarray(x1, dtype=float)
        if self.kind == "flat":
            return np.zeros_like(x)
        if self.kind == "bump":
            h, w, c = self.params["height"], self.params["width"], self.params["center"]
            t = (x - c) / w
            return np.where(np.abs(t) < 1, h * np.cos(0.5 * np.pi * t) ** 2, 0.0)
        return np.interp(x, self.params["x"], self.params["y"], left=0.0, right=0.0)

    def max_height(self) -> float:
        if self.kind == "flat":
            return 0.0
        if self.kind == "bump":
            return abs(float(self.params["height"]))
        return float(np.max(np.abs(self.params["y"])))


@dataclass(frozen=True)
class IncidentSource:
    """Point source u_in = Pi_plus(x, z) a."""

    z: np.ndarray
    a: np.ndarray

    def __post_init__(self) -> None:
        if np.linalg.norm(self.a) == 0:
            raise ValidationError("source polarization must be non-zero")

    @classmethod
    def of(cls, z: Sequence[float], a: Sequence[complex]) -> "IncidentSource":
        return cls(np.asarray(z, dtype=float), np.asarray(a, dtype=complex))

    @classmethod
    def parse(cls, values: Sequence[float]) -> "IncidentSource":
        """[z1, z2, re a1, im a1, re a2, im a2]."""
        if len(values) != 6:
            raise ValidationError("source needs six numbers: z1, z2, re a1, im a1, re a2, im a2")
        v = [float(t) for t in values]
        return cls.of(v[:2], [complex(v[2], v[3]), complex(v[4], v[5])])

    def check(self, profile: SurfaceProfile) -> None:
        if not self.z[1] > float(profile(np.array([self.z[0]]))[0]):
            raise ValidationError(f"source {self.z.tolist()} is not above the interface")

    def field(self, m: ElasticMedium, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """u_in and its gradient [..., i, l] at points x [..., 2]."""
        pv, pg = kupradze_derivatives(m, 1, np.asarray(x, dtype=float) - self.z, order=1)
        return pv @ self.a, np.einsum("...ijl,j->...il", pg, self.a)


@dataclass(frozen=True)
class BoundaryNodes:
    """Nystrom nodes on the circle of radius R at angles (j + 1/2) 2pi/N."""

    R: float
    angles: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    weight: float

    @classmethod
    def circle(cls, R: float, n: int) -> "BoundaryNodes":
        if n < 8 or n % 2:
            raise ValidationError(f"node count must be even and at least 8, got {n}")
        th = (np.arange(n) + 0.5) * 2 * np.pi / n
        nu = np.stack([np.cos(th), np.sin(th)], axis=-1)
        return cls(float(R), th, R * nu, nu, 2 * np.pi * R / n)

    @property
    def n(self) -> int:
        return self.angles.shape[0]

    @property
    def sides(self) -> np.ndarray:
        return np.where(self.points[:, 1] > 0, 1, -1)


@dataclass(frozen=True)
class DiscretizedBall:
    R: float
    nodes: BoundaryNodes
    mesh: TriMesh
    trace: sparse.csr_matrix = field(repr=False)

    @classmethod
    def build(cls, profile: SurfaceProfile, m: ElasticMedium, R: float, n_nodes: int,
              points_per_wavelength: float = 10.0) -> "DiscretizedBall":
        if not R > 2 * profile.support_radius:
            raise InvalidProfileError(f"R = {R} must exceed twice the profile support {profile.support_radius}")
        if profile.max_height() > R / 4:
            raise InvalidProfileError("profile reaches too close to the circle of radius R/2")
        kn = wavenumbers(m)
        # two quadratic nodes per element edge
        h = 2 * (2 * np.pi / kn.k_max) / points_per_wavelength
        mesh = build_ball_mesh(R, h, profile)
        nodes = BoundaryNodes.circle(R, n_nodes)
        return cls(float(R), nodes, mesh, _trace_matrix(mesh, nodes))


def _trace_matrix(mesh: TriMesh, nodes: BoundaryNodes) -> sparse.csr_matrix:
    """Scalar P2 trace at the Nystrom nodes [N, n_nodes]."""
    edges = mesh.boundary_edges
    pa = mesh.ref_points[edges[:, 0]]
    pb = mesh.ref_points[edges[:, 2]]
    ta = np.arctan2(pa[:, 1], pa[:, 0])
    tb = np.arctan2(pb[:, 1], pb[:, 0])
    rows, cols, vals = [], [], []
    for j, th in enumerate(nodes.angles):
        d_a = np.angle(np.exp(1j * (th - ta)))
        span = np.angle(np.exp(1j * (tb - ta)))
        t = d_a / span
        hit = np.nonzero((t >= -1e-12) & (t <= 1 + 1e-12))[0]
        if hit.size == 0:
            raise ValidationError(f"no boundary edge contains node angle {th}")
        e = int(hit[0])
        tt = t[e]
        basis = np.array([(1 - tt) * (1 - 2 * tt), 4 * tt * (1 - tt), tt * (2 * tt - 1)])
        rows.extend([j] * 3)
        cols.extend(edges[e].tolist())
        vals.extend(basis.tolist())
    return sparse.csr_matrix((vals, (rows, cols)), shape=(nodes.n, mesh.n_nodes))


def _vector_trace(trace: sparse.csr_matrix) -> sparse.csr_matrix:
    return sparse.kron(trace, sparse.identity(2), format="csr")


# ---------------------------------------------------------------------------
# Green's tensor on the node set


def _height_levels(z2: np.ndarray, base: float) -> np.ndarray:
    """Dyadic level of |z2| above ``base``; level 0 holds everything below 2*base."""
    return np.floor(np.log2(np.maximum(np.abs(z2), base) / base)).astype(int)


def _remainder_pairwise(m: ElasticMedium, X: np.ndarray, Y: np.ndarray, x_sides: np.ndarray, y_sides: np.ndarray,
                        quad: QuadConfig, keys: Sequence[str]) -> Dict[str, np.ndarray]:
    """Adaptive evaluation, pair by pair, for blocks too close to the interface for a shared real-axis rule."""
    out = {key: np.zeros((X.shape[0], Y.shape[0], 2, 2) + ((2,) if key != "value" else ()), dtype=complex)
           for key in keys}
    for i in range(X.shape[0]):
        for j in range(Y.shape[0]):
            val, gx, gy, _ = correction_matrix(m, X[i], Y[j], RegionTag(int(x_sides[i]), int(y_sides[j])), quad)
            parts = {"value": val, "grad_x": gx, "grad_y": gy}
            for key in keys:
                out[key][i, j] = parts[key]
    return out


def _remainder(m: ElasticMedium, X: np.ndarray, Y: np.ndarray, quad: QuadConfig, gradients: str,
               chunk: int = ROW_CHUNK) -> Dict[str, np.ndarray]:
    """Non-singular part of G for all pairs [nx, ny, ...].

    Points are grouped by dyadic distance to the interface and every block of
    groups gets its own fixed spectral rule, sized for the block's smallest
    decay height, so only the few pairs hugging the interface pay for long paths.
    Blocks whose decay height falls below the real-axis floor go through the
    adaptive integrator pair by pair.
    """
    kn = wavenumbers(m)
    x_sides = np.where(X[:, 1] > 0, 1, -1)
    y_sides = np.where(Y[:, 1] > 0, 1, -1)
    base = max(float(min(np.min(np.abs(X[:, 1])), np.min(np.abs(Y[:, 1])))), 1e-3 / kn.k_max)
    lx = _height_levels(X[:, 1], base)
    ly = _height_levels(Y[:, 1], base)
    shape = {"value": (2, 2), "grad_x": (2, 2, 2), "grad_y": (2, 2, 2)}
    keys = ["value"] + [f"grad_{c}" for c in "xy" if c in gradients]
    out = {key: np.zeros((X.shape[0], Y.shape[0]) + shape[key], dtype=complex) for key in keys}
    total_nodes = 0
    for gx in np.unique(lx):
        ix = np.nonzero(lx == gx)[0]
        for gy in np.unique(ly):
            iy = np.nonzero(ly == gy)[0]
            decay = float(np.min(np.abs(X[ix, 1])) + np.min(np.abs(Y[iy, 1])))
            shift = float(np.max(np.abs(X[ix, 0])) + np.max(np.abs(Y[iy, 0])))
            if near_interface(decay, kn.k_max):
                part = _remainder_pairwise(m, X[ix], Y[iy], x_sides[ix], y_sides[iy], quad, keys)
                for key in keys:
                    out[key][np.ix_(ix, iy)] = part[key]
                continue
            rule = fixed_rule(kn.branch_points(), decay, shift, quad, refine=1)
            batch = BatchGreen2D(m, rule)
            total_nodes += rule.nodes.size * ix.size * iy.size
            for i in range(0, ix.size, chunk):
                rows = ix[i:i + chunk]
                part = batch.evaluate(X[rows], Y[iy], x_sides[rows], y_sides[iy], gradients)
                for key in keys:
                    out[key][np.ix_(rows, iy)] = part[key]
    logger.debug("remainder on %d x %d pairs, %.3g pair-nodes", X.shape[0], Y.shape[0], float(total_nodes))
    return out


def reference_wave(x: Sequence[float], z: Sequence[float], a: Sequence[complex], m: ElasticMedium,
                   quad: QuadConfig = QuadConfig()) -> np.ndarray:
    """u0(x, z, a): G(x, z) a for sources above the flat interface, zero for sources in a dip below it."""
    za = np.asarray(z, dtype=float)
    if za[1] <= 0:
        return np.zeros(2, dtype=complex)
    return assemble_G(x, za, m, quad).apply(a)


def _reference_on_nodes(m: ElasticMedium, X: np.ndarray, src: IncidentSource, quad: QuadConfig
                        ) -> Tuple[np.ndarray, np.ndarray]:
    """u0 and its gradient at points X, batched."""
    if src.z[1] <= 0:
        return np.zeros((X.shape[0], 2), dtype=complex), np.zeros((X.shape[0], 2, 2), dtype=complex)
    rem = _remainder(m, X, src.z[None, :], quad, "x")
    u0 = np.einsum("xij,j->xi", rem["value"][:, 0], src.a)
    g0 = np.einsum("xijl,j->xil", rem["grad_x"][:, 0], src.a)
    upper = X[:, 1] > 0
    if np.any(upper):
        ui, gi = src.field(m, X[upper])
        u0[upper] += ui
        g0[upper] += gi
    return u0, g0


# ---------------------------------------------------------------------------
# boundary operators


def _traction_rows(grad_y: np.ndarray, nu: np.ndarray, w: StressWeights, mu: float) -> np.ndarray:
    """Pi2[..., j, k]: traction in y of the row field G_{j.}(x, y); grad_y[..., j, k, l]."""
    return traction(grad_y, nu[..., None, :], w, mu)


def _self_panels(m: ElasticMedium, nodes: BoundaryNodes, w: StressWeights) -> Tuple[np.ndarray, np.ndarray]:
    """Integrals of Pi and its double-layer kernel over each node's own panel, graded toward the node."""
    t, wt = np.polynomial.legendre.leggauss(PANEL_ORDER)
    t = 0.5 * (t + 1)
    wt = 0.5 * wt
    half = np.pi / nodes.n
    # u = s^3 clusters the nodes at the singular end
    u = t**3
    du = 3 * t**2 * wt
    offsets = np.concatenate([-half * u, half * u])
    dth = np.concatenate([half * du, half * du])
    S = np.zeros((nodes.n, 2, 2), dtype=complex)
    K = np.zeros((nodes.n, 2, 2), dtype=complex)
    for i, (th, side) in enumerate(zip(nodes.angles, nodes.sides)):
        ang = th + offsets
        nu = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        y = nodes.R * nu
        pv, pg = kupradze_derivatives(m, int(side), nodes.points[i] - y, order=1)
        ds = nodes.R * dth
        S[i] = np.einsum("qjk,q->jk", pv, ds)
        K[i] = np.einsum("qjk,q->jk", _traction_rows(-pg, nu, w, m.mu), ds)
    return S, K


@dataclass(frozen=True)
class BoundaryOperators:
    """Nystrom matrices of S and K on the node set, each [2N, 2N] in (node, component) order."""

    nodes: BoundaryNodes
    S: np.ndarray
    K: np.ndarray

    def apply_S(self, density: np.ndarray) -> np.ndarray:
        return (self.S @ np.asarray(density, dtype=complex).reshape(-1)).reshape(-1, 2)

    def apply_K(self, trace_values: np.ndarray) -> np.ndarray:
        return (self.K @ np.asarray(trace_values, dtype=complex).reshape(-1)).reshape(-1, 2)


def boundary_operators(nodes: BoundaryNodes, m: ElasticMedium, quad: QuadConfig = QuadConfig(),
                       weights: Optional[StressWeights] = None) -> BoundaryOperators:
    """S = int G g ds and K = int Pi2 g ds with the Kupradze part split off on same-side pairs."""
    if m.dim != 2:
        m = m.with_dim(2)
    w = StressWeights.scattering(m) if weights is None else weights
    w.check(m)
    X = nodes.points
    n = nodes.n
    rem = _remainder(m, X, X, quad, "y")
    Sg = rem["value"].copy()
    gy = rem["grad_y"].copy()
    sides = nodes.sides
    diff = X[:, None, :] - X[None, :, :]
    off = ~np.eye(n, dtype=bool)
    for side in (1, -1):
        mask = off & (sides[:, None] == side) & (sides[None, :] == side)
        pv, pg = kupradze_derivatives(m, side, diff[mask], order=1)
        Sg[mask] += pv
        gy[mask] -= pg
    Kg = _traction_rows(gy, np.broadcast_to(nodes.normals[None, :, :], (n, n, 2)), w, m.mu)
    S = nodes.weight * Sg
    K = nodes.weight * Kg
    # own panel: singular part by graded quadrature, remainder by the midpoint value
    Sp, Kp = _self_panels(m, nodes, w)
    idx = np.arange(n)
    S[idx, idx] = Sp + nodes.weight * rem["value"][idx, idx]
    K[idx, idx] = Kp + nodes.weight * _traction_rows(rem["grad_y"][idx, idx], nodes.normals, w, m.mu)
    S = S.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    K = K.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    return BoundaryOperators(nodes, S, K)


def operator_S(ops: BoundaryOperators, density: np.ndarray) -> np.ndarray:
    return ops.apply_S(density)


def operator_K(ops: BoundaryOperators, trace_values: np.ndarray) -> np.ndarray:
    return ops.apply_K(trace_values)


# ---------------------------------------------------------------------------
# the coupled system


@dataclass(frozen=True)
class CoupledSystem:
    disc: DiscretizedBall
    medium: ElasticMedium
    source: IncidentSource
    profile: SurfaceProfile
    A: sparse.csc_matrix = field(repr=False)
    C: sparse.csr_matrix = field(repr=False)
    ops: BoundaryOperators = field(repr=False)
    F: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)


def assemble_system(disc: DiscretizedBall, m: ElasticMedium, source: IncidentSource, profile: SurfaceProfile,
                    quad: QuadConfig = QuadConfig(), volume_weights: Optional[StressWeights] = None
                    ) -> CoupledSystem:
    """Galerkin rows of b1 and collocation rows of b2 with their right-hand sides.

    ``volume_weights`` replaces the stress weights in the volume form only.
    """
    if m.dim != 2:
        m = m.with_dim(2)
    source.check(profile)
    w = StressWeights.scattering(m)
    wv = w if volume_weights is None else volume_weights
    mesh = disc.mesh
    nodes = disc.nodes
    rho = {1: m.rho_plus, -1: m.rho_minus}
    A = assemble_navier(mesh, m.mu, wv.mu_tilde, wv.lambda_tilde, rho, m.omega)

    tr = _vector_trace(disc.trace)
    C = (tr.T * nodes.weight).tocsr()

    # L1: incident wave over the part of B_R below the interface
    below = np.nonzero(mesh.regions < 0)[0]
    _, _, _, xq = mesh.geometry(below)
    u_in, g_in = source.field(m, xq)
    F = -load_volume(mesh, below, u_in, g_in, m.mu, wv.mu_tilde, wv.lambda_tilde, m.rho_minus, m.omega)
    if len(mesh.interface_edges):
        pts, normal, ds, N = edge_geometry(mesh, mesh.interface_edges)
        # interface edges run left to right, so the rotated normal points up, out of the lower part
        _, gi = source.field(m, pts)
        F += load_edges(mesh, mesh.interface_edges, traction(gi, normal, w, m.mu), ds, N)
    X = nodes.points
    u0, g0 = _reference_on_nodes(m, X, source, quad)
    ui, gi = source.field(m, X)
    upper = (X[:, 1] > 0)[:, None]
    # u_re on the upper arc is u0 - u_in, on the lower arc it is u0
    p_re = traction(np.where(upper[..., None], g0 - gi, g0), nodes.normals, w, m.mu)
    F += C @ p_re.reshape(-1)
    g = u0 - ui

    ops = boundary_operators(nodes, m, quad, w)
    logger.info("system: %d volume dofs, %d boundary dofs", mesh.n_dofs, 2 * nodes.n)
    return CoupledSystem(disc, m, source, profile, A, C, ops, F, g)


@dataclass(frozen=True)
class ScatterSolution:
    """u_hat at mesh nodes [n, 2] and p at Nystrom nodes [N, 2]."""

    u_hat: np.ndarray
    p: np.ndarray
    medium: ElasticMedium
    source: IncidentSource
    profile: SurfaceProfile
    disc: DiscretizedBall = field(repr=False)
    g: np.ndarray = field(repr=False)
    quad: QuadConfig = QuadConfig()

    def trace(self) -> np.ndarray:
        return self.disc.trace @ self.u_hat

    def u_hat_at(self, x: np.ndarray) -> np.ndarray:
        return self.disc.mesh.interpolate(self.u_hat, np.atleast_2d(x))

    def field(self, x: np.ndarray) -> np.ndarray:
        """u_plus above the interface, u_minus below it, inside B_R."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        out = self.u_hat_at(pts)
        below = pts[:, 1] < self.profile(pts[:, 0])
        if np.any(below):
            ui, _ = self.source.field(self.medium, pts[below])
            out[below] += ui
        return out


def solve(system: CoupledSystem) -> ScatterSolution:
    """Schur complement on the boundary unknowns, with a sparse LU of the volume block."""
    disc = system.disc
    tr = _vector_trace(disc.trace)
    M = 0.5 * np.eye(system.ops.K.shape[0]) - system.ops.K
    try:
        lu = splu(system.A.astype(complex))
    except RuntimeError as exc:
        raise SingularSystemError(f"volume block is singular: {exc}") from exc
    n_b = system.C.shape[1]
    C = system.C.tocsc()
    TAiC = np.zeros((tr.shape[0], n_b), dtype=complex)
    for start in range(0, n_b, COLUMN_CHUNK):
        cols = slice(start, min(start + COLUMN_CHUNK, n_b))
        TAiC[:, cols] = tr @ lu.solve(C[:, cols].toarray().astype(complex))
    AiF = lu.solve(system.F.astype(complex))
    schur = system.ops.S + M @ TAiC
    rhs = M @ system.g.reshape(-1) - M @ (tr @ AiF)
    try:
        p = linalg.solve(schur, rhs)
    except linalg.LinAlgError as exc:
        raise SingularSystemError(f"boundary system is singular: {exc}") from exc
    if not np.all(np.isfinite(p)):
        raise SingularSystemError("boundary solve produced non-finite values")
    u = lu.solve(system.F.astype(complex) + C @ p)
    logger.info("solved: |u_hat|_max %.3e, |p|_max %.3e", np.max(np.abs(u)), np.max(np.abs(p)))
    return ScatterSolution(u.reshape(-1, 2), p.reshape(-1, 2), system.medium, system.source, system.profile,
                           disc, system.g)


def solve_scattering(profile: SurfaceProfile, m: ElasticMedium, source: IncidentSource, R: float, n_nodes: int,
                     quad: QuadConfig = QuadConfig(), points_per_wavelength: float = 10.0) -> ScatterSolution:
    disc = DiscretizedBall.build(profile, m, R, n_nodes, points_per_wavelength)
    return solve(assemble_system(disc, m, source, profile, quad))


# ---------------------------------------------------------------------------
# exterior field


def reconstruct_tilde(sol: ScatterSolution, x: np.ndarray) -> np.ndarray:
    """u~(x) = int (Pi2 u~ - G p) ds for points outside B_R, batched [P, 2]."""
    m = sol.medium
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(np.linalg.norm(pts, axis=1) <= sol.disc.R):
        raise ValidationError("exterior reconstruction needs points outside B_R")
    nodes = sol.disc.nodes
    w = StressWeights.scattering(m)
    rem = _remainder(m, pts, nodes.points, sol.quad, "y")
    Gv = rem["value"].copy()
    gy = rem["grad_y"].copy()
    x_sides = np.where(pts[:, 1] > 0, 1, -1)
    for side in (1, -1):
        mask = (x_sides[:, None] == side) & (nodes.sides[None, :] == side)
        if np.any(mask):
            diff = pts[:, None, :] - nodes.points[None, :, :]
            pv, pg = kupradze_derivatives(m, side, diff[mask], order=1)
            Gv[mask] += pv
            gy[mask] -= pg
    Pi2 = _traction_rows(gy, np.broadcast_to(nodes.normals[None], gy.shape[:2] + (2,)), w, m.mu)
    u_tilde = sol.trace() - sol.g
    return nodes.weight * (np.einsum("xyjk,yk->xj", Pi2, u_tilde) - np.einsum("xyjk,yk->xj", Gv, sol.p))


def exterior_field(sol: ScatterSolution, x: np.ndarray) -> np.ndarray:
    """u_plus where x2 > 0, u_minus where x2 < 0, at points outside B_R [P, 2]."""
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    out = reconstruct_tilde(sol, pts)
    u0, _ = _reference_on_nodes(sol.medium, pts, sol.source, sol.quad)
    out += u0
    upper = pts[:, 1] > 0
    if np.any(upper):
        ui, _ = sol.source.field(sol.medium, pts[upper])
        out[upper] -= ui
    return out


def reconstruct_exterior(sol: ScatterSolution, x: Sequence[float]) -> np.ndarray:
    return exterior_field(sol, np.asarray(x, dtype=float)[None, :])[0]
