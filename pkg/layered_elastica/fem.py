"""Quadratic finite elements on a disk cut by the interface.

The mesh is built in reference coordinates where the interface is the
diameter s2 = 0: each half-disk is triangulated separately (Delaunay of
polar rings), the halves are merged along the diameter, and the six-node
elements are then warped vertically so that the diameter follows the profile.
Elements touching the circle get their boundary midpoints on the circle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.spatial import Delaunay

from .errors import InvalidProfileError

logger = logging.getLogger(__name__)

# degree-5 rule on the reference triangle (area 1/2)
_A, _B = 0.101286507323456, 0.797426985353087
_C, _D = 0.470142064105115, 0.059715871789770
TRI_POINTS = np.array([[1 / 3, 1 / 3], [_A, _A], [_B, _A], [_A, _B], [_C, _C], [_D, _C], [_C, _D]])
TRI_WEIGHTS = 0.5 * np.array([0.225] + [0.125939180544827] * 3 + [0.132394152788506] * 3)

EDGE_POINTS, EDGE_WEIGHTS = np.polynomial.legendre.leggauss(4)
EDGE_POINTS = 0.5 * (EDGE_POINTS + 1.0)
EDGE_WEIGHTS = 0.5 * EDGE_WEIGHTS

_KEY_DIGITS = 12


def p2_shape(pts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Values [q, 6] and reference gradients [q, 6, 2]; nodes v0, v1, v2, m01, m12, m20."""
    xi, eta = pts[:, 0], pts[:, 1]
    l1, l2, l3 = 1 - xi - eta, xi, eta
    N = np.stack([l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), l3 * (2 * l3 - 1), 4 * l1 * l2, 4 * l2 * l3, 4 * l3 * l1],
                 axis=-1)
    d1 = np.array([-1.0, 1.0, 0.0])
    d2 = np.array([-1.0, 0.0, 1.0])
    grads = []
    for d in (d1, d2):
        dl1, dl2, dl3 = d
        grads.append(np.stack([
            (4 * l1 - 1) * dl1, (4 * l2 - 1) * dl2, (4 * l3 - 1) * dl3,
            4 * (dl1 * l2 + l1 * dl2), 4 * (dl2 * l3 + l2 * dl3), 4 * (dl3 * l1 + l3 * dl1),
        ], axis=-1))
    return N, np.stack(grads, axis=-1)


def p2_edge_shape(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Values and derivatives of the 1D quadratic basis on (start, middle, end)."""
    N = np.stack([(1 - t) * (1 - 2 * t), 4 * t * (1 - t), t * (2 * t - 1)], axis=-1)
    dN = np.stack([4 * t - 3, 4 - 8 * t, 4 * t - 1], axis=-1)
    return N, dN


def _cutoff(s2: np.ndarray, half: float) -> Tuple[np.ndarray, np.ndarray]:
    t = np.clip(s2 / half, -1.0, 1.0)
    c = np.where(np.abs(t) < 1, (1 - t * t) ** 2, 0.0)
    dc = np.where(np.abs(t) < 1, -4 * t * (1 - t * t) / half, 0.0)
    return c, dc


@dataclass(frozen=True)
class InterfaceWarp:
    """x = (s1, s2 + f(s1) c(s2)): moves the reference diameter onto the profile inside B_{R/2}."""

    f: Callable[[np.ndarray], np.ndarray]
    R: float

    def forward(self, s: np.ndarray) -> np.ndarray:
        c, _ = _cutoff(s[:, 1], self.R / 2)
        out = s.copy()
        out[:, 1] = s[:, 1] + np.asarray(self.f(s[:, 0])) * c
        return out

    def inverse(self, x: np.ndarray, iterations: int = 30) -> np.ndarray:
        s = np.array(x, dtype=float, copy=True)
        fx = np.asarray(self.f(x[:, 0]), dtype=float)
        for _ in range(iterations):
            c, dc = _cutoff(s[:, 1], self.R / 2)
            g = s[:, 1] + fx * c - x[:, 1]
            s[:, 1] -= g / (1 + fx * dc)
            if np.max(np.abs(g)) < 1e-14 * self.R:
                break
        return s


@dataclass(frozen=True)
class TriMesh:
    """Six-node triangles; ``regions`` is +1 above the interface and -1 below."""

    points: np.ndarray
    elements: np.ndarray
    regions: np.ndarray
    ref_points: np.ndarray
    boundary_edges: np.ndarray
    interface_edges: np.ndarray
    warp: InterfaceWarp = field(repr=False)

    @property
    def n_nodes(self) -> int:
        return self.points.shape[0]

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes

    def geometry(self, subset: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Quadrature data per element: weights*|J| [e, q], N [q, 6], physical grads [e, q, 6, 2], points [e, q, 2]."""
        elems = self.elements if subset is None else self.elements[subset]
        X = self.points[elems]
        N, dN = p2_shape(TRI_POINTS)
        J = np.einsum("eai,qaj->eqij", X, dN)
        det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
        if np.any(det <= 0):
            raise InvalidProfileError("mesh has inverted elements; the profile is too steep for this mesh")
        inv = np.linalg.inv(J)
        grads = np.einsum("qaj,eqjl->eqal", dN, inv)
        xq = np.einsum("qa,eai->eqi", N, X)
        return det * TRI_WEIGHTS[None, :], N, grads, xq

    def locate(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Element index and P2 basis values at physical points (element -1 if outside)."""
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        s = self.warp.inverse(pts)
        V = self.ref_points[self.elements[:, :3]]
        idx = np.full(pts.shape[0], -1, dtype=int)
        basis = np.zeros((pts.shape[0], 6))
        T = np.stack([V[:, 1] - V[:, 0], V[:, 2] - V[:, 0]], axis=-1)
        Tinv = np.linalg.inv(T)
        for n, p in enumerate(s):
            lam = np.einsum("eij,ej->ei", Tinv, p[None, :] - V[:, 0])
            ok = np.nonzero((lam[:, 0] >= -1e-10) & (lam[:, 1] >= -1e-10) & (lam.sum(axis=1) <= 1 + 1e-10))[0]
            if ok.size == 0:
                continue
            e = int(ok[0])
            idx[n] = e
            N, _ = p2_shape(lam[e][None, :])
            basis[n] = N[0]
        return idx, basis

    def interpolate(self, values: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Nodal field [n_nodes, c] at physical points; NaN outside the mesh."""
        idx, basis = self.locate(x)
        out = np.full((idx.shape[0],) + values.shape[1:], np.nan, dtype=values.dtype)
        inside = idx >= 0
        out[inside] = np.einsum("pa,pa...->p...", basis[inside], values[self.elements[idx[inside]]])
        return out


def _half_disk(R: float, h: float, upper: bool) -> np.ndarray:
    n_r = max(2, int(np.ceil(R / h)))
    pts = [np.zeros((1, 2))]
    for i in range(1, n_r + 1):
        r = R * i / n_r
        n_t = max(4, 2 * int(np.ceil(np.pi * r / h)))
        k = np.arange(0, n_t // 2 + 1)
        th = 2 * np.pi * k / n_t if upper else np.pi + 2 * np.pi * k / n_t
        pts.append(np.stack([r * np.cos(th), r * np.sin(th)], axis=-1))
    P = np.concatenate(pts)
    # snap the diameter points exactly onto s2 = 0
    P[np.abs(P[:, 1]) < 1e-12 * R, 1] = 0.0
    return P


def _key(p: np.ndarray) -> Tuple[float, float]:
    return (round(float(p[0]), _KEY_DIGITS), round(float(p[1]), _KEY_DIGITS))


def build_ball_mesh(R: float, h: float, f: Callable[[np.ndarray], np.ndarray]) -> TriMesh:
    """Interface-conforming P2 mesh of B_R with edge length about h."""
    index: Dict[Tuple[float, float], int] = {}
    verts: List[np.ndarray] = []
    tris: List[np.ndarray] = []
    regs: List[int] = []
    for upper in (True, False):
        P = _half_disk(R, h, upper)
        tri = Delaunay(P)
        if len(tri.coplanar):
            raise InvalidProfileError("Delaunay dropped mesh points; refine the mesh spacing")
        ids = []
        for p in P:
            k = _key(p)
            if k not in index:
                index[k] = len(verts)
                verts.append(p)
            ids.append(index[k])
        ids_arr = np.asarray(ids)
        for simplex in tri.simplices:
            t = ids_arr[simplex]
            a, b, c = (np.asarray(verts[i]) for i in t)
            area = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(area) < 1e-14 * h * h:
                continue
            tris.append(t if area > 0 else t[[0, 2, 1]])
            regs.append(1 if upper else -1)
    V = np.asarray(verts)
    T = np.asarray(tris)

    edge_owner: Dict[Tuple[int, int], List[int]] = {}
    for e, t in enumerate(T):
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edge_owner.setdefault((min(a, b), max(a, b)), []).append(e)
    mids: Dict[Tuple[int, int], int] = {}
    ref = list(V)
    for (a, b), owners in edge_owner.items():
        m = 0.5 * (V[a] + V[b])
        if len(owners) == 1:
            ang = np.arctan2(m[1], m[0])
            m = R * np.array([np.cos(ang), np.sin(ang)])
        mids[(a, b)] = len(ref)
        ref.append(m)
    ref_pts = np.asarray(ref)
    elements = np.array([
        [t[0], t[1], t[2],
         mids[(min(t[0], t[1]), max(t[0], t[1]))],
         mids[(min(t[1], t[2]), max(t[1], t[2]))],
         mids[(min(t[2], t[0]), max(t[2], t[0]))]]
        for t in T
    ])
    boundary = np.array([[a, mids[(a, b)], b] for (a, b), o in edge_owner.items() if len(o) == 1])
    on_line = np.abs(V[:, 1]) == 0.0
    interface = np.array([[a, mids[(a, b)], b] if V[a, 0] < V[b, 0] else [b, mids[(a, b)], a]
                          for (a, b), o in edge_owner.items() if len(o) == 2 and on_line[a] and on_line[b]])
    warp = InterfaceWarp(f, R)
    mesh = TriMesh(warp.forward(ref_pts), elements, np.asarray(regs), ref_pts, boundary, interface, warp)
    logger.info("mesh: %d elements, %d nodes, %d boundary edges, %d interface edges",
                len(elements), mesh.n_nodes, len(boundary), len(interface))
    return mesh


def _dofs(elements: np.ndarray) -> np.ndarray:
    """[e, 12] global dofs in (node, component) order."""
    return (2 * elements[:, :, None] + np.arange(2)[None, None, :]).reshape(elements.shape[0], 12)


def _perp_grads(grads: np.ndarray) -> np.ndarray:
    """div-perp of the basis field N_a e_i: (d2 N_a, -d1 N_a)[i]."""
    return np.stack([grads[..., 1], -grads[..., 0]], axis=-1)


def assemble_navier(mesh: TriMesh, mu: float, mu_tilde: float, lambda_tilde: float,
                    rho_of_region: Dict[int, float], omega: float) -> sparse.csc_matrix:
    """Galerkin matrix of E(u, v) - rho omega^2 u.v with the generalized stress weights."""
    wdet, N, grads, _ = mesh.geometry()
    rho = np.array([rho_of_region[int(r)] for r in mesh.regions])
    eye = np.eye(2)
    gg = np.einsum("eqa,eqb,eq->eab", grads[..., 0], grads[..., 0], wdet) + np.einsum(
        "eqa,eqb,eq->eab", grads[..., 1], grads[..., 1], wdet)
    div = np.einsum("eqai,eqbk,eq->eaibk", grads, grads, wdet)
    pg = _perp_grads(grads)
    perp = np.einsum("eqai,eqbk,eq->eaibk", pg, pg, wdet)
    mass = np.einsum("qa,qb,eq->eab", N, N, wdet)
    Ke = ((mu + mu_tilde) * np.einsum("eab,ik->eaibk", gg, eye)
          + lambda_tilde * div - mu_tilde * perp
          - (rho * omega**2)[:, None, None, None, None] * np.einsum("eab,ik->eaibk", mass, eye))
    # rows are test functions (b, k), columns trial functions (a, i)
    Ke = Ke.transpose(0, 3, 4, 1, 2).reshape(-1, 12, 12)
    dofs = _dofs(mesh.elements)
    rows = np.repeat(dofs, 12, axis=1).ravel()
    cols = np.tile(dofs, (1, 12)).ravel()
    n = mesh.n_dofs
    return sparse.coo_matrix((Ke.ravel(), (rows, cols)), shape=(n, n)).tocsc()


def load_volume(mesh: TriMesh, subset: np.ndarray, u: np.ndarray, grad_u: np.ndarray, mu: float,
                mu_tilde: float, lambda_tilde: float, rho: float, omega: float) -> np.ndarray:
    """Vector of int (E(u, phi) - rho omega^2 u.phi) over the elements ``subset``; u given at their quad points."""
    wdet, N, grads, _ = mesh.geometry(subset)
    div_u = grad_u[..., 0, 0] + grad_u[..., 1, 1]
    perp_u = grad_u[..., 0, 1] - grad_u[..., 1, 0]
    pg = _perp_grads(grads)
    F = ((mu + mu_tilde) * np.einsum("eqkl,eqbl,eq->ebk", grad_u, grads, wdet)
         + lambda_tilde * np.einsum("eq,eqbk,eq->ebk", div_u, grads, wdet)
         - mu_tilde * np.einsum("eq,eqbk,eq->ebk", perp_u, pg, wdet)
         - rho * omega**2 * np.einsum("eqk,qb,eq->ebk", u, N, wdet))
    out = np.zeros(mesh.n_dofs, dtype=complex)
    np.add.at(out, _dofs(mesh.elements[subset]).ravel(), F.reshape(-1))
    return out


def edge_geometry(mesh: TriMesh, edges: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Points [e, q, 2], unit normals rotated left of the edge direction [e, q, 2], ds weights [e, q], basis [q, 3]."""
    X = mesh.points[edges]
    N, dN = p2_edge_shape(EDGE_POINTS)
    pts = np.einsum("qa,eai->eqi", N, X)
    tang = np.einsum("qa,eai->eqi", dN, X)
    length = np.linalg.norm(tang, axis=-1)
    normal = np.stack([-tang[..., 1], tang[..., 0]], axis=-1) / length[..., None]
    return pts, normal, length * EDGE_WEIGHTS[None, :], N


def load_edges(mesh: TriMesh, edges: np.ndarray, values: np.ndarray, ds: np.ndarray, N: np.ndarray) -> np.ndarray:
    """Vector of int values.phi over the edges; values [e, q, 2] at the edge quadrature points."""
    F = np.einsum("eqk,qa,eq->eak", values, N, ds)
    out = np.zeros(mesh.n_dofs, dtype=complex)
    dofs = (2 * edges[:, :, None] + np.arange(2)[None, None, :]).reshape(-1)
    np.add.at(out, dofs, F.reshape(-1))
    return out
