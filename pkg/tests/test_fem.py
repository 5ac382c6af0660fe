from __future__ import annotations

import numpy as np
import pytest
from scipy.sparse import linalg as splinalg

from layered_elastica.bie2d import SurfaceProfile
from layered_elastica.fem import (
    EDGE_WEIGHTS,
    TRI_POINTS,
    TRI_WEIGHTS,
    InterfaceWarp,
    TriMesh,
    assemble_navier,
    build_ball_mesh,
    edge_geometry,
    load_edges,
    load_volume,
    p2_shape,
)


def test_p2_basis() -> None:
    N, dN = p2_shape(TRI_POINTS)
    np.testing.assert_allclose(N.sum(axis=1), 1.0, atol=1e-14)
    np.testing.assert_allclose(dN.sum(axis=1), 0.0, atol=1e-13)
    nodes = np.array([[0, 0], [1, 0], [0, 1], [0.5, 0], [0.5, 0.5], [0, 0.5]], dtype=float)
    Nn, _ = p2_shape(nodes)
    np.testing.assert_allclose(Nn, np.eye(6), atol=1e-14)


def test_reference_rules() -> None:
    assert TRI_WEIGHTS.sum() == pytest.approx(0.5)
    assert np.sum(TRI_WEIGHTS * TRI_POINTS[:, 0] ** 2) == pytest.approx(1 / 12, rel=1e-10)
    assert EDGE_WEIGHTS.sum() == pytest.approx(1.0)


def test_warp_inverse() -> None:
    warp = InterfaceWarp(SurfaceProfile.bump(0.3, 1.0), 4.0)
    s = np.array([[0.1, 0.05], [-0.5, -0.4], [0.9, 1.5], [2.0, -3.0]])
    np.testing.assert_allclose(warp.inverse(warp.forward(s)), s, atol=1e-12)


def test_flat_mesh_geometry() -> None:
    R = 2.0
    mesh = build_ball_mesh(R, 0.5, SurfaceProfile.flat())
    wdet, _, _, xq = mesh.geometry()
    assert wdet.sum() == pytest.approx(np.pi * R * R, rel=1e-3)
    # regions follow the side of the interface
    centroid = xq.mean(axis=1)
    assert np.all(np.sign(centroid[:, 1]) == mesh.regions)
    ends = mesh.points[mesh.boundary_edges[:, [0, 2]]]
    np.testing.assert_allclose(np.linalg.norm(ends, axis=-1), R, rtol=1e-12)
    pts, normal, ds, _ = edge_geometry(mesh, mesh.interface_edges)
    assert ds.sum() == pytest.approx(2 * R, rel=1e-12)
    np.testing.assert_allclose(pts[..., 1], 0.0, atol=1e-14)
    np.testing.assert_allclose(normal[..., 1], 1.0, atol=1e-12)


def test_bump_mesh_follows_profile() -> None:
    profile = SurfaceProfile.bump(0.3, 0.8)
    mesh = build_ball_mesh(3.0, 0.4, profile)
    nodes = mesh.points[mesh.interface_edges].reshape(-1, 2)
    np.testing.assert_allclose(nodes[:, 1], profile(nodes[:, 0]), atol=1e-12)
    idx, _ = mesh.locate(np.array([[0.0, 0.2], [0.0, 0.4], [5.0, 0.0]]))
    assert mesh.regions[idx[0]] == -1
    assert mesh.regions[idx[1]] == 1
    assert idx[2] == -1


def test_navier_matrix_is_complex_symmetric() -> None:
    mesh = build_ball_mesh(1.5, 0.5, SurfaceProfile.bump(0.2, 0.5))
    A = assemble_navier(mesh, 1.0, 0.6, 2.4, {1: 1.0, -1: 2.0}, 1.3)
    assert A.shape == (mesh.n_dofs, mesh.n_dofs)
    assert splinalg.norm(A - A.T) < 1e-12 * splinalg.norm(A)


def _submesh(mesh: TriMesh, subset: np.ndarray) -> TriMesh:
    return TriMesh(mesh.points, mesh.elements[subset], mesh.regions[subset], mesh.ref_points,
                   mesh.boundary_edges, mesh.interface_edges, mesh.warp)


def test_volume_load_matches_matrix_on_linear_fields() -> None:
    mesh = build_ball_mesh(1.5, 0.5, SurfaceProfile.bump(0.2, 0.5))
    B = np.array([[0.3, -1.0], [0.7, 0.2]]) + 0.1j
    c = np.array([0.5, -0.25j])
    mu, mu_t, lam_t, rho, omega = 1.0, 0.6, 2.4, 1.7, 0.9
    below = np.nonzero(mesh.regions < 0)[0]
    _, _, _, xq = mesh.geometry(below)
    u = c + np.einsum("ij,eqj->eqi", B, xq)
    grad = np.broadcast_to(B, xq.shape[:2] + (2, 2))
    F = load_volume(mesh, below, u, grad, mu, mu_t, lam_t, rho, omega)
    # isoparametric P2 reproduces linear fields, so the load is the Galerkin matrix times nodal values
    A = assemble_navier(_submesh(mesh, below), mu, mu_t, lam_t, {1: rho, -1: rho}, omega)
    U = (c + mesh.points @ B.T).reshape(-1)
    np.testing.assert_allclose(F, A @ U, rtol=1e-10, atol=1e-12)


def test_edge_load_integrates_constants() -> None:
    mesh = build_ball_mesh(1.0, 0.4, SurfaceProfile.flat())
    pts, _, ds, N = edge_geometry(mesh, mesh.boundary_edges)
    values = np.broadcast_to(np.array([1.0, 0.0]), pts.shape)
    F = load_edges(mesh, mesh.boundary_edges, values, ds, N)
    # the edge basis sums to one, so the first components add up to the arc length
    assert F[0::2].sum().real == pytest.approx(2 * np.pi, rel=1e-3)
    assert abs(F[1::2].sum()) < 1e-14
