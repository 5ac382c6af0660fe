from __future__ import annotations

import numpy as np
import pytest

from layered_elastica.elastic_fields import (
    FieldJet,
    SurfaceFrame,
    check_separation,
    helmholtz_recompose,
    helmholtz_split,
    kupradze_column_field,
    kupradze_tensor,
    phi,
    radiation_probe_pair,
    stress_direct,
    stress_identity,
)
from layered_elastica.errors import CoincidentPointsError, InvalidMediumError
from layered_elastica.medium import ElasticMedium, StressWeights
from layered_elastica.specfun import hankel1


@pytest.mark.parametrize("dim", [2, 3])
def test_stress_identity_matches_direct_form(medium: ElasticMedium, dim: int) -> None:
    rng = np.random.default_rng(dim)
    m = medium.with_dim(dim)
    u = rng.normal(size=(50, dim)) + 1j * rng.normal(size=(50, dim))
    grad = rng.normal(size=(50, dim, dim)) + 1j * rng.normal(size=(50, dim, dim))
    frame = SurfaceFrame.from_normal(rng.normal(size=(50, dim)))
    jet = FieldJet(u, grad)
    for w in (StressWeights.physical(m), StressWeights.scattering(m), StressWeights(0.3, m.mu + m.lam - 0.3)):
        np.testing.assert_allclose(stress_direct(jet, frame, w, m, dim), stress_identity(jet, frame, w, m, dim),
                                   atol=1e-12)


def test_both_stress_forms_check_the_weights(medium: ElasticMedium) -> None:
    jet = FieldJet(np.zeros(2, dtype=complex), np.eye(2, dtype=complex))
    frame = SurfaceFrame.from_normal(np.array([0.0, 1.0]))
    bad = StressWeights(0.3, 0.3)
    with pytest.raises(InvalidMediumError):
        stress_direct(jet, frame, bad, medium, 2)
    with pytest.raises(InvalidMediumError):
        stress_identity(jet, frame, bad, medium, 2)


def test_surface_frame_rejects_non_unit_normal() -> None:
    with pytest.raises(ValueError):
        SurfaceFrame(np.array([0.0, 2.0]))


def test_fundamental_solutions() -> None:
    k = 1.4
    assert phi(k, [1.0, 2.0], [0.0, 0.5], 2) == pytest.approx(0.25j * hankel1(0, k * np.hypot(1.0, 1.5)))
    r = np.linalg.norm([0.3, -0.4, 1.2])
    assert phi(k, [0.3, -0.4, 1.2], [0.0, 0.0, 0.0], 3) == pytest.approx(np.exp(1j * k * r) / (4 * np.pi * r))


@pytest.mark.parametrize("dim", [2, 3])
def test_kupradze_symmetry(medium: ElasticMedium, dim: int) -> None:
    m = medium.with_dim(dim)
    x = np.linspace(0.2, 0.9, dim)
    y = -np.linspace(0.1, 0.5, dim)
    G = kupradze_tensor(m, 1, x, y).entries
    np.testing.assert_allclose(G, G.T, rtol=1e-13, atol=1e-15)
    np.testing.assert_allclose(G, kupradze_tensor(m, 1, y, x).entries, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("dim,side", [(2, 1), (2, -1), (3, 1)])
def test_kupradze_columns_solve_navier(medium: ElasticMedium, dim: int, side: int) -> None:
    m = medium.with_dim(dim)
    y = np.zeros(dim)
    a = np.arange(1, dim + 1) + 0.5j
    field = kupradze_column_field(m, side, y, a)
    x = np.linspace(0.7, 1.6, dim)
    jet = field(x)
    lap = np.einsum("ill->i", jet.hess_u)
    grad_div = np.einsum("lli->i", jet.hess_u)
    residual = m.mu * lap + (m.lam + m.mu) * grad_div + m.rho(side) * m.omega**2 * jet.u
    assert np.max(np.abs(residual)) < 1e-10 * np.max(np.abs(m.mu * lap))


@pytest.mark.parametrize("dim", [2, 3])
def test_helmholtz_split_recomposes(medium: ElasticMedium, dim: int) -> None:
    m = medium.with_dim(dim)
    field = kupradze_column_field(m, 1, np.zeros(dim), np.ones(dim))
    x = np.linspace(0.9, 1.7, dim)
    parts = helmholtz_split(field, x)
    np.testing.assert_allclose(helmholtz_recompose(parts, m, 1), field(x).u, rtol=1e-9, atol=1e-12)


def test_coincident_points(medium: ElasticMedium) -> None:
    with pytest.raises(CoincidentPointsError):
        check_separation(medium, [0.1, 0.2], [0.1, 0.2])
    with pytest.raises(CoincidentPointsError):
        kupradze_tensor(medium, 1, [0.1, 0.2], [0.1, 0.2 + 1e-12])


def test_betti_pair_over_full_circle_vanishes(medium: ElasticMedium) -> None:
    # two outgoing solutions with sources inside: upper and lower half-circles cancel
    u = kupradze_column_field(medium, 1, [0.3, 0.5], [1.0, 0.0])
    v = kupradze_column_field(medium, 1, [-0.2, -0.4], [0.2, 1.0j])
    upper = radiation_probe_pair(u, v, medium, 5.0, 2, side=1)
    lower = radiation_probe_pair(u, v, medium, 5.0, 2, side=-1)
    assert abs(upper) > 1e-6
    assert abs(upper + lower) < 1e-8 * abs(upper)

