from __future__ import annotations

import numpy as np
import pytest

from layered_elastica import green3d
from layered_elastica.elastic_fields import kupradze_tensor
from layered_elastica.errors import BranchCutError, GrazingDirectionError, InvalidKeyError
from layered_elastica.green3d import (
    ANGULAR_TABLE,
    TYPO_KEYS,
    TYPO_VARIANTS,
    AngularFactor,
    Coeff3DKey,
    all_keys,
    angular_coefficients,
    assemble_G3d,
    coeff3d,
    correction3d,
    far_field3d,
    hankel_reduce,
    interface_residual3d,
    monomial_weights,
    selected_variants,
    tilde_G3d,
    tilde_jump_residual,
)
from layered_elastica.medium import ElasticMedium, beta, wavenumbers
from layered_elastica.quadrature import QuadConfig


def test_keys() -> None:
    keys = all_keys()
    assert len(keys) == len(set(keys))
    assert {key.case for key in keys} == {1, 2, 3, 4, 5, 6}
    key = Coeff3DKey("A_p", 3, "minus")
    assert key.wave == "p"
    assert key.y_side == 1
    assert key.x_sides() == (-1,)
    assert Coeff3DKey("T_s", 1, "none", 2).y_side == -1
    with pytest.raises(InvalidKeyError):
        Coeff3DKey("A_p", 4, "plus")
    with pytest.raises(InvalidKeyError):
        Coeff3DKey("R_s", 1, "none", 3)


def test_coefficient_needs_matching_source_side(medium3: ElasticMedium) -> None:
    with pytest.raises(InvalidKeyError):
        coeff3d(Coeff3DKey("A_p", 1, "plus"), 1.0, -0.5, medium3)


def test_angular_coefficients() -> None:
    assert angular_coefficients(0, 0) == ((0, 1.0 + 0j),)
    assert dict(angular_coefficients(1, 0)) == pytest.approx({-1: 0.5, 1: 0.5})
    assert dict(angular_coefficients(0, 1)) == pytest.approx({-1: 0.5j, 1: -0.5j})


@pytest.mark.parametrize("kind", sorted(ANGULAR_TABLE))
def test_reduction_table_agrees_with_monomial_weights(kind: str) -> None:
    factor = AngularFactor(kind)
    for alpha in (0.0, 0.7, 2.9):
        expected = monomial_weights(factor.monomial, alpha)
        got = {(order, power): w for order, power, w in factor.rows(alpha)}
        assert set(k for k, v in expected.items() if abs(v) > 1e-14) <= set(got)
        for k, v in got.items():
            assert expected.get(k, 0j) == pytest.approx(v, abs=1e-14)


def test_unknown_angular_factor() -> None:
    with pytest.raises(InvalidKeyError):
        AngularFactor("tan")


def _weyl(k: float):
    def f(xi: np.ndarray) -> np.ndarray:
        b = beta(xi, k)
        return np.exp(-b * 1.1) / (2 * b)

    return f


def test_hankel_reduce_constant_factor(medium3: ElasticMedium, quad: QuadConfig) -> None:
    k = 1.0
    x, y = [0.6, -0.3, 0.8], [0.0, 0.2, 0.3]
    got = hankel_reduce(_weyl(k), AngularFactor("const"), x, y, medium3, quad, decay_rate=1.1, branch_points=(k,))
    R = np.sqrt(0.6**2 + 0.5**2 + 1.1**2)
    assert got == pytest.approx(np.exp(1j * k * R) / (4 * np.pi * R), rel=1e-8)


def test_hankel_reduce_cos_factor(medium3: ElasticMedium, quad: QuadConfig) -> None:
    k = 1.0
    x, y = [0.6, -0.3, 0.8], [0.0, 0.2, 0.3]
    got = hankel_reduce(_weyl(k), AngularFactor("cos"), x, y, medium3, quad, decay_rate=1.1, branch_points=(k,))
    d1 = 0.6
    R = np.sqrt(0.6**2 + 0.5**2 + 1.1**2)
    g = np.exp(1j * k * R) / (4 * np.pi * R)
    # zeta1 in the spectral domain is -i d/dd1 in space
    assert got == pytest.approx(-1j * g * (1j * k - 1 / R) * d1 / R, rel=1e-8)


def test_variant_arbitration(medium3: ElasticMedium) -> None:
    chosen = selected_variants(medium3)
    assert set(chosen) == set(TYPO_KEYS)
    assert set(chosen.values()) <= set(TYPO_VARIANTS)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_transmission_conditions_hold_in_spectral_domain(medium3: ElasticMedium, j: int) -> None:
    for zeta, y3 in [((0.31, 0.47), 0.8), ((1.1, -0.2), -0.5), ((2.0, 1.5), 1.3)]:
        assert interface_residual3d(j, zeta, y3, medium3) < 1e-10
        assert tilde_jump_residual("p", j, zeta, y3, medium3) < 1e-10
        assert tilde_jump_residual("s", j, zeta, y3, medium3) < 1e-10


@pytest.mark.slow
def test_equal_densities_give_free_space_tensor(uniform: ElasticMedium, quad: QuadConfig) -> None:
    m = uniform.with_dim(3)
    for x, y in [([0.3, 0.2, 0.7], [-0.1, 0.4, 0.5]), ([0.4, -0.2, -0.6], [0.0, 0.1, 0.8])]:
        G = assemble_G3d(x, y, m, quad)
        np.testing.assert_allclose(G.entries, kupradze_tensor(m, 1, x, y).entries, rtol=1e-7, atol=1e-10)


@pytest.mark.slow
def test_reciprocity(medium3: ElasticMedium, quad: QuadConfig) -> None:
    x, y = [0.3, -0.2, 0.6], [-0.4, 0.1, -0.7]
    Gxy = assemble_G3d(x, y, medium3, quad).entries
    Gyx = assemble_G3d(y, x, medium3, quad).entries
    np.testing.assert_allclose(Gxy, Gyx.T, rtol=1e-6, atol=1e-9)


def test_far_field_refuses_grazing_and_wrong_side(medium3: ElasticMedium) -> None:
    key = Coeff3DKey("A_p", 1, "plus")
    with pytest.raises(GrazingDirectionError):
        far_field3d(key, [1.0, 0.0, 1e-6], [0.0, 0.0, 0.5], medium3)
    with pytest.raises(InvalidKeyError):
        far_field3d(key, [0.0, 0.6, -0.8], [0.0, 0.0, 0.5], medium3)
    pattern = far_field3d(key, [0.0, 0.6, 0.8], [0.1, 0.0, 0.5], medium3)
    assert pattern.wave_type == "p:case2"
    assert np.isfinite(pattern.value)


def test_spectral_traces_refuse_branch_points(medium3: ElasticMedium) -> None:
    kp = wavenumbers(medium3).kp_plus
    with pytest.raises(BranchCutError):
        interface_residual3d(1, (0.6 * kp, 0.8 * kp), 0.8, medium3)
    with pytest.raises(BranchCutError):
        coeff3d(Coeff3DKey("A_p", 1, "plus"), kp**2, 0.8, medium3)


def test_variant_choice_is_cached_per_medium(monkeypatch: pytest.MonkeyPatch, medium3: ElasticMedium,
                                             uniform: ElasticMedium) -> None:
    other = uniform.with_dim(3)
    calls = []

    def arbitrate(m: ElasticMedium) -> dict:
        calls.append(m)
        return {"A_p3_minus": "printed" if m == medium3 else "corrected", "B_p3_plus": "corrected"}

    monkeypatch.setattr(green3d, "arbitrate_variants", arbitrate)
    monkeypatch.setattr(green3d, "_SELECTED", {})
    assert selected_variants(medium3)["A_p3_minus"] == "printed"
    assert selected_variants(other)["A_p3_minus"] == "corrected"
    assert selected_variants(medium3)["A_p3_minus"] == "printed"
    assert calls == [medium3, other]


_PAIRS = [([0.3, -0.2, 0.6], [-0.1, 0.4, 0.5]), ([0.4, -0.2, -0.6], [0.0, 0.1, 0.8])]


def test_vanishing_shear_components(medium3: ElasticMedium, quad: QuadConfig) -> None:
    for x, y in _PAIRS:
        value, grad = tilde_G3d("s33", x, y, medium3, quad)
        assert value == 0
        assert not np.any(grad)
        for j in (1, 2, 3):
            value, grad = correction3d(f"s{j}3", x, y, medium3, quad)
            assert value == 0
            assert not np.any(grad)


def _phi_gradients(k: float, diff: np.ndarray):
    r = float(np.linalg.norm(diff))
    phi = np.exp(1j * k * r) / (4 * np.pi * r)
    g = (1j * k - 1 / r) * phi
    gp = ((1j * k - 1 / r) ** 2 + 1 / r**2) * phi
    dd = np.outer(diff, diff)
    return g * diff / r, gp * dd / r**2 + g * (np.eye(3) / r - dd / r**3)


def test_equal_densities_give_free_compressional_potential(uniform: ElasticMedium, quad: QuadConfig) -> None:
    m = uniform.with_dim(3)
    kp = wavenumbers(m).kp_plus
    c = 1.0 / (2 * m.mu + m.lam)
    for x, y in _PAIRS:
        first, second = _phi_gradients(kp, np.subtract(x, y))
        for j in (1, 2, 3):
            value, grad = tilde_G3d(f"p{j}", x, y, m, quad)
            assert value == pytest.approx(c * first[j - 1], rel=1e-7)
            np.testing.assert_allclose(grad, c * second[:, j - 1], rtol=1e-6, atol=1e-10)


@pytest.mark.slow
def test_shear_potentials_are_divergence_free(medium3: ElasticMedium, quad: QuadConfig) -> None:
    h = 1e-3
    for x, y in _PAIRS:
        x = np.asarray(x)
        for j in (1, 2, 3):
            div = 0j
            for l in (1, 2, 3):
                e = np.zeros(3)
                e[l - 1] = h
                plus, _ = tilde_G3d(f"s{j}{l}", x + e, y, medium3, quad)
                minus, _ = tilde_G3d(f"s{j}{l}", x - e, y, medium3, quad)
                div += (plus - minus) / (2 * h)
            assert abs(div) < 1e-4


def _total_gradient(kind: str, x, y, m: ElasticMedium, quad: QuadConfig) -> np.ndarray:
    return tilde_G3d(kind, x, y, m, quad)[1] + correction3d(kind, x, y, m, quad)[1]


@pytest.mark.slow
def test_potentials_recompose_the_assembled_tensor(medium3: ElasticMedium, quad: QuadConfig) -> None:
    kn = wavenumbers(medium3)
    for x, y in _PAIRS:
        side = 1 if x[2] > 0 else -1
        kp, ks = kn.k("p", side), kn.k("s", side)
        G = assemble_G3d(x, y, medium3, quad).entries
        for j in (1, 2, 3):
            grad_p = _total_gradient(f"p{j}", x, y, medium3, quad)
            # J[i, l] = d_l of shear component i
            J = np.array([_total_gradient(f"s{j}{i}", x, y, medium3, quad) for i in (1, 2, 3)])
            curl = np.array([J[2, 1] - J[1, 2], J[0, 2] - J[2, 0], J[1, 0] - J[0, 1]])
            column = -grad_p / kp**2 + curl / ks**2
            np.testing.assert_allclose(column, G[:, j - 1], rtol=1e-6, atol=1e-9)


def _extrapolate(heights: np.ndarray, values: list, t: float) -> np.ndarray:
    out = np.zeros_like(values[0])
    for i, hi in enumerate(heights):
        w = np.prod([(t - hj) / (hi - hj) for j, hj in enumerate(heights) if j != i])
        out = out + w * values[i]
    return out


@pytest.mark.slow
@pytest.mark.parametrize("x_side", [1, -1])
def test_sources_on_the_interface_match_the_limit_from_above(medium3: ElasticMedium, quad: QuadConfig,
                                                             x_side: int) -> None:
    h_min = 1e-2 / wavenumbers(medium3).k_max
    x = [1.0, 0.0, 0.0]
    heights = h_min * np.array([2.0, 3.0, 4.0, 5.0])
    above = [assemble_G3d(x, [0.0, 0.0, t], medium3, quad, x_side=x_side, y_side=1).entries for t in heights]
    for y3 in (1e-3, 0.0):
        limit = _extrapolate(heights, above, y3)
        near = assemble_G3d(x, [0.0, 0.0, y3], medium3, quad, x_side=x_side, y_side=1).entries
        np.testing.assert_allclose(near, limit, rtol=0, atol=1e-5 * np.max(np.abs(limit)))
