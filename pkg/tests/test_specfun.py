from __future__ import annotations

import numpy as np
import pytest
from scipy import special

from layered_elastica import specfun
from layered_elastica.errors import SpecfunDomainError, SpecfunOverflowError


def test_small_argument_values() -> None:
    assert specfun.bessel_j(0, 0.0) == pytest.approx(1.0)
    assert specfun.bessel_j(1, 0.0) == pytest.approx(0.0)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_hankel_is_j_plus_iy(m: int) -> None:
    z = np.array([0.3 + 0.1j, 2.0 - 0.5j, 7.5 + 0.0j, 1.0 + 3.0j])
    expected = specfun.bessel_j(m, z) + 1j * specfun.bessel_y(m, z)
    np.testing.assert_allclose(specfun.hankel1(m, z), expected, rtol=1e-12)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_negative_real_continuation(m: int) -> None:
    x = np.array([0.2, 1.7, 9.0])
    j_from_h = 0.5 * (specfun.hankel1(m, x) - (-1) ** m * specfun.hankel1(m, -x))
    np.testing.assert_allclose(j_from_h, special.jv(m, x), rtol=1e-12, atol=1e-14)


def test_wronskian() -> None:
    z = np.array([0.5, 2.0 + 1.0j, 5.0 - 0.3j])
    scale = np.abs(2.0 / (np.pi * z))
    assert np.all(np.abs(specfun.wronskian_defect(z)) < 1e-12 * np.maximum(scale, 1.0))


def test_domain_errors() -> None:
    with pytest.raises(SpecfunDomainError):
        specfun.hankel1(3, 1.0)
    with pytest.raises(SpecfunDomainError):
        specfun.hankel1(0, 0.0)
    with pytest.raises(SpecfunDomainError):
        specfun.bessel_y(1, 0.0)
    with pytest.raises(SpecfunOverflowError):
        specfun.bessel_j(0, 1.0 + 800j)
    # derivative formulas may go up to order four
    assert np.isfinite(specfun.hankel1(4, 2.0, internal=True))


def test_value_record_carries_the_wronskian_defect() -> None:
    v = specfun.probe(1, 2.0 + 0.5j)
    assert v.order == 1
    assert v.H1 == pytest.approx(v.J + 1j * v.Y)


@pytest.mark.parametrize("kind", specfun.ANGULAR_WEIGHTS)
def test_angular_identities_by_trapezoid(kind: str) -> None:
    # periodic analytic integrand: the trapezoid rule converges geometrically
    g = 2 * np.pi * np.arange(256) / 256
    for t, alpha in [(0.7, 0.3), (6.0, 2.1), (15.0, 4.4)]:
        vals = np.exp(1j * t * np.cos(g - alpha)) * specfun.angular_weight(kind, g)
        numeric = 2 * np.pi * np.mean(vals)
        assert specfun.angular_identity(kind, t, alpha) == pytest.approx(numeric, abs=1e-11)


def test_unknown_angular_weight() -> None:
    with pytest.raises(SpecfunDomainError):
        specfun.angular_identity("tan", 1.0, 0.0)


def test_spherical_hankel_order_zero() -> None:
    x = np.array([0.5, 3.0, 10.0])
    np.testing.assert_allclose(specfun.spherical_hankel1(0, x), -1j * np.exp(1j * x) / x, rtol=1e-13)
