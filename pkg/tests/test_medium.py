from __future__ import annotations

import numpy as np
import pytest

from layered_elastica.errors import BranchCutError, DegenerateDenominatorError, InvalidMediumError
from layered_elastica.medium import (
    ElasticMedium,
    StressWeights,
    beta,
    beta_flip_rule,
    refl_trans,
    scan_determinant,
    spectral_constants,
    wavenumbers,
)


def test_from_dict_reads_lambda_key() -> None:
    m = ElasticMedium.from_dict({"lambda": 2.0, "mu": 1.0, "rho_plus": 1.0, "rho_minus": 2.0, "omega": 1.5})
    assert m.lam == 2.0
    assert m.dim == 2
    assert m.to_dict()["lambda"] == 2.0
    assert "lam" not in m.to_dict()


def test_from_dict_missing_key() -> None:
    with pytest.raises(InvalidMediumError, match="rho_minus"):
        ElasticMedium.from_dict({"lambda": 2.0, "mu": 1.0, "rho_plus": 1.0, "omega": 1.0})


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mu": 0.0},
        {"lam": -1.5},
        {"rho_minus": -1.0},
        {"omega": 0.0},
        {"dim": 4},
        {"a0": 2.0},
    ],
)
def test_invalid_media_are_rejected(kwargs: dict) -> None:
    base = {"lam": 2.0, "mu": 1.0, "rho_plus": 1.0, "rho_minus": 2.0, "omega": 1.0}
    base.update(kwargs)
    with pytest.raises(InvalidMediumError):
        ElasticMedium(**base)


def test_wavenumbers(medium: ElasticMedium) -> None:
    kn = wavenumbers(medium)
    assert kn.kp_plus == pytest.approx(np.sqrt(1.0 / 4.0))
    assert kn.ks_plus == pytest.approx(1.0)
    assert kn.kp_minus == pytest.approx(np.sqrt(2.0 / 4.0))
    assert kn.ks_minus == pytest.approx(np.sqrt(2.0))
    assert kn.k_min == pytest.approx(0.5)
    assert kn.k_max == pytest.approx(np.sqrt(2.0))
    assert list(kn.branch_points()) == sorted(kn.branch_points())


def test_beta_on_real_axis() -> None:
    k = 1.3
    assert beta(2.0, k) == pytest.approx(np.sqrt(4.0 - k * k))
    assert beta(-2.0, k) == pytest.approx(np.sqrt(4.0 - k * k))
    assert beta(0.4, k) == pytest.approx(-1j * np.sqrt(k * k - 0.16))
    assert beta(-0.4, k) == pytest.approx(-1j * np.sqrt(k * k - 0.16))


def test_beta_matches_flip_rule_off_the_cuts() -> None:
    rng = np.random.default_rng(3)
    k = 0.9
    xi = np.concatenate([rng.uniform(-5, 5, 200), k + 0.05 * np.exp(-1j * rng.uniform(0.01, np.pi - 0.01, 50))])
    np.testing.assert_allclose(beta(xi, k), beta_flip_rule(xi, k), rtol=1e-13, atol=1e-13)


def test_beta_rejects_points_on_the_cut() -> None:
    with pytest.raises(BranchCutError):
        beta(1.0 + 0.5j, 1.0)
    with pytest.raises(BranchCutError):
        beta(-1.0 - 0.5j, 1.0)


def test_refl_trans_identity() -> None:
    xi = np.linspace(0.1, 4.0, 17)
    bp, bm = beta(xi, 0.7), beta(xi, 1.1)
    R, T = refl_trans(bp, bm, 0.7, 1.1)
    np.testing.assert_allclose(T - R, 1.0, rtol=1e-14)


def test_refl_trans_refuses_denominators_lost_to_rounding() -> None:
    with pytest.raises(DegenerateDenominatorError):
        refl_trans(1.0, -(1.0 - 1e-15), 1.0, 1.0)
    with pytest.raises(DegenerateDenominatorError):
        refl_trans(0.0, 0.0, 0.7, 1.1)
    R, T = refl_trans(1.0, 0.5, 1.0, 1.0)
    assert R == pytest.approx(1.0 / 3.0)
    assert T == pytest.approx(4.0 / 3.0)


def test_spectral_constants(medium: ElasticMedium) -> None:
    C0, D = spectral_constants(medium, 2.5)
    assert C0 == pytest.approx(0.5)
    assert isinstance(D, complex)
    assert abs(D) > 0


def test_stress_weights(medium: ElasticMedium) -> None:
    w = StressWeights.scattering(medium)
    assert w.mu_tilde + w.lambda_tilde == pytest.approx(medium.mu + medium.lam)
    w.check(medium)
    with pytest.raises(InvalidMediumError):
        StressWeights(1.0, 1.0).check(medium)


def test_determinant_has_no_real_zero(medium: ElasticMedium) -> None:
    report = scan_determinant(medium, samples=4001)
    assert report.samples == 4001
    assert report.ok
    assert report.min_abs > 1e-8
