from __future__ import annotations

import pytest

from layered_elastica.medium import ElasticMedium
from layered_elastica.quadrature import QuadConfig


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: full solves and many adaptive Green's tensor evaluations")


@pytest.fixture
def medium() -> ElasticMedium:
    return ElasticMedium(lam=2.0, mu=1.0, rho_plus=1.0, rho_minus=2.0, omega=1.0)


@pytest.fixture
def medium3(medium: ElasticMedium) -> ElasticMedium:
    return medium.with_dim(3)


@pytest.fixture
def uniform() -> ElasticMedium:
    return ElasticMedium(lam=2.0, mu=1.0, rho_plus=1.5, rho_minus=1.5, omega=1.0)


@pytest.fixture
def quad() -> QuadConfig:
    return QuadConfig(tol=1e-10)
