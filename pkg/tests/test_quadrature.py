from __future__ import annotations

import numpy as np
import pytest

from layered_elastica import specfun
from layered_elastica.errors import BudgetExceededError, PathIndependenceError, SingularOriginError, SlowDecayError
from layered_elastica.medium import beta
from layered_elastica.quadrature import (
    Line,
    QuadConfig,
    QuadResult,
    build_path,
    fixed_rule,
    fourier_inversion,
    hankel_path_integral,
    path_independence_check,
)


def _image_kernel(k: float, h: float, d: float):
    def kernel(xi: np.ndarray) -> np.ndarray:
        b = beta(xi, k)
        return np.exp(-b * h + 1j * xi * d) / (2 * b)

    return kernel


def test_quad_config_from_dict() -> None:
    cfg = QuadConfig.from_dict({"tol": 1e-8, "node_budget": 5000, "unused": 1})
    assert cfg.tol == 1e-8
    assert cfg.node_budget == 5000
    assert cfg.replace(indent_scale=0.5).indent_scale == 0.5
    with pytest.raises(ValueError):
        QuadConfig.from_dict({"tol": -1.0})


@pytest.mark.parametrize("h,d", [(0.5, 0.0), (1.5, 1.3), (0.8, -2.0)])
def test_sommerfeld_2d(h: float, d: float) -> None:
    k = 1.0
    res = fourier_inversion(_image_kernel(k, h, d), h, branch_points=(k,), shift=d)
    expected = 0.25j * specfun.hankel1(0, k * np.hypot(d, h))
    assert res.converged
    assert complex(res.value) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("rho", [0.0, 0.2, 2.5])
def test_sommerfeld_3d(rho: float) -> None:
    k, h = 1.2, 0.9

    def kernel(xi: np.ndarray) -> np.ndarray:
        b = beta(xi, k)
        return np.exp(-b * h) / (2 * b)

    res = hankel_path_integral(kernel, 0, rho, h, branch_points=(k,), power=1)
    r = np.hypot(rho, h)
    # (1/4pi^2) 2pi int J0 e^{-beta h}/(2 beta) xi dxi = e^{ikr}/(4 pi r)
    assert complex(res.value) == pytest.approx(np.exp(1j * k * r) / (4 * np.pi * r), rel=1e-8)


def test_hankel_parity_and_origin() -> None:
    f = _image_kernel(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        hankel_path_integral(f, 0, 1.0, 1.0, branch_points=(1.0,), power=0)
    with pytest.raises(SingularOriginError):
        hankel_path_integral(f, 1, 0.0, 1.0, branch_points=(1.0,))


def test_slow_decay_is_refused() -> None:
    with pytest.raises(SlowDecayError):
        fourier_inversion(_image_kernel(1.0, 1e-4, 0.0), 1e-4, branch_points=(1.0,))
    # close to the interface and to each other: no rotation helps
    with pytest.raises(SlowDecayError):
        fourier_inversion(_image_kernel(1.0, 1e-4, 2e-3), 1e-4, branch_points=(1.0,), shift=2e-3)
    with pytest.raises(SlowDecayError):
        hankel_path_integral(_image_kernel(1.0, 0.0, 0.0), 0, 5e-3, 0.0, branch_points=(1.0,), power=1)


def test_fixed_rule_reproduces_adaptive_value() -> None:
    k, h, d = 1.0, 0.7, 1.1
    rule = fixed_rule((k,), h, abs(d))
    value = np.sum(rule.weights * _image_kernel(k, h, d)(rule.nodes)) / (2 * np.pi)
    assert value == pytest.approx(0.25j * specfun.hankel1(0, k * np.hypot(d, h)), rel=1e-8)


def test_fixed_rule_budget() -> None:
    with pytest.raises(BudgetExceededError):
        fixed_rule((1.0,), 0.5, 0.0, QuadConfig(node_budget=10))


def test_result_does_not_depend_on_indentation() -> None:
    k, h = 1.0, 0.6
    kernel = _image_kernel(k, h, 0.4)

    def integrate(cfg: QuadConfig):
        return fourier_inversion(kernel, h, branch_points=(k, 1.7), shift=0.4, config=cfg)

    assert path_independence_check(integrate, QuadConfig()) < 1e-8


def test_indentation_dependence_raises_with_tolerance() -> None:
    # stands in for a pole crossed when the indentation shrinks
    def integrate(cfg: QuadConfig) -> QuadResult:
        return QuadResult(value=1.0 + cfg.indent_scale, error_estimate=0.0, nodes_used=1)

    assert path_independence_check(integrate, QuadConfig()) == pytest.approx(0.5)
    with pytest.raises(PathIndependenceError):
        path_independence_check(integrate, QuadConfig(), tolerance=1e-6)


@pytest.mark.parametrize("h", [1e-3, 1e-6, 0.0])
@pytest.mark.parametrize("d", [1.0, -0.7])
def test_sommerfeld_2d_on_the_interface(h: float, d: float) -> None:
    k = 1.0
    res = fourier_inversion(_image_kernel(k, h, d), h, branch_points=(k,), shift=d)
    expected = 0.25j * specfun.hankel1(0, k * np.hypot(d, h))
    assert res.converged
    assert complex(res.value) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("h", [1e-3, 0.0])
@pytest.mark.parametrize("rho", [0.3, 2.5])
def test_sommerfeld_3d_on_the_interface(h: float, rho: float) -> None:
    k = 1.2

    def kernel(xi: np.ndarray) -> np.ndarray:
        b = beta(xi, k)
        return np.exp(-b * h) / (2 * b)

    res = hankel_path_integral(kernel, 0, rho, h, branch_points=(k,), power=1)
    r = np.hypot(rho, h)
    assert complex(res.value) == pytest.approx(np.exp(1j * k * r) / (4 * np.pi * r), rel=1e-8)


@pytest.mark.parametrize("d", [0.5, -0.5])
def test_tails_turn_toward_decay(d: float) -> None:
    path = build_path((1.0, 1.4), 0.0, d, QuadConfig(), rays=True)
    first, last = path.segments[0], path.segments[-1]
    assert last.a == complex(path.truncation)
    assert first.b == complex(-path.truncation)
    assert np.sign(last.b.imag) == np.sign(d)
    assert np.sign(first.a.imag) == np.sign(d)
    assert all(seg.a.imag == 0 and seg.b.imag == 0 for seg in path.segments[1:-1] if isinstance(seg, Line))
