from __future__ import annotations

import pytest

from layered_elastica.errors import ValidationError
from layered_elastica.medium import ElasticMedium
from layered_elastica.verify import SUITE_ORDER, CheckReport, run_suite


def test_suite_order_runs_cheap_checks_first() -> None:
    assert SUITE_ORDER[0] == "stress-identity"
    assert SUITE_ORDER[-2:] == ("flat-interface", "rough-interface")


def test_unknown_suite(medium: ElasticMedium) -> None:
    with pytest.raises(ValidationError, match="unknown verify suite"):
        run_suite("everything", medium)


@pytest.mark.parametrize(
    "name,options",
    [
        ("stress-identity", {"samples": 20}),
        ("angular-identities", {"samples": 2}),
        ("determinant-scan", {"samples": 2001}),
        ("spectral-residual", {"samples": 20}),
        ("sommerfeld", {"samples": 3}),
    ],
)
def test_cheap_suites_pass(medium: ElasticMedium, name: str, options: dict) -> None:
    reports = run_suite(name, medium, seed=1, **options)
    assert reports
    failed = [r.to_dict() for r in reports if not r.passed]
    assert not failed


@pytest.mark.slow
def test_degenerate_suite_passes(medium: ElasticMedium) -> None:
    reports = run_suite("degenerate", medium, samples=2)
    assert [r.check for r in reports] == ["degenerate-2d", "degenerate-3d"]
    assert all(r.passed for r in reports)


def test_report_layout() -> None:
    report = CheckReport("sommerfeld-2d", "max_error", 3e-12, 1e-8, True, 20, 0.12345, {"note": "x"})
    assert report.to_dict() == {
        "check": "sommerfeld-2d",
        "max_error": 3e-12,
        "threshold": 1e-8,
        "pass": True,
        "samples": 20,
        "seconds": 0.123,
        "note": "x",
    }
