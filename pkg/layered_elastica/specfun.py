"""Bessel and Hankel functions of low integer order for complex arguments.

Values come from scipy.special (AMOS). The branch convention is -pi < arg z <= pi;
a negative real argument with a signed-zero imaginary part is always read as
arg z = pi, so that J_m(z) = (H_m(z) - (-1)^m H_m(-z)) / 2 holds on the real line.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import SpecfunDomainError, SpecfunOverflowError

ORDERS = (0, 1, 2)
# closed-form tensor derivatives of the fundamental solutions go up to fourth order
_INTERNAL_MAX_ORDER = 4
_IM_LIMIT = 700.0

ArrayLike = Union[complex, float, np.ndarray]


def _as_complex(z: ArrayLike) -> np.ndarray:
    zc = np.asarray(z, dtype=complex)
    # -0.0 imaginary parts would put negative reals at arg = -pi
    return np.where(zc.imag == 0, zc.real + 0j, zc)


def _check_order(m: int, internal: bool = False) -> None:
    top = _INTERNAL_MAX_ORDER if internal else ORDERS[-1]
    if int(m) != m or not 0 <= m <= top:
        raise SpecfunDomainError(f"order {m} outside 0..{top}")


def _check_overflow(z: np.ndarray) -> None:
    if np.any(np.abs(z.imag) > _IM_LIMIT):
        raise SpecfunOverflowError("|Im z| too large for a finite cylinder function value")


def _ret(x: np.ndarray, like: ArrayLike) -> ArrayLike:
    return complex(x) if np.ndim(like) == 0 else x


def bessel_j(m: int, z: ArrayLike, *, internal: bool = False) -> ArrayLike:
    _check_order(m, internal)
    zc = _as_complex(z)
    _check_overflow(zc)
    return _ret(special.jv(m, zc), z)


def bessel_y(m: int, z: ArrayLike, *, internal: bool = False) -> ArrayLike:
    _check_order(m, internal)
    zc = _as_complex(z)
    if np.any(zc == 0):
        raise SpecfunDomainError("Y_m is singular at z = 0")
    _check_overflow(zc)
    return _ret(special.yv(m, zc), z)


def hankel1(m: int, z: ArrayLike, *, internal: bool = False) -> ArrayLike:
    """H_m^(1)(z) with outgoing behaviour sqrt(2/(pi z)) exp(i(z - m pi/2 - pi/4))."""
    _check_order(m, internal)
    zc = _as_complex(z)
    if np.any(zc == 0):
        raise SpecfunDomainError("H_m^(1) has a logarithmic/pole singularity at z = 0")
    _check_overflow(zc)
    out = np.asarray(special.hankel1(m, zc), dtype=complex)
    neg = (zc.imag == 0) & (zc.real < 0)
    if np.any(neg):
        # analytic continuation across arg = pi: H1_m(t e^{i pi}) = -(-1)^m conj(H1_m(t)), t > 0
        t = -zc.real[neg]
        out = np.array(out, copy=True)
        out[neg] = -((-1) ** m) * np.conj(special.hankel1(m, t))
    return _ret(out, z)


@dataclass(frozen=True)
class CylFunValue:
    order: int
    argument: complex
    J: complex
    Y: complex
    H1: complex


def probe(m: int, z: complex) -> CylFunValue:
    j = complex(bessel_j(m, z))
    y = complex(bessel_y(m, z))
    return CylFunValue(order=int(m), argument=complex(z), J=j, Y=y, H1=complex(hankel1(m, z)))


def wronskian_defect(z: ArrayLike) -> ArrayLike:
    """J1 Y0 - J0 Y1 - 2/(pi z); zero up to rounding off the negative real axis."""
    zc = _as_complex(z)
    w = special.jv(1, zc) * special.yv(0, zc) - special.jv(0, zc) * special.yv(1, zc)
    return _ret(w - 2.0 / (np.pi * zc), z)


# Closed forms of  int_0^{2pi} exp(i t cos(g - alpha)) * w(g) dg  for the six angular weights
# used by the radial reduction of 2D Fourier integrals.
ANGULAR_WEIGHTS = ("1", "cos", "sin", "cos_sin", "cos2", "sin2")


def angular_weight(kind: str, gamma: ArrayLike) -> ArrayLike:
    g = np.asarray(gamma, dtype=float)
    table = {
        "1": np.ones_like(g),
        "cos": np.cos(g),
        "sin": np.sin(g),
        "cos_sin": np.cos(g) * np.sin(g),
        "cos2": np.cos(g) ** 2,
        "sin2": np.sin(g) ** 2,
    }
    try:
        return table[kind]
    except KeyError as exc:
        raise SpecfunDomainError(f"unknown angular weight {kind!r}") from exc


def angular_identity(kind: str, t: float, alpha: float) -> complex:
    j0 = complex(bessel_j(0, t))
    j1 = complex(bessel_j(1, t))
    j2 = complex(bessel_j(2, t))
    if kind == "1":
        return 2 * np.pi * j0
    if kind == "cos":
        return 2j * np.pi * j1 * np.cos(alpha)
    if kind == "sin":
        return 2j * np.pi * j1 * np.sin(alpha)
    if kind == "cos_sin":
        return -np.pi * j2 * np.sin(2 * alpha)
    if kind == "cos2":
        return np.pi * (j0 - j2 * np.cos(2 * alpha))
    if kind == "sin2":
        return np.pi * (j0 + j2 * np.cos(2 * alpha))
    raise SpecfunDomainError(f"unknown angular weight {kind!r}")


def spherical_hankel1(n: int, x: ArrayLike) -> ArrayLike:
    """h_n^(1)(x) = j_n(x) + i y_n(x) for real positive x."""
    _check_order(n, internal=True)
    xr = np.asarray(x, dtype=float)
    if np.any(xr <= 0):
        raise SpecfunDomainError("spherical Hankel functions need a positive real argument")
    out = special.spherical_jn(n, xr) + 1j * special.spherical_yn(n, xr)
    return complex(out) if np.ndim(x) == 0 else out
