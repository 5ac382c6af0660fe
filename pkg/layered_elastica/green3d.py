"""Three-dimensional two-layered elastic Green's tensor.

Every coefficient is a function of xi = |zeta| and a source height y3 and is
stored as a short list of parts ``amp(xi) * exp(-beta_{wave, y side}(xi) |y3|)``.
The same tables feed the potential evaluators, the interface-residual arbiter
and the far-field patterns.

Fourier integrals over zeta are collapsed to one-dimensional Hankel integrals:
a monomial zeta1^a zeta2^b times a radial kernel f(|zeta|) reduces to a finite
sum over orders n of i^n J_n(xi rho) e^{i n alpha} weights, which are computed
from the Fourier coefficients of cos^a sin^b.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .elastic_fields import GreenMatrix, RegionTag, check_separation, kupradze_derivatives, phi_derivatives
from .errors import BranchCutError, GrazingDirectionError, InvalidKeyError
from .green2d import THETA_MIN, WAVES, FarFieldPattern, SpectralSet, beta_pair, green_amplitudes
from .medium import ElasticMedium, Wavenumbers, refl_trans, wavenumbers
from .quadrature import QuadConfig, hankel_path_integral

logger = logging.getLogger(__name__)

Monomial = Tuple[int, int]
Part = Tuple[np.ndarray, str, int]

FAMILIES = ("A_p", "B_p", "A_s", "B_s", "hatA_s", "hatB_s", "R_p", "T_p", "R_s", "T_s")
PARTS = ("plus", "minus", "none")

# x-monomial of each far-field case
CASES: Dict[Monomial, int] = {(0, 0): 1, (1, 0): 2, (0, 1): 3, (1, 1): 4, (2, 0): 5, (0, 2): 6}

# coefficients printed with a suspected slip: (printed, corrected) both encoded
TYPO_VARIANTS = ("printed", "corrected")
TYPO_KEYS = ("A_p3_minus", "B_p3_plus")
# arbiter choice per medium, filled on first use
_SELECTED: Dict[ElasticMedium, Dict[str, str]] = {}
# |beta| below this fraction of k counts as sitting on the branch point
BRANCH_POINT_TOL = 1e-6


def _valid_specs() -> Dict[Tuple[str, int, str, Optional[int]], Monomial]:
    specs: Dict[Tuple[str, int, str, Optional[int]], Monomial] = {}
    p_mono = {1: (1, 0), 2: (0, 1), 3: (0, 0)}
    for fam in ("A_p", "B_p"):
        for j in (1, 2, 3):
            for part in ("plus", "minus"):
                specs[(fam, j, part, None)] = p_mono[j]
    for fam in ("R_p", "T_p"):
        for j in (1, 2, 3):
            specs[(fam, j, "none", None)] = p_mono[j]
    s_mono = {(1, 2): (0, 0), (1, 3): (0, 1), (2, 1): (0, 0), (2, 3): (1, 0), (3, 1): (0, 1), (3, 2): (1, 0)}
    for fam in ("A_s", "B_s"):
        specs[(fam, 1, "none", 1)] = (1, 1)
        specs[(fam, 2, "none", 2)] = (1, 1)
        for (j, comp), mono in s_mono.items():
            for part in ("plus", "minus"):
                specs[(fam, j, part, comp)] = mono
    for fam in ("hatA_s", "hatB_s"):
        specs[(fam, 1, "none", 2)] = (2, 0)
        specs[(fam, 2, "none", 1)] = (0, 2)
    u_mono = {(1, 1): (1, 1), (1, 2): (2, 0), (2, 1): (0, 2), (2, 2): (1, 1), (3, 1): (0, 1), (3, 2): (1, 0)}
    for fam in ("R_s", "T_s"):
        for (j, comp), mono in u_mono.items():
            specs[(fam, j, "none", comp)] = mono
    return specs


_SPECS = _valid_specs()


@dataclass(frozen=True)
class Coeff3DKey:
    """One printed coefficient: family, column j, x-side superscript and shear component."""

    family: str
    column: int
    part: str = "none"
    component: Optional[int] = None

    def __post_init__(self) -> None:
        if self.spec not in _SPECS:
            raise InvalidKeyError(f"no coefficient {self.family}_{self.column} part={self.part} "
                                  f"component={self.component}")

    @property
    def spec(self) -> Tuple[str, int, str, Optional[int]]:
        return (self.family, self.column, self.part, self.component)

    @property
    def wave(self) -> str:
        return self.family[-1]

    @property
    def y_side(self) -> int:
        return 1 if self.family[-3] in ("A", "R") else -1

    @property
    def monomial(self) -> Monomial:
        return _SPECS[self.spec]

    @property
    def case(self) -> int:
        return CASES[self.monomial]

    def x_sides(self) -> Tuple[int, ...]:
        if self.part == "plus":
            return (1,)
        if self.part == "minus":
            return (-1,)
        return (1, -1)


def all_keys() -> List[Coeff3DKey]:
    return [Coeff3DKey(*spec) for spec in _SPECS]


# ---------------------------------------------------------------------------
# coefficient tables


def _parts(key: Coeff3DKey, sp: SpectralSet, variants: Dict[str, str]) -> List[Part]:
    """Coefficient of ``key`` as [(amp, wave, exponent sign)] with factor exp(-sign beta_{wave} |y3|)."""
    kn = sp.kn
    fam, j, comp = key.family, key.column, key.component
    plus = key.part == "plus"
    q = sp.xi * sp.xi
    bp = {1: sp.beta("p", 1), -1: sp.beta("p", -1)}
    bs = {1: sp.beta("s", 1), -1: sp.beta("s", -1)}
    S = bs[1] + bs[-1]
    pre = sp.C0 / sp.D

    if fam == "A_p":
        R, T = sp.RT["p"]
        if j < 3:
            return [(1j / (2 * bp[1]) * (R if plus else T), "p", 1)]
        if plus:
            return [(0.5 * R, "p", 1)]
        sign = -1 if variants.get("A_p3_minus") == "printed" else 1
        return [(0.5 * T, "p", sign)]
    if fam == "B_p":
        R, T = sp.RT["p"]
        if j < 3:
            return [(-1j / (2 * bp[-1]) * ((T - 2) if plus else R), "p", 1)]
        if not plus:
            return [(0.5 * R, "p", 1)]
        if variants.get("B_p3_plus") == "printed":
            _, shifted = refl_trans(bp[1], bp[-1] - 2, kn.kp_plus, kn.kp_minus)
            return [(0.5 * shifted, "p", 1)]
        return [(0.5 * (T - 2), "p", 1)]

    if fam in ("A_s", "B_s", "hatA_s", "hatB_s"):
        above = fam in ("A_s", "hatA_s")
        a11 = (kn.ks_minus**-2 - kn.ks_plus**-2) / (sp.sig_s * S)
        if fam.startswith("hat"):
            return [(-a11, "s", 1)]
        if j == 3:
            R, T = sp.RT["s"]
            if above:
                return [(1j / (2 * bs[1]) * (R if plus else T), "s", 1)]
            return [(-1j / (2 * bs[-1]) * ((T - 2) if plus else R), "s", 1)]
        if key.part == "none":
            return [(a11 if j == 1 else -a11, "s", 1)]
        if above:
            two = 0.5 - bs[1] / S if plus else bs[-1] / S
        else:
            two = -bs[1] / S if plus else -(0.5 - bs[-1] / S)
        if comp == 3:
            two = two / (1j * bs[1]) if plus else two / (-1j * bs[-1])
        return [(two, "s", 1)]

    if fam in ("R_p", "T_p"):
        if fam == "R_p":
            kp2 = kn.kp_plus**-2
            if j < 3:
                return [(1j * pre * (sp.sig_s * bs[-1] + sp.ds * q) / S, "s", 1),
                        (-1j * pre * sp.ds * kp2 * q / sp.sig_p, "p", 1)]
            return [(pre * q * kn.ks_plus**-2, "s", 1),
                    (-pre * q * sp.ds * kp2 * bp[1] / sp.sig_p, "p", 1)]
        kp2 = kn.kp_minus**-2
        if j < 3:
            return [(1j * pre * (-sp.sig_s * bs[1] + sp.ds * q) / S, "s", 1),
                    (-1j * pre * sp.ds * kp2 * q / sp.sig_p, "p", 1)]
        return [(pre * q * kn.ks_minus**-2, "s", 1),
                (pre * q * sp.ds * kp2 * bp[-1] / sp.sig_p, "p", 1)]

    # R_s / T_s: component (2) is minus component (1) in every column
    sign = 1 if comp == 1 else -1
    if fam == "R_s":
        if j < 3:
            return [(sign * pre * sp.dp * (sp.sig_s * bs[-1] + sp.ds * q) / (sp.sig_s * S), "s", 1),
                    (-sign * pre * kn.kp_plus**-2, "p", 1)]
        return [(-sign * 1j * pre * sp.dp * kn.ks_plus**-2 * q / sp.sig_s, "s", 1),
                (sign * 1j * pre * kn.kp_plus**-2 * bp[1], "p", 1)]
    if j < 3:
        return [(-sign * pre * sp.dp * (sp.sig_s * bs[1] - sp.ds * q) / (sp.sig_s * S), "s", 1),
                (-sign * pre * kn.kp_minus**-2, "p", 1)]
    return [(-sign * 1j * pre * sp.dp * kn.ks_minus**-2 * q / sp.sig_s, "s", 1),
            (-sign * 1j * pre * kn.kp_minus**-2 * bp[-1], "p", 1)]


def _evaluate_parts(key: Coeff3DKey, sp: SpectralSet, y3: float, variants: Dict[str, str]
                    ) -> Tuple[np.ndarray, np.ndarray]:
    """Value of the coefficient and its y3-derivative at the batch sp.xi."""
    side = key.y_side
    val = np.zeros(sp.xi.shape, dtype=complex)
    dval = np.zeros(sp.xi.shape, dtype=complex)
    for amp, wave, sign in _parts(key, sp, variants):
        b = sp.beta(wave, side)
        e = amp * np.exp(-sign * b * abs(y3))
        val = val + e
        dval = dval - sign * side * b * e
    return val, dval


def _check_source_side(key: Coeff3DKey, y3: float) -> None:
    if (y3 < 0 and key.y_side > 0) or (y3 > 0 and key.y_side < 0):
        raise InvalidKeyError(f"{key.family} applies to sources {'above' if key.y_side > 0 else 'below'} "
                              f"the interface, got y3={y3}")


def coeff3d(key: Coeff3DKey, s: complex, y3: float, m: ElasticMedium,
            variants: Optional[Dict[str, str]] = None) -> complex:
    """The coefficient ``key`` at |zeta|^2 = s and source height y3."""
    _check_source_side(key, y3)
    chosen = selected_variants(m) if variants is None else variants
    xi = np.sqrt(np.atleast_1d(np.asarray(s, dtype=complex)))
    sp = SpectralSet(m, xi)
    _check_branch_points(sp)
    val, _ = _evaluate_parts(key, sp, y3, chosen)
    return complex(val[0])


def _check_branch_points(sp: SpectralSet) -> None:
    """Coefficients divide by beta, which vanishes at |zeta| = k."""
    for wave in WAVES:
        for side in (1, -1):
            k = sp.kn.k(wave, side)
            if np.any(np.abs(sp.beta(wave, side)) <= BRANCH_POINT_TOL * k):
                raise BranchCutError(f"|zeta| = {abs(np.ravel(sp.xi)[0]):.6g} sits on the branch point k = {k:.6g}")


# ---------------------------------------------------------------------------
# potentials in the spectral domain


@dataclass(frozen=True)
class PotentialSpec:
    """Spectral layout of one scalar potential component.

    ``terms`` pairs a coefficient with its zeta monomial; ``free_dir`` is the
    derivative direction (1-based) of the free-space part, if any.
    """

    prefactor: float
    wave: str
    terms: Tuple[Tuple[Coeff3DKey, Monomial], ...]
    free_dir: Optional[int]


_S_TILDE = {
    (1, 1): (1, (("", 1, False, (1, 1)),), None),
    (1, 2): (1, (("", 2, True, (0, 0)), ("hat", 2, False, (2, 0))), 3),
    (1, 3): (-1, (("", 3, True, (0, 1)),), 2),
    (2, 1): (-1, (("", 1, True, (0, 0)), ("hat", 1, False, (0, 2))), 3),
    (2, 2): (1, (("", 2, False, (1, 1)),), None),
    (2, 3): (1, (("", 3, True, (1, 0)),), 1),
    (3, 1): (1, (("", 1, True, (0, 1)),), 2),
    (3, 2): (-1, (("", 2, True, (1, 0)),), 1),
}
_U_S = {(1, 1): (1, 1), (1, 2): (2, 0), (2, 1): (0, 2), (2, 2): (1, 1), (3, 1): (0, 1), (3, 2): (1, 0)}
_P_MONO = {1: (1, 0), 2: (0, 1), 3: (0, 0)}


def potential_spec(kind: str, j: int, component: Optional[int], x_side: int, y_side: int,
                   m: ElasticMedium) -> PotentialSpec:
    """kind is 'p' or 's' for G~, 'Up' or 'Us' for the coupling correction."""
    if j not in (1, 2, 3):
        raise ValueError(f"column must be 1, 2 or 3, got {j}")
    part = "plus" if x_side > 0 else "minus"
    above = y_side > 0
    if kind == "p":
        fam = "A_p" if above else "B_p"
        key = Coeff3DKey(fam, j, part)
        return PotentialSpec(1.0 / (2 * m.mu + m.lam), "p", ((key, _P_MONO[j]),), j)
    if kind == "Up":
        key = Coeff3DKey("R_p" if above else "T_p", j)
        return PotentialSpec(1.0, "p", ((key, _P_MONO[j]),), None)
    if component not in (1, 2, 3):
        raise ValueError(f"shear component must be 1, 2 or 3, got {component}")
    if kind == "s":
        if (j, component) == (3, 3):
            return PotentialSpec(0.0, "s", (), None)
        sign, rows, free = _S_TILDE[(j, component)]
        terms = []
        for hat, comp, superscripted, mono in rows:
            fam = ("hat" if hat else "") + ("A_s" if above else "B_s")
            terms.append((Coeff3DKey(fam, j, part if superscripted else "none", comp), mono))
        return PotentialSpec(sign / m.mu, "s", tuple(terms), free)
    if kind == "Us":
        if component == 3:
            return PotentialSpec(0.0, "s", (), None)
        key = Coeff3DKey("R_s" if above else "T_s", j, "none", component)
        return PotentialSpec(1.0, "s", ((key, _U_S[(j, component)]),), None)
    raise ValueError(f"unknown potential kind {kind!r}")


def _spectral_trace(spec: PotentialSpec, zeta: np.ndarray, y3: float, x_side: int, y_side: int,
                    m: ElasticMedium, variants: Dict[str, str]) -> Tuple[complex, complex]:
    """Transform in x' of a potential component and its x3-derivative at x3 = 0 on side x_side."""
    if not spec.terms and spec.free_dir is None:
        return 0j, 0j
    kn = wavenumbers(m)
    xi = np.array([np.hypot(zeta[0], zeta[1])], dtype=complex)
    sp = SpectralSet(m, xi, kn)
    _check_branch_points(sp)
    val = 0j
    der = 0j
    for key, (a, b) in spec.terms:
        coef, _ = _evaluate_parts(key, sp, y3, variants)
        mono = zeta[0] ** a * zeta[1] ** b
        c = complex(coef[0]) * mono
        val += c
        der += -x_side * complex(sp.beta(spec.wave, x_side)[0]) * c
    if spec.free_dir is not None and x_side == y_side:
        # free Phi: e^{-beta |x3 - y3|} / (2 beta), expanded at x3 = 0 on the source side
        bb = complex(sp.beta(spec.wave, y_side)[0])
        e = np.exp(-bb * abs(y3))
        phi0, phi1, phi2 = e / (2 * bb), y_side * 0.5 * e, bb * e / 2
        d = spec.free_dir
        if d < 3:
            val += 1j * zeta[d - 1] * phi0
            der += 1j * zeta[d - 1] * phi1
        else:
            val += phi1
            der += phi2
    return spec.prefactor * val, spec.prefactor * der


def _traces(kind: str, j: int, component: Optional[int], zeta: np.ndarray, y3: float, m: ElasticMedium,
            variants: Dict[str, str]) -> Dict[int, Tuple[complex, complex]]:
    y_side = 1 if y3 > 0 else -1
    out = {}
    for sx in (1, -1):
        spec = potential_spec(kind, j, component, sx, y_side, m)
        out[sx] = _spectral_trace(spec, zeta, y3, sx, y_side, m, variants)
    return out


def _rel(residuals: Sequence[complex], scale: Sequence[complex]) -> float:
    s = max(max(abs(v) for v in scale), 1e-300)
    return max(abs(r) for r in residuals) / s


def tilde_jump_residual(wave: str, j: int, zeta: Sequence[float], y3: float, m: ElasticMedium,
                        variants: Optional[Dict[str, str]] = None) -> float:
    """Relative residual of the transformed jump system solved by G~_{wave, j}."""
    z = np.asarray(zeta, dtype=float)
    chosen = selected_variants(m) if variants is None else variants
    kn = wavenumbers(m)
    if wave == "p":
        t = _traces("p", j, None, z, y3, m, chosen)
        kp = {s: kn.k("p", s) ** -2 for s in (1, -1)}
        res = [t[1][0] - t[-1][0], kp[1] * t[1][1] - kp[-1] * t[-1][1]]
        return _rel(res, [t[1][0], t[-1][0], kp[1] * t[1][1], kp[-1] * t[-1][1]])
    V = {l: _traces("s", j, l, z, y3, m, chosen) for l in (1, 2, 3)}
    ks = {s: kn.k("s", s) ** -2 for s in (1, -1)}
    curl1 = {s: 1j * z[1] * V[3][s][0] - V[2][s][1] for s in (1, -1)}
    curl2 = {s: V[1][s][1] - 1j * z[0] * V[3][s][0] for s in (1, -1)}
    res = [V[1][1][0] - V[1][-1][0], V[2][1][0] - V[2][-1][0],
           ks[1] * curl1[1] - ks[-1] * curl1[-1], ks[1] * curl2[1] - ks[-1] * curl2[-1]]
    scale = [V[l][s][0] for l in (1, 2) for s in (1, -1)] + [ks[s] * c[s] for c in (curl1, curl2) for s in (1, -1)]
    return _rel(res, scale)


def interface_residual3d(j: int, zeta: Sequence[float], y3: float, m: ElasticMedium,
                         variants: Optional[Dict[str, str]] = None) -> float:
    """Relative residual of the transformed transmission system for G_{p,j}, G_{s,j} (G~ plus U)."""
    z = np.asarray(zeta, dtype=float)
    chosen = selected_variants(m) if variants is None else variants
    kn = wavenumbers(m)

    def total(tk: str, uk: str, comp: Optional[int]) -> Dict[int, Tuple[complex, complex]]:
        a = _traces(tk, j, comp, z, y3, m, chosen)
        b = _traces(uk, j, comp, z, y3, m, chosen)
        return {s: (a[s][0] + b[s][0], a[s][1] + b[s][1]) for s in (1, -1)}

    Gp = total("p", "Up", None)
    V = {l: total("s", "Us", l) for l in (1, 2, 3)}
    kp = {s: kn.k("p", s) ** -2 for s in (1, -1)}
    ks = {s: kn.k("s", s) ** -2 for s in (1, -1)}
    curl1 = {s: 1j * z[1] * V[3][s][0] - V[2][s][1] for s in (1, -1)}
    curl2 = {s: V[1][s][1] - 1j * z[0] * V[3][s][0] for s in (1, -1)}
    curl3 = {s: 1j * z[0] * V[2][s][0] - 1j * z[1] * V[1][s][0] for s in (1, -1)}
    normal = {s: kp[s] * Gp[s][1] - ks[s] * curl3[s] for s in (1, -1)}
    tan1 = {s: kp[s] * 1j * z[0] * Gp[s][0] - ks[s] * curl1[s] for s in (1, -1)}
    tan2 = {s: kp[s] * 1j * z[1] * Gp[s][0] - ks[s] * curl2[s] for s in (1, -1)}
    res = [Gp[1][0] - Gp[-1][0], V[1][1][0] - V[1][-1][0], V[2][1][0] - V[2][-1][0],
           normal[1] - normal[-1], tan1[1] - tan1[-1], tan2[1] - tan2[-1]]
    scale = [Gp[s][0] for s in (1, -1)] + [V[l][s][0] for l in (1, 2) for s in (1, -1)]
    scale += [kp[s] * Gp[s][1] for s in (1, -1)] + [ks[s] * c[s] for c in (curl1, curl2, curl3) for s in (1, -1)]
    return _rel(res, scale)


def arbitrate_variants(m: ElasticMedium, samples: int = 16, seed: int = 0,
                       threshold: float = 1e-12) -> Dict[str, str]:
    """Pick, for each suspected slip, the transcription that satisfies the jump system."""
    rng = np.random.default_rng(seed)
    kn = wavenumbers(m)
    xi = rng.uniform(0.1, 3 * kn.k_max, samples)
    phi = rng.uniform(0, 2 * np.pi, samples)
    heights = rng.uniform(0.1, 2.0, samples)
    chosen: Dict[str, str] = {}
    for name, y_side in (("A_p3_minus", 1), ("B_p3_plus", -1)):
        worst = {}
        for variant in TYPO_VARIANTS:
            worst[variant] = max(
                tilde_jump_residual("p", 3, (x * np.cos(f), x * np.sin(f)), y_side * h, m, {name: variant})
                for x, f, h in zip(xi, phi, heights)
            )
        best = min(worst, key=worst.get)
        if worst[best] > threshold:
            logger.warning("no transcription of %s satisfies the jump system (best %s: %.2e)",
                           name, best, worst[best])
        logger.info("%s: using %s form (residual printed %.2e, corrected %.2e)",
                    name, best, worst["printed"], worst["corrected"])
        chosen[name] = best
    return chosen


def selected_variants(m: ElasticMedium) -> Dict[str, str]:
    if m not in _SELECTED:
        _SELECTED[m] = arbitrate_variants(m)
    return dict(_SELECTED[m])


# ---------------------------------------------------------------------------
# Hankel reduction


@lru_cache(maxsize=None)
def angular_coefficients(a: int, b: int) -> Tuple[Tuple[int, complex], ...]:
    """c_n with cos^a(g) sin^b(g) = sum_n c_n e^{i n g}."""
    poly: Dict[int, complex] = {0: 1.0 + 0j}
    factors = [{1: 0.5, -1: 0.5}] * a + [{1: -0.5j, -1: 0.5j}] * b
    for f in factors:
        nxt: Dict[int, complex] = {}
        for n, c in poly.items():
            for k, d in f.items():
                nxt[n + k] = nxt.get(n + k, 0j) + c * d
        poly = nxt
    return tuple(sorted((n, c) for n, c in poly.items() if c != 0))


def monomial_weights(mono: Monomial, alpha: float) -> Dict[Tuple[int, int], complex]:
    """{(order, power): weight}: zeta^mono f(|zeta|) transforms to sum weight * HPI(f, order, power)."""
    a, b = mono
    power = a + b + 1
    out: Dict[Tuple[int, int], complex] = {}
    for n, c in angular_coefficients(a, b):
        order = abs(n)
        w = c * (1j**n) * np.exp(1j * n * alpha)
        if n < 0 and order % 2:
            w = -w
        out[(order, power)] = out.get((order, power), 0j) + w
    return out


@dataclass(frozen=True)
class AngularFactor:
    """One row of the radial reduction table: the zeta-monomial and its Hankel orders."""

    kind: str

    def __post_init__(self) -> None:
        if self.kind not in ANGULAR_TABLE:
            raise InvalidKeyError(f"unknown angular factor {self.kind!r}")

    @property
    def monomial(self) -> Monomial:
        return ANGULAR_TABLE[self.kind][0]

    @property
    def orders(self) -> Tuple[int, ...]:
        return tuple(row[0] for row in ANGULAR_TABLE[self.kind][1])

    def rows(self, alpha: float) -> List[Tuple[int, int, complex]]:
        return [(order, power, w(alpha)) for order, power, w in ANGULAR_TABLE[self.kind][1]]


ANGULAR_TABLE: Dict[str, Tuple[Monomial, Tuple[Tuple[int, int, Callable[[float], complex]], ...]]] = {
    "const": ((0, 0), ((0, 1, lambda a: 1.0),)),
    "cos": ((1, 0), ((1, 2, lambda a: 1j * np.cos(a)),)),
    "sin": ((0, 1), ((1, 2, lambda a: 1j * np.sin(a)),)),
    "sin2": ((1, 1), ((2, 3, lambda a: -0.5 * np.sin(2 * a)),)),
    "cos_sq": ((2, 0), ((0, 3, lambda a: 0.5), (2, 3, lambda a: -0.5 * np.cos(2 * a)))),
    "sin_sq": ((0, 2), ((0, 3, lambda a: 0.5), (2, 3, lambda a: 0.5 * np.cos(2 * a)))),
}


def _polar(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    d1, d2 = float(x[0] - y[0]), float(x[1] - y[1])
    rho = float(np.hypot(d1, d2))
    return rho, (float(np.arctan2(d2, d1)) if rho > 0 else 0.0)


def hankel_reduce(f: Callable[[np.ndarray], np.ndarray], factor: AngularFactor, x: Sequence[float],
                  y: Sequence[float], m: ElasticMedium, quad: QuadConfig = QuadConfig(), *,
                  decay_rate: Optional[float] = None,
                  branch_points: Optional[Sequence[float]] = None) -> complex:
    """(1/4pi^2) * integral over R^2 of zeta^factor f(|zeta|) e^{i zeta.(x'-y')} as path integrals."""
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    rho, alpha = _polar(xa, ya)
    h = abs(xa[2]) + abs(ya[2]) if decay_rate is None else decay_rate
    bps = wavenumbers(m).branch_points() if branch_points is None else tuple(branch_points)
    total = 0j
    for order, power, w in factor.rows(alpha):
        if rho == 0 and order > 0:
            continue
        res = hankel_path_integral(f, order, rho, h, branch_points=bps, power=power, config=quad,
                                   regularized=rho == 0)
        total += w * complex(res.value)
    return total


@dataclass(frozen=True)
class SpectralTerm:
    """Contribution factor * zeta^monomial * kernel[source] to output slot ``output``."""

    output: int
    source: int
    monomial: Monomial
    factor: complex = 1.0


def reduce_terms(kernel: Callable[[np.ndarray], np.ndarray], n_sources: int, n_out: int,
                 terms: Sequence[SpectralTerm], rho: float, alpha: float, decay_rate: float,
                 branch_points: Sequence[float], quad: QuadConfig) -> np.ndarray:
    """Sum of many monomial-times-radial Fourier integrals, one path integral per (order, power)."""
    groups: Dict[Tuple[int, int], np.ndarray] = {}
    for t in terms:
        for (order, power), w in monomial_weights(t.monomial, alpha).items():
            if rho == 0 and order > 0:
                continue
            W = groups.setdefault((order, power), np.zeros((n_sources, n_out), dtype=complex))
            W[t.source, t.output] += t.factor * w
    out = np.zeros(n_out, dtype=complex)
    for (order, power), W in sorted(groups.items()):
        if not np.any(W):
            continue

        def mixed(xi: np.ndarray, W: np.ndarray = W) -> np.ndarray:
            return np.asarray(kernel(xi)) @ W

        res = hankel_path_integral(mixed, order, rho, decay_rate, branch_points=branch_points, power=power,
                                   config=quad, regularized=rho == 0)
        out += np.asarray(res.value)
    return out


# ---------------------------------------------------------------------------
# potentials in space


def _region(x: np.ndarray, y: np.ndarray, x_side: Optional[int], y_side: Optional[int]) -> RegionTag:
    return RegionTag.of(x, y, x_side, y_side)


def _raise(mono: Monomial, l: int) -> Monomial:
    return (mono[0] + 1, mono[1]) if l == 0 else (mono[0], mono[1] + 1)


def _potential(kind: str, j: int, component: Optional[int], x: Sequence[float], y: Sequence[float],
               m: ElasticMedium, quad: QuadConfig, x_side: Optional[int], y_side: Optional[int],
               variants: Optional[Dict[str, str]]) -> Tuple[complex, np.ndarray]:
    if m.dim != 3:
        m = m.with_dim(3)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    check_separation(m, xa, ya)
    region = _region(xa, ya, x_side, y_side)
    sx, sy = region.x_region, region.y_region
    spec = potential_spec(kind, j, component, sx, sy, m)
    chosen = selected_variants(m) if variants is None else variants
    kn = wavenumbers(m)
    value = 0j
    grad = np.zeros(3, dtype=complex)
    if spec.terms:
        ax3, y3 = abs(float(xa[2])), float(ya[2])
        keys = [key for key, _ in spec.terms]

        def kernel(xi: np.ndarray) -> np.ndarray:
            sp = SpectralSet(m, xi, kn)
            bx = sp.beta(spec.wave, sx)
            ex = np.exp(-bx * ax3)
            cols = []
            for key in keys:
                coef, _ = _evaluate_parts(key, sp, y3, chosen)
                cols.append(coef * ex)
                cols.append(-sx * bx * coef * ex)
            return np.stack(cols, axis=-1)

        terms: List[SpectralTerm] = []
        for i, (_, mono) in enumerate(spec.terms):
            terms.append(SpectralTerm(0, 2 * i, mono))
            terms.append(SpectralTerm(1, 2 * i, _raise(mono, 0), 1j))
            terms.append(SpectralTerm(2, 2 * i, _raise(mono, 1), 1j))
            terms.append(SpectralTerm(3, 2 * i + 1, mono))
        rho, alpha = _polar(xa, ya)
        out = reduce_terms(kernel, 2 * len(keys), 4, terms, rho, alpha, ax3 + abs(y3), kn.branch_points(), quad)
        value += spec.prefactor * out[0]
        grad += spec.prefactor * out[1:]
    if spec.free_dir is not None and region.same_side:
        _, d1, d2 = phi_derivatives(kn.k(spec.wave, sy), xa - ya, 3, 2)
        value += spec.prefactor * d1[spec.free_dir - 1]
        grad += spec.prefactor * d2[spec.free_dir - 1]
    return complex(value), grad


def _parse_kind(kind: str) -> Tuple[str, int, Optional[int]]:
    """'p3' -> ('p', 3, None); 's12' -> ('s', 1, 2)."""
    if len(kind) == 2 and kind[0] == "p" and kind[1] in "123":
        return "p", int(kind[1]), None
    if len(kind) == 3 and kind[0] == "s" and kind[1] in "123" and kind[2] in "123":
        return "s", int(kind[1]), int(kind[2])
    raise InvalidKeyError(f"potential kind must look like 'p2' or 's13', got {kind!r}")


def tilde_G3d(kind: str, x: Sequence[float], y: Sequence[float], m: ElasticMedium,
              quad: QuadConfig = QuadConfig(), *, x_side: Optional[int] = None, y_side: Optional[int] = None,
              variants: Optional[Dict[str, str]] = None) -> Tuple[complex, np.ndarray]:
    wave, j, comp = _parse_kind(kind)
    return _potential(wave, j, comp, x, y, m, quad, x_side, y_side, variants)


def correction3d(kind: str, x: Sequence[float], y: Sequence[float], m: ElasticMedium,
                 quad: QuadConfig = QuadConfig(), *, x_side: Optional[int] = None, y_side: Optional[int] = None,
                 variants: Optional[Dict[str, str]] = None) -> Tuple[complex, np.ndarray]:
    wave, j, comp = _parse_kind(kind)
    return _potential("U" + wave, j, comp, x, y, m, quad, x_side, y_side, variants)


def family_integral(key: Coeff3DKey, x: Sequence[float], y: Sequence[float], m: ElasticMedium,
                    quad: QuadConfig = QuadConfig(), variants: Optional[Dict[str, str]] = None) -> complex:
    """Fourier integral of coefficient * monomial * exp(-beta_{wave, x side} |x3|) for one key."""
    if m.dim != 3:
        m = m.with_dim(3)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    _check_source_side(key, float(ya[2]))
    sx = 1 if xa[2] > 0 else -1
    if sx not in key.x_sides():
        raise InvalidKeyError(f"{key.family}_{key.column}^{key.part} does not apply on side {sx}")
    chosen = selected_variants(m) if variants is None else variants
    kn = wavenumbers(m)
    ax3, y3 = abs(float(xa[2])), float(ya[2])

    def kernel(xi: np.ndarray) -> np.ndarray:
        sp = SpectralSet(m, xi, kn)
        coef, _ = _evaluate_parts(key, sp, y3, chosen)
        return (coef * np.exp(-sp.beta(key.wave, sx) * ax3))[:, None]

    rho, alpha = _polar(xa, ya)
    out = reduce_terms(kernel, 1, 1, [SpectralTerm(0, 0, key.monomial)], rho, alpha, ax3 + abs(y3),
                       kn.branch_points(), quad)
    return complex(out[0])


# ---------------------------------------------------------------------------
# the assembled tensor


_K_TT, _K_D, _K_R3, _K_3R, _K_33 = range(5)
# (i, j, radial kernel, monomial) for the entries of the non-singular part
_ENTRY_TERMS = (
    (0, 0, _K_TT, (0, 0)), (0, 0, _K_D, (2, 0)),
    (1, 1, _K_TT, (0, 0)), (1, 1, _K_D, (0, 2)),
    (0, 1, _K_D, (1, 1)), (1, 0, _K_D, (1, 1)),
    (0, 2, _K_R3, (1, 0)), (1, 2, _K_R3, (0, 1)),
    (2, 0, _K_3R, (1, 0)), (2, 1, _K_3R, (0, 1)),
    (2, 2, _K_33, (0, 0)),
)


def _sh_gamma(sp: SpectralSet, x_side: int, y_side: int) -> np.ndarray:
    bplus, bminus = sp.beta("s", 1), sp.beta("s", -1)
    R, T = refl_trans(bplus, bminus, 1.0, 1.0)
    if y_side > 0:
        return R / (2 * bplus) if x_side > 0 else T / (2 * bplus)
    return (2 - T) / (2 * bminus) if x_side > 0 else -R / (2 * bminus)


def radial_kernels(m: ElasticMedium, kn: Wavenumbers, xi: np.ndarray, x_side: int, y_side: int,
                   ax3: float, ay3: float) -> np.ndarray:
    """[n, mode, K]: radial kernels of the correction, mode = (value, d/dx3, d/dy3).

    In the (radial, transverse, vertical) frame the correction splits into the
    planar P-SV problem in (radial, vertical) and the SH problem in the
    transverse direction; the Cartesian entries are recombined by monomials.
    """
    sp = SpectralSet(m, xi, kn)
    M = green_amplitudes(sp, x_side, y_side)
    bx = beta_pair(sp, x_side)
    by = beta_pair(sp, y_side)
    ex = np.exp(-bx * ax3)
    ey = np.exp(-by * ay3)
    T = np.einsum("nijab,na,nb->nijab", M, ex, ey)
    modes = [T.sum(axis=(-2, -1)),
             np.einsum("nijab,na->nij", T, -x_side * bx),
             np.einsum("nijab,nb->nij", T, -y_side * by)]
    sh = _sh_gamma(sp, x_side, y_side) / m.mu * ex[:, 1] * ey[:, 1]
    sh_modes = [sh, sh * (-x_side * bx[:, 1]), sh * (-y_side * by[:, 1])]
    xi2 = sp.xi * sp.xi
    out = np.zeros((xi.shape[0], 3, 5), dtype=complex)
    for mode, (P, tt) in enumerate(zip(modes, sh_modes)):
        out[:, mode, _K_TT] = tt
        out[:, mode, _K_D] = (P[:, 0, 0] - tt) / xi2
        out[:, mode, _K_R3] = P[:, 0, 1] / sp.xi
        out[:, mode, _K_3R] = P[:, 1, 0] / sp.xi
        out[:, mode, _K_33] = P[:, 1, 1]
    return out


def _assembly_terms() -> List[SpectralTerm]:
    terms: List[SpectralTerm] = []
    for i, j, K, mono in _ENTRY_TERMS:
        e = 3 * i + j
        terms.append(SpectralTerm(e, K, mono))
        for l, f in ((0, 1j), (1, 1j)):
            terms.append(SpectralTerm(9 + 3 * e + l, K, _raise(mono, l), f))
            terms.append(SpectralTerm(36 + 3 * e + l, K, _raise(mono, l), -f))
        terms.append(SpectralTerm(9 + 3 * e + 2, 5 + K, mono))
        terms.append(SpectralTerm(36 + 3 * e + 2, 10 + K, mono))
    return terms


_TERMS = _assembly_terms()


def correction_matrix3d(m: ElasticMedium, x: np.ndarray, y: np.ndarray, region: RegionTag,
                        quad: QuadConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    kn = wavenumbers(m)
    sx, sy = region.x_region, region.y_region
    ax3, ay3 = abs(float(x[2])), abs(float(y[2]))

    def kernel(xi: np.ndarray) -> np.ndarray:
        return radial_kernels(m, kn, xi, sx, sy, ax3, ay3).reshape(xi.shape[0], 15)

    rho, alpha = _polar(x, y)
    out = reduce_terms(kernel, 15, 63, _TERMS, rho, alpha, ax3 + ay3, kn.branch_points(), quad)
    return out[:9].reshape(3, 3), out[9:36].reshape(3, 3, 3), out[36:].reshape(3, 3, 3)


def assemble_G3d(x: Sequence[float], y: Sequence[float], m: ElasticMedium, quad: QuadConfig = QuadConfig(), *,
                 x_side: Optional[int] = None, y_side: Optional[int] = None) -> GreenMatrix:
    """G(x, y) in 3D with its gradients in x and y; gradient index last."""
    if m.dim != 3:
        m = m.with_dim(3)
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    check_separation(m, xa, ya)
    region = _region(xa, ya, x_side, y_side)
    val, gx, gy = correction_matrix3d(m, xa, ya, region, quad)
    if region.same_side:
        pv, pg = kupradze_derivatives(m, region.x_region, xa - ya, order=1)
        val = val + pv
        gx = gx + pg
        gy = gy - pg
    logger.debug("G3(%s, %s) [%s]", xa, ya, region.label())
    return GreenMatrix(val, xa, ya, region, grad_x=gx, grad_y=gy)


# ---------------------------------------------------------------------------
# far fields


def far_field3d(key: Coeff3DKey, x_hat: Sequence[float], y: Sequence[float], m: ElasticMedium,
                theta_min: float = THETA_MIN, variants: Optional[Dict[str, str]] = None) -> FarFieldPattern:
    """Leading coefficient of family_integral(key)(r x_hat, y) ~ e^{i k r} r^{-1} F^inf."""
    d = np.asarray(x_hat, dtype=float)
    d = d / np.linalg.norm(d)
    ya = np.asarray(y, dtype=float)
    _check_source_side(key, float(ya[2]))
    if abs(d[2]) < np.sin(theta_min):
        raise GrazingDirectionError(f"direction {d.tolist()} is within {theta_min} of the interface")
    x_side = 1 if d[2] > 0 else -1
    if x_side not in key.x_sides():
        raise InvalidKeyError(f"{key.family}_{key.column}^{key.part} has no pattern on side {x_side}")
    if m.dim != 3:
        m = m.with_dim(3)
    chosen = selected_variants(m) if variants is None else variants
    kn = wavenumbers(m)
    k = kn.k(key.wave, x_side)
    xi = np.array([k * np.hypot(d[0], d[1])], dtype=complex)
    sp = SpectralSet(m, xi, kn)
    coef, dcoef = _evaluate_parts(key, sp, float(ya[2]), chosen)
    a, b = key.monomial
    mono = d[0] ** a * d[1] ** b
    phase = np.exp(-0.5j * np.pi) if x_side > 0 else np.exp(0.5j * np.pi)
    scale = phase * k ** (a + b + 1) / (2 * np.pi) * mono * d[2]
    osc = np.exp(-1j * k * (d[0] * ya[0] + d[1] * ya[1]))
    value = complex(scale * coef[0] * osc)
    grad = np.array([-1j * k * d[0] * value, -1j * k * d[1] * value, scale * complex(dcoef[0]) * osc])
    return FarFieldPattern(f"{key.wave}:case{key.case}", key.column, d, value, grad)
