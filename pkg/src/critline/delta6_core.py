"""The balanced quotient Delta6(s) and its companions.

    xi1(s)   = Gamma(s/2) zeta(s) / pi^{s/2}
    T+(s)    = xi1(2s) + xi1(2s-1)
    D(s)     = [pi^{-1/4} Gamma(s) + pi^{1/4} Gamma(s-1/2)] / Gamma(s-1/4)
    A(s)     = 1 / (1 + sqrt(pi) Gamma(s-1/2)/Gamma(s))
    Delta6   = T+(s) / (xi1(2s-1/2) D(s))
             = [A zeta(2s) + (1-A) zeta(2s-1)] / zeta(2s-1/2)
    F6(s)    = D(s) / D(1-s),   Delta6(1-s) = F6(s) Delta6(s)

All Gamma factors are combined in log space and exponentiated once, so the
functions stay finite at heights where |Gamma(s)| underflows.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DivisionError, DomainError, NearPoleError, PoleError
from .special import (
    DEFAULT_CONFIG,
    EULER_GAMMA,
    LOG_PI,
    PrecisionConfig,
    _check_finite,
    digamma,
    gamma,
    log_gamma_array,
    zeta,
    zeta_array,
)

SQRT_PI = math.sqrt(math.pi)
EXCLUSION_RADIUS = 1e-6
FLAG_RADIUS = 1e-3
LOCAL_RADIUS = 0.05

# exclusion disks: (center, handled by local expansion?)
_SPECIAL_POINTS = ((0.0, False), (0.25, False), (0.5, True), (0.75, True), (1.0, False))


def quadrant(value: complex) -> int:
    """1..4 counterclockwise; Re >= 0 and Im >= 0 is quadrant 1, axes go to the lower-numbered side."""
    re, im = value.real, value.imag
    if im >= 0.0:
        return 1 if re >= 0.0 else 2
    return 4 if re >= 0.0 else 3


def quadrant_array(values: np.ndarray) -> np.ndarray:
    re, im = values.real, values.imag
    q = np.where(im >= 0.0, np.where(re >= 0.0, 1, 2), np.where(re >= 0.0, 4, 3))
    return q.astype(np.int64)


@dataclass(frozen=True)
class EvaluationResult:
    value: complex
    modulus: float
    phase: float
    quadrant: int
    near_singularity: bool = False

    @classmethod
    def from_value(cls, value: complex, near_singularity: bool = False) -> "EvaluationResult":
        value = complex(value)
        return cls(value, abs(value), cmath.phase(value), quadrant(value), near_singularity)

    def as_dict(self) -> dict:
        return {
            "re": self.value.real,
            "im": self.value.imag,
            "modulus": self.modulus,
            "phase": self.phase,
            "quadrant": self.quadrant,
            "near_singularity": self.near_singularity,
        }


@dataclass(frozen=True)
class LocalExpansion:
    """Taylor data of Delta6 about a real zero; valid for |ds| <= ``radius``."""

    center: complex
    order: int
    coefficients: tuple[complex, ...]
    radius: float = LOCAL_RADIUS

    def __call__(self, ds: complex) -> complex:
        return sum(c * ds**k for k, c in enumerate(self.coefficients))


# ---------------------------------------------------------------- helpers

def _is_gamma_pole(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _gamma_pole_mask(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.floor(z.real))


def _ratio_r(s: np.ndarray) -> np.ndarray:
    """sqrt(pi) Gamma(s-1/2)/Gamma(s), with inf/0 at the respective Gamma poles."""
    with np.errstate(invalid="ignore", over="ignore"):
        r = SQRT_PI * np.exp(log_gamma_array(s - 0.5) - log_gamma_array(s))
    r = np.where(_gamma_pole_mask(s), 0.0, r)
    r = np.where(_gamma_pole_mask(s - 0.5), np.inf, r)
    return r


def _a_pair(s: np.ndarray):
    """(A, 1-A) computed without cancellation, including the Gamma-pole limits."""
    r = _ratio_r(s)
    inf = np.isinf(r)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = np.where(inf, 0.0, 1.0 / (1.0 + np.where(inf, 0.0, r)))
        b = np.where(inf, 1.0, np.where(inf, 0.0, r) * a)
    return a, b


def _near_special(s: complex, radius: float):
    for c, local in _SPECIAL_POINTS:
        if abs(s - c) <= radius:
            return c, local
    return None, False


def _real_axis_flag(s: complex) -> bool:
    """Within FLAG_RADIUS of a catalogued real-axis zero or pole."""
    if abs(s.imag) > FLAG_RADIUS:
        return False
    x = s.real
    if any(abs(x - c) <= FLAG_RADIUS for c, _ in _SPECIAL_POINTS):
        return True
    if x < 0.5:
        for offset in (0.0, 0.5, 0.25):
            k = round(x - offset)
            if k <= 0 and abs(x - (k + offset)) <= FLAG_RADIUS:
                return True
    return False


def _flag(s: complex, value: complex) -> bool:
    m = abs(value)
    return _real_axis_flag(s) or not (FLAG_RADIUS < m < 1.0 / FLAG_RADIUS)


# ---------------------------------------------------------------- xi1, T+

def xi1(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """Gamma(s/2) zeta(s) pi^{-s/2}; even under s -> 1-s."""
    s = _check_finite(s)
    if s == 0.0 or s == 1.0:
        raise PoleError(f"xi1 has a pole at s={s.real:g}", s)
    if _is_gamma_pole(s / 2):
        # Gamma pole meets a trivial zero of zeta: use the symmetry
        return xi1(1.0 - s, cfg)
    lg = complex(log_gamma_array(np.array([s / 2]))[0])
    return cmath.exp(lg - 0.5 * s * LOG_PI) * zeta(s, cfg)


def _xi1_log_prefactor(w: np.ndarray) -> np.ndarray:
    return log_gamma_array(w / 2) - 0.5 * w * LOG_PI


def t_plus(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG, scaled: bool = False) -> complex:
    """xi1(2s) + xi1(2s-1).

    With ``scaled=True`` the result is divided by the positive real number
    exp(Re[log Gamma(s) - s log pi]), which keeps it representable at large
    heights without changing its sign pattern on the critical line.
    """
    s = _check_finite(s)
    for c in (0.0, 0.5, 1.0):
        if abs(s - c) <= EXCLUSION_RADIUS:
            raise NearPoleError(f"t_plus: s={s} within {EXCLUSION_RADIUS:g} of pole at {c:g}", s)
    value = complex(t_plus_array(np.array([s]), cfg, scaled=scaled)[0])
    # both summands have modulus |xi1(2s)| on the line; T+ itself vanishes at its zeros
    scale = abs(complex(t_plus_array(np.array([s]), cfg, scaled=scaled, parts=True)[0]))
    if s.real == 0.5 and abs(value.imag) > 1e-8 * scale:
        raise AccuracyError(f"T+ not real on the critical line at t={s.imag}: residue {value.imag:.3e}")
    return value


def t_plus_array(s, cfg: PrecisionConfig = DEFAULT_CONFIG, scaled: bool = False,
                 parts: bool = False) -> np.ndarray:
    """Vectorised T+. ``parts=True`` returns |xi1(2s)| + |xi1(2s-1)| instead (same scaling)."""
    s = np.asarray(s, dtype=np.complex128)
    p0 = _xi1_log_prefactor(2 * s)
    p1 = _xi1_log_prefactor(2 * s - 1)
    shift = p0.real if scaled else 0.0
    a = np.exp(p0 - shift) * zeta_array(2 * s, cfg)
    b = np.exp(p1 - shift) * zeta_array(2 * s - 1, cfg)
    if parts:
        return np.abs(a) + np.abs(b)
    return a + b


def t_plus_phase_detector(t, cfg: PrecisionConfig = DEFAULT_CONFIG) -> np.ndarray:
    """cos(arg xi1(1+2it)); on sigma = 1/2, T+ = 2|xi1(1+2it)| times this, so the zeros coincide.

    zeta has no zeros on Re = 1, so the normalisation never divides by zero.
    """
    t = np.asarray(t, dtype=np.float64)
    w = 1.0 + 2j * t
    lp = _xi1_log_prefactor(w)
    z = zeta_array(w, cfg)
    return np.cos(lp.imag + np.angle(z))


# ---------------------------------------------------------------- A, T_D, D

def a_func(s: complex) -> complex:
    """A(s) = 1/(1 + sqrt(pi) Gamma(s-1/2)/Gamma(s))."""
    s = _check_finite(s)
    if _is_gamma_pole(s) or _is_gamma_pole(s - 0.5):
        raise PoleError(f"a_func: Gamma argument pole at s={s}", s)
    r = complex(_ratio_r(np.array([s]))[0])
    den = 1.0 + r
    if abs(den) <= 1e-14 * max(1.0, abs(r)):
        raise DivisionError(f"a_func: 1 + sqrt(pi)Gamma(s-1/2)/Gamma(s) vanishes at s={s}", s)
    return 1.0 / den


def a_functional_rhs(s: complex) -> complex:
    """Right-hand side 1/(1 + tan(pi s)(1/A(s+1/2) - 1)) of the reflection law for A(1-s)."""
    s = _check_finite(s)
    return 1.0 / (1.0 + cmath.tan(math.pi * s) * (1.0 / a_func(s + 0.5) - 1.0))


_TD_COEF = (1.0, 1.0 / 8.0, 1.0 / 128.0, -5.0 / 1024.0)


def t_d(s: complex) -> complex:
    """sqrt(pi/(s-1/2)) (1 + 1/8u + 1/128u^2 - 5/1024u^3), u = s - 1/2."""
    s = _check_finite(s)
    u = s - 0.5
    if abs(u) < 2.0:
        raise DomainError(f"t_d needs |s-1/2| >= 2, got {abs(u):.3g}")
    series = sum(c / u**k for k, c in enumerate(_TD_COEF))
    return cmath.sqrt(math.pi / u) * series


def a_asymptotic(s: complex) -> complex:
    """Large-|s| form 1/(1 + T_D(s))."""
    return 1.0 / (1.0 + t_d(s))


def d_func(s: complex) -> complex:
    """D(s) via log-Gamma ratios."""
    s = _check_finite(s)
    for z in (s, s - 0.5, s - 0.25):
        if _is_gamma_pole(z):
            raise PoleError(f"d_func: Gamma pole at argument {z.real:g} (s={s})", s)
    return complex(d_array(np.array([s]))[0])


def d_array(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.complex128)
    lq = log_gamma_array(s - 0.25)
    return np.exp(log_gamma_array(s) - lq - 0.25 * LOG_PI) + np.exp(log_gamma_array(s - 0.5) - lq + 0.25 * LOG_PI)


# ---------------------------------------------------------------- Delta6

def delta6_array(s, cfg: PrecisionConfig = DEFAULT_CONFIG, check: bool = True) -> np.ndarray:
    """Form [A zeta(2s) + (1-A) zeta(2s-1)] / zeta(2s-1/2), elementwise, no singularity policy."""
    s = np.asarray(s, dtype=np.complex128)
    a, b = _a_pair(s)
    z0 = zeta_array(2 * s, cfg, check)
    z1 = zeta_array(2 * s - 1, cfg, check)
    zh = zeta_array(2 * s - 0.5, cfg, check)
    with np.errstate(divide="ignore", invalid="ignore"):
        return (a * z0 + b * z1) / zh


def delta6_form22(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """[xi1(2s) + xi1(2s-1)] / [zeta(2s-1/2)(Gamma(s)/pi^s + Gamma(s-1/2)/pi^{s-1/2})]."""
    s = complex(s)
    arr = np.array([s])
    g0 = log_gamma_array(arr)[0] - s * LOG_PI
    g1 = log_gamma_array(arr - 0.5)[0] - (s - 0.5) * LOG_PI
    scale = g0
    e0 = cmath.exp(g0 - scale)
    e1 = cmath.exp(g1 - scale)
    num = e0 * zeta(2 * s, cfg) + e1 * zeta(2 * s - 1, cfg)
    den = zeta(2 * s - 0.5, cfg) * (e0 + e1)
    return num / den


def delta6_form23(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """[xi1(2s) + xi1(2s-1)] / [xi1(2s-1/2) D(s)]."""
    s = complex(s)
    w = np.array([2 * s, 2 * s - 1, 2 * s - 0.5])
    lp = _xi1_log_prefactor(w)
    scale = lp[0]
    num = cmath.exp(lp[0] - scale) * zeta(2 * s, cfg) + cmath.exp(lp[1] - scale) * zeta(2 * s - 1, cfg)
    den = cmath.exp(lp[2] - scale) * zeta(2 * s - 0.5, cfg) * d_func(s)
    return num / den


def delta6_form24(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    return complex(delta6_array(np.array([complex(s)]), cfg)[0])


def delta6_forms(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> tuple[complex, complex, complex]:
    """The three defining expressions evaluated independently."""
    return delta6_form22(s, cfg), delta6_form23(s, cfg), delta6_form24(s, cfg)


def forms_residual(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> float:
    """Largest pairwise relative disagreement between the three forms."""
    v = delta6_forms(s, cfg)
    scale = max(abs(x) for x in v)
    return max(abs(v[i] - v[j]) for i in range(3) for j in range(i + 1, 3)) / scale


def delta6_value(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """Delta6 with the exclusion-disk policy; raises instead of returning inf/nan."""
    s = _check_finite(s)
    center, local = _near_special(s, EXCLUSION_RADIUS)
    if center is not None:
        if local:
            return local_expansion(center)(s - center)
        raise NearPoleError(f"pole at s={center:g}" if center == 1.0 else
                            f"s={s} within {EXCLUSION_RADIUS:g} of singular point {center:g}", s)
    value = complex(delta6_array(np.array([s]), cfg)[0])
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NearPoleError(f"Delta6 diverges at s={s} (zero of the denominator)", s)
    return value


def delta6(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> EvaluationResult:
    s = _check_finite(s)
    value = delta6_value(s, cfg)
    return EvaluationResult.from_value(value, _flag(s, value))


# ---------------------------------------------------------------- F6

def f6(s: complex) -> complex:
    """D(s)/D(1-s)."""
    s = _check_finite(s)
    num = d_func(s)
    den = d_func(1.0 - s)
    if den == 0:
        raise DivisionError(f"f6: D(1-s) vanishes at s={s}", s)
    return num / den


def f6_rewritten(s: complex) -> complex:
    """Gamma(s)Gamma(3/4-s)A(1-s) / (Gamma(1-s)Gamma(s-1/4)A(s)); overflows for large |t| via tan(pi s)."""
    s = _check_finite(s)
    lg = log_gamma_array(np.array([s, 0.75 - s, 1.0 - s, s - 0.25]))
    ratio = cmath.exp(lg[0] + lg[1] - lg[2] - lg[3])
    return ratio * a_functional_rhs(s) / a_func(s)


def functional_equation_residual(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> float:
    """|Delta6(1-s) - F6(s) Delta6(s)| / |Delta6(1-s)|."""
    left = delta6_value(1.0 - s, cfg)
    right = f6(s) * delta6_value(s, cfg)
    return abs(left - right) / abs(left)


def f6_asymptotic(s: complex) -> complex:
    """Large-|s| expansion of F6 built from the cot/tan factors and T_D."""
    s = _check_finite(s)
    if abs(s) < 4.0 or abs(s.imag) < 1.0:
        raise DomainError(f"f6_asymptotic needs |s| >= 4 and |Im s| >= 1, got s={s}")
    z = math.pi * s
    # cot and tan through exp(2iz) stay finite for large |Im z|
    e = cmath.exp(2j * z) if s.imag > 0 else cmath.exp(-2j * z)
    if s.imag > 0:
        cot = 1j * (e + 1) / (e - 1)
        tan = -1j * (e - 1) / (e + 1)
    else:
        cot = 1j * (1 + e) / (1 - e)
        tan = -1j * (1 - e) / (1 + e)
    gamma_bracket = 1.0 - 1.0 / (16 * s) - 15.0 / (512 * s**2) - 75.0 / (8192 * s**3)
    return math.sqrt(2.0) / (1.0 + cot) * gamma_bracket * (1.0 + t_d(s)) / (1.0 + tan * t_d(s + 0.5))


def f6_modulus_asymptotic(s: complex) -> float:
    """|1 + (1-i)(sqrt(pi/s) - i pi/s)/(1 + pi/s)|."""
    s = _check_finite(s)
    q = math.pi / s
    return abs(1.0 + (1 - 1j) * (cmath.sqrt(q) - 1j * q) / (1.0 + q))


def f6_phase_asymptotic(t: float) -> float:
    """pi/4 - sqrt(2 pi/t) / (1 + sqrt(pi/(2t))), for sigma > 1/2, t >> 1."""
    if t <= 0:
        raise DomainError("f6_phase_asymptotic needs t > 0")
    return math.pi / 4 - math.sqrt(2 * math.pi / t) / (1 + math.sqrt(math.pi / (2 * t)))


def critical_phase_approx(t: float) -> float:
    """Large-t phase of Delta6(1/2 + it), meaningful modulo pi only."""
    if not t >= 10.0:
        raise DomainError(f"critical_phase_approx needs t >= 10, got {t}")
    q = math.sqrt(math.pi / (2 * t))
    return -math.pi / 8 + q / (1 + q)


def mod_pi_distance(a: float, b: float) -> float:
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def delta6_leading(s: complex, terms: int = 2) -> complex:
    """1 + sum_{k=2}^{terms+1} k^{-2s} (1 - sqrt(k) + (k-1) sqrt(pi/(s-1/2)))."""
    s = _check_finite(s)
    if s.real < 2.0:
        raise DomainError(f"delta6_leading needs Re s >= 2, got {s.real}")
    if not 0 <= terms <= 3:
        raise DomainError("terms must lie in 0..3")
    root = cmath.sqrt(math.pi / (s - 0.5))
    value = 1.0 + 0j
    for k in range(2, terms + 2):
        value += k ** (-2 * s) * (1 - math.sqrt(k) + (k - 1) * root)
    return value


# ---------------------------------------------------------------- local expansions

def _slope_half(cfg: PrecisionConfig) -> complex:
    num = 3 * EULER_GAMMA - 2 * math.log(2 * math.pi) + digamma(0.5)
    return num / (2 * zeta(0.5, cfg))


def _slope_three_quarters(cfg: PrecisionConfig) -> complex:
    g14 = gamma(0.25)
    g34 = gamma(0.75)
    num = 2 * (SQRT_PI * g14 * zeta(0.5, cfg) + g34 * zeta(1.5, cfg))
    return num / (SQRT_PI * g14 + g34)


def local_expansion(center: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> LocalExpansion:
    """First-order Taylor data at the real zeros 1/2 and 3/4."""
    center = complex(center)
    if center == 0.5:
        c1 = _slope_half(cfg)
    elif center == 0.75:
        c1 = _slope_three_quarters(cfg)
    else:
        raise DomainError(f"local expansions exist only at 1/2 and 3/4, not {center}")
    return LocalExpansion(center=center, order=1, coefficients=(0j, complex(c1)))


# ---------------------------------------------------------------- real axis

@dataclass(frozen=True)
class RealAxisStructure:
    zeros: tuple[float, ...]
    poles: tuple[float, ...]
    decreasing_from: float
    decreasing: bool
    decreasing_until: float | None = None  # first sample where the decrease fails, if any


def _real_values(x: np.ndarray, cfg: PrecisionConfig) -> np.ndarray:
    v = delta6_array(x.astype(np.complex128), cfg, check=False)
    return v.real


def real_axis_scan(lo: float = -6.5, hi: float = 10.0, step: float = 1e-3,
                   cfg: PrecisionConfig = DEFAULT_CONFIG, decreasing_from: float = 1.05,
                   tol: float = 1e-12) -> RealAxisStructure:
    """Sign changes of the (real) values of Delta6 on [lo, hi], split into zeros and poles.

    The grid is shifted off the rational points so that no sample lands on a
    Gamma pole; each bracket is bisected and classified by the size of the
    value at its midpoint.
    """
    shift = step * 0.2718281828
    x = np.arange(lo + shift, hi, step)
    v = _real_values(x, cfg)
    zeros, poles = [], []
    ok = np.isfinite(v)
    idx = np.nonzero(ok)[0]
    for i, j in zip(idx[:-1], idx[1:]):
        a, b, fa, fb = x[i], x[j], v[i], v[j]
        if (fa > 0) == (fb > 0):
            continue
        while b - a > tol * max(1.0, abs(a)):
            m = 0.5 * (a + b)
            fm = _real_values(np.array([m]), cfg)[0]
            if not math.isfinite(fm) or fm == 0.0:
                a = b = m
                fa = fm
                break
            if (fm > 0) == (fa > 0):
                a, fa = m, fm
            else:
                b = m
        m = 0.5 * (a + b)
        fm = _real_values(np.array([m]), cfg)[0]
        (poles if not math.isfinite(fm) or abs(fm) > 1.0 else zeros).append(float(m))
    # endpoint zero exactly at lo (e.g. a half-integer) is picked up by direct evaluation
    v_lo = _real_values(np.array([lo]), cfg)[0]
    if v_lo == 0.0:
        zeros.insert(0, float(lo))
    mono = x[(x > decreasing_from) & ok]
    mv = v[(x > decreasing_from) & ok]
    rises = np.nonzero(np.diff(mv) >= 0)[0]
    decreasing = bool(mono.size > 1 and rises.size == 0)
    until = None if decreasing or mono.size < 2 else float(mono[rises[0]])
    return RealAxisStructure(tuple(zeros), tuple(poles), decreasing_from, decreasing, until)
