"""Quartic modifications of Delta6: injected off-axis poles and compensating on-axis zeros.

D6(s) vanishes at s0, 1-s0, conj(s0), 1-conj(s0); N6(s) at s1, s2 and their
conjugates. Both are monic, real on the real axis and symmetric under s -> 1-s.
In the variable u = s - 1/2 they are even quartics, which is the natural
variable for the large-|s| expansion of N6/D6.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .delta6_core import EvaluationResult, _flag, delta6_array, delta6_value
from .errors import DomainError, FitError, NearPoleError
from .special import DEFAULT_CONFIG, PrecisionConfig

DENOMINATOR_ONLY = "DenominatorOnly"
BOTH = "Both"
MODES = (DENOMINATOR_ONLY, BOTH)
ROOT_EXCLUSION = 1e-6
FIT_ABSCISSAS = (1e7, 1e8, 1e9)


@dataclass(frozen=True)
class ModificationParams:
    s0: complex
    s1: complex
    s2: complex

    def __post_init__(self):
        for z in (self.s1, self.s2):
            if complex(z).real != 0.5:
                raise DomainError(f"on-axis roots need real part exactly 1/2, got {z}")
        if complex(self.s0).real == 0.5:
            raise DomainError("s0 on the critical line makes the modification vacuous")

    @property
    def delta_sigma0(self) -> float:
        return complex(self.s0).real - 0.5

    @property
    def t0(self) -> float:
        return complex(self.s0).imag

    @property
    def t1(self) -> float:
        return complex(self.s1).imag

    @property
    def t2(self) -> float:
        return complex(self.s2).imag

    def denominator_roots(self) -> tuple[complex, ...]:
        s0 = complex(self.s0)
        return (s0, 1 - s0, s0.conjugate(), 1 - s0.conjugate())

    def numerator_roots(self) -> tuple[complex, ...]:
        s1, s2 = complex(self.s1), complex(self.s2)
        return (s1, s2, s1.conjugate(), s2.conjugate())

    def as_dict(self) -> dict:
        return {"s0": [self.s0.real, self.s0.imag], "s1": [self.s1.real, self.s1.imag],
                "s2": [self.s2.real, self.s2.imag]}


REFERENCE_PARAMS = ModificationParams(0.45 + 983.5j, 0.5 + 983.3j, 0.5 + 983.7j)


def _quartic(s, roots):
    s = np.asarray(s, dtype=np.complex128)
    out = np.ones_like(s)
    for r in roots:
        out = out * (s - r)
    return out


def d6_factor(s, p: ModificationParams):
    out = _quartic(s, p.denominator_roots())
    return complex(out) if out.ndim == 0 else out


def n6_factor(s, p: ModificationParams):
    out = _quartic(s, p.numerator_roots())
    return complex(out) if out.ndim == 0 else out


def modified_delta6_array(s, p: ModificationParams, mode: str = BOTH,
                          cfg: PrecisionConfig = DEFAULT_CONFIG) -> np.ndarray:
    if mode not in MODES:
        raise DomainError(f"mode must be one of {MODES}")
    s = np.asarray(s, dtype=np.complex128)
    base = delta6_array(s, cfg)
    den = _quartic(s, p.denominator_roots())
    with np.errstate(divide="ignore", invalid="ignore"):
        if mode == DENOMINATOR_ONLY:
            return base / den
        return base * (_quartic(s, p.numerator_roots()) / den)


def modified_delta6(s: complex, p: ModificationParams, mode: str = BOTH,
                    cfg: PrecisionConfig = DEFAULT_CONFIG) -> EvaluationResult:
    s = complex(s)
    for r in p.denominator_roots():
        if abs(s - r) < ROOT_EXCLUSION:
            raise NearPoleError(f"s={s} within {ROOT_EXCLUSION:g} of injected pole {r}", s)
    if mode == BOTH:
        for r in p.numerator_roots():
            if abs(s - r) < ROOT_EXCLUSION:
                raise NearPoleError(f"s={s} within {ROOT_EXCLUSION:g} of injected zero {r}", s)
    base = delta6_value(s, cfg)
    factor = 1.0 / d6_factor(s, p) if mode == DENOMINATOR_ONLY else n6_factor(s, p) / d6_factor(s, p)
    value = base * factor
    return EvaluationResult.from_value(value, _flag(s, value))


def modified_functional_residual(s: complex, p: ModificationParams, cfg: PrecisionConfig = DEFAULT_CONFIG) -> float:
    from .delta6_core import f6

    lhs = modified_delta6(1 - s, p, BOTH, cfg).value
    rhs = f6(s) * modified_delta6(s, p, BOTH, cfg).value
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------- expansion

def c2_theory(p: ModificationParams) -> float:
    """Coefficient X in N6/D6 = 1 + X/u^2 + O(u^-4)."""
    d = p.delta_sigma0
    return 2 * d * d + p.t1 ** 2 + p.t2 ** 2 - 2 * p.t0 ** 2


def c4_theory(p: ModificationParams) -> float:
    """Magnitude of the u^-4 coefficient once X = 0; the fitted value should be its negative."""
    d2 = 4 * p.delta_sigma0 ** 2
    return (d2 + (p.t1 - p.t2) ** 2) * (d2 + (p.t1 + p.t2) ** 2) / 4


def nulled_t0(delta_sigma0: float, t1: float, t2: float) -> float:
    """t0 making c2 vanish."""
    return math.sqrt(delta_sigma0 ** 2 + (t1 * t1 + t2 * t2) / 2)


def _ratio_minus_one_exact(u: Fraction, p: ModificationParams, t0_sq: Fraction | None = None) -> Fraction:
    """N6/D6 - 1 at real s = 1/2 + u, in exact rational arithmetic."""
    d = Fraction(p.delta_sigma0)
    t1, t2 = Fraction(p.t1), Fraction(p.t2)
    if t0_sq is None:
        t0_sq = Fraction(p.t0) ** 2
    # conjugate pairs multiply to real quadratics in u
    den = ((u - d) ** 2 + t0_sq) * ((u + d) ** 2 + t0_sq)
    num = (u * u + t1 * t1) * (u * u + t2 * t2)
    return (num - den) / den


def _fit(p: ModificationParams, abscissas: Sequence[float], t0_sq: Fraction | None = None):
    """Least squares for R(u) = c2/u^2 + c4/u^4 in exact arithmetic; returns (c2, c4, rel_residual)."""
    rows = []
    for a in abscissas:
        u = Fraction(a)
        rows.append((1 / u ** 2, 1 / u ** 4, _ratio_minus_one_exact(u, p, t0_sq)))
    # weight rows by 1/|R| so the solve minimises relative residuals
    scaled = [(x / abs(r), y / abs(r), r / abs(r)) if r != 0 else (x, y, r) for x, y, r in rows]
    sxx = sum(x * x for x, _, _ in scaled)
    sxy = sum(x * y for x, y, _ in scaled)
    syy = sum(y * y for _, y, _ in scaled)
    sxr = sum(x * r for x, _, r in scaled)
    syr = sum(y * r for _, y, r in scaled)
    det = sxx * syy - sxy * sxy
    if det == 0:
        raise FitError("singular normal equations")
    c2 = (sxr * syy - syr * sxy) / det
    c4 = (sxx * syr - sxy * sxr) / det
    worst = Fraction(0)
    for x, y, r in rows:
        pred = c2 * x + c4 * y
        if r != 0:
            worst = max(worst, abs(pred - r) / abs(r))
        elif pred != 0:
            worst = max(worst, abs(pred))
    return float(c2), float(c4), float(worst)


@dataclass
class ExpansionCheck:
    c2: float
    c4: float
    c2_theory: float
    c4_theory: float
    fit_residual: float
    nulled_t0: float
    nulled_c2: float
    nulled_c4: float
    nulled_fit_residual: float
    abscissas: tuple[float, ...]

    @property
    def c2_rel_error(self) -> float:
        return abs(self.c2 - self.c2_theory) / abs(self.c2_theory) if self.c2_theory else abs(self.c2)

    @property
    def c4_rel_error(self) -> float:
        return abs(self.nulled_c4 + self.c4_theory) / self.c4_theory if self.c4_theory else abs(self.nulled_c4)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["abscissas"] = list(self.abscissas)
        d["c2_rel_error"] = self.c2_rel_error
        d["c4_rel_error"] = self.c4_rel_error
        return d

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def ratio_expansion_check(p: ModificationParams, abscissas: Sequence[float] = FIT_ABSCISSAS,
                          max_residual: float = 1e-6) -> ExpansionCheck:
    """Fit the 1/u^2 and 1/u^4 coefficients of N6/D6 - 1 and compare with the closed forms.

    The fit is repeated with t0 moved to the value that cancels the 1/u^2 term,
    where the 1/u^4 coefficient should equal -c4_theory.
    """
    c2, c4, res = _fit(p, abscissas)
    if res > max_residual:
        raise FitError(f"fit residual {res:.3e} exceeds {max_residual:g}")
    t0n = nulled_t0(p.delta_sigma0, p.t1, p.t2)
    # null exactly: t0^2 is rational even when t0 is not
    d, t1, t2 = Fraction(p.delta_sigma0), Fraction(p.t1), Fraction(p.t2)
    c2n, c4n, resn = _fit(p, abscissas, d * d + (t1 * t1 + t2 * t2) / 2)
    if resn > max_residual:
        raise FitError(f"nulled fit residual {resn:.3e} exceeds {max_residual:g}")
    return ExpansionCheck(c2, c4, c2_theory(p), c4_theory(p), res, t0n, c2n, c4n, resn, tuple(abscissas))


def random_params(rng: random.Random, t_lo: float = 10.0, t_hi: float = 2000.0) -> ModificationParams:
    """Admissible draw: off-axis s0, distinct on-axis heights."""
    d = 0.0
    while d == 0.0:
        d = rng.uniform(-0.49, 0.49)
    t0 = rng.uniform(t_lo, t_hi)
    t1 = t0 + rng.uniform(-1.0, 1.0)
    t2 = t0 + rng.uniform(-1.0, 1.0)
    return ModificationParams(complex(0.5 + d, t0), complex(0.5, t1), complex(0.5, t2))


# ---------------------------------------------------------------- asymptotics

@dataclass
class DeviationProfile:
    sigma: list[float]
    deviation: list[float]
    baseline: list[float]
    crossover: float | None


def deviation_profile(p: ModificationParams, sigmas: Sequence[float] | None = None,
                      cfg: PrecisionConfig = DEFAULT_CONFIG) -> DeviationProfile:
    """|Delta6~ - Delta6| (mode Both) against |Delta6 - 1| on the real axis.

    The crossover is the sigma beyond which the injected algebraic deviation
    stays above the intrinsic exponential approach to 1 (Delta6 - 1 itself
    changes sign near sigma = 7.05, so a first-exceedance rule would stop there).
    """
    if sigmas is None:
        sigmas = np.linspace(2.0, 40.0, 381)
    s = np.asarray(sigmas, dtype=np.float64)
    base = delta6_array(s.astype(np.complex128), cfg)
    u = s - 0.5
    # N6/D6 - 1 from the real quadratic factors, without cancellation in the leading terms
    d, t0, t1, t2 = p.delta_sigma0, p.t0, p.t1, p.t2
    den = ((u - d) ** 2 + t0 ** 2) * ((u + d) ** 2 + t0 ** 2)
    num_minus_den = (u ** 2) * (t1 ** 2 + t2 ** 2 + 2 * d * d - 2 * t0 ** 2) + (t1 * t2) ** 2 - (d * d + t0 * t0) ** 2
    dev = np.abs(base * num_minus_den / den)
    baseline = np.abs(base - 1.0)
    cross = None
    below = np.nonzero(dev <= baseline)[0]
    if below.size == 0:
        cross = float(s[0])
    elif below[-1] + 1 < s.size:
        cross = float(s[below[-1] + 1])
    return DeviationProfile(list(map(float, s)), list(map(float, dev)), list(map(float, baseline)), cross)
