"""Complex special functions: log-gamma, digamma, zeta and Hardy's Z.

Everything here accepts python complex scalars; the ``*_array`` variants take
numpy arrays and never raise on singular points (they return nan there), which
is what grid and scan code wants.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import AccuracyError, DomainError, PoleError

LOG_PI = math.log(math.pi)
LOG_2PI = math.log(2.0 * math.pi)
EULER_GAMMA = 0.57721566490153286060651209008240243

# Godfrey's coefficients, g = 607/128.
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])

MAX_EM_TERMS = 100_000
REFLECT_BELOW = -1.0


@dataclass(frozen=True)
class PrecisionConfig:
    """Euler-Maclaurin settings.

    ``euler_maclaurin_terms=None`` picks N = max(10, ceil(terms_per_height * |t|))
    per evaluation point, capped at 10^5.
    """

    euler_maclaurin_terms: int | None = None
    bernoulli_order: int = 10
    target_rel_tol: float = 1e-10
    terms_per_height: float = 1.3

    def __post_init__(self):
        n = self.euler_maclaurin_terms
        if n is not None and (int(n) != n or n < 2):
            raise DomainError(f"euler_maclaurin_terms must be an integer >= 2, got {n}")
        if not 1 <= self.bernoulli_order <= 15:
            raise DomainError(f"bernoulli_order must lie in [1, 15], got {self.bernoulli_order}")
        if not 0.0 < self.target_rel_tol <= 1e-6:
            raise DomainError(f"target_rel_tol must lie in (0, 1e-6], got {self.target_rel_tol}")
        if self.terms_per_height <= 0:
            raise DomainError("terms_per_height must be positive")

    def terms_for(self, t):
        """Truncation point(s) for imaginary part(s) ``t``."""
        if self.euler_maclaurin_terms is not None:
            return np.full(np.shape(t), int(self.euler_maclaurin_terms), dtype=np.int64)
        n = np.ceil(self.terms_per_height * np.abs(t)).astype(np.int64)
        return np.clip(n, 10, MAX_EM_TERMS)


PROFILES = {
    "fast": PrecisionConfig(bernoulli_order=6, target_rel_tol=1e-7, terms_per_height=1.0),
    "default": PrecisionConfig(),
    "strict": PrecisionConfig(bernoulli_order=15, target_rel_tol=1e-12, terms_per_height=2.0),
}


def profile_config(name: str | None = None) -> PrecisionConfig:
    """Preset by name, falling back to ``CRITLINE_PRECISION_PROFILE`` then ``default``."""
    if name is None:
        name = os.environ.get("CRITLINE_PRECISION_PROFILE", "default") or "default"
    try:
        return PROFILES[name]
    except KeyError:
        raise DomainError(f"unknown precision profile {name!r}; choose from {sorted(PROFILES)}") from None


DEFAULT_CONFIG = PrecisionConfig()


@lru_cache(maxsize=None)
def bernoulli_b2k(count: int) -> tuple[Fraction, ...]:
    """Exact B_2, B_4, ..., B_{2*count} (Akiyama-Tanigawa)."""
    size = 2 * count + 1
    a = [Fraction(0)] * (size + 1)
    b = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        b.append(a[0])
    return tuple(b[2 * k] for k in range(1, count + 1))


@lru_cache(maxsize=None)
def _em_coefficients(order: int) -> np.ndarray:
    # B_{2k}/(2k)! for k = 1..order+1; the extra one feeds the tail estimate
    bs = bernoulli_b2k(order + 1)
    return np.array([float(b / math.factorial(2 * k)) for k, b in enumerate(bs, start=1)])


def _check_finite(s: complex, name: str = "s") -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"{name} must be finite, got {s!r}")
    return s


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


# ---------------------------------------------------------------- log-gamma

def _lanczos_log_gamma(z: np.ndarray) -> np.ndarray:
    zm = z - 1.0
    x = np.full(zm.shape, LANCZOS_COEF[0], dtype=np.complex128)
    for k in range(1, LANCZOS_COEF.shape[0]):
        x = x + LANCZOS_COEF[k] / (zm + k)
    t = zm + LANCZOS_G + 0.5
    return 0.5 * LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def log_gamma_array(z) -> np.ndarray:
    """Principal-branch log Gamma, elementwise; nan at non-positive integers.

    Arguments left of Re = 1/2 are shifted right with the recurrence; summing
    principal logs of (z + k) keeps the cut exactly on the negative real axis.
    """
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty(z.shape, dtype=np.complex128)
    flat = z.reshape(-1)
    res = out.reshape(-1)
    shift = np.where(flat.real < 0.5, np.ceil(0.5 - flat.real), 0.0)
    shift = np.nan_to_num(shift, nan=0.0).astype(np.int64)
    w = flat + shift
    res[:] = _lanczos_log_gamma(w)
    if shift.size and shift.max() > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            for k in range(int(shift.max())):
                sel = shift > k
                res[sel] -= np.log(flat[sel] + k)
    bad = (flat.imag == 0.0) & (flat.real <= 0.0) & (flat.real == np.floor(flat.real))
    res[bad] = np.nan
    return out


def log_gamma(s: complex) -> complex:
    """Principal branch of log Gamma(s)."""
    s = _check_finite(s)
    if _is_nonpositive_integer(s):
        raise PoleError(f"log_gamma has a pole at s={s.real:g}", s)
    return complex(log_gamma_array(np.array([s]))[0])


def gamma(s: complex) -> complex:
    return complex(np.exp(log_gamma(s)))


# ---------------------------------------------------------------- digamma

def digamma(s: complex) -> complex:
    """psi(s) via upward recurrence to |s| >= 15, then the asymptotic series."""
    s = _check_finite(s)
    if _is_nonpositive_integer(s):
        raise PoleError(f"digamma has a pole at s={s.real:g}", s)
    if s.real < 0.5:
        # psi(1-s) - psi(s) = pi cot(pi s)
        return digamma(1.0 - s) - math.pi / np.tan(math.pi * s)
    acc = 0j
    z = s
    while abs(z) < 15.0:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    power = inv2
    for k, b in enumerate(bernoulli_b2k(10), start=1):
        series += float(b) / (2 * k) * power
        power *= inv2
    return complex(acc + np.log(z) - 0.5 / z - series)


# ---------------------------------------------------------------- zeta

def _zeta_em_raw(s: np.ndarray, cfg: PrecisionConfig):
    n = cfg.terms_for(s.imag)
    return _accel.em_zeta(s, n, _em_coefficients(cfg.bernoulli_order))


def zeta_em_array(s, cfg: PrecisionConfig = DEFAULT_CONFIG, check: bool = True) -> np.ndarray:
    """Direct Euler-Maclaurin evaluation at every point, no reflection.

    Accurate for any sigma in exact arithmetic, but for sigma well below zero
    the Dirichlet terms grow like n^{-sigma} and cancellation costs digits.
    """
    s = np.asarray(s, dtype=np.complex128)
    flat = s.reshape(-1)
    out = np.full(flat.shape, np.nan + 0j)
    ok = flat != 1.0
    vals, tail = _zeta_em_raw(flat[ok], cfg)
    if check and vals.size:
        scale = np.maximum(np.abs(vals), 1.0)
        worst = np.argmax(tail / scale)
        if tail[worst] > cfg.target_rel_tol * scale[worst]:
            raise AccuracyError(
                f"Euler-Maclaurin tail {tail[worst]:.3e} exceeds tolerance at s={flat[ok][worst]}; "
                "increase euler_maclaurin_terms or bernoulli_order"
            )
    out[ok] = vals
    return out.reshape(s.shape)


def _log_sin_pi_half(z: np.ndarray) -> np.ndarray:
    """log(sin(pi z / 2)) without overflow for large |Im z| (branch irrelevant: exponentiated)."""
    w = 0.5 * np.pi * z
    out = np.empty(w.shape, dtype=np.complex128)
    big = np.abs(w.imag) > 20.0
    up = big & (w.imag > 0)
    dn = big & (w.imag <= 0)
    # sin w = -e^{-iw}(1 - e^{2iw}) / (2i) for Im w > 0, mirrored below
    out[up] = -1j * w[up] + np.log(0.5j) + np.log1p(-np.exp(2j * w[up]))
    out[dn] = 1j * w[dn] + np.log(-0.5j) + np.log1p(-np.exp(-2j * w[dn]))
    small = ~big
    out[small] = np.log(np.sin(w[small]))
    return out


def zeta_array(s, cfg: PrecisionConfig = DEFAULT_CONFIG, check: bool = True) -> np.ndarray:
    """zeta(s) elementwise; reflection for Re s < -1, nan at s = 1.

    zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s), assembled in log space.
    """
    s = np.asarray(s, dtype=np.complex128)
    flat = s.reshape(-1)
    out = np.empty(flat.shape, dtype=np.complex128)
    # direct EM is accurate down to Re s ~ -3; reflecting only below -1 keeps 1 - s away from the pole
    left = flat.real < REFLECT_BELOW
    out[~left] = zeta_em_array(flat[~left], cfg, check)
    if left.any():
        z = flat[left]
        w = 1.0 - z
        zr = zeta_em_array(w, cfg, check)
        log_fac = z * math.log(2.0) + (z - 1.0) * LOG_PI + _log_sin_pi_half(z) + log_gamma_array(w)
        vals = np.exp(log_fac) * zr
        # trivial zeros: sin(pi s/2) = 0 exactly at negative even integers
        trivial = (z.imag == 0.0) & (np.mod(z.real, 2.0) == 0.0)
        vals[trivial] = 0.0
        out[left] = vals
    return out.reshape(s.shape)


def zeta(s: complex, cfg: PrecisionConfig = DEFAULT_CONFIG) -> complex:
    """Riemann zeta on the whole plane minus s = 1."""
    s = _check_finite(s)
    if s == 1.0:
        raise PoleError("zeta has a pole at s=1", s)
    return complex(zeta_array(np.array([s]), cfg)[0])


# ---------------------------------------------------------------- Hardy Z

def riemann_siegel_theta_array(u) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    return log_gamma_array(0.25 + 0.5j * u).imag - 0.5 * u * LOG_PI


def riemann_siegel_theta(u: float) -> float:
    return float(riemann_siegel_theta_array(np.array([float(u)]))[0])


def hardy_z_array(u, cfg: PrecisionConfig = DEFAULT_CONFIG, check: bool = True,
                  imag_tol: float = 1e-8) -> np.ndarray:
    """Real Z(u) = e^{i theta(u)} zeta(1/2 + iu); the imaginary residue is checked then dropped."""
    u = np.asarray(u, dtype=np.float64)
    z = zeta_array(0.5 + 1j * u, cfg, check)
    rotated = np.exp(1j * riemann_siegel_theta_array(u)) * z
    if check and rotated.size:
        resid = np.abs(rotated.imag) / np.maximum(np.abs(rotated), 1.0)
        if np.nanmax(resid) > imag_tol:
            i = int(np.nanargmax(resid))
            raise AccuracyError(f"Hardy Z imaginary residue {resid.flat[i]:.2e} at u={u.flat[i]}")
    return rotated.real


def hardy_Z(u: float, cfg: PrecisionConfig = DEFAULT_CONFIG) -> float:
    u = float(u)
    if not (math.isfinite(u) and u > 0):
        raise DomainError(f"hardy_Z needs u > 0, got {u}")
    return float(hardy_z_array(np.array([u]), cfg)[0])
