import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sps

from critline import special
from critline.errors import AccuracyError, DomainError, PoleError
from critline.special import DEFAULT_CONFIG, PrecisionConfig

mp.mp.dps = 30


def rel(a, b):
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)


# ---------------------------------------------------------------- config

def test_config_invariants():
    with pytest.raises(DomainError):
        PrecisionConfig(euler_maclaurin_terms=1)
    with pytest.raises(DomainError):
        PrecisionConfig(bernoulli_order=16)
    with pytest.raises(DomainError):
        PrecisionConfig(target_rel_tol=1e-3)
    assert DEFAULT_CONFIG.bernoulli_order == 10
    assert DEFAULT_CONFIG.target_rel_tol == 1e-10
    assert int(DEFAULT_CONFIG.terms_for(np.array([0.0]))[0]) == 10
    assert int(DEFAULT_CONFIG.terms_for(np.array([1000.0]))[0]) == 1300
    assert int(DEFAULT_CONFIG.terms_for(np.array([1e9]))[0]) == 100_000


def test_profiles(monkeypatch):
    assert special.profile_config("strict").target_rel_tol < special.profile_config("fast").target_rel_tol
    monkeypatch.setenv("CRITLINE_PRECISION_PROFILE", "fast")
    assert special.profile_config() == special.PROFILES["fast"]
    with pytest.raises(DomainError):
        special.profile_config("bogus")


def test_bernoulli_numbers():
    b = special.bernoulli_b2k(8)
    for k, v in enumerate(b, start=1):
        assert float(v) == pytest.approx(float(mp.bernoulli(2 * k)), rel=1e-15)


# ---------------------------------------------------------------- log gamma

def test_log_gamma_closed_forms():
    assert special.log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), abs=1e-14)
    assert abs(special.log_gamma(1.0)) < 1e-14
    assert abs(special.log_gamma(2.0)) < 1e-14


def _stirling_log_gamma(z, shift=40, terms=30):
    """Independent oracle: recurrence up by `shift`, then a 30-term Stirling series (mpmath arithmetic)."""
    z = mp.mpc(z)
    w = z + shift
    acc = (w - mp.mpf(1) / 2) * mp.log(w) - w + mp.log(2 * mp.pi) / 2
    for k in range(1, terms + 1):
        acc += mp.bernoulli(2 * k) / (2 * k * (2 * k - 1) * w ** (2 * k - 1))
    for k in range(shift):
        acc -= mp.log(z + k)
    return complex(acc)


def test_log_gamma_one_plus_i_stirling_oracle():
    oracle = _stirling_log_gamma(1 + 1j)
    assert rel(special.log_gamma(1 + 1j), oracle) < 1e-12
    assert rel(oracle, complex(mp.loggamma(1 + 1j))) < 1e-20 + 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(-30, 30), st.floats(-1e4, 1e4))
def test_log_gamma_vs_mpmath(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and x <= 0 and abs(x - round(x)) < 1e-3:
        return
    got = special.log_gamma(z)
    ref = complex(mp.loggamma(mp.mpc(x, y)))
    assert abs(got - ref) <= 1e-12 * max(abs(ref), 1.0) + 1e-11


def test_log_gamma_vs_scipy_grid():
    x = np.linspace(-20.3, 40.1, 61)
    y = np.linspace(-300, 300, 41)
    z = (x[:, None] + 1j * y[None, :]).ravel()
    got = special.log_gamma_array(z)
    ref = sps.loggamma(z)
    assert np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1.0)) < 1e-12


def test_log_gamma_poles():
    for k in range(0, 5):
        with pytest.raises(PoleError):
            special.log_gamma(-k)
    assert np.isnan(special.log_gamma_array(np.array([-3.0 + 0j]))[0])


@settings(max_examples=50, deadline=None)
@given(st.floats(-20, 20), st.floats(0.5, 500))
def test_log_gamma_recurrence(x, y):
    z = complex(x, y)
    d = special.log_gamma(z + 1) - special.log_gamma(z) - cmath.log(z)
    k = round(d.imag / (2 * math.pi))
    assert abs(complex(d.real, d.imag - 2 * math.pi * k)) < 1e-12 * max(1.0, abs(special.log_gamma(z)))


def test_gamma_values():
    assert special.gamma(5) == pytest.approx(24.0, rel=1e-13)
    assert special.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert rel(special.gamma(-2.5 + 0j), complex(mp.gamma(-2.5))) < 1e-12


# ---------------------------------------------------------------- digamma

def test_digamma_closed_forms():
    g = special.EULER_GAMMA
    assert special.digamma(1) == pytest.approx(-g, abs=1e-14)
    assert special.digamma(0.5) == pytest.approx(-g - 2 * math.log(2), abs=1e-13)
    assert special.digamma(2) == pytest.approx(1 - g, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.floats(-15, 30), st.floats(-200, 200))
def test_digamma_vs_mpmath(x, y):
    if abs(y) < 1e-2 and x <= 0.5 and abs(x - round(x)) < 1e-2:
        return
    ref = complex(mp.digamma(mp.mpc(x, y)))
    assert rel(special.digamma(complex(x, y)), ref) < 1e-10


def test_digamma_poles():
    with pytest.raises(PoleError):
        special.digamma(-2)


# ---------------------------------------------------------------- zeta

def test_zeta_closed_forms():
    assert special.zeta(2) == pytest.approx(math.pi ** 2 / 6, rel=1e-13)
    assert special.zeta(0) == pytest.approx(-0.5, rel=1e-13)
    assert special.zeta(-1) == pytest.approx(-1 / 12, rel=1e-12)
    assert special.zeta(-2) == 0


def test_zeta_pole():
    with pytest.raises(PoleError):
        special.zeta(1)
    with pytest.raises(DomainError):
        special.zeta(complex(float("nan"), 0))


@settings(max_examples=80, deadline=None)
@given(st.floats(-15, 8), st.floats(-2000, 2000))
def test_zeta_vs_mpmath(x, y):
    s = complex(x, y)
    if abs(s - 1) < 1e-3:
        return
    ref = complex(mp.zeta(mp.mpc(x, y)))
    if abs(ref) < 1e-8:
        return
    assert rel(special.zeta(s), ref) < 1e-10


def test_zeta_first_critical_zero_refined_by_hardy_bisection():
    a, b = 14.0, 14.3
    fa = special.hardy_Z(a)
    for _ in range(60):
        m = 0.5 * (a + b)
        fm = special.hardy_Z(m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    u = 0.5 * (a + b)
    assert abs(special.zeta(0.5 + 1j * u)) < 1e-6
    assert u == pytest.approx(14.134725141734693, abs=1e-9)


def test_zeta_reflection_consistency():
    sig = np.linspace(-3, 4, 15)
    t = np.linspace(-50, 50, 21)
    s = (sig[:, None] + 1j * t[None, :]).ravel()
    s = s[np.abs(s - 1) > 0.05]
    direct = special.zeta_em_array(s)
    reflected = special.zeta_array(s)
    with np.errstate(invalid="ignore"):
        r = np.abs(direct - reflected) / np.maximum(np.abs(reflected), 1e-300)
    mask = np.abs(reflected) > 1e-12
    assert np.max(r[mask]) < 1e-9


def test_zeta_error_shrinks_with_terms():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = complex(rng.uniform(-1, 3), rng.uniform(5, 200))
        ref = complex(mp.zeta(s))
        errs = []
        for n in (10, 20, 40):
            cfg = PrecisionConfig(euler_maclaurin_terms=n, bernoulli_order=2, target_rel_tol=1e-6)
            errs.append(abs(complex(special.zeta_em_array(np.array([s]), cfg, check=False)[0]) - ref))
        assert errs[1] < errs[0] and errs[2] < errs[1]


def test_zeta_accuracy_error_when_terms_too_few():
    cfg = PrecisionConfig(euler_maclaurin_terms=10, bernoulli_order=2, target_rel_tol=1e-10)
    with pytest.raises(AccuracyError):
        special.zeta(0.5 + 1000j, cfg)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 300))
def test_conjugate_symmetry(x, y):
    s = complex(x, y)
    if abs(s - 1) < 1e-3:
        return
    z1, z2 = special.zeta(s), special.zeta(s.conjugate())
    assert abs(z2 - z1.conjugate()) <= 1e-12 * abs(z1) + 1e-300
    g1, g2 = special.log_gamma(s), special.log_gamma(s.conjugate())
    assert abs(g2 - g1.conjugate()) <= 1e-12 * max(1.0, abs(g1))
    d1, d2 = special.digamma(s), special.digamma(s.conjugate())
    assert abs(d2 - d1.conjugate()) <= 1e-12 * max(1.0, abs(d1))


# ---------------------------------------------------------------- Hardy Z

def test_hardy_z_vs_mpmath():
    for u in (2.0, 10.0, 14.0, 100.5, 981.3, 1962.6, 3000.1):
        assert special.hardy_Z(u) == pytest.approx(float(mp.siegelz(u)), rel=1e-9, abs=1e-10)


def test_hardy_z_modulus_equals_zeta():
    assert abs(special.hardy_Z(2.0)) == pytest.approx(abs(special.zeta(0.5 + 2j)), rel=1e-12)


def test_hardy_z_sign_changes():
    u = np.arange(10.0, 30.0, 0.01)
    z = special.hardy_z_array(u)
    crossings = u[:-1][np.sign(z[:-1]) != np.sign(z[1:])]
    assert crossings[0] == pytest.approx(14.1347, abs=0.01)
    assert crossings[1] == pytest.approx(21.0220, abs=0.01)
    assert crossings[2] == pytest.approx(25.0109, abs=0.01)


def test_hardy_z_domain():
    with pytest.raises(DomainError):
        special.hardy_Z(0.0)
    with pytest.raises(DomainError):
        special.hardy_Z(-3.0)


def test_theta_vs_mpmath():
    for u in (5.0, 50.0, 1000.0):
        assert special.riemann_siegel_theta(u) == pytest.approx(float(mp.siegeltheta(u)), abs=1e-10)
