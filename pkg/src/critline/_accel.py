"""Hot kernels: the truncated Dirichlet sum plus Euler-Maclaurin correction.

Two interchangeable implementations live here. The numba one is used when
numba imports cleanly and ``CRITLINE_NO_NUMBA`` is unset; the pure-numpy one
is always available and is what the benchmark compares against.
"""
from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("CRITLINE_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in ("1", "true", "yes", "on")

try:
    if NUMBA_DISABLED:
        raise ImportError("numba disabled by CRITLINE_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False


_LOG_TABLE = np.zeros(1)


def log_table(n_max: int) -> np.ndarray:
    """Return ``log(k)`` for k = 0..n_max (entry 0 unused), cached and grown on demand."""
    global _LOG_TABLE
    if _LOG_TABLE.shape[0] <= n_max:
        size = max(n_max + 1, 2 * _LOG_TABLE.shape[0])
        table = np.zeros(size)
        table[1:] = np.log(np.arange(1, size, dtype=np.float64))
        _LOG_TABLE = table
    return _LOG_TABLE


def em_zeta_numpy(s, n_terms, bern, logs):
    """Euler-Maclaurin zeta for each s[i] with N = n_terms[i].

    ``bern[k]`` holds B_{2k+2}/(2k+2)!; the last entry is only used for the
    tail estimate. Returns (values, tail_magnitudes).
    """
    s = np.asarray(s, dtype=np.complex128)
    out = np.empty(s.shape[0], dtype=np.complex128)
    tail = np.empty(s.shape[0], dtype=np.float64)
    m = bern.shape[0] - 1
    for i in range(s.shape[0]):
        z = s[i]
        n = int(n_terms[i])
        acc = np.exp(-z * logs[1:n]).sum()
        nz = np.exp(-z * logs[n])
        acc += n * nz / (z - 1.0) + 0.5 * nz
        q = z * nz / n
        inv_n2 = 1.0 / (n * n)
        for k in range(m):
            acc += bern[k] * q
            q = q * (z + 2 * k + 1) * (z + 2 * k + 2) * inv_n2
        out[i] = acc
        tail[i] = abs(bern[m] * q)
    return out, tail


def _em_zeta_loop(s, n_terms, bern, logs):
    out = np.empty(s.shape[0], dtype=np.complex128)
    tail = np.empty(s.shape[0], dtype=np.float64)
    m = bern.shape[0] - 1
    for i in range(s.shape[0]):
        z = s[i]
        n = n_terms[i]
        sr = z.real
        si = z.imag
        re = 0.0
        im = 0.0
        for j in range(1, n):
            lg = logs[j]
            mag = np.exp(-sr * lg)
            ang = si * lg
            re += mag * np.cos(ang)
            im -= mag * np.sin(ang)
        acc = complex(re, im)
        nz = np.exp(-z * logs[n])
        acc += n * nz / (z - 1.0) + 0.5 * nz
        q = z * nz / n
        inv_n2 = 1.0 / (n * n)
        for k in range(m):
            acc += bern[k] * q
            q = q * (z + 2 * k + 1) * (z + 2 * k + 2) * inv_n2
        out[i] = acc
        tail[i] = abs(bern[m] * q)
    return out, tail


if HAVE_NUMBA:
    em_zeta_numba = njit(cache=True, nogil=True)(_em_zeta_loop)
else:  # pragma: no cover
    em_zeta_numba = None


def em_zeta(s, n_terms, bern):
    """Dispatch to the active backend."""
    s = np.ascontiguousarray(s, dtype=np.complex128)
    n_terms = np.ascontiguousarray(n_terms, dtype=np.int64)
    logs = log_table(int(n_terms.max()) if n_terms.size else 1)
    if HAVE_NUMBA:
        return em_zeta_numba(s, n_terms, np.ascontiguousarray(bern), logs)
    return em_zeta_numpy(s, n_terms, bern, logs)


def backend_name() -> str:
    return "numba" if HAVE_NUMBA else "numpy"
