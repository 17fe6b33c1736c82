import os
import subprocess
import sys

import numpy as np
import pytest

from critline import _accel
from critline.special import DEFAULT_CONFIG, _em_coefficients


def _batch():
    t = np.linspace(0.0, 2000.0, 37)
    s = np.concatenate([0.5 + 1j * t, 2.0 + 1j * t, -0.7 + 1j * t])
    n = DEFAULT_CONFIG.terms_for(s.imag).astype(np.int64)
    return s, n, _em_coefficients(10)


def test_numpy_path_matches_dispatch():
    s, n, bern = _batch()
    logs = _accel.log_table(int(n.max()))
    ref, tail_ref = _accel.em_zeta_numpy(s, n, bern, logs)
    got, tail = _accel.em_zeta(s, n, bern)
    assert np.max(np.abs(got - ref) / np.abs(ref)) < 1e-11
    assert np.allclose(tail, tail_ref, rtol=1e-6)


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not importable")
def test_numba_kernel_matches_numpy():
    s, n, bern = _batch()
    logs = _accel.log_table(int(n.max()))
    a, _ = _accel.em_zeta_numba(s, n, bern, logs)
    b, _ = _accel.em_zeta_numpy(s, n, bern, logs)
    assert np.max(np.abs(a - b) / np.abs(b)) < 1e-11


def test_log_table_grows():
    t = _accel.log_table(50)
    assert t.shape[0] > 50 and t[7] == pytest.approx(np.log(7.0))


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, CRITLINE_NO_NUMBA="1")
    code = "from critline import _accel, special; print(_accel.backend_name(), round(special.zeta(2).real, 12))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", str(round(np.pi ** 2 / 6, 12))]
