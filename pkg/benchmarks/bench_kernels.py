"""Euler-Maclaurin kernel: numba vs pure numpy.

Runs both implementations on the same batch of points on sigma = 1/2
(the hot path of every scan and grid), checks they agree, and prints timings.

    python benchmarks/bench_kernels.py --heights 100 1000 2000 --points 200
"""
import argparse
import json
import time

import numpy as np

from critline import _accel
from critline.special import DEFAULT_CONFIG, _em_coefficients


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--heights", type=float, nargs="+", default=[100.0, 1000.0, 2000.0])
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    bern = _em_coefficients(DEFAULT_CONFIG.bernoulli_order)
    rows = []
    for height in args.heights:
        t = np.linspace(height, height + 5.0, args.points)
        s = 0.5 + 1j * t
        n = DEFAULT_CONFIG.terms_for(t).astype(np.int64)
        logs = _accel.log_table(int(n.max()))
        t_np, v_np = best_of(lambda: _accel.em_zeta_numpy(s, n, bern, logs), args.repeat)
        row = {"height": height, "points": args.points, "terms": int(n.max()), "numpy_s": t_np}
        if _accel.HAVE_NUMBA:
            _accel.em_zeta_numba(s[:2], n[:2], bern, logs)  # compile outside the timing
            t_nb, v_nb = best_of(lambda: _accel.em_zeta_numba(s, n, bern, logs), args.repeat)
            row["numba_s"] = t_nb
            row["speedup"] = t_np / t_nb
            row["max_rel_diff"] = float(np.max(np.abs(v_nb[0] - v_np[0]) / np.abs(v_np[0])))
        rows.append(row)

    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"backend available: {'numba' if _accel.HAVE_NUMBA else 'numpy only'}")
    print(f"{'height':>8} {'terms':>6} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8} {'rel diff':>9}")
    for r in rows:
        nb = r.get("numba_s")
        print(f"{r['height']:8.0f} {r['terms']:6d} {1e3 * r['numpy_s']:11.2f} "
              f"{(1e3 * nb if nb else float('nan')):11.2f} {r.get('speedup', float('nan')):8.1f} "
              f"{r.get('max_rel_diff', float('nan')):9.1e}")


if __name__ == "__main__":
    main()
