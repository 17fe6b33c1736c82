"""Level lines of Delta6: seeding far right, predictor-corrector tracing, field grids.

A phase line is a level set of v = arg Delta6, an amplitude line a level set of
u = log|Delta6|. With w = (log Delta6)' the gradients are grad u = conj(w) and
grad v = i conj(w) (as complex vectors), so each kind of line runs along the
other's gradient.
"""
from __future__ import annotations

import cmath
import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Sequence

import numpy as np

from .counting import CriticalLineEvent, nearest_event
from .delta6_core import EXCLUSION_RADIUS, _near_special, _real_axis_flag, delta6_array, delta6_value, quadrant_array
from .errors import AccuracyError, DomainError, NearPoleError, SeedError
from .special import DEFAULT_CONFIG, PrecisionConfig

LN4 = math.log(4.0)
PHASE_ZERO = "PhaseZero"
AMPLITUDE_UNITY = "AmplitudeUnity"

REACHED = "ReachedCriticalLine"
LEFT_DOMAIN = "LeftDomain"
STEP_LIMIT = "StepLimit"
SINGULAR = "SingularityContact"

FD_STEP = 1e-5
LEVEL_TOL = 1e-8
H_MIN = 1e-4
H_MAX = 0.25
ARRIVAL_TOL = 1e-3


@dataclass(frozen=True)
class LineSeed:
    index: int
    start: complex
    kind: str
    predicted_t: float


@dataclass
class TracedLine:
    kind: str
    level: float
    seed_index: int
    points: list[tuple[float, float]]
    termination: str
    critical_intersection: dict | None = None
    max_level_error: float = 0.0
    anomalies: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "level": self.level,
            "seed_index": self.seed_index,
            "termination": self.termination,
            "critical_intersection": self.critical_intersection,
            "max_level_error": self.max_level_error,
            "anomalies": list(self.anomalies),
            "points": [list(p) for p in self.points],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TracedLine":
        return cls(d["kind"], d["level"], d["seed_index"], [tuple(p) for p in d["points"]],
                   d["termination"], d.get("critical_intersection"), d.get("max_level_error", 0.0),
                   list(d.get("anomalies", [])))

    @property
    def intersection_t(self) -> float | None:
        return None if self.critical_intersection is None else self.critical_intersection["t"]


# ---------------------------------------------------------------- level functions

def _values(s: np.ndarray, cfg: PrecisionConfig) -> np.ndarray:
    return delta6_array(s, cfg)


def _log_derivative(s: complex, cfg: PrecisionConfig) -> tuple[complex, complex]:
    """(Delta6(s), d/ds log Delta6(s)) with a central difference of step FD_STEP."""
    v = _values(np.array([s, s + FD_STEP, s - FD_STEP]), cfg)
    return complex(v[0]), complex(cmath.log(v[1] / v[2]) / (2 * FD_STEP))


def _level_value(value: complex, kind: str, ref: float | None = None) -> float:
    if kind == AMPLITUDE_UNITY:
        return math.log(abs(value))
    ph = cmath.phase(value)
    if ref is not None:
        ph += 2 * math.pi * round((ref - ph) / (2 * math.pi))
    return ph


def _grad(w: complex, kind: str) -> complex:
    return complex(w.imag, w.real) if kind == PHASE_ZERO else w.conjugate()


def _tangent(w: complex, kind: str) -> complex:
    g = w.conjugate() if kind == PHASE_ZERO else complex(w.imag, w.real)
    return g / abs(g)


# ---------------------------------------------------------------- seeds

def _phase_zero_prediction(n: int) -> float:
    """One Newton step on sin(tL)(sqrt2 - 1 - b) - b cos(tL), b = sqrt(pi/2t), from n pi / L."""
    t = n * math.pi / LN4

    def g(t):
        b = math.sqrt(math.pi / (2 * t))
        return math.sin(t * LN4) * (math.sqrt(2) - 1 - b) - b * math.cos(t * LN4)

    h = 1e-6 * t
    dg = (g(t + h) - g(t - h)) / (2 * h)
    return t - g(t) / dg


def _refine_vertical(fn, lo: float, hi: float, tol: float = 1e-12) -> float:
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if (flo > 0) == (fhi > 0):
        raise SeedError(f"no sign change in [{lo}, {hi}]")
    for _ in range(200):
        if hi - lo <= tol * max(1.0, abs(lo)):
            break
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket_near(fn, center: float, half_width: float, samples: int = 24):
    ts = np.linspace(center - half_width, center + half_width, samples + 1)
    vals = [fn(t) for t in ts]
    best = None
    for i in range(samples):
        if (vals[i] > 0) != (vals[i + 1] > 0):
            mid = 0.5 * (ts[i] + ts[i + 1])
            if best is None or abs(mid - center) < abs(best[0] - center):
                best = (mid, ts[i], ts[i + 1])
    if best is None:
        raise SeedError(f"no sign change within {half_width:.3f} of t={center:.4f}")
    return best[1], best[2]


def seed_phase_zero(n: int, sigma_start: float = 6.0, cfg: PrecisionConfig = DEFAULT_CONFIG) -> LineSeed:
    if n < 1 or sigma_start < 4:
        raise DomainError("seed_phase_zero needs n >= 1 and sigma_start >= 4")
    predicted = _phase_zero_prediction(n)
    fn = lambda t: delta6_value(complex(sigma_start, t), cfg).imag
    lo, hi = _bracket_near(fn, predicted, math.pi / (2 * LN4))
    t = _refine_vertical(fn, lo, hi)
    return LineSeed(n, complex(sigma_start, t), PHASE_ZERO, predicted)


def seed_amplitude_unity(n: int, sigma_start: float = 6.0, cfg: PrecisionConfig = DEFAULT_CONFIG) -> LineSeed:
    if n < 1 or sigma_start < 4:
        raise DomainError("seed_amplitude_unity needs n >= 1 and sigma_start >= 4")
    predicted = (n + 0.5) * math.pi / LN4
    fn = lambda t: math.log(abs(delta6_value(complex(sigma_start, t), cfg)))
    lo, hi = _bracket_near(fn, predicted, math.pi / (2 * LN4))
    t = _refine_vertical(fn, lo, hi)
    return LineSeed(n, complex(sigma_start, t), AMPLITUDE_UNITY, predicted)


# ---------------------------------------------------------------- tracing

def _correct(s: complex, kind: str, target: float, cfg: PrecisionConfig, ref: float, max_iter: int = 8):
    """Newton steps along the level function's gradient; returns (point, value, log-derivative, error)."""
    for _ in range(max_iter):
        val, w = _log_derivative(s, cfg)
        if not (math.isfinite(abs(val)) and math.isfinite(abs(w))) or val == 0:
            return None
        err = _level_value(val, kind, ref) - target
        if abs(err) <= 0.1 * LEVEL_TOL:
            return s, val, w, err
        g = _grad(w, kind)
        s = s - err * g / (abs(g) ** 2)
    val, w = _log_derivative(s, cfg)
    err = _level_value(val, kind, ref) - target
    if abs(err) <= LEVEL_TOL:
        return s, val, w, err
    return None


def trace(seed: LineSeed, sigma_stop: float = 0.5, cfg: PrecisionConfig = DEFAULT_CONFIG,
          max_steps: int = 100_000, h0: float = 0.05,
          events: Sequence[CriticalLineEvent] | None = None) -> TracedLine:
    """March a seeded level line toward sigma_stop with an arc-length predictor-corrector."""
    if not 0.5 <= sigma_stop < seed.start.real:
        raise DomainError(f"sigma_stop must lie in [0.5, {seed.start.real})")
    kind = seed.kind
    target = 0.0
    s = seed.start
    first = _correct(s, kind, target, cfg, 0.0)
    if first is None:
        raise SeedError(f"seed {seed.index} could not be corrected onto the level")
    s, val, w, err = first
    line = TracedLine(kind, target, seed.index, [(s.real, s.imag)], STEP_LIMIT)
    max_err = abs(err)
    tangent = _tangent(w, kind)
    if tangent.real > 0:
        tangent = -tangent
    h = h0
    clean = 0
    monotone_zone = sigma_stop + 0.1
    for _ in range(max_steps):
        room = s.real - (sigma_stop + 0.5 * ARRIVAL_TOL)
        step = h
        if tangent.real < 0 and -tangent.real * step > room:
            step = max(H_MIN, room / -tangent.real)
        pred = s + step * tangent
        got = _correct(pred, kind, target, cfg, target)
        ok = got is not None
        if ok:
            s_new, val_new, w_new, err_new = got
            t_new = _tangent(w_new, kind)
            if (t_new.real * tangent.real + t_new.imag * tangent.imag) < 0:
                t_new = -t_new
            turn = abs(cmath.phase(t_new / tangent))
            dist = abs(s_new - s)
            ok = turn < 0.35 and 0.5 * step <= dist <= 1.5 * step
        if not ok:
            if h <= H_MIN * (1 + 1e-9):
                line.anomalies.append(f"corrector failed at s={s.real:.6f}{s.imag:+.6f}i with h at floor")
                line.termination = SINGULAR
                break
            h = max(H_MIN, 0.5 * h)
            clean = 0
            continue
        mod = abs(val_new)
        if not 1e-8 <= mod <= 1e8:
            line.termination = SINGULAR
            break
        if s_new.real >= s.real and s.real > monotone_zone and kind == PHASE_ZERO:
            line.anomalies.append(f"sigma increased at t={s_new.imag:.6f}")
        # loop detection against all but the last few points
        if len(line.points) > 5:
            prev = np.array(line.points[:-3])
            if np.min(np.hypot(prev[:, 0] - s_new.real, prev[:, 1] - s_new.imag)) < 1e-4:
                line.anomalies.append("loop")
                line.termination = LEFT_DOMAIN
                break
        line.points.append((s_new.real, s_new.imag))
        max_err = max(max_err, abs(err_new))
        s, tangent = s_new, t_new
        clean += 1
        if clean >= 5:
            h = min(H_MAX, 2 * h)
            clean = 0
        if s.real <= sigma_stop + ARRIVAL_TOL:
            line.termination = REACHED
            break
        if s.imag <= 0 or s.real > seed.start.real + 1.0:
            line.termination = LEFT_DOMAIN
            break
    line.max_level_error = max_err
    if line.termination == REACHED:
        line.critical_intersection = _intersection_record(line, sigma_stop, tangent, events)
    return line


def _intersection_record(line: TracedLine, sigma_stop: float, tangent: complex,
                         events: Sequence[CriticalLineEvent] | None) -> dict:
    sig, t = line.points[-1]
    # straight-line extrapolation along the last tangent to sigma_stop
    if tangent.real != 0:
        t_hit = t + (sigma_stop - sig) * tangent.imag / tangent.real
    else:
        t_hit = t
    rec = {"t": t_hit, "t_last": t, "sigma_last": sig, "event": None}
    if events:
        ev = nearest_event(t_hit, events)
        rec["event"] = ev.as_dict()
        rec["event_distance"] = abs(ev.t - t_hit)
    return rec


def attach_events(line: TracedLine, events: Sequence[CriticalLineEvent]) -> TracedLine:
    """Fill in the nearest censused event for an already-traced line."""
    if line.critical_intersection is not None and events:
        ev = nearest_event(line.critical_intersection["t"], events)
        line.critical_intersection["event"] = ev.as_dict()
        line.critical_intersection["event_distance"] = abs(ev.t - line.critical_intersection["t"])
    return line


def polyline_distance(a: TracedLine, b: TracedLine) -> float:
    """Minimum distance between the vertex sets (lines are densely sampled)."""
    pa = np.array(a.points)
    pb = np.array(b.points)
    d = np.hypot(pa[:, None, 0] - pb[None, :, 0], pa[:, None, 1] - pb[None, :, 1])
    return float(d.min())


# ---------------------------------------------------------------- grids

GRID_CSV_HEADER = ["sigma", "t", "re", "im", "modulus", "phase", "quadrant", "flag"]


@dataclass(frozen=True)
class FieldSample:
    sigma: float
    t: float
    value: complex
    modulus: float
    phase: float
    quadrant: int
    flag: str = ""


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise DomainError("resolution must be positive")
    return np.array([lo]) if n == 1 else np.linspace(lo, hi, n)


def _safe_eval(func: Callable, s: np.ndarray):
    """Evaluate a chunk; on accuracy failure fall back to pointwise evaluation with flags."""
    flags = np.full(s.shape, "", dtype=object)
    try:
        return np.asarray(func(s), dtype=np.complex128), flags
    except AccuracyError:
        out = np.empty(s.shape, dtype=np.complex128)
        for i, z in enumerate(s):
            try:
                out[i] = func(np.array([z]))[0]
            except AccuracyError:
                out[i] = complex("nan+nanj")
                flags[i] = "accuracy"
        return out, flags


def export_field_grid(region: tuple[float, float, float, float], resolution: tuple[int, int],
                      func: Callable | None = None, cfg: PrecisionConfig = DEFAULT_CONFIG,
                      chunk: int = 4096, workers: int = 1) -> list[FieldSample]:
    """Samples over (sigma_lo, sigma_hi, t_lo, t_hi); rows are t, columns sigma, row-major.

    With workers > 1 the chunks are evaluated in a process pool (``func`` must
    then be picklable); results are reassembled in grid order.
    """
    s_lo, s_hi, t_lo, t_hi = region
    n_sigma, n_t = resolution
    sig = _axis(s_lo, s_hi, n_sigma)
    ts = _axis(t_lo, t_hi, n_t)
    S = (sig[None, :] + 1j * ts[:, None]).reshape(-1)
    plain = func is None
    f = func or partial(delta6_array, cfg=cfg)
    vals = np.empty(S.shape, dtype=np.complex128)
    flags = np.full(S.shape, "", dtype=object)
    starts = range(0, S.size, chunk)
    pieces = [S[a:a + chunk] for a in starts]
    if workers > 1 and len(pieces) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_eval, [f] * len(pieces), pieces))
    else:
        results = [_safe_eval(f, piece) for piece in pieces]
    for a, (v, fl) in zip(starts, results):
        vals[a:a + chunk] = v
        flags[a:a + chunk] = fl
    if plain:
        for i, z in enumerate(S):
            c, local = _near_special(complex(z), EXCLUSION_RADIUS)
            if c is not None:
                try:
                    vals[i] = delta6_value(complex(z), cfg)
                except NearPoleError:
                    vals[i] = complex("nan+nanj")
                flags[i] = "near_singularity"
            elif _real_axis_flag(complex(z)):
                flags[i] = "near_singularity"
    mods = np.abs(vals)
    phases = np.angle(vals)
    quads = quadrant_array(vals)
    out = []
    for i, z in enumerate(S):
        fl = flags[i]
        if not fl:
            if not np.isfinite(vals[i]):
                fl = "nonfinite"
            elif not 1e-3 < mods[i] < 1e3:
                fl = "near_singularity"
        out.append(FieldSample(float(z.real), float(z.imag), complex(vals[i]), float(mods[i]),
                               float(phases[i]), int(quads[i]) if np.isfinite(vals[i]) else 0, fl))
    return out


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def grid_to_csv(samples: Sequence[FieldSample]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GRID_CSV_HEADER)
    for p in samples:
        w.writerow([_fmt(p.sigma), _fmt(p.t), _fmt(p.value.real), _fmt(p.value.imag),
                    _fmt(p.modulus), _fmt(p.phase), p.quadrant, p.flag])
    return buf.getvalue()


def quadrant_image(samples: Sequence[FieldSample], resolution: tuple[int, int]) -> np.ndarray:
    """Quadrant codes reshaped to (n_t, n_sigma)."""
    n_sigma, n_t = resolution
    return np.array([p.quadrant for p in samples]).reshape(n_t, n_sigma)


def bridging_check(line: TracedLine, offset: float = 0.05, n: int = 33,
                   cfg: PrecisionConfig = DEFAULT_CONFIG) -> dict:
    """Quadrants just left of a line's critical-line intersection.

    Reports the quadrant at sigma = 1/2 - offset on the intersection height and
    the quadrants met along the left half-circle of radius ``offset``.
    """
    if line.critical_intersection is None:
        raise DomainError("line has no critical-line intersection")
    t = line.critical_intersection["t"]
    point = delta6_value(complex(0.5 - offset, t), cfg)
    ang = np.linspace(0.5 * math.pi, 1.5 * math.pi, n)
    arc = 0.5 + 1j * t + offset * np.exp(1j * ang)
    quads = quadrant_array(delta6_array(arc, cfg))
    return {
        "t": t,
        "point_phase": cmath.phase(point),
        "point_quadrant": int(quadrant_array(np.array([point]))[0]),
        "arc_quadrants": sorted(set(int(q) for q in quads)),
        "arc_reaches_q4": bool(np.any(quads == 4)),
    }
