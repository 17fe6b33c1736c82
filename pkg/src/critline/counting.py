"""Zeros and poles of Delta6 on the critical line, winding numbers and balance.

Zeros of Delta6 on sigma = 1/2 come from T+ (detected as sign changes of
cos arg xi1(1+2it)); poles come from zeros of zeta(2s-1/2), i.e. sign changes
of Hardy's Z at u = 2t.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .delta6_core import delta6_array, t_plus_phase_detector
from .errors import DomainError, IncompleteContour, SamplingError
from .special import DEFAULT_CONFIG, LOG_2PI, PrecisionConfig, hardy_z_array

ZERO = "Zero"
POLE = "Pole"
SOURCE_NUMERATOR = "NumeratorT+"
SOURCE_DENOMINATOR = "DenominatorZeta"

T_PLUS_STEP = 0.01
ZETA_STEP = 0.005
BISECT_TOL = 1e-10
T_MAX_SCAN = 5000.0
DOUBLE_ZERO_THRESHOLD = 1e-6
EVENT_DISK_RADIUS = 5e-3


@dataclass(frozen=True)
class CriticalLineEvent:
    t: float
    kind: str
    multiplicity: int
    source: str
    refinement_residual: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class CountingReport:
    t_lower: float
    t_upper: float
    zero_sum: int
    pole_sum: int
    winding: int
    balanced: bool
    lower_event: CriticalLineEvent | None = None
    upper_event: CriticalLineEvent | None = None
    events: list[CriticalLineEvent] = field(default_factory=list)

    def as_dict(self) -> dict:
        d = asdict(self)
        return d


# ---------------------------------------------------------------- detection

def _detector_zeros(t, cfg):
    return t_plus_phase_detector(t, cfg)


def _detector_poles(t, cfg):
    return hardy_z_array(2.0 * np.asarray(t, dtype=np.float64), cfg)


def _grid(t_lo: float, t_hi: float, step: float) -> np.ndarray:
    n = int(math.floor((t_hi - t_lo) / step + 1e-9))
    grid = t_lo + step * np.arange(n + 1)
    if grid[-1] < t_hi - 1e-12:
        grid = np.append(grid, t_hi)
    return grid


def _eval_chunks(detector, grid: np.ndarray, cfg: PrecisionConfig, workers: int) -> np.ndarray:
    if workers <= 1 or grid.size < 200:
        return detector(grid, cfg)
    chunks = np.array_split(grid, workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(detector, chunks, [cfg] * len(chunks)))
    return np.concatenate(parts)


def _bisect(detector, a: float, b: float, fa: float, cfg: PrecisionConfig, tol: float = BISECT_TOL):
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = float(detector(np.array([m]), cfg)[0])
        if fm == 0.0:
            return m, 0.0
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    m = 0.5 * (a + b)
    return m, abs(float(detector(np.array([m]), cfg)[0]))


def _check_range(t_lo: float, t_hi: float):
    if not (math.isfinite(t_lo) and math.isfinite(t_hi)):
        raise DomainError("t range must be finite")
    if t_lo < 0 or t_hi > T_MAX_SCAN:
        raise DomainError(f"t range must lie in (0, {T_MAX_SCAN:g}], got [{t_lo}, {t_hi}]")


def _scan(detector, t_lo, t_hi, step, kind, source, cfg, workers, multiplicity_check):
    _check_range(t_lo, t_hi)
    if t_hi <= t_lo:
        return []
    lo = max(t_lo, 1e-3)
    grid = _grid(lo, t_hi, step)
    vals = _eval_chunks(detector, grid, cfg, workers)
    events = []
    for i in range(grid.size - 1):
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            if i > 0:
                events.append(CriticalLineEvent(float(grid[i]), kind, 1, source, 0.0))
            continue
        if (fa > 0) != (fb > 0) and fb != 0.0:
            t, res = _bisect(detector, float(grid[i]), float(grid[i + 1]), float(fa), cfg)
            events.append(CriticalLineEvent(t, kind, 1, source, res))
    if multiplicity_check:
        events.extend(_even_order_candidates(detector, grid, vals, kind, source, cfg))
        events.sort(key=lambda e: e.t)
    return events


def _even_order_candidates(detector, grid, vals, kind, source, cfg):
    """Touching zeros: local minima of |detector| below threshold with no sign change."""
    from scipy.optimize import minimize_scalar

    found = []
    mags = np.abs(vals)
    for i in range(1, grid.size - 1):
        if not (mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]):
            continue
        if (vals[i - 1] > 0) != (vals[i + 1] > 0) or (vals[i - 1] > 0) != (vals[i] > 0):
            continue
        if mags[i] > 1e-2:
            continue
        res = minimize_scalar(lambda x: abs(float(detector(np.array([x]), cfg)[0])),
                              bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                              options={"xatol": 1e-12})
        if res.fun > DOUBLE_ZERO_THRESHOLD:
            continue
        t = float(res.x)
        w = argument_winding(circle(0.5 + 1j * t, EVENT_DISK_RADIUS), cfg=cfg)
        mult = abs(w)
        if mult >= 2:
            found.append(CriticalLineEvent(t, kind, mult, source, float(res.fun)))
    return found


def find_zeros_T_plus(t_lo: float, t_hi: float, cfg: PrecisionConfig = DEFAULT_CONFIG,
                      step: float = T_PLUS_STEP, workers: int = 1,
                      multiplicity_check: bool = True) -> list[CriticalLineEvent]:
    """Zeros of T+(1/2+it) for t in [t_lo, t_hi]."""
    return _scan(_detector_zeros, t_lo, t_hi, step, ZERO, SOURCE_NUMERATOR, cfg, workers, multiplicity_check)


def find_poles_zeta(t_lo: float, t_hi: float, cfg: PrecisionConfig = DEFAULT_CONFIG,
                    step: float = ZETA_STEP, workers: int = 1,
                    multiplicity_check: bool = True) -> list[CriticalLineEvent]:
    """Poles of Delta6 on sigma = 1/2: t = gamma/2 for zeta zeros 1/2 + i gamma."""
    return _scan(_detector_poles, t_lo, t_hi, step, POLE, SOURCE_DENOMINATOR, cfg, workers, multiplicity_check)


def scan_events(t_lo: float, t_hi: float, cfg: PrecisionConfig = DEFAULT_CONFIG,
                refine: int = 1, workers: int = 1) -> list[CriticalLineEvent]:
    """Merged, t-ordered zeros and poles. ``refine`` divides both scan steps."""
    zeros = find_zeros_T_plus(t_lo, t_hi, cfg, step=T_PLUS_STEP / refine, workers=workers)
    poles = find_poles_zeta(t_lo, t_hi, cfg, step=ZETA_STEP / refine, workers=workers)
    return sorted(zeros + poles, key=lambda e: (e.t, e.kind))


def event_pattern(events: Iterable[CriticalLineEvent]) -> str:
    return "".join("Z" * e.multiplicity if e.kind == ZERO else "P" * e.multiplicity for e in events)


def nearest_event(t: float, events: Sequence[CriticalLineEvent]) -> CriticalLineEvent | None:
    if not events:
        return None
    return min(events, key=lambda e: abs(e.t - t))


# ---------------------------------------------------------------- winding

def circle(center: complex, radius: float, n: int = 32) -> list[complex]:
    return [center + radius * complex(math.cos(a), math.sin(a))
            for a in np.linspace(0.0, 2 * math.pi, n, endpoint=False)]


def rectangle(sigma_lo: float, sigma_hi: float, t_lo: float, t_hi: float) -> list[complex]:
    """Counterclockwise corners."""
    return [complex(sigma_lo, t_lo), complex(sigma_hi, t_lo), complex(sigma_hi, t_hi), complex(sigma_lo, t_hi)]


def _default_func(cfg):
    return lambda s: delta6_array(s, cfg)


def phase_change(path: Sequence[complex], func: Callable | None = None,
                 cfg: PrecisionConfig = DEFAULT_CONFIG, closed: bool = True,
                 max_phase_step: float = math.pi / 2, base_spacing: float = 0.01,
                 min_spacing: float = 1e-10) -> float:
    """Total continuous change of arg f along a polyline, sampling adaptively."""
    f = func or _default_func(cfg)
    pts = [complex(p) for p in path]
    if closed and pts[0] != pts[-1]:
        pts.append(pts[0])
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        total += _edge_phase(f, a, b, max_phase_step, base_spacing, min_spacing)
    return total


def _edge_phase(f, a, b, max_step, base_spacing, min_spacing):
    length = abs(b - a)
    if length == 0.0:
        return 0.0
    n = max(2, int(math.ceil(length / base_spacing)) + 1)
    params = np.linspace(0.0, 1.0, n)
    vals = np.asarray(f(a + (b - a) * params), dtype=np.complex128)
    for _ in range(60):
        if not np.all(np.isfinite(vals)) or np.any(vals == 0):
            bad = params[~np.isfinite(vals) | (vals == 0)][0]
            raise SamplingError(f"non-finite or zero value on contour at s={a + (b - a) * bad}")
        inc = np.angle(vals[1:] / vals[:-1])
        big = np.abs(inc) >= max_step
        if not big.any():
            return float(inc.sum())
        idx = np.nonzero(big)[0]
        if np.min(params[idx + 1] - params[idx]) * length < min_spacing:
            raise SamplingError(f"phase increment bound not achievable near s={a + (b - a) * params[idx[0]]}")
        mids = 0.5 * (params[idx] + params[idx + 1])
        new_vals = np.asarray(f(a + (b - a) * mids), dtype=np.complex128)
        params = np.insert(params, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new_vals)
    raise SamplingError("adaptive refinement did not converge")


def winding_with_residual(contour: Sequence[complex], func: Callable | None = None,
                          cfg: PrecisionConfig = DEFAULT_CONFIG, **kw) -> tuple[int, float]:
    total = phase_change(contour, func, cfg, closed=True, **kw) / (2 * math.pi)
    k = int(round(total))
    return k, abs(total - k)


def argument_winding(contour: Sequence[complex], func: Callable | None = None,
                     cfg: PrecisionConfig = DEFAULT_CONFIG, **kw) -> int:
    """(#zeros - #poles) of ``func`` (default Delta6) inside a closed polyline."""
    k, resid = winding_with_residual(contour, func, cfg, **kw)
    if resid > 1e-3:
        raise SamplingError(f"winding residual {resid:.2e} is not integral")
    return k


# ---------------------------------------------------------------- balance

def _intersection(line) -> float:
    if line.termination != "ReachedCriticalLine" or line.critical_intersection is None:
        raise IncompleteContour(f"line {line.seed_index} terminated with {line.termination}")
    return float(line.critical_intersection["t"])


def balance_report(line_a, line_b, events: Sequence[CriticalLineEvent] | None = None,
                   cfg: PrecisionConfig = DEFAULT_CONFIG, match_tol: float = 1e-3) -> CountingReport:
    """Events strictly between two traced phase-zero lines, plus the winding of the enclosing contour."""
    ta, tb = _intersection(line_a), _intersection(line_b)
    if ta > tb:
        line_a, line_b, ta, tb = line_b, line_a, tb, ta
    if events is None:
        events = scan_events(max(ta - 0.05, 0.0), tb + 0.05, cfg)
    lower = nearest_event(ta, events)
    upper = nearest_event(tb, events)
    lower = lower if lower is not None and abs(lower.t - ta) <= match_tol else None
    upper = upper if upper is not None and abs(upper.t - tb) <= match_tol else None
    inside = [e for e in events if ta + match_tol < e.t < tb - match_tol]
    zero_sum = sum(e.multiplicity for e in inside if e.kind == ZERO)
    pole_sum = sum(e.multiplicity for e in inside if e.kind == POLE)
    contour = balance_contour(line_a, line_b)
    winding = argument_winding(contour, cfg=cfg)
    return CountingReport(ta, tb, zero_sum, pole_sum, winding,
                          zero_sum == pole_sum and winding == 0, lower, upper, inside)


def balance_contour(line_a, line_b, offset: float = 1e-3) -> list[complex]:
    """Counterclockwise: far-right side up, line_b inward, critical segment down, line_a outward."""
    pa = [complex(*p) for p in line_a.points]
    pb = [complex(*p) for p in line_b.points]
    sigma_cut = 0.5 + offset
    a_end = complex(max(pa[-1].real, sigma_cut), pa[-1].imag)
    b_end = complex(max(pb[-1].real, sigma_cut), pb[-1].imag)
    path = [pa[0], pb[0]]
    path.extend(pb[1:])
    path.append(b_end)
    path.append(a_end)
    path.extend(reversed(pa[1:]))
    return path


# ---------------------------------------------------------------- distributions

def n_zeta_main(t: float) -> float:
    """(t/2pi) log t - (t/2pi)(1 + log 2pi): the growing terms of N(1/2, t)."""
    if not t > 2 * math.pi:
        raise DomainError(f"n_zeta_main needs t > 2 pi, got {t}")
    return t / (2 * math.pi) * math.log(t) - t / (2 * math.pi) * (1 + LOG_2PI)


@dataclass(frozen=True)
class DistributionRow:
    t: float
    count_t_plus: int
    count_zeta_poles: int
    main_term: float | None

    @property
    def difference(self) -> int:
        return self.count_t_plus - self.count_zeta_poles


def cumulative_count(events: Sequence[CriticalLineEvent], t: float, inclusive: bool = True) -> int:
    if inclusive:
        return sum(e.multiplicity for e in events if e.t <= t)
    return sum(e.multiplicity for e in events if e.t < t)


def distribution_comparison(t_max: float, t_points: Sequence[float] | None = None, step: float = 1.0,
                            cfg: PrecisionConfig = DEFAULT_CONFIG, workers: int = 1,
                            events: Sequence[CriticalLineEvent] | None = None) -> list[DistributionRow]:
    """Cumulative T+ zero and zeta(2s-1/2) pole counts on sigma = 1/2 against n_zeta_main(2t)."""
    if not 0 < t_max <= 2500:
        raise DomainError(f"t_max must lie in (0, 2500], got {t_max}")
    if events is None:
        events = scan_events(0.0, t_max, cfg, workers=workers)
    zeros = [e for e in events if e.kind == ZERO]
    poles = [e for e in events if e.kind == POLE]
    if t_points is None:
        t_points = list(_grid(step, t_max, step)) if t_max >= step else [t_max]
    rows = []
    for t in t_points:
        main = n_zeta_main(2 * t) if 2 * t > 2 * math.pi else None
        rows.append(DistributionRow(float(t), cumulative_count(zeros, t), cumulative_count(poles, t), main))
    return rows


# ---------------------------------------------------------------- serialisation

EVENT_CSV_HEADER = ["t", "kind", "multiplicity", "source", "residual"]


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def events_to_csv(events: Sequence[CriticalLineEvent]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(EVENT_CSV_HEADER)
    for e in events:
        w.writerow([_fmt(e.t), e.kind, e.multiplicity, e.source, _fmt(e.refinement_residual)])
    return buf.getvalue()


def events_from_csv(text: str) -> list[CriticalLineEvent]:
    rows = csv.DictReader(io.StringIO(text))
    return [CriticalLineEvent(float(r["t"]), r["kind"], int(r["multiplicity"]), r["source"], float(r["residual"]))
            for r in rows]


def events_to_json(events: Sequence[CriticalLineEvent]) -> str:
    return json.dumps([e.as_dict() for e in events], sort_keys=True)
