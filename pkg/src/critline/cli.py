"""critline command line: evaluate, export grids, trace lines, census events.

Every file-producing command writes into --out together with manifest.json,
which records the parameters, precision preset, version, duration and the
sha256 of each output file. Output files are byte-identical across reruns.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import re
import sys
import time
from dataclasses import asdict, dataclass, field
from functools import partial
from pathlib import Path

from . import __version__
from . import counterexample as cx
from . import counting, delta6_core as d6, topology
from ._accel import backend_name
from .errors import AccuracyError, CritlineError, DomainError
from .special import PrecisionConfig, profile_config

EXIT_OK, EXIT_DOMAIN, EXIT_ACCURACY, EXIT_IO = 0, 2, 3, 4

_COMPLEX_RE = re.compile(r"^\s*[-+0-9.eEij]+\s*$")


def parse_complex(text: str) -> complex:
    """Parse `a+bi`, `a-bi`, `bi`, `a` (also with j); scientific notation allowed."""
    s = text.strip().replace(" ", "").lower()
    if not s or not _COMPLEX_RE.match(s):
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}")
    if s.endswith("i"):
        s = s[:-1] + "j"
    if s.endswith("j"):
        body = s[:-1]
        if body == "" or body[-1] in "+-":
            s = body + "1j"
    try:
        return complex(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex literal: {text!r}") from None


def _fmt_complex(z: complex) -> list[float]:
    return [z.real, z.imag]


@dataclass
class RunManifest:
    command: str
    parameters: dict
    precision: dict
    tool_version: str
    backend: str
    duration_s: float = 0.0
    outputs: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def write(self, out_dir: Path):
        (out_dir / "manifest.json").write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class _Run:
    """Collects outputs for one command and writes the manifest at the end."""

    def __init__(self, args, cfg: PrecisionConfig, profile: str):
        params = {k: (_fmt_complex(v) if isinstance(v, complex) else v)
                  for k, v in sorted(vars(args).items()) if k != "handler"}
        params["precision_profile"] = profile
        self.manifest = RunManifest(args.command, params, asdict(cfg), __version__, backend_name())
        self.out = Path(args.out) if getattr(args, "out", None) else None
        self.t0 = time.perf_counter()

    def emit(self, name: str, text: str):
        if self.out is None:
            sys.stdout.write(text)
            return
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text)
        self.manifest.outputs[name] = _sha256(path)

    def finish(self):
        self.manifest.duration_s = round(time.perf_counter() - self.t0, 3)
        if self.out is not None:
            self.manifest.write(self.out)


# ---------------------------------------------------------------- commands

_EVAL_FUNCS = {
    "xi1": d6.xi1,
    "t_plus": d6.t_plus,
    "a_func": lambda s, cfg: d6.a_func(s),
    "d_func": lambda s, cfg: d6.d_func(s),
    "f6": lambda s, cfg: d6.f6(s),
}


def cmd_eval(args, cfg, run):
    s = args.s
    if args.fn == "delta6":
        res = d6.delta6(s, cfg)
        rec = res.as_dict()
        try:
            rec["forms_residual"] = d6.forms_residual(s, cfg)
        except CritlineError:
            rec["forms_residual"] = None
    else:
        value = _EVAL_FUNCS[args.fn](s, cfg)
        rec = d6.EvaluationResult.from_value(complex(value), False).as_dict()
    rec = {"fn": args.fn, "s": _fmt_complex(s), **rec}
    print(json.dumps(rec, sort_keys=True))
    return EXIT_OK


def cmd_grid(args, cfg, run):
    region = (args.sigma[0], args.sigma[1], args.t[0], args.t[1])
    res = (args.nx, args.nt)
    if args.mode == "modified":
        if args.s0 is None or (args.both and (args.s1 is None or args.s2 is None)):
            raise DomainError("modified mode needs --s0 (and --s1 --s2 with --both)")
        s1 = args.s1 if args.s1 is not None else complex(0.5, args.s0.imag)
        s2 = args.s2 if args.s2 is not None else complex(0.5, args.s0.imag)
        p = cx.ModificationParams(args.s0, s1, s2)
        mode = cx.BOTH if args.both else cx.DENOMINATOR_ONLY
        func = partial(cx.modified_delta6_array, p=p, mode=mode, cfg=cfg)
    elif args.fn == "t_plus":
        func = partial(d6.t_plus_array, cfg=cfg, scaled=True)
    else:
        func = None
    samples = topology.export_field_grid(region, res, func, cfg, workers=args.workers)
    run.emit("grid.csv", topology.grid_to_csv(samples))
    run.manifest.notes["flagged_samples"] = sum(1 for p in samples if p.flag)
    return EXIT_OK


def cmd_trace(args, cfg, run):
    kind = topology.PHASE_ZERO if args.kind == "phase-zero" else topology.AMPLITUDE_UNITY
    seeder = topology.seed_phase_zero if kind == topology.PHASE_ZERO else topology.seed_amplitude_unity
    lines, failures = [], {}
    for n in range(args.n[0], args.n[1] + 1):
        try:
            line = topology.trace(seeder(n, args.sigma_start, cfg), args.sigma_stop, cfg, max_steps=args.max_steps)
            lines.append(line)
        except CritlineError as exc:
            failures[str(n)] = f"{type(exc).__name__}: {exc}"
    hits = [ln.intersection_t for ln in lines if ln.intersection_t is not None]
    if hits and not args.no_events:
        events = counting.scan_events(max(min(hits) - 0.05, 0.0), max(hits) + 0.05, cfg)
        for ln in lines:
            topology.attach_events(ln, events)
    text = "".join(ln.to_json() + "\n" for ln in lines)
    run.emit("lines.jsonl", text)
    tally = {}
    for ln in lines:
        tally[ln.termination] = tally.get(ln.termination, 0) + 1
    if failures:
        tally["SeedFailure"] = len(failures)
    run.manifest.notes.update({"termination_tally": tally, "seed_failures": failures})
    if run.out is not None:
        print(json.dumps({"summary": tally}, sort_keys=True))
    if not lines:
        return EXIT_ACCURACY
    return EXIT_OK


def cmd_scan(args, cfg, run):
    events = counting.scan_events(args.t[0], args.t[1], cfg, refine=args.refine, workers=args.workers)
    if args.format == "json":
        run.emit("events.json", counting.events_to_json(events) + "\n")
    else:
        run.emit("events.csv", counting.events_to_csv(events))
    run.manifest.notes["pattern"] = counting.event_pattern(events)
    if run.out is not None:
        print(json.dumps({"count": len(events), "pattern": counting.event_pattern(events)}))
    return EXIT_OK


def _load_lines(path: str) -> list[topology.TracedLine]:
    out = []
    with open(path) as fh:
        for raw in fh:
            raw = raw.strip()
            if raw:
                out.append(topology.TracedLine.from_dict(json.loads(raw)))
    return out


def cmd_balance(args, cfg, run):
    lines = [ln for ln in _load_lines(args.traces) if ln.kind == topology.PHASE_ZERO]
    done = sorted((ln for ln in lines if ln.intersection_t is not None), key=lambda ln: ln.intersection_t)
    if len(done) < 2:
        raise DomainError("need at least two phase-zero lines that reached the critical line")
    events = counting.scan_events(max(done[0].intersection_t - 0.05, 0.0), done[-1].intersection_t + 0.05, cfg)
    reports = [counting.balance_report(a, b, events, cfg) for a, b in zip(done[:-1], done[1:])]
    recs = [r.as_dict() for r in reports]
    all_ok = all(r.balanced for r in reports)
    run.emit("balance.json", json.dumps({"all_balanced": all_ok, "pairs": recs}, sort_keys=True) + "\n")
    run.manifest.notes["all_balanced"] = all_ok
    if run.out is not None:
        print(json.dumps({"pairs": len(reports), "all_balanced": all_ok}))
    return EXIT_OK


def cmd_distribution(args, cfg, run):
    rows = counting.distribution_comparison(args.t_max, step=args.step, cfg=cfg, workers=args.workers)
    lines = ["t,count_t_plus,count_zeta_poles,difference,main_term"]
    for r in rows:
        main = "nan" if r.main_term is None else format(r.main_term, ".17g")
        lines.append(f"{format(r.t, '.17g')},{r.count_t_plus},{r.count_zeta_poles},{r.difference},{main}")
    run.emit("distribution.csv", "\n".join(lines) + "\n")
    run.manifest.notes["max_abs_difference"] = max((abs(r.difference) for r in rows), default=0)
    return EXIT_OK


def cmd_counterexample(args, cfg, run):
    s1 = args.s1 if args.s1 is not None else 0.5 + 983.3j
    s2 = args.s2 if args.s2 is not None else 0.5 + 983.7j
    s0 = args.s0 if args.s0 is not None else 0.45 + 983.5j
    p = cx.ModificationParams(s0, s1, s2)
    rec = {"params": p.as_dict()}
    if args.check_expansion:
        rec["expansion"] = cx.ratio_expansion_check(p).as_dict()
    prof = cx.deviation_profile(p)
    rec["crossover_sigma"] = prof.crossover
    run.emit("counterexample.json", json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _pair(type_):
    return dict(nargs=2, type=type_)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="critline", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"critline {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one function at one point")
    p.add_argument("--fn", default="delta6", choices=["xi1", "t_plus", "a_func", "d_func", "delta6", "f6"])
    p.add_argument("--s", type=parse_complex, required=True)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("grid", help="export a field grid as CSV")
    p.add_argument("--fn", default="delta6", choices=["delta6", "t_plus"])
    p.add_argument("--sigma", **_pair(float), required=True, metavar=("LO", "HI"))
    p.add_argument("--t", **_pair(float), required=True, metavar=("LO", "HI"))
    p.add_argument("--nx", type=int, default=100)
    p.add_argument("--nt", type=int, default=100)
    p.add_argument("--mode", choices=["plain", "modified"], default="plain")
    p.add_argument("--both", action="store_true", help="modified mode: also inject the on-axis zeros")
    p.add_argument("--s0", type=parse_complex)
    p.add_argument("--s1", type=parse_complex)
    p.add_argument("--s2", type=parse_complex)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_grid)

    p = sub.add_parser("trace", help="seed and trace level lines")
    p.add_argument("--n", **_pair(int), required=True, metavar=("FIRST", "LAST"))
    p.add_argument("--kind", choices=["phase-zero", "amplitude-unity"], default="phase-zero")
    p.add_argument("--sigma-start", type=float, default=6.0)
    p.add_argument("--sigma-stop", type=float, default=0.5)
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--no-events", action="store_true", help="skip matching intersections to censused events")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("scan", help="census zeros and poles on the critical line")
    p.add_argument("--t", **_pair(float), required=True, metavar=("LO", "HI"))
    p.add_argument("--refine", type=int, default=1, help="divide scan steps by this factor")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_scan)

    p = sub.add_parser("balance", help="zero/pole balance between adjacent traced lines")
    p.add_argument("--traces", required=True)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_balance)

    p = sub.add_parser("distribution", help="cumulative counts against the main term")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(handler=cmd_distribution)

    p = sub.add_parser("counterexample", help="quartic modification lab")
    p.add_argument("--s0", type=parse_complex)
    p.add_argument("--s1", type=parse_complex)
    p.add_argument("--s2", type=parse_complex)
    p.add_argument("--check-expansion", action="store_true")
    p.add_argument("--out")
    p.set_defaults(handler=cmd_counterexample)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    profile = os.environ.get("CRITLINE_PRECISION_PROFILE", "default")
    try:
        cfg = profile_config(profile)
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    run = _Run(args, cfg, profile)
    try:
        code = args.handler(args, cfg, run)
        run.finish()
        return code
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (AccuracyError, CritlineError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
