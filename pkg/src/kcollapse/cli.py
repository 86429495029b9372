"""Command-line front end.

Subcommands
    kernel-norms   quasi-norm sweeps of the kernel families, slope fit
    collapse       run the periodic collapse search from a config
    checks         seeded battery of exactness and stability checks
    bandlimited    run the non-periodic (real line) collapse search

Every run writes into a directory named by a hash of the full effective
configuration (plus seed), so reruns land in the same place and a
changed parameter lands in a new one. Inside: manifest.json (config,
versions, timestamps), probes.csv (deterministic: byte-identical for
identical config and seed; every row carries the config hash) and
timings.csv (wall-clock, split out precisely because it is not
reproducible). stdout carries a short human summary only.

Exit codes: 0 success; 1 a measured property failed its threshold;
2 invalid configuration; 3 quadrature failed to converge; 4 a search
budget was exhausted (the partial report is still written); 5 a tail
was too heavy to truncate.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

__all__ = ["main"]

_EXIT_PROPERTY = 1
_EXIT_CONFIG = 2
_EXIT_QUADRATURE = 3
_EXIT_BUDGET = 4
_EXIT_TAIL = 5


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, bool):
        return "1" if x else "0"
    return str(x)


def _config_hash(command: str, cfg: dict, seed) -> str:
    payload = json.dumps(
        {"command": command, "config": cfg, "seed": seed},
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


class _Run:
    """Output directory handle: manifest, deterministic CSV, timings."""

    def __init__(self, out_root: str, command: str, cfg: dict, seed=None,
                 threads=None):
        self.command = command
        self.cfg = cfg
        self.seed = seed
        self.threads = threads
        self.hash = _config_hash(command, cfg, seed)
        self.dir = Path(out_root) / f"{command}-{self.hash}"
        self.dir.mkdir(parents=True, exist_ok=True)
        self.started = datetime.now(timezone.utc).isoformat()
        self._timings: list[tuple[str, float]] = []

    def time(self, stage: str, seconds: float):
        self._timings.append((stage, seconds))

    def write_csv(self, name: str, header: list[str], rows: list[tuple]):
        with open(self.dir / name, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["config_hash", *header])
            for row in rows:
                w.writerow([self.hash, *(_fmt(x) for x in row)])

    def write_json(self, name: str, obj):
        with open(self.dir / name, "w") as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def finish(self, outcome: str, exit_code: int):
        self.write_csv("timings.csv", ["stage", "seconds"],
                       [(s, t) for s, t in self._timings])
        import numpy

        from . import __version__

        self.write_json("manifest.json", {
            "command": self.command,
            "config": self.cfg,
            "config_hash": self.hash,
            "seed": self.seed,
            "threads": self.threads,
            "outcome": outcome,
            "exit_code": exit_code,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "versions": {
                "python": sys.version.split()[0],
                "numpy": numpy.__version__,
                "kcollapse": __version__,
            },
        })


def _parse_dyadic_range(text: str) -> list[int]:
    """'16..1024' doubles from 16 to 1024; '8' is the single value."""
    if ".." in text:
        a, b = text.split("..", 1)
        lo, hi = int(a), int(b)
        if lo <= 0 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        out, v = [], lo
        while v <= hi:
            out.append(v)
            v *= 2
        return out
    return [int(text)]


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict):
        raise ValueError("config file must hold a JSON object")
    return obj


def _symbol_dict(args, base: dict, default_alpha: float = 1.0) -> dict:
    sym = dict(base.get("symbol", {}))
    if getattr(args, "family", None):
        sym["family"] = args.family
    if getattr(args, "alpha", None) is not None:
        sym["alpha"] = args.alpha
    sym.setdefault("family", "fractional_laplacian")
    sym.setdefault("alpha", default_alpha)
    sym.setdefault("d", base.get("d", getattr(args, "d", 1) or 1))
    return sym


# ---------------------------------------------------------------------------
# kernel-norms


def _cmd_kernel_norms(args) -> int:
    from .symbols import HomogeneousSymbol, KernelSpec
    from .torus import quasi_norm

    cfg = _load_config(args.config)
    kind = args.kind or cfg.get("kind", "vallee")
    d = args.d or cfg.get("d", 1)
    p = args.p if args.p is not None else cfg.get("p", 0.5)
    scales = _parse_dyadic_range(args.scales) if args.scales else cfg.get(
        "scales", [16, 32, 64, 128])
    sym_dict = _symbol_dict(args, cfg) if kind == "dyadic_shell" else None
    # p < 1 integrands have cusps at kernel zeros; 8 is too coarse a start
    oversample = args.oversample or cfg.get("oversample", 32)

    eff = {"kind": kind, "d": d, "p": p, "scales": scales,
           "symbol": sym_dict, "oversample": oversample}
    run = _Run(args.out, "kernel-norms", eff, threads=args.threads)

    sym = HomogeneousSymbol.from_json_dict(sym_dict) if sym_dict else None
    rows = []
    for s in scales:
        t0 = time.perf_counter()
        scale = int(math.log2(s)) if kind in ("modified_vallee", "dyadic_shell") else s
        kernel = KernelSpec(kind=kind, scale=scale, d=d, symbol=sym).build()
        norm = quasi_norm(kernel, p, oversample)
        run.time(f"scale={s}", time.perf_counter() - t0)
        rows.append((kind, s, p, norm))
    run.write_csv("probes.csv", ["kind", "scale", "p", "norm"], rows)

    slope = math.nan
    if len(rows) >= 2:
        import numpy as np

        xs = np.log2([r[1] for r in rows])
        ys = np.log2([r[3] for r in rows])
        slope = float(np.polyfit(xs, ys, 1)[0])
    run.write_json("report.json", {
        "config_hash": run.hash,
        "kind": kind,
        "p": p,
        "scales": scales,
        "norms": [r[3] for r in rows],
        "log2_slope": slope,
    })
    run.finish("ok", 0)
    print(f"{kind}: {len(rows)} scales, log2 slope {slope:+.4f}")
    print(f"run dir: {run.dir}")
    return 0


# ---------------------------------------------------------------------------
# collapse (torus)


def _collapse_config(args) -> dict:
    cfg = _load_config(args.config)
    exps = dict(cfg.get("exponents", {}))
    if args.p is not None:
        exps["p"] = args.p
    if args.q is not None:
        exps["q"] = args.q
    exps.setdefault("p", 0.5)
    exps.setdefault("q", 1.0)
    cfg["exponents"] = exps
    cfg["symbol"] = _symbol_dict(args, cfg)
    for key in ("delta", "epsilon", "mu", "max_m", "max_n", "d"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    ti = dict(cfg.get("test_input", {}))
    if args.degree is not None:
        ti["degree"] = args.degree
    if args.amplitude is not None:
        ti["amplitude"] = args.amplitude
    if args.input_seed is not None:
        ti["seed"] = args.input_seed
    if ti:
        cfg["test_input"] = ti
    if args.contrast_p1:
        cfg["exponents"] = dict(cfg["exponents"], p=1.0)
        cfg["contrast"] = True
    return cfg


def _write_collapse_outputs(run: _Run, report) -> None:
    rows = [
        (pr.m, pr.n, pr.I1, pr.I2, pr.K_upper, pr.total,
         pr.theory_I1, pr.theory_I2, pr.telescope, pr.accepted)
        for pr in report.probes
    ]
    run.write_csv(
        "probes.csv",
        ["m", "n", "I1", "I2", "K_upper", "total",
         "theory_I1", "theory_I2", "telescope", "accepted"],
        rows,
    )
    for pr in report.probes:
        run.time(f"probe m={pr.m} n={pr.n}", pr.wall_time)
    doc = report.to_json_dict(include_g=False)
    doc["config_hash"] = run.hash
    doc["domain"] = "T"
    run.write_json("report.json", doc)


def _cmd_collapse(args) -> int:
    from .collapse import CollapseConfig, collapse_search
    from .errors import BudgetExhausted

    cfg_dict = _collapse_config(args)
    run = _Run(args.out, "collapse", cfg_dict, seed=args.seed,
               threads=args.threads)
    cfg = CollapseConfig.from_json_dict(cfg_dict)
    t0 = time.perf_counter()
    try:
        report = collapse_search(cfg)
    except BudgetExhausted as exc:
        run.time("total", time.perf_counter() - t0)
        if exc.report is not None:
            _write_collapse_outputs(run, exc.report)
        run.finish(f"budget-exhausted:{exc.leg}", _EXIT_BUDGET)
        print(f"budget exhausted on the {exc.leg} leg: {exc}")
        print(f"run dir: {run.dir}")
        return _EXIT_BUDGET
    run.time("total", time.perf_counter() - t0)
    _write_collapse_outputs(run, report)
    run.finish("ok", 0)
    print(
        f"collapse achieved: mu={report.mu} m={report.m} n={report.n} "
        f"K_upper={report.K_upper:.3e} < epsilon={report.epsilon:g}"
    )
    print(f"run dir: {run.dir}")
    return 0


# ---------------------------------------------------------------------------
# checks


def _cmd_checks(args) -> int:
    import numpy as np

    from .collapse import representation_identity_check, smooth_decay_poly
    from .quadrature import NodeSet, mz_ratio, quadrature_mean
    from .symbols import HomogeneousSymbol
    from .torus import TrigPoly, quasi_norm
    from .bandlimited import (
        dilate, make_bump_input, nikolskii_conv_ratio, pp_sum_ratio,
        sampling_identity_check,
    )

    cfg = {"trials": args.trials, "d": args.d or 1}
    run = _Run(args.out, "checks", cfg, seed=args.seed, threads=args.threads)
    rng = np.random.default_rng(args.seed)
    rows = []

    def record(name, value, threshold, ok):
        rows.append((name, value, threshold, ok))

    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(args.trials):
        n = int(rng.integers(1, 65))
        deg = int(rng.integers(0, 2 * n + 1))
        coeffs = rng.standard_normal((2 * deg + 1,)) + 1j * rng.standard_normal(
            (2 * deg + 1,))
        poly = TrigPoly(d=1, degree=deg, coeffs=coeffs)
        dev = abs(quadrature_mean(poly, NodeSet(n)) - poly.mean)
        worst = max(worst, dev)
    record("quadrature_exactness_d1", worst, 1e-12, worst <= 1e-12)
    run.time("quadrature", time.perf_counter() - t0)

    t0 = time.perf_counter()
    sym = HomogeneousSymbol("fractional_laplacian", 1.0, 1)
    worst = 0.0
    for _ in range(3):
        mu = int(rng.integers(2, 17))
        m = int(math.ceil(math.log2(mu))) + int(rng.integers(0, 2))
        f = smooth_decay_poly(1, mu, 1.0, int(rng.integers(0, 2**31)))
        dev = representation_identity_check(f, m, sym)
        worst = max(worst, dev)
    record("representation_identity", worst, 1e-6, worst <= 1e-6)
    run.time("identity", time.perf_counter() - t0)

    t0 = time.perf_counter()
    poly = smooth_decay_poly(1, 32, 1.0, args.seed)
    p = 0.5
    r1 = mz_ratio(poly, NodeSet(64), p)
    r2 = mz_ratio(poly, NodeSet(128), p)
    drift = abs(r2 - r1) / r1
    record("mz_ratio_drift", drift, 0.1, drift < 0.1)
    run.time("mz", time.perf_counter() - t0)

    t0 = time.perf_counter()
    g = make_bump_input(2, 1.0)
    h = make_bump_input(2, 0.7)
    sigma = 2.0
    dev = sampling_identity_check(g, h, sigma)
    record("line_sampling_identity", dev, 1e-6, dev <= 1e-6)

    ratios = [pp_sum_ratio(g, s, 0.5) for s in (sigma, 2 * sigma)]
    drift = abs(ratios[1] - ratios[0]) / ratios[0]
    record("pp_ratio_drift", drift, 0.1, drift < 0.1)

    r_base = nikolskii_conv_ratio(g, h, sigma, 0.5)
    g2, h2 = dilate(g, 2.0), dilate(h, 2.0)
    r_dbl = nikolskii_conv_ratio(g2, h2, 2 * sigma, 0.5,
                                 dxi=g2.xi_scale / 96.0)
    drift = abs(r_dbl - r_base) / r_base
    record("nikolskii_ratio_drift", drift, 0.1, drift < 0.1)
    run.time("line", time.perf_counter() - t0)

    run.write_csv("probes.csv", ["check", "value", "threshold", "pass"], rows)
    failed = [r for r in rows if not r[3]]
    run.write_json("report.json", {
        "config_hash": run.hash,
        "checks": [
            {"name": r[0], "value": r[1], "threshold": r[2], "pass": bool(r[3])}
            for r in rows
        ],
        "failed": len(failed),
    })
    run.finish("ok" if not failed else "property-failure",
               0 if not failed else _EXIT_PROPERTY)
    for r in rows:
        print(f"{'PASS' if r[3] else 'FAIL'}  {r[0]}: {r[1]:.3e} "
              f"(threshold {r[2]:g})")
    print(f"run dir: {run.dir}")
    return 0 if not failed else _EXIT_PROPERTY


# ---------------------------------------------------------------------------
# bandlimited


def _bandlimited_config(args) -> dict:
    cfg = _load_config(args.config)
    exps = dict(cfg.get("exponents", {}))
    if args.p is not None:
        exps["p"] = args.p
    if args.q is not None:
        exps["q"] = args.q
    exps.setdefault("p", 0.5)
    exps.setdefault("q", 1.0)
    cfg["exponents"] = exps
    # default order 1.1 clears the line-side requirement alpha > 1/p - 1
    # at the default exponents; the torus default 1.0 would sit on the edge
    cfg["symbol"] = _symbol_dict(args, cfg, default_alpha=1.1)
    cfg["symbol"]["d"] = 1
    for key in ("delta", "epsilon", "max_lambda", "max_m", "max_n"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    ti = dict(cfg.get("test_input", {}))
    if args.kind:
        ti["kind"] = args.kind
    if args.mu is not None:
        ti["mu"] = args.mu
    if args.amplitude is not None:
        ti["amplitude"] = args.amplitude
    if ti:
        cfg["test_input"] = ti
    return cfg


def _write_line_outputs(run: _Run, report) -> None:
    rows = [
        (pr.lam, pr.m, pr.n, pr.I1, pr.J1, pr.J2, pr.I2, pr.K_upper,
         pr.total, pr.accepted)
        for pr in report.probes
    ]
    run.write_csv(
        "probes.csv",
        ["lambda", "m", "n", "I1", "J1", "J2", "I2", "K_upper", "total",
         "accepted"],
        rows,
    )
    for pr in report.probes:
        stage = (f"probe lambda={pr.lam}" if pr.m < 0
                 else f"probe m={pr.m} n={pr.n}")
        run.time(stage, pr.wall_time)
    doc = report.to_json_dict()
    doc["config_hash"] = run.hash
    run.write_json("report.json", doc)


def _cmd_bandlimited(args) -> int:
    from .bandlimited import NonPeriodicCollapseConfig, nonperiodic_collapse
    from .errors import BudgetExhausted

    cfg_dict = _bandlimited_config(args)
    run = _Run(args.out, "bandlimited", cfg_dict, seed=args.seed,
               threads=args.threads)
    cfg = NonPeriodicCollapseConfig.from_json_dict(cfg_dict)
    t0 = time.perf_counter()
    try:
        report = nonperiodic_collapse(cfg)
    except BudgetExhausted as exc:
        run.time("total", time.perf_counter() - t0)
        if exc.report is not None:
            _write_line_outputs(run, exc.report)
        run.finish(f"budget-exhausted:{exc.leg}", _EXIT_BUDGET)
        print(f"budget exhausted on the {exc.leg} leg: {exc}")
        print(f"run dir: {run.dir}")
        return _EXIT_BUDGET
    run.time("total", time.perf_counter() - t0)
    _write_line_outputs(run, report)
    run.finish("ok", 0)
    print(
        f"non-periodic collapse achieved: lambda={report.lam} m={report.m} "
        f"n={report.n} K_upper={report.K_upper:.3e} < "
        f"epsilon={report.epsilon:g}"
    )
    print(f"run dir: {run.dir}")
    return 0


# ---------------------------------------------------------------------------
# wiring


def _add_common(sp, seed_required=False):
    sp.add_argument("--out", default="runs", help="output root directory")
    sp.add_argument("--config", default=None, help="JSON config file")
    sp.add_argument("--threads", type=int, default=None,
                    help="cap numeric library threads")
    sp.add_argument("--seed", type=int, required=seed_required,
                    default=None if seed_required else 0,
                    help="seed for randomized parts")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="kcollapse",
        description="constructive collapse certificates for smoothness "
                    "K-functionals at 0 < p < 1",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("kernel-norms", help="kernel quasi-norm sweeps")
    _add_common(sp)
    sp.add_argument("--kind", choices=["vallee", "modified_vallee",
                                       "dyadic_shell"], default=None)
    sp.add_argument("--scales", default=None,
                    help="dyadic range 'a..b' or single value")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--d", type=int, choices=[1, 2], default=None)
    sp.add_argument("--family", default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--oversample", type=int, default=None,
                    help="starting grid oversampling for quasi-norms")
    sp.set_defaults(func=_cmd_kernel_norms)

    sp = sub.add_parser("collapse", help="periodic collapse search")
    _add_common(sp)
    for name, typ in [("p", float), ("q", float), ("delta", float),
                      ("epsilon", float), ("mu", int), ("max-m", int),
                      ("max-n", int), ("d", int), ("degree", int),
                      ("amplitude", float), ("input-seed", int),
                      ("alpha", float)]:
        sp.add_argument(f"--{name}", type=typ, default=None)
    sp.add_argument("--family", default=None)
    sp.add_argument("--contrast-p1", action="store_true",
                    help="rerun with p=1 to show the collapse disappears")
    sp.set_defaults(func=_cmd_collapse)

    sp = sub.add_parser("checks", help="seeded exactness/stability battery")
    _add_common(sp, seed_required=True)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--d", type=int, choices=[1, 2], default=None)
    sp.set_defaults(func=_cmd_checks)

    sp = sub.add_parser("bandlimited", help="non-periodic collapse search")
    _add_common(sp)
    for name, typ in [("p", float), ("q", float), ("delta", float),
                      ("epsilon", float), ("mu", int), ("max-lambda", int),
                      ("max-m", int), ("max-n", int), ("amplitude", float),
                      ("alpha", float)]:
        sp.add_argument(f"--{name}", type=typ, default=None)
    sp.add_argument("--family", default=None)
    sp.add_argument("--kind", choices=["bump"], default=None)
    sp.set_defaults(func=_cmd_bandlimited)

    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    from .errors import (
        ApproximationTargetMissed, DegenerateNorm, ExactnessViolated,
        IdentityBroken, InvalidSymbol, NonConvergedQuadrature,
        OriginEvaluation, TailNotNegligible, UndersampledGrid,
    )

    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError,
            InvalidSymbol) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except NonConvergedQuadrature as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return _EXIT_QUADRATURE
    except TailNotNegligible as exc:
        print(f"tail not negligible: {exc}", file=sys.stderr)
        return _EXIT_TAIL
    except (IdentityBroken, ExactnessViolated, ApproximationTargetMissed,
            DegenerateNorm, UndersampledGrid, OriginEvaluation) as exc:
        print(f"property failure: {exc}", file=sys.stderr)
        return _EXIT_PROPERTY


if __name__ == "__main__":
    sys.exit(main())
