"""Command-line front end.

Every command prints one JSON report on stdout.  Tables go to ``--out`` as
CSV (or to stdout after the report when ``--out`` is ``-``).  Rationals are
written as ``p/q`` strings; only the K-energy tables carry floats.

Exit codes: 0 success / extremal metric exists, 10 no extremal metric,
2 invalid input, 1 a check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import multiprocessing
import random
import sys
import time

from . import __version__
from .exactpoly import rational, rational_str
from .setup import AdmissibleSetup, SetupError, load_setup, random_setup, validate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_NONE = 10


class UsageError(ValueError):
    pass


def _report(command: str, setup: AdmissibleSetup | None, result, started: float, timing: bool) -> str:
    rep = {"command": command, "version": __version__}
    if setup is not None:
        rep["setup"] = setup.to_record()
    rep["result"] = result
    if timing:
        rep["wall_time"] = round(time.perf_counter() - started, 6)
    return json.dumps(rep, indent=2)


def _load_valid(path) -> AdmissibleSetup:
    setup = load_setup(path)
    problems = validate(setup)
    if problems:
        raise SetupError("; ".join(problems))
    return setup


def _write_csv(out, header, rows):
    if out is None:
        return
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out == "-":
        sys.stdout.write(buf.getvalue())
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())


def _pool(threads: int):
    if threads <= 1:
        return None
    return multiprocessing.get_context("fork").Pool(threads)


# -- classify ---------------------------------------------------------------

def cmd_classify(args, started):
    from .classify import classify

    setup = _load_valid(args.setup)
    v = classify(setup)
    print(_report("classify", setup, v.to_record(), started, args.timing))
    return EXIT_OK if v.exists else EXIT_NONE


# -- scan -------------------------------------------------------------------

_SCAN_TEMPLATE: AdmissibleSetup | None = None
_SCAN_AXES: tuple = ()


def _scan_init(template_record, axes):
    global _SCAN_TEMPLATE, _SCAN_AXES
    _SCAN_TEMPLATE = AdmissibleSetup.from_record(template_record)
    _SCAN_AXES = axes


def _scan_cell(xs):
    from .classify import classify

    st = _SCAN_TEMPLATE
    for idx, x in zip(_SCAN_AXES, xs):
        st = st.with_x(idx, x)
    row = [rational_str(x) for x in xs]
    if validate(st):
        return row + ["invalid", "", ""]
    v = classify(st)
    return row + [v.kind.value, rational_str(v.solution.A), rational_str(v.solution.futaki)]


def parse_axis(text: str, nfactors: int):
    try:
        idx, lo, hi = text.split(":")
        idx, lo, hi = int(idx), rational(lo), rational(hi)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad axis {text!r}; expected INDEX:LO:HI") from exc
    if not 0 <= idx < nfactors:
        raise UsageError(f"axis index {idx} out of range")
    if not (-1 <= lo < hi <= 1):
        raise UsageError(f"axis range {text!r} must satisfy -1 <= lo < hi <= 1")
    return idx, lo, hi


def grid_points(lo, hi, steps: int):
    """Cell midpoints ``lo + (hi - lo)(k - 1/2)/steps``, ``k = 1..steps``."""
    return [lo + (hi - lo) * (2 * k - 1) / (2 * steps) for k in range(1, steps + 1)]


def run_scan(setup: AdmissibleSetup, idxs, cells, threads: int = 1) -> list:
    """Classify every cell; rows come back in cell order whatever the scheduling."""
    if threads <= 1:
        _scan_init(setup.to_record(), idxs)
        return [_scan_cell(c) for c in cells]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(threads, initializer=_scan_init, initargs=(setup.to_record(), idxs)) as pool:
        return pool.map(_scan_cell, cells, chunksize=max(1, len(cells) // (8 * threads)))


def cmd_scan(args, started):
    setup = _load_valid(args.setup)
    if not 1 <= len(args.axis) <= 2:
        raise UsageError("scan takes one or two --axis options")
    axes = [parse_axis(a, len(setup.factors)) for a in args.axis]
    if len({a[0] for a in axes}) != len(axes):
        raise UsageError("two axes on the same factor")
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    grids = [grid_points(lo, hi, args.steps) for _, lo, hi in axes]
    cells = [(x,) for x in grids[0]] if len(grids) == 1 else [(x, y) for x in grids[0] for y in grids[1]]
    idxs = tuple(a[0] for a in axes)
    rows = run_scan(setup, idxs, cells, args.threads)
    header = [f"x{i}" for i in idxs] + ["kind", "A", "futaki"]
    _write_csv(args.out, header, rows)
    counts = {}
    for r in rows:
        counts[r[len(idxs)]] = counts.get(r[len(idxs)], 0) + 1
    result = {"cells": len(rows), "counts": dict(sorted(counts.items())), "csv": args.out}
    print(_report("scan", setup, result, started, args.timing))
    return EXIT_OK


# -- csc locus --------------------------------------------------------------

def cmd_csc_locus(args, started):
    from .classify import csc_locus_scan

    lo, hi = (rational(v) for v in args.x1_range.split(":"))
    pts = csc_locus_scan(args.s1, args.s2, grid=args.grid, x1_range=(lo, hi), tol=args.tol)
    rows = [[rational_str(p.x1), rational_str(p.x2), rational_str(p.s), str(p.exact).lower(),
             "" if p.kind is None else p.kind.value] for p in pts]
    _write_csv(args.out, ["x1", "x2", "s", "exact", "kind"], rows)
    result = {
        "s1": rational_str(rational(args.s1)),
        "s2": rational_str(rational(args.s2)),
        "points": len(pts),
        "exact_points": sum(p.exact for p in pts),
        "nonnegative_s": sum(p.s >= 0 for p in pts),
    }
    if args.out is None:
        result["locus"] = [p.to_record() for p in pts]
    print(_report("csc-locus", None, result, started, args.timing))
    return EXIT_OK


# -- stability --------------------------------------------------------------

def cmd_stability(args, started):
    from .stability import identity_holds, relative_slope_verdict, stability_polynomials, stability_report

    if args.random:
        if args.seed is None:
            raise UsageError("--random needs an explicit --seed")
        rng = random.Random(args.seed)
        failures = 0
        for _ in range(args.random):
            failures += not identity_holds(random_setup(rng))
        result = {"random_setups": args.random, "seed": args.seed, "identity_failures": failures}
        print(_report("stability", None, result, started, args.timing))
        return EXIT_OK if failures == 0 else EXIT_FAIL
    if args.setup is None:
        raise UsageError("stability needs a setup file or --random")
    setup = _load_valid(args.setup)
    step = rational(args.grid)
    if not 0 < step < 1:
        raise UsageError("--grid must be a rational step in (0, 1)")
    sp = stability_polynomials(setup)
    rows = []
    zero_at, positive_at = [], []
    z = -1 + step
    while z < 1:
        r = stability_report(setup, z, sp)
        rows.append([rational_str(z), rational_str(r.futaki_alpha), rational_str(r.modified)])
        if r.modified == 0:
            zero_at.append(rational_str(z))
        elif r.modified > 0:
            positive_at.append(rational_str(z))
        z += step
    _write_csv(args.out, ["z", "futaki_alpha", "modified_futaki"], rows)
    verdict = relative_slope_verdict(setup)
    result = {
        "futaki_beta": rational_str(sp.futaki_beta),
        "ip_bb": rational_str(sp.ip_bb),
        "samples": len(rows),
        "modified_nonpositive": not positive_at,
        "modified_zero_at": zero_at,
        "modified_positive_at": positive_at,
        "slope_verdict": verdict.to_record(),
    }
    print(_report("stability", setup, result, started, args.timing))
    return EXIT_OK


# -- K-energy ---------------------------------------------------------------

def cmd_kenergy(args, started):
    import numpy as np

    from .classify import classify
    from .kenergy import canonical_grid, destabilize, energy, minimize, most_negative_point

    setup = _load_valid(args.setup)
    v = classify(setup)
    grid = canonical_grid(args.nodes)
    if v.exists:
        res = minimize(setup, grid, tol=args.tol)
        e_star = energy(setup, res.grid)
        e_can = energy(setup, grid)
        theta = 1.0 / res.grid.U
        rows = [[repr(float(z)), repr(float(t))] for z, t in zip(res.grid.nodes, theta)]
        _write_csv(args.out, ["z", "theta"], rows)
        result = {
            "kind": v.kind.value,
            "nodes": args.nodes,
            "gradient_norm_at_minimiser": float(np.linalg.norm(e_star.gradient)),
            "descent_sup_diff": res.sup_diff,
            "descent_iterations": res.iterations,
            "energy_at_minimiser": e_star.value,
            "energy_at_canonical": e_can.value,
        }
        print(_report("kenergy", setup, result, started, args.timing))
        return EXIT_OK
    center = rational(args.bump_center) if args.bump_center else most_negative_point(v.solution.F)[0]
    width = rational(args.bump_width)
    width = min(width, (1 - abs(center)) / 2)
    d = destabilize(setup, center, width, args.kmax)
    rows = [[k, repr(e)] for k, e in zip(d.ks, d.energies)]
    _write_csv(args.out, ["k", "energy"], rows)
    result = {
        "kind": v.kind.value,
        "bump_center": rational_str(center),
        "bump_width": rational_str(width),
        "linear_coefficient": rational_str(d.linear_coefficient),
        "decreasing": d.decreasing,
        "energy_at_kmax": d.energies[-1],
    }
    print(_report("kenergy", setup, result, started, args.timing))
    return EXIT_NONE


# -- appendix ---------------------------------------------------------------

def cmd_appendix(args, started):
    from .appendix import identity_suite, order2_scan

    suite = identity_suite(args.mmax)
    pool = _pool(args.threads)
    if pool is None:
        scan = order2_scan(args.R)
    else:
        with pool:
            scan = order2_scan(args.R, pool)
    ok = suite.passed and not scan.hits and scan.region_infeasible
    parts = ["no order-2 admissible solutions" if not scan.hits else f"{len(scan.hits)} order-2 solutions found"]
    parts.append("all I(m,n,k) identities pass" if suite.passed else "I(m,n,k) identity failures")
    result = {
        "summary": "; ".join(parts),
        "order2": scan.to_record(),
        "identities": {k: {"checked": suite.checked[k], "failures": [list(f) for f in v]}
                       for k, v in suite.failures.items()},
    }
    print(_report("appendix", None, result, started, args.timing))
    return EXIT_OK if ok else EXIT_FAIL


# -- counterexample ---------------------------------------------------------

def cmd_counterexample(args, started):
    from .classify import ConstraintViolated, counterexample_setup

    try:
        setup, cert = counterexample_setup(args.x1, args.x2, args.r, require_negative=not args.allow_positive)
    except ConstraintViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(setup.to_toml())
    print(_report("counterexample", setup, cert.to_record(), started, args.timing))
    return EXIT_NONE


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the CSV table (or setup file) here; '-' for stdout")
    common.add_argument("--threads", type=int, default=1, help="worker processes for scans")
    common.add_argument("--seed", type=int, help="seed for randomized drivers")
    common.add_argument("--timing", action="store_true", help="add wall time to the report")

    p = argparse.ArgumentParser(prog="admkahler", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", parents=[common], help="existence verdict for one setup")
    c.add_argument("setup")
    c.set_defaults(func=cmd_classify)

    c = sub.add_parser(
        "scan", parents=[common], help="classify over a grid of class parameters",
        epilog="CSV columns: x<index> per axis, kind, A, futaki.",
    )
    c.add_argument("setup", help="template setup; scanned factors' x values are replaced")
    c.add_argument("--axis", action="append", default=[], help="INDEX:LO:HI, repeat for a second axis")
    c.add_argument("--steps", type=int, default=40, help="grid cells per axis (midpoints are sampled)")
    c.set_defaults(func=cmd_scan)

    c = sub.add_parser(
        "csc-locus", parents=[common], help="CSC classes for two curve factors",
        epilog="CSV columns: x1, x2, s, exact, kind.",
    )
    c.add_argument("--s1", required=True)
    c.add_argument("--s2", required=True)
    c.add_argument("--grid", type=int, default=40, help="number of x1 subdivisions")
    c.add_argument("--x1-range", default="0:1")
    c.add_argument("--tol", default="1/1099511627776", help="refinement width for irrational x2")
    c.set_defaults(func=cmd_csc_locus)

    c = sub.add_parser(
        "stability", parents=[common], help="Futaki invariants along the normal-cone deformation",
        epilog="CSV columns: z, futaki_alpha, modified_futaki.",
    )
    c.add_argument("setup", nargs="?")
    c.add_argument("--grid", default="1/100", help="z step")
    c.add_argument("--random", type=int, default=0, help="check the identity on N random setups")
    c.set_defaults(func=cmd_stability)

    c = sub.add_parser(
        "kenergy", parents=[common], help="minimise or destabilise the reduced K-energy",
        epilog="CSV columns: z, theta (extremal) or k, energy (destabilised).",
    )
    c.add_argument("setup")
    c.add_argument("--nodes", type=int, default=64)
    c.add_argument("--steps", dest="kmax", type=int, default=100, help="kmax for the destabilising ray")
    c.add_argument("--tol", type=float, default=1e-8)
    c.add_argument("--bump-center")
    c.add_argument("--bump-width", default="1/10")
    c.set_defaults(func=cmd_kenergy)

    c = sub.add_parser("appendix", parents=[common], help="moment identities and the order-2 scan")
    c.add_argument("--R", type=int, default=100)
    c.add_argument("--mmax", type=int, default=10)
    c.set_defaults(func=cmd_appendix)

    c = sub.add_parser("counterexample", parents=[common], help="three-factor family with a double root")
    c.add_argument("--x1", required=True)
    c.add_argument("--x2", required=True)
    c.add_argument("--r", required=True)
    c.add_argument("--allow-positive", action="store_true", help="report even if some s_a x_a >= 0")
    c.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except (SetupError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
