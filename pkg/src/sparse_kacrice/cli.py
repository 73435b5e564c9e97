"""Command-line interface.

Subcommands
-----------
analyze       expected zero count of a sum (x-space, moment-space, or both)
density-grid  zero density sampled on a rectangular grid (CSV/JSON)
psi-grid      decrease/increase classification of an added exponent on a grid
witness       interior point certifying the decrease region is nonempty
ray           density ratio along a ray (CSV)
mc            Monte-Carlo estimate of the zero count (one variable)
algebra       tensor/shared-variable products and power builders
bkk           complex-coefficient density total vs. n! times polytope volume
selftest      closed-form smoke checks, pass/fail table

Inputs are JSON objects {"dim": m, "support": [[...], ...], "coeffs":
[...]} (coeffs optional).  Exit codes: 0 success, 2 bad input, 3
numerical non-convergence.  Data outputs carry "schema": 1 and contain
nothing time-dependent.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import algebra as algebra_mod
from . import mc_oracle
from .complexcase import ComplexExpSum, bkk_total, n_factorial_volume
from .errors import ConvergenceError, DomainError, InputError, SparseKacRiceError
from .expsum import ExpSum, density, evaluate, invert_moment
from .integrate import Quadrature, esol_pspace, esol_total
from .monotonicity import (
    Augmentation,
    psi,
    ray_scan_unbounded,
    region_scan,
    witness_interior,
)

__all__ = ["main", "console_main"]


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(part) for part in text.split(",")])
    except ValueError as exc:
        raise InputError(f"could not parse {text!r} as comma-separated reals") from exc


def _parse_box(text: str, m: int):
    if text == "auto":
        return "auto"
    values = _parse_floats(text)
    if values.size != 2 * m:
        raise InputError(f"--box needs {2 * m} comma-separated reals (lo,hi per axis)")
    return tuple((values[2 * i], values[2 * i + 1]) for i in range(m))


def _parse_resolution(text: str, m: int):
    parts = [int(p) for p in text.split(",")]
    if len(parts) == 1:
        return parts[0]
    if len(parts) != m:
        raise InputError(f"--resolution needs 1 or {m} integers")
    return tuple(parts)


def _load_expsum(path: str, cls=ExpSum):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    return cls.from_json(text)


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(payload: dict, output: str | None) -> None:
    _emit(json.dumps(payload, indent=2), output)


def _resolve_threads(value) -> int:
    if value is None:
        value = int(os.environ.get("SPARSE_KACRICE_THREADS", "0"))
    value = int(value)
    return os.cpu_count() or 1 if value == 0 else value


# ---------------------------------------------------------------------------
# Handlers


def _cmd_analyze(args) -> int:
    E = _load_expsum(args.input)
    box = _parse_box(args.box, E.dim)
    q = Quadrature(abs_tol=args.tol, rel_tol=args.tol, box=box)
    if args.route in ("x", "p"):
        result = esol_total(E, q) if args.route == "x" else esol_pspace(E, Quadrature(abs_tol=args.tol, rel_tol=args.tol))
        _emit_json(
            {
                "schema": 1,
                "value": result.value,
                "error": result.error,
                "route": result.route,
                "cells": result.cells,
            },
            args.output,
        )
        return 0
    rx = esol_total(E, q)
    rp = esol_pspace(E, Quadrature(abs_tol=args.tol, rel_tol=args.tol))
    _emit_json(
        {
            "schema": 1,
            "route": "both",
            "x": {"value": rx.value, "error": rx.error, "cells": rx.cells},
            "p": {"value": rp.value, "error": rp.error, "cells": rp.cells},
            "abs_diff": abs(rx.value - rp.value),
        },
        args.output,
    )
    return 0


def _grid_axes(box, resolution, m):
    if np.isscalar(resolution):
        resolution = (int(resolution),) * m
    return [np.linspace(lo, hi, r) for (lo, hi), r in zip(box, resolution)]


def _cmd_density_grid(args) -> int:
    E = _load_expsum(args.input)
    m = E.dim
    box = _parse_box(args.box, m)
    if box == "auto":
        box = tuple((-5.0, 5.0) for _ in range(m))
    axes = _grid_axes(box, _parse_resolution(args.resolution, m), m)
    grids = np.meshgrid(*axes, indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    from .expsum import density_many

    values = density_many(E, points)
    if args.format == "json" or (args.output or "").endswith(".json"):
        payload = {
            "schema": 1,
            "box": [list(map(float, b)) for b in box],
            "axes": [axis.tolist() for axis in axes],
            "density": values.tolist(),
        }
        _emit_json(payload, args.output)
    else:
        lines = [",".join([f"x{i + 1}" for i in range(m)] + ["density"])]
        for row, value in zip(points, values):
            lines.append(",".join([repr(float(c)) for c in row] + [repr(float(value))]))
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_psi_grid(args) -> int:
    E = _load_expsum(args.input)
    aug = Augmentation(_parse_floats(args.a0), args.alpha0)
    box = _parse_box(args.box, E.dim) if args.box != "auto" else None
    scan = region_scan(
        E,
        aug,
        box=box,
        resolution=_parse_resolution(args.resolution, E.dim),
        space=args.space,
        threads=_resolve_threads(args.threads),
    )
    if args.format == "json" or (args.output or "").endswith(".json"):
        _emit(scan.to_json(), args.output)
    else:
        _emit(scan.to_csv(), args.output)
    return 0


def _cmd_witness(args) -> int:
    E = _load_expsum(args.input)
    aug = Augmentation(_parse_floats(args.a0), args.alpha0)
    x0 = witness_interior(E, aug)
    result = psi(E, aug, x0)
    _emit_json(
        {
            "schema": 1,
            "x0": x0.tolist(),
            "psi": result.psi,
            "classification": result.classification,
        },
        args.output,
    )
    return 0


def _cmd_ray(args) -> int:
    E = _load_expsum(args.input)
    aug = Augmentation(_parse_floats(args.a0), args.alpha0)
    direction = _parse_floats(args.direction)
    evals = ray_scan_unbounded(E, aug, direction, args.t_max, args.steps)
    ts = np.linspace(args.t_max / args.steps, args.t_max, args.steps)
    lines = ["t,psi,class"]
    for t, e in zip(ts, evals):
        lines.append(f"{float(t)!r},{e.psi!r},{e.classification}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def _cmd_mc(args) -> int:
    E = _load_expsum(args.input)
    lo, hi = _parse_floats(args.interval)
    cfg = mc_oracle.McConfig(
        n_samples=args.samples, seed=args.seed, interval=(float(lo), float(hi))
    )
    mean, stderr = mc_oracle.estimate_esol(E, cfg)
    _emit_json(
        {"schema": 1, "mean": mean, "stderr": stderr, "samples": args.samples},
        args.output,
    )
    return 0


def _cmd_algebra(args) -> int:
    if args.op == "kostlan":
        if args.dim is None or args.degree is None:
            raise InputError("kostlan needs --dim and --degree")
        result = algebra_mod.kostlan(args.dim, args.degree)
    elif args.op == "power":
        if args.input is None or args.degree is None:
            raise InputError("power needs --input and --degree")
        result = algebra_mod.aronszajn_power(_load_expsum(args.input), args.degree)
    else:
        if args.input is None or args.input2 is None:
            raise InputError(f"{args.op} needs --input and --input2")
        E_a = _load_expsum(args.input)
        E_b = _load_expsum(args.input2)
        if args.op == "tensor":
            result = algebra_mod.tensor(E_a, E_b)
        else:
            result = algebra_mod.aronszajn(E_a, E_b)
    payload = {"schema": 1}
    payload.update(result.to_dict())
    _emit_json(payload, args.output)
    return 0


def _cmd_bkk(args) -> int:
    E = _load_expsum(args.input, cls=ComplexExpSum)
    result = bkk_total(E, Quadrature(abs_tol=args.tol, rel_tol=args.tol))
    reference = n_factorial_volume(E)
    _emit_json(
        {
            "schema": 1,
            "density_route_total": result.value,
            "n_factorial_vol": reference,
            "abs_diff": abs(result.value - reference),
        },
        args.output,
    )
    return 0


def _selftest_checks():
    two_term = ExpSum([[0.0], [1.0]])

    def esol_two_term():
        return abs(esol_total(two_term).value - 0.5) < 1e-6

    def esol_degree_four():
        return abs(esol_total(algebra_mod.kostlan(1, 4)).value - 1.0) < 1e-4

    def density_closed_form():
        want = 1.0 / (2.0 * math.pi * math.cosh(1.0))
        return abs(density(two_term, [1.0]) - want) < 1e-12

    def inversion_round_trip():
        x = invert_moment(two_term, [0.73])
        return abs(float(evaluate(two_term, x).mu[0]) - 0.73) < 1e-8

    def witness_in_square():
        E = algebra_mod.kostlan(2, 1)
        aug = Augmentation(np.array([0.5, 0.5]))
        x0 = witness_interior(E, aug)
        return psi(E, aug, x0).psi < 1.0

    def metric_additivity():
        E_a = ExpSum([[0.0], [1.0]])
        E_b = ExpSum([[0.0], [0.5], [1.7]], [1.0, 2.0, 1.0])
        g_sum = evaluate(algebra_mod.aronszajn(E_a, E_b), [0.4]).g.entries
        g_parts = evaluate(E_a, [0.4]).g.entries + evaluate(E_b, [0.4]).g.entries
        return float(np.abs(g_sum - g_parts).max()) < 1e-12

    def binomial_coefficients():
        built = algebra_mod.kostlan(1, 2)
        return np.allclose(built.coeffs, [1.0, math.sqrt(2.0), 1.0], atol=1e-12)

    def bkk_segment():
        E = ComplexExpSum([[0.0], [1.0], [2.0]])
        return abs(bkk_total(E).value - 2.0) < 1e-3

    def mc_two_term():
        cfg = mc_oracle.McConfig(n_samples=4000, seed=7, interval=(-12.0, 12.0))
        mean, stderr = mc_oracle.estimate_esol(two_term, cfg)
        return abs(mean - 0.5) < 4.0 * stderr

    return [
        ("two-term expected zero count is 1/2", esol_two_term),
        ("degree-4 one-variable count is sqrt(4)/2", esol_degree_four),
        ("two-term density closed form at x=1", density_closed_form),
        ("moment-map inversion round trip", inversion_round_trip),
        ("interior witness decreases density", witness_in_square),
        ("metric additivity of shared-variable product", metric_additivity),
        ("binomial coefficient system at degree 2", binomial_coefficients),
        ("complex density total equals the root count", bkk_segment),
        ("Monte-Carlo agrees with quadrature", mc_two_term),
    ]


def _cmd_selftest(args) -> int:
    failures = 0
    for label, check in _selftest_checks():
        try:
            ok = bool(check())
        except Exception as exc:  # honest report, keep going
            ok = False
            label = f"{label} ({type(exc).__name__}: {exc})"
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        failures += 0 if ok else 1
    print(f"{len(_selftest_checks()) - failures} passed, {failures} failed")
    return 0 if failures == 0 else 3


# ---------------------------------------------------------------------------
# Parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-kacrice",
        description="Expected real zeros of Gaussian exponential sums.",
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for grid scans (0 = auto; env SPARSE_KACRICE_THREADS)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="expected zero count")
    p.add_argument("--input", required=True, help="exponential-sum JSON file")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--box", default="auto", help="auto or lo,hi per axis")
    p.add_argument("--route", choices=("x", "p", "both"), default="x")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("density-grid", help="zero density on a grid")
    p.add_argument("--input", required=True)
    p.add_argument("--box", default="auto")
    p.add_argument("--resolution", default="64")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_density_grid)

    p = sub.add_parser("psi-grid", help="added-exponent classification grid")
    p.add_argument("--input", required=True)
    p.add_argument("--a0", required=True, help="comma-separated exponent")
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--space", choices=("p", "x"), default="p")
    p.add_argument("--box", default="auto")
    p.add_argument("--resolution", default="64")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_psi_grid)

    p = sub.add_parser("witness", help="interior decrease-region witness")
    p.add_argument("--input", required=True)
    p.add_argument("--a0", required=True)
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_witness)

    p = sub.add_parser("ray", help="density ratio along a ray")
    p.add_argument("--input", required=True)
    p.add_argument("--a0", required=True)
    p.add_argument("--alpha0", type=float, default=1.0)
    p.add_argument("--direction", required=True)
    p.add_argument("--t-max", type=float, default=40.0)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_ray)

    p = sub.add_parser("mc", help="Monte-Carlo zero count (one variable)")
    p.add_argument("--input", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--interval", default="-12,12")
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_mc)

    p = sub.add_parser("algebra", help="products and power builders")
    p.add_argument("--op", choices=("tensor", "aronszajn", "power", "kostlan"), required=True)
    p.add_argument("--input")
    p.add_argument("--input2")
    p.add_argument("--dim", type=int)
    p.add_argument("--degree", type=int)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_algebra)

    p = sub.add_parser("bkk", help="complex density total vs. volume count")
    p.add_argument("--input", required=True)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--output")
    p.set_defaults(handler=_cmd_bkk)

    p = sub.add_parser("selftest", help="closed-form smoke checks")
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (InputError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        detail = "" if exc.value is None else f" (partial value {exc.value!r})"
        print(f"error: {exc}{detail}", file=sys.stderr)
        return 3
    except SparseKacRiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def console_main() -> None:
    sys.exit(main())
