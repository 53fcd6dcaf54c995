"""Command-line front end.

Subcommands: nodes, factor, fraclap, fracplap, evolve, validate, bench.
Every run writes its data files plus a ``<subcommand>_manifest.json``
recording the resolved parameters, per-phase wall times, and the output
file list.  Exit codes: 0 success, 1 parameter error, 2 numerical-contract
violation (the message names the violated contract).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import MemoryGuardError, NumericalContractError
from .eigen import condition_number, factorize
from .evolution import config_grids, load_config, quad_mass, run_evolution
from .fields import gaussian_field, lorentzian_field, radius_squared
from .fraclap import apply_fraclap, build_axis_factors, build_fraclap
from .fracplap import (
    DEFAULT_MEM_BUDGET,
    apply_plap_batched,
    apply_plap_pointwise,
    build_fracplap,
)
from .grid import build_diff_matrices, make_grid
from .errors import PoleError
from .oracles import (
    exact_fraclap_algebraic,
    exact_fraclap_gaussian,
    gamma_fn,
    resolvent_integral_oracle,
    semigroup_integral_oracle,
    _asymp_1f1,
    _series_1f1,
    _series_2f1,
)
from .tensor_ops import read_field_csv, write_field_csv


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from None


def _make_field(selector: str, grids, dims):
    """Resolve a --field argument to (samples, kind, lorentz_exponent)."""
    if selector == "gaussian":
        return gaussian_field(grids), "gaussian", None
    if selector == "lorentzian":
        return lorentzian_field(grids), "lorentzian", 1.0
    if selector.startswith("lorentzian:"):
        r = float(selector.partition(":")[2])
        return lorentzian_field(grids, r), "lorentzian", r
    if selector.startswith("csv:"):
        path = selector.partition(":")[2]
        U = read_field_csv(path)
        if U.shape != tuple(dims):
            raise ValueError(
                f"field file shape {U.shape} does not match --dims {tuple(dims)}"
            )
        return U, "csv", None
    raise ValueError(
        f"unknown field {selector!r}; expected gaussian, lorentzian[:r], or csv:PATH"
    )


def _exact_reference(kind, lorentz_r, s, n, r2):
    if kind == "gaussian":
        return exact_fraclap_gaussian(s, n, r2)
    if kind == "lorentzian":
        return exact_fraclap_algebraic(s, lorentz_r, n, r2)
    raise ValueError("--compare-exact requires a built-in field (gaussian or lorentzian)")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _manifest(out_dir: Path, subcommand: str, params: dict, timings: dict, outputs: list[str]) -> None:
    path = out_dir / f"{subcommand}_manifest.json"
    _write_json(
        path,
        {
            "subcommand": subcommand,
            "version": __version__,
            "parameters": params,
            "timings": timings,
            "outputs": outputs,
        },
    )


def _cmd_nodes(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    grid = make_grid(args.n, args.scale)
    name = "nodes.csv"
    with open(out_dir / name, "w", newline="\n") as fh:
        fh.write("j,xi,x\n")
        for j in range(grid.N):
            fh.write(f"{j + 1},{grid.xi[j]:.17g},{grid.x[j]:.17g}\n")
    timings = {"total": time.perf_counter() - t0}
    _manifest(out_dir, "nodes", {"n": args.n, "scale": args.scale}, timings, [name])
    print(f"wrote {out_dir / name}")
    return 0


def _cmd_factor(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    grid = make_grid(args.n, args.scale)
    dm = build_diff_matrices(grid)
    factor = factorize(dm.Dxx)
    scale2 = args.scale * args.scale
    recon = factor.P @ (factor.lam[:, None] * factor.Pinv)
    residual = float(
        np.max(np.abs(recon - dm.Dxx)) / np.max(np.abs(dm.Dxx))
    )
    report = {
        "N": factor.N,
        "min_lambda": float(np.min(factor.lam)) / scale2,
        "raw_zero_lambda": factor.raw_zero_lambda / scale2,
        "condition_number": condition_number(factor.P),
        "reconstruction_residual": residual,
    }
    name = "factor_report.json"
    _write_json(out_dir / name, report)
    timings = {"total": time.perf_counter() - t0}
    _manifest(out_dir, "factor", {"n": args.n, "scale": args.scale}, timings, [name])
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_fraclap(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dims = _parse_ints(args.dims)
    scales = _parse_floats(args.scales)
    if len(dims) != len(scales):
        raise ValueError(f"--dims has {len(dims)} entries but --scales has {len(scales)}")
    grids = [make_grid(N, L) for N, L in zip(dims, scales)]
    t0 = time.perf_counter()
    factors = build_axis_factors(dims)
    op = build_fraclap(factors, scales, args.s)
    t_build = time.perf_counter() - t0
    U, kind, lor_r = _make_field(args.field, grids, dims)
    t0 = time.perf_counter()
    out = apply_fraclap(op, U)
    t_core = time.perf_counter() - t0
    csv_name = "fraclap_field.csv"
    sidecar = write_field_csv(out_dir / csv_name, out)
    outputs = [csv_name, os.path.basename(sidecar)]
    report = {"wall_time_core": t_core}
    t_oracle = 0.0
    if args.compare_exact:
        t0 = time.perf_counter()
        exact = _exact_reference(kind, lor_r, args.s, len(dims), radius_squared(grids))
        t_oracle = time.perf_counter() - t0
        report["max_error"] = float(np.max(np.abs(out - exact)))
    report["wall_time_oracle"] = t_oracle
    name = "fraclap_report.json"
    _write_json(out_dir / name, report)
    outputs.append(name)
    params = {
        "dims": list(dims),
        "scales": list(scales),
        "s": args.s,
        "field": args.field,
        "compare_exact": bool(args.compare_exact),
    }
    _manifest(out_dir, "fraclap", params,
              {"build": t_build, "core": t_core, "oracle": t_oracle}, outputs)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _warn_sp_range(s: float, p: float) -> None:
    if s * p >= 2.0:
        print(
            f"warning: s*p = {s * p:g} is at least 2; the pointwise reduction is "
            "only known to represent the singular-integral operator for s*p < 2, "
            "so these values are formula-defined",
            file=sys.stderr,
        )


def _cmd_fracplap(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dims = _parse_ints(args.dims)
    scales = _parse_floats(args.scales)
    if len(dims) != len(scales):
        raise ValueError(f"--dims has {len(dims)} entries but --scales has {len(scales)}")
    if args.compare_exact and args.p != 2.0:
        raise ValueError("--compare-exact is only available for p = 2")
    grids = [make_grid(N, L) for N, L in zip(dims, scales)]
    t0 = time.perf_counter()
    factors = build_axis_factors(dims)
    op = build_fracplap(factors, scales, args.s, args.p)
    t_build = time.perf_counter() - t0
    _warn_sp_range(args.s, args.p)
    U, kind, lor_r = _make_field(args.field, grids, dims)

    def run_mode(mode: str) -> np.ndarray:
        if mode == "loop":
            return apply_plap_pointwise(op, U, threads=args.threads)
        return apply_plap_batched(op, U, mem_budget=args.mem_budget)

    t0 = time.perf_counter()
    out = run_mode(args.mode)
    t_core = time.perf_counter() - t0
    report = {"mode": args.mode, "wall_time": t_core}
    if args.check_other_mode:
        other = "batch" if args.mode == "loop" else "loop"
        try:
            report["discrepancy_vs_other_mode"] = float(
                np.max(np.abs(out - run_mode(other)))
            )
        except MemoryGuardError as exc:
            report["discrepancy_vs_other_mode"] = None
            report["other_mode_note"] = f"skipped: memory guard ({exc})"
    if args.compare_exact:
        exact = _exact_reference(kind, lor_r, args.s, len(dims), radius_squared(grids))
        report["max_error"] = float(np.max(np.abs(out - exact)))
    csv_name = "fracplap_field.csv"
    sidecar = write_field_csv(out_dir / csv_name, out)
    name = "fracplap_report.json"
    _write_json(out_dir / name, report)
    params = {
        "dims": list(dims),
        "scales": list(scales),
        "s": args.s,
        "p": args.p,
        "mode": args.mode,
        "field": args.field,
        "threads": args.threads,
        "mem_budget": args.mem_budget,
        "check_other_mode": bool(args.check_other_mode),
        "compare_exact": bool(args.compare_exact),
    }
    _manifest(out_dir, "fracplap", params, {"build": t_build, "core": t_core},
              [csv_name, os.path.basename(sidecar), name])
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def _cmd_evolve(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        config = load_config(args.config)
    except OSError as exc:
        raise ValueError(f"cannot read config: {exc}") from None
    _warn_sp_range(config.s, config.p)
    grids = config_grids(config)
    u0 = gaussian_field(grids)
    mass0 = quad_mass(u0, grids)
    t0 = time.perf_counter()
    snapshots = run_evolution(config, u0, mem_budget=args.mem_budget, threads=args.threads)
    wall = time.perf_counter() - t0
    x = grids[0].x
    mid = (config.N - 1) // 2
    section_idx = (slice(None),) + (mid,) * (config.n - 1)
    outputs = []
    for requested, snap in zip(config.snapshot_times, snapshots):
        name = f"snap_t{requested:g}.csv"
        section = snap.U[section_idx]
        with open(out_dir / name, "w", newline="\n") as fh:
            fh.write("x,u,r,v\n")
            for k in range(config.N):
                fh.write(
                    f"{x[k]:.17g},{section[k]:.17g},"
                    f"{snap.section_r[k]:.17g},{snap.section_v[k]:.17g}\n"
                )
        outputs.append(name)
    masses = [[snap.t, snap.mass] for snap in snapshots]
    if mass0 != 0.0:
        drift = max(abs(snap.mass - mass0) for snap in snapshots) / abs(mass0)
    else:
        drift = max(abs(snap.mass) for snap in snapshots) if snapshots else 0.0
    report = {
        "initial_mass": mass0,
        "masses": masses,
        "drift": drift,
        "wall_time": wall,
    }
    name = "evolve_report.json"
    _write_json(out_dir / name, report)
    outputs.append(name)
    params = {
        "config": str(args.config),
        "n": config.n, "s": config.s, "p": config.p,
        "N": config.N, "L": config.L, "dt": config.dt,
        "t_end": config.t_end, "snapshot_times": list(config.snapshot_times),
        "threads": args.threads, "mem_budget": args.mem_budget,
    }
    _manifest(out_dir, "evolve", params, {"integration": wall}, outputs)
    print(json.dumps({"drift": drift, "masses": masses}, indent=2))
    return 0


def _validate_lemmas() -> list[dict]:
    mus = (-0.5, -1.0, -4.0)
    ss = (0.2, 0.5, 0.8)
    worst_res = worst_semi = worst_chain = 0.0
    for mu in mus:
        for s in ss:
            r1 = resolvent_integral_oracle(mu, s)
            r2 = semigroup_integral_oracle(mu, s)
            worst_res = max(worst_res, abs(r1.numeric - r1.closed) / abs(r1.closed))
            worst_semi = max(worst_semi, abs(r2.numeric - r2.closed) / abs(r2.closed))
            chain = abs(r2.closed - r1.closed / gamma_fn(1.0 + s)) / abs(r2.closed)
            worst_chain = max(worst_chain, chain)
    return [
        {"name": "resolvent_quadrature", "max_deviation": worst_res, "tolerance": 1e-6},
        {"name": "semigroup_quadrature", "max_deviation": worst_semi, "tolerance": 1e-6},
        {"name": "power_chain_identity", "max_deviation": worst_chain, "tolerance": 1e-12},
    ]


def _validate_hyp() -> list[dict]:
    w = np.linspace(45.0, 55.0, 41)
    worst_1f1 = 0.0
    for a, b in ((0.63, 0.5), (2.13, 2.0), (1.2, 1.5)):
        series, _, _ = _series_1f1(b - a, b, w)
        near = np.exp(-w) * series
        far, _, _ = _asymp_1f1(a, b, w)
        worst_1f1 = max(worst_1f1, float(np.max(np.abs(near - far) / np.abs(far))))
    z = -w
    worst_2f1 = 0.0
    for a, b, c in ((1.3, 0.63, 0.5), (0.7, 1.8, 1.5)):
        pfaff, _, _ = _series_2f1(a, c - b, c, z / (z - 1.0), 40000)
        near = (1.0 - z) ** (-a) * pfaff
        # connection-branch values at the same z, forced through the far path
        s1, _, _ = _series_2f1(a, a - c + 1.0, a - b + 1.0, 1.0 / z, 400)
        s2, _, _ = _series_2f1(b, b - c + 1.0, b - a + 1.0, 1.0 / z, 400)
        g1 = gamma_fn(c) * gamma_fn(b - a) / (gamma_fn(b) * gamma_fn(c - a))
        g2 = gamma_fn(c) * gamma_fn(a - b) / (gamma_fn(a) * gamma_fn(c - b))
        far = g1 * w ** (-a) * s1 + g2 * w ** (-b) * s2
        worst_2f1 = max(worst_2f1, float(np.max(np.abs(near - far) / np.abs(far))))
    r2 = np.array([0.0, 0.4, 3.0, 90.0, 1e5])
    zero_g = float(np.max(np.abs(exact_fraclap_gaussian(0.0, 3, r2) - np.exp(-r2))))
    zero_a = float(
        np.max(
            np.abs(exact_fraclap_algebraic(0.0, 1.3, 2, r2) - (1.0 + r2) ** -1.3)
            / (1.0 + r2) ** -1.3
        )
    )
    return [
        {"name": "confluent_branch_overlap", "max_deviation": worst_1f1, "tolerance": 1e-9},
        {"name": "gauss_branch_overlap", "max_deviation": worst_2f1, "tolerance": 1e-9},
        {"name": "order_zero_gaussian", "max_deviation": zero_g, "tolerance": 1e-12},
        {"name": "order_zero_algebraic", "max_deviation": zero_a, "tolerance": 1e-12},
    ]


def _validate_gamma() -> list[dict]:
    worst = 0.0
    fact = 1.0
    for k in range(1, 21):
        worst = max(worst, abs(gamma_fn(float(k)) - fact) / fact)
        fact *= k
    root_pi = math.sqrt(math.pi)
    half_values = {
        0.5: root_pi,
        1.5: root_pi / 2.0,
        2.5: 3.0 * root_pi / 4.0,
        -0.5: -2.0 * root_pi,
        -1.5: 4.0 * root_pi / 3.0,
        -2.5: -8.0 * root_pi / 15.0,
    }
    worst_half = max(
        abs(gamma_fn(x) - v) / abs(v) for x, v in half_values.items()
    )
    poles_ok = True
    for x in (0.0, -1.0, -7.0):
        try:
            gamma_fn(x)
            poles_ok = False
        except PoleError:
            pass
    return [
        {"name": "integer_factorials", "max_deviation": worst, "tolerance": 1e-13},
        {"name": "half_integer_values", "max_deviation": worst_half, "tolerance": 1e-13},
        {"name": "pole_detection", "max_deviation": 0.0 if poles_ok else 1.0, "tolerance": 0.5},
    ]


def _cmd_validate(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    checks = {"lemmas": _validate_lemmas, "hyp": _validate_hyp, "gamma": _validate_gamma}[
        args.suite
    ]()
    for check in checks:
        check["pass"] = bool(check["max_deviation"] <= check["tolerance"])
    all_pass = all(c["pass"] for c in checks)
    report = {"suite": args.suite, "checks": checks, "all_pass": all_pass}
    name = "validate_report.json"
    _write_json(out_dir / name, report)
    _manifest(out_dir, "validate", {"suite": args.suite},
              {"total": time.perf_counter() - t0}, [name])
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if all_pass else 2


def _cmd_bench(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dims = _parse_ints(args.dims)
    scales = _parse_floats(args.scales)
    if len(dims) != len(scales):
        raise ValueError(f"--dims has {len(dims)} entries but --scales has {len(scales)}")
    grids = [make_grid(N, L) for N, L in zip(dims, scales)]
    factors = build_axis_factors(dims)
    op = build_fracplap(factors, scales, args.s, args.p)
    _warn_sp_range(args.s, args.p)
    U, kind, lor_r = _make_field(args.field, grids, dims)
    t0 = time.perf_counter()
    loop_out = apply_plap_pointwise(op, U, threads=args.threads)
    t_loop = time.perf_counter() - t0
    report = {"wall_time_loop": t_loop}
    t_batch = None
    try:
        t0 = time.perf_counter()
        batch_out = apply_plap_batched(op, U, mem_budget=args.mem_budget)
        t_batch = time.perf_counter() - t0
        report["wall_time_batch"] = t_batch
        report["discrepancy"] = float(np.max(np.abs(loop_out - batch_out)))
    except MemoryGuardError as exc:
        report["wall_time_batch"] = None
        report["batch_note"] = f"skipped: memory guard ({exc})"
    if args.p == 2.0 and kind in ("gaussian", "lorentzian"):
        exact = _exact_reference(kind, lor_r, args.s, len(dims), radius_squared(grids))
        report["max_error"] = float(np.max(np.abs(loop_out - exact)))
    name = "bench_report.json"
    _write_json(out_dir / name, report)
    params = {
        "dims": list(dims), "scales": list(scales), "s": args.s, "p": args.p,
        "field": args.field, "threads": args.threads, "mem_budget": args.mem_budget,
    }
    timings = {"loop": t_loop}
    if t_batch is not None:
        timings["batch"] = t_batch
    _manifest(out_dir, "bench", params, timings, [name])
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="fracspec", description=__doc__)
    parser.add_argument("--version", action="version", version=f"fracspec {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=".", help="directory for output files")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("nodes", parents=[common], help="emit the mapped collocation nodes")
    p.add_argument("--n", type=int, required=True, help="node count")
    p.add_argument("--scale", type=float, required=True, help="map scale L")
    p.set_defaults(func=_cmd_nodes)

    p = sub.add_parser("factor", parents=[common],
                       help="eigen-factorize the second-derivative matrix")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scale", type=float, default=1.0)
    p.set_defaults(func=_cmd_factor)

    p = sub.add_parser("fraclap", parents=[common], help="apply the fractional Laplacian")
    p.add_argument("--dims", required=True, help="comma-separated node counts")
    p.add_argument("--scales", required=True, help="comma-separated map scales")
    p.add_argument("--s", type=float, required=True, help="fractional order in (0,1)")
    p.add_argument("--field", default="gaussian",
                   help="gaussian | lorentzian[:r] | csv:PATH")
    p.add_argument("--compare-exact", action="store_true",
                   help="also evaluate the closed-form reference and report max error")
    p.set_defaults(func=_cmd_fraclap)

    p = sub.add_parser("fracplap", parents=[common], help="apply the fractional p-Laplacian")
    p.add_argument("--dims", required=True)
    p.add_argument("--scales", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=("loop", "batch"), default="loop")
    p.add_argument("--field", default="gaussian")
    p.add_argument("--threads", type=int, default=None,
                   help="pointwise-loop thread count; 1 is the determinism mode")
    p.add_argument("--mem-budget", type=int, default=DEFAULT_MEM_BUDGET,
                   help="byte budget for the batched difference table")
    p.add_argument("--check-other-mode", action="store_true",
                   help="also run the other mode and report the discrepancy")
    p.add_argument("--compare-exact", action="store_true",
                   help="compare against the closed form (p = 2 only)")
    p.set_defaults(func=_cmd_fracplap)

    p = sub.add_parser("evolve", parents=[common], help="integrate the evolution equation")
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--mem-budget", type=int, default=DEFAULT_MEM_BUDGET)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("validate", parents=[common],
                       help="run the reference-oracle self checks")
    p.add_argument("--suite", choices=("lemmas", "hyp", "gamma"), required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", parents=[common],
                       help="time the loop and batched p-Laplacian routes")
    p.add_argument("--dims", required=True)
    p.add_argument("--scales", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--field", default="gaussian")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--mem-budget", type=int, default=DEFAULT_MEM_BUDGET)
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalContractError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
