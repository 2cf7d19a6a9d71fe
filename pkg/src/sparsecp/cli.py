"""Command-line front door.

Subcommands map one-to-one onto the library modules and emit
machine-readable JSON (or CSV files for the phase-diagram export).  Every
run echoes its fully resolved configuration into the output, and all
randomness is driven by explicit seeds, so identical invocations produce
identical bytes.

Exit codes: 0 success, 1 usage, 2 domain error, 3 numerical failure.
The environment variable SPARSECP_SEED overrides the default seed of the
Monte Carlo subcommands.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import grassmann, limits, mc, oracle, phase
from .errors import DomainError, NumericalError, SparseCPError
from .saddle import PhasePoint, saddle_values

__all__ = ["main", "build_parser"]

GRASSMANN_TOL = 1e-10


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # values like -1,0 (negative complex parts) are arguments, not flags
        self._negative_number_matcher = re.compile(r"^-\d")

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected a complex number as re,im, got {text!r}")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_range(text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"expected a range as min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return lo, hi, count


def _default_seed() -> int:
    return int(os.environ.get("SPARSECP_SEED", "0"))


def _cpx(z: complex):
    return [z.real, z.imag]


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    print(text)


def cmd_phase_diagram(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid_path = out_dir / "grid.csv"
    curves_path = out_dir / "curves.csv"
    phase.export_grid(args.b, args.z, str(grid_path), str(curves_path),
                      boundary_tol=args.tol, curve_samples=args.curve_samples)
    config = {
        "subcommand": "phase-diagram",
        "b_range": list(args.b), "z_range": list(args.z),
        "boundary_tol": args.tol, "curve_samples": args.curve_samples,
        "grid_csv": grid_path.name, "curves_csv": curves_path.name,
    }
    (out_dir / "run.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {grid_path} and {curves_path}")
    return 0


def cmd_saddle(args) -> int:
    pt = PhasePoint(args.b, args.z0sq)
    s = saddle_values(pt)
    star = None
    if s.star is not None:
        st = s.star
        if pt.b > 0 and pt.z0sq > 0:
            cubic_res = abs(2 * st.alpha * (1 - st.alpha) ** 2 * pt.b ** 2
                            + 1 - st.alpha - pt.z0sq)
        else:
            cubic_res = 0.0
        star = {
            "alpha": st.alpha,
            "t_star_sq": st.t_star_sq,
            "x_star": st.x_star,
            "h_star": st.h_star,
            "value": st.value,
            "cubic_residual": cubic_res,
            "der1": (6 * st.alpha ** 2 - 8 * st.alpha + 2) * pt.b ** 2 - 1,
            "h_star_residual": abs(st.h_star - (pt.b * st.x_star
                                                + st.t_star_sq + pt.z0sq)),
        }
    payload = {
        "config": {"subcommand": "saddle", "b": pt.b, "z0sq": pt.z0sq},
        "star": star,
        "vsaddle": None if s.vsaddle is None else {
            "r0_sq": s.vsaddle.r0_sq, "value": s.vsaddle.value},
        "zero": {"value": _finite_or_none(s.zero.value)},
        "region_argmax": phase.classify_by_argmax(pt).code,
        "region_curves": (phase.classify_by_curves(pt).code
                          if pt.z0sq > 0 else None),
    }
    _emit(payload, args.out)
    return 0


def cmd_limits(args) -> int:
    z0sq = abs(args.z0) ** 2
    pt = PhasePoint.from_p(args.p, z0sq)
    region = phase.classify_by_argmax(pt, tol=args.tol)
    d = limits.Displacement(args.zeta1, args.zeta2)
    if region is phase.Region.OMEGA1:
        params = limits.limit_params(args.p, args.z0)
        beta, gamma = params.beta, params.gamma_coeff
    else:
        params = limits.LimitParams(p=args.p, z0=args.z0, beta=0.0,
                                    gamma_coeff=0.0)
        beta = gamma = None
    ratio = limits.limit_ratio(region, params, d)
    payload = {
        "config": {"subcommand": "limits", "p": args.p, "z0": _cpx(args.z0),
                   "zeta1": _cpx(args.zeta1), "zeta2": _cpx(args.zeta2),
                   "boundary_tol": args.tol, "scan": args.scan,
                   "scan_max": args.scan_max},
        "b": pt.b, "z0sq": z0sq,
        "region": region.code,
        "beta": beta,
        "gamma": gamma,
        "ratio": ratio,
    }
    if args.scan > 0:
        # theoretical ratio sampled along the zeta1 - zeta2 direction
        delta = args.zeta1 - args.zeta2
        direction = delta / abs(delta) if delta != 0 else 1.0 + 0j
        scan = []
        for k in range(args.scan):
            r = args.scan_max * (k + 1) / args.scan
            dk = limits.Displacement(r * direction, 0j)
            scan.append({"abs_delta": r,
                         "ratio": limits.limit_ratio(region, params, dk)})
        payload["scan"] = scan
    _emit(payload, args.out)
    return 0


def cmd_mc(args) -> int:
    est = mc.estimate_ratio(args.n, args.p, args.z0, args.zeta1, args.zeta2,
                            samples=args.samples, seed=args.seed,
                            workers=args.workers, chunk_size=args.chunk_size,
                            bootstrap=args.bootstrap)
    payload = {
        "config": {"subcommand": "mc", "n": args.n, "p": args.p,
                   "z0": _cpx(args.z0), "zeta1": _cpx(args.zeta1),
                   "zeta2": _cpx(args.zeta2), "samples": args.samples,
                   "seed": args.seed, "workers": args.workers,
                   "chunk_size": args.chunk_size,
                   "bootstrap": args.bootstrap},
        "ratio": est.ratio, "stderr": est.stderr,
        "ci_low": est.ci_low, "ci_high": est.ci_high,
        "samples": est.n_samples, "discarded": est.discarded,
        "n": args.n, "p": args.p,
        "z0": _cpx(args.z0), "zeta1": _cpx(args.zeta1),
        "zeta2": _cpx(args.zeta2), "seed": est.seed,
        "jackknife": est.jackknife, "reliable": est.reliable,
    }
    _emit(payload, args.out)
    return 0


def cmd_oracle(args) -> int:
    cfg = oracle.OracleConfig(n=args.n, p=args.p, z1=args.z1, z2=args.z2,
                              samples=args.samples, seed=args.seed,
                              chunk_size=args.chunk_size, workers=args.workers)
    est = oracle.f2_oracle(cfg)
    payload = {
        "config": {"subcommand": "oracle", "n": args.n, "p": args.p,
                   "z1": _cpx(args.z1), "z2": _cpx(args.z2),
                   "samples": args.samples, "seed": args.seed,
                   "workers": args.workers, "chunk_size": args.chunk_size,
                   "b": cfg.b},
        "mean_re": est.mean.real, "mean_im": est.mean.imag,
        "stderr": est.stderr, "stderr_im": est.stderr_imag,
        "samples": est.n_samples, "seed": est.seed,
        "n": args.n, "p": args.p,
    }
    _emit(payload, args.out)
    return 0


def cmd_grassmann_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    max_gauss = 0.0
    for _ in range(args.trials):
        d = int(rng.integers(1, 5))
        B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        max_gauss = max(max_gauss, grassmann.verify_gaussian_grassmann(B))
    max_jk = 0.0
    for _ in range(args.trials):
        Q = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        v = complex(rng.standard_normal(), rng.standard_normal())
        z1 = complex(rng.standard_normal(), rng.standard_normal())
        z2 = complex(rng.standard_normal(), rng.standard_normal())
        b = float(rng.uniform(0, 1.5))
        max_jk = max(max_jk, grassmann.verify_jk(Q, v, z1, z2, b))
    ok = max_gauss <= GRASSMANN_TOL and max_jk <= GRASSMANN_TOL
    payload = {
        "config": {"subcommand": "grassmann-check", "trials": args.trials,
                   "seed": args.seed},
        "max_gaussian_residual": max_gauss,
        "max_jk_residual": max_jk,
        "tolerance": GRASSMANN_TOL,
        "pass": ok,
    }
    _emit(payload, args.out)
    if not ok:
        raise NumericalError("identity residuals exceeded tolerance")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sparsecp",
                     description="Saddle-point phase diagram and Monte Carlo "
                                 "laboratory for sparse non-Hermitian "
                                 "characteristic polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phase-diagram", parents=[], description=cmd_phase_diagram.__doc__,
                       help="export the region grid and boundary curves as CSV")
    p.add_argument("--b", type=parse_range, default=(0.0, 1.5, 100),
                   help="b range as min:max:count (default 0:1.5:100)")
    p.add_argument("--z", type=parse_range, default=(0.0, 2.0, 100),
                   help="z0sq range as min:max:count (default 0:2:100)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--tol", type=float, default=phase.BOUNDARY_TOL,
                   help="boundary tolerance for the argmax classifier")
    p.add_argument("--curve-samples", type=int, default=200,
                   help="samples per boundary curve")
    p.set_defaults(func=cmd_phase_diagram)

    p = sub.add_parser("saddle", help="evaluate the saddle candidates at one point")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--z0sq", type=float, required=True)
    p.add_argument("--out", help="also write the JSON to this path")
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("limits", help="limit-law parameters and ratio at a point")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--z0", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--zeta1", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--zeta2", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--tol", type=float, default=phase.BOUNDARY_TOL)
    p.add_argument("--scan", type=int, default=0,
                   help="also sample the theoretical ratio at this many "
                        "displacement magnitudes along zeta1 - zeta2")
    p.add_argument("--scan-max", type=float, default=4.0,
                   help="largest |zeta1 - zeta2| in the scan")
    p.add_argument("--out", help="also write the JSON to this path")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("mc", help="ensemble Monte Carlo ratio estimate")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--z0", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--zeta1", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--zeta2", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--samples", type=int, default=20000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=None,
                   help="samples per chunk (default: sized from n)")
    p.add_argument("--bootstrap", type=int, default=200)
    p.add_argument("--out", help="also write the JSON to this path")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("oracle", help="Gaussian-expectation estimate of f2")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--z1", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--z2", type=parse_complex, required=True, metavar="RE,IM")
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--chunk-size", type=int, default=65536)
    p.add_argument("--out", help="also write the JSON to this path")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("grassmann-check",
                       help="mechanical verification of the Berezin identities")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="also write the JSON to this path")
    p.set_defaults(func=cmd_grassmann_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, SparseCPError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
